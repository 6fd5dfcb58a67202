"""Crystallographic groups given by a point group, an invariant lattice and a vector system.

Everything is computed in lattice coordinates.  With D the common denominator
of the generator translations, each representative t_g is stored as the
integer vector D * coords(t_g); two representatives of one coset differ by an
element of D * Z^l.  Point-group elements act through integer matrices.

Sentences about the infinite group are never evaluated by enumeration.  Each
is replaced by a finite linear Diophantine system:

* split test: t_s - (1 - s) v in L for every generator s, with v rational;
  the cocycle property makes the generator conditions sufficient.
* involution in a coset: g^2 = 1 and (1 + g)(t_g + x) = 0 with x in L.
* equal squares: (1 + g)(t_g + x) = (1 + h)(t_h + y), g^2 = h^2.
* commuting with an involution: the involution system for h together with
  (1 - h)(t_g + x) = (1 - g)(t_h + y), gh = hg.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    InconsistentVectorSystem,
    MixedParents,
    NotAnInvolution,
    QuotientTooLarge,
    UsageError,
)
from .exactla import (
    IntegerMatrix,
    RationalMatrix,
    format_rational,
    smith_normal_form,
    nullspace,
    solve_integer_linear,
    solve_rational,
    sublattice_in_subspace,
    vec,
)
from .lattices import InvariantLattice, invariant_lattice

DEFAULT_QUOTIENT_CEILING = 200_000
GROUP_SCHEMA_VERSION = 1


def _matvec(A: RationalMatrix, v: Sequence[int]) -> tuple[int, ...]:
    c = A.cols
    num = A.num
    return tuple(sum(num[i * c + k] * v[k] for k in range(c) if num[i * c + k]) for i in range(A.rows))


class CrystGroup:
    def __init__(self, lattice: InvariantLattice, translations: Sequence[Sequence], meta: dict | None = None,
                 _raw: tuple | None = None):
        W0 = lattice.group
        if len(translations) != W0.rank:
            raise UsageError(f"expected {W0.rank} generator translations, got {len(translations)}")
        if lattice.rank == 0:
            raise UsageError("rank-0 lattice")
        self.point_group = W0
        self.lattice = lattice
        self.meta = dict(meta or {})
        self.gen_translations = tuple(vec(t) for t in translations)
        coords = [lattice.coords(t) for t in self.gen_translations]
        D = 1
        for c in coords:
            for x in c:
                D = math.lcm(D, x.denominator)
        self.D = D
        self.gen_coords = tuple(tuple(int(x * D) for x in c) for c in coords)
        self.profile_cache: dict[int, tuple] = {}
        if _raw is not None:
            self.D, self.c = _raw
            return
        self._build()

    # construction -----------------------------------------------------------
    def _build(self) -> None:
        W0, D, l = self.point_group, self.D, self.lattice.rank
        acts = self.lattice.element_actions()
        gc = self.gen_coords
        c: list = [None] * W0.order
        c[0] = (0,) * l
        for i in range(1, W0.order):
            p, k = W0.parent[i], W0.via[i]
            moved = _matvec(acts[p], gc[k])
            c[i] = tuple(a + b for a, b in zip(c[p], moved))
        for i in range(W0.order):
            Ai = acts[i]
            for k in range(W0.rank):
                j = W0.right[i][k]
                moved = _matvec(Ai, gc[k])
                if any((a + b - e) % D for a, b, e in zip(c[i], moved, c[j])):
                    raise InconsistentVectorSystem(
                        f"two words for point-group element {j} give translations in different cosets")
        self.c = c

    def reshifted(self, rng: random.Random, spread: int = 3) -> "CrystGroup":
        """Same group, with every representative t_g moved by a random lattice vector."""
        D = self.D
        c = [tuple(a + D * rng.randint(-spread, spread) for a in ci) if i else ci for i, ci in enumerate(self.c)]
        other = CrystGroup(self.lattice, self.gen_translations, self.meta, _raw=(D, c))
        other.profile_cache = dict(self.profile_cache)  # profiles depend on the lattice only
        return other

    def to_struct(self) -> dict:
        m = self.meta
        return {
            "schema_version": GROUP_SCHEMA_VERSION,
            "kind": "crystallographic_group",
            "type": m.get("type"),
            "rank": m.get("rank"),
            "lattice": m.get("lattice"),
            "parameter": m.get("parameter"),
            "name": m.get("name"),
            "generator_translations": [[format_rational(x) for x in t] for t in self.gen_translations],
        }

    # accessors ----------------------------------------------------------------
    @property
    def rank(self) -> int:
        return self.lattice.rank

    def action(self, g: int) -> RationalMatrix:
        return self.lattice.element_actions()[g]

    def t_coords(self, g: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.D) for x in self.c[g])

    def t(self, g: int) -> tuple[Fraction, ...]:
        """Representative translation t_g in ambient coordinates."""
        return self.lattice.vector(self.t_coords(g))

    def vsys(self) -> list[tuple[Fraction, ...]]:
        return [self.t(g) for g in range(self.point_group.order)]

    def same_vsys(self, other: "CrystGroup") -> bool:
        """Equal vector systems modulo the lattice (same lattice and point group assumed)."""
        for g in range(self.point_group.order):
            d = [a - b for a, b in zip(self.t_coords(g), other.t_coords(g))]
            if any(x.denominator != 1 for x in d):
                return False
        return True

    def element(self, v: Sequence, g: int) -> "GroupElement":
        q = self.lattice.coords(vec(v))
        e = GroupElement(self, q, g)
        if not e.in_group():
            raise UsageError("(v, g) does not lie in the group")
        return e

    def element_from_coords(self, q: Sequence, g: int) -> "GroupElement":
        return GroupElement(self, tuple(Fraction(x) for x in q), g)

    def identity(self) -> "GroupElement":
        return GroupElement(self, (Fraction(0),) * self.rank, 0)

    def generator(self, k: int) -> "GroupElement":
        g = self.point_group.generator_index(k)
        return GroupElement(self, self.t_coords(g), g)

    def coset_element(self, g: int) -> "GroupElement":
        return GroupElement(self, self.t_coords(g), g)

    def translation(self, v: Sequence) -> "GroupElement":
        return self.element(v, 0)

    def check_cocycle(self, exhaustive: bool = False) -> bool:
        """t_gh - t_g - g t_h in L; over generator h always, over all pairs when exhaustive."""
        W0, D = self.point_group, self.D
        acts = self.lattice.element_actions()
        hs = range(W0.order) if exhaustive else [W0.generator_index(k) for k in range(W0.rank)]
        for g in range(W0.order):
            for h in hs:
                gh = W0.multiply(g, h)
                moved = _matvec(acts[g], self.c[h])
                if any((a + b - e) % D for a, b, e in zip(self.c[g], moved, self.c[gh])):
                    return False
        return True

    def describe(self) -> str:
        m = self.meta
        return f"{m.get('type', '?')}{m.get('rank', '')}-{m.get('lattice', '?')} {m.get('name', '?')}"


@dataclass(frozen=True)
class GroupElement:
    group: CrystGroup
    q: tuple  # translation part in lattice coordinates
    g: int

    @property
    def v(self) -> tuple:
        return self.group.lattice.vector(self.q)

    def in_group(self) -> bool:
        return all((x - y).denominator == 1 for x, y in zip(self.q, self.group.t_coords(self.g)))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.g == other.g and self.q == other.q

    def __hash__(self) -> int:
        return hash((id(self.group), self.q, self.g))

    def __repr__(self) -> str:
        v = ", ".join(str(x) for x in self.v)
        return f"GroupElement(v=({v}), g={self.g})"


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.group is not b.group:
        raise MixedParents("elements belong to different groups")
    W = a.group
    moved = W.action(a.g).apply(b.q)
    return GroupElement(W, tuple(x + y for x, y in zip(a.q, moved)), W.point_group.multiply(a.g, b.g))


def invert(a: GroupElement) -> GroupElement:
    W = a.group
    gi = W.point_group.inverse(a.g)
    moved = W.action(gi).apply(a.q)
    return GroupElement(W, tuple(-x for x in moved), gi)


def square(a: GroupElement) -> GroupElement:
    return multiply(a, a)


def build_from_generators(L: InvariantLattice, gens: Sequence[tuple], meta: dict | None = None) -> CrystGroup:
    """gens: list of (t_i, s_i); s_i must be the point group's generators in order."""
    W0 = L.group
    if len(gens) != W0.rank:
        raise UsageError(f"expected {W0.rank} generators")
    for k, (_, s) in enumerate(gens):
        if s is not None and s != W0.gens[k]:
            raise UsageError(f"generator {k + 1} does not match the point group's generator")
    return CrystGroup(L, [t for t, _ in gens], meta)


def group_from_struct(obj: dict) -> CrystGroup:
    """Inverse of CrystGroup.to_struct."""
    try:
        if obj.get("kind") != "crystallographic_group":
            raise UsageError("not a serialized crystallographic group")
        if obj.get("schema_version") != GROUP_SCHEMA_VERSION:
            raise UsageError(f"unsupported group schema {obj.get('schema_version')}")
        L = invariant_lattice(obj["type"], obj["rank"], obj["lattice"], obj.get("parameter"))
        ts = [[Fraction(x) for x in t] for t in obj["generator_translations"]]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"malformed group record: {exc}") from None
    meta = {k: obj.get(k) for k in ("type", "rank", "lattice", "parameter", "name")}
    return CrystGroup(L, ts, meta)


# --------------------------------------------------------------------------
# Diophantine predicates


def _ident(l: int) -> RationalMatrix:
    return RationalMatrix.identity(l)


def _block_system(blocks: list[list[RationalMatrix | None]], rhs: list[Sequence]) -> tuple[RationalMatrix, list]:
    rows = []
    flat_rhs = []
    for brow, r in zip(blocks, rhs):
        height = next(b.rows for b in brow if b is not None)
        widths = [b.cols if b is not None else None for b in brow]
        for i in range(height):
            row = []
            for b, w in zip(brow, widths):
                row += list(b.row(i)) if b is not None else [Fraction(0)] * w
            rows.append(row)
        flat_rhs += list(r)
    return RationalMatrix.from_rows(rows), flat_rhs


def _fill_widths(blocks, width):
    return [[b if b is not None else RationalMatrix.zeros(next(x.rows for x in brow if x is not None), width)
             for b in brow] for brow in blocks]


def coset_involution_exists(W: CrystGroup, g: int) -> GroupElement | None:
    """An involution (t_g + x, g), x in L, or None."""
    W0 = W.point_group
    if g == 0 or W0.multiply(g, g) != 0:
        return None
    l = W.rank
    A = _ident(l) + W.action(g)
    tg = W.t_coords(g)
    sol = solve_integer_linear(A, [-x for x in A.apply(tg)])
    if sol is None:
        return None
    return W.element_from_coords([a + b for a, b in zip(tg, sol.particular)], g)


def coset_equal_squares_many(W: CrystGroup, gs: Sequence[int], square_translation: Sequence | None = None):
    """Elements z_i in the cosets of gs with z_1^2 = z_2^2 = ..., optionally all equal to
    (square_translation, g^2).  Returns the tuple of witnesses or None."""
    W0 = W.point_group
    sq = {W0.multiply(g, g) for g in gs}
    if len(sq) != 1:
        return None
    l, k = W.rank, len(gs)
    I = _ident(l)
    ops = [I + W.action(g) for g in gs]
    ts = [W.t_coords(g) for g in gs]
    base = [op.apply(t) for op, t in zip(ops, ts)]
    rows, rhs = [], []
    zero = RationalMatrix.zeros(l, l)
    for i in range(k - 1):
        blocks = [zero] * k
        blocks[i] = ops[i]
        blocks[i + 1] = -ops[i + 1]
        rows.append(blocks)
        rhs.append([b - a for a, b in zip(base[i], base[i + 1])])
    if square_translation is not None:
        target = W.lattice.coords(vec(square_translation))
        blocks = [zero] * k
        blocks[0] = ops[0]
        rows.append(blocks)
        rhs.append([a - b for a, b in zip(target, base[0])])
    if not rows:
        z = W.element_from_coords(ts[0], gs[0])
        return (z,)
    A, b = _block_system(rows, rhs)
    sol = solve_integer_linear(A, b)
    if sol is None:
        return None
    x = sol.particular
    return tuple(W.element_from_coords([a + b for a, b in zip(ts[i], x[i * l:(i + 1) * l])], gs[i])
                 for i in range(k))


def coset_equal_squares(W: CrystGroup, g: int, h: int, square_translation: Sequence | None = None):
    return coset_equal_squares_many(W, [g, h], square_translation)


def coset_commuting_with_involution(W: CrystGroup, g: int, h: int):
    """(z_g, z_h) with z_h an involution in the coset of h commuting with z_g, or None."""
    W0 = W.point_group
    if h == 0 or W0.multiply(h, h) != 0 or W0.multiply(g, h) != W0.multiply(h, g):
        return None
    l = W.rank
    I = _ident(l)
    Ag, Ah = W.action(g), W.action(h)
    tg, th = W.t_coords(g), W.t_coords(h)
    zero = RationalMatrix.zeros(l, l)
    P, M1, M2 = I + Ah, I - Ah, I - Ag
    rhs1 = [-x for x in P.apply(th)]
    rhs2 = [a - b for a, b in zip(M2.apply(th), M1.apply(tg))]
    A, b = _block_system([[zero, P], [M1, -M2]], [rhs1, rhs2])
    sol = solve_integer_linear(A, b)
    if sol is None:
        return None
    x, y = sol.particular[:l], sol.particular[l:]
    zg = W.element_from_coords([a + b for a, b in zip(tg, x)], g)
    zh = W.element_from_coords([a + b for a, b in zip(th, y)], h)
    return zg, zh


def split_witness(W: CrystGroup) -> tuple | None:
    """v (ambient) with t_s - (1 - s) v in L for every generator s, or None."""
    W0 = W.point_group
    l = W.rank
    I = _ident(l)
    gens = [W0.generator_index(k) for k in range(W0.rank)]
    M = None
    r = []
    for s in gens:
        block = I - W.action(s)
        M = block if M is None else M.vstack(block)
        r += list(W.t_coords(s))
    # eliminate v: forms P with P M = 0, then P y = P r over integers y
    forms = nullspace(M.T.to_rows(), M.rows)
    if forms:
        P = RationalMatrix.from_rows(forms)
        sol = solve_integer_linear(P, P.apply(r))
        if sol is None:
            return None
        y = sol.particular
    else:
        y = (0,) * M.rows
    q = solve_rational(M, [a - b for a, b in zip(r, y)])
    if q is None:
        raise AssertionError("elimination produced an inconsistent system")
    return W.lattice.vector(q)


def relation_matrix(L: InvariantLattice) -> list[list[int]]:
    """Translation parts of the Coxeter relations as an integer matrix on the generator translations.

    Row block (i, j) maps (t_1, ..., t_n), in lattice coordinates, to the translation of
    (u_i u_j)^m(i,j) (u_i^2 when i = j).
    """
    W0 = L.group
    acts = L.action_matrices
    l, n = L.rank, W0.rank
    ident = RationalMatrix.identity(l)
    rows = []
    for i in range(n):
        for j in range(i, n):
            word = [i, i] if i == j else [i, j] * W0.coxeter_matrix[i][j]
            blocks = [RationalMatrix.zeros(l, l) for _ in range(n)]
            prefix = ident
            for k in word:
                blocks[k] = blocks[k] + prefix
                prefix = prefix @ acts[k]
            for r in range(l):
                rows.append([int(b[r, c]) for b in blocks for c in range(l)])
    return rows


def cohomology_order(L: InvariantLattice) -> int:
    """|H^1(W0, V/L)|, an upper bound for the number of extension classes of W0 by L."""
    R = relation_matrix(L)
    S, _, _ = smith_normal_form(IntegerMatrix(R))
    factors = [S[i, i] for i in range(min(len(R), len(R[0]))) if S[i, i]]
    I = RationalMatrix.identity(L.rank)
    stacked = []
    for A in L.action_matrices:
        stacked += (I - A).to_rows()
    coboundary_dim = L.rank - len(nullspace(stacked, L.rank))
    if len(R[0]) - len(factors) != coboundary_dim:
        raise UsageError("point group has invariant vectors; H^1 is infinite")
    return math.prod(factors)


def is_split(W: CrystGroup) -> bool:
    return split_witness(W) is not None


def split_section(W: CrystGroup, v: Sequence) -> list[GroupElement]:
    """Elements ((1 - g) v, g) for every g: a complement to the translations when v is a split witness."""
    q = W.lattice.coords(vec(v))
    out = []
    for g in range(W.point_group.order):
        moved = W.action(g).apply(q)
        out.append(W.element_from_coords([a - b for a, b in zip(q, moved)], g))
    return out


def reflection_coset_profile(W: CrystGroup, g: int) -> tuple[int, int, int, int]:
    """(rank T^u, rank T_u, |T^u / 2T^u|, |T_u / 2T_u|) for u in the coset of the involution g."""
    cached = W.profile_cache.get(g)
    if cached is not None:
        return cached
    W0 = W.point_group
    if g == 0 or W0.multiply(g, g) != 0:
        raise NotAnInvolution(f"point-group element {g} is not an involution")
    M = W0.elements[g]
    I = RationalMatrix.identity(M.rows)
    ranks = []
    for sign in (1, -1):
        ker = nullspace((I - M.scale(sign)).to_rows(), M.rows)
        if not ker:
            ranks.append(0)
            continue
        sub = sublattice_in_subspace(W.lattice.basis, RationalMatrix.from_columns(ker))
        ranks.append(0 if sub is None else sub.cols)
    profile = (ranks[0], ranks[1], 2 ** ranks[0], 2 ** ranks[1])
    W.profile_cache[g] = profile
    return profile


# --------------------------------------------------------------------------
# finite quotients W / mT


class FiniteQuotient:
    """W / mT with elements numbered g * m^l + (digits of the lattice offset mod m)."""

    def __init__(self, W: CrystGroup, m: int):
        if m < 1:
            raise UsageError("modulus must be positive")
        self.W = W
        self.m = m
        self.l = W.rank
        self.block = m ** self.l
        self.order = W.point_group.order * self.block
        self.mD = m * W.D
        self._acts = W.lattice.element_actions()
        self._mul_cache: dict = {}

    def _decode(self, e: int) -> tuple[tuple[int, ...], int]:
        g, r = divmod(e, self.block)
        digits = []
        for _ in range(self.l):
            r, d = divmod(r, self.m)
            digits.append(d)
        u = tuple(c + self.W.D * x for c, x in zip(self.W.c[g], digits))
        return u, g

    def _encode(self, u: Sequence[int], g: int) -> int:
        D = self.W.D
        r = 0
        for a, c in reversed(list(zip(u, self.W.c[g]))):
            diff = a - c
            if diff % D:
                raise AssertionError("translation left its coset")
            r = r * self.m + (diff // D) % self.m
        return g * self.block + r

    def multiply(self, a: int, b: int) -> int:
        ua, g = self._decode(a)
        ub, h = self._decode(b)
        moved = _matvec(self._acts[g], ub)
        gh = self.W.point_group.multiply(g, h)
        return self._encode([(x + y) % self.mD for x, y in zip(ua, moved)], gh)

    @property
    def identity(self) -> int:
        return 0

    def element_of(self, z: GroupElement) -> int:
        u = [int(x * self.W.D) for x in z.q]
        return self._encode(u, z.g)

    def generators(self) -> list[int]:
        W = self.W
        gens = [self.element_of(W.generator(k)) for k in range(W.point_group.rank)]
        l = self.l
        for i in range(l):
            e = [Fraction(int(i == j)) for j in range(l)]
            gens.append(self.element_of(W.element_from_coords(e, 0)))
        return sorted(set(g for g in gens if g != 0)) or [0]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.multiply(x, a)
            k += 1
        return k

    def table(self, limit: int = 2000) -> list[list[int]]:
        if self.order > limit:
            raise QuotientTooLarge(f"explicit table of order {self.order} exceeds {limit}")
        return [[self.multiply(a, b) for b in range(self.order)] for a in range(self.order)]

    def closure(self, seeds: Sequence[int], normal: bool = False) -> set[int]:
        gens = self.generators()
        sub = {0}
        frontier = [0]
        seeds = set(seeds)
        sub_gens = set(seeds)
        while True:
            while frontier:
                x = frontier.pop()
                for s in list(sub_gens):
                    y = self.multiply(x, s)
                    if y not in sub:
                        sub.add(y)
                        frontier.append(y)
            if not normal:
                return sub
            inverses = {g: self.inverse(g) for g in gens}
            new = set()
            for s in sub_gens:
                for g in gens:
                    c = self.multiply(self.multiply(g, s), inverses[g])
                    if c not in sub:
                        new.add(c)
            if not new:
                return sub
            sub_gens |= new
            frontier = list(sub)

    def inverse(self, a: int) -> int:
        u, g = self._decode(a)
        z = self.W.element_from_coords([Fraction(x, self.W.D) for x in u], g)
        return self.element_of(invert(z))

    def fingerprint(self) -> dict:
        n = self.order
        orders = Counter(self.element_order(a) for a in range(n))
        gens = self.generators()
        center = sum(1 for a in range(n) if all(self.multiply(a, s) == self.multiply(s, a) for s in gens))
        comms = set()
        for a in gens:
            for b in gens:
                ab = self.multiply(a, b)
                ba = self.multiply(b, a)
                comms.add(self.multiply(ab, self.inverse(ba)))
        derived = self.closure(comms, normal=True)
        return {
            "modulus": self.m,
            "order": n,
            "element_orders": dict(sorted(orders.items())),
            "abelianization": self._abelianization(derived),
            "center_order": center,
            "derived_order": len(derived),
        }

    def _abelianization(self, derived: set[int]) -> list[int]:
        # cosets of the derived subgroup, then invariant factors from p-power counts
        coset_of = {}
        reps = []
        for a in range(self.order):
            if a in coset_of:
                continue
            cid = len(reps)
            reps.append(a)
            for d in derived:
                coset_of[self.multiply(a, d)] = cid
        k = len(reps)

        def q_order(c):
            x, e, acc = reps[c], 1, reps[c]
            while coset_of[acc] != coset_of[0]:
                acc = self.multiply(acc, x)
                e += 1
            return e

        orders = [q_order(c) for c in range(k)]
        return _invariant_factors(orders, k)


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _invariant_factors(orders: list[int], size: int) -> list[int]:
    """Invariant factors d1 | d2 | ... of a finite abelian group from its element orders."""
    if size == 1:
        return []
    primary = []
    for p in _prime_factors(size):
        # elements killed by p^k number p^(sum_i min(k, e_i)) over the p-primary exponents e_i
        sums = [0]
        while True:
            k = len(sums)
            c = sum(1 for o in orders if (p ** k) % o == 0)
            sums.append(round(math.log(c, p)))
            if sums[-1] == sums[-2]:
                break
        at_least = [sums[k] - sums[k - 1] for k in range(1, len(sums))]
        exps = []
        for k in range(len(at_least) - 1):
            exps += [k + 1] * (at_least[k] - at_least[k + 1])
        primary.append(sorted(p ** e for e in exps))
    width = max(len(x) for x in primary)
    factors = [1] * width
    for powers in primary:
        padded = [1] * (width - len(powers)) + powers
        factors = [f * q for f, q in zip(factors, padded)]
    return [f for f in factors if f > 1]


def finite_quotient(W: CrystGroup, m: int, ceiling: int | None = None) -> FiniteQuotient:
    ceiling = DEFAULT_QUOTIENT_CEILING if ceiling is None else ceiling
    order = W.point_group.order * m ** W.rank
    if order > ceiling:
        raise QuotientTooLarge(f"quotient order {order} exceeds ceiling {ceiling}")
    return FiniteQuotient(W, m)
