"""Lattices invariant under a finite point group, their centerings, and equivalence probes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from .errors import BoundTooLarge, UsageError
from .exactla import (
    IntegerMatrix,
    RationalMatrix,
    canonical_basis,
    commutant_dimension,
    hermite_normal_form,
    integer_rank,
    solve_integer_linear,
)
from .rootsys import LatticeSpec, RootSystem, lattice_for, root_lattice, weight_lattice
from .weyl import WeylGroup, weyl_group

DEFAULT_WORK_CEILING = 2_000_000


class NotInvariant(UsageError):
    pass


class InvariantLattice:
    """A full-rank lattice in the span it lives in, stable under the given generators.

    Coordinates are taken with respect to the canonical (HNF) basis of the lattice.
    """

    def __init__(self, spec: LatticeSpec, generators: Sequence[RationalMatrix] | None = None,
                 group: WeylGroup | None = None, label: str = ""):
        if group is None and generators is None:
            raise UsageError("need generators or a group")
        self.spec = spec
        self.label = label or spec.name
        self._group = group
        self.generators = tuple(group.gens if generators is None else generators)
        basis = canonical_basis(spec.basis)
        if basis is None or basis.cols != spec.rank:
            raise UsageError("lattice basis must have full rank")
        self.basis = basis
        self.rank = basis.cols
        Bt = basis.T
        self.left_inverse = (Bt @ basis).inverse() @ Bt
        actions = []
        for g in self.generators:
            gB = g @ basis
            A = self.left_inverse @ gB
            if basis @ A != gB or not A.is_integral() or abs(A.det()) != 1:
                raise NotInvariant(f"{self.label} is not stable under a generator")
            actions.append(A)
        self.action_matrices = tuple(actions)
        self._element_actions: list | None = None

    @classmethod
    def for_root_system(cls, type_label: str, l: int, family: str, parameter: int | None = None,
                        with_group: bool = True) -> "InvariantLattice":
        spec = lattice_for(type_label, l, family, parameter)
        if with_group:
            return cls(spec, group=weyl_group(type_label, l))
        from .rootsys import build_root_system

        return cls(spec, build_root_system(type_label, l).simple_reflections())

    @property
    def group(self) -> WeylGroup:
        if self._group is None:
            self._group = WeylGroup(self.generators)
        return self._group

    @property
    def ambient_dim(self) -> int:
        return self.basis.rows

    def coords(self, v: Sequence) -> tuple:
        """Lattice coordinates of a vector of the lattice's span (rational in general)."""
        c = self.left_inverse.apply(v)
        if self.basis.apply(c) != tuple(Fraction(x) for x in v):
            raise UsageError("vector outside the span of the lattice")
        return c

    def vector(self, coords: Sequence) -> tuple:
        return self.basis.apply(coords)

    def contains(self, v: Sequence) -> bool:
        try:
            return all(x.denominator == 1 for x in self.coords(v))
        except UsageError:
            return False

    def element_actions(self) -> list[RationalMatrix]:
        """Integer action matrix of every group element, in canonical element order."""
        if self._element_actions is None:
            W = self.group
            acts = [RationalMatrix.identity(self.rank)]
            for i in range(1, W.order):
                acts.append(acts[W.parent[i]] @ self.action_matrices[W.via[i]])
            self._element_actions = acts
        return self._element_actions

    def is_faithful(self) -> bool:
        acts = self.element_actions()
        return all(not acts[i].is_identity() for i in range(1, len(acts)))

    def scaled(self, lam) -> "InvariantLattice":
        spec = LatticeSpec(self.spec.family, self.spec.rank, self.spec.basis.scale(lam), self.spec.parameter)
        return InvariantLattice(spec, self.generators, self._group, f"{lam}*{self.label}")


@lru_cache(maxsize=32)
def invariant_lattice(type_label: str, l: int, family: str, parameter: int | None = None) -> InvariantLattice:
    """Shared InvariantLattice for a root system and a named lattice."""
    return InvariantLattice.for_root_system(type_label, l, family, parameter)


def check_invariant_sandwich(L: LatticeSpec, R: RootSystem) -> bool:
    if L.rank != R.rank or L.ambient_dim != R.ambient_dim:
        return False
    Q, P = root_lattice(R), weight_lattice(R)
    if not (L.contains_lattice(Q) and P.contains_lattice(L)):
        return False
    try:
        InvariantLattice(L, R.simple_reflections())
    except NotInvariant:
        return False
    return True


def absolutely_irreducible(L: InvariantLattice) -> bool:
    return commutant_dimension(list(L.action_matrices)) == 1


# --------------------------------------------------------------------------
# centerings


@dataclass(frozen=True)
class Centering:
    coords: IntegerMatrix  # HNF basis in the parent lattice's coordinates
    index: int
    sub_basis: RationalMatrix = field(compare=False)

    def content(self) -> int:
        return math.gcd(*(x for r in self.coords.data for x in r))


def _hnf_square(cols: list[list[int]]) -> IntegerMatrix:
    """HNF of the lattice spanned by integer column vectors, trimmed to its rank."""
    n = len(cols[0])
    M = IntegerMatrix([[c[i] for c in cols] for i in range(n)])
    H, _ = hermite_normal_form(M)
    keep = [j for j in range(H.cols) if any(H[i, j] for i in range(H.rows))]
    return IntegerMatrix([[H[i, j] for j in keep] for i in range(H.rows)])


def _make_centering(L: InvariantLattice, H: IntegerMatrix) -> Centering:
    idx = 1
    for i in range(H.rows):
        idx *= H[i, i]
    return Centering(H, idx, L.basis @ H.to_rational())


def centering_from_vectors(L: InvariantLattice, vectors: Sequence[Sequence]) -> Centering:
    """The sublattice spanned by ambient vectors of L, as a Centering (full rank, stability checked)."""
    cols = []
    for v in vectors:
        c = L.coords(v)
        if any(x.denominator != 1 for x in c):
            raise UsageError("vector outside the lattice")
        cols.append([int(x) for x in c])
    H = _hnf_square(cols)
    if H.cols != L.rank:
        raise UsageError("vectors do not span a finite-index sublattice")
    C = _make_centering(L, H)
    if not is_centering(C, L):
        raise UsageError("sublattice is not stable under the group")
    return C


def _lower_triangular_in_span(H: list[list[int]], v: list[int]) -> bool:
    """Is the integer vector v an integer combination of the columns of lower-triangular H?"""
    l = len(v)
    r = list(v)
    for j in range(l):
        if r[j] % H[j][j]:
            return False
        q = r[j] // H[j][j]
        if q:
            for i in range(j, l):
                r[i] -= q * H[i][j]
    return True


def _stable(H: list[list[int]], gens: list[list[list[int]]]) -> bool:
    l = len(H)
    for A in gens:
        for j in range(l):
            v = [sum(A[i][k] * H[k][j] for k in range(l)) for i in range(l)]
            if not _lower_triangular_in_span(H, v):
                return False
    return True


def _diagonals(l: int, max_index: int):
    def rec(prefix, prod_so_far):
        if len(prefix) == l:
            yield tuple(prefix)
            return
        for d in range(1, max_index // prod_so_far + 1):
            yield from rec(prefix + [d], prod_so_far * d)

    yield from rec([], 1)


def hnf_candidate_count(l: int, max_index: int) -> int:
    total = 0
    for diag in _diagonals(l, max_index):
        c = 1
        for i, d in enumerate(diag):
            c *= d ** i
        total += c
    return total


def _enumerate_hnf(L: InvariantLattice, max_index: int) -> list[IntegerMatrix]:
    l = L.rank
    gens = [A.to_integer().to_lists() for A in L.action_matrices]
    found = []
    for diag in _diagonals(l, max_index):
        ranges = [range(diag[i]) for i in range(l) for _ in range(i)]
        for offs in product(*ranges):
            H = [[0] * l for _ in range(l)]
            it = iter(offs)
            for i in range(l):
                for j in range(i):
                    H[i][j] = next(it)
                H[i][i] = diag[i]
            if _stable(H, gens):
                found.append(IntegerMatrix(H))
    return found


def _mod_rref(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    m = [[x % p for x in r] for r in rows]
    piv, r = [], 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(m)) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    return m[:r], piv


def _mod_reduce(v: list[int], basis: list[list[int]], piv: list[int], p: int) -> list[int]:
    v = [x % p for x in v]
    for row, c in zip(basis, piv):
        if v[c]:
            f = v[c]
            v = [(a - f * b) % p for a, b in zip(v, row)]
    return v


def _subspace_stable(basis, piv, gens, p) -> bool:
    for A in gens:
        for v in basis:
            w = [sum(A[i][k] * v[k] for k in range(len(v))) for i in range(len(v))]
            if any(_mod_reduce(w, basis, piv, p)):
                return False
    return True


def _gaussian_binomial(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def _all_subspaces(l: int, dim: int, p: int):
    """Row-reduced bases of every dim-dimensional subspace of F_p^l."""
    from itertools import combinations

    for pivots in combinations(range(l), dim):
        free = [(r, c) for r in range(dim) for c in range(pivots[r] + 1, l) if c not in pivots]
        for vals in product(range(p), repeat=len(free)):
            rows = [[0] * l for _ in range(dim)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            yield rows, list(pivots)


def _mod_nullspace(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    red, piv = _mod_rref(rows, p) if rows else ([], [])
    out = []
    for f in (c for c in range(ncols) if c not in piv):
        x = [0] * ncols
        x[f] = 1
        for r, c in zip(red, piv):
            x[c] = -r[f] % p
        out.append(x)
    return out


def _stable_hyperplanes(gens: list[list[list[int]]], l: int, p: int, budget: int) -> list[list[int]]:
    """Linear forms (up to scalars) whose kernels are stable: common left eigenvectors mod p."""
    def eigenvalues(A):
        vals = []
        for lam in range(p):
            M = [[(A[i][j] - (lam if i == j else 0)) % p for j in range(l)] for i in range(l)]
            if len(_mod_rref(M, p)[1]) < l:
                vals.append(lam)
        return vals

    spectra = [eigenvalues(A) for A in gens]
    spaces = []

    def rec(k, cols):
        # cols: constraint columns c with f . c = 0
        null = _mod_nullspace(cols, l, p) if cols else [[int(i == j) for j in range(l)] for i in range(l)]
        if not null:
            return
        if k == len(gens):
            spaces.append(null)
            return
        A = gens[k]
        for lam in spectra[k]:
            extra = [[(A[i][j] - (lam if i == j else 0)) % p for i in range(l)] for j in range(l)]
            rec(k + 1, cols + extra)

    rec(0, [])
    forms = set()
    for basis in spaces:
        e = len(basis)
        if (p ** e - 1) // (p - 1) > budget:
            raise BoundTooLarge("too many stable hyperplanes to enumerate")
        for coeffs in product(range(p), repeat=e):
            if not any(coeffs):
                continue
            f = [sum(c * b[i] for c, b in zip(coeffs, basis)) % p for i in range(l)]
            lead = next(x for x in f if x)
            inv = pow(lead, -1, p)
            forms.add(tuple(x * inv % p for x in f))
    return [list(f) for f in sorted(forms)]


def _primes_upto(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if all(q % d for d in range(2, int(q ** 0.5) + 1))]


def _enumerate_layered(L: InvariantLattice, max_index: int, work_ceiling: int) -> list[IntegerMatrix]:
    l = L.rank
    gens = [A.to_integer().to_lists() for A in L.action_matrices]
    start = IntegerMatrix.identity(l)
    seen = {start}
    queue = [start]
    work = 0
    while queue:
        H = queue.pop()
        idx = math.prod(H[i, i] for i in range(l))
        Hr = H.to_rational()
        Hinv = Hr.inverse()
        local = [(Hinv @ RationalMatrix.from_rows(A) @ Hr).to_integer().to_lists() for A in gens]
        for p in _primes_upto(max_index // idx):
            kmax = 0
            while p ** (kmax + 1) * idx <= max_index and kmax < l:
                kmax += 1
            subspaces = []
            total = sum(_gaussian_binomial(l, l - k, p) for k in range(1, kmax + 1))
            if total <= 20_000:
                for k in range(1, kmax + 1):
                    for basis, piv in _all_subspaces(l, l - k, p):
                        work += 1
                        if _subspace_stable(basis, piv, local, p):
                            subspaces.append(basis)
            elif kmax == 1:
                forms = _stable_hyperplanes(local, l, p, work_ceiling)
                for f in forms:
                    subspaces.append(_mod_nullspace([f], l, p))
                work += len(forms)
            else:
                raise BoundTooLarge(f"subspace search over F_{p}^{l} too large")
            if work > work_ceiling:
                raise BoundTooLarge("centering enumeration exceeded the work ceiling")
            for basis in subspaces:
                cols = [list(b) for b in basis] + [[p * int(i == j) for i in range(l)] for j in range(l)]
                sub = _hnf_square([[sum(H[i, k] * c[k] for k in range(l)) for i in range(l)] for c in cols])
                if sub not in seen:
                    seen.add(sub)
                    queue.append(sub)
    return list(seen)


def enumerate_centerings(L: InvariantLattice, max_index: int, method: str = "auto",
                         work_ceiling: int = DEFAULT_WORK_CEILING) -> list[Centering]:
    """Every stable sublattice of index at most max_index, sorted by (index, HNF coordinates)."""
    if max_index < 1:
        raise UsageError("max_index must be at least 1")
    if L.rank > 6:
        raise BoundTooLarge("centering enumeration supports rank at most 6")
    if method == "auto":
        method = "hnf" if hnf_candidate_count(L.rank, max_index) <= work_ceiling else "layered"
    if method == "hnf":
        if hnf_candidate_count(L.rank, max_index) > work_ceiling:
            raise BoundTooLarge("HNF candidate count exceeds the work ceiling")
        found = _enumerate_hnf(L, max_index)
    elif method == "layered":
        found = _enumerate_layered(L, max_index, work_ceiling)
    else:
        raise UsageError(f"unknown method {method!r}")
    cents = [_make_centering(L, H) for H in found]
    return sorted(cents, key=lambda c: (c.index, c.coords.data))


def maximal_centering(C: Centering, L: InvariantLattice) -> Centering:
    d = C.content()
    if d == 1:
        return C
    H = IntegerMatrix([[x // d for x in r] for r in C.coords.data])
    return _make_centering(L, H)


def is_centering(C: Centering, L: InvariantLattice) -> bool:
    H = C.coords.to_lists()
    gens = [A.to_integer().to_lists() for A in L.action_matrices]
    return all(H[i][i] > 0 for i in range(L.rank)) and _stable(H, gens)


def precedes(C: Centering, Cp: Centering) -> int | None:
    """The nonzero integer lambda with C = lambda * C', if any."""
    a = [x for r in C.coords.data for x in r]
    b = [x for r in Cp.coords.data for x in r]
    lam = None
    for x, y in zip(a, b):
        if y == 0:
            if x != 0:
                return None
            continue
        if x % y:
            return None
        q = x // y
        if lam is None:
            lam = q
        elif q != lam:
            return None
    return lam if lam else None


def maximal_classes(L: InvariantLattice, max_index: int, method: str = "auto") -> list[Centering]:
    out = {maximal_centering(C, L) for C in enumerate_centerings(L, max_index, method)}
    return sorted(out, key=lambda c: (c.index, c.coords.data))


# --------------------------------------------------------------------------
# Z-equivalence at desk scale


def _mod_rank(M: RationalMatrix, p: int) -> int:
    rows = M.to_integer().to_lists()
    return len(_mod_rref(rows, p)[1])


def _invariant_screen(pairs: list[tuple[RationalMatrix, RationalMatrix]], l: int) -> str | None:
    I = RationalMatrix.identity(l)
    for A, B in pairs:
        if sum(A[i, i] for i in range(l)) != sum(B[i, i] for i in range(l)):
            return "character"
        for sign in (1, -1):
            ra = integer_rank((A - I.scale(sign)).to_integer().to_lists())
            rb = integer_rank((B - I.scale(sign)).to_integer().to_lists())
            if ra != rb:
                return "fixed-rank"
        for p in (2, 3):
            for sign in (1, -1):
                if _mod_rank(A - I.scale(sign), p) != _mod_rank(B - I.scale(sign), p):
                    return f"mod-{p} rank"
    for p in (2, 3):
        fa = _mod_nullspace([r for A, _ in pairs for r in (A - I).to_integer().to_lists()], l, p)
        fb = _mod_nullspace([r for _, B in pairs for r in (B - I).to_integer().to_lists()], l, p)
        if len(fa) != len(fb):
            return f"mod-{p} fixed module"
    return None


def z_equivalence_small(L1: InvariantLattice, L2: InvariantLattice, box: int = 2,
                        with_reason: bool = False):
    """'isomorphic', 'distinct' or 'unknown' for two lattices under corresponding generators."""
    def verdict(v, why):
        return (v, why) if with_reason else v

    if len(L1.action_matrices) != len(L2.action_matrices):
        raise UsageError("lattices must carry the same number of generators")
    if L1.rank != L2.rank:
        return verdict("distinct", "rank")
    l = L1.rank
    blocks = []
    for A, B in zip(L1.action_matrices, L2.action_matrices):
        rows = [list(A.row(i)) + [0] * l for i in range(l)] + [[0] * l + list(B.row(i)) for i in range(l)]
        blocks.append(RationalMatrix.from_rows(rows))
    pair_group = WeylGroup(blocks)
    pairs = []
    for M in pair_group.elements:
        rows = M.to_rows()
        pairs.append((RationalMatrix.from_rows([r[:l] for r in rows[:l]]),
                      RationalMatrix.from_rows([r[l:] for r in rows[l:]])))
    if any(A.is_identity() != B.is_identity() for A, B in pairs):
        return verdict("distinct", "kernel")
    why = _invariant_screen(pairs, l)
    if why:
        return verdict("distinct", why)
    if l > 4:
        return verdict("unknown", "rank above decisive-search limit")
    # X with A X = X B for every generator pair: X maps L2-coordinates to L1-coordinates
    eqs = []
    for A, B in zip(L1.action_matrices, L2.action_matrices):
        for i in range(l):
            for j in range(l):
                r = [Fraction(0)] * (l * l)
                for k in range(l):
                    r[k * l + j] += A[i, k]
                    r[i * l + k] -= B[k, j]
                eqs.append(r)
    sol = solve_integer_linear(RationalMatrix.from_rows(eqs), [0] * len(eqs))
    kernel = sol.kernel_basis
    if not kernel:
        return verdict("distinct", "no equivariant map")
    for coeffs in product(range(-box, box + 1), repeat=len(kernel)):
        x = sol.point(coeffs)
        X = IntegerMatrix([list(x[i * l:(i + 1) * l]) for i in range(l)])
        if abs(X.det()) == 1:
            return verdict("isomorphic", X)
    return verdict("unknown", "no unimodular map in search box")


def genus_fingerprint(W, m: int, ceiling: int | None = None) -> dict:
    """Isomorphism invariants of the finite quotient W/mT."""
    from .crystgrp import finite_quotient

    return finite_quotient(W, m, ceiling).fingerprint()
