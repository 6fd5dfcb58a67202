"""Root systems in Bourbaki's standard realisations, and the lattices built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import NotARoot, UnsupportedFamily, UnsupportedType
from .exactla import (
    RationalMatrix,
    Vector,
    canonical_basis,
    dot,
    in_lattice,
    lattice_coordinates,
    lattice_index,
    solve_rational,
    vec,
    vscale,
    vsub,
)

HALF = Fraction(1, 2)
CLASSICAL = ("A", "B", "C", "D")
EXCEPTIONAL_RANK = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}


def _e(n: int, *pairs) -> Vector:
    """Vector in Q^n from (index, coefficient) pairs, indices 1-based."""
    out = [Fraction(0)] * n
    for i, c in pairs:
        out[i - 1] += Fraction(c)
    return tuple(out)


def _e_half_e8(n: int, ones_plus, ones_minus) -> Vector:
    out = [Fraction(0)] * n
    for i in ones_plus:
        out[i - 1] += HALF
    for i in ones_minus:
        out[i - 1] -= HALF
    return tuple(out)


def _check_admissible(type_label: str, l: int) -> None:
    if type_label in EXCEPTIONAL_RANK:
        if l != EXCEPTIONAL_RANK[type_label]:
            raise UnsupportedType(f"{type_label} has rank {EXCEPTIONAL_RANK[type_label]}, not {l}")
        return
    minimum = {"A": 1, "B": 2, "C": 2, "D": 3}.get(type_label)
    if minimum is None:
        raise UnsupportedType(f"unknown root system type {type_label!r}")
    if not isinstance(l, int) or l < minimum:
        raise UnsupportedType(f"type {type_label} needs rank >= {minimum}, got {l}")


def simple_roots(type_label: str, l: int) -> tuple[int, list[Vector]]:
    """(ambient dimension, simple roots in Bourbaki order)."""
    _check_admissible(type_label, l)
    if type_label == "A":
        n = l + 1
        return n, [_e(n, (i, 1), (i + 1, -1)) for i in range(1, l + 1)]
    if type_label in ("B", "C", "D"):
        n = l
        base = [_e(n, (i, 1), (i + 1, -1)) for i in range(1, l)]
        last = {"B": _e(n, (l, 1)), "C": _e(n, (l, 2)), "D": _e(n, (l - 1, 1), (l, 1))}[type_label]
        return n, base + [last]
    if type_label in ("E6", "E7", "E8"):
        n = 8
        a1 = _e_half_e8(n, (1, 8), range(2, 8))
        roots = [a1, _e(n, (1, 1), (2, 1))]
        roots += [_e(n, (i - 1, 1), (i - 2, -1)) for i in range(3, l + 1)]
        return n, roots
    if type_label == "F4":
        n = 4
        return n, [_e(n, (2, 1), (3, -1)), _e(n, (3, 1), (4, -1)), _e(n, (4, 1)),
                   _e_half_e8(n, (1,), (2, 3, 4))]
    n = 3  # G2
    return n, [_e(n, (1, 1), (2, -1)), _e(n, (1, -2), (2, 1), (3, 1))]


def reflect(alpha: Sequence, x: Sequence) -> Vector:
    """s_alpha(x) = x - 2 (x, alpha)/(alpha, alpha) alpha."""
    c = 2 * dot(x, alpha) / dot(alpha, alpha)
    return vsub(x, vscale(c, alpha))


def reflection_of(alpha: Sequence) -> RationalMatrix:
    n = len(alpha)
    a = vec(alpha)
    nn = dot(a, a)
    return RationalMatrix.from_rows(
        [[(1 if i == j else 0) - 2 * a[i] * a[j] / nn for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class RootSystem:
    type_label: str
    rank: int
    ambient_dim: int
    simple_roots: tuple
    roots: tuple
    positive_roots: tuple = field(repr=False)

    @classmethod
    def from_simple_roots(cls, simple: Sequence[Sequence], type_label: str = "custom") -> "RootSystem":
        simple = [vec(a) for a in simple]
        n = len(simple[0])
        found = {a for a in simple}
        order = sorted(found, key=lambda v: simple.index(v))
        layer = list(order)
        while layer:
            new = set()
            for x in layer:
                for a in simple:
                    y = reflect(a, x)
                    if y not in found:
                        new.add(y)
            layer = sorted(new)
            found |= new
            order.extend(layer)
        positive = []
        for r in order:
            c = solve_rational(RationalMatrix.from_columns(simple), r)
            if all(x >= 0 for x in c):
                positive.append(r)
        return cls(type_label, len(simple), n, tuple(simple), tuple(order), tuple(positive))

    def reflection(self, alpha: Sequence) -> RationalMatrix:
        return reflection_matrix(self, alpha)

    def simple_reflections(self) -> list[RationalMatrix]:
        return [reflection_of(a) for a in self.simple_roots]

    def coroot(self, alpha: Sequence) -> Vector:
        return vscale(Fraction(2) / dot(alpha, alpha), alpha)

    def simple_coefficients(self, v: Sequence) -> Vector | None:
        return solve_rational(RationalMatrix.from_columns(self.simple_roots), v)

    def simple_root_matrix(self) -> RationalMatrix:
        return RationalMatrix.from_columns(self.simple_roots)

    def cartan_matrix(self) -> list[list[Fraction]]:
        """Entry (i, j) is <alpha_i, alpha_j^vee>."""
        return [[dot(a, self.coroot(b)) for b in self.simple_roots] for a in self.simple_roots]


@lru_cache(maxsize=None)
def build_root_system(type_label: str, l: int) -> RootSystem:
    _, simple = simple_roots(type_label, l)
    label = type_label if type_label in EXCEPTIONAL_RANK else f"{type_label}{l}"
    return RootSystem.from_simple_roots(simple, label)


def reflection_matrix(R: RootSystem, alpha: Sequence) -> RationalMatrix:
    a = vec(alpha)
    if a not in set(R.roots):
        raise NotARoot(f"{tuple(str(x) for x in a)} is not a root of {R.type_label}")
    return reflection_of(a)


def is_irreducible(R: RootSystem) -> bool:
    from .weyl import coxeter_matrix_of, diagram_connected

    return diagram_connected(coxeter_matrix_of(R.simple_reflections()))


# --------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeSpec:
    family: str
    rank: int
    basis: RationalMatrix
    parameter: int | None = None
    predicate: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.basis.rows

    @property
    def name(self) -> str:
        if self.family == "Lambda":
            return f"Lambda{self.rank},{self.parameter}"
        return f"{self.family}{self.rank}"

    def contains(self, v: Sequence) -> bool:
        return in_lattice(self.basis, vec(v))

    def coordinates(self, v: Sequence) -> Vector | None:
        return lattice_coordinates(self.basis, vec(v))

    def canonical(self) -> RationalMatrix:
        return canonical_basis(self.basis)

    def same_as(self, other: "LatticeSpec") -> bool:
        return self.canonical() == other.canonical()

    def contains_lattice(self, other: "LatticeSpec") -> bool:
        return all(self.contains(c) for c in other.basis.columns())

    def index_of(self, sub: "LatticeSpec"):
        return lattice_index(self.basis, sub.basis)


def root_lattice(R: RootSystem) -> LatticeSpec:
    return LatticeSpec("QofR", R.rank, R.simple_root_matrix())


def fundamental_weights(R: RootSystem) -> list[Vector]:
    """omega_i in span(R) with (omega_i, alpha_j^vee) = delta_ij."""
    C = RationalMatrix.from_rows(R.cartan_matrix())
    X = C.inverse()
    B = R.simple_root_matrix()
    # omega_i = sum_k X[i, k] alpha_k
    return [B.apply(X.row(i)) for i in range(R.rank)]


def weight_lattice(R: RootSystem) -> LatticeSpec:
    P = LatticeSpec("PofR", R.rank, RationalMatrix.from_columns(fundamental_weights(R)))
    Q = root_lattice(R)
    if not P.contains_lattice(Q):
        raise AssertionError("root lattice not inside weight lattice")
    return P


def _half_sum(n: int, upto: int | None = None) -> Vector:
    upto = n if upto is None else upto
    return tuple(HALF if i < upto else Fraction(0) for i in range(n))


def _int_vector(v) -> bool:
    return all(x.denominator == 1 for x in v)


def _pred_cl(v):
    return _int_vector(v)


def _pred_fl(v):
    return _int_vector(v) and sum(v) % 2 == 0


def _pred_ccl(v):
    return _int_vector(v) or _int_vector([x - HALF for x in v])


def _pred_omega(v):
    return _pred_fl(v) or _pred_fl([x - HALF for x in v])


FAMILIES = ("CL", "CCL", "FL", "Omega", "Lambda", "Q6", "P6", "Q7", "P7")


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def family_lattice(family: str, l: int, parameter: int | None = None) -> LatticeSpec:
    """Lattices of Martinais's nomenclature in Bourbaki coordinates."""
    if family not in FAMILIES:
        raise UnsupportedFamily(f"unknown lattice family {family!r}")
    if family in ("Q6", "P6", "Q7", "P7"):
        want = int(family[1])
        if l != want:
            raise UnsupportedFamily(f"{family} has rank {want}")
        n = 8
        ends = _e_half_e8(n, (1, 8), range(2, 8))
        if family == "Q6":
            cols = [_e(n, (1, 1), (i, 1)) for i in range(1, 6)] + [ends]
        elif family == "P6":
            third = _e(n, (1, 1), (5, 1), (6, Fraction(2, 3)), (7, Fraction(2, 3)), (8, Fraction(-2, 3)))
            cols = [_e(n, (1, 1), (i, 1)) for i in range(1, 5)] + [ends, third]
        elif family == "Q7":
            cols = [_e(n, (1, 1), (i, 1)) for i in range(1, 7)] + [ends]
        else:
            cols = [_e(n, (1, 1), (i, 1)) for i in range(1, 6)] + [ends, _half_sum(n, 6)]
        return LatticeSpec(family, l, RationalMatrix.from_columns(cols))
    if family == "Lambda":
        if l < 1 or parameter is None or parameter <= 0 or (l + 1) % parameter:
            raise UnsupportedFamily(f"Lambda needs a positive divisor of {l + 1}, got {parameter}")
        n = l + 1
        a = Fraction(parameter)
        cols = [_e(n, (i, 1), (i + 1, -1)) for i in range(1, l)]
        cols.append(tuple((a if i == 0 else 0) - a / n for i in range(n)))
        return LatticeSpec(family, l, RationalMatrix.from_columns(cols), parameter)
    if l < 1 or (family in ("FL", "Omega", "CCL") and l < 2):
        raise UnsupportedFamily(f"{family} needs a larger rank than {l}")
    n = l
    if family == "CL":
        cols, pred = [_e(n, (i, 1)) for i in range(1, l + 1)], _pred_cl
    elif family == "CCL":
        cols, pred = [_e(n, (i, 1)) for i in range(1, l)] + [_half_sum(n)], _pred_ccl
    elif family == "FL":
        cols = [_e(n, (i, 1), (i + 1, -1)) for i in range(1, l)] + [_e(n, (l - 1, 1), (l, 1))]
        pred = _pred_fl
    else:
        # FL plus the half-sum; the generators are dependent, so reduce to a basis
        gens = [_e(n, (i, 1), (i + 1, -1)) for i in range(1, l)] + [_e(n, (l - 1, 1), (l, 1)), _half_sum(n)]
        basis = canonical_basis(RationalMatrix.from_columns(gens))
        return LatticeSpec(family, l, basis, None, _pred_omega)
    return LatticeSpec(family, l, RationalMatrix.from_columns(cols), None, pred)


def lattice_for(type_label: str, l: int, family: str, parameter: int | None = None) -> LatticeSpec:
    """Named lattice for a root system: a Table-3 family or QofR / PofR."""
    R = build_root_system(type_label, l)
    if family == "QofR":
        return root_lattice(R)
    if family == "PofR":
        return weight_lattice(R)
    if family == "Omega" and type_label == "E8":
        return family_lattice("Omega", 8)
    return family_lattice(family, l, parameter)
