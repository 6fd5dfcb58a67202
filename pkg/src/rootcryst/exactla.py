"""Exact integer and rational linear algebra.

Matrices are immutable.  A ``RationalMatrix`` keeps a single positive common
denominator together with integer numerators, normalised so that the
denominator and the numerators share no common factor; every entry read back
is a ``Fraction`` in lowest terms.  Vectors are plain tuples of ``Fraction``.

Lattices are always given by a matrix whose *columns* are basis vectors.

Diophantine convention: ``solve_integer_linear`` looks for solutions that are
integral in the coordinates of the unknown vector as given.  Callers that
need solutions inside some lattice pass the lattice coordinates as unknowns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotASublattice, UsageError

Vector = tuple  # tuple[Fraction, ...]

INFINITE = math.inf


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def vec(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int, scale=1) -> Vector:
    out = [Fraction(0)] * n
    out[i] = as_fraction(scale)
    return tuple(out)


def vadd(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> Vector:
    c = as_fraction(c)
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, v.denominator)
    return d


class RationalMatrix:
    """Immutable exact rational matrix stored as (numerators, common denominator)."""

    __slots__ = ("rows", "cols", "num", "den", "_hash")

    def __init__(self, rows: int, cols: int, num: Sequence[int], den: int = 1):
        if rows <= 0 or cols <= 0:
            raise DimensionMismatch(f"matrix dimensions must be positive, got {rows}x{cols}")
        if len(num) != rows * cols:
            raise DimensionMismatch("entry count does not match dimensions")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            den = -den
            num = [-x for x in num]
        if den != 1:
            g = math.gcd(den, *num)
            if g > 1:
                den //= g
                num = [x // g for x in num]
        self.rows = rows
        self.cols = cols
        self.num = tuple(num)
        self.den = den
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        rows = [[as_fraction(x) for x in r] for r in rows]
        if not rows or not rows[0]:
            raise DimensionMismatch("matrix dimensions must be positive")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        flat = [x for r in rows for x in r]
        d = _lcm_denominators(flat)
        return cls(len(rows), width, [int(x * d) for x in flat], d)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "RationalMatrix":
        if not columns:
            raise DimensionMismatch("matrix dimensions must be positive")
        n = len(columns[0])
        return cls.from_rows([[c[i] for c in columns] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    # access ---------------------------------------------------------------
    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
        return Fraction(self.num[i * self.cols + j], self.den)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        return tuple(Fraction(x, self.den) for x in self.num[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> Vector:
        return tuple(Fraction(self.num[i * self.cols + j], self.den) for i in range(self.rows))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def entries(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_integral(self) -> bool:
        return self.den == 1

    def to_integer(self) -> "IntegerMatrix":
        if self.den != 1:
            raise UsageError("matrix has non-integral entries")
        return IntegerMatrix([list(self.num[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)])

    def sort_key(self) -> tuple:
        if self.den == 1:
            return self.num
        return self.entries()

    # algebra --------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.den, self.num) == (other.rows, other.cols, other.den, other.num)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.den, self.num))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RationalMatrix([{body}])"

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            n, k, m = self.rows, self.cols, other.cols
            a, b = self.num, other.num
            out = [0] * (n * m)
            for i in range(n):
                base = i * m
                for t in range(k):
                    x = a[i * k + t]
                    if x:
                        bt = t * m
                        for j in range(m):
                            y = b[bt + j]
                            if y:
                                out[base + j] += x * y
            return RationalMatrix(n, m, out, self.den * other.den)
        return self.apply(other)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        v = [as_fraction(x) for x in v]
        c = self.cols
        out = []
        for i in range(self.rows):
            s = Fraction(0)
            for t in range(c):
                x = self.num[i * c + t]
                if x:
                    s += x * v[t]
            out.append(s / self.den)
        return tuple(out)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        d = math.lcm(self.den, other.den)
        p, q = d // self.den, d // other.den
        return RationalMatrix(self.rows, self.cols, [p * x + q * y for x, y in zip(self.num, other.num)], d)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, [-x for x in self.num], self.den)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, c) -> "RationalMatrix":
        c = as_fraction(c)
        return RationalMatrix(self.rows, self.cols, [x * c.numerator for x in self.num], self.den * c.denominator)

    def transpose(self) -> "RationalMatrix":
        r, c = self.rows, self.cols
        return RationalMatrix(c, r, [self.num[i * c + j] for j in range(c) for i in range(r)], self.den)

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def is_identity(self) -> bool:
        if self.rows != self.cols or self.den != 1:
            return False
        n = self.rows
        return all(self.num[i * n + j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return RationalMatrix.from_rows([list(a) + list(b) for a, b in zip(self.to_rows(), other.to_rows())])

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("column counts differ")
        return RationalMatrix.from_rows(self.to_rows() + other.to_rows())

    def select_columns(self, idx: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix.from_columns([self.column(j) for j in idx])

    def rank(self) -> int:
        return len(rref(self.to_rows())[1])

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        return Fraction(integer_det(_num_rows(self)), self.den ** self.rows)

    def inverse(self) -> "RationalMatrix":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.to_rows())]
        red, piv = rref(aug)
        if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] != n - 1:
            raise ZeroDivisionError("matrix is singular")
        return RationalMatrix.from_rows([r[n:] for r in red[:n]])

    def nullspace(self) -> list[Vector]:
        return nullspace(self.to_rows(), self.cols)


def _num_rows(m: RationalMatrix) -> list[list[int]]:
    c = m.cols
    return [list(m.num[i * c:(i + 1) * c]) for i in range(m.rows)]


class IntegerMatrix:
    """Mutable-free integer matrix used by the normal-form routines."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: Sequence[Sequence[int]]):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if not data or not data[0]:
            raise DimensionMismatch("matrix dimensions must be positive")
        if any(len(r) != len(data[0]) for r in data):
            raise DimensionMismatch("ragged rows")
        self.rows = len(data)
        self.cols = len(data[0])
        self.data = data

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, IntegerMatrix):
            return self.data == other.data
        if isinstance(other, RationalMatrix):
            return other.den == 1 and self.to_rational() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.data)

    def __repr__(self) -> str:
        return f"IntegerMatrix({[list(r) for r in self.data]})"

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("shape mismatch in product")
        cols = list(zip(*other.data))
        return IntegerMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.data])

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def to_rational(self) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols, [x for r in self.data for x in r])

    def det(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        return integer_det(self.to_lists())

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)


# --------------------------------------------------------------------------
# rational elimination


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of a list of rows; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[Vector]:
    """Basis of {x : rows·x = 0} over the rationals."""
    if not rows:
        return [unit_vec(ncols, i) for i in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -red[i][f]
        basis.append(tuple(x))
    return basis


def solve_rational(A: RationalMatrix, b: Sequence) -> Vector | None:
    """One rational solution of A·x = b, or None."""
    if len(b) != A.rows:
        raise DimensionMismatch("right-hand side length differs from row count")
    aug = [r + [as_fraction(bi)] for r, bi in zip(A.to_rows(), b)]
    red, piv = rref(aug)
    if piv and piv[-1] == A.cols:
        return None
    x = [Fraction(0)] * A.cols
    for i, p in enumerate(piv):
        x[p] = red[i][A.cols]
    return tuple(x)


def integer_det(rows: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    m = [list(r) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def integer_rank(rows: list[list[int]]) -> int:
    """Rank over the rationals of an integer matrix, fraction free."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        a = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                m[i] = [a * x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


# --------------------------------------------------------------------------
# normal forms


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if a and b % a == 0:
        return a, 1, 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _hnf_lists(h: list[list[int]], u: list[list[int]] | None) -> list[list[int]]:
    m = len(h)
    n = len(h[0]) if m else 0
    k = 0

    def colop(j1, j2, a, b, c, d):
        # (col j1, col j2) <- (a*col j1 + b*col j2, c*col j1 + d*col j2)
        for mat in (h, u) if u is not None else (h,):
            for r in mat:
                x, y = r[j1], r[j2]
                r[j1], r[j2] = a * x + b * y, c * x + d * y

    for i in range(m):
        if k == n:
            break
        for j in range(k + 1, n):
            if h[i][j] == 0:
                continue
            a, b = h[i][k], h[i][j]
            g, x, y = _xgcd(a, b)
            colop(k, j, x, y, -b // g, a // g)
        if h[i][k] == 0:
            continue
        if h[i][k] < 0:
            for mat in (h, u) if u is not None else (h,):
                for r in mat:
                    r[k] = -r[k]
        p = h[i][k]
        for j in range(k):
            q = h[i][j] // p
            if q:
                for mat in (h, u) if u is not None else (h,):
                    for r in mat:
                        r[j] -= q * r[k]
        k += 1
    return h


def hermite_normal_form(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Column-style HNF: returns (H, U) with H = M·U and U unimodular.

    H is lower-triangular echelon: column k has its pivot in row r_k with
    r_0 < r_1 < ..., pivots positive, entries of a pivot row in earlier columns
    reduced into [0, pivot), columns after the last pivot zero.
    """
    h = M.to_lists()
    u = [[int(i == j) for j in range(M.cols)] for i in range(M.cols)]
    _hnf_lists(h, u)
    return IntegerMatrix(h), IntegerMatrix(u)


def smith_normal_form(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Returns (S, U, V) with S = U·M·V, U and V unimodular, S diagonal with d1 | d2 | ..."""
    a = M.to_lists()
    m, n = M.rows, M.cols
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for mat in (a, V):
            for r in mat:
                r[i], r[j] = r[j], r[i]

    def row_comb(i, j, p, q, r, s):
        # (row i, row j) <- (p*row i + q*row j, r*row i + s*row j)
        for mat in (a, U):
            ri, rj = mat[i], mat[j]
            mat[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mat[j] = [r * x + s * y for x, y in zip(ri, rj)]

    def col_comb(i, j, p, q, r, s):
        for mat in (a, V):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    g, x, y = _xgcd(a[t][t], a[i][t])
                    at, ai = a[t][t] // g, a[i][t] // g
                    row_comb(t, i, x, y, -ai, at)
            for j in range(t + 1, n):
                if a[t][j]:
                    g, x, y = _xgcd(a[t][t], a[t][j])
                    at, aj = a[t][t] // g, a[t][j] // g
                    col_comb(t, j, x, y, -aj, at)
            if any(a[i][t] for i in range(t + 1, m)):
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            row_comb(t, bad, 1, 1, 0, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return IntegerMatrix(a), IntegerMatrix(U), IntegerMatrix(V)


# --------------------------------------------------------------------------
# Diophantine systems


@dataclass(frozen=True)
class DiophantineSolution:
    particular: tuple[int, ...]
    kernel_basis: tuple[tuple[int, ...], ...]

    def point(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        x = list(self.particular)
        for c, k in zip(coeffs, self.kernel_basis):
            for i, v in enumerate(k):
                x[i] += c * v
        return tuple(x)


def _integer_system(A: RationalMatrix, b: Sequence) -> tuple[list[list[int]], list[int]]:
    rows, rhs = [], []
    for r, bi in zip(A.to_rows(), b):
        bi = as_fraction(bi)
        d = _lcm_denominators(r + [bi])
        rows.append([int(x * d) for x in r])
        rhs.append(int(bi * d))
    return rows, rhs


def solve_integer_linear(A: RationalMatrix, b: Sequence) -> DiophantineSolution | None:
    """All integer x with A·x = b, as particular solution plus kernel basis; None if there are none."""
    if len(b) != A.rows:
        raise DimensionMismatch("right-hand side length differs from row count")
    rows, rhs = _integer_system(A, b)
    return _solve_integer_lists(rows, rhs, A.cols)


def _solve_integer_lists(rows: list[list[int]], rhs: list[int], n: int) -> DiophantineSolution | None:
    rows_nz = [(r, c) for r, c in zip(rows, rhs) if any(r) or c]
    if any(not any(r) for r, c in rows_nz):
        return None
    if not rows_nz:
        return DiophantineSolution((0,) * n, tuple(tuple(int(i == j) for i in range(n)) for j in range(n)))
    S, U, V = smith_normal_form(IntegerMatrix([r for r, _ in rows_nz]))
    c = [sum(u * x for u, x in zip(urow, [x for _, x in rows_nz])) for urow in U.data]
    rank = 0
    while rank < min(S.rows, S.cols) and S[rank, rank] != 0:
        rank += 1
    y = [0] * n
    for i in range(S.rows):
        if i < rank:
            q, rem = divmod(c[i], S[i, i])
            if rem:
                return None
            y[i] = q
        elif c[i]:
            return None
    particular = tuple(sum(V[i, j] * y[j] for j in range(n)) for i in range(n))
    kernel = tuple(tuple(V[i, j] for i in range(n)) for j in range(rank, n))
    return DiophantineSolution(particular, kernel)


def integer_kernel(A: RationalMatrix) -> list[tuple[int, ...]]:
    sol = solve_integer_linear(A, [0] * A.rows)
    return list(sol.kernel_basis)


# --------------------------------------------------------------------------
# lattices given by basis columns


def canonical_basis(basis: RationalMatrix) -> RationalMatrix | None:
    """Canonical (HNF) basis of the Z-span of the columns; None for the zero lattice."""
    d = basis.den
    h = _hnf_lists([list(basis.num[i * basis.cols:(i + 1) * basis.cols]) for i in range(basis.rows)], None)
    keep = [j for j in range(basis.cols) if any(r[j] for r in h)]
    if not keep:
        return None
    return RationalMatrix(basis.rows, len(keep), [r[j] for r in h for j in keep], d)


def same_lattice(a: RationalMatrix, b: RationalMatrix) -> bool:
    return canonical_basis(a) == canonical_basis(b)


def lattice_coordinates(basis: RationalMatrix, v: Sequence) -> Vector | None:
    """Coordinates of v in the given basis, None when v is outside its span."""
    return solve_rational(basis, v)


def in_lattice(basis: RationalMatrix, v: Sequence) -> bool:
    c = lattice_coordinates(basis, v)
    return c is not None and all(x.denominator == 1 for x in c)


def lattice_index(ambient_basis: RationalMatrix, sub_basis: RationalMatrix):
    """[ambient : sub], or INFINITE if sub has smaller rank."""
    if ambient_basis.rows != sub_basis.rows:
        raise DimensionMismatch("lattices live in different spaces")
    k, j = ambient_basis.cols, sub_basis.cols
    if ambient_basis.rank() != k or sub_basis.rank() != j:
        raise UsageError("basis columns must be linearly independent")
    coords = []
    for col in sub_basis.columns():
        c = lattice_coordinates(ambient_basis, col)
        if c is None or any(x.denominator != 1 for x in c):
            raise NotASublattice(f"vector {tuple(map(str, col))} not in the ambient lattice")
        coords.append(c)
    if j < k:
        return INFINITE
    return abs(RationalMatrix.from_columns(coords).det().numerator)


def sublattice_in_subspace(L_basis: RationalMatrix, subspace_basis: RationalMatrix) -> RationalMatrix | None:
    """Basis of L ∩ span(subspace_basis) in canonical form; None when the intersection is 0."""
    if L_basis.rows != subspace_basis.rows:
        raise DimensionMismatch("lattice and subspace live in different spaces")
    forms = nullspace(subspace_basis.transpose().to_rows(), subspace_basis.rows)
    if not forms:
        return canonical_basis(L_basis)
    P = RationalMatrix.from_rows(forms)
    ker = integer_kernel(P @ L_basis)
    if not ker:
        return None
    K = RationalMatrix.from_columns(ker)
    return canonical_basis(L_basis @ K)


def commutant_dimension(mats: Sequence[RationalMatrix]) -> int:
    """Rational dimension of {X : XM = MX for every M}."""
    if not mats:
        raise UsageError("need at least one matrix")
    n = mats[0].rows
    if any(M.rows != n or M.cols != n for M in mats):
        raise DimensionMismatch("commutant needs square matrices of one size")
    rows = []
    for M in mats:
        e = M.to_rows()
        for i in range(n):
            for j in range(n):
                r = [Fraction(0)] * (n * n)
                for k in range(n):
                    r[i * n + k] += e[k][j]
                    r[k * n + j] -= e[i][k]
                if any(r):
                    rows.append(r)
    if not rows:
        return n * n
    return n * n - len(rref(rows)[1])


# --------------------------------------------------------------------------
# text serialisation


def format_rational(x) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def matrix_to_text(M: RationalMatrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    for i in range(M.rows):
        lines.append(" ".join(format_rational(x) for x in M.row(i)))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> RationalMatrix:
    tokens = text.split()
    if len(tokens) < 2:
        raise UsageError("missing matrix header")
    r, c = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != r * c:
        raise UsageError(f"expected {r * c} entries, found {len(body)}")
    return RationalMatrix.from_rows([[Fraction(t) for t in body[i * c:(i + 1) * c]] for i in range(r)])


def matrix_to_struct(M: RationalMatrix) -> dict:
    return {"rows": M.rows, "cols": M.cols,
            "entries": [[format_rational(x) for x in M.row(i)] for i in range(M.rows)]}


def matrix_from_struct(obj: dict) -> RationalMatrix:
    m = RationalMatrix.from_rows([[Fraction(x) for x in r] for r in obj["entries"]])
    if (m.rows, m.cols) != (obj["rows"], obj["cols"]):
        raise UsageError("declared shape does not match entries")
    return m
