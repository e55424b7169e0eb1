"""Exact linear algebra over the rationals.

``QVec`` and ``QMat`` store an integer numerator array together with a single
positive denominator; all arithmetic is exact.  The hot operations
(matrix-vector, matrix-matrix, structure-tensor application, row reduction)
are delegated to the selected kernel backend; everything else is plain
Python on top of them.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import _backend as K
from .errors import DimensionMismatchError, SingularFormError


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class QVec:
    """Immutable rational vector ``nums / den``."""

    __slots__ = ("n", "den", "nums")

    def __init__(self, den: int, nums: Iterable[int]):
        den, nums = K.vec_canon(den, tuple(nums))
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "nums", nums)
        object.__setattr__(self, "n", len(nums))

    def __setattr__(self, name, value):
        raise AttributeError("QVec is immutable")

    @classmethod
    def from_fractions(cls, values: Iterable[Fraction | int]) -> "QVec":
        vals = [Fraction(v) for v in values]
        den = 1
        for v in vals:
            den = _lcm(den, v.denominator)
        return cls(den, (v.numerator * (den // v.denominator) for v in vals))

    @classmethod
    def zero(cls, n: int) -> "QVec":
        return cls(1, (0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "QVec":
        nums = [0] * n
        nums[i] = 1
        return cls(1, nums)

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.nums)

    def __getitem__(self, i: int) -> Fraction:
        return Fraction(self.nums[i], self.den)

    def __len__(self) -> int:
        return self.n

    def is_zero(self) -> bool:
        return not any(self.nums)

    def nonzero_indices(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.nums) if a)

    def __add__(self, other: "QVec") -> "QVec":
        if self.n != other.n:
            raise DimensionMismatchError("vector sizes differ")
        d1, d2 = self.den, other.den
        return QVec(d1 * d2, (a * d2 + b * d1 for a, b in zip(self.nums, other.nums)))

    def __sub__(self, other: "QVec") -> "QVec":
        if self.n != other.n:
            raise DimensionMismatchError("vector sizes differ")
        d1, d2 = self.den, other.den
        return QVec(d1 * d2, (a * d2 - b * d1 for a, b in zip(self.nums, other.nums)))

    def __neg__(self) -> "QVec":
        return QVec(self.den, (-a for a in self.nums))

    def scale(self, c: Fraction | int) -> "QVec":
        c = Fraction(c)
        return QVec(self.den * c.denominator, (a * c.numerator for a in self.nums))

    def dot(self, other: "QVec") -> Fraction:
        if self.n != other.n:
            raise DimensionMismatchError("vector sizes differ")
        acc = 0
        for a, b in zip(self.nums, other.nums):
            if a and b:
                acc += a * b
        return Fraction(acc, self.den * other.den)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QVec)
            and self.den == other.den
            and self.nums == other.nums
        )

    def __hash__(self):
        return hash((self.den, self.nums))

    def __repr__(self):
        return "QVec([%s])" % ", ".join(str(f) for f in self.fractions())


class QMat:
    """Immutable rational matrix ``rows / den``."""

    __slots__ = ("nrows", "ncols", "den", "rows")

    def __init__(self, den: int, rows: Iterable[Iterable[int]], ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatchError("ragged matrix rows")
        den, rows = K.mat_canon(den, rows)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("QMat is immutable")

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Fraction | int]]) -> "QMat":
        fr = [[Fraction(v) for v in row] for row in rows]
        den = 1
        for row in fr:
            for v in row:
                den = _lcm(den, v.denominator)
        return cls(
            den,
            [[v.numerator * (den // v.denominator) for v in row] for row in fr],
            ncols=len(fr[0]) if fr else 0,
        )

    @classmethod
    def from_cols(cls, cols: Sequence[QVec]) -> "QMat":
        if not cols:
            return cls(1, [], ncols=0)
        n = cols[0].n
        den = 1
        for c in cols:
            if c.n != n:
                raise DimensionMismatchError("column sizes differ")
            den = _lcm(den, c.den)
        rows = [
            [c.nums[i] * (den // c.den) for c in cols] for i in range(n)
        ]
        return cls(den, rows, ncols=len(cols))

    @classmethod
    def from_rows(cls, rows: Sequence[QVec]) -> "QMat":
        if not rows:
            return cls(1, [], ncols=0)
        n = rows[0].n
        den = 1
        for r in rows:
            if r.n != n:
                raise DimensionMismatchError("row sizes differ")
            den = _lcm(den, r.den)
        return cls(den, [[a * (den // r.den) for a in r.nums] for r in rows], ncols=n)

    @classmethod
    def identity(cls, n: int) -> "QMat":
        return cls(1, [[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMat":
        return cls(1, [[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def diagonal(cls, values: Sequence[Fraction | int]) -> "QMat":
        n = len(values)
        rows = [[Fraction(values[i]) if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_fractions(rows)

    def fractions(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(a, self.den) for a in row) for row in self.rows)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(self.rows[i][j], self.den)

    def row(self, i: int) -> QVec:
        return QVec(self.den, self.rows[i])

    def col(self, j: int) -> QVec:
        return QVec(self.den, (row[j] for row in self.rows))

    def apply(self, v: QVec) -> QVec:
        if v.n != self.ncols:
            raise DimensionMismatchError("matrix/vector size mismatch")
        den, nums = K.mat_vec(self.den, self.rows, v.den, v.nums)
        return _rawvec(den, nums)

    def __matmul__(self, other: "QMat") -> "QMat":
        if self.ncols != other.nrows:
            raise DimensionMismatchError("matrix product size mismatch")
        den, rows = K.mat_mul(self.den, self.rows, other.den, other.rows)
        return _rawmat(den, rows, other.ncols)

    def __add__(self, other: "QMat") -> "QMat":
        self._same_shape(other)
        d1, d2 = self.den, other.den
        return QMat(
            d1 * d2,
            [
                [a * d2 + b * d1 for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
            ncols=self.ncols,
        )

    def __sub__(self, other: "QMat") -> "QMat":
        self._same_shape(other)
        d1, d2 = self.den, other.den
        return QMat(
            d1 * d2,
            [
                [a * d2 - b * d1 for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
            ncols=self.ncols,
        )

    def __neg__(self) -> "QMat":
        return QMat(self.den, [[-a for a in row] for row in self.rows], ncols=self.ncols)

    def scale(self, c: Fraction | int) -> "QMat":
        c = Fraction(c)
        return QMat(
            self.den * c.denominator,
            [[a * c.numerator for a in row] for row in self.rows],
            ncols=self.ncols,
        )

    def transpose(self) -> "QMat":
        return QMat(
            self.den,
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def trace(self) -> Fraction:
        return Fraction(sum(self.rows[i][i] for i in range(min(self.nrows, self.ncols))), self.den)

    def is_zero(self) -> bool:
        return all(not any(row) for row in self.rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def _same_shape(self, other: "QMat"):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise DimensionMismatchError("matrix shapes differ")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QMat)
            and self.den == other.den
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.den, self.ncols, self.rows))

    def __repr__(self):
        return "QMat(%d x %d)" % (self.nrows, self.ncols)


def _rawvec(den: int, nums: tuple[int, ...]) -> QVec:
    v = object.__new__(QVec)
    object.__setattr__(v, "den", den)
    object.__setattr__(v, "nums", nums)
    object.__setattr__(v, "n", len(nums))
    return v


def _rawmat(den: int, rows: tuple[tuple[int, ...], ...], ncols: int) -> QMat:
    m = object.__new__(QMat)
    object.__setattr__(m, "den", den)
    object.__setattr__(m, "rows", rows)
    object.__setattr__(m, "nrows", len(rows))
    object.__setattr__(m, "ncols", ncols)
    return m


class QBilinear:
    """Prepared sparse bilinear map ``(x, y) -> sum c * x_i * y_j * e_k``."""

    __slots__ = ("dim", "den", "entries")

    def __init__(self, dim: int, terms: Iterable[tuple[int, int, int, Fraction]]):
        terms = [(i, j, k, Fraction(c)) for i, j, k, c in terms if c]
        den = 1
        for _, _, _, c in terms:
            den = _lcm(den, c.denominator)
        self.dim = dim
        self.den = den
        self.entries = tuple(
            (i, j, k, c.numerator * (den // c.denominator)) for i, j, k, c in terms
        )

    def apply(self, x: QVec, y: QVec) -> QVec:
        if x.n != self.dim or y.n != self.dim:
            raise DimensionMismatchError("bilinear map size mismatch")
        den, nums = K.bilinear(self.den, self.entries, self.dim, x.den, x.nums, y.den, y.nums)
        return _rawvec(den, nums)


class RowSpan:
    """Row space in reduced echelon form; supports membership and reduction."""

    __slots__ = ("ncols", "rows", "pivots")

    def __init__(self, vectors: Sequence[QVec], ncols: int):
        rows, pivots = K.rref([(v.den, v.nums) for v in vectors], ncols)
        self.ncols = ncols
        self.rows = rows
        self.pivots = pivots

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def basis(self) -> list[QVec]:
        return [_rawvec(den, nums) for den, nums in self.rows]

    def reduce(self, v: QVec) -> QVec:
        if v.n != self.ncols:
            raise DimensionMismatchError("vector size mismatch")
        den, nums = K.reduce_vec(self.rows, self.pivots, v.den, v.nums)
        return _rawvec(den, nums)

    def contains(self, v: QVec) -> bool:
        return self.reduce(v).is_zero()

    def contains_span(self, other: "RowSpan") -> bool:
        return all(self.contains(b) for b in other.basis())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RowSpan)
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ncols, self.rows))


def rref_rows(vectors: Sequence[QVec], ncols: int) -> tuple[list[QVec], tuple[int, ...]]:
    rows, pivots = K.rref([(v.den, v.nums) for v in vectors], ncols)
    return [_rawvec(den, nums) for den, nums in rows], pivots


def rank(mat: QMat) -> int:
    _, pivots = K.rref([(mat.den, row) for row in mat.rows], mat.ncols)
    return len(pivots)


def nullspace(mat: QMat) -> list[QVec]:
    """Basis of the right kernel {x : mat @ x = 0}, deterministic order."""
    rows, pivots = K.rref([(mat.den, row) for row in mat.rows], mat.ncols)
    pivot_set = set(pivots)
    free = [j for j in range(mat.ncols) if j not in pivot_set]
    basis = []
    for j in free:
        coords = [Fraction(0)] * mat.ncols
        coords[j] = Fraction(1)
        for (den, nums), p in zip(rows, pivots):
            coords[p] = -Fraction(nums[j], den)
        basis.append(QVec.from_fractions(coords))
    return basis


def solve(mat: QMat, rhs: QVec):
    """One exact solution of ``mat @ x = rhs`` or None if inconsistent."""
    if rhs.n != mat.nrows:
        raise DimensionMismatchError("rhs size mismatch")
    aug_den = mat.den * rhs.den
    aug_rows = [
        (aug_den, tuple(a * rhs.den for a in row) + (rhs.nums[i] * mat.den,))
        for i, row in enumerate(mat.rows)
    ]
    rows, pivots = K.rref(aug_rows, mat.ncols + 1)
    coords = [Fraction(0)] * mat.ncols
    for (den, nums), p in zip(rows, pivots):
        if p == mat.ncols:
            return None
        coords[p] = Fraction(nums[-1], den)
    return QVec.from_fractions(coords)


def inverse(mat: QMat) -> QMat:
    if not mat.is_square():
        raise SingularFormError("only square matrices can be inverted")
    n = mat.nrows
    aug_rows = [
        (mat.den, tuple(row) + tuple(mat.den if i == j else 0 for j in range(n)))
        for i, row in enumerate(mat.rows)
    ]
    rows, pivots = K.rref(aug_rows, 2 * n)
    if list(pivots) != list(range(n)):
        raise SingularFormError("matrix is singular")
    inv_rows = [[Fraction(nums[n + j], den) for j in range(n)] for den, nums in rows]
    return QMat.from_fractions(inv_rows)


def char_poly_coeffs(mat: QMat) -> list[Fraction]:
    """Monic characteristic polynomial, coefficients lowest degree first."""
    if not mat.is_square():
        raise DimensionMismatchError("characteristic polynomial needs a square matrix")
    n = mat.nrows
    if n == 0:
        return [Fraction(1)]
    # Faddeev-LeVerrier: M_1 = A, c_k = -tr(M_k)/k, M_{k+1} = A (M_k + c_k I)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = mat
    ident = QMat.identity(n)
    for k in range(1, n + 1):
        c = -M.trace() / k
        coeffs[n - k] = c
        if k < n:
            M = mat @ (M + ident.scale(c))
    return coeffs
