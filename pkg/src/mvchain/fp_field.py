"""Exact arithmetic over a prime field F_q and the dense solvers on top.

Every value is kept as a canonical residue in [0, q).  Matrices store
their entries as flat row-major integer lists; the hot loops live in
``mvchain.kernels`` (compiled when available).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from mvchain import kernels
from mvchain.errors import (
    DimensionMismatch,
    DuplicatePoint,
    ShapeMismatch,
    ZeroInverse,
)

#: Mersenne prime 2**31 - 1: fast reduction and ample headroom for grids.
DEFAULT_MODULUS = 2**31 - 1

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 2**64."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The prime field F_q; factory for elements and matrices."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int = DEFAULT_MODULUS):
        if not 2 <= modulus < 2**64:
            raise ValueError("modulus must lie in [2, 2**64)")
        if not is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.modulus, self)

    __call__ = element

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def random_element(self, rng) -> "FieldElement":
        return FieldElement(rng.randrange(self.modulus), self)

    def random_matrix(self, rows: int, cols: int, rng) -> "FieldMatrix":
        data = [rng.randrange(self.modulus) for _ in range(rows * cols)]
        return FieldMatrix(self, rows, cols, data)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("PrimeField", self.modulus))

    def __repr__(self):
        return f"PrimeField({self.modulus})"


@dataclass(frozen=True, slots=True)
class FieldElement:
    """A canonical residue 0 <= value < q, tagged with its field."""

    value: int
    field: PrimeField

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements belong to different fields")
            return other
        if isinstance(other, int):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement((self.value + o.value) % self.field.modulus, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement((self.value - o.value) % self.field.modulus, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * o.value % self.field.modulus, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.modulus, self.field)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        return FieldElement(pow(self.value, -1, self.field.modulus), self.field)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.field.modulus), self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}mod{self.field.modulus}"


class FieldMatrix:
    """Dense matrix over F_q, entries flat row-major in ``data``."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: PrimeField, rows: int, cols: int, data: Iterable[int]):
        if rows <= 0 or cols <= 0:
            raise DimensionMismatch("matrix dimensions must be positive")
        q = field.modulus
        values = [int(v) % q for v in data]
        if len(values) != rows * cols:
            raise DimensionMismatch(
                f"expected {rows * cols} entries, got {len(values)}"
            )
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = values

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]]) -> "FieldMatrix":
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged row lengths")
        flat = [v for row in rows for v in row]
        return cls(field, len(rows), ncols, flat)

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FieldMatrix":
        data = [0] * (n * n)
        for i in range(n):
            data[i * n + i] = 1
        return cls(field, n, n, data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> list[FieldElement]:
        return [FieldElement(v, self.field) for v in self.data]

    def entry(self, i: int, j: int) -> FieldElement:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        return FieldElement(self.data[i * self.cols + j], self.field)

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        return self.entry(*ij)

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [self.data[i * c:(i + 1) * c] for i in range(self.rows)]

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and other.field == self.field
            and other.rows == self.rows
            and other.cols == self.cols
            and other.data == self.data
        )

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        if self.shape != other.shape or self.field != other.field:
            raise DimensionMismatch("matrix addition needs equal shapes")
        out = list(self.data)
        kernels.add_scaled(out, other.data, 1, self.field.modulus)
        return FieldMatrix(self.field, self.rows, self.cols, out)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        if self.shape != other.shape or self.field != other.field:
            raise DimensionMismatch("matrix subtraction needs equal shapes")
        out = list(self.data)
        kernels.add_scaled(out, other.data, self.field.modulus - 1, self.field.modulus)
        return FieldMatrix(self.field, self.rows, self.cols, out)

    def scaled(self, c) -> "FieldMatrix":
        cv = int(c) % self.field.modulus
        out = [0] * len(self.data)
        kernels.add_scaled(out, self.data, cv, self.field.modulus)
        return FieldMatrix(self.field, self.rows, self.cols, out)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return mat_mul(self, other)

    def __repr__(self):
        return f"FieldMatrix({self.rows}x{self.cols} mod {self.field.modulus})"


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Exact modular matrix product."""
    if a.field != b.field:
        raise ValueError("operands belong to different fields")
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    data = kernels.mat_mul(a.data, b.data, a.rows, a.cols, b.cols, a.field.modulus)
    return FieldMatrix(a.field, a.rows, b.cols, data)


def solve_vandermonde(
    points: Sequence[FieldElement], values: Sequence[FieldMatrix]
) -> list[FieldMatrix]:
    """Coefficients c_0..c_d of the matrix polynomial through the points.

    P(points[j]) == values[j] for all j; computed by Newton divided
    differences in O(d^2) coefficient operations.
    """
    if len(points) != len(values) or not points:
        raise ShapeMismatch("need one value matrix per point")
    coords = [int(p) for p in points]
    if len(set(coords)) != len(coords):
        raise DuplicatePoint("interpolation points must be pairwise distinct")
    first = values[0]
    field = first.field
    if any(v.shape != first.shape or v.field != field for v in values):
        raise ShapeMismatch("value matrices must share one shape and field")
    width = first.rows * first.cols
    stacked: list[int] = []
    for v in values:
        stacked.extend(v.data)
    kernels.vandermonde_solve_inplace(
        coords, stacked, len(points), width, 0, field.modulus
    )
    return [
        FieldMatrix(field, first.rows, first.cols, stacked[j * width:(j + 1) * width])
        for j in range(len(points))
    ]


def rank(matrix: FieldMatrix) -> int:
    """Rank over F_q via exact Gaussian elimination."""
    r, _ = kernels.rref(matrix.data, matrix.rows, matrix.cols, matrix.field.modulus)
    return r
