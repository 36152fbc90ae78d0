"""
Small immutable matrix value types.

Entries are plain Python numbers (Fraction in the rational profile, float in
f64) held in tuples, so matrices are hashable and can key memo tables.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from .errors import DimensionMismatchError
from .numeric import Number, Profile, coerce


@dataclass(frozen=True)
class SquareMatrix:
    """An n x n matrix stored row-major."""
    entries: Tuple[Tuple[Number, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        for row in self.entries:
            if len(row) != n:
                raise DimensionMismatchError(
                    f"matrix is not square: {n} rows but a row of length {len(row)}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], profile: Profile = Profile.RATIONAL) -> "SquareMatrix":
        return cls(tuple(tuple(coerce(x, profile) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int, one: Number = 1) -> "SquareMatrix":
        return cls(tuple(tuple(one if i == j else 0 * one for j in range(n)) for i in range(n)))

    @classmethod
    def constant(cls, n: int, value: Number) -> "SquareMatrix":
        return cls(tuple(tuple(value for _ in range(n)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: Tuple[int, int]) -> Number:
        i, j = index
        return self.entries[i][j]

    def rows(self) -> Tuple[Tuple[Number, ...], ...]:
        return self.entries

    def column_sums(self) -> Tuple[Number, ...]:
        return tuple(sum(self.entries[i][j] for i in range(self.n)) for j in range(self.n))

    def diagonal(self) -> "DiagonalMatrix":
        return DiagonalMatrix(tuple(self.entries[j][j] for j in range(self.n)))

    def scale(self, c: Number) -> "SquareMatrix":
        return SquareMatrix(tuple(tuple(c * x for x in row) for row in self.entries))

    def map(self, fn) -> "SquareMatrix":
        return SquareMatrix(tuple(tuple(fn(x) for x in row) for row in self.entries))

    def left_diagonal_multiply(self, d: "DiagonalMatrix") -> "SquareMatrix":
        """D @ self: row i scaled by d_i."""
        _check_dims(self.n, d.n)
        return SquareMatrix(tuple(tuple(d.diag[i] * x for x in row) for i, row in enumerate(self.entries)))

    def right_diagonal_multiply(self, d: "DiagonalMatrix") -> "SquareMatrix":
        """self @ D: column j scaled by d_j."""
        _check_dims(self.n, d.n)
        return SquareMatrix(tuple(tuple(x * d.diag[j] for j, x in enumerate(row)) for row in self.entries))

    def is_lower_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.n) for j in range(i + 1, self.n))

    def max_entry(self) -> Number:
        return max(x for row in self.entries for x in row)


@dataclass(frozen=True)
class DiagonalMatrix:
    """A diagonal n x n matrix stored by its diagonal."""
    diag: Tuple[Number, ...]

    @classmethod
    def from_values(cls, values: Sequence, profile: Profile = Profile.RATIONAL) -> "DiagonalMatrix":
        return cls(tuple(coerce(x, profile) for x in values))

    @classmethod
    def identity(cls, n: int, one: Number = 1) -> "DiagonalMatrix":
        return cls(tuple(one for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.diag)

    def __matmul__(self, other: "DiagonalMatrix") -> "DiagonalMatrix":
        _check_dims(self.n, other.n)
        return DiagonalMatrix(tuple(a * b for a, b in zip(self.diag, other.diag)))

    def trace(self) -> Number:
        """Tr, the unnormalized trace."""
        return sum(self.diag)

    def normalized_trace(self) -> Number:
        """tr = Tr / n."""
        total = self.trace()
        if isinstance(total, float):
            return total / self.n
        return Fraction(total) / self.n

    def scale(self, c: Number) -> "DiagonalMatrix":
        return DiagonalMatrix(tuple(c * x for x in self.diag))

    def as_square(self) -> SquareMatrix:
        n = self.n
        return SquareMatrix(tuple(tuple(self.diag[i] if i == j else 0 * self.diag[i] for j in range(n))
                                  for i in range(n)))


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")
