"""
Matrix-valued trace recursions on non-crossing pair partitions.

V(pi) and V_0(pi) are diagonal matrices built recursively from the covered
decomposition of pi; v = tr V(pi) and v_0 are their scalar traces. The colored
sums below are an independent, brute-force evaluation of the same scalars.
"""
import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

from .errors import DimensionMismatchError, PartitionError
from .matrices import DiagonalMatrix, SquareMatrix
from .ncpart import NcPairPartition, colorings, decompose
from .numeric import Number


def tau(v: SquareMatrix) -> DiagonalMatrix:
    """Diagonal matrix of column sums."""
    return DiagonalMatrix(v.column_sums())


def _identity_like(v: SquareMatrix) -> DiagonalMatrix:
    one = 1.0 if any(isinstance(x, float) for row in v.entries for x in row) else 1
    return DiagonalMatrix.identity(v.n, one)


def _product(mats, start: DiagonalMatrix) -> DiagonalMatrix:
    out = start
    for m in mats:
        out = out @ m
    return out


@lru_cache(maxsize=4096)
def _covered_v(shape: Tuple[Tuple[int, int], ...], v: SquareMatrix) -> DiagonalMatrix:
    part = NcPairPartition(shape)
    inner = decompose(part).segments
    prefix = _product((_covered_v(seg.normalized().pairs, v) for seg in inner), _identity_like(v))
    return tau(v.left_diagonal_multiply(prefix))


def v_matrix(part: NcPairPartition, v: SquareMatrix) -> DiagonalMatrix:
    """
    V(pi) for a partition and a square matrix V.

    Args:
        part: any non-crossing pair partition; the empty one gives the identity
        v: the matrix V

    Returns:
        tau(V) for one block, tau(V(inner segments) V) for a covered partition,
        and the product over covered segments otherwise.
    """
    if part.is_empty():
        return _identity_like(v)
    if part.is_covered():
        return _covered_v(part.normalized().pairs, v)
    return _product((_covered_v(seg.normalized().pairs, v) for seg in decompose(part).segments),
                    _identity_like(v))


def v0_matrix(part: NcPairPartition, v: SquareMatrix) -> DiagonalMatrix:
    """V_0(pi) for a covered partition: the right factor V is replaced by its diagonal."""
    if not part.is_covered():
        raise PartitionError(f"V_0 is defined on covered partitions only, got {part}")
    inner = decompose(part).segments
    prefix = _product((_covered_v(seg.normalized().pairs, v) for seg in inner), _identity_like(v))
    return prefix @ v.diagonal()


def v_of(part: NcPairPartition, v: SquareMatrix) -> Number:
    return v_matrix(part, v).normalized_trace()


def v0_of(part: NcPairPartition, v: SquareMatrix) -> Number:
    """Tr V_0 on covered partitions, multiplicative over the interval factors."""
    if part.is_empty():
        return 1
    if part.is_covered():
        return v0_matrix(part, v).trace()
    out = 1
    for seg in decompose(part).segments:
        out = out * v0_matrix(seg, v).trace()
    return out


def colored_oracle_v0(part: NcPairPartition, v: SquareMatrix) -> Number:
    """Sum over block colorings f of prod_p v[f(p), f(outer(p))], outer(p) = p for outermost blocks."""
    total = 0
    for f in itertools.product(range(v.n), repeat=part.k):
        term = 1
        for p in range(part.k):
            term = term * v[f[p], f[part.outer[p]]]
        total = total + term
    return total


def colored_oracle_v(part: NcPairPartition, v: SquareMatrix) -> Number:
    """Average over the conditional color j of the colored sums with outermost blocks attached to j."""
    total = 0
    for f in colorings(part, v.n):
        term = 1
        for p in range(part.k):
            anchor = f(part.outer[p]) if part.has_outer(p) else f(None)
            term = term * v[f(p), anchor]
        total = total + term
    if isinstance(total, float):
        return total / v.n
    return Fraction(total) / v.n


def tracial_value(part: NcPairPartition, b: SquareMatrix, d: DiagonalMatrix) -> Number:
    """b(pi) = Tr(B(pi) D)."""
    if b.n != d.n:
        raise DimensionMismatchError(f"B is {b.n}x{b.n} but D has {d.n} entries")
    return (v_matrix(part, b) @ d).trace()


def standard_value(part: NcPairPartition, b: SquareMatrix) -> Number:
    """b_0(pi), which is v_0(pi) evaluated for B."""
    return v0_of(part, b)


b_of = tracial_value
b0_of = standard_value
