"""
Non-crossing pair partitions.

A partition is stored as its blocks (l, r), sorted by left endpoint, over an
interval of consecutive points. Blocks are indexed by that order, so block 0
always contains the first point. Points are 1-based to match the usual [2k]
labelling; colors are 0-based indices into a matrix.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import DimensionMismatchError, PartitionError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def _crosses(a: Pair, b: Pair) -> bool:
    (i, j), (p, q) = sorted((a, b))
    return i < p < j < q


def is_noncrossing(pairs: Sequence[Pair]) -> bool:
    return not any(_crosses(a, b) for a, b in itertools.combinations(pairs, 2))


@dataclass(frozen=True)
class NcPairPartition:
    pairs: Tuple[Pair, ...]
    outer: Tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        points = sorted(p for pair in pairs for p in pair)
        if any(a == b for a, b in pairs):
            raise PartitionError(f"degenerate block in {pairs}")
        if points and points != list(range(points[0], points[0] + len(points))):
            raise PartitionError(f"blocks {pairs} do not cover an interval exactly once")
        if not is_noncrossing(pairs):
            raise PartitionError(f"blocks {pairs} cross")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "outer", _nearest_outer(pairs))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Pair]) -> "NcPairPartition":
        return cls(tuple(tuple(p) for p in pairs))

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def lo(self) -> int:
        return self.pairs[0][0] if self.pairs else 1

    @property
    def hi(self) -> int:
        return max(r for _, r in self.pairs) if self.pairs else 0

    def is_empty(self) -> bool:
        return not self.pairs

    def is_covered(self) -> bool:
        """True when the first and last points share a block."""
        return bool(self.pairs) and self.pairs[0] == (self.lo, self.hi)

    def has_outer(self, p: int) -> bool:
        return self.outer[p] != p

    def depth(self, p: int) -> int:
        """Number of blocks strictly enclosing block p."""
        d = 0
        while self.has_outer(p):
            p = self.outer[p]
            d += 1
        return d

    def blocks_inside(self, p: int) -> Tuple[int, ...]:
        l, r = self.pairs[p]
        return tuple(q for q, (a, b) in enumerate(self.pairs) if l < a and b < r)

    def shifted(self, offset: int) -> "NcPairPartition":
        return NcPairPartition(tuple((a + offset, b + offset) for a, b in self.pairs))

    def normalized(self) -> "NcPairPartition":
        """The same shape relabelled onto [2k]."""
        return self.shifted(1 - self.lo) if self.pairs else self

    def __str__(self) -> str:
        return "{" + ",".join(f"{{{a},{b}}}" for a, b in self.pairs) + "}"


def _nearest_outer(pairs: Tuple[Pair, ...]) -> Tuple[int, ...]:
    outer = list(range(len(pairs)))
    stack: List[int] = []
    for p, (l, r) in enumerate(pairs):
        while stack and pairs[stack[-1]][1] < l:
            stack.pop()
        if stack:
            outer[p] = stack[-1]
        stack.append(p)
    return tuple(outer)


@dataclass(frozen=True)
class Coloring:
    """Colors of the conditional block and of blocks 0..k-1."""
    conditional: int
    blocks: Tuple[int, ...]
    r: int

    def __post_init__(self):
        if any(not 0 <= c < self.r for c in (self.conditional, *self.blocks)):
            raise DimensionMismatchError(f"coloring {self} uses a color outside [0, {self.r})")

    def __call__(self, p: Optional[int]) -> int:
        """f(p); None stands for the conditional block."""
        return self.conditional if p is None else self.blocks[p]


@dataclass(frozen=True)
class CoveredDecomposition:
    covering: Optional[Pair]
    segments: Tuple[NcPairPartition, ...]


def _catalan_shapes(lo: int, k: int) -> List[Tuple[Pair, ...]]:
    if k == 0:
        return [()]
    shapes = []
    for j in range(1, k + 1):
        close = lo + 2 * j - 1
        for inner in _catalan_shapes(lo + 1, j - 1):
            for rest in _catalan_shapes(close + 1, k - j):
                shapes.append(((lo, close),) + inner + rest)
    return shapes


@lru_cache(maxsize=None)
def enumerate_nc2(k: int) -> Tuple[NcPairPartition, ...]:
    """All non-crossing pair partitions of [2k], lexicographic on the sorted pair list."""
    if k < 0:
        raise PartitionError(f"block count must be nonnegative, got {k}")
    parts = sorted((NcPairPartition(shape) for shape in _catalan_shapes(1, k)), key=lambda p: p.pairs)
    logger.debug("enumerated %d non-crossing pair partitions of [%d]", len(parts), 2 * k)
    return tuple(parts)


def pair_partitions(points: Sequence[int]) -> Iterator[Tuple[Pair, ...]]:
    """All pair partitions of the given points, crossing ones included."""
    points = list(points)
    if not points:
        yield ()
        return
    if len(points) % 2:
        return
    first, rest = points[0], points[1:]
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in pair_partitions(remaining):
            yield ((first, partner),) + tail


def _interval_factors(part: NcPairPartition) -> Tuple[NcPairPartition, ...]:
    """Split into maximal covered pieces over consecutive intervals."""
    pieces = []
    current: List[Pair] = []
    reach = None
    for pair in part.pairs:
        if reach is not None and pair[0] > reach:
            pieces.append(NcPairPartition(tuple(current)))
            current = []
        current.append(pair)
        reach = pair[1] if reach is None or pair[0] > reach else max(reach, pair[1])
    if current:
        pieces.append(NcPairPartition(tuple(current)))
    return tuple(pieces)


def decompose(part: NcPairPartition) -> CoveredDecomposition:
    """
    Covered decomposition of a non-empty partition.

    A covered partition returns its covering block and the interval factors
    of what it encloses; otherwise the covering is None and the segments are
    the maximal covered factors. Segments keep their absolute positions.
    """
    if part.is_empty():
        raise PartitionError("cannot decompose the empty partition")
    if part.is_covered():
        interior = part.pairs[1:]
        segments = _interval_factors(NcPairPartition(interior)) if interior else ()
        return CoveredDecomposition(covering=part.pairs[0], segments=segments)
    return CoveredDecomposition(covering=None, segments=_interval_factors(part))


def reassemble(decomposition: CoveredDecomposition) -> NcPairPartition:
    pairs: List[Pair] = []
    if decomposition.covering is not None:
        pairs.append(decomposition.covering)
    for seg in decomposition.segments:
        if not seg.is_covered():
            raise PartitionError(f"segment {seg} is not covered")
        pairs.extend(seg.pairs)
    return NcPairPartition(tuple(pairs))


def colorings(part: NcPairPartition, r: int) -> Iterator[Coloring]:
    """All r**(k+1) colorings of the blocks and the conditional block."""
    if r < 1:
        raise DimensionMismatchError(f"color count must be positive, got {r}")
    for f in itertools.product(range(r), repeat=part.k + 1):
        yield Coloring(conditional=f[0], blocks=f[1:], r=r)
