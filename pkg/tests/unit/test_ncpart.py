import pytest

from mfree.errors import DimensionMismatchError, PartitionError
from mfree.ncpart import (
    Coloring, NcPairPartition, colorings, decompose, enumerate_nc2, pair_partitions, reassemble,
)


@pytest.mark.parametrize("k,count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 14)])
def test_catalan_counts(k, count):
    assert len(enumerate_nc2(k)) == count


def test_enumeration_is_lexicographic():
    parts = enumerate_nc2(2)
    assert [p.pairs for p in parts] == [((1, 2), (3, 4)), ((1, 4), (2, 3))]
    assert enumerate_nc2(3) == tuple(sorted(enumerate_nc2(3), key=lambda p: p.pairs))


@pytest.mark.parametrize("pairs", [((1, 3), (2, 4)), ((1, 2), (4, 5)), ((1, 1),)])
def test_invalid_partitions(pairs):
    with pytest.raises(PartitionError):
        NcPairPartition(pairs)


def test_pairs_are_normalized():
    part = NcPairPartition.from_pairs([(4, 1), (3, 2)])
    assert part.pairs == ((1, 4), (2, 3))
    assert part.is_covered()
    assert part.outer == (0, 0)
    assert part.has_outer(1) and not part.has_outer(0)


def test_decompose_covered():
    dec = decompose(NcPairPartition(((1, 6), (2, 3), (4, 5))))
    assert dec.covering == (1, 6)
    assert [s.pairs for s in dec.segments] == [((2, 3),), ((4, 5),)]


def test_decompose_uncovered():
    dec = decompose(NcPairPartition(((1, 2), (3, 6), (4, 5))))
    assert dec.covering is None
    assert [s.pairs for s in dec.segments] == [((1, 2),), ((3, 6), (4, 5))]


def test_decompose_single_block():
    dec = decompose(NcPairPartition(((1, 2),)))
    assert dec.covering == (1, 2)
    assert dec.segments == ()


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_reassemble_inverts_decompose(k):
    for part in enumerate_nc2(k):
        assert reassemble(decompose(part)) == part


def test_decompose_empty_raises():
    with pytest.raises(PartitionError):
        decompose(NcPairPartition(()))


def test_depth_and_inside():
    part = NcPairPartition(((1, 6), (2, 5), (3, 4)))
    assert [part.depth(p) for p in range(3)] == [0, 1, 2]
    assert part.blocks_inside(0) == (1, 2)
    assert part.normalized() == part
    assert part.shifted(2).normalized() == part


@pytest.mark.parametrize("pairs,r,count", [
    (((1, 2),), 2, 4),
    (((1, 2), (3, 4)), 2, 8),
    (((1, 4), (2, 3)), 3, 27),
])
def test_coloring_counts(pairs, r, count):
    assert len(list(colorings(NcPairPartition(pairs), r))) == count


def test_coloring_range_checked():
    with pytest.raises(DimensionMismatchError):
        Coloring(conditional=2, blocks=(0,), r=2)
    with pytest.raises(DimensionMismatchError):
        list(colorings(NcPairPartition(((1, 2),)), 0))


def test_all_pairings_include_crossing_ones():
    assert len(list(pair_partitions([1, 2, 3, 4]))) == 3
    assert len(list(pair_partitions(range(1, 7)))) == 15
    assert list(pair_partitions([1, 2, 3])) == []
