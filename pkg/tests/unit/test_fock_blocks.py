from fractions import Fraction

import pytest

from mfree.errors import InvalidParameterError, ModelError
from mfree.fock_blocks import BlockEngine, block_moment
from mfree.fock_sim import Flavor, PseudomatrixSpec, Reference, pseudomatrix_moment
from mfree.limit_law import BlockModel

TWO_BLOCK = BlockModel.from_rows([[1, "1/2"], [2, "3/2"]], ["1/2", "1/2"])
UNEVEN = BlockModel.from_rows([[2, 1, 0], [1, 1, "1/2"], [3, 0, 1]], ["1/4", "1/4", "1/2"])


def test_engine_sizes_and_blocks():
    engine = BlockEngine(UNEVEN, 8)
    assert engine.sizes == (2, 2, 4)
    assert [engine.block_of(i) for i in range(8)] == [0, 0, 1, 1, 2, 2, 2, 2]
    with pytest.raises(InvalidParameterError):
        engine.block_of(8)


def test_engine_rejects_empty_block():
    with pytest.raises(ModelError):
        BlockEngine(BlockModel.from_rows([[1, 1], [1, 1]], ["1/10", "9/10"]), 2)


def test_vacuum_options_split_the_anchor():
    engine = BlockEngine(TWO_BLOCK, 6)
    options = dict(engine.options((), anchor=1))
    assert options == {(0, 0, True, False): 3, (1, 1, True, True): 1, (1, 1, True, False): 2}


def test_chain_options_on_off_diagonal_top():
    engine = BlockEngine(TWO_BLOCK, 6)
    top = ((0, 1, False, False), (1, 1, True, True))
    standard = dict(engine.options(top, anchor=1))
    assert standard == {(0, 0, True, False): 1, (0, 0, False, False): 2, (1, 0, False, False): 3,
                        (0, 1, False, False): 1}
    strong = dict(BlockEngine(TWO_BLOCK, 6, strong=True).options(top, anchor=1))
    assert (0, 0, True, False) not in strong


@pytest.mark.parametrize("model,n", [(TWO_BLOCK, 4), (UNEVEN, 4), (UNEVEN, 5)])
@pytest.mark.parametrize("flavor", [Flavor.STANDARD, Flavor.STRONG])
@pytest.mark.parametrize("m", [2, 4, 6])
def test_blocks_engine_matches_direct_engine(model, n, flavor, m):
    spec = PseudomatrixSpec(n, model, flavor)
    for reference in (Reference.vacuum(), Reference.trace(), Reference.condition(0), Reference.condition(n - 1)):
        direct = pseudomatrix_moment(spec, m, reference, engine="direct")
        blocks = pseudomatrix_moment(spec, m, reference, engine="blocks")
        assert direct == blocks, str(reference)


def test_block_moment_arguments():
    assert block_moment(TWO_BLOCK, 4, 3) == 0
    assert block_moment(TWO_BLOCK, 4, 2, "vacuum") == Fraction(5, 4)
    with pytest.raises(InvalidParameterError):
        block_moment(TWO_BLOCK, 4, -2)
    with pytest.raises(InvalidParameterError):
        block_moment(TWO_BLOCK, 4, 2, "condition")
    with pytest.raises(InvalidParameterError):
        block_moment(TWO_BLOCK, 4, 2, "average")
