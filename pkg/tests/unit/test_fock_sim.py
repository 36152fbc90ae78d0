import itertools
import random
from fractions import Fraction

import pytest

from mfree.errors import FockError, InvalidParameterError, TruncationOverflowError
from mfree.fock_sim import (
    ConvergenceRow, Flavor, FockState, FockWord, PairOperator, PseudomatrixSpec, Reference, Shape, admissible,
    annihilate, convergence_table, create, decay_exponent, enumerate_words, extrapolate_limit, inner,
    mixed_moment, pseudomatrix_moment, relations_check, unit_project, word_is_valid,
)
from mfree.limit_law import BlockModel, standard_moments_combinatorial, tracial_moments_combinatorial

CATALAN_MODEL = BlockModel.from_rows([[1]], [1])
TWO_BLOCK = BlockModel.from_rows([[1, "1/2"], [2, "3/2"]], ["1/2", "1/2"])


def test_admissibility_rules():
    assert admissible((0, 0), ())
    assert not admissible((0, 1), ())
    assert admissible((1, 0), ((0, 0),))
    assert admissible((0, 0), ((0, 0),))
    assert not admissible((1, 1), ((0, 0),))
    assert admissible((0, 0), ((0, 1), (1, 1)))
    assert not admissible((0, 0), ((0, 1), (1, 1)), Flavor.STRONG)
    assert admissible((0, 1), ((0, 1), (1, 1)), Flavor.STRONG)


def test_word_validity():
    assert word_is_valid(((1, 0), (0, 0)))
    assert not word_is_valid(((0, 1),))
    assert not word_is_valid(((1, 0), (1, 1)))
    assert not word_is_valid(((0, 0), (0, 1), (1, 1)), Flavor.STRONG)
    assert not word_is_valid(((2, 2),), n=2)
    with pytest.raises(FockError):
        FockWord(((0, 1),))
    assert FockWord(()).is_vacuum()


def test_creation_and_annihilation():
    vacuum = FockState.vacuum(2)
    e00 = create(0, 0, vacuum)
    assert e00.amplitudes == {((0, 0),): 1}
    assert create(0, 1, vacuum).is_zero()
    assert create(1, 0, e00).amplitudes == {((1, 0), (0, 0)): 1}
    assert create(1, 1, e00).is_zero()
    assert create(0, 0, e00).amplitudes == {((0, 0), (0, 0)): 1}
    assert annihilate(0, 0, e00) == vacuum
    assert annihilate(1, 1, e00).is_zero()
    assert unit_project(0, 0, e00) == e00
    assert unit_project(0, 0, vacuum) == vacuum
    assert unit_project(0, 1, vacuum).is_zero()


def test_strong_flavor_blocks_diagonal_over_off_diagonal():
    word = ((0, 1), (1, 1))
    standard = FockState.basis(word, 2)
    strong = FockState.basis(word, 2, Flavor.STRONG)
    assert create(0, 0, standard).amplitudes == {((0, 0),) + word: 1}
    assert create(0, 0, strong).is_zero()


def test_truncation_overflow():
    state = create(0, 0, FockState.vacuum(2, truncation=1))
    with pytest.raises(TruncationOverflowError):
        create(0, 0, state)
    with pytest.raises(TruncationOverflowError):
        FockState.basis(((0, 0), (0, 0)), 2, truncation=1)


def test_pair_range_checked():
    with pytest.raises(InvalidParameterError):
        create(2, 2, FockState.vacuum(2))


def test_inner_product_and_linear_algebra():
    x = FockState.vacuum(2) + create(0, 0, FockState.vacuum(2)).scale(3)
    assert inner(x, x) == 10
    assert x.coefficient(((0, 0),)) == 3
    assert (x + x.scale(-1)).is_zero()


def test_words_are_enumerated_by_creation():
    words = enumerate_words(2, max_len=2)
    assert words[0] == ()
    assert len([w for w in words if len(w) == 1]) == 2
    assert all(word_is_valid(w) for w in words)
    assert len(enumerate_words(2, Flavor.STRONG, 3)) < len(enumerate_words(2, Flavor.STANDARD, 3))


@pytest.mark.parametrize("flavor", [Flavor.STANDARD, Flavor.STRONG])
def test_relations_hold(flavor):
    report = relations_check(2, flavor, truncation=6)
    assert report.checked > 0
    assert report.ok, report.failures[:5]


def test_relations_need_two_indices():
    with pytest.raises(InvalidParameterError):
        relations_check(1)


def _mixed_moment_setup(seed):
    rng = random.Random(seed)
    values = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(8)]
    a = PairOperator.centered((0, 0), values[0], values[1])
    b = PairOperator.centered((1, 1), values[2], values[3])
    a1 = PairOperator.centered((0, 1), values[4], values[5])
    b1 = PairOperator.centered((1, 0), values[6], values[7])
    return a, b, a1, b1


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_mixed_moments_of_two_by_two_array(seed):
    a, b, a1, b1 = _mixed_moment_setup(seed)

    def phi(*factors):
        return mixed_moment(factors, 2, Reference.vacuum(), Flavor.STRONG)

    assert phi(a) == a.unit
    assert phi(a, a) - phi(a) ** 2 == a.creation
    assert phi(a, b, a, b) == phi(a) ** 2 * phi(b) ** 2
    assert phi(a, b1, a, b) == phi(b) * b1.unit * (phi(a, a) - phi(a) ** 2)
    assert phi(a, b, a1, b) == phi(a) * a1.unit * (phi(b, b) - phi(b) ** 2)


def test_conditioned_moment_of_off_diagonal_variable():
    a1 = PairOperator.centered((0, 1), 5, 2)
    assert mixed_moment([a1], 2, Reference.condition(1)) == 2
    assert mixed_moment([a1, a1], 2, Reference.condition(1)) == 5 + 4
    assert mixed_moment([a1], 2, Reference.condition(0)) == 0


def test_reference_parsing():
    assert Reference.parse("condition:3") == Reference.condition(3)
    assert str(Reference.condition(3)) == "condition:3"
    assert Reference.parse("trace") == Reference.trace()
    with pytest.raises(InvalidParameterError):
        Reference.parse("condition:x")
    with pytest.raises(InvalidParameterError):
        Reference.parse("average")
    with pytest.raises(InvalidParameterError):
        Reference("vacuum", 1)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_second_moment_of_catalan_pseudomatrix(n):
    spec = PseudomatrixSpec(n, CATALAN_MODEL)
    assert pseudomatrix_moment(spec, 2, Reference.vacuum()) == 1
    assert pseudomatrix_moment(spec, 2, Reference.trace()) == 1 + Fraction(1, n)
    assert pseudomatrix_moment(spec, 3, Reference.trace()) == 0


def test_lower_shape_and_engines():
    spec = PseudomatrixSpec(3, CATALAN_MODEL, shape=Shape.LOWER)
    assert pseudomatrix_moment(spec, 2, Reference.vacuum()) == 1
    with pytest.raises(InvalidParameterError):
        pseudomatrix_moment(spec, 2, engine="blocks")
    with pytest.raises(InvalidParameterError):
        pseudomatrix_moment(PseudomatrixSpec(2, CATALAN_MODEL), 2, engine="lanczos")
    with pytest.raises(InvalidParameterError):
        PseudomatrixSpec(1, TWO_BLOCK)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_extrapolation_recovers_catalan_limits(m):
    for reference, limits in ((Reference.trace(), tracial_moments_combinatorial(CATALAN_MODEL, m)),
                              (Reference.vacuum(), standard_moments_combinatorial(CATALAN_MODEL, m))):
        samples = [(n, pseudomatrix_moment(PseudomatrixSpec(n, CATALAN_MODEL), m, reference))
                   for n in range(1, m // 2 + 3)]
        assert extrapolate_limit(samples) == limits[m]


def test_extrapolation_of_two_block_model():
    m = 4
    samples = [(n, pseudomatrix_moment(PseudomatrixSpec(n, TWO_BLOCK), m, engine="blocks"))
               for n in (2, 4, 6, 8)]
    assert extrapolate_limit(samples) == tracial_moments_combinatorial(TWO_BLOCK, m)[m]


def test_extrapolate_polynomial_in_inverse_size():
    samples = [(n, 3 + Fraction(2, n) + Fraction(5, n * n)) for n in (1, 2, 3)]
    assert extrapolate_limit(samples) == 3
    with pytest.raises(InvalidParameterError):
        extrapolate_limit([])
    with pytest.raises(InvalidParameterError):
        extrapolate_limit([(2, 1), (2, 1)])


def test_trace_moments_converge():
    rows = convergence_table(TWO_BLOCK, [2, 4, 6], [4, 8, 16, 32, 64])
    assert len(rows) == 15
    for m in (2, 4, 6):
        subset = [r for r in rows if r.order == m]
        errors = [r.error for r in subset]
        assert errors[-1] < errors[0]
        assert decay_exponent(subset) >= 0.4


def test_vacuum_table_uses_standard_limit():
    rows = convergence_table(TWO_BLOCK, [2], [2, 4], Reference.vacuum())
    assert all(r.limit == standard_moments_combinatorial(TWO_BLOCK, 2)[2] for r in rows)
    assert all(r.reference == "vacuum" for r in rows)
    with pytest.raises(InvalidParameterError):
        convergence_table(TWO_BLOCK, [2], [2], Reference.condition(0))


def test_decay_exponent_fit():
    rows = [ConvergenceRow(n, 2, "trace", 0, 0, Fraction(1, n)) for n in (4, 8, 16)]
    assert decay_exponent(rows) == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        decay_exponent(rows[:1])


PAIRS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _random_state(rng, flavor, max_len=3, truncation=5):
    state = FockState(2, flavor, truncation)
    for word in enumerate_words(2, flavor, max_len):
        state.add(word, Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
    return state


@pytest.mark.parametrize("flavor", [Flavor.STANDARD, Flavor.STRONG])
def test_annihilation_is_adjoint_of_creation(flavor):
    words = enumerate_words(2, flavor, 3)
    basis = [FockState.basis(w, 2, flavor, truncation=4) for w in words]
    for i, j in PAIRS:
        for x in basis:
            created = create(i, j, x)
            for y in basis:
                assert inner(created, y) == inner(x, annihilate(i, j, y)), ((i, j), x.amplitudes, y.amplitudes)
    rng = random.Random(21)
    x, y = _random_state(rng, flavor), _random_state(rng, flavor)
    for i, j in PAIRS:
        assert inner(create(i, j, x), y) == inner(x, annihilate(i, j, y))


@pytest.mark.parametrize("flavor", [Flavor.STANDARD, Flavor.STRONG])
def test_unit_is_a_projection(flavor):
    state = _random_state(random.Random(22), flavor)
    for i, j in PAIRS:
        projected = unit_project(i, j, state)
        assert unit_project(i, j, projected) == projected
        assert annihilate(i, j, create(i, j, state)) == projected
        assert inner(projected, state) == inner(projected, projected)


def _sequences_with_a_lone_pair(length):
    for seq in itertools.product(PAIRS, repeat=length):
        if any(seq.count(p) == 1 for p in seq):
            yield seq


@pytest.mark.parametrize("flavor", [Flavor.STANDARD, Flavor.STRONG])
def test_lone_centered_variable_gives_zero_moment(flavor):
    rng = random.Random(23)
    ops = {p: PairOperator.centered(p, Fraction(rng.randint(1, 9), rng.randint(1, 4))) for p in PAIRS}
    references = [Reference.vacuum(), Reference.condition(0), Reference.condition(1), Reference.trace()]
    for length in (1, 2, 3, 4):
        for seq in _sequences_with_a_lone_pair(length):
            factors = [ops[p] for p in seq]
            for reference in references:
                assert mixed_moment(factors, 2, reference, flavor) == 0, (seq, str(reference))
