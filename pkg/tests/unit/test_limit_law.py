import itertools
import random
from fractions import Fraction

import pytest

from mfree.convolve import (
    NamedLaw, as_kseries, free_conv, semicircle_chain_free, semicircle_chain_monotone, semicircle_kseries,
)
from mfree.errors import InvalidParameterError, ModelError, UnsupportedPatternError
from mfree.limit_law import (
    BlockModel, blockify, cross_check, dim2_closed_forms, dim2_closed_forms_from_weights, interval_sizes,
    law_name, limit_family, route_applicable, route_tables, semicircle_bound, standard_k_from_trace,
    standard_moments_combinatorial, tracial_moments_combinatorial, trace_formula_moments, twin_semicircle_checks,
)
from mfree.matrices import DiagonalMatrix, SquareMatrix
from mfree.numeric import Profile, coerce
from mfree.series import cf_kseries_matrix, k_to_moments

CATALAN = (1, 0, 1, 0, 2, 0, 5, 0, 14)
HALVES = ["1/2", "1/2"]


def two_block(profile=Profile.RATIONAL):
    return BlockModel.from_rows([[1, "1/2"], [2, "3/2"]], HALVES, profile, name="two-block")


def test_model_validation_messages():
    with pytest.raises(ModelError, match=r"Tr\(D\) = 1"):
        BlockModel.from_rows([[1, 0], [0, 1]], ["0.3", "0.3"])
    with pytest.raises(ModelError, match="negative"):
        BlockModel.from_rows([[1, -1], [0, 1]], HALVES)
    with pytest.raises(ModelError, match="relaxed"):
        BlockModel.from_rows([[0, 1], [1, 1]], HALVES)
    with pytest.raises(ModelError):
        BlockModel.from_rows([[1]], HALVES)
    with pytest.raises(ModelError):
        BlockModel.from_rows([[1, 1], [1, 1]], ["3/2", "-1/2"])
    assert BlockModel.from_rows([[0, 1], [1, 1]], HALVES, relaxed=True).relaxed


def test_b_is_d_times_u():
    model = two_block()
    assert model.b == SquareMatrix.from_rows([["1/2", "1/4"], [1, "3/4"]])
    assert BlockModel.from_b(model.b, model.d).u == model.u
    assert model.a_squared == model.b


def test_canonical_form():
    assert two_block().canonical() == {"u": [["1", "1/2"], ["2", "3/2"]], "d": ["1/2", "1/2"], "relaxed": False}


def test_interval_sizes():
    d = DiagonalMatrix.from_values(["1/3", "2/3"])
    assert interval_sizes(d, 5) == (1, 4)
    assert interval_sizes(d, 6) == (2, 4)
    assert sum(interval_sizes(DiagonalMatrix.from_values(["1/7"] * 7), 20)) == 20


def test_blockify():
    model = BlockModel.from_rows([[1, 2], [3, 4]], ["1/3", "2/3"])
    v = blockify(model, 5)
    assert v.n == 5
    assert v[0, 0] == Fraction(1, 5)
    assert v[0, 1] == Fraction(2, 5)
    assert v[1, 0] == Fraction(3, 5)
    assert v[4, 4] == Fraction(4, 5)
    with pytest.raises(ModelError):
        blockify(model, 1)
    with pytest.raises(ModelError):
        blockify(BlockModel.from_rows([[1, 1], [1, 1]], ["1/10", "9/10"]), 2)


def test_catalan_model_all_routes():
    model = BlockModel.from_rows([[1]], [1])
    assert tracial_moments_combinatorial(model, 8).coeffs == CATALAN
    assert standard_moments_combinatorial(model, 8).coeffs == CATALAN
    family = limit_family(model, 8)
    assert family.mu.coeffs == CATALAN
    assert family.mu0.coeffs == CATALAN


def test_two_block_combinatorial_matches_continued_fraction():
    model = two_block()
    family = limit_family(model, 8)
    assert tracial_moments_combinatorial(model, 8) == family.mu
    assert standard_moments_combinatorial(model, 8) == family.mu0
    assert family.mu[2] == Fraction(5, 4)
    assert family.mu0[2] == Fraction(5, 4)


def test_trace_formulas():
    model = two_block()
    family = limit_family(model, 8)
    assert trace_formula_moments(family, model.d) == family.mu
    assert standard_k_from_trace(family, model.b).truncate(8) == family.mu0_k


def test_semicircle_bound_dominates_even_moments():
    model = two_block()
    bound = semicircle_bound(model, 8)
    family = limit_family(model, 8)
    for n in range(0, 9, 2):
        assert family.mu[n] <= bound[n]
        assert family.mu0[n] <= bound[n]


def test_relaxed_model_refused_by_partition_sums():
    model = BlockModel.from_rows([[0, 2], [2, 0]], HALVES, relaxed=True)
    with pytest.raises(ModelError):
        tracial_moments_combinatorial(model, 4)
    assert route_applicable(model, "combinatorial")
    assert tracial_moments_combinatorial(model, 4, allow_relaxed=True)[2] == 1


def test_crossed_bernoulli_has_dirac_standard_law():
    model = BlockModel.from_rows([[0, 2], [2, 0]], HALVES, relaxed=True)
    family = limit_family(model, 6)
    assert family.mu0.coeffs == (1, 0, 0, 0, 0, 0, 0)
    report = cross_check(model, 6)
    assert "combinatorial" in report.skipped
    assert report.ok
    assert report.tables["walks"]["mu0"].coeffs == (1, 0, 0, 0, 0, 0, 0)


MASKS = [m for m in itertools.product((False, True), repeat=4) if any(m)]


@pytest.mark.parametrize("mask", MASKS, ids=lambda m: "".join("+" if x else "0" for x in m))
def test_closed_forms_match_continued_fraction(mask):
    rng = random.Random(sum(bit << k for k, bit in enumerate(mask)))
    for _ in range(10):
        values = [Fraction(rng.randint(1, 6), rng.randint(1, 3)) if bit else 0 for bit in mask]
        b = SquareMatrix(((values[0], values[1]), (values[2], values[3])))
        closed = dim2_closed_forms(b, 8)
        cf = cf_kseries_matrix(b, 8)
        for i in range(2):
            for j in range(2):
                assert closed[i][j] == cf[i][j], (values, i, j)


def test_closed_forms_reject_zero_pattern_and_size():
    with pytest.raises(UnsupportedPatternError):
        dim2_closed_forms(SquareMatrix.constant(2, 0), 4)
    with pytest.raises(InvalidParameterError):
        dim2_closed_forms(SquareMatrix.identity(3), 4)
    with pytest.raises(InvalidParameterError):
        dim2_closed_forms_from_weights(1, -1, 0, 1, 4)


def test_closed_forms_from_weights_square_the_entries():
    kij = dim2_closed_forms_from_weights(2, 0, 0, 1, 6)
    assert kij[0][0] == semicircle_kseries(4, 6)
    assert kij[1][1] == semicircle_kseries(1, 6)


@pytest.mark.parametrize("betas,d", [
    ((1, 2), HALVES),
    ((1, "1/2", 3), ["1/3", "1/3", "1/3"]),
])
def test_constant_rows_give_free_chain(betas, d):
    betas = [coerce(x) for x in betas]
    r = len(betas)
    b = SquareMatrix(tuple(tuple(betas[i] for _ in range(r)) for i in range(r)))
    family = limit_family(BlockModel.from_b(b, DiagonalMatrix.from_values(d)), 8)
    chain = semicircle_chain_free(betas, 8)
    for j in range(r):
        assert family.muj[j] == chain
    assert family.mu == k_to_moments(chain, 8)
    assert family.mu0 == family.mu


@pytest.mark.parametrize("alpha,delta,d", [
    (1, 1, HALVES),
    (Fraction(3, 2), Fraction(1, 2), ["1/3", "2/3"]),
    (2, Fraction(2, 3), ["3/4", "1/4"]),
])
def test_equal_row_weights_give_free_sum_of_semicircles(alpha, delta, d):
    # beta = alpha and gamma = delta
    b = SquareMatrix(((alpha * alpha, alpha * alpha), (delta * delta, delta * delta)))
    family = limit_family(BlockModel.from_b(b, DiagonalMatrix.from_values(d)), 8)
    expected = free_conv(as_kseries(NamedLaw.semicircle(alpha), 8), as_kseries(NamedLaw.semicircle(delta), 8))
    closed = dim2_closed_forms_from_weights(alpha, alpha, delta, delta, 8)
    for j in range(2):
        assert family.muj[j] == expected
        assert closed[0][j] + closed[1][j] == expected
    assert family.mu == k_to_moments(expected, 8)


@pytest.mark.parametrize("betas,d", [
    ((1, 2), ["1/4", "3/4"]),
    ((2, 1, "1/2"), ["1/2", "1/4", "1/4"]),
])
def test_lower_triangular_rows_give_monotone_chain(betas, d):
    betas = [coerce(x) for x in betas]
    r = len(betas)
    b = SquareMatrix(tuple(tuple(betas[i] if i >= j else 0 for j in range(r)) for i in range(r)))
    family = limit_family(BlockModel.from_b(b, DiagonalMatrix.from_values(d)), 8)
    for j in range(r):
        assert family.muj[j] == semicircle_chain_monotone(betas[j:], 8)


def test_cross_check_all_routes_agree_exactly():
    report = cross_check(two_block(), 8)
    assert not report.skipped
    assert len(report.discrepancies) == 6
    assert report.max_discrepancy() == 0
    assert report.ok


def test_cross_check_f64_profile():
    report = cross_check(two_block(Profile.FLOAT64), 8)
    assert report.ok
    assert isinstance(report.tables["continued_fraction"]["mu"][2], float)


def test_cross_check_skips_two_block_routes_for_other_sizes():
    model = BlockModel.from_rows([[1]], [1])
    report = cross_check(model, 6)
    assert set(report.skipped) == {"walks", "closed_form"}
    assert report.ok
    with pytest.raises(InvalidParameterError):
        cross_check(model, 1)
    with pytest.raises(InvalidParameterError):
        route_tables(model, 4, "oracle")


def test_route_tables_name_every_law():
    tables = route_tables(two_block(), 4, "continued_fraction")
    assert set(tables) == {"mu", "mu0", "mu1", "mu2", "mu1_1", "mu1_2", "mu2_1", "mu2_2"}
    assert law_name(0) == "mu1"
    assert law_name(1, 0) == "mu2_1"


def test_twin_semicircle_flags():
    model = BlockModel.from_rows([[2, 0], [0, 2]], HALVES)
    flags = twin_semicircle_checks(model, 8)
    assert flags["alpha_squared"] == 1
    assert flags["mu_matches_semicircle"]
    assert flags["mu0_matches_boolean_square"]
    assert flags["mu0_density_form"] == "1/sqrt(z^2-4a^2)"
    assert limit_family(model, 8).mu0.coeffs[::2] == (1, 2, 6, 20, 70)
    assert twin_semicircle_checks(two_block(), 8) is None
