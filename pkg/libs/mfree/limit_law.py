"""
Limit laws of random pseudomatrices.

A BlockModel (U, D) describes variance matrices whose (i, j) block is
u_ij / n, with block sizes proportional to d_1..d_r. The limit laws are
reached by three independent routes:

  * non-crossing partition sums of Tr(B(pi) D) and b_0(pi), B = DU;
  * the matricial continued fraction for the K-transforms of mu_{i,j};
  * for r = 2, closed forms built from the convolution calculus and
    weighted tree walks.

cross_check runs every applicable route and reports their disagreement.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .convolve import (
    as_kseries, NamedLaw, boolean_conv, orthogonal_conv, semicircle_kseries, sfree_conv, t_transform,
)
from .errors import FixedPointError, InvalidParameterError, ModelError, UnsupportedPatternError
from .matrices import DiagonalMatrix, SquareMatrix
from .ncpart import enumerate_nc2
from .numeric import Number, Profile, discrepancy, format_number, within_tolerance
from .series import (
    KSeries, MomentSeries, PowerSeries, cf_kseries_matrix, k_to_moments, mixture,
)
from .trace_fn import standard_value, tracial_value
from .tree_walk import MatricialWeighting, walk_moments

logger = logging.getLogger(__name__)

ROUTES = ("combinatorial", "continued_fraction", "walks", "closed_form")


def _div(p: Number, q: Number) -> Number:
    if isinstance(p, float) or isinstance(q, float):
        return p / q
    return Fraction(p) / q


@dataclass(frozen=True)
class BlockModel:
    """
    Variance parameters U (r x r) and dimension matrix D = diag(d_1..d_r).

    `relaxed` admits zero diagonal entries u_jj; such models only make sense
    for the degenerate two-block closed forms and are refused by the
    combinatorial routes.
    """
    u: SquareMatrix
    d: DiagonalMatrix
    relaxed: bool = False
    name: str = ""

    def __post_init__(self):
        r = self.u.n
        if r == 0:
            raise ModelError("a block model needs at least one block")
        if self.d.n != r:
            raise ModelError(f"U is {r}x{r} but D has {self.d.n} entries")
        if any(dj <= 0 for dj in self.d.diag):
            raise ModelError(f"dimension matrix entries must be positive, got {self.d.diag}")
        total = self.d.trace()
        if not within_tolerance(total, 1):
            raise ModelError(f"dimension matrix must satisfy Tr(D) = 1, got Tr(D) = {total}")
        for i in range(r):
            for j in range(r):
                x = self.u[i, j]
                if x < 0:
                    raise ModelError(f"u[{i}][{j}] = {x} is negative")
                if i == j and x == 0 and not self.relaxed:
                    raise ModelError(f"u[{j}][{j}] must be positive (set relaxed = true for degenerate models)")

    @classmethod
    def from_rows(cls, u_rows, d_values, profile: Profile = Profile.RATIONAL, relaxed: bool = False,
                  name: str = "") -> "BlockModel":
        return cls(SquareMatrix.from_rows(u_rows, profile), DiagonalMatrix.from_values(d_values, profile),
                   relaxed, name)

    @classmethod
    def from_b(cls, b: SquareMatrix, d: DiagonalMatrix, relaxed: bool = False, name: str = "") -> "BlockModel":
        """Model with B = DU, i.e. u_ij = b_ij / d_i."""
        u = SquareMatrix(tuple(tuple(_div(x, d.diag[i]) for x in row) for i, row in enumerate(b.entries)))
        return cls(u, d, relaxed, name)

    @property
    def r(self) -> int:
        return self.u.n

    @property
    def b(self) -> SquareMatrix:
        """B = DU."""
        return self.u.left_diagonal_multiply(self.d)

    @property
    def a_squared(self) -> SquareMatrix:
        """Entrywise squares of the limit weight matrix A; equal to B."""
        return self.b

    def canonical(self) -> dict:
        return {
            "u": [[format_number(x) for x in row] for row in self.u.entries],
            "d": [format_number(x) for x in self.d.diag],
            "relaxed": self.relaxed,
        }


def interval_sizes(d: DiagonalMatrix, n: int) -> Tuple[int, ...]:
    """n_k = floor(n (d_1 + .. + d_k)) - floor(n (d_1 + .. + d_{k-1}))."""
    sizes = []
    cumulative = 0
    previous = 0
    for k, dk in enumerate(d.diag):
        cumulative = cumulative + dk
        edge = n if k == d.n - 1 else math.floor(cumulative * n)
        sizes.append(edge - previous)
        previous = edge
    return tuple(sizes)


def block_of(sizes: Sequence[int]) -> Tuple[int, ...]:
    """Block index of every row 0..n-1."""
    return tuple(k for k, size in enumerate(sizes) for _ in range(size))


def blockify(model: BlockModel, n: int) -> SquareMatrix:
    """The n x n variance matrix with entry u_{k(i), k(j)} / n."""
    if n < model.r:
        raise ModelError(f"matrix size n={n} is smaller than the block count r={model.r}")
    sizes = interval_sizes(model.d, n)
    if any(size == 0 for size in sizes):
        raise ModelError(f"block sizes {sizes} for n={n} contain an empty block")
    kappa = block_of(sizes)
    return SquareMatrix(tuple(tuple(_div(model.u[kappa[i], kappa[j]], n) for j in range(n)) for i in range(n)))


def _refuse_relaxed(model: BlockModel, allow_relaxed: bool) -> None:
    if model.relaxed and not allow_relaxed:
        raise ModelError("partition sums assume u_jj > 0; pass allow_relaxed=True to evaluate a relaxed model")


def tracial_moments_combinatorial(model: BlockModel, order: int, allow_relaxed: bool = False) -> MomentSeries:
    """m_k = sum over pi in NC2(k) of Tr(B(pi) D); odd moments vanish."""
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    _refuse_relaxed(model, allow_relaxed)
    b = model.b
    coeffs: List[Number] = [1]
    for m in range(1, order + 1):
        if m % 2:
            coeffs.append(0)
            continue
        coeffs.append(sum((tracial_value(p, b, model.d) for p in enumerate_nc2(m // 2)), 0))
    return MomentSeries(tuple(coeffs))


def standard_moments_combinatorial(model: BlockModel, order: int, allow_relaxed: bool = False) -> MomentSeries:
    """m_k = sum over pi in NC2(k) of b_0(pi)."""
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    _refuse_relaxed(model, allow_relaxed)
    b = model.b
    coeffs: List[Number] = [1]
    for m in range(1, order + 1):
        if m % 2:
            coeffs.append(0)
            continue
        coeffs.append(sum((standard_value(p, b) for p in enumerate_nc2(m // 2)), 0))
    return MomentSeries(tuple(coeffs))


@dataclass(frozen=True)
class LimitFamily:
    kij: Tuple[Tuple[KSeries, ...], ...]
    muj: Tuple[KSeries, ...]
    mu: MomentSeries
    mu0: MomentSeries
    order: int

    @property
    def mu0_k(self) -> KSeries:
        out = self.kij[0][0]
        for j in range(1, len(self.kij)):
            out = out + self.kij[j][j]
        return out

    def muj_moments(self, j: int) -> MomentSeries:
        return k_to_moments(self.muj[j], self.order)


def limit_family(model: BlockModel, order: int) -> LimitFamily:
    """
    Every K_{i,j} from the continued fraction on B = DU, with

        K_{mu_j} = sum_i K_{i,j},  mu = sum_j d_j mu_j,  K_{mu_0} = sum_j K_{j,j}.

    The diagonal of K_{mu_j} is checked against K = tau((z - K)^{-1} B).
    """
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    b = model.b
    kij = cf_kseries_matrix(b, order)
    r = model.r
    muj = []
    for j in range(r):
        column = kij[0][j]
        for i in range(1, r):
            column = column + kij[i][j]
        muj.append(column)
    mu = mixture(model.d.diag, [k_to_moments(k, order) for k in muj])
    mu0_k = kij[0][0]
    for j in range(1, r):
        mu0_k = mu0_k + kij[j][j]
    family = LimitFamily(kij=kij, muj=tuple(muj), mu=mu, mu0=k_to_moments(mu0_k, order), order=order)
    check_fixed_point(family.muj, b)
    return family


def _resolvent_terms(kdiag: Sequence[KSeries], weights_by_i) -> PowerSeries:
    """sum_i weights_by_i[i] * w / (1 - w K_i) as a series in w."""
    order = min(k.order for k in kdiag) + 2
    total = PowerSeries.zero(order)
    for k, weight in zip(kdiag, weights_by_i):
        if weight:
            total = total + k.reciprocal_f().scale(weight)
    return total


def check_fixed_point(kdiag: Sequence[KSeries], b: SquareMatrix) -> None:
    """Raise FixedPointError unless K_j = sum_i b_ij / (z - K_i) through the series order."""
    for j, kj in enumerate(kdiag):
        rhs = KSeries.from_power_series(_resolvent_terms(kdiag, [b[i, j] for i in range(b.n)]))
        for n in range(1, min(kj.order, rhs.order) + 1):
            if not within_tolerance(kj[n], rhs[n]):
                raise FixedPointError(f"K_{j} coefficient {n}: {kj[n]} != {rhs[n]}")


def trace_formula_moments(family: LimitFamily, d: DiagonalMatrix) -> MomentSeries:
    """Moments of mu from G = Tr((z - K)^{-1} D)."""
    g = _resolvent_terms(family.muj, d.diag)
    coeffs = list(g.coeffs[1:family.order + 2])
    if isinstance(coeffs[0], float) and math.isclose(coeffs[0], 1.0):
        coeffs[0] = 1.0
    return MomentSeries(tuple(coeffs))


def standard_k_from_trace(family: LimitFamily, b: SquareMatrix) -> KSeries:
    """K_{mu_0} = Tr((z - K)^{-1} B_0)."""
    return KSeries.from_power_series(_resolvent_terms(family.muj, [b[j, j] for j in range(b.n)]))


def semicircle_bound(model: BlockModel, order: int) -> MomentSeries:
    """Moments of the semicircle with variance max u_ij, an upper bound for the even moments of mu and mu_0."""
    return k_to_moments(semicircle_kseries(model.u.max_entry(), order), order)


# Closed forms for r = 2. Entries of A are (alpha, beta / gamma, delta) row-major,
# handled through their squares b11 = alpha**2, b12 = beta**2, b21 = gamma**2, b22 = delta**2.

def _sc(v, order):
    return semicircle_kseries(v, order)


def _bern(v, order):
    return as_kseries(NamedLaw("bernoulli", v), order)


def _csc(a2, b2, order):
    return t_transform(semicircle_kseries(a2, order), _div(b2, a2))


def _general(a, b, c, d, order):
    t, s = _div(b, a), _div(c, d)
    m12 = sfree_conv(_csc(a, b, order), _csc(d, c, order))
    m21 = sfree_conv(_csc(d, c, order), _csc(a, b, order))
    return ((t_transform(m12, _div(1, t)), m12), (m21, t_transform(m21, _div(1, s))))


def _row1(a, b, c, d, order):
    m12 = sfree_conv(_csc(a, b, order), _bern(c, order))
    m21 = sfree_conv(_bern(c, order), _csc(a, b, order))
    return ((t_transform(m12, _div(a, b)), m12), (m21, KSeries.zero(order)))


def _row2(a, b, c, d, order):
    zero = KSeries.zero(order)
    return ((zero, sfree_conv(_bern(b, order), _bern(c, order))),
            (sfree_conv(_bern(c, order), _bern(b, order)), zero))


def _row3(a, b, c, d, order):
    m21 = _csc(d, c, order)
    return ((orthogonal_conv(_sc(a, order), m21), KSeries.zero(order)), (m21, _sc(d, order)))


def _row4(a, b, c, d, order):
    zero = KSeries.zero(order)
    m12 = _bern(b, order)
    return ((zero, m12), (zero, orthogonal_conv(_sc(d, order), m12)))


def _row5(a, b, c, d, order):
    zero = KSeries.zero(order)
    return ((zero, zero), (_csc(d, c, order), _sc(d, order)))


def _row6(a, b, c, d, order):
    zero = KSeries.zero(order)
    return ((_sc(a, order), zero), (zero, _sc(d, order)))


def _row7(a, b, c, d, order):
    zero = KSeries.zero(order)
    return ((_sc(a, order), zero), (zero, zero))


def _row8(a, b, c, d, order):
    zero = KSeries.zero(order)
    return ((zero, _bern(b, order)), (zero, zero))


# nonzero pattern of (b11, b12, b21, b22) -> builder
CLOSED_FORMS = {
    (True, True, True, True): _general,
    (True, True, True, False): _row1,
    (False, True, True, False): _row2,
    (True, False, True, True): _row3,
    (False, True, False, True): _row4,
    (False, False, True, True): _row5,
    (True, False, False, True): _row6,
    (True, False, False, False): _row7,
    (False, True, False, False): _row8,
}


def dim2_closed_forms(b: SquareMatrix, order: int) -> Tuple[Tuple[KSeries, KSeries], Tuple[KSeries, KSeries]]:
    """
    K-series of the four mu_{i,j} of a two-block model from B = A o A.

    Patterns without a direct entry are handled by relabelling the blocks
    (b11, b12, b21, b22) -> (b22, b21, b12, b11).
    """
    if b.n != 2:
        raise InvalidParameterError(f"closed forms exist for 2x2 matrices only, got {b.n}x{b.n}")
    params = (b[0, 0], b[0, 1], b[1, 0], b[1, 1])
    if any(x < 0 for x in params):
        raise InvalidParameterError(f"squared weights must be nonnegative, got {params}")
    mask = tuple(x != 0 for x in params)
    if mask in CLOSED_FORMS:
        return CLOSED_FORMS[mask](*params, order)
    swapped = params[::-1]
    swapped_mask = mask[::-1]
    if swapped_mask in CLOSED_FORMS:
        base = CLOSED_FORMS[swapped_mask](*swapped, order)
        return ((base[1][1], base[1][0]), (base[0][1], base[0][0]))
    pattern = "".join("+" if x else "0" for x in mask)
    raise UnsupportedPatternError(f"no closed form for zero pattern {pattern} of (b11, b12, b21, b22)")


def dim2_closed_forms_from_weights(alpha, beta, gamma, delta, order: int):
    for name, x in (("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)):
        if x < 0:
            raise InvalidParameterError(f"{name} must be nonnegative, got {x}")
    return dim2_closed_forms(SquareMatrix(((alpha * alpha, beta * beta), (gamma * gamma, delta * delta))), order)


@dataclass
class CrossCheckReport:
    order: int
    tables: Dict[str, Dict[str, MomentSeries]] = field(default_factory=dict)
    discrepancies: Dict[Tuple[str, str], Number] = field(default_factory=dict)
    skipped: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(within_tolerance(value, 0) for value in self.discrepancies.values())

    def max_discrepancy(self) -> Number:
        return max(self.discrepancies.values(), default=0)


def law_name(i: int, j: Optional[int] = None) -> str:
    """Table key of mu_j, or of mu_{i,j} when both indices are given (0-based in, 1-based out)."""
    return f"mu{i + 1}" if j is None else f"mu{i + 1}_{j + 1}"


def _pair_tables(kij, order: int) -> Dict[str, MomentSeries]:
    return {law_name(i, j): k_to_moments(k, order) for i, row in enumerate(kij) for j, k in enumerate(row)}


def route_tables(model: BlockModel, order: int, route: str) -> Dict[str, MomentSeries]:
    """Moment tables of mu, mu_0, mu_j and (where the route has them) mu_{i,j}."""
    if route == "combinatorial":
        return {
            "mu": tracial_moments_combinatorial(model, order),
            "mu0": standard_moments_combinatorial(model, order),
        }
    if route == "continued_fraction":
        family = limit_family(model, order)
        tables = {"mu": family.mu, "mu0": family.mu0}
        for j in range(model.r):
            tables[law_name(j)] = family.muj_moments(j)
        tables.update(_pair_tables(family.kij, order))
        return tables
    if route == "walks":
        b = model.b
        muj = [walk_moments(MatricialWeighting.for_law(b, f"mu{j + 1}"), order) for j in range(2)]
        return {
            "mu": mixture(model.d.diag, muj),
            "mu0": walk_moments(MatricialWeighting.for_law(b, "mu0"), order),
            "mu1": muj[0],
            "mu2": muj[1],
        }
    if route == "closed_form":
        kij = dim2_closed_forms(model.b, order)
        muj = [boolean_conv(kij[0][j], kij[1][j]) for j in range(2)]
        muj_m = [k_to_moments(k, order) for k in muj]
        tables = {
            "mu": mixture(model.d.diag, muj_m),
            "mu0": k_to_moments(boolean_conv(kij[0][0], kij[1][1]), order),
            "mu1": muj_m[0],
            "mu2": muj_m[1],
        }
        tables.update(_pair_tables(kij, order))
        return tables
    raise InvalidParameterError(f"unknown route {route!r}; expected one of {ROUTES}")


def route_applicable(model: BlockModel, route: str) -> Optional[str]:
    """None when the route can run on the model, else the reason it cannot."""
    if route == "combinatorial" and model.relaxed:
        return "partition sums require u_jj > 0"
    if route in ("walks", "closed_form") and model.r != 2:
        return f"{route} needs r = 2, model has r = {model.r}"
    return None


def compare_tables(a: Dict[str, MomentSeries], b: Dict[str, MomentSeries]) -> Number:
    """Max coefficient difference over the laws both tables contain."""
    worst = 0
    for law in sorted(set(a) & set(b)):
        for x, y in zip(a[law].coeffs, b[law].coeffs):
            worst = max(worst, discrepancy(x, y))
    return worst


def cross_check(model: BlockModel, order: int, routes: Sequence[str] = ROUTES) -> CrossCheckReport:
    if order < 2:
        raise InvalidParameterError(f"cross-check needs order >= 2, got {order}")
    report = CrossCheckReport(order=order)
    for route in routes:
        reason = route_applicable(model, route)
        if reason:
            report.skipped[route] = reason
            logger.debug("skipping route %s: %s", route, reason)
            continue
        report.tables[route] = route_tables(model, order, route)
    names = list(report.tables)
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            report.discrepancies[(first, second)] = compare_tables(report.tables[first], report.tables[second])
    logger.info("cross-check over %s: max discrepancy %s", names, report.max_discrepancy())
    return report


def twin_semicircle_checks(model: BlockModel, order: int) -> Optional[Dict[str, object]]:
    """
    Checks for two blocks with b11 = b22 = alpha**2 and b12 = b21 = 0.

    mu should be sigma_alpha and mu_0 the boolean square of sigma_alpha; the
    boolean square is matched against the arcsine transforms
    1/sqrt(z^2 - 4 alpha^2) and 1/sqrt(z^2 - alpha^2).
    """
    if model.r != 2:
        return None
    b = model.b
    if b[0, 1] != 0 or b[1, 0] != 0 or b[0, 0] != b[1, 1] or b[0, 0] == 0:
        return None
    a2 = b[0, 0]
    family = limit_family(model, order)
    sigma = semicircle_kseries(a2, order)
    semicircle = k_to_moments(sigma, order)
    boolean_square = k_to_moments(boolean_conv(sigma, sigma), order)

    def arcsine(c2):
        # G = 1/sqrt(z^2 - c2): m_2k = C(2k, k) (c2/4)^k
        return tuple(0 if n % 2 else math.comb(n, n // 2) * _div(c2, 4) ** (n // 2) for n in range(order + 1))

    forms = {"1/sqrt(z^2-4a^2)": arcsine(4 * a2), "1/sqrt(z^2-a^2)": arcsine(a2)}
    matching = [name for name, moments in forms.items()
                if all(within_tolerance(x, y) for x, y in zip(moments, family.mu0.coeffs))]
    return {
        "alpha_squared": a2,
        "mu_matches_semicircle": within_tolerance(compare_tables({"mu": family.mu}, {"mu": semicircle}), 0),
        "mu0_matches_boolean_square": within_tolerance(
            compare_tables({"mu0": family.mu0}, {"mu0": boolean_square}), 0),
        "mu0_density_form": matching[0] if matching else None,
    }
