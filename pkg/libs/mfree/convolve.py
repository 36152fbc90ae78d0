"""
Convolution calculus on K-series.

    boolean      K_{a+b}  = K_a + K_b
    orthogonal   K_{a|-b} = K_a o F_b
    monotone     K_{a>b}  = K_{a|-b} + K_b
    compression  K_{T_t a} = t K_a
    s-free       a [+]s b = a |- (b [+]s a), solved by alternating iteration
    free         a [+] b  = (a [+]s b) + (b [+]s a)   (boolean sum of the halves)

All operations are on truncated K-series and never look at measures. The
result order is the smaller of the operand orders.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

from .errors import InvalidParameterError, StabilizationError
from .numeric import Number, within_tolerance
from .series import KSeries, MomentSeries, PowerSeries, k_to_moments, moments_to_k

logger = logging.getLogger(__name__)


class LawKind(str, Enum):
    DIRAC0 = "dirac0"
    BERNOULLI = "bernoulli"
    SEMICIRCLE = "semicircle"
    COMPRESSED_SEMICIRCLE = "compressed_semicircle"


@dataclass(frozen=True)
class NamedLaw:
    """
    One of the elementary laws, parametrized by squared parameters.

    alpha_sq is gamma**2 for a Bernoulli law and alpha**2 for the semicircles;
    beta_sq is only used by the compressed semicircle sigma_{alpha,beta},
    which is T_t sigma_alpha with t = beta**2 / alpha**2.
    """
    kind: LawKind
    alpha_sq: Number = 0
    beta_sq: Number = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", LawKind(self.kind))
        if self.alpha_sq < 0 or self.beta_sq < 0:
            raise InvalidParameterError(f"{self.kind.value} parameters must be nonnegative")
        if self.kind is LawKind.COMPRESSED_SEMICIRCLE and self.alpha_sq == 0:
            raise InvalidParameterError("compressed semicircle needs alpha > 0")

    @classmethod
    def dirac0(cls) -> "NamedLaw":
        return cls(LawKind.DIRAC0)

    @classmethod
    def bernoulli(cls, gamma: Number) -> "NamedLaw":
        return cls(LawKind.BERNOULLI, _square(gamma))

    @classmethod
    def semicircle(cls, alpha: Number) -> "NamedLaw":
        return cls(LawKind.SEMICIRCLE, _square(alpha))

    @classmethod
    def compressed_semicircle(cls, alpha: Number, beta: Number) -> "NamedLaw":
        return cls(LawKind.COMPRESSED_SEMICIRCLE, _square(alpha), _square(beta))

    @property
    def t(self) -> Number:
        if self.kind is not LawKind.COMPRESSED_SEMICIRCLE:
            return 1
        return _ratio(self.beta_sq, self.alpha_sq)


def _square(x: Number) -> Number:
    if x < 0:
        raise InvalidParameterError(f"parameters must be nonnegative, got {x}")
    return x * x


def _ratio(p: Number, q: Number) -> Number:
    if isinstance(p, float) or isinstance(q, float):
        return p / q
    return Fraction(p) / q


def semicircle_kseries(variance: Number, order: int) -> KSeries:
    """Solve K = variance * w / (1 - w K) order by order."""
    k = PowerSeries.zero(order)
    numerator = PowerSeries.monomial(variance, 1, order)
    for _ in range((order + 1) // 2 + 1):
        k = numerator * (PowerSeries.one(order) - k.shift(1)).reciprocal()
    return KSeries.from_power_series(k)


def as_kseries(law: NamedLaw, order: int) -> KSeries:
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    if law.kind is LawKind.DIRAC0:
        return KSeries.zero(order)
    if law.kind is LawKind.BERNOULLI:
        return KSeries((law.alpha_sq,) + (0,) * (order - 1))
    if law.kind is LawKind.SEMICIRCLE:
        return semicircle_kseries(law.alpha_sq, order)
    return t_transform(semicircle_kseries(law.alpha_sq, order), law.t)


def _common(a: KSeries, b: KSeries) -> Tuple[KSeries, KSeries]:
    order = min(a.order, b.order)
    return a.truncate(order), b.truncate(order)


def boolean_conv(a: KSeries, b: KSeries) -> KSeries:
    return a + b


def orthogonal_conv(a: KSeries, b: KSeries) -> KSeries:
    """K_a composed with F_b, through the common order."""
    a, b = _common(a, b)
    return KSeries.from_power_series(a.power_series().compose(b.reciprocal_f()))


def monotone_conv(a: KSeries, b: KSeries) -> KSeries:
    return boolean_conv(orthogonal_conv(a, b), b)


def monotone_conv_by_cauchy(a: KSeries, b: KSeries) -> KSeries:
    """
    Monotone convolution from G_{a>b} = G_a o F_b.

    Reference implementation for monotone_conv: it never touches K_a o F_b,
    so agreement of the two is an independent check of the K-route.
    """
    a, b = _common(a, b)
    g_a = PowerSeries((0,) + k_to_moments(a).coeffs)
    g = g_a.compose(b.reciprocal_f())
    return moments_to_k(MomentSeries(g.coeffs[1:]))


def t_transform(a: KSeries, t: Number) -> KSeries:
    if t < 0:
        raise InvalidParameterError(f"compression parameter must be >= 0, got {t}")
    return a.scale(t)


def kseries_equal(a: KSeries, b: KSeries) -> bool:
    """Coefficient-wise equality through the common order (tolerant for floats)."""
    a, b = _common(a, b)
    return all(within_tolerance(x, y) for x, y in zip(a.coeffs, b.coeffs))


def sfree_conv(a: KSeries, b: KSeries, order: Optional[int] = None,
               iterations: Optional[int] = None) -> KSeries:
    """
    s-free convolution a [+]s b.

    Iterates x_m = a |- y_{m-1}, y_m = b |- x_{m-1} from x_0 = a, y_0 = b;
    x_m is exact through order 2m + 2. One iteration beyond ceil(order/2) is
    run and must reproduce the previous one.
    """
    if order is None:
        order = min(a.order, b.order)
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    a, b = a.truncate(order), b.truncate(order)
    if iterations is None:
        iterations = (order + 1) // 2 + 1
    x, y = a, b
    previous = x
    for _ in range(iterations):
        previous = x
        x, y = orthogonal_conv(a, y), orthogonal_conv(b, x)
    if iterations >= 2 and not kseries_equal(previous, x):
        raise StabilizationError(f"s-free iteration did not stabilize after {iterations} steps at order {order}")
    logger.debug("s-free convolution stabilized after %d iterations", iterations)
    return x


def free_conv(a: KSeries, b: KSeries) -> KSeries:
    return boolean_conv(sfree_conv(a, b), sfree_conv(b, a))


def subordination_check(a: KSeries, b: KSeries) -> bool:
    """b [+] a == b > (a [+]s b) through the common order."""
    return kseries_equal(free_conv(b, a), monotone_conv(b, sfree_conv(a, b)))


def moments_from_free_cumulants(kappas: Sequence[Number], order: int) -> MomentSeries:
    """Solve M(w) = 1 + sum_n kappa_n (w M(w))**n; kappas[0] is kappa_1."""
    r = PowerSeries((0,) + tuple(kappas[:order]) + (0,) * max(0, order - len(kappas)))
    m = PowerSeries.one(order)
    for _ in range(order + 1):
        m = PowerSeries.one(order) + r.compose(m.shift(1))
    return MomentSeries(m.coeffs)


def free_cumulants(moments: MomentSeries) -> List[Number]:
    """kappa_1..kappa_M from m_0..m_M."""
    order = moments.order
    wm = moments.power_series().shift(1)
    powers = [PowerSeries.one(order)]
    for _ in range(order):
        powers.append(powers[-1] * wm)
    kappas: List[Number] = []
    for n in range(1, order + 1):
        lower = sum((kappas[k - 1] * powers[k][n] for k in range(1, n)), 0)
        kappas.append(moments[n] - lower)
    return kappas


def free_conv_by_cumulants(a: KSeries, b: KSeries) -> KSeries:
    """Free convolution by cumulant additivity, independent of the s-free route."""
    a, b = _common(a, b)
    ka = free_cumulants(k_to_moments(a))
    kb = free_cumulants(k_to_moments(b))
    order = a.order + 1
    return moments_to_k(moments_from_free_cumulants([x + y for x, y in zip(ka, kb)], order))


def boolean_cumulants(k: KSeries) -> Tuple[Number, ...]:
    """beta_1..beta_{M+1}: beta_1 = 0 for centered laws and beta_{n+1} = c_n."""
    return (0,) + k.coeffs


def semicircle_chain_free(variances: Sequence[Number], order: int) -> KSeries:
    laws = [semicircle_kseries(v, order) for v in variances]
    return reduce(free_conv, laws)


def semicircle_chain_monotone(variances: Sequence[Number], order: int) -> KSeries:
    """sigma_1 > (sigma_2 > (... > sigma_r))."""
    laws = [semicircle_kseries(v, order) for v in variances]
    return reduce(lambda acc, law: monotone_conv(law, acc), reversed(laws[:-1]), laws[-1])
