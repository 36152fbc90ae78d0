"""
Truncated series engine for Cauchy-transform calculus.

All series are formal power series in w = 1/z. A law with moments m_n has
moment series M(w) = sum m_n w^n, Cauchy transform G(z) = w M(w) and
K-transform K(z) = z - 1/G(z) = sum_{n>=1} c_n w^n, so that

    w K(w) = 1 - 1/M(w).

The moment m_n depends on c_1..c_{n-1} only: a KSeries holding c_1..c_M
determines the moments through order M + 1.

Numeric evaluation at complex points (continued fractions, Stieltjes
inversion) uses numpy and is vectorized over the evaluation points.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidParameterError, PoleError
from .matrices import SquareMatrix
from .numeric import Number

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 12
DEFAULT_EPS = 1e-3
DEFAULT_DEPTH = 40
DEFAULT_TOL = 1e-12
DEFAULT_MAX_DEPTH = 200_000


def _inverse(x: Number) -> Number:
    if isinstance(x, (float, complex)):
        return 1.0 / x
    return Fraction(1) / x


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients a_0..a_order of a power series truncated after w**order."""
    coeffs: Tuple[Number, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise InvalidParameterError("a power series needs at least its constant term")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls((0,) * (order + 1))

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls((1,) + (0,) * order)

    @classmethod
    def monomial(cls, coefficient: Number, power: int, order: int) -> "PowerSeries":
        coeffs = [0] * (order + 1)
        if power <= order:
            coeffs[power] = coefficient
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Number:
        return self.coeffs[n] if 0 <= n <= self.order else 0

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise InvalidParameterError(f"cannot extend a series of order {self.order} to {order}")
        return PowerSeries(self.coeffs[:order + 1])

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        order = min(self.order, other.order)
        return PowerSeries(tuple(self[n] + other[n] for n in range(order + 1)))

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + (-other)

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = 0
            for k in range(n + 1):
                a = self.coeffs[k]
                if a:
                    acc = acc + a * other.coeffs[n - k]
            out.append(acc)
        return PowerSeries(tuple(out))

    def scale(self, c: Number) -> "PowerSeries":
        return PowerSeries(tuple(c * a for a in self.coeffs))

    def shift(self, k: int = 1) -> "PowerSeries":
        """Multiply by w**k, keeping the order."""
        return PowerSeries((0,) * k + self.coeffs[:self.order + 1 - k])

    def reciprocal(self) -> "PowerSeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise PoleError(0, "series with zero constant term has no reciprocal")
        inv0 = _inverse(a0)
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = 0
            for k in range(1, n + 1):
                a = self.coeffs[k]
                if a:
                    acc = acc + a * out[n - k]
            out.append(-inv0 * acc)
        return PowerSeries(tuple(out))

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(w)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise InvalidParameterError("inner series of a composition must vanish at w = 0")
        order = min(self.order, inner.order)
        inner = inner.truncate(order)
        acc = PowerSeries.monomial(self.coeffs[order], 0, order)
        for n in range(order - 1, -1, -1):
            acc = acc * inner + PowerSeries.monomial(self.coeffs[n], 0, order)
        return acc


@dataclass(frozen=True)
class MomentSeries:
    """Moments m_0..m_M of a law, m_0 = 1."""
    coeffs: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs or self.coeffs[0] != 1:
            raise InvalidParameterError(f"moment series must start with m_0 = 1, got {self.coeffs[:1]}")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def moment(self, n: int) -> Number:
        if not 0 <= n <= self.order:
            raise InvalidParameterError(f"moment {n} outside 0..{self.order}")
        return self.coeffs[n]

    def __getitem__(self, n: int) -> Number:
        return self.moment(n)

    def truncate(self, order: int) -> "MomentSeries":
        return MomentSeries(self.power_series().truncate(order).coeffs)

    def power_series(self) -> PowerSeries:
        return PowerSeries(self.coeffs)

    def even_moments(self) -> Tuple[Number, ...]:
        return self.coeffs[::2]


def mixture(weights: Sequence[Number], laws: Sequence[MomentSeries]) -> MomentSeries:
    """Moments of the convex combination sum_j w_j mu_j."""
    order = min(m.order for m in laws)
    coeffs = []
    for n in range(order + 1):
        acc = 0
        for w, m in zip(weights, laws):
            acc = acc + w * m.coeffs[n]
        coeffs.append(acc)
    # float rounding can move m_0 off 1
    if isinstance(coeffs[0], float) and math.isclose(coeffs[0], 1.0):
        coeffs[0] = 1.0
    return MomentSeries(tuple(coeffs))


@dataclass(frozen=True)
class KSeries:
    """Coefficients c_1..c_M of K(z) = c_1/z + c_2/z**2 + ..."""
    coeffs: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def zero(cls, order: int) -> "KSeries":
        return cls((0,) * order)

    @classmethod
    def from_power_series(cls, ps: PowerSeries) -> "KSeries":
        if ps.coeffs[0] != 0:
            raise InvalidParameterError("a K-series has no constant term")
        return cls(ps.coeffs[1:])

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> Number:
        """c_n for n >= 1."""
        return self.coeffs[n - 1] if 1 <= n <= self.order else 0

    def power_series(self) -> PowerSeries:
        return PowerSeries((0,) + self.coeffs)

    def truncate(self, order: int) -> "KSeries":
        if order > self.order:
            raise InvalidParameterError(f"cannot extend a K-series of order {self.order} to {order}")
        return KSeries(self.coeffs[:order])

    def __add__(self, other: "KSeries") -> "KSeries":
        order = min(self.order, other.order)
        return KSeries(tuple(self.coeffs[n] + other.coeffs[n] for n in range(order)))

    def __sub__(self, other: "KSeries") -> "KSeries":
        order = min(self.order, other.order)
        return KSeries(tuple(self.coeffs[n] - other.coeffs[n] for n in range(order)))

    def scale(self, t: Number) -> "KSeries":
        return KSeries(tuple(t * c for c in self.coeffs))

    def reciprocal_f(self) -> PowerSeries:
        """1/F(z) = G(z) = w M(w), known through w**(self.order + 2)."""
        return PowerSeries((0,) + k_to_moments(self).coeffs)

    def max_abs_difference(self, other: "KSeries") -> Number:
        order = min(self.order, other.order)
        return max((abs(self.coeffs[n] - other.coeffs[n]) for n in range(order)), default=0)


def k_to_moments(k: KSeries, order: Optional[int] = None) -> MomentSeries:
    """Moments through `order` (default k.order + 1) from M(w) = 1/(1 - w K(w))."""
    if order is None:
        order = k.order + 1
    if order > k.order + 1 or order < 0:
        raise InvalidParameterError(f"a K-series of order {k.order} determines moments through {k.order + 1}, "
                                    f"not {order}")
    wk = PowerSeries((0, 0) + k.coeffs).truncate(order) if order >= 1 else PowerSeries((0,))
    moments = (PowerSeries.one(order) - wk).reciprocal()
    return MomentSeries(moments.coeffs)


def moments_to_k(m: MomentSeries) -> KSeries:
    """K-series of order m.order - 1 from w K(w) = 1 - 1/M(w); requires m_1 = 0."""
    if m.order < 1:
        return KSeries(())
    if m.coeffs[1] != 0:
        raise InvalidParameterError(f"K-series represent centered laws; got mean m_1 = {m.coeffs[1]}")
    e = PowerSeries.one(m.order) - m.power_series().reciprocal()
    return KSeries(e.coeffs[2:])


@dataclass(frozen=True)
class ContinuedFractionSpec:
    b: SquareMatrix
    depth: int = DEFAULT_DEPTH
    target: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.depth < 0:
            raise InvalidParameterError(f"depth must be >= 0, got {self.depth}")
        if any(x < 0 for row in self.b.entries for x in row):
            raise InvalidParameterError("continued-fraction matrix B must be entrywise nonnegative")
        i, j = self.target
        if not (0 <= i < self.b.n and 0 <= j < self.b.n):
            raise InvalidParameterError(f"target {self.target} outside a {self.b.n}x{self.b.n} matrix")


@lru_cache(maxsize=128)
def cf_kseries_matrix(b: SquareMatrix, order: int, depth: Optional[int] = None) -> Tuple[Tuple[KSeries, ...], ...]:
    """
    K-series of every mu_{i,j} through `order`.

    Runs K^(m)_{ij} = b_ij w / (1 - w sum_p K^(m-1)_{p,i}) from K^(0)_{ij} = b_ij w.
    Level m is exact through order 2m + 1, so ceil(order/2) levels suffice; a
    larger `depth` gives the same coefficients.
    """
    if order < 1:
        raise InvalidParameterError(f"order must be >= 1, got {order}")
    levels = max(depth or 0, (order + 1) // 2)
    r = b.n
    base = [[PowerSeries.monomial(b[i, j], 1, order) for j in range(r)] for i in range(r)]
    current = base
    for _ in range(levels):
        col_sums = []
        for i in range(r):
            s = PowerSeries.zero(order)
            for p in range(r):
                s = s + current[p][i]
            col_sums.append(s)
        denominators = [(PowerSeries.one(order) - s.shift(1)).reciprocal() for s in col_sums]
        current = [[base[i][j] * denominators[i] if b[i, j] else PowerSeries.zero(order) for j in range(r)]
                   for i in range(r)]
    logger.debug("continued fraction on %dx%d matrix: %d levels for order %d", r, r, levels, order)
    return tuple(tuple(KSeries.from_power_series(current[i][j]) for j in range(r)) for i in range(r))


def cf_to_kseries(spec: ContinuedFractionSpec, order: int) -> KSeries:
    i, j = spec.target
    return cf_kseries_matrix(spec.b, order, spec.depth)[i][j]


def cf_evaluate(spec: ContinuedFractionSpec, z: complex) -> complex:
    """K^(depth)_{target}(z) by the plain recurrence, with no convergence test."""
    if z.imag <= 0:
        raise InvalidParameterError(f"continued fractions are evaluated in the upper half-plane, got z={z}")
    r = spec.b.n
    b = [[complex(spec.b[i, j]) for j in range(r)] for i in range(r)]
    k = [[b[i][j] / z for j in range(r)] for i in range(r)]
    for level in range(1, spec.depth + 1):
        sums = [sum(k[p][i] for p in range(r)) for i in range(r)]
        denominators = [z - s for s in sums]
        if any(d == 0 for d in denominators):
            raise PoleError(level)
        k = [[b[i][j] / denominators[i] for j in range(r)] for i in range(r)]
    i, j = spec.target
    return k[i][j]


def cf_evaluate_matrix(b: SquareMatrix, z, depth: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL,
                       max_depth: int = DEFAULT_MAX_DEPTH) -> np.ndarray:
    """
    Numeric K-matrix at an array of points, shape (r, r, len(z)).

    At least `depth` levels are run; iteration then continues until two
    successive levels differ by less than `tol` or `max_depth` is reached.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(zs.imag <= 0):
        raise InvalidParameterError("continued fractions are evaluated in the upper half-plane")
    bm = np.array([[float(x) for x in row] for row in b.entries], dtype=float)
    k = bm[:, :, None] / zs[None, None, :]
    level = 0
    delta = np.inf
    while level < max_depth:
        sums = k.sum(axis=0)
        denominators = zs[None, :] - sums
        if np.any(denominators == 0):
            raise PoleError(level + 1)
        nxt = bm[:, :, None] / denominators[:, None, :]
        delta = float(np.max(np.abs(nxt - k))) if nxt.size else 0.0
        k = nxt
        level += 1
        if level >= depth and delta < tol:
            break
    else:
        logger.warning("continued fraction stopped at max_depth=%d with step %.3g > tol=%.3g",
                       max_depth, delta, tol)
    logger.debug("continued fraction converged after %d levels", level)
    return k


@dataclass(frozen=True)
class JacobiParameters:
    """
    Coefficients of G = b_0/(z - a_0 - b_1/(z - a_1 - ...)).

    `finite` is set when a Hankel determinant vanished, i.e. the law has
    finitely many atoms and the fraction is exact as it stands.
    """
    a: Tuple[Number, ...]
    b: Tuple[Number, ...]
    finite: bool = False


def _negligible(value: Number, reference: Number) -> bool:
    if isinstance(value, float) or isinstance(reference, float):
        return abs(value) <= 1e-14 * abs(reference)
    return value == 0


def jacobi_parameters(moments: MomentSeries) -> JacobiParameters:
    """Chebyshev's algorithm on m_0..m_{2N-1}, exact on rationals."""
    if moments.order < 1:
        raise InvalidParameterError("Jacobi parameters need at least the first moment")
    m = moments.coeffs
    n_pairs = (moments.order + 1) // 2
    sigma = {}
    for l in range(0, 2 * n_pairs):
        sigma[(-1, l)] = 0
        sigma[(0, l)] = m[l]
    a = [m[1] * _inverse(m[0])]
    b = [m[0]]
    for k in range(1, n_pairs):
        for l in range(k, 2 * n_pairs - k):
            sigma[(k, l)] = (sigma[(k - 1, l + 1)] - a[k - 1] * sigma[(k - 1, l)]
                             - b[k - 1] * sigma.get((k - 2, l), 0))
        pivot = sigma[(k, k)]
        if _negligible(pivot, sigma[(k - 1, k - 1)]):
            return JacobiParameters(tuple(a), tuple(b), finite=True)
        if pivot < 0:
            logger.warning("Hankel determinant turned negative at level %d; truncating J-fraction", k)
            break
        a.append(sigma[(k, k + 1)] * _inverse(pivot) - sigma[(k - 1, k)] * _inverse(sigma[(k - 1, k - 1)]))
        b.append(pivot * _inverse(sigma[(k - 1, k - 1)]))
    return JacobiParameters(tuple(a), tuple(b))


def _constant_tail(a: float, b: float, z: np.ndarray) -> np.ndarray:
    """Root of t = b/(z - a - t) with Im t <= 0 for Im z > 0."""
    s = np.sqrt((z - a) ** 2 - 4 * b + 0j)
    t1 = ((z - a) - s) / 2
    t2 = ((z - a) + s) / 2
    return np.where(t1.imag <= 0, t1, t2)


def jfraction_evaluate(params: JacobiParameters, z, terminate: bool = True) -> np.ndarray:
    """
    Backward evaluation of the J-fraction at an array of points.

    Unless the law is finitely supported, `terminate` closes the fraction
    with the constant continuation of its last coefficients. That tail is
    exact for laws whose coefficients are eventually constant (semicircles,
    their boolean compressions and boolean powers).
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    a, b = params.a, params.b
    tail = np.zeros_like(zs)
    if terminate and not params.finite and len(a) >= 2:
        tail = _constant_tail(float(a[-1]), float(b[-1]), zs)
    for k in range(len(a) - 1, -1, -1):
        denominator = zs - float(a[k]) - tail
        if np.any(denominator == 0):
            raise PoleError(k)
        tail = float(b[k]) / denominator
    return tail


CauchySource = Union[KSeries, ContinuedFractionSpec, Callable[[np.ndarray], np.ndarray]]


def cauchy_transform(source: CauchySource, z, *, depth: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> np.ndarray:
    """G at an array of points for a K-series, a continued-fraction spec, or a callable."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(source, KSeries):
        return jfraction_evaluate(jacobi_parameters(k_to_moments(source)), zs)
    if isinstance(source, ContinuedFractionSpec):
        k = cf_evaluate_matrix(source.b, zs, depth=max(source.depth, depth), tol=tol, max_depth=max_depth)
        i, j = source.target
        return 1.0 / (zs - k[i, j])
    if callable(source):
        return np.asarray(source(zs), dtype=complex)
    raise InvalidParameterError(f"cannot build a Cauchy transform from {type(source).__name__}")


def density_grid(source: CauchySource, xs, eps: float = DEFAULT_EPS, **kwargs) -> List[Tuple[float, float]]:
    """Stieltjes inversion: density(x) = -Im G(x + i eps) / pi on the grid xs."""
    if eps <= 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    grid = np.asarray(xs, dtype=float)
    if grid.ndim != 1 or not np.all(np.isfinite(grid)):
        raise InvalidParameterError("density grid must be a finite one-dimensional array")
    g = cauchy_transform(source, grid + 1j * eps, **kwargs)
    values = -g.imag / np.pi
    return [(float(x), float(y)) for x, y in zip(grid, values)]


def parse_grid(text: str) -> np.ndarray:
    """'lo:hi:steps' -> numpy.linspace(lo, hi, steps)."""
    try:
        lo, hi, steps = text.split(":")
        lo_f, hi_f, n = float(lo), float(hi), int(steps)
    except ValueError:
        raise InvalidParameterError(f"grid must look like lo:hi:steps, got {text!r}")
    if n < 2 or not hi_f > lo_f:
        raise InvalidParameterError(f"grid needs hi > lo and at least 2 steps, got {text!r}")
    return np.linspace(lo_f, hi_f, n)


def grid_mass(rows: Sequence[Tuple[float, float]]) -> float:
    """Trapezoid integral of an emitted density grid."""
    xs = np.array([x for x, _ in rows], dtype=float)
    ys = np.array([y for _, y in rows], dtype=float)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return float(trapezoid(ys, xs))
