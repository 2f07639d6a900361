"""Closed-form constants of conformal geometry and product bounds.

Everything here is a pure function of a few integers and reals.  Quantities
that grow factorially with the dimension (the stable invariant of spheres)
are carried as :class:`LogValue` so that dimensions in the thousands do not
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DimensionError, YamabeError

__all__ = [
    "LogValue",
    "conformal_exponent",
    "critical_exponent",
    "log_gamma",
    "sphere_volume",
    "sphere_yamabe",
    "nu_invariant",
    "epsilon_defect",
    "naive_product",
    "naive_infimum",
    "product_lower_bound",
    "sigma_product_bound",
    "lambda_surgery",
    "lambda_min",
    "lambda_argmin",
    "big_sigma",
    "sigma_sphere",
    "stable_ratio_limit",
    "sigma_sphere_asymptote",
    "stable_bounds",
    "shift_stable_bounds",
    "einstein_hilbert_constant",
]

# largest Gamma argument evaluated through exact factorials
EXACT_GAMMA_MAX = 50

LOG_PI_E_HALF = math.log(math.pi * math.e / 2.0)


@dataclass(frozen=True, order=True)
class LogValue:
    """A strictly positive real stored as its natural logarithm."""

    log: float

    def exp(self) -> float:
        """Linear-scale value; ``inf`` if it does not fit in a double."""
        try:
            return math.exp(self.log)
        except OverflowError:
            return math.inf

    def __mul__(self, other):
        if isinstance(other, LogValue):
            return LogValue(self.log + other.log)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, LogValue):
            return LogValue(self.log - other.log)
        return NotImplemented

    def __pow__(self, k):
        return LogValue(self.log * k)

    @classmethod
    def of(cls, x: float) -> "LogValue":
        if not x > 0:
            raise YamabeError(f"LogValue needs a positive number, got {x}")
        return cls(math.log(x))


def _check_dim(m, least=3, name="m"):
    if int(m) != m:
        raise DimensionError(f"{name} must be an integer, got {m}")
    if m < least:
        raise DimensionError(f"{name} must be >= {least}, got {m}")
    return int(m)


def _check_nonneg(x, name):
    if not x >= 0:
        raise YamabeError(f"{name} must be >= 0, got {x}")
    return float(x)


def conformal_exponent(m: int) -> float:
    """a_m = 4(m-1)/(m-2), the constant in front of the Dirichlet energy."""
    m = _check_dim(m)
    return float(Fraction(4 * (m - 1), m - 2))


def critical_exponent(m: int) -> float:
    """p_m = 2m/(m-2), the critical Sobolev exponent."""
    m = _check_dim(m)
    return float(Fraction(2 * m, m - 2))


def _exact_gamma(twice_z: int) -> tuple[Fraction, bool]:
    """Gamma(twice_z / 2) as ``(q, half)`` meaning q * sqrt(pi)**half."""
    if twice_z % 2 == 0:
        return Fraction(math.factorial(twice_z // 2 - 1)), False
    # Gamma(n + 1/2) = (2n)! / (4^n n!) sqrt(pi)
    n = twice_z // 2
    return Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), True


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def log_gamma(z: float) -> float:
    """log Gamma(z) for z > 0.

    Integers and half-integers up to 50 go through exact factorials; any
    other argument falls back to ``math.lgamma``.
    """
    if not z > 0:
        raise YamabeError(f"log_gamma needs z > 0, got {z}")
    twice = 2 * z
    if twice == int(twice) and z <= EXACT_GAMMA_MAX:
        q, half = _exact_gamma(int(twice))
        return _log_fraction(q) + (0.5 * math.log(math.pi) if half else 0.0)
    return math.lgamma(z)


def _log_sphere_volume(m: int) -> float:
    return math.log(2.0) + 0.5 * (m + 1) * math.log(math.pi) - log_gamma(0.5 * (m + 1))


def sphere_volume(m: int) -> float:
    """Volume omega_m of the unit round sphere S^m."""
    m = _check_dim(m, least=1)
    return math.exp(_log_sphere_volume(m))


@lru_cache(maxsize=None)
def sphere_yamabe(m: int) -> float:
    """mu(S^m) = m(m-1) omega_m^(2/m)."""
    m = _check_dim(m)
    return m * (m - 1) * math.exp(2.0 * _log_sphere_volume(m) / m)


def nu_invariant(mu: float, m: int) -> float:
    """(mu / (m a_m))^m, defined for mu >= 0."""
    m = _check_dim(m)
    mu = _check_nonneg(mu, "mu")
    return (mu / (m * conformal_exponent(m))) ** m


def epsilon_defect(v: int, w: int) -> float:
    """Factor by which the naive product infimum overestimates the bound."""
    v = _check_dim(v, name="v")
    w = _check_dim(w, name="w")
    m = v + w
    return conformal_exponent(m) / (
        conformal_exponent(v) ** (v / m) * conformal_exponent(w) ** (w / m)
    )


def naive_product(mu_v, vol_v, mu_w, vol_w, v, w):
    """Yamabe constant of V x W predicted if g + h were a Yamabe metric.

    ``vol_w`` is the volume of W in the (possibly rescaled) metric actually
    used on the second factor.
    """
    v = _check_dim(v, least=1, name="v")
    w = _check_dim(w, least=1, name="w")
    if not (vol_v > 0 and vol_w > 0):
        raise YamabeError("volumes must be positive")
    return (mu_v / vol_v ** (2.0 / v) + mu_w / vol_w ** (2.0 / w)) * (
        vol_v * vol_w
    ) ** (2.0 / (v + w))


def naive_infimum(mu_v, mu_w, v, w):
    """Infimum over the scale of W of :func:`naive_product`."""
    v = _check_dim(v, least=1, name="v")
    w = _check_dim(w, least=1, name="w")
    mu_v = _check_nonneg(mu_v, "mu_v")
    mu_w = _check_nonneg(mu_w, "mu_w")
    m = v + w
    return m * (mu_v / v) ** (v / m) * (mu_w / w) ** (w / m)


def product_lower_bound(mu_v, mu_w, v, w):
    """Lower bound for mu(V x W, g + h) from the Yamabe constants of the factors.

    Valid when both constants are nonnegative and the curvature hypothesis
    (see :func:`yamabe.functional.check_assumption`) holds.
    """
    v = _check_dim(v, name="v")
    w = _check_dim(w, name="w")
    mu_v = _check_nonneg(mu_v, "mu_v")
    mu_w = _check_nonneg(mu_w, "mu_w")
    if (w, mu_w) < (v, mu_v):
        # canonical factor order makes swapping V and W bit-identical
        v, w, mu_v, mu_w = w, v, mu_w, mu_v
    m = v + w
    coeff = m * conformal_exponent(m) / (
        (v * conformal_exponent(v)) ** (v / m) * (w * conformal_exponent(w)) ** (w / m)
    )
    return coeff * mu_v ** (v / m) * mu_w ** (w / m)


def sigma_product_bound(sigma_v, v, w):
    """Lower bound for sigma(V x W) given sigma(V) >= 0."""
    return product_lower_bound(sigma_v, sphere_yamabe(w), v, w)


def lambda_surgery(m: int, k: int) -> float:
    """Surgery constant Lambda_{m,k} for 2 <= k <= m - 4."""
    m = _check_dim(m, least=6)
    if int(k) != k or not 2 <= k <= m - 4:
        raise YamabeError(f"k must satisfy 2 <= k <= m-4 = {m - 4}, got {k}")
    k = int(k)
    return product_lower_bound(sphere_yamabe(k + 1), sphere_yamabe(m - k - 1), k + 1, m - k - 1)


def lambda_argmin(m: int) -> int:
    """The surgery dimension k attaining :func:`lambda_min`."""
    m = _check_dim(m, least=6)
    return min(range(2, m - 3), key=lambda k: (lambda_surgery(m, k), k))


def lambda_min(m: int) -> float:
    """Minimum of Lambda_{m,k} over 2 <= k <= m - 4 (k = 0 contributes infinity)."""
    return lambda_surgery(m, lambda_argmin(m))


def big_sigma(sigma: float, m: int) -> float:
    """(sigma / (m a_m))^m; the same map as :func:`nu_invariant`."""
    return nu_invariant(sigma, m)


def sigma_sphere(v: int) -> LogValue:
    """Sigma(S^v) = 4 pi (pi (v-2)/4)^v / Gamma((v+1)/2)^2, in log space."""
    v = _check_dim(v, name="v")
    return LogValue(
        math.log(4.0 * math.pi)
        + v * math.log(math.pi * (v - 2) / 4.0)
        - 2.0 * log_gamma(0.5 * (v + 1))
    )


def stable_ratio_limit(v: int) -> float:
    """(pi e / 2)^v, the limit of Sigma(S^(v+n)) / Sigma(S^n) as n grows."""
    v = _check_dim(v, least=1, name="v")
    return math.exp(v * LOG_PI_E_HALF)


def sigma_sphere_asymptote(v: int) -> LogValue:
    """Leading Stirling term 2 e^-2 (pi e / 2)^v of Sigma(S^v)."""
    v = _check_dim(v, name="v")
    return LogValue(math.log(2.0) - 2.0 + v * LOG_PI_E_HALF)


def stable_bounds(big_sigma_v: float, v: int) -> tuple[float, float]:
    """(lower, upper) bracket for the stable invariant of a v-manifold.

    The lower end is Sigma(V) itself; the upper end is (pi e / 2)^v.  The
    input is not checked against the upper end.
    """
    big_sigma_v = _check_nonneg(big_sigma_v, "Sigma(V)")
    return big_sigma_v, stable_ratio_limit(v)


def shift_stable_bounds(bounds, b: int, i: int):
    """Bounds for V x B^i from bounds for V, B Ricci-flat of dimension b."""
    b = _check_dim(b, least=1, name="b")
    i = _check_dim(i, least=0, name="i")
    factor = math.exp(b * i * LOG_PI_E_HALF)
    lo, hi = bounds
    return lo * factor, hi * factor


def einstein_hilbert_constant(s: float, vol: float, m: int) -> float:
    """Normalized total scalar curvature s vol^(2/m) of a constant-s metric."""
    m = _check_dim(m, least=1)
    if not vol > 0:
        raise YamabeError(f"volume must be positive, got {vol}")
    return s * vol ** (2.0 / m)
