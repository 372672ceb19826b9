"""
Special functions for p-tempered alpha-stable laws.

Upper incomplete gamma for any real first parameter, the tempering kernel
k(s) = int_s^inf t^(-alpha-1) exp(-t^p) dt, its Mellin transform, and the
densities of positive r-stable laws with Laplace transform exp(-t^r).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate, special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

EXPLICIT_HALF = "explicit-half"
ZOLOTAREV = "zolotarev-numeric"

_FPMIN = 1e-300
_CF_EPS = 1e-16
_CF_MAX_ITER = 1000
# parameters whose lift into (0, 1] lands this close to zero are integrated directly
_NEAR_ZERO_LIFT = 1e-6
_LOG_TINY = math.log(1e-300)
# beyond this the Zolotarev integrand underflows for every u
_LOG_Y_MAX = math.log(1e6)


@dataclass(frozen=True)
class KernelParams:
    """Stability index and tempering exponent shared by every kernel evaluation."""
    alpha: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha < 2):
            raise DomainError(f"alpha must be finite and < 2, got {self.alpha}")
        if not (math.isfinite(self.p) and self.p > 0):
            raise DomainError(f"p must be finite and > 0, got {self.p}")

    @property
    def gamma_parameter(self) -> float:
        """First parameter -alpha/p of the incomplete gamma behind k."""
        return -self.alpha / self.p


@dataclass(frozen=True)
class StableDensityOrder:
    """Order r of a positive stable law and how its density is evaluated."""
    r: float
    method: Optional[str] = None

    def __post_init__(self):
        if not (0.0 < self.r < 1.0):
            raise DomainError(f"stable order must lie in (0, 1), got {self.r}")
        method = self.method
        if method is None:
            method = EXPLICIT_HALF if self.r == 0.5 else ZOLOTAREV
            object.__setattr__(self, "method", method)
        if method not in (EXPLICIT_HALF, ZOLOTAREV):
            raise DomainError(f"unknown stable density method {method!r}")
        if method == EXPLICIT_HALF and self.r != 0.5:
            raise DomainError("explicit-half is only available for r = 1/2")

    @property
    def exact(self) -> bool:
        return self.method == EXPLICIT_HALF


def _as_output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values.reshape(-1)[0]) if scalar else values


def _upper_cf(a: float, x: np.ndarray) -> np.ndarray:
    """Modified Lentz evaluation of the Legendre continued fraction for Gamma(a, x)."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _CF_MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _CF_EPS):
            break
    else:
        log.warning("Continued fraction for Gamma(%g, x) hit %d iterations", a, _CF_MAX_ITER)
    return np.exp(-x + a * np.log(x)) * h


def _upper_recurrence(a: float, x: np.ndarray) -> np.ndarray:
    """Lift a <= 0 into (0, 1] (or onto 0 for integers) and recurse back down."""
    if a == round(a):
        n = int(-round(a))
        g = special.exp1(x)
    else:
        n = int(math.floor(-a)) + 1
        base = a + n
        g = special.gamma(base) * special.gammaincc(base, x)
    for m in range(n - 1, -1, -1):
        s = a + m
        g = (g - np.power(x, s) * np.exp(-x)) / s
    return g


def _upper_quad(a: float, x: float, quad: QuadratureOptions) -> float:
    # t = e^u keeps the integrand bounded for every real a
    val, _ = integrate.quad(
        lambda u: math.exp(a * u - math.exp(u)) if u < 700 else 0.0,
        math.log(x), np.inf,
        epsabs=0.0, epsrel=quad.epsrel, limit=quad.limit,
    )
    return val


def gamma_upper(a: float, x: ArrayLike, quad: QuadratureOptions = DEFAULT_QUAD) -> ArrayLike:
    """
    Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt for any real a.

    Arrays of ``x`` are evaluated elementwise. For a > 0 scipy's regularised
    function is rescaled; for a <= 0 the continued fraction handles x >= 1 and
    the downward recurrence Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a handles
    x < 1.
    """
    a = float(a)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs > 0)):
        raise DomainError("gamma_upper requires x > 0")

    frac = a - math.floor(a)
    near_zero_lift = a < 1.0 and 0.0 < frac < _NEAR_ZERO_LIFT
    out = np.empty_like(xs)

    if a > 0 and not near_zero_lift:
        if a < 150:
            out[:] = special.gamma(a) * special.gammaincc(a, xs)
        else:
            with np.errstate(divide="ignore"):
                out[:] = np.exp(special.gammaln(a) + np.log(special.gammaincc(a, xs)))
        return _as_output(out, scalar)

    large = xs >= 1.0
    if np.any(large):
        out[large] = _upper_cf(a, xs[large])
    small = ~large
    if np.any(small):
        if near_zero_lift:
            log.debug("Gamma(%g, x): parameter within %g of an integer, using quadrature", a, frac)
            out[small] = [_upper_quad(a, float(v), quad) for v in xs[small]]
        else:
            out[small] = _upper_recurrence(a, xs[small])
    return _as_output(out, scalar)


def gamma_lower(a: float, x: ArrayLike) -> ArrayLike:
    """Lower incomplete gamma gamma(a, x) for a > 0 and x >= 0."""
    if not a > 0:
        raise DomainError(f"gamma_lower requires a > 0, got {a}")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise DomainError("gamma_lower requires x >= 0")
    out = special.gamma(a) * special.gammainc(a, xs)
    return _as_output(out, scalar)


def _k_at_zero(kp: KernelParams) -> float:
    return math.inf if kp.alpha >= 0 else float(special.gamma(kp.gamma_parameter)) / kp.p


def _k_tiny(s: np.ndarray, kp: KernelParams) -> np.ndarray:
    """Leading behaviour of k where s^p underflows."""
    logs = np.log(s)
    if kp.alpha > 0:
        with np.errstate(over="ignore"):
            return np.exp(-kp.alpha * logs) / kp.alpha
    if kp.alpha == 0:
        return (-np.euler_gamma - kp.p * logs) / kp.p
    return np.full_like(s, _k_at_zero(kp))


def kernel_k(s: ArrayLike, kp: KernelParams) -> ArrayLike:
    """
    Tempering kernel k(s) = int_s^inf t^(-alpha-1) e^(-t^p) dt = Gamma(-alpha/p, s^p) / p.

    k(0) is ``math.inf`` when alpha >= 0 and Gamma(-alpha/p) / p otherwise.
    """
    scalar = np.ndim(s) == 0
    ss = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(ss < 0) or np.any(np.isnan(ss)):
        raise DomainError("kernel_k requires s >= 0")

    out = np.zeros_like(ss)
    zero = ss == 0
    if np.any(zero):
        out[zero] = _k_at_zero(kp)
    mid = (ss > 0) & np.isfinite(ss)
    if np.any(mid):
        with np.errstate(over="ignore"):
            xs = ss[mid] ** kp.p
        vals = np.zeros_like(xs)
        live = np.isfinite(xs) & (xs > 0)
        if np.any(live):
            vals[live] = gamma_upper(kp.gamma_parameter, xs[live]) / kp.p
        tiny = xs == 0
        if np.any(tiny):
            vals[tiny] = _k_tiny(ss[mid][tiny], kp)
        out[mid] = vals
    return _as_output(out, scalar)


def kernel_mellin(z: complex, kp: KernelParams) -> complex:
    """Mellin transform of u -> k(1/u): -Gamma((-z - alpha)/p) / (p z), for Re z < -(alpha v 0)."""
    z = complex(z)
    bound = -max(kp.alpha, 0.0)
    if not z.real < bound:
        raise DomainError(f"kernel_mellin requires Re z < {bound}, got {z}")
    return complex(-special.gamma((-z - kp.alpha) / kp.p) / (kp.p * z))


def _kanter_a(u: ArrayLike, r: float) -> ArrayLike:
    return (
        np.sin(r * u) ** (r / (1.0 - r))
        * np.sin((1.0 - r) * u)
        / np.sin(u) ** (1.0 / (1.0 - r))
    )


def _zolotarev_density(s: float, r: float, quad: QuadratureOptions) -> float:
    log_y = -r / (1.0 - r) * math.log(s)
    if log_y > _LOG_Y_MAX:
        return 0.0
    y = math.exp(log_y)

    def integrand(u: float) -> float:
        a_u = float(_kanter_a(u, r))
        if not a_u > 0:
            return 0.0
        expo = math.log(a_u) - a_u * y
        return math.exp(expo) if expo > _LOG_TINY else 0.0

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=quad.epsrel, limit=quad.limit)
    return r / ((1.0 - r) * math.pi) * val * math.exp(log_y / r)


def stable_density(s: ArrayLike, order: StableDensityOrder, quad: QuadratureOptions = DEFAULT_QUAD) -> ArrayLike:
    """Density of the positive r-stable law with Laplace transform exp(-t^r)."""
    scalar = np.ndim(s) == 0
    ss = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(~(ss > 0)):
        raise DomainError("stable_density requires s > 0")
    if order.exact:
        out = np.exp(-1.0 / (4.0 * ss) - 1.5 * np.log(ss)) / (2.0 * math.sqrt(math.pi))
    else:
        out = np.array([_zolotarev_density(float(v), order.r, quad) if np.isfinite(v) else 0.0 for v in ss])
    return _as_output(out, scalar)


def sample_positive_stable(r: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw positive r-stable variates with Kanter's representation (A(U)/E)^((1-r)/r)."""
    if not (0.0 < r < 1.0):
        raise DomainError(f"stable order must lie in (0, 1), got {r}")
    u = rng.uniform(0.0, math.pi, size)
    e = rng.standard_exponential(size)
    return (_kanter_a(u, r) / e) ** ((1.0 - r) / r)


__all__ = [
    "KernelParams",
    "StableDensityOrder",
    "EXPLICIT_HALF",
    "ZOLOTAREV",
    "gamma_upper",
    "gamma_lower",
    "kernel_k",
    "kernel_mellin",
    "stable_density",
    "sample_positive_stable",
]
