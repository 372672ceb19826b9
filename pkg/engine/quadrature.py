"""Thin layer over QUADPACK used by every radial integral in the engine."""

import logging
import math
import warnings
from typing import Callable

from scipy import integrate
from scipy.integrate import IntegrationWarning

from .config import DEFAULT_QUAD, QuadratureOptions

log = logging.getLogger(__name__)


def int1d(func: Callable[[float], float], lo: float, hi: float,
          opts: QuadratureOptions = DEFAULT_QUAD, **kwargs) -> float:
    """
    Integrate ``func`` over (lo, hi); either bound may be infinite.

    Extra keyword arguments (``weight``, ``wvar``, ``points``) go straight to
    ``scipy.integrate.quad``. QUADPACK accuracy warnings are logged, not raised.
    """
    if hi <= lo:
        return 0.0
    if math.isinf(lo) and math.isinf(hi) and "weight" not in kwargs:
        return int1d(func, lo, 0.0, opts, **kwargs) + int1d(func, 0.0, hi, opts, **kwargs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        val, err = integrate.quad(
            func, lo, hi, epsabs=opts.epsabs, epsrel=opts.epsrel, limit=opts.limit, **kwargs
        )
    for w in caught:
        log.debug("quad(%g, %g): %s (value=%g, err=%g)", lo, hi, str(w.message).splitlines()[0], val, err)
    return float(val)


def times_exp(value: float, log_weight: float) -> float:
    """value * exp(log_weight) without overflowing when value is tiny."""
    if value == 0.0:
        return 0.0
    if log_weight < 700.0:
        return value * math.exp(log_weight)
    return math.copysign(math.exp(min(math.log(abs(value)) + log_weight, 709.0)), value)


def int1d_log(func: Callable[[float], float], lo: float, hi: float,
              opts: QuadratureOptions = DEFAULT_QUAD) -> float:
    """Integrate ``func`` over (lo, hi) in the variable y = log r; needs 0 <= lo < hi <= inf."""
    if hi <= lo:
        return 0.0
    y_lo = math.log(lo) if lo > 0 else -math.inf
    y_hi = math.log(hi) if math.isfinite(hi) else math.inf

    def integrand(y: float) -> float:
        if y > 709.0:
            return 0.0
        r = math.exp(y)
        return func(r) * r if r > 0 else 0.0

    if math.isinf(y_lo) and math.isinf(y_hi):
        return int1d(integrand, y_lo, 0.0, opts) + int1d(integrand, 0.0, y_hi, opts)
    return int1d(integrand, y_lo, y_hi, opts)


__all__ = ["int1d", "int1d_log", "times_exp"]
