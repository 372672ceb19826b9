"""
Characteristic exponent of TS^p_alpha(R, b) and cumulants recovered from it.

C(z) = i<b, z> + sum over rays of int R(d rho) J(<z, u> rho, rho) with

    J(w, rho) = int_0^inf (e^{iwt} - 1 - iwt / (1 + rho^2 t^2)) t^(-1-alpha) e^(-t^p) dt.

The t-integral is split at 1/|w|. Below it the log variable is used and
sin(wt) - wt switches to its series; above it highly oscillatory pieces go to
QUADPACK's Fourier integrator.
"""

import itertools
import logging
import math
from typing import Sequence, Union

import numpy as np
from scipy import special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError, MomentInfiniteError
from .measure import TSParams
from .moments import MultiIndex, moment_finite
from .quadrature import int1d, int1d_log, times_exp
from .special_fn import KernelParams, kernel_k

log = logging.getLogger(__name__)

FILON_THRESHOLD = 50.0
FD_STEP = 1e-3
RICHARDSON_LEVELS = 3

_SERIES_CUTOFF = 1e-2
# QAWF ignores epsrel and rejects epsabs <= 0
_QAWF_MIN_EPSABS = 1e-14

Vector = Union[float, Sequence[float], np.ndarray]


def _sin_minus_x(x: float) -> float:
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    return math.sin(x) - x


class _RayExponent:
    """J(w, rho) split into real and imaginary parts for fixed (alpha, p)."""

    def __init__(self, alpha: float, p: float, quad: QuadratureOptions, filon_threshold: float):
        self.alpha = alpha
        self.p = p
        self.quad = quad
        self.filon_threshold = filon_threshold
        self.kp = KernelParams(alpha, p)

    def _log_weight(self, t: float) -> float:
        return (-1.0 - self.alpha) * math.log(t) - t ** self.p

    def weight(self, t: float) -> float:
        return math.exp(self._log_weight(t))

    def real(self, w: float) -> float:
        if w == 0.0:
            return 0.0
        aw = abs(w)
        t1 = 1.0 / aw
        near = int1d_log(lambda t: times_exp(-2.0 * math.sin(0.5 * w * t) ** 2, self._log_weight(t)),
                         0.0, t1, self.quad)
        if aw > self.filon_threshold:
            qawf = int1d(self.weight, t1, math.inf, self._qawf_opts(), weight="cos", wvar=aw)
            far = qawf - float(kernel_k(t1, self.kp))
        else:
            far = int1d(lambda t: (math.cos(w * t) - 1.0) * self.weight(t), t1, math.inf, self.quad)
        return near + far

    def imag(self, w: float, rho: float) -> float:
        if w == 0.0:
            return 0.0
        aw = abs(w)
        t1 = 1.0 / aw
        r2 = rho * rho

        def near_integrand(t: float) -> float:
            wt = w * t
            rt2 = r2 * t * t
            return times_exp(_sin_minus_x(wt) + wt * rt2 / (1.0 + rt2), self._log_weight(t))

        near = int1d_log(near_integrand, 0.0, t1, self.quad)
        if aw > self.filon_threshold:
            osc = math.copysign(1.0, w) * int1d(self.weight, t1, math.inf, self._qawf_opts(), weight="sin", wvar=aw)
            comp = int1d(lambda t: w * t / (1.0 + r2 * t * t) * self.weight(t), t1, math.inf, self.quad)
            far = osc - comp
        else:
            far = int1d(lambda t: (math.sin(w * t) - w * t / (1.0 + r2 * t * t)) * self.weight(t),
                        t1, math.inf, self.quad)
        return near + far

    def _qawf_opts(self) -> QuadratureOptions:
        return QuadratureOptions(max(self.quad.epsabs, _QAWF_MIN_EPSABS), self.quad.epsrel, self.quad.limit)


def _as_vector(params: TSParams, z: Vector) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(z, dtype=float))
    if vec.shape != (params.dim,):
        raise DomainError(f"z must have length {params.dim}, got shape {vec.shape}")
    return vec


def evaluate(params: TSParams, z: Vector, quad: QuadratureOptions = DEFAULT_QUAD,
             filon_threshold: float = FILON_THRESHOLD, check: bool = True) -> complex:
    """Characteristic exponent C(z), so that E exp(i<z, X>) = exp(C(z))."""
    if check:
        params.ensure_valid(quad)
    zv = _as_vector(params, z)
    ray_exp = _RayExponent(params.alpha, params.p, quad, filon_threshold)

    re = 0.0
    im = float(np.dot(params.shift, zv))
    for ray in params.measure.rays:
        proj = float(np.dot(zv, ray.vector))
        if proj == 0.0:
            continue
        re += ray.profile.integrate(lambda rho: ray_exp.real(proj * rho), quad=quad)
        im += ray.profile.integrate(lambda rho: ray_exp.imag(proj * rho, rho), quad=quad)
    return complex(re, im)


def evaluate_grid(params: TSParams, z_grid: Sequence[Vector], quad: QuadratureOptions = DEFAULT_QUAD,
                  filon_threshold: float = FILON_THRESHOLD) -> np.ndarray:
    params.ensure_valid(quad)
    return np.array([evaluate(params, z, quad, filon_threshold, check=False) for z in z_grid], dtype=complex)


def _difference_stencil(order: int):
    """Offsets (in units of h) and weights of the central difference for a derivative of ``order``."""
    return [((order / 2.0 - m), (-1) ** m * special.comb(order, m, exact=True)) for m in range(order + 1)]


def _mixed_difference(params: TSParams, k: MultiIndex, h: float, quad: QuadratureOptions) -> complex:
    stencils = [_difference_stencil(kj) for kj in k.k]
    total = 0j
    for combo in itertools.product(*stencils):
        offsets = np.array([off for off, _ in combo]) * h
        weight = float(np.prod([w for _, w in combo]))
        total += weight * evaluate(params, offsets, quad, check=False)
    return total / h ** k.order


def cumulant_from_cf(params: TSParams, k: MultiIndex, h: float = FD_STEP, levels: int = RICHARDSON_LEVELS,
                     quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """
    c_k = Re((-i)^q d^k C(0)) by central differences with Richardson extrapolation.

    Steps h, h/2, ... h/2^(levels-1); each level removes the next even power of h.
    """
    if k.dim != params.dim:
        raise DomainError(f"multi-index has length {k.dim}, parameters have dimension {params.dim}")
    if k.order < 1:
        raise DomainError("cumulants need order >= 1")
    if not moment_finite(params, k, quad):
        raise MomentInfiniteError(f"moment of order {k.order} is infinite")
    params.ensure_valid(quad)
    tight = QuadratureOptions(0.0, quad.epsrel, quad.limit)

    table = [_mixed_difference(params, k, h / 2 ** j, tight) for j in range(levels)]
    for level in range(1, levels):
        factor = 4.0 ** level
        table = [(factor * table[j + 1] - table[j]) / (factor - 1.0) for j in range(len(table) - 1)]
    deriv = table[0]
    return float(((-1j) ** k.order * deriv).real)


__all__ = [
    "FILON_THRESHOLD",
    "evaluate",
    "evaluate_grid",
    "cumulant_from_cf",
]
