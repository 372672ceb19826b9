"""
The Levy measure M induced by (alpha, p, R).

Along a ray with radial profile R_u, M(|x| > r) = int k(r/rho) R_u(d rho), where
k is the tempering kernel from ``special_fn``. Cones are lists of ray indices.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError, UnknownDirectionError
from .measure import SpectralForm, TSParams, proper_integral, tempering_function
from .profiles import AtomProfile, ParetoProfile, RadialProfile
from .quadrature import int1d_log, times_exp
from .special_fn import KernelParams, gamma_lower, kernel_k

log = logging.getLogger(__name__)

Cone = Optional[Sequence[int]]


def _rays_in(params: TSParams, cone: Cone) -> List[int]:
    n = len(params.measure.rays)
    if cone is None:
        return list(range(n))
    idx = [int(i) for i in cone]
    for i in idx:
        if not 0 <= i < n:
            raise UnknownDirectionError(f"cone refers to ray {i}, measure has {n} rays")
    return idx


def ray_tail(profile: RadialProfile, r: float, kp: KernelParams,
             quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """M(|x| > r) along one ray; ``math.inf`` when the mixture diverges."""
    if profile.is_zero():
        return 0.0
    if isinstance(profile, AtomProfile):
        return profile.w * float(kernel_k(r / profile.r0, kp))
    if isinstance(profile, ParetoProfile):
        rho, c, r0 = profile.rho, profile.c, profile.r0
        if rho <= kp.alpha:
            return math.inf
        a = (rho - kp.alpha) / kp.p
        if r0 == 0.0:
            return c * r ** (-rho) * math.gamma(a) / kp.p
        ratio = r / r0
        return c * (r0 ** (-rho) * float(kernel_k(ratio, kp))
                    + r ** (-rho) * float(gamma_lower(a, ratio ** kp.p)) / kp.p)
    return profile.integrate(lambda rho: float(kernel_k(r / rho, kp)), quad=quad)


def tail(params: TSParams, r: float, cone: Cone = None, quad: QuadratureOptions = DEFAULT_QUAD,
         check: bool = True) -> float:
    """
    M_D(r) = M(|x| > r, x/|x| in D) for the rays listed in ``cone`` (all rays if None).

    Atoms and pareto profiles are evaluated in closed form, other kinds by quadrature.
    """
    if not r > 0:
        raise DomainError(f"tail needs r > 0, got {r}")
    if check:
        params.ensure_valid(quad)
    kp = params.kernel
    rays = params.measure.rays
    return float(sum(ray_tail(rays[i].profile, r, kp, quad) for i in _rays_in(params, cone)))


def _kernel_by_quadrature(s: float, kp: KernelParams, substituted: bool, quad: QuadratureOptions) -> float:
    if substituted:
        # u = t^p
        a = kp.gamma_parameter
        return int1d_log(lambda u: times_exp(1.0 / kp.p, (a - 1.0) * math.log(u) - u), s ** kp.p, math.inf, quad)
    return int1d_log(lambda t: times_exp(1.0, (-kp.alpha - 1.0) * math.log(t) - t ** kp.p), s, math.inf, quad)


def tail_by_quadrature(params: TSParams, r: float, cone: Cone = None, substituted: bool = False,
                       quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """Independent route to M_D(r): the kernel is integrated directly instead of via incomplete gamma."""
    kp = params.kernel
    rays = params.measure.rays
    total = 0.0
    for i in _rays_in(params, cone):
        total += rays[i].profile.integrate(lambda rho: _kernel_by_quadrature(r / rho, kp, substituted, quad),
                                           quad=quad)
    return total


def tail_from_spectral(form: SpectralForm, r: float, u, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """M(|x| > r) along u through sigma(u) int_r^inf q(t^p, u) t^(-alpha-1) dt."""
    idx = form.index_of(u)
    alpha = form.alpha

    def integrand(t: float) -> float:
        return tempering_function(form, t, idx, quad=quad) * t ** (-alpha - 1.0)

    return form.sigma[idx] * int1d_log(integrand, r, math.inf, quad)


@dataclass
class TailFunction:
    """M_D as a callable; evaluation over a grid can be spread over threads."""
    params: TSParams
    cone: Cone = None
    quad: QuadratureOptions = DEFAULT_QUAD
    max_workers: int = 1

    def __post_init__(self):
        self.params.ensure_valid(self.quad)
        _rays_in(self.params, self.cone)

    def __call__(self, r: float) -> float:
        return tail(self.params, r, self.cone, self.quad, check=False)

    def evaluate(self, grid: Sequence[float]) -> np.ndarray:
        radii = [float(r) for r in grid]
        if self.max_workers > 1 and len(radii) > 1:
            log.debug("Evaluating tail on %d radii with %d workers", len(radii), self.max_workers)
            with ThreadPoolExecutor(max_workers=self.max_workers) as ex:
                values = list(ex.map(self, radii))
        else:
            values = [self(r) for r in radii]
        return np.asarray(values, dtype=float)

    def to_frame(self, grid: Sequence[float]) -> pd.DataFrame:
        radii = np.asarray(grid, dtype=float)
        return pd.DataFrame({"r": radii, "tail": self.evaluate(radii)})


def ball_mass(params: TSParams, s: float, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """M(0 < |x| < s); ``math.inf`` whenever alpha >= 0 and R != 0."""
    if not s > 0:
        raise DomainError(f"ball_mass needs s > 0, got {s}")
    params.ensure_valid(quad)
    if params.measure.is_zero():
        return 0.0
    alpha, p = params.alpha, params.p
    if alpha >= 0:
        return math.inf
    a = -alpha / p

    def inner(rho: float) -> float:
        return float(gamma_lower(a, (s / rho) ** p)) / p

    return float(sum(ray.profile.integrate(inner, quad=quad) for ray in params.measure.rays))


@dataclass
class ScaledTailLimits:
    """Limits of s^alpha M(|x| > s) at 0 and inf, plus numeric evaluations near 0."""
    limit_at_zero: float
    limit_at_inf: float
    numeric: Dict[float, float]


def scaled_tail_limits(params: TSParams, points: Sequence[float] = (1e-3, 1e-4),
                       quad: QuadratureOptions = DEFAULT_QUAD) -> ScaledTailLimits:
    params.ensure_valid(quad)
    alpha = params.alpha
    if params.measure.is_zero():
        at_zero = 0.0
    elif alpha > 0:
        at_zero = proper_integral(alpha, params.measure, quad) / alpha
    else:
        at_zero = math.inf
    numeric = {float(s): float(s ** alpha * tail(params, s, quad=quad, check=False)) for s in points}
    return ScaledTailLimits(limit_at_zero=at_zero, limit_at_inf=0.0, numeric=numeric)


def is_selfdecomposable(params: TSParams) -> Optional[bool]:
    """True for alpha in [0, 2); None (unknown) for alpha < 0."""
    if 0 <= params.alpha < 2:
        return True
    return None


def radial_moment(params: TSParams, f: Callable[[float], float], lo: float = 0.0, hi: float = math.inf,
                  cone: Cone = None, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """int over lo < |x| <= hi of f(|x|) M(dx), summed over the rays in ``cone``."""
    alpha, p = params.alpha, params.p
    rays = params.measure.rays

    def inner(rho: float) -> float:
        def integrand(t: float) -> float:
            return times_exp(f(t * rho), (-alpha - 1.0) * math.log(t) - t ** p)
        return int1d_log(integrand, lo / rho, hi / rho, quad)

    return float(sum(rays[i].profile.integrate(inner, quad=quad) for i in _rays_in(params, cone)))


def ray_small_jump_moment(profile: RadialProfile, eps: float, kp: KernelParams,
                          quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """int over |x| <= eps of |x|^2 M(dx) along one ray."""
    a = (2.0 - kp.alpha) / kp.p

    def inner(rho: float) -> float:
        return rho * rho * float(gamma_lower(a, (eps / rho) ** kp.p)) / kp.p

    return profile.integrate(inner, quad=quad)


def levy_integrability(params: TSParams, quad: QuadratureOptions = DEFAULT_QUAD) -> Tuple[float, float]:
    """(int_{|x|<=1} |x|^2 M(dx), M(|x| > 1)); both finite for a Levy measure."""
    kp = params.kernel
    near = float(sum(ray_small_jump_moment(ray.profile, 1.0, kp, quad) for ray in params.measure.rays))
    return near, tail(params, 1.0, quad=quad, check=False)


def small_scale_index(params: TSParams, s_grid: Optional[Sequence[float]] = None,
                      quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """Fitted slope of log M(|x| > s) against log s for small s; close to -alpha for proper R."""
    grid = np.geomspace(1e-6, 1e-4, 9) if s_grid is None else np.asarray(s_grid, dtype=float)
    values = np.array([tail(params, float(s), quad=quad, check=False) for s in grid])
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise DomainError("tail must be finite and positive on the fitting grid")
    slope, _ = np.polyfit(np.log(grid), np.log(values), 1)
    return float(slope)


__all__ = [
    "ray_tail",
    "tail",
    "tail_by_quadrature",
    "tail_from_spectral",
    "TailFunction",
    "ball_mass",
    "ScaledTailLimits",
    "scaled_tail_limits",
    "is_selfdecomposable",
    "radial_moment",
    "ray_small_jump_moment",
    "levy_integrability",
    "small_scale_index",
]
