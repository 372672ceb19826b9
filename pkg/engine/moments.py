"""
Cumulants, moment finiteness and exponential moment criteria.

Moments of order q >= alpha are decided by the behaviour of R beyond |x| = 1;
cumulants of order >= 2 are a gamma factor times a polynomial moment of R.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple, Union

import numpy as np
from scipy import special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import (
    DomainError,
    MomentInfiniteError,
    ParameterMismatchError,
    UnsupportedParameterError,
)
from .measure import TSParams
from .profiles import AtomProfile, RadialProfile
from .quadrature import int1d_log, times_exp

log = logging.getLogger(__name__)

# atoms closer than this (relative) to the critical radius count as sitting on it
EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class MultiIndex:
    """Exponents k_1..k_d of a mixed moment or cumulant."""
    k: Tuple[int, ...]

    def __post_init__(self):
        ks = tuple(int(v) for v in self.k)
        if any(v < 0 for v in ks) or any(int(v) != v for v in self.k):
            raise DomainError(f"multi-index entries must be non-negative integers, got {self.k}")
        object.__setattr__(self, "k", ks)

    @classmethod
    def unit(cls, dim: int, i: int, order: int = 1) -> "MultiIndex":
        ks = [0] * dim
        ks[i] = order
        return cls(tuple(ks))

    @property
    def order(self) -> int:
        return sum(self.k)

    @property
    def dim(self) -> int:
        return len(self.k)

    def monomial(self, direction: Iterable[float]) -> float:
        """prod u_j^k_j for a unit direction u."""
        return float(np.prod([u ** kj for u, kj in zip(direction, self.k)]))


Order = Union[float, MultiIndex]


def _check_index(params: TSParams, k: MultiIndex):
    if k.dim != params.dim:
        raise DomainError(f"multi-index has length {k.dim}, parameters have dimension {params.dim}")


def _ray_moment_finite(profile: RadialProfile, q: float, alpha: float, quad: QuadratureOptions) -> bool:
    if q == alpha:
        return math.isfinite(profile.log_power_integral(alpha, 1.0, math.inf, quad))
    return math.isfinite(profile.power_integral(q, 1.0, math.inf, quad))


def moment_finite(params: TSParams, order: Order, quad: QuadratureOptions = DEFAULT_QUAD) -> bool:
    """
    Whether E|X|^q (float order) or the mixed moment E prod X_j^k_j (MultiIndex) is finite.

    Orders below alpha are always finite; at q = alpha the log criterion applies,
    above it the tail integral of |x|^q against R. Mixed moments skip rays along
    which the monomial vanishes.
    """
    if isinstance(order, MultiIndex):
        _check_index(params, order)
        q = float(order.order)
    else:
        q = float(order)
        if q < 0:
            raise DomainError(f"moment order must be >= 0, got {q}")
    if q == 0 or q < params.alpha:
        return True
    for ray in params.measure.rays:
        if isinstance(order, MultiIndex) and order.monomial(ray.direction) == 0.0:
            continue
        if not _ray_moment_finite(ray.profile, q, params.alpha, quad):
            return False
    return True


def _mean_inner(rho: float, alpha: float, p: float, quad: QuadratureOptions) -> float:
    r2 = rho * rho

    def integrand(t: float) -> float:
        return times_exp(1.0 / (1.0 + r2 * t * t), (2.0 - alpha) * math.log(t) - t ** p)

    return rho ** 3 * int1d_log(integrand, 0.0, math.inf, quad)


def cumulant(params: TSParams, k: MultiIndex, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """
    Cumulant c_k of TS^p_alpha(R, b).

    Order 1 is the mean b_i + int x_i |x|^2 / (1 + |x|^2) M(dx); orders q >= 2 are
    Gamma((q - alpha)/p) / p * int prod x_j^k_j R(dx).
    """
    _check_index(params, k)
    q = k.order
    if q < 1:
        raise DomainError("cumulants need order >= 1")
    if not moment_finite(params, k, quad):
        raise MomentInfiniteError(f"moment of order {q} is infinite")

    alpha, p = params.alpha, params.p
    if q == 1:
        i = k.k.index(1)
        total = params.b[i]
        for ray in params.measure.rays:
            u_i = ray.direction[i]
            if u_i == 0.0:
                continue
            total += u_i * ray.profile.integrate(lambda rho: _mean_inner(rho, alpha, p, quad), quad=quad)
        return float(total)

    total = 0.0
    for ray in params.measure.rays:
        mono = k.monomial(ray.direction)
        if mono == 0.0:
            continue
        total += mono * ray.profile.power_integral(float(q), quad=quad)
    return float(special.gamma((q - alpha) / p) / p * total)


class ExpMomentVerdict(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    SUFFICIENT_ONLY = "sufficient-only"
    UNDETERMINED = "undetermined"


def a_pq(p: float, q: float) -> float:
    """A_{p,q} = (q/p)^(q/(p-q)) (1 - q/p) for 0 < q < p."""
    if not (0 < q < p):
        raise DomainError(f"A_pq needs 0 < q < p, got p={p}, q={q}")
    return (q / p) ** (q / (p - q)) * (1.0 - q / p)


def _support_sup(params: TSParams) -> float:
    sups = [ray.profile.support()[1] for ray in params.measure.rays if not ray.profile.is_zero()]
    return max(sups) if sups else 0.0


def critical_theta(params: TSParams) -> float:
    """Supremum of theta with E exp(theta |X|^p) finite (p in (0, 1]); ``math.inf`` for R = 0."""
    if not 0 < params.p <= 1:
        raise UnsupportedParameterError(f"critical theta is only defined for p in (0, 1], got {params.p}")
    if params.measure.is_zero():
        return math.inf
    sup = _support_sup(params)
    if math.isinf(sup):
        return 0.0
    return sup ** (-params.p)


def _mass_beyond(params: TSParams, radius: float, quad: QuadratureOptions) -> float:
    return float(sum(ray.profile.mass(radius, math.inf, quad) for ray in params.measure.rays))


def _atom_on(params: TSParams, radius: float) -> bool:
    return any(isinstance(ray.profile, AtomProfile) and math.isclose(ray.profile.r0, radius, rel_tol=EDGE_RTOL)
               for ray in params.measure.rays)


def _boundary_integral(params: TSParams, theta: float, quad: QuadratureOptions) -> float:
    """int over (1+theta)^(-1/p) < |x| < theta^(-1/p) of g(|x|^-p - theta) R(dx)."""
    alpha, p = params.alpha, params.p
    lo = (1.0 + theta) ** (-1.0 / p)
    hi = theta ** (-1.0 / p)

    def g(rho: float) -> float:
        gap = rho ** (-p) - theta
        if not 0.0 < gap < 1.0:
            return 0.0
        return gap ** (alpha / p) if alpha < 0 else abs(math.log(gap))

    return float(sum(ray.profile.integrate(g, lo, hi, quad) for ray in params.measure.rays))


def _exact_exp_moment(params: TSParams, theta: float, quad: QuadratureOptions) -> ExpMomentVerdict:
    alpha, p = params.alpha, params.p
    r_c = theta ** (-1.0 / p)
    if _mass_beyond(params, r_c, quad) > 0:
        return ExpMomentVerdict.INFINITE
    if alpha > 0:
        return ExpMomentVerdict.FINITE

    if _atom_on(params, r_c):
        return ExpMomentVerdict.INFINITE
    for ray in params.measure.rays:
        prof = ray.profile
        if prof.is_zero() or prof.support()[1] < r_c * (1.0 - EDGE_RTOL):
            continue
        # density reaching the critical radius behaves like (r_c - r)^e there
        edge = prof.upper_edge_exponent()
        if alpha < 0 and edge is not None and not alpha / p + edge > -1.0:
            return ExpMomentVerdict.INFINITE

    # kinds without a known edge exponent are settled by the integral itself
    value = _boundary_integral(params, theta, quad)
    log.debug("exp moment boundary integral (theta=%g): %g", theta, value)
    if not math.isfinite(value):
        return ExpMomentVerdict.INFINITE
    return ExpMomentVerdict.FINITE


def special_case_p_2q(params: TSParams, theta: float, q_exp: float,
                      quad: QuadratureOptions = DEFAULT_QUAD) -> bool:
    """
    Exact criterion for E exp(theta |X|^q) when p = 2q:
    int_{|x|>1} exp(theta^2 |x|^(2q) / 4) |x|^(-q-alpha) R(dx) < inf.

    Unbounded profiles with power tails diverge; unbounded light tails are not decided.
    """
    if not math.isclose(params.p, 2.0 * q_exp, rel_tol=1e-12):
        raise ParameterMismatchError(f"special case needs p = 2q, got p={params.p}, q={q_exp}")
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    alpha = params.alpha
    for ray in params.measure.rays:
        prof = ray.profile
        if prof.is_zero() or prof.bounded:
            continue
        if math.isfinite(prof.tail_index):
            return False
        raise UnsupportedParameterError(f"{prof.kind} profile has an unbounded light tail")

    def integrand(r: float) -> float:
        return math.exp(theta * theta * r ** (2.0 * q_exp) / 4.0) * r ** (-q_exp - alpha)

    value = sum(ray.profile.integrate(integrand, 1.0, math.inf, quad) for ray in params.measure.rays)
    return math.isfinite(value)


def _sufficient_integral(params: TSParams, theta: float, q_exp: float, quad: QuadratureOptions) -> float:
    p, alpha = params.p, params.alpha
    a = a_pq(p, q_exp)
    power = p / (p - q_exp)

    def integrand(r: float) -> float:
        return times_exp(r ** (-alpha * q_exp / (p - q_exp)), a * (theta * r ** q_exp) ** power)

    total = 0.0
    for ray in params.measure.rays:
        prof = ray.profile
        if prof.is_zero():
            continue
        if not prof.bounded:
            return math.inf
        total += prof.integrate(integrand, 1.0, math.inf, quad)
    return total


def exp_moment_finite(params: TSParams, theta: float, q_exp: Union[float, str],
                      quad: QuadratureOptions = DEFAULT_QUAD) -> ExpMomentVerdict:
    """
    Decide E exp(theta |X|^q_exp).

    q_exp = p (p <= 1) is decided exactly from the support of R; q_exp < p gives
    a sufficient condition only (exact when p = 2 q_exp); q_exp = "log" means
    exp(theta |x| log |x|), infinite whenever R != 0.
    """
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    if params.measure.is_zero():
        return ExpMomentVerdict.FINITE
    if q_exp == "log":
        return ExpMomentVerdict.INFINITE
    q_exp = float(q_exp)
    p = params.p
    if not 0 < q_exp <= 1 and q_exp != p:
        raise UnsupportedParameterError(f"q_exp must lie in (0, 1], got {q_exp}")

    if q_exp == p:
        if p > 1:
            raise UnsupportedParameterError(f"exact exponential moment criteria need p <= 1, got {p}")
        return _exact_exp_moment(params, theta, quad)
    if q_exp > p:
        raise UnsupportedParameterError(f"no criterion for q_exp={q_exp} > p={p}")

    if math.isclose(p, 2.0 * q_exp, rel_tol=1e-12):
        try:
            ok = special_case_p_2q(params, theta, q_exp, quad)
        except UnsupportedParameterError:
            return ExpMomentVerdict.UNDETERMINED
        return ExpMomentVerdict.FINITE if ok else ExpMomentVerdict.INFINITE

    if math.isfinite(_sufficient_integral(params, theta, q_exp, quad)):
        return ExpMomentVerdict.SUFFICIENT_ONLY
    return ExpMomentVerdict.UNDETERMINED


__all__ = [
    "MultiIndex",
    "moment_finite",
    "cumulant",
    "ExpMomentVerdict",
    "exp_moment_finite",
    "special_case_p_2q",
    "critical_theta",
    "a_pq",
]
