"""
Re-parameterisations that leave the Levy measure unchanged.

``lower_alpha`` moves from index beta to a smaller alpha, ``raise_p`` from
tempering exponent p to a larger q. Both return exact mixture profiles; call
``to_grid`` on them for a tabulated version.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError
from .levy import tail
from .measure import Ray, RosinskiMeasure, TSParams
from .profiles import AlphaShiftProfile, ParetoProfile, PShiftProfile

log = logging.getLogger(__name__)


def alpha_shift_constant(beta: float, alpha: float, p: float) -> float:
    """K = int_0^inf s^(beta-alpha-1) exp(-s^p) ds = Gamma((beta-alpha)/p) / p."""
    if not beta > alpha:
        raise DomainError(f"need beta > alpha, got beta={beta}, alpha={alpha}")
    return float(special.gamma((beta - alpha) / p)) / p


def lower_alpha(params: TSParams, alpha: float) -> TSParams:
    """Same Levy measure written as a p-tempered ``alpha``-stable law, alpha < params.alpha."""
    beta = params.alpha
    if not alpha < beta:
        raise DomainError(f"lower_alpha needs target alpha < {beta}, got {alpha}")
    rays = tuple(Ray(ray.direction, AlphaShiftProfile(ray.profile, beta, alpha, params.p))
                 for ray in params.measure.rays)
    log.debug("lower_alpha: %g -> %g on %d rays", beta, alpha, len(rays))
    return TSParams(alpha, params.p, params.b, RosinskiMeasure(params.dim, rays))


def raise_p(params: TSParams, q: float) -> TSParams:
    """Same Levy measure written with tempering exponent ``q`` > params.p."""
    p = params.p
    if not q > p:
        raise DomainError(f"raise_p needs target q > {p}, got {q}")
    rays = tuple(Ray(ray.direction, PShiftProfile(ray.profile, params.alpha, p, q))
                 for ray in params.measure.rays)
    if rays and not rays[0].profile.exact_kernel:
        log.warning("raise_p: stable kernel of order %g is evaluated numerically", p / q)
    return TSParams(params.alpha, q, params.b, RosinskiMeasure(params.dim, rays))


def materialise(params: TSParams, nodes: int, lower: float) -> TSParams:
    """Replace every exact mixture profile by its grid representation."""
    rays = tuple(Ray(ray.direction, ray.profile.to_grid(nodes, lower)) for ray in params.measure.rays)
    return params.with_measure(RosinskiMeasure(params.dim, rays))


def stable_embedding(sigma: Sequence[Tuple[Sequence[float], float]], beta: float, alpha: float,
                     p: float) -> RosinskiMeasure:
    """
    Rosinski measure under which TS^p_alpha has the beta-stable Levy measure
    M(|x| > r, u) = sigma(u) r^-beta / beta.

    Each direction gets the power profile K^-1 w r^(-1-beta) on (0, inf).
    """
    if not (max(alpha, 0.0) < beta < 2):
        raise DomainError(f"stable embedding needs beta in ({max(alpha, 0.0)}, 2), got {beta}")
    if not sigma:
        raise DomainError("stable embedding needs at least one spectral weight")
    k = alpha_shift_constant(beta, alpha, p)
    rays = []
    for direction, weight in sigma:
        if not weight > 0:
            raise DomainError(f"spectral weights must be positive, got {weight}")
        rays.append(Ray(tuple(direction), ParetoProfile(0.0, beta, weight / (k * beta))))
    return RosinskiMeasure(len(rays[0].direction), tuple(rays))


@dataclass
class MembershipReport:
    """Tail comparison of two parameter sets, direction by direction."""
    passed: bool
    max_rel_deviation: float
    tol: float
    table: pd.DataFrame


def _direction_cones(a: RosinskiMeasure, b: RosinskiMeasure) -> List[Tuple[Tuple[float, ...], List[int], List[int]]]:
    cones: List[Tuple[Tuple[float, ...], List[int], List[int]]] = []
    for direction, members in a.direction_groups():
        cones.append((direction, members, []))
    for direction, members in b.direction_groups():
        for known, _, b_members in cones:
            if np.allclose(known, direction, rtol=0.0, atol=1e-12):
                b_members.extend(members)
                break
        else:
            cones.append((direction, [], members))
    return cones


def _rel_dev(x: float, y: float) -> float:
    if x == y:
        return 0.0
    if not (math.isfinite(x) and math.isfinite(y)):
        return math.inf
    return abs(x - y) / max(abs(x), abs(y))


def verify_membership(params_a: TSParams, params_b: TSParams, r_grid: Sequence[float], tol: float = 1e-6,
                      quad: QuadratureOptions = DEFAULT_QUAD) -> MembershipReport:
    """Evaluate both Levy tails per direction on ``r_grid``; passes iff the largest relative deviation <= tol."""
    if params_a.dim != params_b.dim:
        raise DomainError("parameter sets have different dimensions")
    params_a.ensure_valid(quad)
    params_b.ensure_valid(quad)

    rows = []
    for idx, (direction, cone_a, cone_b) in enumerate(_direction_cones(params_a.measure, params_b.measure)):
        for r in r_grid:
            ta = tail(params_a, float(r), cone_a, quad, check=False) if cone_a else 0.0
            tb = tail(params_b, float(r), cone_b, quad, check=False) if cone_b else 0.0
            rows.append({
                "direction": idx,
                "r": float(r),
                "tail_a": ta,
                "tail_b": tb,
                "rel_dev": _rel_dev(ta, tb),
            })
    table = pd.DataFrame(rows, columns=["direction", "r", "tail_a", "tail_b", "rel_dev"])
    worst = float(table["rel_dev"].max()) if not table.empty else 0.0
    passed = worst <= tol
    log.info("verify_membership: max relative deviation %.3e (tol %.1e) -> %s",
             worst, tol, "pass" if passed else "fail")
    return MembershipReport(passed=passed, max_rel_deviation=worst, tol=tol, table=table)


__all__ = [
    "alpha_shift_constant",
    "lower_alpha",
    "raise_p",
    "materialise",
    "stable_embedding",
    "MembershipReport",
    "verify_membership",
]
