"""
Regular variation: classification of Rosinski measures, the R/M tail ratio law,
a Tauberian convolution harness and the Hill tail-index estimator.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError, InsufficientSamplesError, NonMonotoneError
from .levy import tail
from .measure import RosinskiMeasure, TSParams
from .special_fn import ArrayLike, KernelParams, kernel_k, kernel_mellin

log = logging.getLogger(__name__)

DEFAULT_EVIDENCE_GRID = (1e1, 1e2, 1e3, 1e4)


@dataclass
class RVClassification:
    """Tail index of R with per-direction limit weights: R(|x| > r, u) ~ sigma[u] r^-index."""
    index: float
    sigma_hat: Dict[int, float]
    evidence: pd.DataFrame = field(repr=False)

    @property
    def total_weight(self) -> float:
        return float(sum(self.sigma_hat.values()))


def classify_measure(measure: RosinskiMeasure, r_grid: Sequence[float] = DEFAULT_EVIDENCE_GRID,
                     quad: QuadratureOptions = DEFAULT_QUAD) -> Optional[RVClassification]:
    """
    Exact tail index of R from its profiles; None when no ray has a power tail
    (atoms, grids and other bounded or light profiles).

    ``sigma_hat`` is keyed by direction group (the order of
    ``RosinskiMeasure.direction_groups``); directions with lighter tails get 0.
    """
    indices = [ray.profile.tail_index for ray in measure.rays
               if math.isfinite(ray.profile.tail_index) and ray.profile.tail_coefficient() > 0]
    if not indices:
        return None
    index = min(indices)

    sigma_hat: Dict[int, float] = {}
    rows = []
    for g, (direction, members) in enumerate(measure.direction_groups()):
        weight = 0.0
        for i in members:
            prof = measure.rays[i].profile
            if prof.tail_index == index:
                weight += prof.tail_coefficient()
        sigma_hat[g] = weight
        for r in r_grid:
            mass = sum(measure.rays[i].profile.mass(float(r), math.inf, quad) for i in members)
            rows.append({"direction": g, "r": float(r), "scaled_mass": mass * float(r) ** index})
    evidence = pd.DataFrame(rows, columns=["direction", "r", "scaled_mass"])
    return RVClassification(index=index, sigma_hat=sigma_hat, evidence=evidence)


def tail_ratio_limit(rho: float, kp: KernelParams) -> float:
    """lim R_D(r) / M_D(r) = p / Gamma((rho - alpha)/p)."""
    return kp.p / float(special.gamma((rho - kp.alpha) / kp.p))


def tail_ratio_limit_mellin(rho: float, kp: KernelParams) -> float:
    """The same limit written as 1 / (rho * khat(-rho))."""
    return 1.0 / (rho * kernel_mellin(-rho, kp).real)


@dataclass
class TailRatioReport:
    rho: float
    limit: float
    table: pd.DataFrame
    last_rel_error: float


def tail_ratio_check(params: TSParams, r_grid: Sequence[float], rho: Optional[float] = None,
                     cone: Optional[Sequence[int]] = None,
                     quad: QuadratureOptions = DEFAULT_QUAD) -> TailRatioReport:
    """Tabulate R_D(r) / M_D(r) on ``r_grid`` against its limit p / Gamma((rho - alpha)/p)."""
    if rho is None:
        cls = classify_measure(params.measure, quad=quad)
        if cls is None:
            raise DomainError("measure has no regularly varying tail")
        rho = cls.index
    if not rho > max(params.alpha, 0.0):
        raise DomainError(f"tail ratio law needs rho > max(alpha, 0), got rho={rho}, alpha={params.alpha}")
    params.ensure_valid(quad)
    limit = tail_ratio_limit(rho, params.kernel)
    rays = params.measure.rays
    members = list(range(len(rays))) if cone is None else list(cone)

    rows = []
    for r in r_grid:
        r = float(r)
        r_tail = sum(rays[i].profile.mass(r, math.inf, quad) for i in members)
        m_tail = tail(params, r, members, quad, check=False)
        ratio = r_tail / m_tail if m_tail > 0 else math.nan
        rows.append({"r": r, "r_tail": r_tail, "m_tail": m_tail, "ratio": ratio,
                     "rel_error": abs(ratio - limit) / limit})
    table = pd.DataFrame(rows, columns=["r", "r_tail", "m_tail", "ratio", "rel_error"])
    last = float(table["rel_error"].iloc[-1]) if not table.empty else math.nan
    return TailRatioReport(rho=rho, limit=limit, table=table, last_rel_error=last)


def _check_growth(U: Callable, growth_index: float):
    radii = np.logspace(-12, -3, 10)
    ratios = np.abs(np.asarray(U(radii), dtype=float)) / radii ** growth_index
    if not np.all(np.isfinite(ratios)):
        raise DomainError("U is not finite near the origin")
    if ratios[0] > 10.0 * max(ratios[-1], 1e-300):
        raise DomainError(f"|U(r)| / r^{growth_index} grows as r -> 0")


def tauberian_convolve(U: Callable[[np.ndarray], np.ndarray], kp: KernelParams, x_grid: Sequence[float],
                       growth_index: float, kernel: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                       half_width: float = 20.0, cells: int = 20000) -> np.ndarray:
    """
    int_0^inf k(x/t) dU(t) for every x in ``x_grid``.

    Uses a midpoint Riemann-Stieltjes sum in y = log(t/x) over [-half_width, half_width].
    ``U`` and ``kernel`` must accept numpy arrays; ``U`` must be monotone.
    """
    if cells % 2:
        cells += 1
    _check_growth(U, growth_index)
    if kernel is None:
        def kernel(s: np.ndarray) -> np.ndarray:
            return kernel_k(s, kp)

    edges = np.linspace(-half_width, half_width, cells + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    weights = np.asarray(kernel(np.exp(-mids)), dtype=float)

    out = np.empty(len(x_grid))
    for j, x in enumerate(x_grid):
        values = np.asarray(U(float(x) * np.exp(edges)), dtype=float)
        dU = np.diff(values)
        if np.any(dU > 0) and np.any(dU < 0):
            raise NonMonotoneError("U is not monotone on the integration range")
        out[j] = float(np.sum(weights * dU))
    return out


def tauberian_prediction(c: float, rho: float, kp: KernelParams, x: ArrayLike) -> np.ndarray:
    """Asymptotic c rho khat(rho) x^rho of the convolution when U(x) ~ c x^rho."""
    return c * rho * kernel_mellin(rho, kp).real * np.asarray(x, dtype=float) ** rho


def hill_estimate(samples: Sequence[float], k_order: int) -> float:
    """Hill estimator 1 / mean(log X_(i) - log X_(k+1)) from the k largest samples."""
    xs = np.asarray(samples, dtype=float).ravel()
    n = xs.size
    k = int(k_order)
    if k < 1 or k >= n:
        raise InsufficientSamplesError(f"need 1 <= k < n, got k={k}, n={n}")
    top = -np.sort(-xs)[: k + 1]
    if not top[-1] > 0:
        raise DomainError("the k+1 largest samples must be positive")
    excess = float(np.mean(np.log(top[:k]) - math.log(top[k])))
    if not excess > 0:
        raise InsufficientSamplesError("log-excesses are degenerate (all top samples equal)")
    return 1.0 / excess


__all__ = [
    "RVClassification",
    "classify_measure",
    "tail_ratio_limit",
    "tail_ratio_limit_mellin",
    "TailRatioReport",
    "tail_ratio_check",
    "tauberian_convolve",
    "tauberian_prediction",
    "hill_estimate",
]
