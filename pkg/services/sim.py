"""
Monte Carlo sampling of TS^p_alpha(R, b).

Jumps larger than epsilon form a compound Poisson sum; the remaining small
jumps are replaced by a Gaussian with the same covariance (or dropped, keeping
only their mean). Radii are drawn exactly: a jump along a ray with profile R_u
is rho * t where (rho, t) has density R_u(d rho) t^(-alpha-1) exp(-t^p) dt on
rho * t > epsilon.

Samples are produced in fixed-size chunks, each with its own Philox stream
spawned from one SeedSequence, so output depends on (seed, chunk_size) only.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special

from engine.config import DEFAULT_QUAD, QuadratureOptions
from engine.errors import DomainError, InvalidMeasureError, ZeroTailError
from engine.levy import radial_moment, ray_small_jump_moment, ray_tail
from engine.measure import Ray, RosinskiMeasure, TSParams
from engine.profiles import AtomProfile, GridProfile, ParetoProfile, RadialProfile
from engine.special_fn import KernelParams, gamma_upper, kernel_k

log = logging.getLogger(__name__)

GAUSSIAN_COMPLETION = "gaussian-completion"
DRIFT_ONLY = "drift-only"
SMALL_JUMP_MODES = (GAUSSIAN_COMPLETION, DRIFT_ONLY)

_REJECTION_BATCH = 256


@dataclass
class SimConfig:
    """Truncation radius, sample count, seed and small-jump treatment."""
    epsilon: float = 1e-2
    n: int = 1
    seed: int = 0
    small_jump: str = GAUSSIAN_COMPLETION
    chunk_size: int = 50000

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.n) < 1:
            raise DomainError(f"n must be at least 1, got {self.n}")
        if self.small_jump not in SMALL_JUMP_MODES:
            raise DomainError(f"small_jump must be one of {SMALL_JUMP_MODES}, got {self.small_jump!r}")
        if int(self.chunk_size) < 1:
            raise DomainError(f"chunk_size must be at least 1, got {self.chunk_size}")
        self.n = int(self.n)
        self.seed = int(self.seed)
        self.chunk_size = int(self.chunk_size)

    @classmethod
    def from_config(cls, sim_cfg: Dict[str, Any], **overrides) -> "SimConfig":
        values = {
            "epsilon": float(sim_cfg.get("epsilon", cls.epsilon)),
            "seed": int(sim_cfg.get("seed", cls.seed)),
            "small_jump": sim_cfg.get("small_jump", cls.small_jump),
            "chunk_size": int(sim_cfg.get("chunk_size", cls.chunk_size)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class SimDiagnostics:
    lam: float
    ray_lam: List[float]
    covariance: np.ndarray
    drift: np.ndarray


@dataclass
class SampleBatch:
    values: np.ndarray
    config: SimConfig
    diagnostics: SimDiagnostics
    # number of jumps above epsilon in each draw
    jump_counts: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])


# ------------------------------------------------------------- t sampling
def _rejection_fill(size: int, propose: Callable[[int], np.ndarray],
                    accept_prob: Callable[[np.ndarray], np.ndarray], rng: np.random.Generator) -> np.ndarray:
    out = np.empty(size)
    filled = 0
    while filled < size:
        batch = max(2 * (size - filled), _REJECTION_BATCH)
        y = propose(batch)
        keep = y[rng.random(batch) < accept_prob(y)]
        take = min(keep.size, size - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def _sample_upper_gamma(a: float, c: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws from the density proportional to y^(a-1) e^-y on (c, inf), any real a."""
    if size == 0:
        return np.empty(0)
    if a > 0:
        tail_p = float(special.gammaincc(a, c))
        if tail_p > 1e-280:
            u = rng.random(size)
            return special.gammainccinv(a, u * tail_p)
        # far in the tail: exponential proposal from c
        if a >= 1:
            rate = 1.0 - (a - 1.0) / c

            def accept(y):
                return np.exp((a - 1.0) * (np.log(y / c) - (y - c) / c))
        else:
            rate = 1.0

            def accept(y):
                return (y / c) ** (a - 1.0)
        return _rejection_fill(size, lambda m: c + rng.standard_exponential(m) / rate, accept, rng)

    # a <= 0: split at y = 1
    m = max(c, 1.0)
    mass_far = float(gamma_upper(a, m))
    mass_near = float(gamma_upper(a, c)) - mass_far if c < 1.0 else 0.0
    near = rng.random(size) < mass_near / (mass_near + mass_far)
    out = np.empty(size)
    n_near = int(near.sum())
    if n_near:
        if a == 0:
            def propose(k):
                return c ** (1.0 - rng.random(k))
        else:
            ca = c ** a

            def propose(k):
                return (ca + rng.random(k) * (1.0 - ca)) ** (1.0 / a)
        out[near] = _rejection_fill(n_near, propose, lambda y: np.exp(-(y - c)), rng)
    n_far = size - n_near
    if n_far:
        out[~near] = _rejection_fill(n_far, lambda k: m + rng.standard_exponential(k),
                                     lambda y: (y / m) ** (a - 1.0), rng)
    return out


def sample_tempered_t(cutoff: float, kp: KernelParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """t > cutoff with density proportional to t^(-alpha-1) exp(-t^p)."""
    y = _sample_upper_gamma(kp.gamma_parameter, cutoff ** kp.p, size, rng)
    return y ** (1.0 / kp.p)


# ---------------------------------------------------------- ray samplers
class _RaySampler:
    """Draws jump radii > epsilon along one ray."""

    def __init__(self, profile: RadialProfile, epsilon: float, kp: KernelParams):
        self.profile = profile
        self.epsilon = epsilon
        self.kp = kp

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class _AtomSampler(_RaySampler):
    def draw(self, size, rng):
        r0 = self.profile.r0
        return r0 * sample_tempered_t(self.epsilon / r0, self.kp, size, rng)


class _ParetoSampler(_RaySampler):
    """
    Pick t from its marginal first, then rho from the pareto law above max(r0, eps/t).

    For r0 > 0 the marginal of t has a region t > eps/r0 (mass c r0^-rho k(eps/r0))
    and a truncated gamma region in y = t^p below it.
    """

    def __init__(self, profile, epsilon, kp):
        super().__init__(profile, epsilon, kp)
        prof = profile
        self.a2 = (prof.rho - kp.alpha) / kp.p
        if prof.r0 > 0:
            self.y_cut = (epsilon / prof.r0) ** kp.p
            self.mass_outer = prof.c * prof.r0 ** (-prof.rho) * float(kernel_k(epsilon / prof.r0, kp))
            self.p_inner_cut = float(special.gammainc(self.a2, self.y_cut))
            self.mass_inner = (prof.c * epsilon ** (-prof.rho) * math.gamma(self.a2)
                               * self.p_inner_cut / kp.p)
        else:
            self.y_cut = math.inf
            self.mass_outer = 0.0
            self.p_inner_cut = 1.0
            self.mass_inner = prof.c * epsilon ** (-prof.rho) * math.gamma(self.a2) / kp.p

    def _inner_t(self, size, rng):
        u = rng.random(size)
        if self.p_inner_cut > 1e-280:
            y = special.gammaincinv(self.a2, u * self.p_inner_cut)
        else:
            y = self.y_cut * u ** (1.0 / self.a2)
        return y ** (1.0 / self.kp.p)

    def draw(self, size, rng):
        prof = self.profile
        total = self.mass_outer + self.mass_inner
        outer = rng.random(size) < self.mass_outer / total
        t = np.empty(size)
        n_outer = int(outer.sum())
        if n_outer:
            t[outer] = sample_tempered_t(self.epsilon / prof.r0, self.kp, n_outer, rng)
        if size - n_outer:
            t[~outer] = self._inner_t(size - n_outer, rng)
        floor = np.maximum(prof.r0, self.epsilon / t)
        rho = floor * rng.random(size) ** (-1.0 / prof.rho)
        return rho * t


class _GridSampler(_RaySampler):
    """Cells of the grid weighted by density * k(eps / rho); rho uniform inside a cell."""

    def __init__(self, profile, epsilon, kp):
        super().__init__(profile, epsilon, kp)
        rs = profile.rs
        dens = profile.values * np.asarray(kernel_k(epsilon / rs, kp), dtype=float)
        cell = 0.5 * (dens[:-1] + dens[1:]) * np.diff(rs)
        if not cell.sum() > 0:
            raise ZeroTailError("grid profile carries no mass beyond epsilon")
        self.cdf = np.cumsum(cell) / cell.sum()
        self.left = rs[:-1]
        self.width = np.diff(rs)

    def draw(self, size, rng):
        idx = np.minimum(np.searchsorted(self.cdf, rng.random(size), side="right"), self.cdf.size - 1)
        rho = self.left[idx] + rng.random(size) * self.width[idx]
        t = np.empty(size)
        for i, r in enumerate(rho):
            t[i] = sample_tempered_t(self.epsilon / r, self.kp, 1, rng)[0]
        return rho * t


def _sampler_for(profile: RadialProfile, epsilon: float, kp: KernelParams) -> _RaySampler:
    if isinstance(profile, AtomProfile):
        return _AtomSampler(profile, epsilon, kp)
    if isinstance(profile, ParetoProfile):
        return _ParetoSampler(profile, epsilon, kp)
    if isinstance(profile, GridProfile):
        return _GridSampler(profile, epsilon, kp)
    raise DomainError(f"no sampler for {profile.kind} profiles")


# ---------------------------------------------------------------- plan
@dataclass
class SimPlan:
    """Everything computed once per (params, epsilon) before drawing."""
    params: TSParams
    epsilon: float
    directions: np.ndarray
    ray_lam: np.ndarray
    samplers: List[Optional[_RaySampler]]
    drift: np.ndarray
    covariance: np.ndarray
    gaussian: bool = field(default=True)

    @property
    def lam(self) -> float:
        return float(self.ray_lam.sum())


def prepare(params: TSParams, config: SimConfig, quad: QuadratureOptions = DEFAULT_QUAD,
            grid_nodes: int = 2048, grid_lower: float = 1e-6) -> SimPlan:
    """Validate, materialise exact mixture profiles and precompute rates, drift and covariance."""
    params.ensure_valid(quad)
    eps = config.epsilon
    kp = params.kernel

    rays = []
    for ray in params.measure.rays:
        prof = ray.profile
        if prof.kind not in (AtomProfile.kind, ParetoProfile.kind, GridProfile.kind):
            log.warning("Sampling %s profile through a %d-node grid", prof.kind, grid_nodes)
            prof = prof.to_grid(grid_nodes, grid_lower, quad)
        rays.append(Ray(ray.direction, prof))
    sampled = params.with_measure(RosinskiMeasure(params.dim, tuple(rays)))

    ray_lam = np.array([ray_tail(r.profile, eps, kp, quad) for r in rays], dtype=float)
    if not np.all(np.isfinite(ray_lam)):
        raise InvalidMeasureError(f"infinite Levy mass beyond epsilon={eps}")
    samplers = [_sampler_for(r.profile, eps, kp) if lam > 0 else None for r, lam in zip(rays, ray_lam)]

    dim = params.dim
    directions = np.array([r.vector for r in rays]).reshape(len(rays), dim)
    drift = params.shift.copy()
    covariance = np.zeros((dim, dim))
    for j, r in enumerate(rays):
        large = radial_moment(sampled, lambda x: x / (1.0 + x * x), eps, math.inf, [j], quad)
        small = radial_moment(sampled, lambda x: x ** 3 / (1.0 + x * x), 0.0, eps, [j], quad)
        drift += (small - large) * directions[j]
        covariance += ray_small_jump_moment(r.profile, eps, kp, quad) * np.outer(directions[j], directions[j])

    gaussian = config.small_jump == GAUSSIAN_COMPLETION
    if not gaussian and params.alpha >= 0 and not params.measure.is_zero():
        log.warning("drift-only small jumps with alpha=%g drop infinite-activity jumps below %g",
                    params.alpha, eps)
    log.debug("Simulation plan: lambda=%g drift=%s", float(ray_lam.sum()), drift)
    return SimPlan(sampled, eps, directions, ray_lam, samplers, drift, covariance, gaussian)


def _draw_chunk(plan: SimPlan, size: int, seed_seq: np.random.SeedSequence) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    dim = plan.drift.size
    out = np.tile(plan.drift, (size, 1))
    lam = plan.lam
    counts = np.zeros(size, dtype=np.int64)
    if lam > 0:
        counts = rng.poisson(lam, size)
        total = int(counts.sum())
        if total:
            owner = np.repeat(np.arange(size), counts)
            which = rng.choice(plan.ray_lam.size, size=total, p=plan.ray_lam / lam)
            radii = np.empty(total)
            for j, sampler in enumerate(plan.samplers):
                sel = which == j
                n_j = int(sel.sum())
                if n_j and sampler is not None:
                    radii[sel] = sampler.draw(n_j, rng)
            for d in range(dim):
                comp = radii * plan.directions[which, d]
                out[:, d] += np.bincount(owner, weights=comp, minlength=size)
    if plan.gaussian and np.any(plan.covariance):
        out += rng.multivariate_normal(np.zeros(dim), plan.covariance, size=size, method="eigh")
    return out, counts


def sample(params: TSParams, config: SimConfig, max_workers: int = 1,
           quad: QuadratureOptions = DEFAULT_QUAD,
           on_progress: Optional[Callable[[int, str], None]] = None,
           cancel: Optional[Callable[[], bool]] = None,
           grid_nodes: int = 2048, grid_lower: float = 1e-6) -> SampleBatch:
    """Draw ``config.n`` variates; returns an n x dim batch with the plan's diagnostics."""
    plan = prepare(params, config, quad, grid_nodes, grid_lower)
    n, chunk = config.n, config.chunk_size
    sizes = [min(chunk, n - start) for start in range(0, n, chunk)]
    seeds = np.random.SeedSequence(config.seed).spawn(len(sizes))
    parts: List[Optional[Tuple[np.ndarray, np.ndarray]]] = [None] * len(sizes)

    log.info("Sampling n=%d in %d chunks (lambda=%.6g, epsilon=%g, workers=%d)",
             n, len(sizes), plan.lam, config.epsilon, max_workers)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as ex:
        futs = {ex.submit(_draw_chunk, plan, size, seq): i for i, (size, seq) in enumerate(zip(sizes, seeds))}
        for done, fut in enumerate(as_completed(futs), 1):
            if cancel and cancel():
                for f in futs:
                    f.cancel()
                raise RuntimeError("sampling cancelled")
            parts[futs[fut]] = fut.result()
            if on_progress:
                on_progress(int(done / len(sizes) * 100), f"Sampled {done}/{len(sizes)} chunks")

    values = np.vstack([v for v, _ in parts]) if parts else np.empty((0, params.dim))
    counts = np.concatenate([c for _, c in parts]) if parts else np.empty(0, dtype=np.int64)
    diagnostics = SimDiagnostics(lam=plan.lam, ray_lam=plan.ray_lam.tolist(),
                                 covariance=plan.covariance, drift=plan.drift)
    return SampleBatch(values=values, config=config, diagnostics=diagnostics, jump_counts=counts)


def sample_jump_radius(params: TSParams, ray_index: int, epsilon: float, u01: float,
                       quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """
    Radius r >= epsilon with P(radius > r) = tail(r) / tail(epsilon) = u01 along one ray.

    Solved by bracketing and Brent's method in log r.
    """
    if not 0 < u01 <= 1:
        raise DomainError(f"u01 must lie in (0, 1], got {u01}")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    prof = params.measure.rays[ray_index].profile
    kp = params.kernel
    base = ray_tail(prof, epsilon, kp, quad)
    if not base > 0:
        raise ZeroTailError(f"ray {ray_index} has no Levy mass beyond {epsilon}")
    if u01 == 1.0:
        return float(epsilon)
    target = math.log(u01 * base)

    def gap(y: float) -> float:
        value = ray_tail(prof, math.exp(y), kp, quad)
        return (math.log(value) if value > 0 else -math.inf) - target

    lo = math.log(epsilon)
    hi = lo + 1.0
    while gap(hi) > 0:
        lo, hi = hi, hi + 2.0 * (hi - lo)
    return float(math.exp(optimize.brentq(gap, lo, hi, xtol=1e-12, rtol=1e-12)))


def empirical_cf(batch, z_grid: Sequence) -> np.ndarray:
    """(1/n) sum exp(i <z, X_k>) for every z in ``z_grid``; accepts a SampleBatch or an array."""
    values = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] == 0:
        raise DomainError("empirical_cf needs a non-empty batch")
    zs = np.asarray(z_grid, dtype=float).reshape(-1, values.shape[1])
    return np.exp(1j * values @ zs.T).mean(axis=0)


__all__ = [
    "GAUSSIAN_COMPLETION",
    "DRIFT_ONLY",
    "SimConfig",
    "SimDiagnostics",
    "SampleBatch",
    "SimPlan",
    "sample_tempered_t",
    "prepare",
    "sample",
    "sample_jump_radius",
    "empirical_cf",
]
