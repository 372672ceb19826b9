"""
Rosinski measures, tempered stable parameter sets and their validity checks.

A Rosinski measure is stored as a finite list of rays: a unit direction and a
radial profile on (0, inf). R({0}) = 0 holds by construction since every
profile kind lives on strictly positive radii.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError, InvalidMeasureError, NotProperError, UnknownDirectionError
from .profiles import (
    DEFAULT_GRID_LOWER,
    DEFAULT_GRID_NODES,
    AtomProfile,
    GridProfile,
    RadialProfile,
    profile_from_dict,
)
from .special_fn import KernelParams

log = logging.getLogger(__name__)

MAX_DIM = 8
UNIT_TOL = 1e-12


def _is_infinite(value: float) -> bool:
    return not math.isfinite(value)


@dataclass(frozen=True)
class Ray:
    """One spectral direction together with its radial profile."""
    direction: Tuple[float, ...]
    profile: RadialProfile

    def __post_init__(self):
        object.__setattr__(self, "direction", tuple(float(v) for v in self.direction))
        norm = math.sqrt(sum(v * v for v in self.direction))
        if abs(norm - 1.0) > UNIT_TOL:
            raise DomainError(f"ray direction {self.direction} is not a unit vector (norm {norm!r})")

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {"direction": list(self.direction), "profile": self.profile.to_dict()}


@dataclass(frozen=True)
class RosinskiMeasure:
    """Finite-ray Rosinski measure on R^dim."""
    dim: int
    rays: Tuple[Ray, ...] = ()

    def __post_init__(self):
        if not (1 <= int(self.dim) <= MAX_DIM):
            raise DomainError(f"dimension must lie in [1, {MAX_DIM}], got {self.dim}")
        object.__setattr__(self, "rays", tuple(self.rays))
        for i, ray in enumerate(self.rays):
            if len(ray.direction) != self.dim:
                raise DomainError(f"ray {i} has dimension {len(ray.direction)}, measure has {self.dim}")

    @classmethod
    def zero(cls, dim: int) -> "RosinskiMeasure":
        return cls(dim, ())

    def is_zero(self) -> bool:
        return all(ray.profile.is_zero() for ray in self.rays)

    def scaled(self, factor: float) -> "RosinskiMeasure":
        if not factor > 0:
            raise DomainError(f"scale factor must be positive, got {factor}")
        return RosinskiMeasure(self.dim, tuple(Ray(r.direction, r.profile.scaled(factor)) for r in self.rays))

    def __add__(self, other: "RosinskiMeasure") -> "RosinskiMeasure":
        if not isinstance(other, RosinskiMeasure):
            return NotImplemented
        if other.dim != self.dim:
            raise DomainError("cannot add measures of different dimension")
        return RosinskiMeasure(self.dim, self.rays + other.rays)

    def direction_groups(self) -> List[Tuple[Tuple[float, ...], List[int]]]:
        """Unique directions and the indices of the rays pointing along each."""
        groups: List[Tuple[Tuple[float, ...], List[int]]] = []
        for i, ray in enumerate(self.rays):
            for direction, members in groups:
                if np.allclose(direction, ray.direction, rtol=0.0, atol=UNIT_TOL):
                    members.append(i)
                    break
            else:
                groups.append((ray.direction, [i]))
        return groups

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "rays": [ray.to_dict() for ray in self.rays]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RosinskiMeasure":
        dim = int(data["dim"])
        rays = tuple(
            Ray(tuple(float(v) for v in item["direction"]), profile_from_dict(item["profile"]))
            for item in (data.get("rays") or [])
        )
        return cls(dim, rays)


@dataclass(frozen=True)
class Violation:
    """A divergent (or structurally impossible) integral found by ``validate``."""
    name: str
    value: float
    message: str


@dataclass
class ValidationReport:
    valid: bool
    violations: List[Violation] = field(default_factory=list)
    integrals: Dict[str, float] = field(default_factory=dict)

    @property
    def violation_names(self) -> List[str]:
        return [v.name for v in self.violations]


@dataclass(frozen=True)
class TSParams:
    """Parameters (alpha, p, b, R) of a p-tempered alpha-stable law."""
    alpha: float
    p: float
    b: Tuple[float, ...]
    measure: RosinskiMeasure

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha < 2):
            raise DomainError(f"alpha must be finite and < 2, got {self.alpha}")
        if not (math.isfinite(self.p) and self.p > 0):
            raise DomainError(f"p must be finite and > 0, got {self.p}")
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.b) != self.measure.dim:
            raise DomainError(f"shift has length {len(self.b)}, measure has dimension {self.measure.dim}")

    @property
    def dim(self) -> int:
        return self.measure.dim

    @property
    def kernel(self) -> KernelParams:
        return KernelParams(self.alpha, self.p)

    @property
    def shift(self) -> np.ndarray:
        return np.asarray(self.b, dtype=float)

    def with_measure(self, measure: RosinskiMeasure, alpha: Optional[float] = None,
                     p: Optional[float] = None) -> "TSParams":
        return TSParams(self.alpha if alpha is None else alpha, self.p if p is None else p, self.b, measure)

    def ensure_valid(self, quad: QuadratureOptions = DEFAULT_QUAD) -> "TSParams":
        """Return self, raising InvalidMeasureError when ``validate`` fails."""
        report = validate(self.alpha, self.measure, quad)
        if not report.valid:
            names = ", ".join(report.violation_names)
            raise InvalidMeasureError(f"not a Levy measure for alpha={self.alpha}: {names}", report.violations)
        return self


@dataclass(frozen=True)
class SpectralForm:
    """
    Spectral description (sigma, Q_u) of a proper measure.

    ``qu[i]`` holds the profiles of Q_u for ``directions[i]``; for proper measures
    they carry total mass 1 so that the tempering function starts at 1.
    """
    directions: Tuple[Tuple[float, ...], ...]
    sigma: Tuple[float, ...]
    qu: Tuple[Tuple[RadialProfile, ...], ...]
    alpha: float
    p: float
    ambient_dim: Optional[int] = None

    def __post_init__(self):
        if not (len(self.directions) == len(self.sigma) == len(self.qu)):
            raise DomainError("spectral form needs one weight and one Q_u per direction")
        if self.ambient_dim is not None:
            if self.ambient_dim < 1 or any(len(u) != self.ambient_dim for u in self.directions):
                raise DomainError(f"spectral directions must have dimension {self.ambient_dim}")
        for w in self.sigma:
            if not (math.isfinite(w) and w >= 0):
                raise DomainError(f"spectral weights must be finite and non-negative, got {w}")

    @property
    def dim(self) -> int:
        if self.ambient_dim is not None:
            return self.ambient_dim
        return len(self.directions[0]) if self.directions else 1

    def index_of(self, u: Union[int, Sequence[float]]) -> int:
        if isinstance(u, (int, np.integer)):
            if 0 <= int(u) < len(self.directions):
                return int(u)
            raise UnknownDirectionError(f"no direction with index {u}")
        vec = np.asarray(u, dtype=float)
        for i, direction in enumerate(self.directions):
            if vec.shape == (len(direction),) and np.allclose(direction, vec, rtol=0.0, atol=1e-9):
                return i
        raise UnknownDirectionError(f"direction {tuple(vec)} is not in the spectral form")


# ---------------------------------------------------------------- validity
def validate(alpha: float, measure: RosinskiMeasure, quad: QuadratureOptions = DEFAULT_QUAD) -> ValidationReport:
    """
    Check that R defines a Levy measure for stability index ``alpha``.

    Reports every divergent integral as a violation; never raises for divergence.
    """
    report = ValidationReport(valid=True)
    if not (math.isfinite(alpha) and alpha < 2):
        report.violations.append(Violation("alpha-range", alpha, f"alpha must be < 2, got {alpha}"))

    near = 0.0
    tail = 0.0
    if alpha > 0:
        tail_name = "tail-alpha-integral"
    elif alpha == 0:
        tail_name = "tail-log-integral"
    else:
        tail_name = "tail-mass-integral"

    for ray in measure.rays:
        prof = ray.profile
        near += prof.power_integral(2.0, 0.0, 1.0, quad)
        if alpha > 0:
            tail += prof.power_integral(alpha, 1.0, math.inf, quad)
        elif alpha == 0:
            tail += prof.mass(1.0, math.inf, quad) + prof.log_power_integral(0.0, 1.0, math.inf, quad)
        else:
            tail += prof.mass(1.0, math.inf, quad)

    report.integrals["near-origin-integral"] = near
    report.integrals[tail_name] = tail
    if _is_infinite(near):
        report.violations.append(Violation("near-origin-integral", near, "integral of |x|^2 over |x| <= 1 diverges"))
    if _is_infinite(tail):
        report.violations.append(Violation(tail_name, tail, f"{tail_name} over |x| > 1 diverges"))
    report.valid = not report.violations
    if not report.valid:
        log.debug("validate(alpha=%g): %s", alpha, report.violation_names)
    return report


def proper_integral(alpha: float, measure: RosinskiMeasure, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """Integral of |x|^alpha against R; ``math.inf`` when it diverges."""
    return float(sum(ray.profile.power_integral(alpha, quad=quad) for ray in measure.rays))


def is_proper(alpha: float, measure: RosinskiMeasure, quad: QuadratureOptions = DEFAULT_QUAD) -> bool:
    report = validate(alpha, measure, quad)
    if not report.valid:
        raise InvalidMeasureError(f"measure is not valid for alpha={alpha}", report.violations)
    return math.isfinite(proper_integral(alpha, measure, quad))


# ---------------------------------------------------------------- spectral
def _tabulate(profile: RadialProfile, nodes: int, lower: float) -> Tuple[np.ndarray, np.ndarray]:
    """Radii and density values of a density profile."""
    grid = profile.to_grid(nodes, lower)
    if isinstance(grid, GridProfile):
        return grid.rs, grid.values
    lo, hi = profile.support()
    lo = lo if lo > 0 else lower
    hi = hi if math.isfinite(hi) else max(lo, 1.0) / lower
    radii = np.geomspace(lo, hi, nodes)
    return radii, np.asarray(grid.density(radii), dtype=float)


def _pushforward_to_q(profile: RadialProfile, alpha: float, p: float, sigma: float,
                      nodes: int, lower: float) -> RadialProfile:
    """Image of sigma^-1 |x|^alpha R(dx) under r -> r^-p for one profile."""
    if isinstance(profile, AtomProfile):
        return AtomProfile(profile.r0 ** (-p), profile.w * profile.r0 ** alpha / sigma)
    log.warning("to_spectral: %s profile approximated on a %d-node grid", profile.kind, nodes)
    radii, dens_r = _tabulate(profile, nodes, lower)
    s = radii ** (-p)
    dens_s = dens_r * radii ** alpha / sigma * radii ** (p + 1.0) / p
    order = np.argsort(s)
    return GridProfile(s[order], dens_s[order])


def _pushforward_to_r(profile: RadialProfile, alpha: float, p: float, sigma: float,
                      nodes: int, lower: float) -> RadialProfile:
    """Image of sigma * s^(alpha/p) Q_u(ds) under s -> s^(-1/p)."""
    if isinstance(profile, AtomProfile):
        return AtomProfile(profile.r0 ** (-1.0 / p), sigma * profile.w * profile.r0 ** (alpha / p))
    log.warning("from_spectral: %s profile approximated on a %d-node grid", profile.kind, nodes)
    s, dens_s = _tabulate(profile, nodes, lower)
    radii = s ** (-1.0 / p)
    dens_r = sigma * dens_s * s ** (alpha / p) * p * radii ** (-p - 1.0)
    order = np.argsort(radii)
    return GridProfile(radii[order], dens_r[order])


def to_spectral(params: TSParams, quad: QuadratureOptions = DEFAULT_QUAD,
                nodes: int = DEFAULT_GRID_NODES, lower: float = DEFAULT_GRID_LOWER) -> SpectralForm:
    """
    Spectral form of a proper measure: sigma(u) = int |x|^alpha R(dx) along u and
    Q_u the normalised image of |x|^alpha R(dx) under x -> |x|^-p.

    Atoms map exactly; density profiles go through a grid.
    """
    alpha, p, measure = params.alpha, params.p, params.measure
    if not is_proper(alpha, measure, quad):
        raise NotProperError(f"integral of |x|^{alpha} against R diverges")

    directions, sigma, qu = [], [], []
    for direction, members in measure.direction_groups():
        weight = sum(measure.rays[i].profile.power_integral(alpha, quad=quad) for i in members)
        if weight <= 0:
            continue
        directions.append(direction)
        sigma.append(float(weight))
        qu.append(tuple(_pushforward_to_q(measure.rays[i].profile, alpha, p, weight, nodes, lower)
                        for i in members))
    return SpectralForm(tuple(directions), tuple(sigma), tuple(qu), alpha, p, measure.dim)


def from_spectral(form: SpectralForm, alpha: Optional[float] = None, p: Optional[float] = None,
                  nodes: int = DEFAULT_GRID_NODES, lower: float = DEFAULT_GRID_LOWER) -> RosinskiMeasure:
    """Rosinski measure R(A) = int 1_A(x/|x|^(1+1/p)) |x|^(alpha/p) Q(dx) of a spectral form."""
    alpha = form.alpha if alpha is None else alpha
    p = form.p if p is None else p
    if not form.directions:
        return RosinskiMeasure.zero(form.dim)
    rays = []
    for direction, weight, profiles in zip(form.directions, form.sigma, form.qu):
        if weight == 0:
            continue
        for prof in profiles:
            rays.append(Ray(direction, _pushforward_to_r(prof, alpha, p, weight, nodes, lower)))
    return RosinskiMeasure(form.dim, tuple(rays))


def tempering_function(form: SpectralForm, r: float, u: Union[int, Sequence[float]],
                       p: Optional[float] = None, quad: QuadratureOptions = DEFAULT_QUAD) -> float:
    """q(r^p, u): the Laplace transform of Q_u evaluated at r^p."""
    if not r > 0:
        raise DomainError(f"tempering function needs r > 0, got {r}")
    p = form.p if p is None else p
    idx = form.index_of(u)
    t = r ** p
    return float(sum(prof.integrate(lambda s: math.exp(-t * s), quad=quad) for prof in form.qu[idx]))


def validate_spectral(form: SpectralForm, alpha: Optional[float] = None, p: Optional[float] = None,
                      quad: QuadratureOptions = DEFAULT_QUAD) -> ValidationReport:
    """Levy-measure conditions expressed directly on (sigma, Q_u)."""
    alpha = form.alpha if alpha is None else alpha
    p = form.p if p is None else p
    report = ValidationReport(valid=True)
    if not (math.isfinite(alpha) and alpha < 2):
        report.violations.append(Violation("alpha-range", alpha, f"alpha must be < 2, got {alpha}"))
        report.valid = False
        return report

    large = 0.0
    small = 0.0
    for weight, profiles in zip(form.sigma, form.qu):
        for prof in profiles:
            # t <= 1 corresponds to |x| >= 1
            if alpha > 0:
                lg = prof.mass(0.0, 1.0, quad)
            elif alpha == 0:
                lg = prof.mass(0.0, 1.0, quad) - prof.log_power_integral(0.0, 0.0, 1.0, quad) / p
            else:
                lg = prof.power_integral(alpha / p, 0.0, 1.0, quad)
            sm = prof.power_integral(-(2.0 - alpha) / p, 1.0, math.inf, quad)
            large += weight * lg
            small += weight * sm

    report.integrals["spectral-large-jump-integral"] = large
    report.integrals["spectral-small-jump-integral"] = small
    if _is_infinite(large):
        report.violations.append(Violation("spectral-large-jump-integral", large, "Q-side tail condition diverges"))
    if _is_infinite(small):
        report.violations.append(Violation("spectral-small-jump-integral", small, "Q-side origin condition diverges"))
    report.valid = not report.violations
    return report


def subclass_name(alpha: float, p: float) -> Optional[str]:
    """Classical name of the subfamily with these (alpha, p), if it has one."""
    if p == 1:
        if alpha == 0:
            return "Thorin"
        if alpha == -1:
            return "Goldie-Steutel-Bondesson"
        if 0 < alpha < 2:
            return "Rosinski tempered stable"
    if p == 2:
        if alpha == 0:
            return "type M"
        if alpha == -1:
            return "type G"
        if 0 <= alpha < 2:
            return "tempered infinitely divisible"
    return None


def atom_measure(points: Sequence[Tuple[Sequence[float], float, float]]) -> RosinskiMeasure:
    """Convenience builder: ``points`` holds (direction, radius, weight) triples."""
    if not points:
        raise DomainError("atom_measure needs at least one point")
    rays = tuple(Ray(tuple(d), AtomProfile(r0, w)) for d, r0, w in points)
    return RosinskiMeasure(len(rays[0].direction), rays)


__all__ = [
    "Ray",
    "RosinskiMeasure",
    "TSParams",
    "SpectralForm",
    "Violation",
    "ValidationReport",
    "validate",
    "proper_integral",
    "is_proper",
    "to_spectral",
    "from_spectral",
    "tempering_function",
    "validate_spectral",
    "subclass_name",
    "atom_measure",
]
