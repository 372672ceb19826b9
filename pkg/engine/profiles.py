"""
Radial profiles: the one-dimensional building blocks of a Rosinski measure.

A ray of the measure carries one profile describing how its mass is spread
over radii in (0, inf). ``atom``, ``pareto`` and ``grid`` are user-facing kinds;
``alpha_shift`` and ``p_shift`` are the exact outputs of the parameter-change
transforms and integrate through their source profile.

Divergence of power and log-power integrals is decided from two exponents:
``tail_index`` (mass beyond r decays like r^-tail_index) and ``origin_index``
(integrals of r^q near 0 diverge iff q <= origin_index).
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Callable, ClassVar, Dict, Optional, Tuple

import numpy as np
from scipy import integrate, special

from .config import DEFAULT_QUAD, QuadratureOptions
from .errors import DomainError
from .quadrature import int1d, int1d_log, times_exp
from .special_fn import StableDensityOrder, stable_density

log = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]

DEFAULT_GRID_NODES = 2048
DEFAULT_GRID_LOWER = 1e-6


def stable_negative_moment(gamma_exp: float, r: float) -> float:
    """E[S^gamma_exp] for S positive r-stable with Laplace transform exp(-t^r); finite iff gamma_exp < r."""
    if not gamma_exp < r:
        return math.inf
    return float(special.gamma(1.0 - gamma_exp / r) / special.gamma(1.0 - gamma_exp))


class RadialProfile(ABC):
    """Radial part of one ray of a Rosinski measure."""

    kind: ClassVar[str] = ""

    # ------------------------------------------------------------------ core
    @abstractmethod
    def integrate(self, f: ScalarFn, lo: float = 0.0, hi: float = math.inf,
                  quad: QuadratureOptions = DEFAULT_QUAD) -> float:
        """Return the integral of f(r) over lo < r <= hi against the profile."""

    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed hull (inf, sup) of the radii carrying mass."""

    @property
    @abstractmethod
    def tail_index(self) -> float:
        """Decay exponent of the mass beyond r; ``math.inf`` for bounded or light tails."""

    @property
    @abstractmethod
    def origin_index(self) -> float:
        """Largest q for which the integral of r^q near 0 diverges; ``-math.inf`` if bounded away."""

    @abstractmethod
    def scaled(self, factor: float) -> "RadialProfile":
        """Profile with every mass multiplied by ``factor``."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    # ------------------------------------------------------------ derived
    @property
    def bounded(self) -> bool:
        return math.isfinite(self.support()[1])

    def is_zero(self) -> bool:
        return False

    def tail_coefficient(self) -> float:
        """c in mass(r, inf) ~ c r^-tail_index; 0 when the tail is not of power type."""
        return 0.0

    def upper_edge_exponent(self) -> Optional[float]:
        """Exponent e with density ~ (sup - r)^e at the upper edge; None for a point mass there."""
        return 0.0

    def density(self, r: np.ndarray) -> np.ndarray:
        raise DomainError(f"{self.kind} profile has no density")

    def _power_closed(self, q: float, lo: float, hi: float, quad: QuadratureOptions) -> Optional[float]:
        return None

    def _diverges(self, q: float, lo: float, hi: float) -> bool:
        if hi <= lo:
            return False
        if math.isinf(hi) and not self.bounded and q >= self.tail_index:
            return True
        if lo == 0.0 and q <= self.origin_index:
            return True
        return False

    def power_integral(self, q: float, lo: float = 0.0, hi: float = math.inf,
                       quad: QuadratureOptions = DEFAULT_QUAD) -> float:
        """Integral of r^q over lo < r <= hi; ``math.inf`` when it diverges."""
        if hi <= lo or self.is_zero():
            return 0.0
        if self._diverges(q, lo, hi):
            return math.inf
        closed = self._power_closed(q, lo, hi, quad)
        if closed is not None:
            return closed
        return self.integrate(lambda r: r ** q, lo, hi, quad)

    def log_power_integral(self, q: float, lo: float = 1.0, hi: float = math.inf,
                           quad: QuadratureOptions = DEFAULT_QUAD) -> float:
        """Integral of r^q log r over lo < r <= hi; ``math.inf`` when it diverges."""
        if hi <= lo or self.is_zero():
            return 0.0
        if self._diverges(q, lo, hi):
            return math.inf
        return self.integrate(lambda r: r ** q * math.log(r), lo, hi, quad)

    def mass(self, lo: float = 0.0, hi: float = math.inf,
             quad: QuadratureOptions = DEFAULT_QUAD) -> float:
        return self.power_integral(0.0, lo, hi, quad)

    def to_grid(self, nodes: int = DEFAULT_GRID_NODES, lower: float = DEFAULT_GRID_LOWER,
                quad: QuadratureOptions = DEFAULT_QUAD) -> "RadialProfile":
        """Return a grid representation; kinds that are already explicit return themselves."""
        return self

    def __add__(self, other):
        return NotImplemented


class AtomProfile(RadialProfile):
    """Point mass ``w`` at radius ``r0``."""

    kind = "atom"

    def __init__(self, r0: float, w: float):
        if not (math.isfinite(r0) and r0 > 0):
            raise DomainError(f"atom radius must be positive, got {r0}")
        if not (math.isfinite(w) and w > 0):
            raise DomainError(f"atom weight must be positive, got {w}")
        self.r0 = float(r0)
        self.w = float(w)

    def integrate(self, f, lo=0.0, hi=math.inf, quad=DEFAULT_QUAD):
        if lo < self.r0 <= hi:
            return self.w * f(self.r0)
        return 0.0

    def support(self):
        return (self.r0, self.r0)

    @property
    def tail_index(self):
        return math.inf

    @property
    def origin_index(self):
        return -math.inf

    def upper_edge_exponent(self):
        return None

    def _power_closed(self, q, lo, hi, quad):
        return self.w * self.r0 ** q if lo < self.r0 <= hi else 0.0

    def scaled(self, factor):
        return AtomProfile(self.r0, self.w * factor)

    def to_dict(self):
        return {"kind": self.kind, "r0": self.r0, "w": self.w}

    def __eq__(self, other):
        return isinstance(other, AtomProfile) and self.r0 == other.r0 and self.w == other.w

    def __repr__(self):
        return f"AtomProfile(r0={self.r0!r}, w={self.w!r})"


class ParetoProfile(RadialProfile):
    """
    Density c*rho*r^(-rho-1) on (r0, inf).

    r0 = 0 gives the pure power profile on (0, inf) used by the stable embedding.
    """

    kind = "pareto"

    def __init__(self, r0: float, rho: float, c: float):
        if not (math.isfinite(r0) and r0 >= 0):
            raise DomainError(f"pareto r0 must be >= 0, got {r0}")
        if not (math.isfinite(rho) and rho > 0):
            raise DomainError(f"pareto rho must be positive, got {rho}")
        if not (math.isfinite(c) and c > 0):
            raise DomainError(f"pareto c must be positive, got {c}")
        self.r0 = float(r0)
        self.rho = float(rho)
        self.c = float(c)
        self._log_coef = math.log(self.c * self.rho)

    def integrate(self, f, lo=0.0, hi=math.inf, quad=DEFAULT_QUAD):
        a = max(lo, self.r0)

        def weighted(r: float) -> float:
            return times_exp(f(r), self._log_coef - (self.rho + 1.0) * math.log(r))

        return int1d_log(weighted, a, hi, quad)

    def support(self):
        return (self.r0, math.inf)

    @property
    def tail_index(self):
        return self.rho

    @property
    def origin_index(self):
        return self.rho if self.r0 == 0.0 else -math.inf

    def tail_coefficient(self):
        return self.c

    def density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > self.r0, self.c * self.rho * r ** (-self.rho - 1.0), 0.0)

    def _power_closed(self, q, lo, hi, quad):
        a = max(lo, self.r0)
        if hi <= a:
            return 0.0
        e = q - self.rho
        if e == 0.0:
            return self.c * self.rho * math.log(hi / a)
        upper = 0.0 if math.isinf(hi) else hi ** e
        lower = 0.0 if a == 0.0 else a ** e
        return self.c * self.rho * (upper - lower) / e

    def log_power_integral(self, q, lo=1.0, hi=math.inf, quad=DEFAULT_QUAD):
        a = max(lo, self.r0)
        if hi <= a:
            return 0.0
        if self._diverges(q, lo, hi):
            return math.inf
        e = q - self.rho

        def antiderivative(r: float) -> float:
            if math.isinf(r) or r == 0.0:
                return 0.0
            lr = math.log(r)
            if e == 0.0:
                return 0.5 * lr * lr
            return r ** e * (lr / e - 1.0 / (e * e))

        return self.c * self.rho * (antiderivative(hi) - antiderivative(a))

    def scaled(self, factor):
        return ParetoProfile(self.r0, self.rho, self.c * factor)

    def to_grid(self, nodes=DEFAULT_GRID_NODES, lower=DEFAULT_GRID_LOWER, quad=DEFAULT_QUAD):
        return self

    def to_dict(self):
        return {"kind": self.kind, "r0": self.r0, "rho": self.rho, "c": self.c}

    def __eq__(self, other):
        return (isinstance(other, ParetoProfile) and self.r0 == other.r0
                and self.rho == other.rho and self.c == other.c)

    def __repr__(self):
        return f"ParetoProfile(r0={self.r0!r}, rho={self.rho!r}, c={self.c!r})"


class GridProfile(RadialProfile):
    """Density tabulated on ascending radii, integrated with the trapezoid rule."""

    kind = "grid"

    def __init__(self, rs, density):
        rs = np.asarray(rs, dtype=float)
        dens = np.asarray(density, dtype=float)
        if rs.ndim != 1 or rs.shape != dens.shape or rs.size < 2:
            raise DomainError("grid profile needs matching 1-d radii and density with >= 2 nodes")
        if not np.all(np.isfinite(rs)) or rs[0] <= 0 or np.any(np.diff(rs) <= 0):
            raise DomainError("grid radii must be positive and strictly ascending")
        if not np.all(np.isfinite(dens)) or np.any(dens < 0):
            raise DomainError("grid density must be finite and non-negative")
        self.rs = rs
        self.values = dens

    def _clip(self, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
        a = max(lo, self.rs[0])
        b = min(hi, self.rs[-1])
        if b <= a:
            return np.empty(0), np.empty(0)
        inner = (self.rs > a) & (self.rs < b)
        xs = np.concatenate(([a], self.rs[inner], [b]))
        return xs, np.interp(xs, self.rs, self.values)

    def integrate(self, f, lo=0.0, hi=math.inf, quad=DEFAULT_QUAD):
        xs, ds = self._clip(lo, hi)
        if xs.size == 0:
            return 0.0
        fx = np.array([f(float(x)) if d > 0 else 0.0 for x, d in zip(xs, ds)])
        return float(integrate.trapezoid(fx * ds, xs))

    def support(self):
        return (float(self.rs[0]), float(self.rs[-1]))

    @property
    def tail_index(self):
        return math.inf

    @property
    def origin_index(self):
        return -math.inf

    def is_zero(self):
        return not np.any(self.values > 0)

    def upper_edge_exponent(self):
        return 0.0 if self.values[-1] > 0 else 1.0

    def density(self, r):
        return np.interp(np.asarray(r, dtype=float), self.rs, self.values, left=0.0, right=0.0)

    def _power_closed(self, q, lo, hi, quad):
        xs, ds = self._clip(lo, hi)
        if xs.size == 0:
            return 0.0
        return float(integrate.trapezoid(xs ** q * ds, xs))

    def scaled(self, factor):
        return GridProfile(self.rs, self.values * factor)

    def to_dict(self):
        return {"kind": self.kind, "rs": self.rs.tolist(), "density": self.values.tolist()}

    def __eq__(self, other):
        return (isinstance(other, GridProfile) and np.array_equal(self.rs, other.rs)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"GridProfile(nodes={self.rs.size}, support=[{self.rs[0]:g}, {self.rs[-1]:g}])"


def _materialise(profile: RadialProfile, radii: np.ndarray) -> GridProfile:
    dens = np.asarray(profile.density(radii), dtype=float)
    keep = np.isfinite(dens)
    if not np.all(keep):
        log.debug("Dropping %d non-finite density nodes from %s grid", int((~keep).sum()), profile.kind)
    return GridProfile(radii[keep], np.maximum(dens[keep], 0.0))


def _span(profile: RadialProfile, lower: float) -> Tuple[float, float]:
    lo, hi = profile.support()
    if lo <= 0:
        lo = lower
    if math.isinf(hi):
        hi = max(lo, 1.0) / lower
    return lo, hi


class AlphaShiftProfile(RadialProfile):
    """
    Rosinski measure obtained by lowering the stability index from ``beta`` to ``alpha``.

    For every source radius rho the mass is spread over (0, rho] with density
    K^-1 (r/rho)^(-beta-1) (1-(r/rho)^p)^(c-1) / rho, c = (beta-alpha)/p and
    K = Gamma(c)/p.
    """

    kind = "alpha_shift"

    def __init__(self, source: RadialProfile, beta: float, alpha: float, p: float):
        if not (alpha < beta < 2):
            raise DomainError(f"alpha shift needs alpha < beta < 2, got alpha={alpha}, beta={beta}")
        if not p > 0:
            raise DomainError(f"p must be positive, got {p}")
        self.source = source
        self.beta = float(beta)
        self.alpha = float(alpha)
        self.p = float(p)
        self.c = (self.beta - self.alpha) / self.p
        self.norm = float(special.gamma(self.c)) / self.p

    def _inner(self, f: ScalarFn, rho: float, lo: float, hi: float, quad: QuadratureOptions) -> float:
        u_lo = lo / rho
        u_hi = min(hi / rho, 1.0)
        if u_hi <= u_lo:
            return 0.0
        beta, p, c = self.beta, self.p, self.c
        u_mid = 2.0 ** (-1.0 / p)

        total = 0.0
        a_hi = min(u_hi, u_mid)
        if a_hi > u_lo:
            def near_origin(u: float) -> float:
                return times_exp(f(u * rho) * (1.0 - u ** p) ** (c - 1.0), -(beta + 1.0) * math.log(u))
            total += int1d_log(near_origin, u_lo, a_hi, quad)

        b_lo = max(u_lo, u_mid)
        if u_hi > b_lo:
            v_a = 1.0 - u_hi ** p
            v_b = 1.0 - b_lo ** p

            def near_edge(v: float) -> float:
                one_minus = 1.0 - v
                return f(rho * one_minus ** (1.0 / p)) * one_minus ** (-beta / p - 1.0)

            if u_hi >= 1.0:
                part = int1d(near_edge, 0.0, v_b, quad, weight="alg", wvar=(c - 1.0, 0.0))
            else:
                part = int1d(lambda v: near_edge(v) * v ** (c - 1.0), v_a, v_b, quad)
            total += part / p
        return total / self.norm

    def integrate(self, f, lo=0.0, hi=math.inf, quad=DEFAULT_QUAD):
        return self.source.integrate(lambda rho: self._inner(f, rho, lo, hi, quad), lo, math.inf, quad)

    def support(self):
        return (0.0, self.source.support()[1])

    @property
    def tail_index(self):
        return self.source.tail_index

    @property
    def origin_index(self):
        return max(self.beta, self.source.origin_index)

    def is_zero(self):
        return self.source.is_zero()

    def tail_coefficient(self):
        idx = self.tail_index
        if not math.isfinite(idx) or idx <= self.beta:
            return 0.0
        return self.source.tail_coefficient() * float(special.beta((idx - self.beta) / self.p, self.c)) / (self.p * self.norm)

    def upper_edge_exponent(self):
        src = self.source.upper_edge_exponent()
        return self.c - 1.0 if src is None else src + self.c

    def density(self, r):
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        beta, p, c = self.beta, self.p, self.c

        def at(x: float) -> float:
            def kernel(rho: float) -> float:
                u = x / rho
                if u >= 1.0:
                    return 0.0
                return u ** (-beta - 1.0) * (1.0 - u ** p) ** (c - 1.0) / rho
            return self.source.integrate(kernel, x, math.inf) / self.norm

        return np.array([at(float(x)) if x > 0 else 0.0 for x in rs])

    def _power_closed(self, q, lo, hi, quad):
        a = (q - self.beta) / self.p
        if a <= 0:
            return None
        scale = float(special.beta(a, self.c)) / (self.p * self.norm)
        if lo == 0.0 and math.isinf(hi):
            return scale * self.source.power_integral(q, quad=quad)

        def piece(rho: float) -> float:
            w_hi = min(1.0, hi / rho) ** self.p
            w_lo = min(1.0, lo / rho) ** self.p
            return rho ** q * float(special.betainc(a, self.c, w_hi) - special.betainc(a, self.c, w_lo))

        return scale * self.source.integrate(piece, lo, math.inf, quad)

    def scaled(self, factor):
        return AlphaShiftProfile(self.source.scaled(factor), self.beta, self.alpha, self.p)

    def to_grid(self, nodes=DEFAULT_GRID_NODES, lower=DEFAULT_GRID_LOWER, quad=DEFAULT_QUAD):
        lo, hi = _span(self.source, lower)
        radii = np.geomspace(lower * lo, hi * (1.0 - 1e-9), nodes)
        log.warning("Materialising alpha_shift profile on %d nodes over [%g, %g]", nodes, radii[0], radii[-1])
        return _materialise(self, radii)

    def to_dict(self):
        return {"kind": self.kind, "beta": self.beta, "alpha": self.alpha, "p": self.p,
                "source": self.source.to_dict()}

    def __eq__(self, other):
        return (isinstance(other, AlphaShiftProfile) and self.source == other.source
                and (self.beta, self.alpha, self.p) == (other.beta, other.alpha, other.p))

    def __repr__(self):
        return f"AlphaShiftProfile(beta={self.beta!r}, alpha={self.alpha!r}, p={self.p!r}, source={self.source!r})"


class PShiftProfile(RadialProfile):
    """
    Rosinski measure obtained by raising the tempering exponent from ``p`` to ``q``.

    Every source radius rho is smeared to rho*s^(-1/q) with weight
    s^(alpha/q) f_{p/q}(s) ds, where f_{p/q} is the positive (p/q)-stable density.
    """

    kind = "p_shift"

    def __init__(self, source: RadialProfile, alpha: float, p: float, q: float):
        if not (0 < p < q):
            raise DomainError(f"p shift needs 0 < p < q, got p={p}, q={q}")
        if not alpha < 2:
            raise DomainError(f"alpha must be < 2, got {alpha}")
        self.source = source
        self.alpha = float(alpha)
        self.p = float(p)
        self.q = float(q)
        self.order = StableDensityOrder(self.p / self.q)

    @property
    def exact_kernel(self) -> bool:
        return self.order.exact

    def _inner(self, f: ScalarFn, rho: float, lo: float, hi: float, quad: QuadratureOptions) -> float:
        s_lo = 0.0 if math.isinf(hi) else (rho / hi) ** self.q
        s_hi = math.inf if lo == 0.0 else (rho / lo) ** self.q
        a_q = self.alpha / self.q

        def weighted(s: float) -> float:
            dens = stable_density(s, self.order, quad)
            if dens == 0.0:
                return 0.0
            return f(rho * s ** (-1.0 / self.q)) * s ** a_q * dens

        return int1d_log(weighted, s_lo, s_hi, quad)

    def integrate(self, f, lo=0.0, hi=math.inf, quad=DEFAULT_QUAD):
        return self.source.integrate(lambda rho: self._inner(f, rho, lo, hi, quad), 0.0, math.inf, quad)

    def support(self):
        return (0.0, math.inf)

    @property
    def tail_index(self):
        return self.source.tail_index

    @property
    def origin_index(self):
        return max(self.alpha - self.p, self.source.origin_index)

    def is_zero(self):
        return self.source.is_zero()

    def tail_coefficient(self):
        idx = self.tail_index
        if not math.isfinite(idx):
            return 0.0
        return self.source.tail_coefficient() * stable_negative_moment((self.alpha - idx) / self.q, self.order.r)

    def density(self, r):
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        q, a_q = self.q, self.alpha / self.q

        def at(x: float) -> float:
            def kernel(rho: float) -> float:
                s = (rho / x) ** q
                return q * rho ** q * x ** (-q - 1.0) * s ** a_q * stable_density(s, self.order)
            return self.source.integrate(kernel, 0.0, math.inf)

        return np.array([at(float(x)) if x > 0 else 0.0 for x in rs])

    def _power_closed(self, q, lo, hi, quad):
        if lo == 0.0 and math.isinf(hi):
            moment = stable_negative_moment((self.alpha - q) / self.q, self.order.r)
            return moment * self.source.power_integral(q, quad=quad)
        return None

    def scaled(self, factor):
        return PShiftProfile(self.source.scaled(factor), self.alpha, self.p, self.q)

    def to_grid(self, nodes=DEFAULT_GRID_NODES, lower=DEFAULT_GRID_LOWER, quad=DEFAULT_QUAD):
        r = self.order.r
        s_min = 200.0 ** (-(1.0 - r) / r)
        s_max = 1.0 / lower
        lo, hi = _span(self.source, lower)
        radii = np.geomspace(lo * s_max ** (-1.0 / self.q), hi * s_min ** (-1.0 / self.q), nodes)
        log.warning("Materialising p_shift profile on %d nodes over [%g, %g]", nodes, radii[0], radii[-1])
        return _materialise(self, radii)

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "p": self.p, "q": self.q,
                "source": self.source.to_dict()}

    def __eq__(self, other):
        return (isinstance(other, PShiftProfile) and self.source == other.source
                and (self.alpha, self.p, self.q) == (other.alpha, other.p, other.q))

    def __repr__(self):
        return f"PShiftProfile(alpha={self.alpha!r}, p={self.p!r}, q={self.q!r}, source={self.source!r})"


def profile_from_dict(data: Dict[str, Any]) -> RadialProfile:
    """Build a profile from its serialised mapping; raises KeyError/DomainError on bad input."""
    kind = data["kind"]
    if kind == AtomProfile.kind:
        return AtomProfile(float(data["r0"]), float(data["w"]))
    if kind == ParetoProfile.kind:
        return ParetoProfile(float(data["r0"]), float(data["rho"]), float(data["c"]))
    if kind == GridProfile.kind:
        return GridProfile([float(v) for v in data["rs"]], [float(v) for v in data["density"]])
    if kind == AlphaShiftProfile.kind:
        return AlphaShiftProfile(profile_from_dict(data["source"]), float(data["beta"]),
                                 float(data["alpha"]), float(data["p"]))
    if kind == PShiftProfile.kind:
        return PShiftProfile(profile_from_dict(data["source"]), float(data["alpha"]),
                             float(data["p"]), float(data["q"]))
    raise DomainError(f"unknown profile kind {kind!r}")


__all__ = [
    "RadialProfile",
    "AtomProfile",
    "ParetoProfile",
    "GridProfile",
    "AlphaShiftProfile",
    "PShiftProfile",
    "profile_from_dict",
    "stable_negative_moment",
]
