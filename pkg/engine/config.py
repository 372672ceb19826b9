"""
Configuration for the tempered stable toolkit.

Numerical settings (quadrature tolerances, grid sizes, CF differencing,
simulation defaults, worker counts) come from a YAML file layered over
``DEFAULTS``; ``ConfigManager`` hands each section to the code that uses it.
"""

import copy
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import yaml
from utils.paths import CONFIG_PATH

log = logging.getLogger(__name__)

THREADS_ENV = "TS_NUM_THREADS"
SMALL_JUMP_MODES = ("gaussian-completion", "drift-only")

DEFAULTS: Dict[str, Any] = {
    "quadrature": {"epsabs": 1e-12, "epsrel": 1e-10, "limit": 200},
    "transforms": {"grid_nodes": 2048, "grid_lower": 1e-6},
    "charfn": {"filon_threshold": 50.0, "fd_step": 1e-3, "richardson_levels": 3},
    "sim": {"epsilon": 1e-2, "chunk_size": 50000, "seed": 0, "small_jump": "gaussian-completion"},
    "rv": {"z_grid": [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0], "hill_k_fraction": 0.002},
    "threads": {"max_workers": 4},
    "logging": {"level": "INFO"},
}

# (dotted key, predicate, message) checked by validate_config
_RULES: List[Tuple[str, Callable[[Any], bool], str]] = [
    ("quadrature.epsabs", lambda v: float(v) > 0, "must be positive"),
    ("quadrature.epsrel", lambda v: float(v) > 0, "must be positive"),
    ("quadrature.limit", lambda v: int(v) >= 1, "must be at least 1"),
    ("transforms.grid_nodes", lambda v: int(v) >= 16, "must be at least 16"),
    ("transforms.grid_lower", lambda v: float(v) > 0, "must be positive"),
    ("charfn.fd_step", lambda v: float(v) > 0, "must be positive"),
    ("charfn.richardson_levels", lambda v: int(v) >= 1, "must be at least 1"),
    ("sim.epsilon", lambda v: float(v) > 0, "must be positive"),
    ("sim.chunk_size", lambda v: int(v) >= 1, "must be at least 1"),
    ("sim.small_jump", lambda v: v in SMALL_JUMP_MODES, "must be 'gaussian-completion' or 'drift-only'"),
    ("threads.max_workers", lambda v: int(v) >= 1, "must be at least 1"),
]


class ConfigError(RuntimeError):
    """The config file cannot be read or does not hold a mapping."""
    pass


@dataclass(frozen=True)
class QuadratureOptions:
    """Tolerances handed to ``scipy.integrate.quad``."""
    epsabs: float = 1e-12
    epsrel: float = 1e-10
    limit: int = 200

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]]) -> "QuadratureOptions":
        section = (config or {}).get("quadrature", {})
        return cls(
            epsabs=float(section.get("epsabs", cls.epsabs)),
            epsrel=float(section.get("epsrel", cls.epsrel)),
            limit=int(section.get("limit", cls.limit)),
        )


DEFAULT_QUAD = QuadratureOptions()


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in override.items():
        if isinstance(out.get(key), dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


class ConfigManager:
    """YAML settings layered over ``DEFAULTS``, loaded lazily."""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = Path(config_path) if config_path else CONFIG_PATH
        self._config: Optional[Dict[str, Any]] = None

    def _read(self) -> Dict[str, Any]:
        path = self.config_path
        try:
            with path.open("r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except PermissionError as e:
            log.error("Config %s is not readable", path)
            raise ConfigError(str(e)) from e
        except yaml.YAMLError as e:
            log.error("Config %s is not valid YAML: %s", path, e)
            raise ConfigError(f"Invalid YAML: {e}") from e
        except OSError as e:
            log.error("Cannot open config %s: %s", path, e)
            raise ConfigError(str(e)) from e
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"Config root must be a mapping, got {type(data).__name__}")
        return data

    def load_config(self) -> Dict[str, Any]:
        if not self.config_path.exists():
            log.info("No config at %s; running on defaults", self.config_path)
            self._config = self.get_default_config()
            return self._config
        user = self._migrate_config(self._read())
        self._config = _deep_merge(self.get_default_config(), user)
        log.info("Config loaded from %s", self.config_path)
        return self._config

    def get_config(self) -> Dict[str, Any]:
        if self._config is None:
            return self.load_config()
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        """Dotted lookup, e.g. ``get("sim.epsilon")``; missing keys give ``default``."""
        node: Any = self.get_config()
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def save_config(self, config: Optional[Dict[str, Any]] = None, config_path: Optional[str] = None):
        if config is not None:
            self._config = config
        if not self._config:
            log.warning("Nothing to save")
            return
        path = Path(config_path) if config_path else self.config_path
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as fh:
                yaml.safe_dump(self._config, fh, sort_keys=False)
        except OSError as e:
            log.error("Cannot write config %s: %s", path, e)
            raise ConfigError(str(e)) from e
        log.info("Config written to %s", path)

    def get_default_config(self) -> Dict[str, Any]:
        return copy.deepcopy(DEFAULTS)

    def _migrate_config(self, user: Dict[str, Any]) -> Dict[str, Any]:
        """Move ``sim.threads`` (older files) to ``threads.max_workers``."""
        sim = user.get("sim")
        if isinstance(sim, dict) and "threads" in sim:
            threads = user.setdefault("threads", {}) or {}
            user["threads"] = threads
            threads.setdefault("max_workers", sim["threads"])
            sim.pop("threads")
            log.info("Migrated sim.threads to threads.max_workers")
        return user

    def validate_config(self) -> List[str]:
        """Problems with the loaded settings, one message per offending key."""
        config = self.get_config()
        errors = [f"Missing required section: {s}" for s in ("quadrature", "sim", "transforms") if s not in config]
        for key, ok, message in _RULES:
            value = self.get(key)
            try:
                good = value is not None and ok(value)
            except (TypeError, ValueError):
                good = False
            if not good:
                errors.append(f"{key} {message}")
        return errors

    def get_quadrature(self) -> QuadratureOptions:
        return QuadratureOptions.from_config(self.get_config())

    def get_max_workers(self) -> int:
        """Worker cap; the TS_NUM_THREADS environment variable wins over the file."""
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                log.warning("Ignoring non-integer %s=%r", THREADS_ENV, env)
        return max(1, int(self.get("threads.max_workers", 4)))

    def get_sim_defaults(self) -> Dict[str, Any]:
        return dict(self.get("sim", {}))

    def get_charfn_options(self) -> Dict[str, Any]:
        """Keyword arguments for the characteristic-function routines."""
        cf = self.get("charfn", {})
        return {
            "filon_threshold": float(cf.get("filon_threshold", 50.0)),
            "h": float(cf.get("fd_step", 1e-3)),
            "levels": int(cf.get("richardson_levels", 3)),
        }


__all__ = ["ConfigError", "ConfigManager", "QuadratureOptions", "DEFAULT_QUAD", "DEFAULTS", "THREADS_ENV"]
