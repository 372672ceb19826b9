"""
Parameter files.

A params file is YAML with top-level fields ``alpha``, ``p``, ``b`` and
``measure: {dim, rays: [{direction, profile: {kind, ...}}]}``. Floats are
written with their shortest round-trip representation.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from engine.errors import ParamsFileError
from engine.measure import RosinskiMeasure, TSParams
from engine.profiles import ParetoProfile, RadialProfile

log = logging.getLogger(__name__)

PathLike = Union[str, Path]
REQUIRED_FIELDS = ("alpha", "p", "measure")


def params_to_dict(params: TSParams) -> Dict[str, Any]:
    return {
        "alpha": float(params.alpha),
        "p": float(params.p),
        "b": [float(v) for v in params.b],
        "measure": params.measure.to_dict(),
    }


def _check_radii(profile: RadialProfile) -> None:
    # r0 = 0 pareto profiles only come out of the stable embedding
    while profile is not None:
        if isinstance(profile, ParetoProfile) and not profile.r0 > 0:
            raise ParamsFileError(f"pareto r0 must be positive in a params file, got {profile.r0}")
        profile = getattr(profile, "source", None)


def params_from_dict(data: Any) -> TSParams:
    """Build TSParams from a parsed mapping; schema problems raise ParamsFileError."""
    if not isinstance(data, dict):
        raise ParamsFileError("params file must contain a mapping at top level")
    missing = [k for k in REQUIRED_FIELDS if k not in data]
    if missing:
        raise ParamsFileError(f"params file is missing fields: {', '.join(missing)}")
    try:
        measure = RosinskiMeasure.from_dict(data["measure"])
        for ray in measure.rays:
            _check_radii(ray.profile)
        b = data.get("b")
        b = tuple(float(v) for v in b) if b is not None else (0.0,) * measure.dim
        return TSParams(float(data["alpha"]), float(data["p"]), b, measure)
    except (KeyError, TypeError, ValueError) as e:
        raise ParamsFileError(f"malformed params file: {e!r}") from e


def load_params(path: PathLike) -> TSParams:
    """
    Read a params file.

    Unreadable, malformed or out-of-range content (non-unit directions,
    alpha >= 2, unknown profile kinds) raises ParamsFileError.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as e:
        log.error("Cannot read params file %s: %s", path, e)
        raise ParamsFileError(f"cannot read {path}: {e}") from e
    except yaml.YAMLError as e:
        log.error("Invalid YAML in %s: %s", path, e)
        raise ParamsFileError(f"invalid YAML in {path}: {e}") from e
    params = params_from_dict(data)
    log.debug("Loaded params from %s: alpha=%g p=%g dim=%d rays=%d",
              path, params.alpha, params.p, params.dim, len(params.measure.rays))
    return params


def save_params(params: TSParams, path: PathLike) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(params_to_dict(params), fh, sort_keys=False, default_flow_style=None)
    log.info("Params written to %s", path)
    return path


__all__ = ["params_to_dict", "params_from_dict", "load_params", "save_params"]
