"""
Subcommand bodies for the command-line tool.

Each ``cmd_*`` takes the parsed argparse namespace and a loaded ConfigManager,
writes its results (stdout or ``--output``) and returns an exit code.
"""

import itertools
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TextIO

import numpy as np
import pandas as pd

from engine.charfn import cumulant_from_cf, evaluate_grid
from engine.config import ConfigManager
from engine.errors import DomainError, InsufficientSamplesError, MomentInfiniteError
from engine.levy import TailFunction, is_selfdecomposable
from engine.measure import is_proper, subclass_name, validate
from engine.moments import MultiIndex, cumulant, moment_finite
from engine.rv import hill_estimate
from engine.transforms import lower_alpha, materialise, raise_p, verify_membership
from services.doa import DEFAULT_Z_GRID, doa_experiment
from services.sim import SimConfig, sample
from store.batch_io import read_batch, write_batch
from store.params_io import load_params, save_params
from utils.constants import CSV_FLOAT_FORMAT, DEFAULT_CF_GRID, DEFAULT_TAIL_GRID, EXIT_FAILURE, EXIT_OK
from utils.grids import parse_cone, parse_float_list, parse_grid, parse_int_list

log = logging.getLogger(__name__)


def _write_frame(df: pd.DataFrame, output: Optional[str], stream: TextIO = None) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(output, index=False, float_format=CSV_FLOAT_FORMAT)
        log.info("Wrote %d rows to %s", len(df), output)
    else:
        df.to_csv(stream or sys.stdout, index=False, float_format=CSV_FLOAT_FORMAT)


def _echo(line: str, stream: TextIO = None) -> None:
    print(line, file=stream or sys.stdout)


def cmd_validate(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    quad = cm.get_quadrature()
    report = validate(params.alpha, params.measure, quad)
    _echo(f"valid: {str(report.valid).lower()}")
    for v in report.violations:
        _echo(f"violation: {v.name} ({v.message})")
    for name, value in sorted(report.integrals.items()):
        _echo(f"integral {name}: {value:.17g}")
    if not report.valid:
        return EXIT_FAILURE
    proper = is_proper(params.alpha, params.measure, quad)
    sd = is_selfdecomposable(params)
    _echo(f"proper: {str(proper).lower()}")
    _echo(f"selfdecomposable: {'unknown' if sd is None else str(sd).lower()}")
    _echo(f"subclass: {subclass_name(params.alpha, params.p) or 'none'}")
    return EXIT_OK


def _indices_of_order(dim: int, order: int) -> List[MultiIndex]:
    out = []
    for combo in itertools.combinations_with_replacement(range(dim), order):
        ks = [0] * dim
        for i in combo:
            ks[i] += 1
        out.append(MultiIndex(tuple(ks)))
    return out


def cmd_cumulants(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    quad = cm.get_quadrature()
    params.ensure_valid(quad)
    check_cf = bool(args.check_cf)
    cf_opts = cm.get_charfn_options()
    columns = ["index", "order", "finite", "value"] + (["cf_value"] if check_cf else [])
    rows = []
    for order in range(1, int(args.max_order) + 1):
        for k in _indices_of_order(params.dim, order):
            finite = moment_finite(params, k, quad)
            value = math.nan
            if finite:
                try:
                    value = cumulant(params, k, quad)
                except MomentInfiniteError:
                    finite = False
            row = {"index": ",".join(str(v) for v in k.k), "order": order, "finite": finite, "value": value}
            if check_cf:
                row["cf_value"] = (cumulant_from_cf(params, k, cf_opts["h"], cf_opts["levels"], quad)
                                   if finite else math.nan)
            rows.append(row)
    _write_frame(pd.DataFrame(rows, columns=columns), args.output)
    return EXIT_OK


def cmd_tail(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    grid = parse_grid(args.grid or DEFAULT_TAIL_GRID)
    cone = parse_cone(args.cone, len(params.measure.rays))
    fn = TailFunction(params, cone, cm.get_quadrature(), cm.get_max_workers())
    _write_frame(fn.to_frame(grid), args.output)
    return EXIT_OK


def cmd_transform(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    quad = cm.get_quadrature()
    params.ensure_valid(quad)
    if args.target is None:
        raise DomainError("transform needs --target")
    if args.kind == "lower-alpha":
        result = lower_alpha(params, float(args.target))
    elif args.kind == "raise-p":
        result = raise_p(params, float(args.target))
    else:
        raise DomainError(f"unknown transform kind {args.kind!r}")
    if args.grid_export:
        result = materialise(result, int(args.grid_export), float(cm.get("transforms.grid_lower", 1e-6)))
    if not args.output:
        raise DomainError("transform needs --output")
    save_params(result, args.output)
    _echo(f"wrote {args.kind} (target {args.target}) to {args.output}")
    return EXIT_OK


def cmd_diff(args, cm: ConfigManager) -> int:
    """Compare the Levy tails of --input and --other; exit 1 when they differ beyond --tol."""
    a = load_params(args.input)
    b = load_params(args.other)
    grid = parse_grid(args.grid or DEFAULT_TAIL_GRID)
    report = verify_membership(a, b, grid, tol=float(args.tol), quad=cm.get_quadrature())
    _write_frame(report.table, args.output)
    _echo(f"max relative deviation: {report.max_rel_deviation:.17g} (tol {report.tol:g})",
          sys.stderr if not args.output else None)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_cf(args, cm: ConfigManager) -> int:
    """Exponent C(z) and e^C(z) along one coordinate axis."""
    params = load_params(args.input)
    params.ensure_valid(cm.get_quadrature())
    axis = int(args.axis)
    if not 0 <= axis < params.dim:
        raise DomainError(f"--axis {axis} outside 0..{params.dim - 1}")
    w = parse_grid(args.grid or DEFAULT_CF_GRID)
    z = np.zeros((len(w), params.dim))
    z[:, axis] = w
    exponent = evaluate_grid(params, z, cm.get_quadrature(), cm.get_charfn_options()["filon_threshold"])
    cf = np.exp(exponent)
    df = pd.DataFrame({"w": w, "re_exponent": exponent.real, "im_exponent": exponent.imag,
                       "re_cf": cf.real, "im_cf": cf.imag})
    _write_frame(df, args.output)
    return EXIT_OK


def cmd_simulate(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    config = SimConfig.from_config(cm.get_sim_defaults(), epsilon=args.epsilon, n=args.n,
                                   seed=args.seed, small_jump=args.small_jump)
    batch = sample(params, config, max_workers=cm.get_max_workers(), quad=cm.get_quadrature(),
                   grid_nodes=int(cm.get("transforms.grid_nodes", 2048)),
                   grid_lower=float(cm.get("transforms.grid_lower", 1e-6)))
    if not args.output:
        raise DomainError("simulate needs --output")
    write_batch(batch.values, args.output)
    d = batch.diagnostics
    _echo(f"n={batch.n} dim={batch.dim} lambda={d.lam:.17g} epsilon={config.epsilon:g} seed={config.seed}")
    return EXIT_OK


def cmd_hill(args, cm: ConfigManager) -> int:
    values = read_batch(args.input)
    n = values.shape[0]
    k = args.k or max(1, int(round(float(cm.get("rv.hill_k_fraction", 0.002)) * n)))
    rows = []
    for j in range(values.shape[1]):
        col = values[:, j]
        for side, data in (("+", col), ("-", -col)):
            try:
                index = hill_estimate(data, k)
            except (DomainError, InsufficientSamplesError) as e:
                log.warning("No Hill estimate for coordinate %d side %s: %s", j, side, e)
                index = math.nan
            rows.append({"coordinate": j, "side": side, "k": k, "index": index})
    _write_frame(pd.DataFrame(rows, columns=["coordinate", "side", "k", "index"]), args.output)
    return EXIT_OK


def cmd_doa(args, cm: ConfigManager) -> int:
    params = load_params(args.input)
    sim_cfg = cm.get_sim_defaults()
    report = doa_experiment(
        params,
        n_values=parse_int_list(args.n_values, (100, 1000, 10000)),
        m_sums=int(args.m),
        seed=int(args.seed if args.seed is not None else sim_cfg.get("seed", 0)),
        epsilon=float(args.epsilon if args.epsilon is not None else sim_cfg.get("epsilon", 1e-2)),
        z_grid=parse_float_list(cm.get("rv.z_grid"), DEFAULT_Z_GRID),
        max_workers=cm.get_max_workers(),
        quad=cm.get_quadrature(),
    )
    _write_frame(report.table, args.output)
    _echo(f"gamma={report.gamma:g} monotone={str(report.monotone).lower()} noise_tol={report.noise_tol:.3g}",
          sys.stderr if not args.output else None)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[Any, ConfigManager], int]] = {
    "validate": cmd_validate,
    "cumulants": cmd_cumulants,
    "tail": cmd_tail,
    "transform": cmd_transform,
    "diff": cmd_diff,
    "cf": cmd_cf,
    "simulate": cmd_simulate,
    "hill": cmd_hill,
    "doa": cmd_doa,
}

__all__ = ["COMMANDS"] + [f.__name__ for f in COMMANDS.values()]
