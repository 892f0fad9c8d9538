"""Batch front end: validate | sweep | reconstruct | selftest.

Exit codes: 0 success, 1 selftest failure, 2 invalid configuration,
3 solver guard tripped, 4 hull infeasible/unbounded.  Outputs are written
atomically (temp file + rename) so failed runs leave no partial files;
identical config + seed yields byte-identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import RunConfig, load_config
from .errors import (ConfigError, Infeasible, InsufficientTrustedSamples,
                     NearEigenvalue, NearInteriorEigenvalue,
                     QuadratureUnderResolved, TruncationInsufficient, Unbounded)
from .indicator import IndicatorEngine, SweepConfig
from .recon import estimate_support, reconstruct_hull, synth_translated
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_GEOMETRY = 4

_GUARD_ERRORS = (NearEigenvalue, NearInteriorEigenvalue,
                 TruncationInsufficient, QuadratureUnderResolved,
                 InsufficientTrustedSamples)


def _fmt(x: float) -> str:
    """17-significant-digit float serialization (round-trip exact)."""
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.17g}"


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _engine_for(config: RunConfig) -> IndicatorEngine:
    sweep_cfg = SweepConfig(
        problem=config.problem,
        geometry=config.geometry,
        k=config.wave_number,
        medium=config.medium,
        L=config.degree,
        tail_tol=config.tolerances["trace_tail"],
        eigen_guard=config.tolerances["eigen_guard"],
    )
    return IndicatorEngine(sweep_cfg, tau_max=max(config.tau_grid))


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(config_path: str, out_dir: str | None, threads: int, seed: int | None) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    resolved = config.resolved()
    if seed is not None:
        resolved["seed"] = seed
    print(json.dumps(resolved, indent=2, sort_keys=True))
    return EXIT_OK


def _sweep_rows(config: RunConfig, engine: IndicatorEngine, threads: int):
    """Rows sorted by (direction index, t, tau); one worker per direction."""
    c = config.translation
    shifted = bool(np.any(c != 0.0))

    def per_direction(idx):
        rho = config.directions[idx]
        rows = []
        for t in config.t_grid:
            for tau in config.tau_grid:
                s = engine.sample(rho, float(tau), float(t))
                if shifted:
                    s = synth_translated([s], c)[0]
                rows.append((idx, s))
        return rows

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(per_direction, range(len(config.directions))))
    else:
        chunks = [per_direction(i) for i in range(len(config.directions))]
    for chunk in chunks:
        yield from chunk


def cmd_sweep(config_path: str, out_dir: str | None, threads: int, seed: int | None) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    out = out_dir or config.output_dir
    os.makedirs(out, exist_ok=True)
    try:
        engine = _engine_for(config)
        lines = ["rho_x,rho_y,rho_z,tau,t,re_mantissa,im_mantissa,ln_exponent,"
                 "log_abs_I,tail,trusted"]
        for idx, s in _sweep_rows(config, engine, threads):
            rho = config.directions[idx]
            v = s.value
            lines.append(",".join([
                _fmt(rho[0]), _fmt(rho[1]), _fmt(rho[2]),
                _fmt(s.tau), _fmt(s.t),
                _fmt(v.mantissa.real), _fmt(v.mantissa.imag), _fmt(v.exponent),
                _fmt(s.ln_abs), _fmt(s.trace_tail), "1" if s.trusted else "0",
            ]))
    except _GUARD_ERRORS as exc:
        print(f"solver guard: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _atomic_write(os.path.join(out, "sweep.csv"), "\n".join(lines) + "\n")
    print(f"wrote {os.path.join(out, 'sweep.csv')} "
          f"({len(lines) - 1} rows, L={config.degree})")
    return EXIT_OK


def cmd_reconstruct(config_path: str, out_dir: str | None, threads: int,
                    seed: int | None) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    out = out_dir or config.output_dir
    os.makedirs(out, exist_ok=True)
    c = config.translation
    shifted = bool(np.any(c != 0.0))

    def estimate_for(idx):
        rho = config.directions[idx]
        sweep = engine.tau_sweep(rho, 0.0, config.tau_grid)
        if shifted:
            sweep = synth_translated(sweep, c)
        return estimate_support(sweep)

    try:
        engine = _engine_for(config)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                estimates = list(pool.map(estimate_for,
                                          range(len(config.directions))))
        else:
            estimates = [estimate_for(i) for i in range(len(config.directions))]
    except _GUARD_ERRORS as exc:
        print(f"solver guard: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    truth = None
    if config.truth_radius is not None:
        radius = config.truth_radius
        truth = lambda rho: radius + float(np.asarray(c) @ rho)   # noqa: E731
    try:
        mesh, report = reconstruct_hull(estimates, truth_support=truth)
    except (Infeasible, Unbounded) as exc:
        print(f"hull failure: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY

    est_lines = ["rho_x,rho_y,rho_z,h_hat,ci_lo,ci_hi,residual"]
    for e in estimates:
        est_lines.append(",".join([
            _fmt(e.rho[0]), _fmt(e.rho[1]), _fmt(e.rho[2]), _fmt(e.h_hat),
            _fmt(0.5 * e.fit_slope_ci[0]), _fmt(0.5 * e.fit_slope_ci[1]),
            _fmt(e.residual)]))
    _atomic_write(os.path.join(out, "estimates.csv"), "\n".join(est_lines) + "\n")

    off = [f"OFF\n{len(mesh.vertices)} {len(mesh.faces)} 0"]
    for v in mesh.vertices:
        off.append(" ".join(_fmt(float(x)) for x in v))
    for f in mesh.faces:
        off.append("3 " + " ".join(str(int(i)) for i in f))
    _atomic_write(os.path.join(out, "hull.off"), "\n".join(off) + "\n")

    rep = [
        "enclosure reconstruction report",
        f"problem: {config.problem}",
        f"directions: {report['n_directions']}",
        f"truncation degree: {config.degree}",
        f"seed: {seed if seed is not None else config.seed}",
        f"hull volume: {_fmt(report['hull_volume'])}",
        f"hull centroid: "
        + " ".join(_fmt(float(x)) for x in report["centroid"]),
        f"max constraint violation: {_fmt(report['max_constraint_violation'])}",
    ]
    if "sup_support_error" in report:
        rep.append(f"sup support error: {_fmt(report['sup_support_error'])}")
        rep.append(f"mean support error: {_fmt(report['mean_support_error'])}")
    _atomic_write(os.path.join(out, "report.txt"), "\n".join(rep) + "\n")

    print("\n".join(rep))
    return EXIT_OK


def cmd_selftest(inject: str | None) -> int:
    ok = run_selftest(inject=inject)
    return EXIT_OK if ok else EXIT_SELFTEST


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="enclosure",
        description="Enclosure-method reconstruction for the Maxwell system")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("validate", "sweep", "reconstruct"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("selftest")
    p.add_argument("--inject", choices=["mk-sign-flip"], default=None,
                   help="deliberately corrupt M_k (the suites must fail)")

    args = parser.parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.config, args.out, args.threads, args.seed)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.out, args.threads, args.seed)
    if args.command == "reconstruct":
        return cmd_reconstruct(args.config, args.out, args.threads, args.seed)
    if args.command == "selftest":
        return cmd_selftest(args.inject)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
