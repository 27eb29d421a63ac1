"""Command-line front end.

    freqlab describe|sweep|verify|solve|doubling --config PATH [--out DIR] [--dump-grid PATH]

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 solver nonconvergence.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import battery
from .config import ConfigError, ExperimentConfig, load_config
from .errors import FreqlabError, NonconvergenceError
from .fields import SOLID_HARMONICS_3D, ScalarField, pde_residual
from .report import emit_report, summary, summary_line
from .solver import write_grid, to_field

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2, 3

CATALOG = [
    "harmonic:2d:k=<k>:cos|sin        Re/Im (x1 + i x2)^k",
    "harmonic:3d:k=<k>:m=<m>          real solid harmonic, k <= 4, |m| <= k",
    "affine:a=<a1,..,an>[:l0=<c>]     affine function",
    "const:c=<c>[:n=<n>]              constant",
    "drift-exp:b=<b1,..,bn>           exp(b.x), solves Laplace(u) = b.grad(u)",
    "p-radial:p=<p>[:n=<n>][:rmin=r]  |x|^((p-n)/(p-1)), p-harmonic off the origin",
    "ramp:a=<a>[:l0=<c>][:power=<q>]  max(a.x + l0, 0)^q",
    "<c>*<field> + <c>*<field>        linear combination (spaces around '+')",
    "solve                            grid solution from the [solver] section",
]

log = logging.getLogger("freqlab")


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path.cwd()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def _emit(reports, path: Path):
    try:
        emit_report(reports, path)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def _status(reports) -> int:
    print(summary_line(reports))
    return EXIT_FAIL if summary(reports)[0] else EXIT_OK


def _spot_points(field: ScalarField, cfg: ExperimentConfig) -> np.ndarray:
    c = battery.center_of(cfg, field.n)
    dirs = np.eye(field.n)
    rs = (cfg.start, 0.5 * (cfg.start + cfg.stop), cfg.stop)
    return np.array([c + r * d for r in rs for d in dirs])


def cmd_describe(cfg: ExperimentConfig, args) -> int:
    print("field catalog:")
    for line in CATALOG:
        print("  " + line)
    print(f"3D solid harmonics tabulated: {len(SOLID_HARMONICS_3D)}")
    if cfg.field is None:
        return EXIT_OK
    field, _ = battery.build_field(cfg)
    print(f"field: {field.name}")
    print(f"  dimension: {field.n}")
    print(f"  equation: {field.equation or 'none'}")
    print(f"  domain: {field.domain_note}")
    eq = field.equation
    for x in _spot_points(field, cfg):
        if eq == "laplace":
            res = pde_residual(field, x, "laplace")
        elif eq == "drift":
            res = pde_residual(field, x, "drift", b=field.drift_b)
        elif eq == "plaplace":
            res = pde_residual(field, x, "plaplace", p=field.p, epsilon=1e-12)
        else:
            res = float("nan")
        print(f"  residual at ({', '.join(f'{v:.6g}' for v in x)}): {res:.3e}")
    return EXIT_OK


def cmd_sweep(cfg, args) -> int:
    field, sol = battery.build_field(cfg)
    _maybe_dump(sol, args, cfg)
    profile = battery.run_sweep(field, cfg)
    path = _out_dir(args) / cfg.csv_name
    _write(path, profile.to_csv())
    print(f"wrote {path}")
    errors = [s for s in profile.samples if s.error]
    for s in errors:
        print(f"sample r={s.r:.6g} failed: {s.error}", file=sys.stderr)
    return EXIT_FAIL if errors else EXIT_OK


def _verify(field, cfg, args, solver_cfg=None) -> int:
    profile, reports = battery.run_verify(field, cfg, solver_cfg=solver_cfg)
    out = _out_dir(args)
    _write(out / cfg.csv_name, profile.to_csv())
    _emit(reports, out / cfg.report_name)
    print(f"wrote {out / cfg.csv_name}, {out / cfg.report_name}")
    return _status(reports)


def cmd_verify(cfg, args) -> int:
    field, sol = battery.build_field(cfg)
    _maybe_dump(sol, args, cfg)
    return _verify(field, cfg, args, cfg.solver if sol is not None else None)


def _maybe_dump(sol, args, cfg=None):
    target = args.dump_grid
    if target is None and cfg is not None and cfg.grid_name:
        target = _out_dir(args) / cfg.grid_name
    if sol is not None and target:
        try:
            write_grid(sol, target)
        except OSError as exc:
            raise ConfigError(f"cannot write grid {target}: {exc}") from None
        print(f"wrote grid {target}")


def cmd_solve(cfg, args) -> int:
    if cfg.solver is None:
        raise ConfigError("solve needs a [solver] section")
    sol = battery.run_solver(cfg.solver)
    print(f"solved {cfg.solver.equation} on [{cfg.solver.a:g}, {cfg.solver.b:g}]^2, h={cfg.solver.h:g}: "
          f"{sol.iterations} iterations, residual {sol.residual:.3e}")
    _maybe_dump(sol, args, cfg)
    chain = cfg.solver.chain
    if chain == "none":
        return EXIT_OK
    field = to_field(sol)
    if chain == "sweep":
        profile = battery.run_sweep(field, cfg)
        path = _out_dir(args) / cfg.csv_name
        _write(path, profile.to_csv())
        print(f"wrote {path}")
        return EXIT_OK
    return _verify(field, cfg, args, cfg.solver)


def cmd_doubling(cfg, args) -> int:
    field, sol = battery.build_field(cfg)
    _maybe_dump(sol, args, cfg)
    profile, reports, r_star = battery.run_doubling(field, cfg)
    out = _out_dir(args)
    _write(out / cfg.csv_name, profile.to_csv())
    _emit(reports, out / cfg.report_name)
    print(f"r_star = {r_star:.17g} (r_b = {profile.radii[0]:.17g})")
    return _status(reports)


COMMANDS = {
    "describe": cmd_describe,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "doubling": cmd_doubling,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqlab", description="Frequency-function verification laboratory.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="experiment configuration file")
    parser.add_argument("--out", help="output directory (default: current directory)")
    parser.add_argument("--dump-grid", dest="dump_grid", help="write the solver grid to PATH")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except NonconvergenceError as exc:
        print(f"freqlab: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (FreqlabError, ValueError) as exc:
        print(f"freqlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
