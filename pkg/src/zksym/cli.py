"""Command-line interface ``zk``.

Exit codes: 0 when every asserted check passes, 1 when one fails, 2 for usage
or configuration errors, 3 for I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import pipeline
from .report import Report, discrepancies, discrepancy_markdown, write_json
from .solutions import DEFAULT_GRID, GridSpec, catalog

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

CONFIG_KEYS = {"seed", "tol", "out", "grid", "params"}
GRID_KEYS = {"n", "box", "t_box", "inactive"}
SUBCOMMANDS = ("algebra", "check-symmetries", "verify-solution", "reduce", "integrate", "mi-spectrum", "conserve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _span(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    if not b > a:
        raise argparse.ArgumentTypeError("span must be increasing")
    return a, b


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _linspace(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) > 2 else 401
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"expected lo:hi[:n], got {text!r}")
    if len(parts) > 3 or n < 2 or not hi > lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi, n


def _generators(text: str) -> list[int]:
    out = []
    for v in text.split(","):
        v = v.strip().upper().lstrip("D")
        if not v.isdigit() or not 1 <= int(v) <= 7:
            raise argparse.ArgumentTypeError(f"generators are D1..D7, got {text!r}")
        out.append(int(v))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with seed, tol, out, grid, params")
    common.add_argument("--out", type=Path, help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="random seed (default: 42)")
    common.add_argument("--tol", type=float, help="override the residual tolerance")

    p = _Parser(prog="zk", description="Lie symmetry analysis of u_t + a u u_x + u_xx + u_yy + u_zz = 0.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sub.add_parser("algebra", parents=[common], help="commutators, adjoint action, invariants")
    sub.add_parser("check-symmetries", parents=[common], help="invariance of the seven generators")

    v = sub.add_parser("verify-solution", parents=[common], help="PDE residuals of closed-form solutions")
    v.add_argument("--name", default="all", help="solution name or 'all'")
    v.add_argument("--no-closure", action="store_true", help="skip the group-transform closure checks")
    v.add_argument("--figures", action="store_true", help="also write Figure 1-7 slices")

    sub.add_parser("reduce", parents=[common], help="residuals of reduced equations")

    i = sub.add_parser("integrate", parents=[common], help="integrate the reduced ODEs")
    i.add_argument("--ode", help="fig11..fig15 or an alias; all figures when omitted")
    i.add_argument("--method", choices=("rk4", "rkf45", "both"), default="both")
    i.add_argument("--h", type=float, default=0.01)
    i.add_argument("--rtol", type=float, default=1e-8)
    i.add_argument("--atol", type=float, default=1e-8)
    i.add_argument("--span", type=_span, help="lo:hi; use --span=-5:5 for negative bounds")
    i.add_argument("--figures", action="store_true", help="also write Figure 11-15 data")

    m = sub.add_parser("mi-spectrum", parents=[common], help="modulation-instability spectrum")
    m.add_argument("--p", type=_floats, default=[1.0, 2.0, 3.0], help="comma-separated p values")
    m.add_argument("--A", type=_linspace, default=(0.0, 4.0, 401), help="lo:hi:n")
    m.add_argument("--figures", action="store_true", help="also write Figure 8-9 data")

    c = sub.add_parser("conserve", parents=[common], help="conserved vectors")
    c.add_argument("--generator", type=_generators, help="comma-separated D1..D7 (default all)")
    c.add_argument("--psi", help="multiplier expression (default: the self-adjoint family)")
    c.add_argument("--solution", default="u1")
    c.add_argument("--table6", action=argparse.BooleanOptionalAction, default=None,
                   help="cross-check the printed conserved vectors (default on for a full run)")

    r = sub.add_parser("report", parents=[common], help="aggregate check files into the report")
    r.add_argument("--run-all", action="store_true", help="run every analysis first")
    return p


def load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"config file {path} not found")
    if not text.strip():
        raise UsageError(f"config file {path} is empty")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path}: {e}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    bad = set(cfg) - CONFIG_KEYS
    if bad:
        raise UsageError(f"unknown config keys: {', '.join(sorted(bad))}")
    bad = set(cfg.get("grid", {})) - GRID_KEYS
    if bad:
        raise UsageError(f"unknown grid keys: {', '.join(sorted(bad))}")
    return cfg


def settings_from(args, cfg: dict) -> pipeline.Settings:
    grid = DEFAULT_GRID
    g = cfg.get("grid", {})
    try:
        if g:
            kw = {k: (tuple(v) if isinstance(v, list) else v) for k, v in g.items()}
            grid = replace(GridSpec(), **kw)
        out = Path(args.out or cfg.get("out", "out"))
        seed = int(args.seed if args.seed is not None else cfg.get("seed", 42))
        tol = args.tol if args.tol is not None else cfg.get("tol")
        params = {str(k): float(v) for k, v in cfg.get("params", {}).items()}
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad config value: {e}")
    if tol is not None and not float(tol) > 0:
        raise UsageError("tol must be positive")
    return pipeline.Settings(out, seed, None if tol is None else float(tol), params, grid,
                             getattr(args, "figures", False))


def run_command(cmd: str, args, s: pipeline.Settings):
    if cmd == "algebra":
        return pipeline.run_algebra(s)
    if cmd == "check-symmetries":
        return pipeline.run_symmetries(s)
    if cmd == "verify-solution":
        name = getattr(args, "name", "all")
        if name != "all" and name not in {r.name for r in catalog()}:
            raise UsageError(f"unknown solution {name!r}; known: {', '.join(r.name for r in catalog())}")
        return pipeline.run_solutions(s, None if name == "all" else [name],
                                      closure=not getattr(args, "no_closure", False))
    if cmd == "reduce":
        return pipeline.run_reduce(s)
    if cmd == "integrate":
        ode_name = getattr(args, "ode", None)
        try:
            return pipeline.run_integrate(s, ode_name, getattr(args, "method", "both"), getattr(args, "h", 0.01),
                                          getattr(args, "rtol", 1e-8), getattr(args, "atol", 1e-8),
                                          getattr(args, "span", None))
        except KeyError as e:
            raise UsageError(str(e.args[0]))
        except ValueError as e:
            raise UsageError(str(e))
    if cmd == "mi-spectrum":
        lo, hi, n = getattr(args, "A", (0.0, 4.0, 401))
        try:
            return pipeline.run_mi(s, getattr(args, "p", [1.0, 2.0, 3.0]), (lo, hi), n)
        except ValueError as e:
            raise UsageError(str(e))
    if cmd == "conserve":
        gens = getattr(args, "generator", None)
        psi = getattr(args, "psi", None)
        t6 = getattr(args, "table6", None)
        if t6 is None:
            t6 = gens is None and psi is None
        try:
            return pipeline.run_conserve(s, gens, psi, getattr(args, "solution", "u1"), t6)
        except KeyError as e:
            raise UsageError(str(e.args[0]))
    raise UsageError(f"unknown command {cmd}")


def _stem(cmd: str) -> str:
    return cmd.replace("-", "_")


def aggregate(out: Path) -> Report:
    report = Report()
    for f in sorted((out / "checks").glob("*.json")):
        report.extend(Report.from_dict(json.loads(f.read_text(encoding="utf-8"))).checks)
    return report


def write_report(out: Path, report: Report) -> None:
    write_json(out / "report.json", report.as_dict())
    items = discrepancies(report)
    write_json(out / "discrepancy.json", {"discrepancies": items})
    (out / "discrepancy.md").write_text(discrepancy_markdown(items), encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("zk: error: a subcommand is required", file=sys.stderr)
            return EXIT_USAGE
        s = settings_from(args, load_config(args.config))
        if args.command == "report":
            if args.run_all:
                s = replace(s, figures=True)
                for cmd in SUBCOMMANDS:
                    checks = run_command(cmd, argparse.Namespace(), s)
                    write_json(s.out / "checks" / f"{_stem(cmd)}.json", Report(checks).as_dict())
            report = aggregate(s.out)
            write_report(s.out, report)
        else:
            report = Report(run_command(args.command, args, s))
            write_json(s.out / "checks" / f"{_stem(args.command)}.json", report.as_dict())
    except UsageError as e:
        print(f"zk: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"zk: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    print(report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
