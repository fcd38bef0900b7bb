"""Command-line entry point: run scenarios, verify invariants, export configs.

Exit codes: 0 success, 1 failed checks or dynamics errors, 2 usage or
config errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, dynamics, plots, traceio, verify
from .config import dump_config, load_config
from .dynamics import NonFiniteState, NotPositiveDefinite
from .model import ConstraintViolation
from .scenarios import BUILTIN_SCENARIOS, ConfigError, Scenario, scenario_from_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _resolve_scenario(ref: str) -> Scenario:
    """Accept a config file path or a built-in name ('two_link',
    'scenarios/two_link')."""
    path = Path(ref)
    if path.is_file():
        return scenario_from_config(load_config(path), name=path.stem)
    name = ref.removeprefix("scenarios/")
    if name in BUILTIN_SCENARIOS:
        return scenario_from_config(BUILTIN_SCENARIOS[name]())
    raise ConfigError(
        f"no config file or built-in scenario {ref!r}; built-ins: {sorted(BUILTIN_SCENARIOS)}"
    )


def cmd_run(args) -> int:
    try:
        scenario = _resolve_scenario(args.scenario)
    except (ConfigError, ConstraintViolation, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    # Flag > config > default.
    duration = args.duration if args.duration is not None else scenario.duration
    dt = args.dt if args.dt is not None else scenario.dt
    projection = scenario.projection
    if args.projection:
        projection = True
    if args.no_projection:
        projection = False

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        trace = dynamics.integrate(
            scenario.model, scenario.initial_state, scenario.force_law(),
            duration, dt, projection=projection,
        )
    except NotPositiveDefinite as exc:
        print(f"error: multiplier system not positive definite at t={exc.t:.6g}", file=sys.stderr)
        return EXIT_FAILURE
    except NonFiniteState as exc:
        print(f"error: non-finite state at t={exc.t:.6g}", file=sys.stderr)
        return EXIT_FAILURE

    diags = analysis.compute_diagnostics(trace, setpoint=scenario.setpoint)
    summary = analysis.summarize(trace, setpoint=scenario.setpoint)

    traceio.write_trace_csv(trace, diags, out_dir / "trace.csv")
    kv_lines = [f"{key}={val}" for key, val in summary.as_dict().items()]
    (out_dir / "summary.kv").write_text("\n".join(kv_lines) + "\n")
    if not args.no_plots:
        plots.plot_edge_tracking(trace, scenario.setpoint, out_dir / "edge_tracking.svg")
        plots.plot_diagnostics(diags, out_dir)

    print(f"scenario {scenario.name}: {len(trace)} samples over {duration} s (dt={dt})")
    for line in kv_lines:
        print(f"  {line}")
    print(f"outputs in {out_dir}/")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        ok = verify.run_suite(args.suite)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_export(args) -> int:
    if args.name not in BUILTIN_SCENARIOS:
        print(
            f"error: unknown scenario {args.name!r}; available: {sorted(BUILTIN_SCENARIOS)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    dump_config(BUILTIN_SCENARIOS[args.name](), args.path)
    print(f"wrote {args.path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linksim",
        description="Planar tree-linked rigid-rod simulator with decentralized edge control",
    )
    parser.add_argument(
        "--backend",
        choices=dynamics.available_backends(),
        help="dynamics kernel backend (default: compiled when available)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and emit trace/plots")
    p_run.add_argument("scenario", help="config file path or built-in scenario name")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dt", type=float, default=None, help="override integration step [s]")
    p_run.add_argument("--duration", type=float, default=None, help="override duration [s]")
    p_run.add_argument("--projection", action="store_true", help="force constraint projection on")
    p_run.add_argument("--no-projection", action="store_true", help="force constraint projection off")
    p_run.add_argument("--no-plots", action="store_true", help="skip SVG figure generation")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run invariant/oracle verification campaigns")
    p_verify.add_argument("suite", choices=["graph", "dynamics", "control", "oracle", "all"])
    p_verify.set_defaults(func=cmd_verify)

    p_export = sub.add_parser("export", help="write a built-in scenario as an editable config")
    p_export.add_argument("name", help="built-in scenario name")
    p_export.add_argument("path", help="output TOML path")
    p_export.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend:
        dynamics.use_backend(args.backend)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
