"""Command-line interface: run, sweep, verify, gap, plot.

Run configurations are JSON files with a problem reference, a protocol block,
an optional integrator block, and output paths:

    {
      "problem": "five_spin",
      "protocol": {"kind": "sboqa", "beta": 2.0,
                   "tau_grid": {"start": 1.0, "stop": 1000.0, "per_decade": 16}},
      "integrator": {"steps": 400, "refine_tol": 1e-6},
      "output": {"csv": "out.csv", "svg": "out.svg"},
      "jobs": 1
    }

Exactly one of protocol.tau / protocol.tau_grid must be present.  Identical
configurations produce byte-identical CSV output.  Failures print one JSON
line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis, dynamics, ising, plotting, sbo
from .analysis import IntegratorConfig
from .sbo import Protocol

__all__ = ["main", "RunConfig", "load_run_config"]


class ConfigError(ValueError):
    """Bad run-configuration file."""


@dataclass(frozen=True)
class RunConfig:
    problem: ising.IsingProblem
    protocol: Protocol
    taus: tuple[float, ...]  # length 1 for a single run
    integrator: IntegratorConfig
    csv_path: str | None
    svg_path: str | None
    jobs: int = 1


def _integrator_from_dict(data: dict) -> IntegratorConfig:
    allowed = {"steps", "steps_per_time", "norm_tol", "refine_tol",
               "max_refinements", "snapshots"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown integrator keys {sorted(unknown)}")
    return IntegratorConfig(**data)


def _taus_from_protocol_block(block: dict) -> tuple[float, ...]:
    has_tau = "tau" in block
    has_grid = "tau_grid" in block
    if has_tau == has_grid:
        raise ConfigError("protocol block needs exactly one of tau / tau_grid")
    if has_tau:
        return (float(block["tau"]),)
    grid = block["tau_grid"]
    if isinstance(grid, dict):
        taus = analysis.tau_grid(float(grid.get("start", 1.0)),
                                 float(grid.get("stop", 1000.0)),
                                 int(grid.get("per_decade", 16)))
        return tuple(float(t) for t in taus)
    return tuple(float(t) for t in grid)


def load_run_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if "problem" not in data or "protocol" not in data:
        raise ConfigError("config requires 'problem' and 'protocol' entries")
    problem = ising.resolve_problem(data["problem"])
    block = dict(data["protocol"])
    taus = _taus_from_protocol_block(block)
    try:
        protocol = Protocol(
            kind=str(block.get("kind", "")).lower(),
            tau=taus[0],
            beta_target=block.get("beta"),
            c=float(block.get("c", sbo.DEFAULT_SCHEDULE_C)),
            eps=float(block.get("eps", sbo.DEFAULT_EPS)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    output = data.get("output", {})
    for out_path in (output.get("csv"), output.get("svg")):
        if out_path and out_path != "-" and not Path(out_path).parent.exists():
            raise ConfigError(f"output directory does not exist: {out_path}")
    return RunConfig(
        problem=problem,
        protocol=protocol,
        taus=taus,
        integrator=_integrator_from_dict(data.get("integrator", {})),
        csv_path=output.get("csv"),
        svg_path=output.get("svg"),
        jobs=int(data.get("jobs", 1)),
    )


def _execute(cfg: RunConfig, csv_override: str | None = None,
             svg_override: str | None = None, jobs_override: int | None = None) -> int:
    jobs = jobs_override if jobs_override is not None else cfg.jobs
    results = analysis.sweep(cfg.protocol, cfg.problem, cfg.taus,
                             cfg.integrator, jobs=jobs)
    buf = io.StringIO()
    analysis.write_csv(results, buf)
    csv_text = buf.getvalue()
    csv_path = csv_override or cfg.csv_path
    svg_path = svg_override or cfg.svg_path
    if csv_path in (None, "-"):
        sys.stdout.write(csv_text)
    else:
        Path(csv_path).write_text(csv_text)
    if svg_path:
        if csv_path in (None, "-"):
            raise ConfigError("svg output requires a csv file path")
        plotting.plot_csv(csv_path, svg_path)
    failures = sum(isinstance(r, analysis.FailedRun) for r in results)
    if failures:
        _error_line("accuracy", f"{failures} run(s) did not converge; "
                                "see __error__ rows in the CSV")
        return 1
    return 0


def _cmd_run(args) -> int:
    cfg = load_run_config(args.config)
    return _execute(cfg, csv_override=args.out, svg_override=args.svg,
                    jobs_override=args.jobs)


def _cmd_sweep(args) -> int:
    problem = ising.resolve_problem(args.problem)
    if args.taus:
        taus = tuple(float(t) for t in args.taus.split(","))
    else:
        taus = tuple(float(t) for t in
                     analysis.tau_grid(args.tau_start, args.tau_stop, args.per_decade))
    protocol = Protocol(kind=args.protocol, tau=taus[0], beta_target=args.beta,
                        c=args.c, eps=args.eps)
    integrator = IntegratorConfig(
        steps=args.steps, steps_per_time=args.steps_per_time,
        norm_tol=args.norm_tol, refine_tol=args.refine_tol,
        max_refinements=args.max_refinements)
    cfg = RunConfig(problem=problem, protocol=protocol, taus=taus,
                    integrator=integrator, csv_path=args.out, svg_path=args.svg,
                    jobs=args.jobs or 1)
    return _execute(cfg)


def _cmd_verify(args) -> int:
    problem = ising.resolve_problem(args.problem)
    ground = ising.enumerate_ground_states(problem)
    print(f"problem: {problem.name or args.problem}")
    print(f"spins: {problem.n}")
    print(f"ground energy: {ground.energy!r}")
    print(f"ground states: {len(ground)}")
    for config in ground.configs:
        print(f"  {ising.config_label(config, problem.n)}  (index {config})")
    if problem.zero_field:
        sectors = ground.sectors(problem.n)
        print(f"flip-pair sectors: {len(sectors)}")
        for sec in sectors:
            print("  " + " / ".join(ising.config_label(c, problem.n) for c in sec))
    return 0


def _cmd_gap(args) -> int:
    if args.k < 2:
        raise ValueError("gap profiles need at least k=2 eigenvalues")
    problem = ising.resolve_problem(args.problem)
    protocol = Protocol(kind=args.protocol, tau=args.tau, beta_target=args.beta,
                        c=args.c, eps=args.eps)
    slices = dynamics.gap_profile(protocol, problem, args.samples, k=args.k)
    lines = ["t,s," + ",".join(f"lambda_{i}" for i in range(args.k)) + ",gap"]
    for sl in slices:
        eig = ",".join(repr(float(v)) for v in sl.eigenvalues)
        gap = repr(float(sl.eigenvalues[1] - sl.eigenvalues[0]))
        lines.append(f"{sl.t!r},{sl.t / protocol.tau!r},{eig},{gap}")
    text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    print(f"min gap: {dynamics.min_gap(slices)!r}", file=sys.stderr)
    return 0


def _cmd_plot(args) -> int:
    plotting.plot_csv(args.csv, args.out, title=args.title or "",
                      reference_lines=tuple(args.refline or ()))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairanneal",
        description="Exact-dynamics fair-sampling experiments on small Ising problems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON run configuration")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="override CSV output path ('-' for stdout)")
    p_run.add_argument("--svg", help="override SVG output path")
    p_run.add_argument("--jobs", type=int, help="worker threads for sweeps")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="tau sweep from command-line flags")
    p_sweep.add_argument("--problem", default="five_spin")
    p_sweep.add_argument("--protocol", required=True, choices=["qa", "sbo", "sboqa"])
    p_sweep.add_argument("--beta", type=float, help="target inverse temperature (sboqa)")
    p_sweep.add_argument("--tau-start", type=float, default=1.0)
    p_sweep.add_argument("--tau-stop", type=float, default=1000.0)
    p_sweep.add_argument("--per-decade", type=int, default=16)
    p_sweep.add_argument("--taus", help="explicit comma-separated tau list")
    p_sweep.add_argument("--c", type=float, default=sbo.DEFAULT_SCHEDULE_C)
    p_sweep.add_argument("--eps", type=float, default=sbo.DEFAULT_EPS)
    p_sweep.add_argument("--steps", type=int, default=400)
    p_sweep.add_argument("--steps-per-time", type=float, default=25.0)
    p_sweep.add_argument("--norm-tol", type=float, default=1e-8)
    p_sweep.add_argument("--refine-tol", type=float, default=1e-6)
    p_sweep.add_argument("--max-refinements", type=int, default=6)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", required=True, help="CSV path ('-' for stdout)")
    p_sweep.add_argument("--svg")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="enumerate and print ground states")
    p_verify.add_argument("--problem", default="five_spin")
    p_verify.set_defaults(func=_cmd_verify)

    p_gap = sub.add_parser("gap", help="spectral gap profile along a protocol")
    p_gap.add_argument("--problem", default="five_spin")
    p_gap.add_argument("--protocol", required=True, choices=["qa", "sbo", "sboqa"])
    p_gap.add_argument("--beta", type=float)
    p_gap.add_argument("--tau", type=float, default=1.0,
                       help="nominal tau (profiles depend on t/tau only)")
    p_gap.add_argument("--samples", type=int, default=41)
    p_gap.add_argument("--k", type=int, default=3)
    p_gap.add_argument("--c", type=float, default=sbo.DEFAULT_SCHEDULE_C)
    p_gap.add_argument("--eps", type=float, default=sbo.DEFAULT_EPS)
    p_gap.add_argument("--out", help="gap CSV path ('-' for stdout)")
    p_gap.set_defaults(func=_cmd_gap)

    p_plot = sub.add_parser("plot", help="render a sweep CSV to SVG")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--title")
    p_plot.add_argument("--refline", type=float, action="append",
                        help="horizontal reference line (repeatable)")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def _error_line(kind: str, detail: str) -> None:
    print(json.dumps({"error": kind, "detail": detail}), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ising.MalformedProblemError) as exc:
        _error_line("config", str(exc))
        return 2
    except plotting.PlotError as exc:
        _error_line("plot", str(exc))
        return 2
    except dynamics.AccuracyError as exc:
        _error_line("accuracy", str(exc))
        return 1
    except ValueError as exc:
        _error_line("invalid", str(exc))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
