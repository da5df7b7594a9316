"""Command-line front end: solve, certify, benchmark, and export.

Subcommands
-----------
solve
    Solve one instance (from a JSON file or a generated recipe) and write the
    equilibrium artifact as JSON.  Exit 0 iff the solve converged and the
    certified gap is within tolerance, 1 if not, 2 on input errors.
check
    Re-certify a solve artifact: recompute worst-case risk of the stored
    estimator and the value of the stored covariance pair, print both and
    their gap.  Exit 0 iff the gap is within tolerance.
benchmark
    Iteration/wall-time comparison of the solver variants across dimensions;
    CSV or JSON rows.  Wall times are excluded from CSV unless --timings is
    given, so fixed-seed runs are byte-identical.
regret
    Out-of-sample regret of the robust estimator over a radius grid, one row
    per (run, grid point).
export
    Write a linear SDP reformulation of an instance in SDPA sparse format.

Instance files are JSON objects with fields H, mu_x, mu_w, sigma_x, sigma_w
(row-major nested arrays) and scalars rho_x, rho_w.  All randomness is
controlled by --seed; there are no environment-variable overrides.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .dual_solver import (
    VARIANTS,
    CovariancePair,
    FwConfig,
    ProblemInstance,
    objective_f,
)
from .errors import DrmmseError, InvalidConfig, InvalidInput
from .estimator import AffineEstimator, solve_nash, worst_case_risk
from .experiments import (
    InstanceRecipe,
    benchmark_scalability,
    default_rho_grid,
    instance_from_recipe,
    make_rng,
    regret_experiment,
    summarize_regret,
)
from .gelbrich import MomentPair
from .sdp_export import default_header, emit_dual_sdp, emit_primal_sdp, render_dat_s

__all__ = ["RunConfig", "main", "cmd_solve", "cmd_check", "cmd_benchmark", "cmd_regret", "cmd_export"]

SCHEMA_VERSION = 1

_NEEDS_INSTANCE = ("solve", "export")


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: subcommand, instance source, solver overrides, output."""

    subcommand: str
    instance_path: str | None = None
    dim: int | None = None
    rho_x: float | None = None
    rho_w: float | None = None
    seed: int = 0
    variant: str = "fully_adaptive"
    delta: float = 0.99
    gap_tol: float = 1e-3
    max_iters: int = 500
    out: str | None = None
    fmt: str = "csv"
    dims: tuple[int, ...] = (10, 50)
    variants: tuple[str, ...] = VARIANTS
    runs: int = 3
    samples: int = 100
    grid_points: int = 5
    include_zero: bool = False
    which: str = "dual"
    use_cholesky: bool = False
    timings: bool = False

    def __post_init__(self):
        if self.subcommand in _NEEDS_INSTANCE:
            sources = (self.instance_path is not None) + (self.dim is not None)
            if sources != 1:
                raise InvalidConfig(
                    f"{self.subcommand} needs exactly one instance source "
                    "(--instance FILE or --dim D)"
                )
        if self.subcommand == "check" and self.instance_path is None:
            raise InvalidConfig("check needs --instance ARTIFACT")
        if self.subcommand == "export" and self.out is None:
            raise InvalidConfig("export needs --out FILE")


# ---------------------------------------------------------------------------
# Instance and artifact plumbing
# ---------------------------------------------------------------------------


def _array(data, name: str) -> np.ndarray:
    try:
        return np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} is not a numeric array: {exc}") from exc


def _instance_from_json(data) -> ProblemInstance:
    if not isinstance(data, dict):
        raise InvalidInput("instance must be a JSON object")
    try:
        H = _array(data["H"], "H")
        nominal_x = MomentPair(_array(data["mu_x"], "mu_x"), _array(data["sigma_x"], "sigma_x"))
        nominal_w = MomentPair(_array(data["mu_w"], "mu_w"), _array(data["sigma_w"], "sigma_w"))
        rho_x = float(data["rho_x"])
        rho_w = float(data["rho_w"])
    except KeyError as exc:
        raise InvalidInput(f"instance is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad instance field: {exc}") from exc
    return ProblemInstance(H, nominal_x, nominal_w, rho_x, rho_w)


def _instance_to_json(instance: ProblemInstance) -> dict:
    return {
        "H": instance.H.tolist(),
        "mu_x": instance.nominal_x.mean.tolist(),
        "sigma_x": instance.nominal_x.cov.tolist(),
        "mu_w": instance.nominal_w.mean.tolist(),
        "sigma_w": instance.nominal_w.cov.tolist(),
        "rho_x": instance.rho_x,
        "rho_w": instance.rho_w,
    }


def _load_instance(cfg: RunConfig) -> ProblemInstance:
    if cfg.instance_path is not None:
        with open(cfg.instance_path, "r", encoding="utf-8") as fh:
            return _instance_from_json(json.load(fh))
    d = cfg.dim
    if d is None or d < 1:
        raise InvalidConfig("--dim must be a positive integer")
    rho_x = cfg.rho_x if cfg.rho_x is not None else float(np.sqrt(d))
    rho_w = cfg.rho_w if cfg.rho_w is not None else float(np.sqrt(d))
    recipe = InstanceRecipe(n=d, m=d, seed=cfg.seed)
    return instance_from_recipe(recipe, rho_x, rho_w, make_rng(cfg.seed))


def _fw_config(cfg: RunConfig, variant: str | None = None) -> FwConfig:
    return FwConfig(
        variant=variant or cfg.variant,
        delta=cfg.delta,
        gap_tol=cfg.gap_tol,
        max_iters=cfg.max_iters,
    )


def _gap_tolerance(gap_tol: float, value: float) -> float:
    return max(1e-6, 2.0 * gap_tol) * max(1.0, abs(value))


def _write_text(out: str | None, text: str):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    instance = _load_instance(cfg)
    solution = solve_nash(instance, _fw_config(cfg))
    report = solution.report
    artifact = {
        "schema_version": SCHEMA_VERSION,
        "instance": _instance_to_json(instance),
        "A": solution.estimator.A.tolist(),
        "b": solution.estimator.b.tolist(),
        "sigma_x": solution.least_favorable.sigma_x.tolist(),
        "sigma_w": solution.least_favorable.sigma_w.tolist(),
        "value": solution.value,
        "gap": solution.gap,
        "iterations": report.iterations,
        "converged": report.converged,
    }
    _write_text(cfg.out, json.dumps(artifact, indent=2) + "\n")
    ok = report.converged and solution.gap <= _gap_tolerance(cfg.gap_tol, solution.value)
    return 0 if ok else 1


def cmd_check(cfg: RunConfig) -> int:
    with open(cfg.instance_path, "r", encoding="utf-8") as fh:
        artifact = json.load(fh)
    if not isinstance(artifact, dict):
        raise InvalidInput("artifact must be a JSON object")
    try:
        instance = _instance_from_json(artifact["instance"])
        estimator = AffineEstimator(_array(artifact["A"], "A"), _array(artifact["b"], "b"))
        pair = CovariancePair(
            _array(artifact["sigma_x"], "sigma_x"), _array(artifact["sigma_w"], "sigma_w")
        )
    except KeyError as exc:
        raise InvalidInput(f"artifact is missing field {exc.args[0]!r}") from exc
    primal = worst_case_risk(estimator, instance)
    dual = objective_f(pair, instance.H)
    gap = primal - dual
    sys.stdout.write(f"primal: {primal!r}\n")
    sys.stdout.write(f"dual: {dual!r}\n")
    sys.stdout.write(f"gap: {gap!r}\n")
    return 0 if gap <= _gap_tolerance(cfg.gap_tol, dual) else 1


def cmd_benchmark(cfg: RunConfig) -> int:
    configs = tuple(_fw_config(cfg, variant=v) for v in cfg.variants)
    rows = benchmark_scalability(cfg.dims, configs, cfg.runs, make_rng(cfg.seed))
    header = ["dim", "variant", "run_id", "iterations", "converged", "final_gap"]
    table = [[r.dim, r.variant, r.run_id, r.iterations, r.converged, r.final_gap] for r in rows]
    if cfg.timings:
        header.append("wall_time")
        for row, r in zip(table, rows):
            row.append(r.wall_time)
    if cfg.fmt == "json":
        payload = [dict(zip(header, row)) for row in table]
        _write_text(cfg.out, json.dumps({"schema_version": SCHEMA_VERSION, "rows": payload}, indent=2) + "\n")
    else:
        _write_text(cfg.out, _rows_to_csv(header, table))
    return 0


def cmd_regret(cfg: RunConfig) -> int:
    if cfg.dim is None or cfg.dim < 1:
        raise InvalidConfig("regret needs --dim D (square instances)")
    recipe = InstanceRecipe(n=cfg.dim, m=cfg.dim, seed=cfg.seed)
    grid = default_rho_grid(points=cfg.grid_points, include_zero=cfg.include_zero)
    rows = regret_experiment(
        recipe,
        grid,
        runs=cfg.runs,
        samples_per_run=cfg.samples,
        rng=make_rng(cfg.seed),
        config=_fw_config(cfg),
    )
    header = ["rho_x", "rho_w", "run_id", "regret"]
    table = [[r.rho_x, r.rho_w, r.run_id, r.regret] for r in rows]
    if cfg.fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "rows": [dict(zip(header, row)) for row in table],
            "summary": _jsonable(summarize_regret(rows)),
        }
        _write_text(cfg.out, json.dumps(payload, indent=2) + "\n")
    else:
        _write_text(cfg.out, _rows_to_csv(header, table))
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def cmd_export(cfg: RunConfig) -> int:
    instance = _load_instance(cfg)
    if cfg.which == "primal":
        problem = emit_primal_sdp(instance, use_cholesky=cfg.use_cholesky)
    else:
        problem = emit_dual_sdp(instance)
    text = render_dat_s(problem, default_header(instance, cfg.which))
    _write_text(cfg.out, text)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {exc}")


def _variant_list(text: str) -> tuple[str, ...]:
    parts = tuple(t for t in text.split(",") if t)
    for p in parts:
        if p not in VARIANTS:
            raise argparse.ArgumentTypeError(f"unknown variant {p!r} (choose from {', '.join(VARIANTS)})")
    return parts


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed for all randomness")
    common.add_argument("--delta", type=float, default=0.99, help="oracle accuracy in (0,1)")
    common.add_argument("--gap-tol", type=float, default=1e-3, help="surrogate-gap stopping threshold")
    common.add_argument("--max-iters", type=int, default=500, help="iteration cap")
    common.add_argument(
        "--variant", choices=VARIANTS, default="fully_adaptive", help="stepsize rule"
    )
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv",
                        help="tabular output format (benchmark/regret)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--instance", dest="instance_path", default=None,
                        help="instance JSON file")
    source.add_argument("--dim", type=int, default=None,
                        help="generate a square random instance of this dimension")
    source.add_argument("--rho-x", type=float, default=None, help="state radius (default sqrt(dim))")
    source.add_argument("--rho-w", type=float, default=None, help="noise radius (default sqrt(dim))")

    parser = argparse.ArgumentParser(
        prog="drmmse",
        description="Robust minimum-MSE estimation under moment ambiguity.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("solve", parents=[common, source],
                   help="solve an instance and write the equilibrium artifact")

    p_check = sub.add_parser("check", parents=[common],
                             help="re-certify a solve artifact")
    p_check.add_argument("--instance", dest="instance_path", required=True,
                         help="solve artifact JSON file")

    p_bench = sub.add_parser("benchmark", parents=[common],
                             help="compare solver variants across dimensions")
    p_bench.add_argument("--dims", type=_int_list, default=(10, 50),
                         help="comma-separated dimensions (default 10,50)")
    p_bench.add_argument("--variants", type=_variant_list, default=VARIANTS,
                         help="comma-separated variants (default all)")
    p_bench.add_argument("--runs", type=int, default=3, help="runs per dimension")
    p_bench.add_argument("--timings", action="store_true",
                         help="include wall times in CSV (breaks byte determinism)")

    p_regret = sub.add_parser("regret", parents=[common],
                              help="out-of-sample regret over a radius grid")
    p_regret.add_argument("--dim", type=int, default=20, help="state/noise dimension")
    p_regret.add_argument("--runs", type=int, default=10, help="independent runs")
    p_regret.add_argument("--samples", type=int, default=100, help="samples per nominal estimate")
    p_regret.add_argument("--grid-points", type=int, default=5,
                          help="positive radius-grid points per axis")
    p_regret.add_argument("--include-zero", action="store_true",
                          help="add the zero radius to each grid axis")

    p_export = sub.add_parser("export", parents=[common, source],
                              help="write a linear SDP reformulation (SDPA sparse)")
    p_export.add_argument("--which", choices=("primal", "dual"), default="dual",
                          help="estimator-side (primal) or covariance-side (dual) encoding")
    p_export.add_argument("--cholesky", dest="use_cholesky", action="store_true",
                          help="use Cholesky factors instead of symmetric square roots")

    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "check": cmd_check,
    "benchmark": cmd_benchmark,
    "regret": cmd_regret,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fields = {f for f in RunConfig.__dataclass_fields__}
    kwargs = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    try:
        cfg = RunConfig(**kwargs)
        return _COMMANDS[cfg.subcommand](cfg)
    except DrmmseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
