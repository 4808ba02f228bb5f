"""Command-line interface.

Subcommands: `state gen`, `measure`, `reconstruct`, `experiment run`,
`experiment preset`, `report summarize`.  Exit codes: 0 on success, 2 on
configuration errors (including bad arguments), 3 on numeric-integrity errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .fileio import load_density_file, save_density_file, save_mpo_file
from .measurement import NumericIntegrityError, collect_shadow, cs_estimate
from .projections import tt_svd
from .rng import RngStream
from .states import DensityMatrix, qubit_count, random_mps_state
from .experiments import (
    ConfigError,
    ExperimentConfig,
    StateSpec,
    emit_csv,
    emit_summary,
    load_config,
    parse_method,
    preset_configs,
    read_trials_csv,
    run_experiment,
    save_config,
    summarize_results,
    write_summary_csv,
    PRESET_NAMES,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcstomo",
        description="Shadow-based quantum state tomography with physical projections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    state = sub.add_parser("state", help="ground-truth state files")
    state_sub = state.add_subparsers(dest="state_command", required=True)
    gen = state_sub.add_parser("gen", help="generate a state and write it to disk")
    gen.add_argument("--family", required=True, choices=("lowrank", "mps", "thermal", "ghz"))
    gen.add_argument("--n", required=True, type=int, help="number of qubits")
    gen.add_argument("--rank", type=int, help="rank for the lowrank family")
    gen.add_argument("--bond-dim", type=int, help="bond dimension for the mps family")
    gen.add_argument("--temperature", type=float, help="temperature for the thermal family")
    gen.add_argument("--seed", type=int, default=0, help="seed for random families")
    gen.add_argument("--out", required=True, help="output density file (RHO1)")
    gen.add_argument("--mpo-out", help="also write a matrix-product file (MPO1)")

    measure = sub.add_parser("measure", help="simulate measurements and write the shadow estimate")
    measure.add_argument("--state", required=True, help="input density file (RHO1)")
    measure.add_argument("--measurements", "-M", required=True, type=int, help="number of single-shot measurements")
    measure.add_argument("--seed", required=True, type=int)
    measure.add_argument("--out", required=True, help="output estimate file (RHO1 container)")
    measure.add_argument("--log", help="optional snapshot log CSV (m,outcome_index,uniform_draw)")

    rec = sub.add_parser("reconstruct", help="project an estimate onto a physical set")
    rec.add_argument("--estimate", required=True, help="input estimate file (RHO1 container)")
    rec.add_argument(
        "--method",
        required=True,
        help="cs | simplex-pcs | lr-pcs:R | mpo-pcs:cap=D | mpo-pcs:tol=T",
    )
    rec.add_argument("--out", required=True, help="output density file (RHO1)")

    exp = sub.add_parser("experiment", help="Monte Carlo experiment grids")
    exp_sub = exp.add_subparsers(dest="experiment_command", required=True)
    run = exp_sub.add_parser("run", help="run one experiment config")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--out", required=True, help="output directory for CSVs")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--seed", type=int, help="override the config master_seed")
    preset = exp_sub.add_parser("preset", help="run a built-in experiment preset")
    preset.add_argument("name", choices=PRESET_NAMES)
    preset.add_argument("--out", help="output directory for CSVs")
    preset.add_argument("--workers", type=int, default=1)
    preset.add_argument("--seed", type=int, help="override the preset master seed")
    preset.add_argument("--scale", choices=("desk", "full"), default="desk")
    preset.add_argument(
        "--emit-config",
        metavar="DIR",
        help="write the preset's config JSONs to DIR instead of running",
    )

    report = sub.add_parser("report", help="post-process result CSVs")
    report_sub = report.add_subparsers(dest="report_command", required=True)
    summ = report_sub.add_parser("summarize", help="aggregate a trials CSV")
    summ.add_argument("trials_csv")
    summ.add_argument("--out", help="summary CSV path (default: stdout)")

    return parser


def _cmd_state_gen(args) -> int:
    spec = StateSpec(
        family=args.family,
        rank=args.rank,
        bond_dim=args.bond_dim,
        temperature=args.temperature,
    )
    stream = RngStream.from_parts(args.seed, "state-gen", spec.label(), args.n)
    rho = spec.build(args.n, stream)
    save_density_file(args.out, rho.matrix)
    print(f"wrote {spec.label()} state on {args.n} qubits to {args.out}")
    if args.mpo_out:
        if args.family == "mps":
            _, mpo = random_mps_state(args.n, args.bond_dim, stream.generator())
        else:
            mpo, _ = tt_svd(rho.matrix, tol=1e-14)
        save_mpo_file(args.mpo_out, mpo)
        print(f"wrote matrix-product form (bonds {mpo.bond_dims}) to {args.mpo_out}")
    return EXIT_OK


def _cmd_measure(args) -> int:
    matrix = load_density_file(args.state)
    try:
        rho = DensityMatrix.from_matrix(matrix)
    except ValueError as exc:
        raise NumericIntegrityError(f"{args.state} is not a physical state: {exc}") from exc
    if args.measurements < 1:
        raise ConfigError(f"--measurements must be >= 1, got {args.measurements}")
    stream = RngStream.from_parts(args.seed, "measure")
    acc = collect_shadow(rho, args.measurements, stream, log_path=args.log)
    save_density_file(args.out, cs_estimate(acc))
    print(f"accumulated {acc.count} measurements into {args.out}")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    method = parse_method(args.method)
    estimate = load_density_file(args.estimate)
    n = qubit_count(estimate.shape[0])
    method.validate_for(n)
    save_density_file(args.out, method.apply(estimate, n))
    print(f"applied {method.label()} to {args.estimate}, wrote {args.out}")
    return EXIT_OK


def _run_and_write(config: ExperimentConfig, out_dir: Path, workers: int) -> None:
    table = run_experiment(config, workers=workers)
    trials_path = out_dir / f"{config.experiment_id}_trials.csv"
    summary_path = out_dir / f"{config.experiment_id}_summary.csv"
    emit_csv(table, trials_path)
    emit_summary(table, summary_path)
    print(f"{config.experiment_id}: wrote {trials_path} and {summary_path}")


def _cmd_experiment_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _run_and_write(config, out_dir, args.workers)
    return EXIT_OK


def _cmd_experiment_preset(args) -> int:
    seed = args.seed if args.seed is not None else None
    kwargs = {"scale": args.scale}
    if seed is not None:
        kwargs["master_seed"] = seed
    configs = preset_configs(args.name, **kwargs)
    if args.emit_config:
        out_dir = Path(args.emit_config)
        out_dir.mkdir(parents=True, exist_ok=True)
        for config in configs:
            path = out_dir / f"{config.experiment_id}.json"
            save_config(config, path)
            print(f"wrote {path}")
        return EXIT_OK
    if not args.out:
        raise ConfigError("experiment preset requires --out (or --emit-config)")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for config in configs:
        _run_and_write(config, out_dir, args.workers)
    return EXIT_OK


def _cmd_report_summarize(args) -> int:
    rows = summarize_results(read_trials_csv(args.trials_csv))
    if args.out:
        write_summary_csv(rows, args.out)
        print(f"wrote {args.out}")
    else:
        from .experiments import SUMMARY_CSV_HEADER

        print(SUMMARY_CSV_HEADER)
        for r in rows:
            print(
                f"{r.experiment_id},{r.method},{r.method_param},{r.n_qubits},"
                f"{r.num_measurements},{r.trials},{r.mean_mse!r},{r.stderr_mse!r},{r.mean_trace_err!r}"
            )
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "state":
            return _cmd_state_gen(args)
        if args.command == "measure":
            return _cmd_measure(args)
        if args.command == "reconstruct":
            return _cmd_reconstruct(args)
        if args.command == "experiment":
            if args.experiment_command == "run":
                return _cmd_experiment_run(args)
            return _cmd_experiment_preset(args)
        if args.command == "report":
            return _cmd_report_summarize(args)
        parser.error(f"unknown command {args.command!r}")
    except NumericIntegrityError as exc:
        print(f"numeric integrity error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
