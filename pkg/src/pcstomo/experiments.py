"""Monte Carlo experiment orchestration.

An experiment is a grid over measurement budgets and trials for one ground
truth family.  Every cell (M, trial) derives its own random stream from the
master seed by hashing, so results are identical for any worker count or run
order, and all configured reconstruction methods are applied to the same
shadow estimate within a cell (paired comparison).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .measurement import NumericIntegrityError, collect_shadow, cs_estimate
from .metrics import error_record, summarize
from .projections import lr_pcs, mpo_pcs, project_simplex_state
from .rng import RngStream, hash64
from .states import (
    DENSE_QUBIT_LIMIT,
    DensityMatrix,
    ghz_state,
    random_lowrank_state,
    random_mps_state,
    thermal_state,
)

TRIALS_CSV_HEADER = "experiment_id,method,method_param,n,M,trial,seed,frob_err_sq,trace_err,wall_ms"
SUMMARY_CSV_HEADER = "experiment_id,method,method_param,n,M,trials,mean_mse,stderr_mse,mean_trace_err"

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5")
DEFAULT_PRESET_SEED = 20250809


class ConfigError(ValueError):
    """An experiment description is malformed or out of range."""


# ---------------------------------------------------------------------------
# Ground-truth state specification


@dataclass(frozen=True)
class StateSpec:
    """One ground-truth family with its parameter.

    Families: "lowrank" (rank), "mps" (bond_dim), "thermal" (temperature),
    and "ghz" (no parameter).
    """

    family: str
    rank: int | None = None
    bond_dim: int | None = None
    temperature: float | None = None

    def __post_init__(self):
        given = {
            "rank": self.rank,
            "bond_dim": self.bond_dim,
            "temperature": self.temperature,
        }
        required = {"lowrank": "rank", "mps": "bond_dim", "thermal": "temperature", "ghz": None}
        if self.family not in required:
            raise ConfigError(f"unknown state family {self.family!r}")
        needed = required[self.family]
        for key, value in given.items():
            if key == needed and value is None:
                raise ConfigError(f"state family {self.family!r} requires {key!r}")
            if key != needed and value is not None:
                raise ConfigError(f"state family {self.family!r} does not take {key!r}")
        if self.rank is not None and self.rank < 1:
            raise ConfigError(f"rank must be >= 1, got {self.rank}")
        if self.bond_dim is not None and self.bond_dim < 1:
            raise ConfigError(f"bond_dim must be >= 1, got {self.bond_dim}")
        if self.temperature is not None and not self.temperature > 0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")

    @property
    def is_random(self) -> bool:
        return self.family in ("lowrank", "mps")

    def label(self) -> str:
        if self.family == "lowrank":
            return f"lowrank:r={self.rank}"
        if self.family == "mps":
            return f"mps:d={self.bond_dim}"
        if self.family == "thermal":
            return f"thermal:T={self.temperature!r}"
        return "ghz"

    def validate_for(self, n_qubits: int) -> None:
        if self.family == "lowrank" and self.rank > (1 << n_qubits):
            raise ConfigError(f"rank {self.rank} exceeds dimension {1 << n_qubits}")

    def build(self, n_qubits: int, stream: RngStream) -> DensityMatrix:
        if self.family == "lowrank":
            return random_lowrank_state(n_qubits, self.rank, stream.generator())
        if self.family == "mps":
            amplitudes, _ = random_mps_state(n_qubits, self.bond_dim, stream.generator())
            matrix = np.outer(amplitudes, amplitudes.conj())
            return DensityMatrix(n_qubits, matrix, pure_amplitudes=amplitudes)
        if self.family == "thermal":
            return thermal_state(n_qubits, self.temperature)
        return ghz_state(n_qubits)

    def to_dict(self) -> dict:
        out = {"family": self.family}
        if self.rank is not None:
            out["rank"] = self.rank
        if self.bond_dim is not None:
            out["bond_dim"] = self.bond_dim
        if self.temperature is not None:
            out["temperature"] = self.temperature
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StateSpec":
        if not isinstance(data, dict):
            raise ConfigError(f"state must be an object, got {type(data).__name__}")
        allowed = {"family", "rank", "bond_dim", "temperature"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown state keys: {sorted(unknown)}")
        if "family" not in data:
            raise ConfigError("state requires a 'family' key")
        return cls(
            family=data["family"],
            rank=data.get("rank"),
            bond_dim=data.get("bond_dim"),
            temperature=data.get("temperature"),
        )


# ---------------------------------------------------------------------------
# Reconstruction methods


@dataclass(frozen=True)
class Method:
    """One reconstruction applied to the shadow estimate.

    Kinds: "cs" (raw estimate), "simplex-pcs", "lr-pcs" (rank), and "mpo-pcs"
    (either a hard bond_cap or an adaptive tolerance).
    """

    kind: str
    rank: int | None = None
    bond_cap: int | None = None
    tol: float | None = None

    def __post_init__(self):
        if self.kind in ("cs", "simplex-pcs"):
            if self.rank is not None or self.bond_cap is not None or self.tol is not None:
                raise ConfigError(f"method {self.kind!r} takes no parameters")
        elif self.kind == "lr-pcs":
            if self.rank is None or self.rank < 1:
                raise ConfigError("lr-pcs requires a rank >= 1")
            if self.bond_cap is not None or self.tol is not None:
                raise ConfigError("lr-pcs only takes a rank")
        elif self.kind == "mpo-pcs":
            if (self.bond_cap is None) == (self.tol is None):
                raise ConfigError("mpo-pcs requires exactly one of cap or tol")
            if self.bond_cap is not None and self.bond_cap < 1:
                raise ConfigError(f"bond cap must be >= 1, got {self.bond_cap}")
            if self.tol is not None and not self.tol > 0:
                raise ConfigError(f"tolerance must be positive, got {self.tol}")
            if self.rank is not None:
                raise ConfigError("mpo-pcs does not take a rank")
        else:
            raise ConfigError(f"unknown method kind {self.kind!r}")

    @property
    def param(self) -> str:
        if self.kind == "lr-pcs":
            return str(self.rank)
        if self.kind == "mpo-pcs":
            if self.bond_cap is not None:
                return f"cap={self.bond_cap}"
            return f"tol={self.tol!r}"
        return ""

    def label(self) -> str:
        return self.kind if not self.param else f"{self.kind}:{self.param}"

    def validate_for(self, n_qubits: int) -> None:
        if self.kind == "lr-pcs" and self.rank > (1 << n_qubits):
            raise ConfigError(f"lr-pcs rank {self.rank} exceeds dimension {1 << n_qubits}")

    def apply(self, estimate: np.ndarray, n_qubits: int) -> np.ndarray:
        if self.kind == "cs":
            return estimate
        if self.kind == "simplex-pcs":
            return project_simplex_state(estimate).matrix
        if self.kind == "lr-pcs":
            return lr_pcs(estimate, self.rank).matrix
        return mpo_pcs(estimate, bond_cap=self.bond_cap, tol=self.tol).matrix


def parse_method(text: str) -> Method:
    """Parse a method string: cs | simplex-pcs | lr-pcs:R | mpo-pcs:cap=D | mpo-pcs:tol=T."""
    if not isinstance(text, str):
        raise ConfigError(f"method must be a string, got {type(text).__name__}")
    kind, sep, param = text.partition(":")
    try:
        if kind in ("cs", "simplex-pcs"):
            if sep:
                raise ConfigError(f"method {kind!r} takes no parameter")
            return Method(kind)
        if kind == "lr-pcs":
            return Method(kind, rank=int(param))
        if kind == "mpo-pcs":
            key, eq, value = param.partition("=")
            if key == "cap" and eq:
                return Method(kind, bond_cap=int(value))
            if key == "tol" and eq:
                return Method(kind, tol=float(value))
            raise ConfigError(f"mpo-pcs parameter must be cap=<int> or tol=<float>, got {param!r}")
        raise ConfigError(f"unknown method {text!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad method string {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Experiment configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment grid.

    `fresh_state_per_trial` selects whether each (M, trial) cell draws its own
    random ground truth or every cell shares one fixed state.
    """

    experiment_id: str
    n_qubits: int
    state: StateSpec
    methods: tuple
    m_grid: tuple
    trials: int
    master_seed: int
    fresh_state_per_trial: bool

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        if not self.experiment_id or any(c in self.experiment_id for c in ",\n\r"):
            raise ConfigError(f"bad experiment_id {self.experiment_id!r}")
        if not 1 <= self.n_qubits <= DENSE_QUBIT_LIMIT:
            raise ConfigError(f"n_qubits must be in [1, {DENSE_QUBIT_LIMIT}], got {self.n_qubits}")
        if not self.m_grid or any(m < 1 for m in self.m_grid):
            raise ConfigError(f"m_grid entries must be >= 1, got {self.m_grid}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= int(self.master_seed) < (1 << 64):
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer")
        if not self.methods:
            raise ConfigError("at least one method is required")
        labels = [m.label() for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate methods: {labels}")
        for method in self.methods:
            method.validate_for(self.n_qubits)
        self.state.validate_for(self.n_qubits)
        if not isinstance(self.fresh_state_per_trial, bool):
            raise ConfigError("fresh_state_per_trial must be a boolean")

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "n_qubits": self.n_qubits,
            "state": self.state.to_dict(),
            "methods": [m.label() for m in self.methods],
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "fresh_state_per_trial": self.fresh_state_per_trial,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config must be an object, got {type(data).__name__}")
        required = {
            "experiment_id",
            "n_qubits",
            "state",
            "methods",
            "m_grid",
            "trials",
            "master_seed",
            "fresh_state_per_trial",
        }
        unknown = set(data) - required
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = required - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        if not isinstance(data["methods"], (list, tuple)):
            raise ConfigError("methods must be a list of method strings")
        if not isinstance(data["m_grid"], (list, tuple)):
            raise ConfigError("m_grid must be a list of integers")
        for key in ("n_qubits", "trials", "master_seed"):
            if isinstance(data[key], bool) or not isinstance(data[key], int):
                raise ConfigError(f"{key} must be an integer")
        for m in data["m_grid"]:
            if isinstance(m, bool) or not isinstance(m, int):
                raise ConfigError(f"m_grid entries must be integers, got {m!r}")
        return cls(
            experiment_id=data["experiment_id"],
            n_qubits=data["n_qubits"],
            state=StateSpec.from_dict(data["state"]),
            methods=tuple(parse_method(m) for m in data["methods"]),
            m_grid=tuple(data["m_grid"]),
            trials=data["trials"],
            master_seed=data["master_seed"],
            fresh_state_per_trial=data["fresh_state_per_trial"],
        )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def save_config(config: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Trial execution


@dataclass(frozen=True)
class TrialResult:
    """One (method, M, trial) record."""

    experiment_id: str
    method: str
    method_param: str
    n_qubits: int
    num_measurements: int
    trial_index: int
    seed: int
    frob_err_sq: float
    trace_err: float
    wall_millis: float


@dataclass(frozen=True)
class SummaryRow:
    experiment_id: str
    method: str
    method_param: str
    n_qubits: int
    num_measurements: int
    trials: int
    mean_mse: float
    stderr_mse: float
    mean_trace_err: float


def trial_seed(master_seed: int, experiment_id: str, num_measurements: int, trial_index: int) -> int:
    """Seed of one (M, trial) cell: hash64(master_seed, experiment_id, M, trial)."""
    return hash64(master_seed, experiment_id, "cell", num_measurements, trial_index)


def _state_stream(config: ExperimentConfig, num_measurements: int, trial_index: int) -> RngStream:
    if config.fresh_state_per_trial:
        return RngStream.from_parts(
            config.master_seed, config.experiment_id, "state", num_measurements, trial_index
        )
    return RngStream.from_parts(config.master_seed, config.experiment_id, "state")


def ground_truth(config: ExperimentConfig, num_measurements: int, trial_index: int) -> DensityMatrix:
    """The ground-truth state measured in one cell."""
    return config.state.build(config.n_qubits, _state_stream(config, num_measurements, trial_index))


def run_trial(config: ExperimentConfig, num_measurements: int, trial_index: int):
    """Measure one cell and score every configured method against the ground truth.

    All methods see the same shadow estimate, so the comparison is paired and
    independent of method order.  Returns one TrialResult per method.
    """
    if num_measurements < 1:
        raise ConfigError(f"measurement count must be >= 1, got {num_measurements}")
    seed = trial_seed(config.master_seed, config.experiment_id, num_measurements, trial_index)
    rho_star = ground_truth(config, num_measurements, trial_index)
    acc = collect_shadow(rho_star, num_measurements, RngStream(seed).child("measure"))
    estimate = cs_estimate(acc)

    results = []
    for method in config.methods:
        start = time.perf_counter()
        reconstructed = method.apply(estimate, config.n_qubits)
        wall_millis = (time.perf_counter() - start) * 1e3
        err = error_record(reconstructed, rho_star.matrix)
        results.append(
            TrialResult(
                experiment_id=config.experiment_id,
                method=method.kind,
                method_param=method.param,
                n_qubits=config.n_qubits,
                num_measurements=num_measurements,
                trial_index=trial_index,
                seed=seed,
                frob_err_sq=err.frob_err_sq,
                trace_err=err.trace_err,
                wall_millis=wall_millis,
            )
        )
    return results


def _run_cell(args):
    config, num_measurements, trial_index = args
    coords = f"experiment {config.experiment_id} cell (M={num_measurements}, trial={trial_index})"
    try:
        return run_trial(config, num_measurements, trial_index)
    except NumericIntegrityError as exc:
        raise NumericIntegrityError(f"{coords}: {exc}") from exc
    except Exception as exc:
        raise RuntimeError(f"{coords} failed: {exc}") from exc


def _row_sort_key(row: TrialResult):
    return (row.method, row.method_param, row.num_measurements, row.trial_index)


@dataclass(frozen=True)
class ResultTable:
    """All trial results of one experiment, in canonical row order."""

    config: ExperimentConfig
    results: tuple

    def summary_rows(self):
        return summarize_results(self.results)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    """Run every (M, trial) cell of the grid, optionally on a process pool.

    Cell seeds are derived by hashing, so the result table is identical for
    any worker count; rows come back sorted by (method, param, M, trial).
    """
    cells = [(config, m, t) for m in config.m_grid for t in range(config.trials)]
    if workers <= 1:
        batches = [_run_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_cell, cells))
    rows = sorted((row for batch in batches for row in batch), key=_row_sort_key)
    return ResultTable(config, tuple(rows))


def summarize_results(results):
    """Aggregate trial rows into per-(method, M) means and standard errors."""
    groups = {}
    for row in results:
        key = (row.experiment_id, row.method, row.method_param, row.n_qubits, row.num_measurements)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[4])):
        rows = groups[key]
        mean_mse, stderr_mse, count = summarize([r.frob_err_sq for r in rows])
        mean_trace, _, _ = summarize([r.trace_err for r in rows])
        out.append(SummaryRow(key[0], key[1], key[2], key[3], key[4], count, mean_mse, stderr_mse, mean_trace))
    return out


# ---------------------------------------------------------------------------
# CSV emission


def _fmt_float(value: float) -> str:
    return repr(float(value))


def emit_csv(table: ResultTable, path) -> None:
    """Write trial rows; floats as shortest round-trip decimals."""
    write_trials_csv(table.results, path)


def write_trials_csv(results, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRIALS_CSV_HEADER + "\n")
        for r in sorted(results, key=_row_sort_key):
            fh.write(
                f"{r.experiment_id},{r.method},{r.method_param},{r.n_qubits},"
                f"{r.num_measurements},{r.trial_index},{r.seed},"
                f"{_fmt_float(r.frob_err_sq)},{_fmt_float(r.trace_err)},{_fmt_float(r.wall_millis)}\n"
            )


def emit_summary(table: ResultTable, path) -> None:
    write_summary_csv(table.summary_rows(), path)


def write_summary_csv(summary_rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(SUMMARY_CSV_HEADER + "\n")
        for r in summary_rows:
            fh.write(
                f"{r.experiment_id},{r.method},{r.method_param},{r.n_qubits},"
                f"{r.num_measurements},{r.trials},"
                f"{_fmt_float(r.mean_mse)},{_fmt_float(r.stderr_mse)},{_fmt_float(r.mean_trace_err)}\n"
            )


def read_trials_csv(path):
    """Parse a trials CSV back into TrialResult rows."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != TRIALS_CSV_HEADER:
        raise ConfigError(f"{path}: expected header {TRIALS_CSV_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 10:
            raise ConfigError(f"{path}:{lineno}: expected 10 columns, got {len(parts)}")
        rows.append(
            TrialResult(
                experiment_id=parts[0],
                method=parts[1],
                method_param=parts[2],
                n_qubits=int(parts[3]),
                num_measurements=int(parts[4]),
                trial_index=int(parts[5]),
                seed=int(parts[6]),
                frob_err_sq=float(parts[7]),
                trace_err=float(parts[8]),
                wall_millis=float(parts[9]),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Built-in experiment presets (desk scale by default; "full" restores the
# complete measurement grids, which take hours rather than minutes)


def _grid(name: str, scale: str):
    desk = {
        "fig2": (250, 1000, 4000),
        "fig3": (2000, 8000),
        "fig4": (100, 316, 1000),
        "fig5": (3000,),
    }
    full = {
        "fig2": (250, 500, 1000, 2000, 4000, 10000),
        "fig3": (1000, 2000, 4000, 8000),
        "fig4": (100, 316, 1000, 3162, 10000),
        "fig5": (3000,),
    }
    if scale == "desk":
        return desk[name]
    if scale == "full":
        return full[name]
    raise ConfigError(f"unknown preset scale {scale!r}")


def preset_configs(name: str, master_seed: int = DEFAULT_PRESET_SEED, scale: str = "desk"):
    """Built-in experiment grids replicating the error-scaling studies.

    fig2: n=4 random low-rank states, CS vs rank-constrained reconstruction.
    fig3: n=7 random matrix-product states, CS vs bond-capped reconstruction.
    fig4: n=7 thermal and GHZ states, all methods over a measurement sweep.
    fig5: qubit-count sweep at fixed M=3000 for thermal and GHZ states.
    """
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    grid = _grid(name, scale)
    adaptive_mpo = "mpo-pcs:tol=1e-14"
    configs = []
    if name == "fig2":
        for rank in (1, 4, 16):
            configs.append(
                ExperimentConfig(
                    experiment_id=f"fig2-r{rank}",
                    n_qubits=4,
                    state=StateSpec("lowrank", rank=rank),
                    methods=(parse_method("cs"), parse_method(f"lr-pcs:{rank}")),
                    m_grid=grid,
                    trials=10,
                    master_seed=master_seed,
                    fresh_state_per_trial=True,
                )
            )
    elif name == "fig3":
        for bond in (1, 2):
            configs.append(
                ExperimentConfig(
                    experiment_id=f"fig3-d{bond}",
                    n_qubits=7,
                    state=StateSpec("mps", bond_dim=bond),
                    methods=(parse_method("cs"), parse_method(f"mpo-pcs:cap={bond * bond}")),
                    m_grid=grid,
                    trials=10,
                    master_seed=master_seed,
                    fresh_state_per_trial=True,
                )
            )
    elif name == "fig4":
        panels = (
            ("fig4-thermal-t0.2", StateSpec("thermal", temperature=0.2), 4),
            ("fig4-thermal-t2", StateSpec("thermal", temperature=2.0), 24),
            ("fig4-ghz", StateSpec("ghz"), 1),
        )
        for exp_id, state, rank in panels:
            configs.append(
                ExperimentConfig(
                    experiment_id=exp_id,
                    n_qubits=7,
                    state=state,
                    methods=(
                        parse_method("cs"),
                        parse_method("simplex-pcs"),
                        parse_method(f"lr-pcs:{rank}"),
                        parse_method(adaptive_mpo),
                    ),
                    m_grid=grid,
                    trials=10,
                    master_seed=master_seed,
                    fresh_state_per_trial=False,
                )
            )
    else:
        for n in range(3, 8):
            panels = (
                (f"fig5-thermal-t0.2-n{n}", StateSpec("thermal", temperature=0.2), 4),
                (f"fig5-thermal-t2-n{n}", StateSpec("thermal", temperature=2.0), 4 * (n - 1)),
                (f"fig5-ghz-n{n}", StateSpec("ghz"), 1),
            )
            for exp_id, state, rank in panels:
                configs.append(
                    ExperimentConfig(
                        experiment_id=exp_id,
                        n_qubits=n,
                        state=state,
                        methods=(
                            parse_method("cs"),
                            parse_method(f"lr-pcs:{rank}"),
                            parse_method(adaptive_mpo),
                        ),
                        m_grid=grid,
                        trials=10,
                        master_seed=master_seed,
                        fresh_state_per_trial=False,
                    )
                )
    return configs
