"""Single-shot randomized projective measurements and the shadow estimator.

Each measurement draws a fresh Haar-random basis, samples one outcome from the
Born distribution by inverse-CDF, and keeps only the observed basis column.
The running sum of observed-column projectors is a sufficient statistic for
the shadow estimate, so nothing per-snapshot needs to be stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import haar_unitary, phase_fixed_q
from .rng import RngStream
from .states import DensityMatrix

PROB_SUM_TOL = 1e-6          # |sum p - 1| beyond this is a hard error, not a rounding artifact
PROB_NEGATIVE_FLOOR = -1e-9  # more-negative probabilities are errors; above this they are clamped

_QR_BATCH_DIM = 32           # batched LAPACK wins below this size; identical bits either way

SNAPSHOT_LOG_HEADER = "m,outcome_index,uniform_draw"


class NumericIntegrityError(RuntimeError):
    """Measurement probabilities were inconsistent with a physical state."""


@dataclass(frozen=True)
class MeasurementRecord:
    """One observed measurement: the basis column that fired and its index."""

    basis_column: np.ndarray
    outcome_index: int


class ShadowAccumulator:
    """Running sum of observed-column projectors phi phi† over M measurements."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.count = 0
        dim = 1 << n_qubits
        self.sum_outer = np.zeros((dim, dim), dtype=complex)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def add(self, record: MeasurementRecord) -> "ShadowAccumulator":
        column = np.asarray(record.basis_column)
        if column.shape != (self.dim,):
            raise ValueError(f"basis column has length {column.shape}, expected {self.dim}")
        self.sum_outer += np.outer(column, column.conj())
        self.count += 1
        return self

    def merge(self, other: "ShadowAccumulator") -> "ShadowAccumulator":
        """Combine two accumulators; counts and sums add."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot merge accumulators of different qubit counts")
        merged = ShadowAccumulator(self.n_qubits)
        merged.count = self.count + other.count
        merged.sum_outer = self.sum_outer + other.sum_outer
        return merged


def _integrity_normalize(probs: np.ndarray) -> np.ndarray:
    total = float(probs.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise NumericIntegrityError(
            f"outcome probabilities sum to {total:.9g}; state or basis is not physical"
        )
    low = float(probs.min())
    if low < PROB_NEGATIVE_FLOOR:
        raise NumericIntegrityError(
            f"outcome probability {low:.3e} is negative beyond rounding tolerance"
        )
    probs = np.clip(probs, 0.0, 1.0)
    return probs / probs.sum()


def outcome_probabilities(rho: DensityMatrix, unitary: np.ndarray) -> np.ndarray:
    """Born distribution diag(U† rho U) for a projective measurement in U's column basis.

    Small negative entries from rounding are clamped and the vector is
    renormalized; violations beyond tolerance raise NumericIntegrityError.
    """
    unitary = np.asarray(unitary)
    if unitary.shape != (rho.dim, rho.dim):
        raise ValueError(f"unitary shape {unitary.shape} does not match dimension {rho.dim}")
    probs = np.einsum("ij,ij->j", unitary.conj(), rho.matrix @ unitary).real
    return _integrity_normalize(probs)


def outcome_probabilities_pure(amplitudes: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    """Born distribution |U† u|^2 for a pure state, elementwise."""
    amp = unitary.conj().T @ np.asarray(amplitudes)
    return _integrity_normalize(np.abs(amp) ** 2)


def _finish_measurement(rho: DensityMatrix, unitary: np.ndarray, uniform: float) -> MeasurementRecord:
    if rho.pure_amplitudes is not None:
        probs = outcome_probabilities_pure(rho.pure_amplitudes, unitary)
    else:
        probs = outcome_probabilities(rho, unitary)
    outcome = int(np.searchsorted(np.cumsum(probs), uniform, side="right"))
    outcome = min(outcome, rho.dim - 1)
    return MeasurementRecord(unitary[:, outcome].copy(), outcome)


def measure_once(rho: DensityMatrix, rng: np.random.Generator, *, unitary=None) -> MeasurementRecord:
    """One Haar-random projective measurement on a fresh copy of the state.

    The draw order is fixed: Ginibre normals for the basis, then a single
    uniform for the inverse-CDF outcome draw, so records are a pure function of
    the generator state.  `unitary` is a test hook that skips the Haar draw.
    """
    if unitary is None:
        unitary = haar_unitary(rho.dim, rng)
    return _finish_measurement(rho, unitary, rng.random())


def snapshot_matrix(record: MeasurementRecord) -> np.ndarray:
    """Unbiased single-measurement state estimate (2^n + 1) phi phi† - I.

    Always unit trace, Hermitian, and generally not PSD.
    """
    column = np.asarray(record.basis_column)
    dim = column.size
    return (dim + 1) * np.outer(column, column.conj()) - np.eye(dim)


def accumulate(acc: ShadowAccumulator, record: MeasurementRecord) -> ShadowAccumulator:
    """Fold one measurement into the accumulator (rank-one update)."""
    return acc.add(record)


def cs_estimate(acc: ShadowAccumulator) -> np.ndarray:
    """Shadow estimate (1/M) sum_m [(2^n + 1) phi_m phi_m† - I].

    Hermitian and unit trace by construction; PSD only in the infinite-sample
    limit, so the result is generally not a physical state.
    """
    if acc.count == 0:
        raise ValueError("cannot form an estimate from an empty accumulator")
    dim = acc.dim
    return (dim + 1) / acc.count * acc.sum_outer - np.eye(dim)


def collect_shadow(
    rho: DensityMatrix,
    num_measurements: int,
    stream: RngStream,
    *,
    start_index: int = 0,
    batch_size: int = 256,
    log_path=None,
) -> ShadowAccumulator:
    """Accumulate `num_measurements` independent single-shot measurements.

    Measurement m draws from stream.child(start_index + m), so any partition of
    the index range across workers, and any batch size, reproduces the same
    records.  Basis factorizations are batched through LAPACK below a dimension
    threshold; this is a pure speed optimization with bit-identical results.

    When `log_path` is given, writes a CSV of (m, outcome_index, uniform_draw)
    rows; rerunning with the same stream reproduces the file exactly.
    """
    if num_measurements < 0:
        raise ValueError(f"measurement count must be >= 0, got {num_measurements}")
    dim = rho.dim
    acc = ShadowAccumulator(rho.n_qubits)
    log_rows = [] if log_path is not None else None

    if dim <= _QR_BATCH_DIM:
        done = 0
        while done < num_measurements:
            batch = min(batch_size, num_measurements - done)
            ginibre = np.empty((batch, dim, dim), dtype=complex)
            uniforms = np.empty(batch)
            for i in range(batch):
                gen = stream.child(start_index + done + i).generator()
                ginibre[i] = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
                uniforms[i] = gen.random()
            unitaries = phase_fixed_q(*np.linalg.qr(ginibre))
            columns = np.empty((batch, dim), dtype=complex)
            for i in range(batch):
                record = _finish_measurement(rho, unitaries[i], uniforms[i])
                columns[i] = record.basis_column
                if log_rows is not None:
                    log_rows.append((start_index + done + i, record.outcome_index, uniforms[i]))
            acc.sum_outer += np.einsum("bi,bj->ij", columns, columns.conj())
            acc.count += batch
            done += batch
    else:
        for i in range(num_measurements):
            gen = stream.child(start_index + i).generator()
            unitary = haar_unitary(dim, gen)
            uniform = gen.random()
            record = _finish_measurement(rho, unitary, uniform)
            acc.add(record)
            if log_rows is not None:
                log_rows.append((start_index + i, record.outcome_index, uniform))

    if log_rows is not None:
        with open(log_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(SNAPSHOT_LOG_HEADER + "\n")
            for m, outcome, uniform in log_rows:
                fh.write(f"{m},{outcome},{float(uniform)!r}\n")
    return acc
