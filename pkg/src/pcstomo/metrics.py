"""Error norms and the closed-form accuracy oracle for the shadow estimator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import DensityMatrix


@dataclass(frozen=True)
class ErrorRecord:
    """Frobenius and trace-norm errors of one reconstruction."""

    frob_err: float
    frob_err_sq: float
    trace_err: float


def frobenius_distance(a, b) -> float:
    """Root sum of squared entry differences."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm((a - b).reshape(-1)))


def trace_distance(a, b) -> float:
    """Sum of singular values of the difference.

    Singular values rather than eigenvalues, so slightly non-Hermitian
    numerical residue is handled; for Hermitian differences the two agree.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    return float(np.sum(np.linalg.svd(a - b, compute_uv=False)))


def error_record(estimate, target) -> ErrorRecord:
    frob = frobenius_distance(estimate, target)
    return ErrorRecord(frob, frob * frob, trace_distance(estimate, target))


def predicted_mse(n_qubits: int, rho_star: DensityMatrix, num_measurements: int) -> float:
    """Expected squared Frobenius error of the raw shadow estimate.

    Exactly (4^n + 2^n - 1 - ||rho*||_F^2) / M; the purity term is the only
    dependence on the state, so the value ranges within a factor of about two
    of 4^n / M.
    """
    if num_measurements < 1:
        raise ValueError(f"measurement count must be >= 1, got {num_measurements}")
    purity_sq = float(np.sum(np.abs(rho_star.matrix) ** 2))
    return (4**n_qubits + 2**n_qubits - 1 - purity_sq) / num_measurements


def summarize(values):
    """Mean, standard error of the mean, and count of a sample.

    The standard error is the sample standard deviation over sqrt(count),
    zero for a single observation.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, stderr, int(values.size)
