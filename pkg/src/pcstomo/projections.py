"""Projections of Hermitian estimates onto physical state sets.

Three estimators share the same pattern: take the (unphysical) shadow estimate
and replace it with a nearby member of a target set.  The simplex projection
handles general states, rank truncation plus simplex handles low-rank states,
and a tensor-train bond truncation plus simplex handles matrix-product states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig, require_nearly_hermitian, tt_sweep
from .states import DensityMatrix, MpoState, matrix_to_site_tensor, mpo_to_dense, qubit_count

CAPPED_SV_FLOOR_REL = 1e-14  # drop singular values below this times ||H||_F even under a cap


@dataclass(frozen=True)
class TruncationReport:
    """Discarded squared singular-value energy and retained dimension per split.

    The root of the summed energies bounds the Frobenius reconstruction error
    of the truncation (and equals it for a sequential sweep).
    """

    discarded_energies: np.ndarray
    kept_dims: tuple

    def error_bound(self) -> float:
        return float(np.sqrt(np.sum(self.discarded_energies)))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("step,discarded_energy,kept_dim\n")
            for step, (energy, dim) in enumerate(zip(self.discarded_energies, self.kept_dims), 1):
                fh.write(f"{step},{float(energy)!r},{dim}\n")


def hermitize(mat) -> np.ndarray:
    """Nearest Hermitian matrix (B + B†) / 2."""
    mat = np.asarray(mat)
    return 0.5 * (mat + mat.conj().T)


def project_trace(mat) -> np.ndarray:
    """Nearest matrix with unit trace: shift the diagonal uniformly."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    dim = mat.shape[0]
    return mat + (1.0 - np.trace(mat)) / dim * np.eye(dim)


def project_simplex_vector(values) -> np.ndarray:
    """Euclidean projection onto the probability simplex {w >= 0, sum w = 1}.

    Sort-based waterfilling: with the entries sorted descending, the active
    support is the largest k for which v_(k) stays above the threshold
    tau = (sum of top k - 1) / k, and the projection is max(v - tau, 0).
    The largest output entry absorbs the final rounding residual so the sum is
    exactly one.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot project an empty vector")
    if not np.all(np.isfinite(values)):
        raise ValueError("simplex projection requires finite entries")
    ordered = np.sort(values)[::-1]
    csum = np.cumsum(ordered)
    counts = np.arange(1, values.size + 1)
    support = int(np.nonzero(ordered - (csum - 1.0) / counts > 0)[0][-1]) + 1
    tau = (csum[support - 1] - 1.0) / support
    out = np.maximum(values - tau, 0.0)
    out[np.argmax(out)] += 1.0 - out.sum()
    return out


def project_simplex_state(mat) -> DensityMatrix:
    """Nearest physical state in Frobenius norm.

    Eigendecompose, waterfill the spectrum onto the simplex, and reassemble in
    the same eigenbasis.  The input must be Hermitian to working tolerance.
    """
    mat = require_nearly_hermitian(mat)
    eig = hermitian_eig(hermitize(mat))
    weights = project_simplex_vector(eig.eigenvalues)
    out = (eig.eigenvectors * weights) @ eig.eigenvectors.conj().T
    return DensityMatrix.from_matrix(hermitize(out))


def project_rank(mat, rank: int) -> np.ndarray:
    """Zero all eigenvalues beyond the `rank` algebraically largest ones.

    Ties at the cut keep the first entries of the descending sort, which fixes
    determinism without changing the approximation error.
    """
    mat = require_nearly_hermitian(mat)
    if not 1 <= rank <= mat.shape[0]:
        raise ValueError(f"rank must be in [1, {mat.shape[0]}], got {rank}")
    eig = hermitian_eig(hermitize(mat))
    weights = eig.eigenvalues.copy()
    weights[rank:] = 0.0
    return hermitize((eig.eigenvectors * weights) @ eig.eigenvectors.conj().T)


def lr_pcs(mat, rank: int) -> DensityMatrix:
    """Low-rank physical estimate: rank truncation, then simplex projection.

    The retained spectrum is waterfilled onto the simplex while the discarded
    eigendirections stay at zero, so the output rank never exceeds `rank`.
    With `rank` equal to the full dimension this coincides with
    project_simplex_state.
    """
    mat = require_nearly_hermitian(mat)
    if not 1 <= rank <= mat.shape[0]:
        raise ValueError(f"rank must be in [1, {mat.shape[0]}], got {rank}")
    eig = hermitian_eig(hermitize(mat))
    weights = project_simplex_vector(eig.eigenvalues[:rank])
    basis = eig.eigenvectors[:, :rank]
    return DensityMatrix.from_matrix(hermitize((basis * weights) @ basis.conj().T))


def tt_svd(mat, bond_cap=None, tol=None):
    """Tensor-train decomposition of a 2^n x 2^n matrix into an MPO.

    The matrix is reshaped to an n-mode tensor whose mode l combines the row
    and column bits of qubit l, then swept left to right with truncated SVDs.
    Exactly one of `bond_cap` (every bond at most this) or `tol` (relative
    error budget split evenly across the n-1 splits) must be given.  In capped
    mode, singular values below 1e-14 times the input norm are dropped even
    under the cap so noise rank is not propagated.

    Returns (mpo, report); the report's summed energies equal the squared
    Frobenius reconstruction error.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    n = qubit_count(mat.shape[0])
    floor = CAPPED_SV_FLOOR_REL * np.linalg.norm(mat) if bond_cap is not None else 0.0
    cores, energies = tt_sweep(
        matrix_to_site_tensor(mat, n), max_rank=bond_cap, tol=tol, sv_floor=floor
    )
    split_cores = []
    for core in cores:
        left, _, right = core.shape
        split_cores.append(core.reshape(left, 2, 2, right).transpose(0, 2, 1, 3))
    mpo = MpoState(n, tuple(split_cores))
    return mpo, TruncationReport(energies, mpo.bond_dims)


def mpo_pcs(mat, bond_cap=None, tol=None, *, hermitize_first=False) -> DensityMatrix:
    """Matrix-product physical estimate: bond truncation, then simplex projection.

    The tensor-train truncation breaks exact Hermiticity, so the contracted
    result is symmetrized before the eigenvalue projection.  The simplex step
    can perturb the bond dimensions slightly, so none are asserted on the
    output.  `hermitize_first` additionally symmetrizes the input before the
    truncation (off by default; useful for sensitivity checks).
    """
    work = hermitize(mat) if hermitize_first else np.asarray(mat, dtype=complex)
    mpo, _ = tt_svd(work, bond_cap=bond_cap, tol=tol)
    return project_simplex_state(hermitize(mpo_to_dense(mpo)))
