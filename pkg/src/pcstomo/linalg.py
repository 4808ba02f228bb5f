"""Dense complex linear-algebra kernels.

Haar-random unitary sampling, Hermitian eigendecomposition, truncated SVD,
Hermitian matrix exponentials, and the sequential tensor-train sweep shared by
the matrix-product state and operator code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NumericTolerances:
    """Tolerances used across the dense kernels, collected in one place."""

    unitarity: float = 1e-12            # max-norm of U†U - I for sampled unitaries
    eig_reconstruction: float = 1e-10   # relative residual of V diag(w) V† round trips
    hermiticity: float = 1e-8           # relative max |H - H†| accepted as Hermitian
    svd_energy_rel: float = 1e-9        # relative slack in tail-energy bookkeeping
    exp_max_arg: float = 700.0          # overflow guard for exp(scale * eigenvalue)


TOLERANCES = NumericTolerances()


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues sorted descending; eigenvector column k pairs with eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _require_square(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def require_nearly_hermitian(mat, rel_tol: float = TOLERANCES.hermiticity) -> np.ndarray:
    """Validate that a square matrix is Hermitian up to rel_tol * ||mat||_F."""
    mat = _require_square(mat)
    asym = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if asym > rel_tol * max(np.linalg.norm(mat), np.finfo(float).tiny):
        raise ValueError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    return mat


def phase_fixed_q(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Rescale QR columns by the R-diagonal phases, making the factorization unique."""
    phases = np.diagonal(r, axis1=-2, axis2=-1).copy()
    phases /= np.abs(phases)
    return q * phases[..., None, :]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a Haar-distributed unitary via QR of a complex Ginibre matrix.

    Draw order is fixed (real part matrix, then imaginary part matrix) so the
    sample is a pure function of the generator state.  The diagonal phase
    correction U = Q diag(R_kk / |R_kk|) removes the sign/phase ambiguity of QR
    and makes the distribution exactly Haar rather than merely unitary.
    """
    if dim < 1:
        raise ValueError(f"unitary dimension must be >= 1, got {dim}")
    ginibre = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(ginibre)
    return phase_fixed_q(q, r)


def hermitian_eig(mat) -> HermitianEig:
    """Eigendecompose a Hermitian matrix, eigenvalues sorted descending.

    Ties are left in the stable order produced by the backend; downstream
    projections depend only on spectral projectors, not on the basis chosen
    inside a degenerate block.
    """
    mat = require_nearly_hermitian(mat)
    values, vectors = np.linalg.eigh(mat)
    return HermitianEig(values[::-1].copy(), vectors[:, ::-1].copy())


def truncated_svd(mat, max_rank: int):
    """Top-`max_rank` SVD triplet plus the discarded squared singular-value energy.

    Returns (U, singular_values, Vh, tail_energy) with tail_energy equal to the
    squared Frobenius norm of the approximation residual.
    """
    if max_rank < 1:
        raise ValueError(f"max_rank must be >= 1, got {max_rank}")
    mat = np.asarray(mat)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = min(int(max_rank), s.size)
    tail_energy = float(np.sum(s[keep:] ** 2))
    return u[:, :keep], s[:keep], vh[:keep], tail_energy


def expm_hermitian(mat, scale: float) -> np.ndarray:
    """exp(scale * H) for Hermitian H via eigendecomposition.

    Raises OverflowError when scale * max-eigenvalue would overflow a double.
    """
    eig = hermitian_eig(mat)
    args = scale * eig.eigenvalues
    if args.size and np.max(args) > TOLERANCES.exp_max_arg:
        raise OverflowError(
            f"exp argument {np.max(args):.3g} exceeds {TOLERANCES.exp_max_arg:g}"
        )
    out = (eig.eigenvectors * np.exp(args)) @ eig.eigenvectors.conj().T
    return 0.5 * (out + out.conj().T)


def _select_rank(s: np.ndarray, max_rank, budget, sv_floor: float) -> int:
    if budget is not None:
        tail = np.concatenate([np.cumsum((s**2)[::-1])[::-1], [0.0]])
        keep = int(np.argmax(tail <= budget))
    else:
        keep = min(int(max_rank), int(np.sum(s > sv_floor)))
    return max(keep, 1)


def tt_sweep(tensor: np.ndarray, max_rank=None, tol=None, sv_floor: float = 0.0):
    """Left-to-right sequential truncated-SVD sweep over an n-mode tensor.

    Mode 1 is the fastest-varying index (Fortran layout), matching the qubit
    bit order used everywhere else.  Exactly one of `max_rank` (hard cap per
    bond) or `tol` (relative error budget split evenly over the n-1 splits)
    selects the truncation rule; `sv_floor` additionally drops singular values
    at or below the given absolute size even under a cap.

    Returns (cores, discarded_energies): third-order cores of shape
    (left_rank, mode_size, right_rank) and the squared singular-value energy
    discarded at each split.  The squared reconstruction error of the sweep
    equals the sum of these energies.
    """
    if (max_rank is None) == (tol is None):
        raise ValueError("exactly one of max_rank or tol must be given")
    if max_rank is not None and max_rank < 1:
        raise ValueError(f"max_rank must be >= 1, got {max_rank}")
    tensor = np.asarray(tensor, dtype=complex)
    n = tensor.ndim
    if n == 0:
        raise ValueError("tensor must have at least one mode")
    shape = tensor.shape
    if n == 1:
        return [tensor.reshape(1, shape[0], 1)], np.zeros(0)
    budget = None
    if tol is not None:
        budget = (tol * np.linalg.norm(tensor.reshape(-1))) ** 2 / (n - 1)

    work = tensor.reshape(1, -1, order="F")
    cores = []
    energies = []
    left_rank = 1
    for mode in shape[:-1]:
        work = work.reshape(left_rank * mode, -1, order="F")
        u, s, vh = np.linalg.svd(work, full_matrices=False)
        keep = _select_rank(s, max_rank, budget, sv_floor)
        energies.append(float(np.sum(s[keep:] ** 2)))
        cores.append(u[:, :keep].reshape(left_rank, mode, keep, order="F"))
        work = s[:keep, None] * vh[:keep]
        left_rank = keep
    cores.append(work.reshape(left_rank, shape[-1], 1, order="F"))
    return cores, np.asarray(energies)


def tt_contract(cores) -> np.ndarray:
    """Contract third-order tensor-train cores back to the full n-mode tensor."""
    out = cores[0]
    for core in cores[1:]:
        out = np.tensordot(out, core, axes=([-1], [0]))
    return out.reshape(out.shape[1:-1])
