"""Ground-truth state families and the matrix-product operator representation.

Index convention: qubit 1 is the fastest-varying bit of a row or column index,
so basis state with bits (b_1, ..., b_n) maps to the integer sum_l 2^(l-1) b_l.
All reshapes between matrices and per-qubit tensors go through the helpers in
this module, so the convention lives in exactly one place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import tt_contract, tt_sweep

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_EIG_FLOOR = -1e-10
DENSE_QUBIT_LIMIT = 12

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def qubit_count(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, validating it is a power of two."""
    n = int(dim).bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class DensityMatrix:
    """A validated physical state: Hermitian, unit trace, and PSD to tolerance.

    `pure_amplitudes` optionally carries the state vector when the matrix is a
    known rank-one outer product; measurement sampling uses it as a fast path.
    """

    n_qubits: int
    matrix: np.ndarray
    pure_amplitudes: np.ndarray | None = None

    def __post_init__(self):
        dim = 1 << self.n_qubits
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("density matrix has non-finite entries")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_ATOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace {trace:.12g} is not 1 within tolerance")
        if np.linalg.eigvalsh(mat)[0] < PSD_EIG_FLOOR:
            raise ValueError("density matrix is not positive semidefinite within tolerance")
        if self.pure_amplitudes is not None:
            amp = np.asarray(self.pure_amplitudes, dtype=complex)
            object.__setattr__(self, "pure_amplitudes", amp)
            if amp.shape != (dim,):
                raise ValueError(f"pure amplitudes must have length {dim}")
            if abs(np.linalg.norm(amp) - 1.0) > 1e-12:
                raise ValueError("pure amplitudes are not unit norm")
            if np.max(np.abs(np.outer(amp, amp.conj()) - mat)) > HERMITICITY_ATOL:
                raise ValueError("pure amplitudes do not reproduce the matrix")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @classmethod
    def from_matrix(cls, matrix, pure_amplitudes=None) -> "DensityMatrix":
        matrix = np.asarray(matrix)
        return cls(qubit_count(matrix.shape[0]), matrix, pure_amplitudes)


@dataclass(frozen=True)
class MpoState:
    """Matrix-product operator: one (left_bond, 2, 2, right_bond) core per qubit.

    Entry (i_1...i_n, j_1...j_n) of the represented matrix is the product
    core_1[:, i_1, j_1, :] ... core_n[:, i_n, j_n, :], with boundary bonds 1.
    """

    n_qubits: int
    cores: tuple

    def __post_init__(self):
        cores = tuple(np.asarray(core, dtype=complex) for core in self.cores)
        object.__setattr__(self, "cores", cores)
        if self.n_qubits < 1 or len(cores) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} cores, got {len(cores)}")
        left = 1
        for idx, core in enumerate(cores):
            if core.ndim != 4 or core.shape[1:3] != (2, 2):
                raise ValueError(f"core {idx} has shape {core.shape}, expected (D, 2, 2, D')")
            if core.shape[0] != left:
                raise ValueError(f"core {idx} left bond {core.shape[0]} != previous right bond {left}")
            left = core.shape[3]
        if left != 1:
            raise ValueError(f"final right bond must be 1, got {left}")

    @property
    def bond_dims(self) -> tuple:
        return tuple(core.shape[3] for core in self.cores[:-1])


def vector_to_site_tensor(vec: np.ndarray, n_qubits: int) -> np.ndarray:
    """Reshape a 2^n amplitude vector into n binary modes, qubit 1 fastest."""
    return np.asarray(vec).reshape((2,) * n_qubits, order="F")


def site_tensor_to_vector(tensor: np.ndarray) -> np.ndarray:
    return np.asarray(tensor).reshape(-1, order="F")


def matrix_to_site_tensor(mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """Reshape a 2^n x 2^n matrix into n modes of size 4.

    Mode l combines the row and column bits of qubit l as q_l = i_l + 2 j_l
    with the row bit fastest.
    """
    n = n_qubits
    split = np.asarray(mat).reshape((2,) * (2 * n), order="F")
    interleave = [axis for pair in zip(range(n), range(n, 2 * n)) for axis in pair]
    return split.transpose(interleave).reshape((4,) * n, order="F")


def site_tensor_to_matrix(tensor: np.ndarray) -> np.ndarray:
    """Inverse of matrix_to_site_tensor."""
    n = np.asarray(tensor).ndim
    pairs = np.asarray(tensor).reshape((2,) * (2 * n), order="F")
    deinterleave = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return pairs.transpose(deinterleave).reshape((1 << n, 1 << n), order="F")


def random_lowrank_state(n_qubits: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Random rank-`rank` state F F† with F a normalized complex Gaussian 2^n x r factor.

    Real and imaginary parts are i.i.d. standard normal; the Frobenius
    normalization of the factor makes the trace exactly one.
    """
    dim = 1 << n_qubits
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    factor = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    factor /= np.linalg.norm(factor)
    mat = factor @ factor.conj().T
    pure = factor[:, 0] / np.linalg.norm(factor[:, 0]) if rank == 1 else None
    return DensityMatrix(n_qubits, 0.5 * (mat + mat.conj().T), pure_amplitudes=pure)


def random_mps_state(n_qubits: int, bond_dim: int, rng: np.random.Generator):
    """Random matrix-product state and the matrix-product form of its projector.

    A 2^n vector of i.i.d. complex standard normals is truncated to bond
    dimension `bond_dim` by a tensor-train sweep and renormalized.  The
    projector u u† is returned as an MPO whose core l is the per-site Kronecker
    pair U_l ⊗ conj(U_l), so its bond dimensions are at most bond_dim^2.

    Returns (amplitudes, mpo).
    """
    if bond_dim < 1:
        raise ValueError(f"bond dimension must be >= 1, got {bond_dim}")
    dim = 1 << n_qubits
    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    cores, _ = tt_sweep(vector_to_site_tensor(raw, n_qubits), max_rank=bond_dim)
    norm = np.linalg.norm(tt_contract(cores))
    cores[-1] = cores[-1] / norm
    amplitudes = site_tensor_to_vector(tt_contract(cores))

    mpo_cores = []
    for core in cores:
        dl, _, dr = core.shape
        pair = np.einsum("aib,cjd->acijbd", core, core.conj())
        mpo_cores.append(pair.reshape(dl * dl, 2, 2, dr * dr))
    return amplitudes, MpoState(n_qubits, tuple(mpo_cores))


def _embed_site_op(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Embed a k-site operator acting on sites (site, ..., site+k-1), site 1 fastest."""
    width = qubit_count(op.shape[0])
    left = np.eye(1 << (n_qubits - site - width + 1))
    right = np.eye(1 << (site - 1))
    return np.kron(left, np.kron(op, right))


def ising_hamiltonian(n_qubits: int) -> np.ndarray:
    """Transverse-field Ising chain: sum of nearest-neighbour ZZ couplings plus X fields."""
    if n_qubits < 1:
        raise ValueError(f"qubit count must be >= 1, got {n_qubits}")
    dim = 1 << n_qubits
    ham = np.zeros((dim, dim))
    zz = np.kron(_SIGMA_Z, _SIGMA_Z)
    for site in range(1, n_qubits):
        ham += _embed_site_op(zz, site, n_qubits)
    for site in range(1, n_qubits + 1):
        ham += _embed_site_op(_SIGMA_X, site, n_qubits)
    return ham


def thermal_state(n_qubits: int, temperature: float) -> DensityMatrix:
    """Gibbs state exp(-H/T) / trace(exp(-H/T)) of the Ising chain.

    Computed from the eigendecomposition with the spectrum shifted by its
    minimum before exponentiating, so small temperatures cannot overflow.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    values, vectors = np.linalg.eigh(ising_hamiltonian(n_qubits))
    weights = np.exp(-(values - values[0]) / temperature)
    weights /= weights.sum()
    mat = (vectors * weights) @ vectors.T
    return DensityMatrix(n_qubits, (0.5 * (mat + mat.T)).astype(complex))


def ghz_state(n_qubits: int) -> DensityMatrix:
    """Projector onto (|0...0> + |1...1>) / sqrt(2)."""
    if n_qubits < 1:
        raise ValueError(f"qubit count must be >= 1, got {n_qubits}")
    dim = 1 << n_qubits
    amp = np.zeros(dim, dtype=complex)
    amp[0] = amp[-1] = 1.0 / np.sqrt(2.0)
    return DensityMatrix(n_qubits, np.outer(amp, amp.conj()), pure_amplitudes=amp)


def mpo_to_dense(mpo: MpoState, max_qubits: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Contract an MPO to the dense 2^n x 2^n matrix it represents.

    Refuses to build matrices beyond `max_qubits` qubits; the default keeps the
    result comfortably inside ordinary workstation memory.
    """
    n = mpo.n_qubits
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the dense contraction limit of {max_qubits}")
    out = mpo.cores[0][0]
    for core in mpo.cores[1:]:
        out = np.tensordot(out, core, axes=([-1], [0]))
    out = out[..., 0]
    deinterleave = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return np.ascontiguousarray(out.transpose(deinterleave).reshape((1 << n, 1 << n), order="F"))
