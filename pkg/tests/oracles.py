"""Independent reference implementations used to cross-check the library.

Everything here is deliberately brute force: subset enumeration, explicit bit
manipulation, naive summation.  None of it shares code with the package beyond
numpy primitives.
"""

from itertools import combinations

import numpy as np


def simplex_projection_enumerated(values):
    """Euclidean projection onto the probability simplex by KKT subset search.

    Tries every non-empty support set S: the candidate sets w_i = v_i - tau on
    S with tau = (sum_S v - 1) / |S| and zero elsewhere, and is optimal exactly
    when w is feasible on S and the complementary slackness v_j - tau <= 0
    holds off S.  The optimum is unique, so the first valid candidate wins.
    """
    values = np.asarray(values, dtype=float)
    size = values.size
    indices = range(size)
    for support_size in range(size, 0, -1):
        for support in combinations(indices, support_size):
            support = list(support)
            tau = (values[support].sum() - 1.0) / len(support)
            w = np.zeros(size)
            w[support] = values[support] - tau
            if np.all(w[support] >= -1e-12):
                rest = [i for i in indices if i not in support]
                if all(values[i] - tau <= 1e-12 for i in rest):
                    return w
    raise AssertionError("no KKT point found; oracle is broken")


def simplex_state_projection_enumerated(matrix):
    """Nearest density matrix via eigenbasis + enumerated simplex projection."""
    matrix = 0.5 * (matrix + matrix.conj().T)
    values, vectors = np.linalg.eigh(matrix)
    w = simplex_projection_enumerated(values)
    return (vectors * w) @ vectors.conj().T


def pauli_site_matrix(pauli: str, site: int, n_qubits: int) -> np.ndarray:
    """Single-site Pauli acting on `site` (1-based, fastest bit), via explicit bits."""
    dim = 1 << n_qubits
    out = np.zeros((dim, dim))
    bit = 1 << (site - 1)
    for row in range(dim):
        if pauli == "z":
            out[row, row] = -1.0 if row & bit else 1.0
        elif pauli == "x":
            out[row ^ bit, row] = 1.0
        else:
            raise ValueError(pauli)
    return out


def ising_hamiltonian_enumerated(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    out = np.zeros((dim, dim))
    for site in range(1, n_qubits):
        out += pauli_site_matrix("z", site, n_qubits) @ pauli_site_matrix("z", site + 1, n_qubits)
    for site in range(1, n_qubits + 1):
        out += pauli_site_matrix("x", site, n_qubits)
    return out


def conjugation_probabilities(rho_matrix, unitary):
    """Outcome distribution as the explicit diagonal of U† rho U."""
    return np.real(np.diag(unitary.conj().T @ rho_matrix @ unitary))


def naive_frobenius(a, b) -> float:
    total = 0.0
    for x, y in zip(np.asarray(a).reshape(-1), np.asarray(b).reshape(-1)):
        d = x - y
        total += (d.real) ** 2 + (d.imag) ** 2
    return float(np.sqrt(total))


def random_hermitian(dim, rng, trace_one=False):
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    herm = 0.5 * (raw + raw.conj().T)
    if trace_one:
        herm += (1.0 - np.trace(herm).real) / dim * np.eye(dim)
    return herm


def random_density(dim, rng, rank=None):
    rank = rank or dim
    factor = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    factor /= np.linalg.norm(factor)
    return factor @ factor.conj().T
