"""Binary file formats for dense matrices and matrix-product operators.

Dense format ("RHO1"): magic, version byte 1, little-endian u32 qubit count,
then the 4^n complex entries as interleaved little-endian float64 (re, im) in
row-major order, rows and columns indexed with qubit 1 as the fastest bit.

MPO format ("MPO1"): magic, version byte 1, u32 qubit count, u32 bond sizes
D_0..D_n, then each core's entries in (left_bond, i, j, right_bond)
lexicographic order, interleaved float64.
"""

from __future__ import annotations

import struct

import numpy as np

from .states import MpoState, qubit_count

DENSITY_MAGIC = b"RHO1"
MPO_MAGIC = b"MPO1"
FORMAT_VERSION = 1


def save_density_file(path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=complex)
    n = qubit_count(matrix.shape[0])
    if matrix.shape != (1 << n, 1 << n):
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    with open(path, "wb") as fh:
        fh.write(DENSITY_MAGIC)
        fh.write(bytes([FORMAT_VERSION]))
        fh.write(struct.pack("<I", n))
        fh.write(np.ascontiguousarray(matrix).astype("<c16").tobytes())


def load_density_file(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != DENSITY_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}, expected {DENSITY_MAGIC!r}")
    if data[4] != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {data[4]}")
    (n,) = struct.unpack("<I", data[5:9])
    dim = 1 << n
    body = data[9:]
    if len(body) != dim * dim * 16:
        raise ValueError(f"{path}: expected {dim * dim} complex entries, got {len(body) // 16}")
    flat = np.frombuffer(body, dtype="<c16")
    return flat.reshape(dim, dim).astype(complex)


def save_mpo_file(path, mpo: MpoState) -> None:
    bonds = (1,) + mpo.bond_dims + (1,)
    with open(path, "wb") as fh:
        fh.write(MPO_MAGIC)
        fh.write(bytes([FORMAT_VERSION]))
        fh.write(struct.pack("<I", mpo.n_qubits))
        fh.write(struct.pack(f"<{len(bonds)}I", *bonds))
        for core in mpo.cores:
            fh.write(np.ascontiguousarray(core).astype("<c16").tobytes())


def load_mpo_file(path) -> MpoState:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MPO_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}, expected {MPO_MAGIC!r}")
    if data[4] != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {data[4]}")
    (n,) = struct.unpack("<I", data[5:9])
    offset = 9 + 4 * (n + 1)
    bonds = struct.unpack(f"<{n + 1}I", data[9:offset])
    if bonds[0] != 1 or bonds[-1] != 1:
        raise ValueError(f"{path}: boundary bonds must be 1, got {bonds[0]} and {bonds[-1]}")
    cores = []
    for site in range(n):
        count = bonds[site] * 4 * bonds[site + 1]
        end = offset + count * 16
        if end > len(data):
            raise ValueError(f"{path}: truncated core data at site {site + 1}")
        flat = np.frombuffer(data[offset:end], dtype="<c16")
        cores.append(flat.reshape(bonds[site], 2, 2, bonds[site + 1]).astype(complex))
        offset = end
    if offset != len(data):
        raise ValueError(f"{path}: {len(data) - offset} trailing bytes")
    return MpoState(n, tuple(cores))
