"""Single-shot measurements in Haar-random bases.

Walks through the measurement primitive: draw a random orthonormal basis,
sample one outcome from the Born distribution, and keep only the observed
basis column.  Shows that the sampled bases are unitary, that outcome
frequencies follow the Born probabilities, and that the one-measurement
snapshot matrix is an unbiased (if wildly noisy) state estimate.
"""

import numpy as np

from pcstomo import (
    RngStream,
    collect_shadow,
    cs_estimate,
    frobenius_distance,
    ghz_state,
    haar_unitary,
    measure_once,
    outcome_probabilities,
    snapshot_matrix,
)

rng = RngStream.from_parts("demo-01")

print("=== Haar-random bases ===")
unitary = haar_unitary(8, rng.child("unitary").generator())
defect = np.max(np.abs(unitary.conj().T @ unitary - np.eye(8)))
print(f"sampled an 8x8 basis, unitarity defect {defect:.2e}")

print()
print("=== Born statistics for a 3-qubit GHZ state ===")
rho = ghz_state(3)
basis = haar_unitary(8, rng.child("born").generator())
probs = outcome_probabilities(rho, basis)
print("outcome probabilities in one random basis:")
print("  " + "  ".join(f"{p:.4f}" for p in probs))

draws = 20_000
counts = np.zeros(8, dtype=int)
gen = rng.child("draws").generator()
for _ in range(draws):
    rec = measure_once(rho, gen, unitary=basis)
    counts[rec.outcome_index] += 1
print(f"empirical frequencies over {draws} repeated shots in that basis:")
print("  " + "  ".join(f"{c / draws:.4f}" for c in counts))

print()
print("=== One snapshot is unbiased but useless alone ===")
rec = measure_once(rho, rng.child("single").generator())
snap = snapshot_matrix(rec)
print(f"snapshot trace {np.trace(snap).real:+.3f}, "
      f"eigenvalue range [{np.linalg.eigvalsh(snap)[0]:+.2f}, {np.linalg.eigvalsh(snap)[-1]:+.2f}]")
print(f"single-snapshot error  |rho_1 - rho*|_F = {frobenius_distance(snap, rho.matrix):.3f}")

for m_count in (100, 1000, 10_000):
    acc = collect_shadow(rho, m_count, rng.child("avg", m_count))
    err = frobenius_distance(cs_estimate(acc), rho.matrix)
    print(f"averaging {m_count:>6} snapshots: |rho_CS - rho*|_F = {err:.3f}")
print("the error falls like 1/sqrt(M): snapshots average out to the true state")
