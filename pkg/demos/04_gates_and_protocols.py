"""Three-level logical gates, dense coding and teleportation."""
import numpy as np

from qutrit_zeno.logical_gates import build_gate, gate_defect_report, restrict_to_subspace, toffoli_truth_table
from qutrit_zeno.protocols import dense_decode, dense_encode, teleport

np.set_printoptions(precision=4, suppress=True)

for name in ("X", "Y", "Z", "Z_corrected", "H"):
    rep = gate_defect_report(build_gate(name))
    print(f"{name:12s} on (u, |3>):\n{restrict_to_subspace(build_gate(name)).real}"
          f"\n  leakage {rep['leakage']:.1e}, full-space unitarity defect {rep['full_unitarity_defect']:.3f}")

for row in toffoli_truth_table():
    print("Toffoli", row)

for variant in ("qubit", "qutrit"):
    for v in range(4):
        msg = dense_decode(dense_encode(v, variant), variant)
        print(f"{variant} dense coding {v} -> {msg.bits} (p={msg.probability:.3f})")

msg = dense_decode(dense_encode(2, "qutrit", z="printed"), "qutrit")
print("with the printed Z, value 2 decodes to", msg.bits, f"only with p={msg.probability:.3f}")

rec = teleport(0.6, 0.8j, "qutrit")
print(rec.to_json())
