"""Three-level logical operators, the qutrit-controlled cNOT and the Toffoli-like T.

The qutrit X, Y, H (and the printed Z) act as qubit gates only on the
logical pair ``u = (|1> + |2>)/sqrt(2)`` and ``|3>``.  They are kept as full
3x3 matrices so that their behaviour off that pair can be measured.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

R2 = np.sqrt(2.0)

QUTRIT_GATES = ("X13", "X23", "X", "Y", "Z", "Z_corrected", "H")
GATE_NAMES = QUTRIT_GATES + ("cNOT", "Toffoli")


class UnknownGateError(KeyError):
    pass


@dataclass(frozen=True)
class GateMatrix:
    name: str
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        other = other.matrix if isinstance(other, GateMatrix) else other
        return self.matrix @ other


def ket(i: int, d: int = 3) -> np.ndarray:
    """Basis vector ``|i>`` (1-based for qutrit levels)."""
    v = np.zeros(d, dtype=complex)
    v[i - 1] = 1.0
    return v


def projector(i: int, d: int = 3) -> np.ndarray:
    k = ket(i, d)
    return np.outer(k, k.conj())


def kron(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I3 = np.eye(3, dtype=complex)


def _qutrit_matrix(name: str) -> np.ndarray:
    if name == "X13":
        return np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex)
    if name == "X23":
        return np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
    if name == "X":
        return np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]], dtype=complex) / R2
    if name == "Y":
        return np.array([[0, 0, 1], [0, 0, 1], [-1, -1, 0]], dtype=complex) / R2
    if name == "Z":
        return np.diag([1, 1, -R2]).astype(complex) / R2
    if name == "Z_corrected":
        return np.diag([1, 1, -1]).astype(complex)
    if name == "H":
        return np.array([[1, 1, R2], [1, 1, R2], [R2, R2, -2]], dtype=complex) / (2 * R2)
    raise UnknownGateError(name)


def cnot_matrix() -> np.ndarray:
    """Qutrit control, qubit target: flip the target when the control is ``|3>``."""
    return kron(projector(1) + projector(2), I2) + kron(projector(3), SIGMA_X)


def toffoli_matrix() -> np.ndarray:
    """T on qutrit (x) qutrit (x) qubit (x) qubit, dimension 36."""
    p1, p2, p3 = projector(1), projector(2), projector(3)
    return (kron(p1, p1, I2, I2) + kron(p2, p1, SIGMA_X, I2)
            + kron(p1, p3, I2, SIGMA_X) + kron(p2, p3, SIGMA_X, SIGMA_X))


def build_gate(name: str) -> GateMatrix:
    if name in QUTRIT_GATES:
        return GateMatrix(name, _qutrit_matrix(name))
    if name == "cNOT":
        return GateMatrix(name, cnot_matrix())
    if name == "Toffoli":
        return GateMatrix(name, toffoli_matrix())
    raise UnknownGateError(f"unknown gate {name!r}; choose from {GATE_NAMES}")


@dataclass(frozen=True)
class LogicalSubspace:
    """Ordered orthonormal pair spanning the logical qubit inside the qutrit."""

    basis: tuple = (
        np.array([1, 1, 0], dtype=complex) / R2,
        np.array([0, 0, 1], dtype=complex),
    )

    def __post_init__(self):
        b = np.array(self.basis)
        if not np.allclose(b.conj() @ b.T, np.eye(2), atol=1e-12):
            raise ValueError("logical basis is not orthonormal")

    @property
    def isometry(self) -> np.ndarray:
        """3x2 matrix whose columns are the basis vectors."""
        return np.array(self.basis).T

    @property
    def complement(self) -> np.ndarray:
        """Unit vector orthogonal to the pair."""
        v = np.cross(self.basis[0].conj(), self.basis[1].conj())
        return v / np.linalg.norm(v)


LOGICAL = LogicalSubspace()


def restrict_to_subspace(g, s: LogicalSubspace = LOGICAL) -> np.ndarray:
    """``[<b_i| g |b_j>]`` over the ordered basis of ``s``."""
    m = g.matrix if isinstance(g, GateMatrix) else np.asarray(g)
    if m.shape != (3, 3):
        raise ValueError(f"restriction needs a 3x3 gate, got {m.shape}")
    v = s.isometry
    return v.conj().T @ m @ v


def uncovered_controls(t: np.ndarray | None = None) -> list:
    """Control pairs (a, b) for which T acts as zero on the target register."""
    t = toffoli_matrix() if t is None else t
    missing = []
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            block = kron(projector(a), projector(b), I2, I2)
            if np.abs(t @ block).max() == 0:
                missing.append((a, b))
    return missing


def gate_defect_report(g: GateMatrix, s: LogicalSubspace = LOGICAL) -> dict:
    """Non-unitarity of a gate on the full space and, for qutrit gates, on the logical pair.

    For qutrit gates the report also gives the deviation of the logical
    restriction from the intended qubit action (X, Y, Z, H) and the leakage
    norm ``|P_perp g P_logical|``.
    """
    m = g.matrix
    eye = np.eye(g.dim)
    report = {
        "name": g.name,
        "dim": g.dim,
        "full_unitarity_defect": float(np.abs(m.conj().T @ m - eye).max()),
    }
    if g.dim == 3:
        r = restrict_to_subspace(g, s)
        report["restriction"] = r
        report["subspace_unitarity_defect"] = float(np.abs(r.conj().T @ r - np.eye(2)).max())
        v = s.isometry
        leak = (np.eye(3) - v @ v.conj().T) @ m @ v
        report["leakage"] = float(np.linalg.norm(leak, 2))
        perp = s.complement
        report["complement_image_norm"] = float(np.linalg.norm(m @ perp))
        target = _INTENDED.get(g.name)
        if target is not None:
            diff = r - target
            report["action_defect"] = diff
            report["action_defect_max"] = float(np.abs(diff).max())
    if g.name == "Toffoli":
        covered = m.conj().T @ m
        report["projector_sum_defect"] = float(np.abs(covered - eye).max())
        report["uncovered_controls"] = uncovered_controls(m)
    return report


_INTENDED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1], [-1, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "Z_corrected": np.diag([1, -1]).astype(complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / R2,
}


def toffoli_truth_table() -> list:
    """Covered control pairs, the target action, and the read-out outcome.

    The two-qubit target starts in ``|00>``; the outcome is 1 only when the
    target ends in ``|11>`` (both flips applied).
    """
    actions = {(1, 1): "I(x)I", (2, 1): "X(x)I", (1, 3): "I(x)X", (2, 3): "X(x)X"}
    t = toffoli_matrix()
    rows = []
    for (a, b), action in actions.items():
        state = kron(ket(a), ket(b), ket(1, 2), ket(1, 2))
        out = t @ state
        target = out.reshape(3, 3, 4)[a - 1, b - 1]
        idx = int(np.argmax(np.abs(target)))
        bits = format(idx, "02b")
        rows.append({"control": (a, b), "action": action, "target": bits,
                     "outcome": 1 if bits == "11" else 0})
    for a, b in uncovered_controls(t):
        rows.append({"control": (a, b), "action": None, "target": None, "outcome": None})
    return rows


# ---------------------------------------------------------------------------
# plain-text matrix dump

def _fmt_complex(z: complex) -> str:
    re, im = float(np.real(z)), float(np.imag(z))
    sign = "-" if im < 0 or (im == 0 and np.signbit(im)) else "+"
    return f"{re:.15g}{sign}{abs(im):.15g}i"


def format_matrix(m) -> str:
    """Row-major, one row per line, entries ``a+bi`` with 15 significant digits."""
    m = np.asarray(m)
    return "\n".join(" ".join(_fmt_complex(z) for z in row) for row in m) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    for line in text.strip().splitlines():
        rows.append([complex(tok.replace("i", "j")) for tok in line.split()])
    return np.array(rows, dtype=complex)
