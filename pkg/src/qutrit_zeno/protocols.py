"""Dense coding and teleportation with qubits and with the qutrit logical pair.

States are dense amplitude vectors over a tensor product whose factor
dimensions are carried alongside.  Measurements enumerate every outcome of
the measured factors in a chosen orthonormal basis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .logical_gates import LOGICAL, _qutrit_matrix, cnot_matrix, kron

R2 = np.sqrt(2.0)
NORM_TOL = 1e-12
LEAKAGE_TOL = 1e-10
VARIANTS = ("qubit", "qutrit")

# qubit gates; Y is the real form ZX, which reproduces the printed sign pattern
QUBIT_GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1], [-1, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / R2,
}
QUBIT_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

U_LOGICAL = LOGICAL.basis[0]
LEVEL3 = LOGICAL.basis[1]
U_PERP = np.array([1, -1, 0], dtype=complex) / R2

QUBIT_BASIS = (("0", np.array([1, 0], dtype=complex)), ("1", np.array([0, 1], dtype=complex)))
ANCILLA_BASIS = (("g", np.array([1, 0], dtype=complex)), ("e", np.array([0, 1], dtype=complex)))
LOGICAL_BASIS = (("12", U_LOGICAL), ("3", LEVEL3), ("perp", U_PERP))
QUTRIT_LEVELS = tuple((str(i + 1), np.eye(3, dtype=complex)[i]) for i in range(3))


def _qutrit_gate(name: str, z: str = "corrected") -> np.ndarray:
    if name == "I":
        return np.eye(3, dtype=complex)
    if name == "Z":
        return _qutrit_matrix("Z_corrected" if z == "corrected" else "Z")
    return _qutrit_matrix(name)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray = field(repr=False)
    basis_dims: tuple

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_dims", tuple(int(d) for d in self.basis_dims))
        if amps.size != int(np.prod(self.basis_dims)):
            raise ValueError(f"{amps.size} amplitudes do not fit dims {self.basis_dims}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def normalized(self) -> "PureState":
        return PureState(self.amplitudes / self.norm, self.basis_dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.basis_dims)

    def apply(self, op, factors) -> "PureState":
        """Apply ``op`` to the listed factors (in the given order)."""
        factors = list(factors)
        sub = [self.basis_dims[f] for f in factors]
        op = np.asarray(op).reshape(sub + sub)
        k = len(factors)
        t = np.tensordot(op, self.tensor(), axes=(list(range(k, 2 * k)), factors))
        t = np.moveaxis(t, list(range(k)), factors)
        return PureState(t.ravel(), self.basis_dims)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "PureState") -> float:
        return abs(self.overlap(other)) ** 2


def product(*states: PureState) -> PureState:
    amps = kron(*(s.amplitudes for s in states))
    dims = sum((s.basis_dims for s in states), ())
    return PureState(amps, dims)


@dataclass(frozen=True)
class MeasurementBranch:
    outcome_label: tuple
    probability: float
    collapsed: PureState | None


def _default_basis(d: int):
    if d == 2:
        return QUBIT_BASIS
    return tuple((str(i + 1), np.eye(d, dtype=complex)[i]) for i in range(d))


def branch_probabilities(state: PureState, measured_factors, bases=None) -> list:
    """Project the measured factors onto every basis outcome.

    ``bases`` maps a factor index to a sequence of ``(label, vector)`` pairs;
    factors without an entry use the computational basis.  Zero-probability
    branches carry ``collapsed=None``.
    """
    measured = list(measured_factors)
    if len(set(measured)) != len(measured) or any(not 0 <= f < len(state.basis_dims) for f in measured):
        raise ValueError(f"invalid measured factors {measured} for dims {state.basis_dims}")
    bases = bases or {}
    rest = [i for i in range(len(state.basis_dims)) if i not in measured]
    t = np.moveaxis(state.tensor(), measured, list(range(len(measured))))
    rest_dims = tuple(state.basis_dims[i] for i in rest)
    per_factor = [bases.get(f, _default_basis(state.basis_dims[f])) for f in measured]

    branches = []

    def walk(level, tensor, labels):
        if level == len(measured):
            amps = np.asarray(tensor, dtype=complex).ravel()
            prob = float(np.vdot(amps, amps).real)
            collapsed = PureState(amps / np.sqrt(prob), rest_dims) if prob > 0 else None
            branches.append(MeasurementBranch(tuple(labels), prob, collapsed))
            return
        for label, vec in per_factor[level]:
            walk(level + 1, np.tensordot(vec.conj(), tensor, axes=(0, 0)), labels + [label])

    walk(0, t, [])
    return branches


# ---------------------------------------------------------------------------
# dense coding

@dataclass(frozen=True)
class ClassicalMessage:
    bits: tuple
    value: int | None
    probability: float


_QUBIT_VALUES = {("0", "0"): 0, ("0", "1"): 1, ("1", "0"): 2, ("1", "1"): 3}
_QUTRIT_VALUES = {("12", "g"): 0, ("12", "e"): 1, ("3", "g"): 2, ("3", "e"): 3}
_ENCODING = ("I", "X", "Z", "Y")


def _check_variant(variant):
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def shared_pair(variant: str) -> PureState:
    """The entangled pair used for dense coding."""
    _check_variant(variant)
    if variant == "qubit":
        return PureState(np.array([1, 0, 0, 1]) / R2, (2, 2))
    g, e = ANCILLA_BASIS[0][1], ANCILLA_BASIS[1][1]
    return PureState((np.kron(U_LOGICAL, g) + np.kron(LEVEL3, e)) / R2, (3, 2))


def dense_encode(value: int, variant: str = "qubit", z: str = "corrected") -> PureState:
    """Alice applies I, X, Z or Y (for 0..3) to her half of the pair."""
    _check_variant(variant)
    if value not in (0, 1, 2, 3):
        raise ValueError(f"value must be in 0..3, got {value!r}")
    name = _ENCODING[value]
    op = QUBIT_GATES[name] if variant == "qubit" else _qutrit_gate(name, z)
    return shared_pair(variant).apply(op, [0])


def decode_branches(state: PureState, variant: str = "qubit") -> list:
    """cNOT (first factor controls) then H on the first factor, then measure both."""
    _check_variant(variant)
    if variant == "qubit":
        s = state.apply(QUBIT_CNOT, [0, 1]).apply(QUBIT_GATES["H"], [0])
        return branch_probabilities(s, [0, 1])
    s = state.apply(cnot_matrix(), [0, 1]).apply(_qutrit_matrix("H"), [0])
    return branch_probabilities(s, [0, 1], {0: LOGICAL_BASIS, 1: ANCILLA_BASIS})


def dense_decode(state: PureState, variant: str = "qubit") -> ClassicalMessage:
    """Most probable measurement outcome of the decoding circuit."""
    branches = decode_branches(state, variant)
    best = max(branches, key=lambda b: b.probability)
    table = _QUBIT_VALUES if variant == "qubit" else _QUTRIT_VALUES
    return ClassicalMessage(best.outcome_label, table.get(best.outcome_label), best.probability)


# ---------------------------------------------------------------------------
# teleportation

_QUBIT_CORRECTIONS = {("0", "0"): "I", ("0", "1"): "X", ("1", "0"): "Z", ("1", "1"): "Y"}
_QUTRIT_CORRECTIONS = {("g", "12"): "I", ("g", "3"): "X", ("e", "12"): "Z", ("e", "3"): "Y"}


def teleport_pair(variant: str) -> PureState:
    """Resource state shared by Alice and Bob for teleportation."""
    _check_variant(variant)
    if variant == "qubit":
        return shared_pair("qubit")
    return PureState((np.kron(U_LOGICAL, U_LOGICAL) + np.kron(LEVEL3, LEVEL3)) / R2, (3, 3))


def teleport_input(a: complex, b: complex, variant: str = "qubit") -> PureState:
    """``|phi> (x) |psi0>`` before Alice acts."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > NORM_TOL:
        raise ValueError("|a|^2 + |b|^2 must equal 1")
    phi = PureState(np.array([a, b], dtype=complex), (2,))
    return product(phi, teleport_pair(variant))


def alice_circuit(state: PureState, variant: str = "qubit") -> PureState:
    """cNOT on Alice's two factors (first controls) followed by H on the first."""
    _check_variant(variant)
    if variant == "qubit":
        return state.apply(QUBIT_CNOT, [0, 1]).apply(QUBIT_GATES["H"], [0])
    x3 = _qutrit_matrix("X")
    cnot = np.kron(np.diag([1, 0]), np.eye(3)) + np.kron(np.diag([0, 1]), x3)
    return state.apply(cnot, [0, 1]).apply(QUBIT_GATES["H"], [0])


@dataclass
class TeleportRecord:
    variant: str
    a: complex
    b: complex
    branches: list
    leakage: float = 0.0

    @property
    def min_fidelity(self) -> float:
        return min(br["fidelity"] for br in self.branches)

    @property
    def total_probability(self) -> float:
        return sum(br["probability"] for br in self.branches) + self.leakage

    def to_dict(self):
        return {
            "variant": self.variant,
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
            "leakage": self.leakage,
            "branches": [
                {"label": ",".join(br["label"]), "probability": br["probability"],
                 "fidelity": br["fidelity"], "correction": br["correction"]}
                for br in self.branches
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def teleport(a: complex, b: complex, variant: str = "qubit", z: str = "corrected") -> TeleportRecord:
    """Run the protocol for ``a|0> + b|1>`` (qubit) or ``a|g> + b|e>`` (qutrit).

    Every measurement branch is enumerated, Bob's correction applied, and the
    fidelity with the logical target state recorded.  In the qutrit variant
    Bob's logical basis is ``(u, |3>)`` and Alice's qutrit is measured in
    ``{u, |3>, u_perp}``; the total ``u_perp`` probability is ``leakage``.
    """
    a, b = complex(a), complex(b)
    s = alice_circuit(teleport_input(a, b, variant), variant)
    if variant == "qubit":
        branches = branch_probabilities(s, [0, 1])
        corrections = _QUBIT_CORRECTIONS
        target = np.array([a, b])
    else:
        branches = branch_probabilities(s, [0, 1], {0: ANCILLA_BASIS, 1: LOGICAL_BASIS})
        corrections = _QUTRIT_CORRECTIONS
        target = a * U_LOGICAL + b * LEVEL3
    target = PureState(target, (target.size,))
    out, leakage = [], 0.0
    for br in branches:
        name = corrections.get(br.outcome_label)
        if name is None:
            leakage += br.probability
            continue
        if br.collapsed is None:
            fid = float("nan")
            pre = None
        else:
            op = QUBIT_GATES[name] if variant == "qubit" else _qutrit_gate(name, z)
            pre = br.collapsed
            fid = target.fidelity(PureState(op @ pre.amplitudes, pre.basis_dims))
        out.append({"label": br.outcome_label, "probability": br.probability,
                    "correction": name, "fidelity": fid, "bob_before": pre})
    return TeleportRecord(variant, a, b, out, leakage)
