"""Qutrit under repeated ancilla readout, postselected on the null outcome.

One step of the map is an exact unitary step of the qutrit Hamiltonian
followed by the null-outcome Kraus operator and renormalization:

    rho -> M U rho U^+ M^+ / Tr[M U rho U^+ M^+]

Single mode monitors level 3 with one ancilla; double mode monitors levels 2
and 3 with one ancilla each and postselects on the joint outcome ``00``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .su_n_basis import bloch_to_density, bloch_to_flow, generators

MODES = ("single", "double")
NORM_FLOOR = 1e-14


class PostselectionError(RuntimeError):
    """The null-outcome probability vanished."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class QutritFrequencies:
    w12: float
    w23: float
    w13: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.w12, self.w23, self.w13])):
            raise ValueError("transition frequencies must be finite")


DEFAULT_FREQUENCIES = QutritFrequencies(0.6, 1.0, 1.6)


@dataclass(frozen=True)
class MonitorConfig:
    """Measurement rates (per unit time) and the time step of the map."""

    alpha2: float = 0.0
    alpha3: float = 0.0
    dt: float = 1e-3

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.alpha2 < 0 or self.alpha3 < 0:
            raise ValueError("measurement rates must be non-negative")
        for name in ("alpha2", "alpha3"):
            if getattr(self, name) * self.dt > 0.1:
                warnings.warn(f"{name}*dt = {getattr(self, name) * self.dt:.3g} > 0.1; "
                              "the Kraus expansion is not accurate", RuntimeWarning, stacklevel=3)


def _proj(level: int) -> np.ndarray:
    p = np.zeros((3, 3), dtype=complex)
    p[level - 1, level - 1] = 1.0
    return p


def system_hamiltonian(w: QutritFrequencies) -> np.ndarray:
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = w.w12
    h[1, 2] = h[2, 1] = w.w23
    h[0, 2] = h[2, 0] = w.w13
    return h


def unitary_step(w: QutritFrequencies, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` from the eigendecomposition of the Hermitian H."""
    lam, vecs = np.linalg.eigh(system_hamiltonian(w))
    return (vecs * np.exp(-1j * lam * dt)) @ vecs.conj().T


@dataclass(frozen=True)
class KrausSet:
    labels: tuple
    operators: tuple = field(repr=False)

    @property
    def null(self) -> np.ndarray:
        return self.operators[0]

    def __getitem__(self, label) -> np.ndarray:
        return self.operators[self.labels.index(label)]

    def completeness_defect(self) -> np.ndarray:
        """``sum_r M_r^+ M_r - I``."""
        total = sum(m.conj().T @ m for m in self.operators)
        return total - np.eye(3)


def kraus_single(cfg: MonitorConfig) -> KrausSet:
    """Null and click operators for one ancilla watching level 3.

    ``M0 = I - (a3/2) dt |3><3|`` and ``M1 = sqrt(a3 dt) |3><3|``, kept at the
    printed order, so completeness fails by ``(a3 dt)^2 / 4``.
    """
    if cfg.alpha2 != 0:
        raise ValueError("single-ancilla mode monitors level 3 only (alpha2 must be 0)")
    p3 = _proj(3)
    m0 = np.eye(3, dtype=complex) - 0.5 * cfg.alpha3 * cfg.dt * p3
    m1 = np.sqrt(cfg.alpha3 * cfg.dt) * p3
    return KrausSet(("0", "1"), (m0, m1))


def kraus_double(cfg: MonitorConfig) -> KrausSet:
    """The four joint-outcome operators for ancillae watching levels 2 and 3.

    With ``J_k = sqrt(a_k / dt)``: ``J_k^2 dt^2 = a_k dt`` and
    ``J_k dt = sqrt(a_k dt)``.
    """
    p2, p3 = _proj(2), _proj(3)
    s2, s3 = np.sqrt(cfg.alpha2 * cfg.dt), np.sqrt(cfg.alpha3 * cfg.dt)
    e2, e3 = cfg.alpha2 * cfg.dt, cfg.alpha3 * cfg.dt
    m00 = np.eye(3, dtype=complex) - e2 * p2 - e3 * p3
    m01 = -s3 * p3 - 1j * e2 * p2
    m10 = -s2 * p2 - 1j * e3 * p3
    m11 = 1j * (s2 * p2 + s3 * p3)
    return KrausSet(("00", "01", "10", "11"), (m00, m01, m10, m11))


def kraus_set(cfg: MonitorConfig, mode: str) -> KrausSet:
    if mode == "single":
        return kraus_single(cfg)
    if mode == "double":
        return kraus_double(cfg)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def step_postselected(rho, w: QutritFrequencies, cfg: MonitorConfig, mode: str = "single"):
    """One postselected step.  Returns ``(rho_next, norm)``.

    ``norm`` is the trace before renormalization, i.e. the probability of the
    null outcome for this step.
    """
    rho = np.asarray(rho, dtype=complex)
    a = kraus_set(cfg, mode).null @ unitary_step(w, cfg.dt)
    out = a @ rho @ a.conj().T
    norm = float(np.real(np.trace(out)))
    if not norm > NORM_FLOOR:
        raise PostselectionError(f"null-outcome probability {norm:.3e} vanished")
    return out / norm, norm


def null_generator(cfg: MonitorConfig, mode: str) -> np.ndarray:
    """``K`` with ``M_null = I - K dt``; exact because M_null is affine in dt."""
    return (np.eye(3) - kraus_set(cfg, mode).null) / cfg.dt


def map_rate(rho, w: QutritFrequencies, k: np.ndarray) -> np.ndarray:
    """dt -> 0 limit of the postselected map: ``-i[H,rho] - {K,rho} + 2 Tr[K rho] rho``."""
    h = system_hamiltonian(w)
    kr = k @ rho
    return -1j * (h @ rho - rho @ h) - kr - kr.conj().T + 2 * np.real(np.trace(kr)) * rho


def map_rate_derivative(rho, e, w: QutritFrequencies, k: np.ndarray) -> np.ndarray:
    """Directional derivative of :func:`map_rate` at ``rho`` along Hermitian ``e``."""
    h = system_hamiltonian(w)
    ke = k @ e
    return (-1j * (h @ e - e @ h) - ke - ke.conj().T
            + 2 * np.real(np.trace(ke)) * rho + 2 * np.real(np.trace(k @ rho)) * e)


@dataclass
class TrajectoryRecord:
    """Bloch coordinates of every recorded step plus per-step null probabilities.

    ``norms[0]`` is 1 (the initial state is not measured).
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray

    @property
    def survival(self) -> np.ndarray:
        """Cumulative probability of the postselected record up to each time."""
        return np.cumprod(self.norms)

    def flow_coords(self) -> np.ndarray:
        return bloch_to_flow(self.states)

    def densities(self):
        X = generators(3)
        return np.eye(3) / 3 + 0.5 * np.tensordot(self.states, X, axes=1)


def map_trajectory(x0, w: QutritFrequencies, cfg: MonitorConfig, mode: str = "single",
                   T: float = 20.0, *, allow_unphysical: bool = False) -> TrajectoryRecord:
    """Iterate :func:`step_postselected` ``round(T/dt)`` times from Bloch vector ``x0``."""
    if not T > 0:
        raise ValueError("T must be positive")
    rho = bloch_to_density(x0, 3, allow_unphysical=allow_unphysical)
    n = int(round(T / cfg.dt))
    a = kraus_set(cfg, mode).null @ unitary_step(w, cfg.dt)
    ah = a.conj().T
    X = generators(3)
    states = np.empty((n + 1, 8))
    norms = np.empty(n + 1)
    norms[0] = 1.0
    states[0] = np.real(np.einsum("ij,kji->k", rho, X))
    for step in range(1, n + 1):
        rho = a @ rho @ ah
        norm = np.real(np.trace(rho))
        if not norm > NORM_FLOOR:
            raise PostselectionError(
                f"null-outcome probability {norm:.3e} vanished at step {step}", step=step)
        rho = rho / norm
        rho = 0.5 * (rho + rho.conj().T)
        norms[step] = norm
        states[step] = np.real(np.einsum("ij,kji->k", rho, X))
    return TrajectoryRecord(np.arange(n + 1) * cfg.dt, states, norms)
