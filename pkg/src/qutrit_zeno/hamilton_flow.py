"""Most-likely-path equations for the postselected qutrit, in flow coordinates.

The drift fields, backaction functionals and momentum equations below are
transcribed term by term from the published displays ("as-published").
The "oracle-corrected" variant replaces them with quantities computed from
the measurement map itself: the drift is the dt -> 0 rate of the
null-outcome map, and the momentum flow is ``-dH/dx`` of the resulting
dynamical Hamiltonian ``H = p . xdot + F``.

All coordinates here are flow coordinates (see :mod:`.su_n_basis`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .monitored_dynamics import (
    DEFAULT_FREQUENCIES,
    MonitorConfig,
    QutritFrequencies,
    map_rate,
    map_rate_derivative,
    null_generator,
)
from .su_n_basis import bloch_to_flow, density_to_bloch, generators, qutrit_density

S3 = math.sqrt(3.0)
VARIANTS = ("as-published", "oracle-corrected")
DIVERGENCE_TOL = 1e-6


# ---------------------------------------------------------------------------
# as-published fields

def drift_single(x, w: QutritFrequencies, alpha3: float) -> np.ndarray:
    x1, x2, x3, x4, x5, x6, x7, x8 = (float(v) for v in x)
    a3 = alpha3
    g = (a3 / 3) * (1 - 2 * S3 * x8)
    h = (a3 / 6) * (1 + 4 * S3 * x8)
    return np.array([
        w.w23 * x5 + w.w13 * x7 + g * x1,
        -2 * w.w12 * x3 - w.w23 * x4 + w.w13 * x6 + g * x2,
        2 * w.w12 * x2 + w.w13 * x5 - w.w23 * x7 + g * x3,
        w.w23 * x2 - w.w12 * x7 - h * x4,
        -w.w23 * x1 + w.w12 * x6 - w.w13 * (x3 + 2 * S3 * x8) - h * x5,
        -w.w13 * x2 - w.w12 * x5 - h * x6,
        -w.w13 * x1 + w.w12 * x4 + w.w23 * (x3 - 2 * S3 * x8) - h * x7,
        (S3 / 2) * (w.w13 * x5 + w.w23 * x7
                    + (2 / 9) * a3 * (1 - S3 * x8 * (1 + 2 * S3 * x8))),
    ])


def backaction_single(x, alpha3: float) -> float:
    x8 = float(x[7])
    return -(alpha3 / 3) * x8 * (1 - 2 * S3 * x8)


def _backaction_single_grad(x, alpha3: float) -> np.ndarray:
    g = np.zeros(8)
    g[7] = -alpha3 / 3 + (4 * S3 / 3) * alpha3 * float(x[7])
    return g


def momentum_flow_single(x, p, w: QutritFrequencies, alpha3: float) -> np.ndarray:
    """Momentum equations of the one-ancilla flow as printed."""
    x1, x2, x3, x4, x5, x6, x7, x8 = (float(v) for v in x)
    p1, p2, p3, p4, p5, p6, p7, p8 = (float(v) for v in p)
    a3 = alpha3
    g = (a3 / 3) * (1 - 2 * S3 * x8)
    h = (a3 / 6) * (1 + 4 * S3 * x8)
    return np.array([
        -g * p1 + w.w23 * p5 + w.w13 * p7,
        -g * p2 - 2 * w.w12 * p3 - w.w23 * p4 + w.w13 * p6,
        2 * w.w12 * p2 - g * p3 + w.w13 * p5 - w.w23 * p7,
        w.w23 * p2 + h * p4,
        w.w23 * p1 - w.w13 * p3 + h * p5 + w.w12 * p6 - (S3 / 2) * w.w13 * p8,
        -w.w13 * p2 - w.w12 * p5 + h * p6,
        -w.w13 * p1 + w.w23 * p3 + w.w12 * p4 + h * p7 - (S3 / 2) * w.w23 * p7,
        (2 / S3) * a3 * (x1 * p1 + x2 * p2 + x3 * p3 + x4 * p4 + x5 * p5 + x6 * p6
                         + x7 * p7 + 2 * x8 * p8)
        + 2 * S3 * (w.w13 * p5 + w.w23 * p7) + (a3 / 3) * (p8 + 1) - (4 / S3) * a3 * x8,
    ])


def drift_double(x, w: QutritFrequencies, alpha2: float, alpha3: float) -> np.ndarray:
    x1, x2, x3, x4, x5, x6, x7, x8 = (float(v) for v in x)
    a2, a3 = alpha2, alpha3
    w12, w23, w13 = w.w12, w.w23, w.w13
    c = (a2 - 2 * a3) / 3 * (2 * S3 * x8 - 1)
    return np.array([
        -a2 * x1 * x3 + w23 * x5 + w13 * x7 + c * x1,
        -(2 * w12 * x3 + a2 * x2 * x3 + w23 * x4 - w13 * x6 - c * x2),
        (6 * w12 * x2 + 2 * a3 * x3 + 3 * w23 * x5 - 3 * w23 * x7 - 4 * S3 * a3 * x3 * x8
         - a2 * (1 + x3) * (-2 + 3 * x3 - 2 * S3 * x8)) / 3,
        (3 * w23 * x2 - 3 * w12 * x7 + a2 * x4 * (2 - 3 * x3 + 2 * S3 * x8)
         - a3 * x4 * (1 + 4 * S3 * x8)) / 3,
        (-3 * w23 * x1 + (2 * a2 - a3 - 3 * a2 * x3) * x5 + 3 * w12 * x6
         + 2 * S3 * (a2 - 2 * a3) * x5 * x8 - 3 * w13 * (x3 + 2 * S3 * x8)) / 3,
        -w13 * x2 - w12 * x5
        - x6 * (a2 + a3 + 3 * a2 * x3 - 2 * S3 * a2 * x8 + 4 * S3 * a3 * x8) / 3,
        -w13 * x1 + w12 * x4 - (a2 + a3 + 3 * a2 * x3) * x7 / 3
        + (2 / S3) * (a2 - 2 * a3) * x7 * x8 + w23 * (x3 - 2 * S3 * x8),
        (4 * a3 + 9 * w13 * x5 + 9 * w23 * x7 - 4 * a3 * x8 * (S3 + 6 * x8)
         + a3 * (-2 + 3 * x3 + 2 * S3 * (1 - 3 * x3) * x8 + 12 * x8**2)) / (6 * S3),
    ])


def backaction_double(x, alpha2: float, alpha3: float) -> float:
    x3, x8 = float(x[2]), float(x[7])
    return alpha2 * x3 - (2 / 3) * (alpha2 + alpha3 + S3 * alpha2 * x8 - 2 * S3 * alpha3 * x8)


def _backaction_double_grad(x, alpha2: float, alpha3: float) -> np.ndarray:
    g = np.zeros(8)
    g[2] = alpha2
    g[7] = -(2 * S3 / 3) * (alpha2 - 2 * alpha3)
    return g


def momentum_flow_double(x, p, w: QutritFrequencies, alpha2: float, alpha3: float,
                         p8_constant: bool = True) -> np.ndarray:
    """Momentum equations of the two-ancilla flow as printed.

    The p8 line carries a ``-1`` inside its first parenthesis that is marked
    as uncertain in print; ``p8_constant`` keeps (True) or drops it.
    """
    x1, x2, x3, x4, x5, x6, x7, x8 = (float(v) for v in x)
    p1, p2, p3, p4, p5, p6, p7, p8 = (float(v) for v in p)
    a2, a3 = alpha2, alpha3
    w12, w23, w13 = w.w12, w.w23, w.w13
    c = (a2 - 2 * a3) / 3 * (2 * S3 * x8 - 1)
    q = 1.0 if p8_constant else 0.0
    return np.array([
        a2 * x3 * p1 - c * p1 + w23 * p5 + w13 * p7,
        a2 * x3 * p2 - c * p2 - 2 * w12 * p3 - w23 * p4 + w13 * p6,
        a2 * x1 * p1 + 2 * w12 * p2 + a2 * x2 * p2 - (2 / 3) * a3 * p3
        + (4 * S3 / 3) * a3 * x8 * p3 + (a2 / 3) * (1 + 6 * x3 - 2 * S3 * x8) * p3
        + a2 * x4 * p4 + a2 * x5 * p5 + w13 * p5 + a2 * x6 * p6 + a2 * x7 * p7 - w23 * p7
        - a3 / (2 * S3) * p8 + x8 * p8 - a2,
        w23 * p2 - (a2 / 3) * (2 - 3 * x3 + 2 * S3 * x8) * p4
        + (a3 / 3) * (1 + 4 * S3 * x8) * p4 - w12 * p7,
        -w23 * p1 - w23 * p3 - (2 * a2 - a3 - 3 * a2 * x3) * p5 / 3
        - (2 * S3 / 3) * (a2 - 2 * a3) * x8 * p5 + w12 * p6 - (S3 / 2) * w13 * p8,
        -w13 * p2 - w12 * p5
        + (a2 + a3 + 3 * a2 * x3 - 2 * S3 * a2 * x8 + 4 * S3 * a3 * x8) * p6 / 3,
        -w13 * p1 + w23 * p3 + w12 * p4 + (a2 + a3 + 3 * a2 * x3) * p7 / 3
        - (2 / S3) * (a2 - 2 * a3) * x8 * p7 - (S3 / 2) * w23 * p8,
        -(2 / S3) * (a2 - 2 * a3) * (x1 * p1 + x2 * p2 + x3 * p3 + x4 * p4 + x5 * p5
                                     + x6 * p6 + x7 * p7 - q)
        - (2 / S3) * a2 * p3 + 2 * S3 * (w13 * p5 + w23 * p7)
        + (2 / 3) * a3 * (1 + 2 * S3 * x8) * p8 - (a3 / 3) * (1 - 3 * x3) * p8
        - (4 / S3) * a3 * x8 * p8,
    ])


# ---------------------------------------------------------------------------
# map-derived fields

_X = generators(3)
# d rho / d y_i in flow coordinates
_DRHO = np.concatenate([_X[:7] / 2, _X[7:] * 1.0])
# flow coordinate i is c_i * Tr[rho X_i]
_COORD_SCALE = np.array([1, 1, 1, 1, 1, 1, 1, 0.5])


def _null_k(w, alpha2, alpha3, mode):
    cfg = MonitorConfig(alpha2=alpha2, alpha3=alpha3, dt=1e-3)
    return null_generator(cfg, mode)


def oracle_drift(x, w: QutritFrequencies, alpha2: float, alpha3: float, mode: str) -> np.ndarray:
    """Rate of change of the flow coordinates under the postselected map (dt -> 0)."""
    rho = qutrit_density(x)
    rate = map_rate(rho, w, _null_k(w, alpha2, alpha3, mode))
    return _COORD_SCALE * np.real(np.einsum("ij,kji->k", rate, _X))


def oracle_drift_jacobian(x, w: QutritFrequencies, alpha2: float, alpha3: float,
                          mode: str) -> np.ndarray:
    """``J[j, i] = d xdot_j / d x_i`` of :func:`oracle_drift`, computed exactly."""
    rho = qutrit_density(x)
    k = _null_k(w, alpha2, alpha3, mode)
    jac = np.empty((8, 8))
    for i in range(8):
        d = map_rate_derivative(rho, _DRHO[i], w, k)
        jac[:, i] = _COORD_SCALE * np.real(np.einsum("ij,kji->k", d, _X))
    return jac


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowSpec:
    """Which flow to evaluate: frequencies, rates, ancilla mode and variant."""

    w: QutritFrequencies = DEFAULT_FREQUENCIES
    alpha2: float = 0.0
    alpha3: float = 0.0
    mode: str = "single"
    variant: str = "as-published"

    def __post_init__(self):
        if self.mode not in ("single", "double"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.mode == "single" and self.alpha2 != 0:
            raise ValueError("single mode has no level-2 detector (alpha2 must be 0)")

    def with_variant(self, variant: str) -> "FlowSpec":
        return FlowSpec(self.w, self.alpha2, self.alpha3, self.mode, variant)

    def drift(self, x) -> np.ndarray:
        if self.variant == "oracle-corrected":
            return oracle_drift(x, self.w, self.alpha2, self.alpha3, self.mode)
        if self.mode == "single":
            return drift_single(x, self.w, self.alpha3)
        return drift_double(x, self.w, self.alpha2, self.alpha3)

    def backaction(self, x) -> float:
        if self.mode == "single":
            return backaction_single(x, self.alpha3)
        return backaction_double(x, self.alpha2, self.alpha3)

    def backaction_grad(self, x) -> np.ndarray:
        if self.mode == "single":
            return _backaction_single_grad(x, self.alpha3)
        return _backaction_double_grad(x, self.alpha2, self.alpha3)

    def momentum(self, x, p) -> np.ndarray:
        if self.variant == "oracle-corrected":
            jac = oracle_drift_jacobian(x, self.w, self.alpha2, self.alpha3, self.mode)
            return -jac.T @ np.asarray(p, dtype=float) - self.backaction_grad(x)
        if self.mode == "single":
            return momentum_flow_single(x, p, self.w, self.alpha3)
        return momentum_flow_double(x, p, self.w, self.alpha2, self.alpha3)


def dynamical_hamiltonian(x, p, spec: FlowSpec) -> float:
    """``H = sum_i p_i xdot_i + F``."""
    return float(np.dot(np.asarray(p, dtype=float), spec.drift(x))) + spec.backaction(x)


def hamiltonian_gradient_fd(x, p, spec: FlowSpec, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of :func:`dynamical_hamiltonian` in x."""
    x = np.asarray(x, dtype=float)
    grad = np.empty(8)
    for i in range(8):
        e = np.zeros(8)
        e[i] = step
        grad[i] = (dynamical_hamiltonian(x + e, p, spec)
                   - dynamical_hamiltonian(x - e, p, spec)) / (2 * step)
    return grad


# ---------------------------------------------------------------------------
# integration

class FlowBlowUp(ArithmeticError):
    pass


@dataclass
class FlowSeries:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray | None = None
    truncated_at: float | None = None

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None


def integrate(x0, spec: FlowSpec, T: float, h: float = 1e-3, p0=None) -> FlowSeries:
    """Fixed-step classical RK4 on x (and p when ``p0`` is given).

    A non-finite state stops the integration; the series is cut at the last
    finite point and ``truncated_at`` records the failure time.
    """
    if not h > 0:
        raise ValueError("step must be positive")
    if T < h:
        raise ValueError("T must be at least one step")
    n = int(round(T / h))
    x = np.array(x0, dtype=float)
    with_p = p0 is not None
    if with_p:
        y = np.concatenate([x, np.asarray(p0, dtype=float)])

        def f(y):
            return np.concatenate([spec.drift(y[:8]), spec.momentum(y[:8], y[8:])])
    else:
        y = x

        def f(y):
            return spec.drift(y)

    out = np.empty((n + 1, y.size))
    out[0] = y
    truncated_at = None
    last = n
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            try:
                k1 = f(y)
                k2 = f(y + 0.5 * h * k1)
                k3 = f(y + 0.5 * h * k2)
                k4 = f(y + h * k3)
            except OverflowError:
                k4 = np.full_like(y, np.nan)
                k1 = k2 = k3 = k4
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                truncated_at = (k + 1) * h
                last = k
                break
            out[k + 1] = y
    out = out[: last + 1]
    t = np.arange(last + 1) * h
    if with_p:
        return FlowSeries(t, out[:, :8], out[:, 8:], truncated_at)
    return FlowSeries(t, out, None, truncated_at)


# ---------------------------------------------------------------------------
# regimes

REGIMES = ("oscillatory", "intermediate", "zeno")


@dataclass
class RegimeReport:
    regime: str
    freeze_time: float | None
    trailing_variance: np.ndarray

    def to_dict(self):
        return {
            "regime": self.regime,
            "freeze_time": self.freeze_time,
            "trailing_variance": [float(v) for v in self.trailing_variance],
        }


def _window_variances(series: np.ndarray, width: int) -> np.ndarray:
    """Variance of every length-``width`` window, shape (len - width + 1, dim)."""
    s = series - series.mean(axis=0)
    zero = np.zeros((1, s.shape[1]))
    c1 = np.concatenate([zero, np.cumsum(s, axis=0)])
    c2 = np.concatenate([zero, np.cumsum(s * s, axis=0)])
    m = (c1[width:] - c1[:-width]) / width
    v = (c2[width:] - c2[:-width]) / width - m * m
    return np.maximum(v, 0.0)


def classify_regime(t, series, window: float = 5.0, threshold: float = 1e-4,
                    damping: float = 0.25) -> RegimeReport:
    """Classify a coordinate time series as oscillatory, intermediate or zeno.

    Zeno: every coordinate's variance over the trailing window is below
    ``threshold``; ``freeze_time`` is then the earliest window start after
    which all windows stay below it.  Oscillatory: every coordinate stays
    above ``threshold`` and the summed trailing variance keeps at least
    ``damping`` of the summed leading-window variance.  Anything else is
    intermediate.
    """
    t = np.asarray(t, dtype=float)
    series = np.asarray(series, dtype=float)
    if series.ndim == 1:
        series = series[:, None]
    if len(t) < 2:
        raise ValueError("series too short")
    dt = (t[-1] - t[0]) / (len(t) - 1)
    width = max(int(round(window / dt)), 1) + 1
    if len(t) < 2 * width - 1:
        raise ValueError(f"series covers {t[-1] - t[0]:.3g} time units; "
                         f"need at least {2 * window:.3g}")
    var = _window_variances(series, width)
    trailing = var[-1]
    leading = var[0]
    quiet = np.all(var < threshold, axis=1)
    if quiet[-1]:
        loud = np.flatnonzero(~quiet)
        start = 0 if loud.size == 0 else loud[-1] + 1
        return RegimeReport("zeno", float(t[start]), trailing)
    lead_total = leading.sum()
    persistent = lead_total == 0 or trailing.sum() >= damping * lead_total
    if np.all(trailing >= threshold) and persistent:
        return RegimeReport("oscillatory", None, trailing)
    return RegimeReport("intermediate", None, trailing)


def delocalization(series: FlowSeries, report: RegimeReport, window: float = 5.0) -> dict:
    """Momentum growth after the coordinates freeze.

    Returns the largest |p_i| at the freeze time, the largest |p_i| over the
    trailing window, and their ratio.
    """
    if series.p is None or report.freeze_time is None:
        raise ValueError("need a momentum series and a frozen regime")
    i0 = int(np.searchsorted(series.t, report.freeze_time))
    tail = series.t >= series.t[-1] - window
    at_freeze = float(np.abs(series.p[i0]).max())
    tail_max = float(np.abs(series.p[tail]).max())
    return {"p_max_at_freeze": at_freeze, "p_max_trailing": tail_max,
            "growth": tail_max / at_freeze}


# ---------------------------------------------------------------------------
# divergence between printed and map-derived equations

def _random_density(rng) -> np.ndarray:
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_flow_points(n: int, seed: int = 0):
    """Random physical flow coordinates, momenta, frequencies and rates."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        x = bloch_to_flow(density_to_bloch(_random_density(rng)))
        p = rng.normal(size=8)
        w = QutritFrequencies(*rng.uniform(0.0, 2.0, size=3))
        a2, a3 = rng.uniform(0.0, 2.0, size=2)
        pts.append((x, p, w, float(a2), float(a3)))
    return pts


@dataclass
class DivergenceReport:
    """Per-line maximum absolute discrepancies between printed and reference equations.

    Sections:

    * ``drift``: printed drift minus map-derived drift, split into the
      Hamiltonian part (rates zero) and the measurement part (frequencies zero).
    * ``momentum``: printed momentum minus ``-dH/dx`` of the Hamiltonian built
      from the printed drift and functional, per term: ``const`` is the
      momentum-independent part, ``p1..p8`` the coefficient of each momentum.
    * ``momentum_vs_map``: the same against the map-derived Hamiltonian.
    * ``notes``: scalar checks (limits, the uncertain constant).
    """

    mode: str
    samples: int
    seed: int
    drift: dict = field(default_factory=dict)
    momentum: dict = field(default_factory=dict)
    momentum_vs_map: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def divergent_lines(self, section: str, tol: float = DIVERGENCE_TOL) -> list:
        table = getattr(self, section)
        return [k for k, row in table.items() if row["max"] > tol]

    def to_dict(self):
        return {"mode": self.mode, "samples": self.samples, "seed": self.seed,
                "drift": self.drift, "momentum": self.momentum,
                "momentum_vs_map": self.momentum_vs_map, "notes": self.notes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self, tol: float = DIVERGENCE_TOL) -> str:
        lines = [f"divergence report: mode={self.mode} samples={self.samples} seed={self.seed}"]
        for name in ("drift", "momentum", "momentum_vs_map"):
            table = getattr(self, name)
            cols = [c for c in next(iter(table.values())) if c != "max"]
            lines.append("")
            lines.append(f"[{name}]")
            lines.append("line    max       " + " ".join(f"{c:>9}" for c in cols))
            for key, row in table.items():
                flag = "*" if row["max"] > tol else " "
                vals = " ".join(f"{row[c]:9.2e}" for c in cols)
                lines.append(f"{key:<6}{flag} {row['max']:9.2e} {vals}")
        lines.append("")
        lines.append("[notes]")
        for k, v in self.notes.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines)


def _round(v: float) -> float:
    return float(f"{v:.12e}")


def _momentum_table(points, printed, reference):
    rows = {f"p{i + 1}": {"max": 0.0, "const": 0.0, **{f"p{j + 1}": 0.0 for j in range(8)}}
            for i in range(8)}
    for x, p, w, a2, a3 in points:
        d_full = printed(x, p, w, a2, a3) - reference(x, p, w, a2, a3)
        zero = np.zeros(8)
        d0 = printed(x, zero, w, a2, a3) - reference(x, zero, w, a2, a3)
        for i in range(8):
            row = rows[f"p{i + 1}"]
            row["max"] = max(row["max"], abs(d_full[i]))
            row["const"] = max(row["const"], abs(d0[i]))
        for j in range(8):
            e = np.zeros(8)
            e[j] = 1.0
            dj = printed(x, e, w, a2, a3) - reference(x, e, w, a2, a3) - d0
            for i in range(8):
                row = rows[f"p{i + 1}"]
                row[f"p{j + 1}"] = max(row[f"p{j + 1}"], abs(dj[i]))
    return {k: {c: _round(v) for c, v in row.items()} for k, row in rows.items()}


def divergence_report(mode: str = "single", n_samples: int = 1000, seed: int = 0,
                      fd_step: float = 1e-6) -> DivergenceReport:
    """Compare the printed equations of ``mode`` with their map-derived counterparts.

    Sampling is deterministic in ``seed``; numbers are rounded to 13
    significant digits so repeated runs agree exactly.
    """
    points = random_flow_points(n_samples, seed)
    report = DivergenceReport(mode, n_samples, seed)

    def spec(w, a2, a3, variant):
        return FlowSpec(w, a2 if mode == "double" else 0.0, a3, mode, variant)

    drift_rows = {f"x{i + 1}": {"max": 0.0, "hamiltonian": 0.0, "measurement": 0.0}
                  for i in range(8)}
    zero_w = QutritFrequencies(0.0, 0.0, 0.0)
    for x, p, w, a2, a3 in points:
        pub = spec(w, a2, a3, "as-published")
        orc = spec(w, a2, a3, "oracle-corrected")
        full = np.abs(pub.drift(x) - orc.drift(x))
        ham = np.abs(spec(w, 0.0, 0.0, "as-published").drift(x)
                     - spec(w, 0.0, 0.0, "oracle-corrected").drift(x))
        meas = np.abs(spec(zero_w, a2, a3, "as-published").drift(x)
                      - spec(zero_w, a2, a3, "oracle-corrected").drift(x))
        for i in range(8):
            row = drift_rows[f"x{i + 1}"]
            row["max"] = max(row["max"], full[i])
            row["hamiltonian"] = max(row["hamiltonian"], ham[i])
            row["measurement"] = max(row["measurement"], meas[i])
    report.drift = {k: {c: _round(v) for c, v in row.items()} for k, row in drift_rows.items()}

    def printed(x, p, w, a2, a3):
        return spec(w, a2, a3, "as-published").momentum(x, p)

    def hamilton_published(x, p, w, a2, a3):
        return -hamiltonian_gradient_fd(x, p, spec(w, a2, a3, "as-published"), fd_step)

    def hamilton_map(x, p, w, a2, a3):
        return spec(w, a2, a3, "oracle-corrected").momentum(x, p)

    report.momentum = _momentum_table(points, printed, hamilton_published)
    report.momentum_vs_map = _momentum_table(points, printed, hamilton_map)

    if mode == "double":
        with_c, without_c = 0.0, 0.0
        for x, p, w, a2, a3 in points:
            ref = hamilton_published(x, np.zeros(8), w, a2, a3)[7]
            zero = np.zeros(8)
            with_c = max(with_c, abs(momentum_flow_double(x, zero, w, a2, a3, True)[7] - ref))
            without_c = max(without_c,
                            abs(momentum_flow_double(x, zero, w, a2, a3, False)[7] - ref))
        report.notes["p8_constant_residual_with"] = _round(with_c)
        report.notes["p8_constant_residual_without"] = _round(without_c)
        report.notes["p8_constant_verdict"] = "keep" if with_c < without_c else "drop"
        red_drift, red_f = 0.0, 0.0
        red_lines = set()
        for x, p, w, a2, a3 in points:
            d = np.abs(drift_double(x, w, 0.0, a3) - drift_single(x, w, a3))
            red_lines |= {f"x{i + 1}" for i in np.flatnonzero(d > DIVERGENCE_TOL)}
            red_drift = max(red_drift, d.max())
            red_f = max(red_f, abs(backaction_double(x, 0.0, a3) - backaction_single(x, a3)))
        report.notes["alpha2_zero_drift_residual"] = _round(red_drift)
        report.notes["alpha2_zero_drift_lines"] = sorted(red_lines)
        report.notes["alpha2_zero_backaction_residual"] = _round(red_f)
    return report
