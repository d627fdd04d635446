import warnings

import numpy as np
import pytest

from qutrit_zeno.hamilton_flow import classify_regime
from qutrit_zeno.monitored_dynamics import (
    DEFAULT_FREQUENCIES,
    MonitorConfig,
    PostselectionError,
    QutritFrequencies,
    kraus_double,
    kraus_set,
    kraus_single,
    map_rate,
    map_trajectory,
    null_generator,
    step_postselected,
    system_hamiltonian,
    unitary_step,
)
from qutrit_zeno.su_n_basis import (
    UnphysicalStateWarning,
    bloch_to_density,
    canonical_initial_state,
    density_to_bloch,
    flow_to_bloch,
)

W0 = QutritFrequencies(0.0, 0.0, 0.0)


def expm_taylor(a, terms=60):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def pure(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_hamiltonian():
    assert np.array_equal(system_hamiltonian(W0), np.zeros((3, 3)))
    h = system_hamiltonian(DEFAULT_FREQUENCIES)
    assert (h[0, 1], h[1, 2], h[0, 2]) == (0.6, 1.0, 1.6)
    assert np.array_equal(h, h.conj().T)
    assert np.all(np.diag(h) == 0)


def test_frequencies_must_be_finite():
    with pytest.raises(ValueError):
        QutritFrequencies(np.nan, 1, 1)


def test_unitary_step_is_exact():
    w = QutritFrequencies(0.6, -1.0, 1.6)
    for dt in (1e-3, 0.3, 2.0):
        u = unitary_step(w, dt)
        assert np.abs(u @ u.conj().T - np.eye(3)).max() < 1e-12
        assert np.abs(u - expm_taylor(-1j * system_hamiltonian(w) * dt)).max() < 1e-12


def test_monitor_config_validation():
    with pytest.raises(ValueError):
        MonitorConfig(dt=0)
    with pytest.raises(ValueError):
        MonitorConfig(alpha3=-1)
    with pytest.warns(RuntimeWarning):
        MonitorConfig(alpha3=200, dt=1e-3)


def test_kraus_single_examples():
    k = kraus_single(MonitorConfig(alpha3=0.0, dt=0.1))
    assert np.array_equal(k.null, np.eye(3)) and np.array_equal(k["1"], np.zeros((3, 3)))
    k = kraus_single(MonitorConfig(alpha3=0.2, dt=0.01))
    assert np.allclose(k["0"], np.diag([1, 1, 0.999]), atol=1e-15)
    assert np.allclose(k["1"], np.diag([0, 0, np.sqrt(0.002)]), atol=1e-15)
    defect = k.completeness_defect()
    assert np.abs(defect).max() == pytest.approx(0.002**2 / 4, rel=1e-6)
    assert np.unravel_index(np.abs(defect).argmax(), (3, 3)) == (2, 2)
    with pytest.raises(ValueError):
        kraus_single(MonitorConfig(alpha2=0.1, alpha3=0.2))


def test_kraus_double_examples():
    k = kraus_double(MonitorConfig(0.0, 0.0, 0.01))
    assert np.array_equal(k["00"], np.eye(3))
    assert all(np.array_equal(k[r], np.zeros((3, 3))) for r in ("01", "10", "11"))
    k = kraus_double(MonitorConfig(0.1, 0.2, 0.01))
    assert np.allclose(k["00"], np.diag([1, 1 - 0.001, 1 - 0.002]), atol=1e-15)
    assert np.allclose(k["11"], 1j * np.diag([0, np.sqrt(0.001), np.sqrt(0.002)]), atol=1e-15)
    with pytest.raises(ValueError):
        kraus_set(MonitorConfig(), "triple")


@pytest.mark.parametrize("mode,cfg", [("single", (0.0, 0.7)), ("double", (0.4, 0.7))])
def test_completeness_defect_is_second_order(mode, cfg):
    defects = [np.abs(kraus_set(MonitorConfig(*cfg, dt), mode).completeness_defect()).max()
               for dt in (1e-2, 5e-3, 2.5e-3)]
    assert defects[0] / defects[1] >= 3.5 and defects[1] / defects[2] >= 3.5


def test_step_examples():
    rng = np.random.default_rng(1)
    rho = pure(rng.normal(size=3) + 1j * rng.normal(size=3))
    cfg = MonitorConfig(0.0, 0.0, 0.05)
    out, norm = step_postselected(rho, DEFAULT_FREQUENCIES, cfg)
    u = unitary_step(DEFAULT_FREQUENCIES, 0.05)
    assert norm == pytest.approx(1, abs=1e-14)
    assert np.abs(out - u @ rho @ u.conj().T).max() < 1e-14

    cfg = MonitorConfig(0.0, 0.8, 0.01)
    out, norm = step_postselected(np.diag([0, 0, 1]), W0, cfg)
    assert np.abs(out - np.diag([0, 0, 1])).max() < 1e-15
    assert norm == pytest.approx((1 - 0.8 * 0.01 / 2) ** 2, rel=1e-14)
    out, norm = step_postselected(np.diag([1, 0, 0]), W0, cfg)
    assert norm == 1 and np.array_equal(out, np.diag([1, 0, 0]))


def test_vanishing_postselection():
    with pytest.warns(RuntimeWarning):
        cfg = MonitorConfig(0.0, 2000.0, 1e-3)
    with pytest.raises(PostselectionError):
        step_postselected(np.diag([0, 0, 1]), W0, cfg)
    with pytest.raises(PostselectionError) as info:
        map_trajectory(density_to_bloch(np.diag([0, 0, 1.0])), W0, cfg, T=0.01)
    assert info.value.step == 1


@pytest.mark.parametrize("mode,a2", [("single", 0.0), ("double", 0.9)])
def test_trajectory_preserves_trace_and_purity(mode, a2):
    rng = np.random.default_rng(3)
    x0 = density_to_bloch(pure(rng.normal(size=3) + 1j * rng.normal(size=3)))
    rec = map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(a2, 1.3, 1e-3), mode, T=3.0)
    rhos = rec.densities()
    assert np.abs(np.trace(rhos, axis1=1, axis2=2) - 1).max() < 1e-12
    purity = np.einsum("tij,tji->t", rhos, rhos).real
    assert np.abs(purity - 1).max() < 1e-10
    assert np.all(np.diff(rec.times) > 0)
    assert rec.norms[0] == 1 and np.all(rec.norms <= 1)
    assert np.all(np.diff(rec.survival) <= 0)


def test_zero_coupling_is_unitary():
    rng = np.random.default_rng(4)
    rho0 = pure(rng.normal(size=3) + 1j * rng.normal(size=3))
    rec = map_trajectory(density_to_bloch(rho0), DEFAULT_FREQUENCIES,
                         MonitorConfig(0.0, 0.0, 1e-2), "double", T=5.0)
    h = system_hamiltonian(DEFAULT_FREQUENCIES)
    lam, v = np.linalg.eigh(h)
    for t, x in zip(rec.times[::50], rec.states[::50]):
        u = (v * np.exp(-1j * lam * t)) @ v.conj().T
        assert np.abs(density_to_bloch(u @ rho0 @ u.conj().T) - x).max() < 1e-10


def test_map_rate_is_the_small_step_limit():
    rng = np.random.default_rng(5)
    rho = pure(rng.normal(size=3) + 1j * rng.normal(size=3))
    for mode, a2 in (("single", 0.0), ("double", 0.6)):
        errs = []
        for dt in (1e-3, 5e-4):
            cfg = MonitorConfig(a2, 1.1, dt)
            out, _ = step_postselected(rho, DEFAULT_FREQUENCIES, cfg, mode)
            rate = map_rate(rho, DEFAULT_FREQUENCIES, null_generator(cfg, mode))
            errs.append(np.abs((out - rho) / dt - rate).max())
        assert errs[1] < errs[0] / 1.8


def test_double_mode_null_operator_doubles_the_rate():
    # M00 = I - a dt P3 against M0 = I - (a/2) dt P3: double mode with
    # alpha2 = 0 behaves like single mode at twice the rate
    k_single = null_generator(MonitorConfig(0.0, 1.4, 1e-3), "single")
    k_double = null_generator(MonitorConfig(0.0, 0.7, 1e-3), "double")
    assert np.abs(k_single - k_double).max() < 1e-9
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnphysicalStateWarning)
        x0 = flow_to_bloch(canonical_initial_state())
    kw = dict(T=5.0, allow_unphysical=True)
    single_same = map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(0, 0.7, 1e-3), "single", **kw)
    single_twice = map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(0, 1.4, 1e-3), "single", **kw)
    double = map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(0, 0.7, 1e-3), "double", **kw)
    assert np.abs(double.states - single_twice.states).max() < 1e-3
    assert np.abs(double.states - single_same.states).max() > 0.1


def test_unphysical_start_needs_opt_in():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnphysicalStateWarning)
        x0 = flow_to_bloch(canonical_initial_state())
    with pytest.raises(ValueError):
        map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(0, 0.2), T=0.1)


@pytest.mark.parametrize("alpha3,expected", [(0.2, "oscillatory"), (1.7, "zeno")])
def test_map_regimes(alpha3, expected):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnphysicalStateWarning)
        x0 = flow_to_bloch(canonical_initial_state())
    rec = map_trajectory(x0, DEFAULT_FREQUENCIES, MonitorConfig(0, alpha3, 1e-3), T=20.0,
                         allow_unphysical=True)
    y = rec.flow_coords()[::10]
    report = classify_regime(rec.times[::10], y)
    assert report.regime == expected
    if expected == "zeno":
        late = rec.times[::10] > 10
        assert np.all(y[late].var(axis=0) < 1e-4)
