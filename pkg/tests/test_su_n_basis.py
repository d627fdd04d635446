import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_zeno.su_n_basis import (
    UnphysicalStateError,
    UnphysicalStateWarning,
    bloch_length_check,
    bloch_to_density,
    bloch_to_flow,
    canonical_initial_state,
    density_to_bloch,
    flow_to_bloch,
    generators,
    is_pure,
    qutrit_density,
    structure_constants,
    validate_density,
)

S3 = np.sqrt(3.0)

# textbook Gell-Mann matrices, written out independently of the constructor
GELL_MANN = np.array([
    [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
    [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
    [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
    [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
    [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
    [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
    np.diag([1, 1, -2]) / S3,
], dtype=complex)


def random_density(rng, n, rank=None):
    g = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generator_invariants(n):
    X = generators(n)
    assert X.shape == (n * n - 1, n, n)
    for a in X:
        assert np.abs(a - a.conj().T).max() == 0
        assert abs(np.trace(a)) < 1e-12
    gram = np.einsum("iab,jba->ij", X, X)
    assert np.abs(gram - 2 * np.eye(n * n - 1)).max() < 1e-12


def test_two_levels_are_pauli():
    X = generators(2)
    pauli = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    assert np.array_equal(X, pauli)


def test_three_levels_match_gell_mann_order():
    assert np.abs(generators(3) - GELL_MANN).max() < 1e-15
    assert np.allclose(generators(3)[7], np.diag([1, 1, -2]) / S3)


def test_generators_are_read_only():
    with pytest.raises(ValueError):
        generators(3)[0, 0, 0] = 5


@pytest.mark.parametrize("n", [1, 0, 2.5])
def test_rejects_bad_level_count(n):
    with pytest.raises(ValueError):
        generators(n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_structure_constants_reconstruct(n):
    X = generators(n)
    sc = structure_constants(n)
    m = n * n - 1
    for i in range(m):
        for j in range(m):
            comm = X[i] @ X[j] - X[j] @ X[i]
            anti = X[i] @ X[j] + X[j] @ X[i]
            assert np.abs(comm - 2j * np.tensordot(sc.f[i, j], X, axes=1)).max() < 1e-12
            rhs = (4 / n) * (i == j) * np.eye(n) + 2 * np.tensordot(sc.g[i, j], X, axes=1)
            assert np.abs(anti - rhs).max() < 1e-12
    assert np.abs(sc.f + sc.f.transpose(1, 0, 2)).max() < 1e-15
    assert np.abs(sc.f + sc.f.transpose(0, 2, 1)).max() < 1e-15
    assert np.abs(sc.g - sc.g.transpose(1, 0, 2)).max() < 1e-15
    assert np.abs(sc.g - sc.g.transpose(0, 2, 1)).max() < 1e-15


def test_su2_structure_constants_are_levi_civita():
    sc = structure_constants(2)
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                         (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}.items():
        eps[i, j, k] = s
    assert np.abs(sc.f - eps).max() < 1e-15
    assert np.abs(sc.g).max() < 1e-15


def test_su3_known_values():
    f, g = structure_constants(3).f, structure_constants(3).g
    assert f[0, 1, 2] == pytest.approx(1)
    assert f[0, 3, 6] == pytest.approx(0.5)
    assert f[3, 4, 7] == pytest.approx(S3 / 2)
    assert f[5, 6, 7] == pytest.approx(S3 / 2)
    assert g[0, 0, 7] == pytest.approx(1 / S3)
    assert g[7, 7, 7] == pytest.approx(-1 / S3)


def test_density_examples():
    assert np.allclose(bloch_to_density(np.zeros(8)), np.eye(3) / 3, atol=1e-15)
    rho = bloch_to_density([0, 0, 1, 0, 0, 0, 0, 1 / S3])
    assert np.abs(rho - np.diag([1, 0, 0])).max() < 1e-12
    x = np.zeros(8)
    x[3], x[4] = 0.2, -0.1
    assert bloch_to_density(x)[0, 2] == pytest.approx((0.2 + 0.1j) / 2)
    x3 = density_to_bloch(np.diag([0, 0, 1]))
    assert np.allclose(x3, [0, 0, 0, 0, 0, 0, 0, -2 / S3], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_round_trip_and_purity_identity(n):
    rng = np.random.default_rng(n)
    for k in range(100):
        rho = random_density(rng, n, rank=1 if k % 3 == 0 else None)
        x = density_to_bloch(rho)
        back = bloch_to_density(x, n)
        assert np.abs(back - rho).max() < 1e-12
        assert np.abs(density_to_bloch(back) - x).max() < 1e-12
        purity = np.trace(rho @ rho).real
        assert purity == pytest.approx(1 / n + 0.5 * x @ x, abs=1e-12)
        assert bool(bloch_length_check(x, n))
        validate_density(rho)
        if k % 3 == 0:
            assert is_pure(rho, 1e-10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8))
def test_any_coordinates_round_trip(x):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnphysicalStateWarning)
        rho = bloch_to_density(x, allow_unphysical=True)
    assert np.abs(density_to_bloch(rho) - np.array(x)).max() < 1e-12


def test_unphysical_is_flagged():
    x = np.zeros(8)
    x[2] = 1.1  # inside the length bound, still negative
    assert bloch_length_check(x, 3).ok
    with pytest.raises(UnphysicalStateError):
        bloch_to_density(x)
    with pytest.warns(UnphysicalStateWarning):
        bloch_to_density(x, allow_unphysical=True)


def test_density_to_bloch_rejects_bad_input():
    with pytest.raises(ValueError):
        density_to_bloch(np.ones((2, 3)))
    with pytest.raises(ValueError):
        density_to_bloch(np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        bloch_to_density(np.zeros(7))


def test_length_check_examples():
    c = bloch_length_check(np.zeros(8), 3)
    assert c.ok and c.length == 0 and c.bound == pytest.approx(np.sqrt(4 / 3))
    x = np.zeros(8)
    x[0] = 4 / 3
    assert not bloch_length_check(x, 3)
    c = bloch_length_check([1, 0, 0], 2)
    assert c.ok and c.length == c.bound == 1


def test_flow_coordinates():
    rng = np.random.default_rng(7)
    y = rng.normal(size=8)
    x = flow_to_bloch(y)
    assert x[7] == 2 * y[7] and np.array_equal(x[:7], y[:7])
    assert np.array_equal(bloch_to_flow(x), y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnphysicalStateWarning)
        rho = bloch_to_density(x, allow_unphysical=True)
    assert np.abs(qutrit_density(y) - rho).max() < 1e-14
    assert qutrit_density(y)[2, 2] == pytest.approx(1 / 3 - 2 * y[7] / S3)


def test_canonical_initial_state():
    with pytest.warns(UnphysicalStateWarning):
        x = canonical_initial_state()
    assert np.array_equal(x[:7], [0.3, 0.5, 0.3, 0.5, 0.3, 0.5, 0.3])
    assert x[7] == pytest.approx(np.sqrt(4 / 3 - 1.11), abs=1e-15)
    assert x @ x == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        canonical_initial_state(x8_rule="caption-sum")
    with pytest.warns(UnphysicalStateWarning):
        y = canonical_initial_state(x8_rule="caption-squares")
    assert y[7] == pytest.approx(np.sqrt(16 / 9 - 1.11))
    with pytest.raises(ValueError):
        canonical_initial_state(x8_rule="nope")
