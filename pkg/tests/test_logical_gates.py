import numpy as np
import pytest

from qutrit_zeno.logical_gates import (
    GATE_NAMES,
    LOGICAL,
    LogicalSubspace,
    UnknownGateError,
    build_gate,
    cnot_matrix,
    format_matrix,
    gate_defect_report,
    ket,
    kron,
    parse_matrix,
    restrict_to_subspace,
    toffoli_matrix,
    toffoli_truth_table,
    uncovered_controls,
)

R2 = np.sqrt(2.0)
U = (ket(1) + ket(2)) / R2
PERP = (ket(1) - ket(2)) / R2


def r(name):
    return restrict_to_subspace(build_gate(name))


def test_dimensions():
    dims = {"cNOT": 6, "Toffoli": 36}
    for name in GATE_NAMES:
        assert build_gate(name).dim == dims.get(name, 3)
    with pytest.raises(UnknownGateError):
        build_gate("W")


def test_printed_actions():
    X = build_gate("X").matrix
    assert np.allclose(X @ ket(1), ket(3) / R2)
    assert np.allclose(X @ U, ket(3)) and np.allclose(X @ ket(3), U)
    Y = build_gate("Y").matrix
    assert np.allclose(Y @ ket(3), U) and np.allclose(Y @ U, -ket(3))
    X13, X23 = build_gate("X13").matrix, build_gate("X23").matrix
    assert np.allclose((X13 + X23) @ ket(3), ket(1) + ket(2))
    H = build_gate("H").matrix
    assert np.allclose(H @ U, (U + ket(3)) / R2)
    assert np.allclose(H @ ket(3), (U - ket(3)) / R2)


def test_cnot_truth_table():
    c = cnot_matrix()
    b = {(a, t): kron(ket(a), ket(t + 1, 2)) for a in (1, 2, 3) for t in (0, 1)}
    assert np.array_equal(c @ b[3, 0], b[3, 1])
    assert np.array_equal(c @ b[1, 0], b[1, 0])
    assert np.array_equal(c @ b[2, 0], b[2, 0])
    perm = np.eye(6)[[0, 1, 2, 3, 5, 4]]
    assert np.array_equal(c, perm)
    assert np.array_equal(c @ c, np.eye(6))


def test_restrictions():
    assert np.allclose(r("X"), [[0, 1], [1, 0]], atol=1e-15)
    assert np.allclose(r("H"), np.array([[1, 1], [1, -1]]) / R2, atol=1e-15)
    assert np.allclose(r("Y"), [[0, 1], [-1, 0]], atol=1e-15)
    assert np.allclose(r("Z_corrected"), np.diag([1, -1]), atol=1e-15)
    # the printed Z scales u by 1/sqrt(2) but leaves |3> with -1
    assert np.allclose(r("Z"), np.diag([1 / R2, -1]), atol=1e-15)
    with pytest.raises(ValueError):
        restrict_to_subspace(build_gate("cNOT"))


def test_subspace_algebra():
    x, z, h, y = r("X"), r("Z_corrected"), r("H"), r("Y")
    i2 = np.eye(2)
    for m in (x, z, h):
        assert np.abs(m @ m - i2).max() < 1e-12
    assert np.abs(h @ x @ h - z).max() < 1e-12
    assert np.abs(y @ y + i2).max() < 1e-12


def test_defect_reports():
    h = gate_defect_report(build_gate("H"))
    assert h["subspace_unitarity_defect"] < 1e-12 and h["leakage"] < 1e-12
    assert h["full_unitarity_defect"] > 0.1
    assert h["complement_image_norm"] < 1e-15
    x = gate_defect_report(build_gate("X"))
    assert x["subspace_unitarity_defect"] < 1e-12
    X = build_gate("X").matrix
    assert np.linalg.norm(X @ X @ PERP - PERP) == pytest.approx(1.0)
    z = gate_defect_report(build_gate("Z"))
    assert z["action_defect"][0, 0].real == pytest.approx(1 / R2 - 1, abs=1e-12)
    assert abs(z["action_defect"][1, 1]) < 1e-12
    assert z["subspace_unitarity_defect"] == pytest.approx(0.5, abs=1e-12)
    assert gate_defect_report(build_gate("Z_corrected"))["full_unitarity_defect"] < 1e-15
    a = gate_defect_report(build_gate("Y"))
    b = gate_defect_report(build_gate("Y"))
    assert a["full_unitarity_defect"] == b["full_unitarity_defect"]


def test_toffoli():
    t = toffoli_matrix()
    rep = gate_defect_report(build_gate("Toffoli"))
    assert rep["projector_sum_defect"] == 1.0
    assert rep["uncovered_controls"] == [(1, 2), (2, 2), (3, 1), (3, 2), (3, 3)]
    assert uncovered_controls(t) == rep["uncovered_controls"]
    rows = {row["control"]: row for row in toffoli_truth_table()}
    assert rows[1, 1]["outcome"] == 0 and rows[1, 1]["target"] == "00"
    assert rows[2, 3]["outcome"] == 1 and rows[2, 3]["target"] == "11"
    assert rows[2, 1]["action"] == "X(x)I" and rows[1, 3]["action"] == "I(x)X"
    assert rows[3, 2]["action"] is None


def test_logical_subspace():
    assert np.allclose(LOGICAL.complement.conj() @ PERP, 1) or np.allclose(
        LOGICAL.complement.conj() @ PERP, -1)
    with pytest.raises(ValueError):
        LogicalSubspace((ket(1), ket(1)))


def test_matrix_text_round_trip():
    for name in GATE_NAMES:
        m = build_gate(name).matrix
        text = format_matrix(m)
        assert text.count("\n") == m.shape[0]
        assert np.abs(parse_matrix(text) - m).max() < 1e-14
    assert format_matrix(np.array([[0.5 - 0.25j]])) == "0.5-0.25i\n"
