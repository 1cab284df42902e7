import math

import numpy as np
import pytest

from kerrgates.circuit import run_circuit
from kerrgates.gates import (
    CNOT,
    SWAP,
    GateSpec,
    Inner,
    balanced_T,
    branch_weights,
    build_gate,
    cnot_condition_residual,
    cnot_gate,
    cpath_gate,
    cu_condition,
    cu_condition_residual,
    cu_gate,
    fredkin_gate,
    mcu_gate,
    povm_transfer,
    synthetic_inner,
    toffoli_gate,
)
from kerrgates.oracle import controlled, truth_table

from conftest import basis_vector, random_amplitudes

TOFFOLI_T = 1 / (2**0.25 + 1)


def successes_and_fidelities(gate, inputs):
    succ, fid = [], []
    for v in inputs:
        r = gate.evaluate(v)
        succ.append(r.success_probability)
        fid.append(r.min_fidelity)
    return np.array(succ), np.array(fid)


def random_inputs(rng, n_qubits, count):
    return [random_amplitudes(rng, n_qubits) for _ in range(count)]


BALANCED = [
    ("cpath", lambda: cpath_gate(False), 0.5),
    ("cpath+ff", lambda: cpath_gate(True), 1.0),
    ("povm+ff", lambda: povm_transfer(True), 1.0),
    ("povm-H", lambda: povm_transfer(False), 0.5),
    ("cnot", lambda: cnot_gate(feedforward=False), 0.25),
    ("cnot+ff", lambda: cnot_gate(), 0.5),
    ("cnot-0.3+ff", lambda: cnot_gate(0.3, 0.3), 2 * 0.3 * 0.7),
    ("fredkin", lambda: fredkin_gate(), 1 / 16),
    ("fredkin+ff", lambda: fredkin_gate(feedforward=True), 1 / 8),
    ("toffoli", lambda: toffoli_gate(), TOFFOLI_T**4),
    ("toffoli+ff", lambda: toffoli_gate(feedforward=True), 2 * TOFFOLI_T**4),
    ("toffoli+ff-heralded", lambda: toffoli_gate(feedforward=True, correction="heralded"), 1.5 * TOFFOLI_T**4),
    ("mcu1+ff", lambda: mcu_gate(1), 1 / 2),
    ("mcu2+ff", lambda: mcu_gate(2), 1 / 4),
    ("mcu2", lambda: mcu_gate(2, feedforward=False), 1 / 16),
]


@pytest.mark.parametrize("name, factory, expected", BALANCED, ids=[b[0] for b in BALANCED])
def test_balanced_gates_are_exact_and_input_independent(name, factory, expected, rng):
    gate = factory()
    succ, fid = successes_and_fidelities(gate, random_inputs(rng, gate.n_qubits, 50))
    assert np.all(np.abs(succ - expected) < 1e-10)
    assert np.all(fid >= 1 - 1e-10)
    if gate.predicted_success is not None:
        assert gate.predicted_success == pytest.approx(expected, abs=1e-12)


def test_cpath_zero_class_routes_target():
    # HH stays on S1 with the control H; the target of VV ends on S2
    gate = cpath_gate(False)
    hh = gate.evaluate(basis_vector(0, 2)).accepted[0].state.canonical()
    assert all(m.path == "S1" for m, _ in next(iter(hh))[0] if m.path != "c")
    vv = gate.evaluate(basis_vector(3, 2)).accepted[0].state.canonical()
    assert all(m.path == "S2" for m, _ in next(iter(vv))[0] if m.path != "c")


def test_cnot_truth_table_balanced():
    rows = truth_table(cnot_gate())
    assert [(r.label, r.output) for r in rows] == [("HH", "HH"), ("HV", "HV"), ("VH", "VV"), ("VV", "VH")]
    for r in rows:
        assert r.probability == pytest.approx(0.5, abs=1e-10)
        assert r.fidelity == pytest.approx(1.0, abs=1e-10)


def test_cnot_condition_line_and_violation(rng):
    # the condition sqrt(T1 R2) = sqrt(R1 T2) is T1 = T2
    assert cnot_condition_residual(0.3, 0.3) == 0
    assert cnot_condition_residual(0.3, 0.7) == pytest.approx(0.4)
    gate = cnot_gate(0.3, 0.7)
    _, fid = successes_and_fidelities(gate, random_inputs(rng, 2, 10))
    assert fid.min() < 1 - 1e-3


def test_fredkin_bell_rows():
    rows = {r.label: r for r in truth_table(fredkin_gate(feedforward=True))}
    assert len(rows) == 16
    for r in rows.values():
        assert r.probability == pytest.approx(1 / 8, abs=1e-10)
        assert r.fidelity == pytest.approx(1.0, abs=1e-10)


def test_fredkin_swaps_targets_only_for_control_v():
    gate = fredkin_gate(feedforward=True)
    outputs = {r.label: r.output for r in truth_table(gate, bell=False)}
    assert outputs["HHV"] == "HHV" and outputs["VHV"] == "VVH" and outputs["VVH"] == "VHV"


def test_toffoli_truth_table():
    rows = truth_table(toffoli_gate(feedforward=True))
    assert [r.output for r in rows][-2:] == ["VVV", "VVH"]
    for r in rows:
        assert r.probability == pytest.approx(2 * TOFFOLI_T**4, abs=1e-12)


@pytest.mark.parametrize("p", [1, 2, 4, 16])
def test_cu_scaling(p, rng):
    gate = cu_gate(synthetic_inner(SWAP, p))
    assert gate.condition_residual < 1e-12
    succ, fid = successes_and_fidelities(gate, random_inputs(rng, 3, 5))
    assert np.all(np.abs(succ - (1 / (p**0.25 + 1)) ** 4) < 1e-10)
    assert np.all(fid >= 1 - 1e-10)


def test_cu_condition_closed_form():
    assert cu_condition(1) == (0.5, 0.0625)
    assert cu_condition(16)[0] == pytest.approx(1 / 3)
    assert cu_condition(2)[0] == pytest.approx(0.456786, abs=1e-6)
    assert cu_condition(2, feedforward=True)[1] == pytest.approx(2 * cu_condition(2)[1])
    T = balanced_T(2)
    h, v = branch_weights(T)
    assert h == pytest.approx(v / 2)
    assert cu_condition_residual(T, 2) < 1e-12
    with pytest.raises(ValueError):
        cu_condition(0.5)


def test_cu_with_unit_inner_matches_fredkin_on_accepted_branches(rng):
    # rejected branches differ: the interferometer also mixes 0- and 2-photon
    # arm terms, the black-box element leaves them alone
    fred = fredkin_gate()
    cu = cu_gate(synthetic_inner(SWAP, 1))
    for v in random_inputs(rng, 3, 5):
        a = {b.record: b for b in fred.evaluate(v).accepted}
        b = {b.record: b for b in cu.evaluate(v).accepted}
        assert a.keys() == b.keys()
        for key in a:
            assert a[key].probability == pytest.approx(b[key].probability, abs=1e-12)
            ca, cb = a[key].state.canonical(), b[key].state.canonical()
            assert ca.keys() == cb.keys()
            for k in ca:
                assert ca[k] == pytest.approx(cb[k], abs=1e-12)


def test_cu_feedforward_needs_involution():
    phase = synthetic_inner(np.diag([1, 1, 1, 1j]), 1)
    cu_gate(phase)  # no feedforward: fine
    with pytest.raises(ValueError):
        cu_gate(phase, feedforward=True)


@pytest.mark.parametrize(
    "factory, base",
    [
        (lambda T: cnot_gate(*T, feedforward=False), (0.5, 0.5)),
        (lambda T: fredkin_gate(*T), (0.5,) * 4),
        (lambda T: toffoli_gate(*T), balanced_T(2)),
        (lambda T: cu_gate(synthetic_inner(SWAP, 16), T), balanced_T(16)),
    ],
    ids=["cnot", "fredkin", "toffoli", "cu16"],
)
def test_perturbing_one_transmissivity_is_detected(factory, base):
    for i in range(len(base)):
        T = list(base)
        T[i] += 0.05
        gate = factory(T)
        succ, fid = successes_and_fidelities(gate, [basis_vector(j, gate.n_qubits) for j in range(2**gate.n_qubits)])
        assert fid.min() < 1 - 1e-6 or np.ptp(succ) > 1e-9, f"T{i + 1} perturbation not detected"


def test_perturbed_cnot_with_feedforward_shows_on_superpositions():
    # the corrected class carries the swapped weights R1 T2, so every basis
    # input still succeeds with T1 R2 + R1 T2; only coherences reveal the error
    gate = cnot_gate(0.55, 0.5)
    succ, fid = successes_and_fidelities(gate, [basis_vector(j, 2) for j in range(4)])
    assert np.ptp(succ) < 1e-12 and fid.min() > 1 - 1e-12
    assert gate.evaluate(np.ones(4) / 2).min_fidelity < 1 - 1e-3


@pytest.mark.parametrize(
    "with_ff, without_ff",
    [
        (lambda: cpath_gate(True), lambda: cpath_gate(False)),
        (lambda: cnot_gate(), lambda: cnot_gate(feedforward=False)),
        (lambda: fredkin_gate(feedforward=True), lambda: fredkin_gate()),
        (lambda: mcu_gate(2), lambda: mcu_gate(2, feedforward=False)),
    ],
)
def test_feedforward_never_lowers_success(with_ff, without_ff, rng):
    v = random_amplitudes(rng, with_ff().n_qubits)
    assert with_ff().evaluate(v).success_probability >= without_ff().evaluate(v).success_probability


def test_kerr_toffoli_balances_at_inner_success_quarter(rng):
    gate = toffoli_gate(inner="kerr")
    T = 1 / (math.sqrt(2) + 1)
    assert gate.transmissivities == pytest.approx((T, 1 - T, 1 - T, T))
    succ, fid = successes_and_fidelities(gate, random_inputs(rng, 3, 4) + [basis_vector(7, 3)])
    assert np.all(np.abs(succ - T**4) < 1e-10)
    assert np.all(fid >= 1 - 1e-10)


def test_kerr_toffoli_at_half_success_balance_is_not_exact(rng):
    gate = toffoli_gate(*balanced_T(2), inner="kerr")
    _, fid = successes_and_fidelities(gate, random_inputs(rng, 3, 6))
    assert fid.min() < 0.99
    with pytest.raises(ValueError):
        toffoli_gate(inner="kerr", feedforward=True)


def test_mcu_ideal_is_ccx():
    gate = mcu_gate(2)
    x = np.array([[0, 1], [1, 0]])
    assert np.allclose(gate.ideal, controlled(x, 2))
    rows = truth_table(gate)
    assert [r.output for r in rows][-2:] == ["VVV", "VVH"]


def test_mcu_three_controls():
    gate = mcu_gate(3)
    r = gate.evaluate(basis_vector(15, 4))
    assert r.success_probability == pytest.approx(1 / 8)
    assert r.min_fidelity == pytest.approx(1.0)


def test_mcu_custom_inner():
    u = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    gate = mcu_gate(2, inner=u)
    r = gate.evaluate(np.kron(basis_vector(3, 2), [0.6, 0.8]))
    assert r.min_fidelity == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        mcu_gate(2, inner=np.eye(4))
    with pytest.raises(ValueError):
        mcu_gate(0)


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec("swap")
    with pytest.raises(ValueError):
        GateSpec("cnot", (0.5,))
    with pytest.raises(ValueError):
        GateSpec("cu", inner_success=2.0)
    assert GateSpec("cnot").resolved_feedforward is True
    assert GateSpec("fredkin").resolved_feedforward is False


def test_build_gate_custom_paths(rng):
    gate = build_gate(GateSpec("fredkin", feedforward=True), ["x", "y", "z"])
    assert gate.input_paths == ("x", "y", "z")
    assert gate.evaluate(random_amplitudes(rng, 3)).success_probability == pytest.approx(1 / 8)


def test_inner_helpers():
    inner = Inner("cnot", CNOT, 0.25)
    assert inner.p == 4 and inner.n_qubits == 2 and inner.is_involution()
    nodes = inner.nodes(["a", "b"])
    assert nodes[0].kind == "logical" and nodes[0].params["success"] == 0.25


def test_leaves_cover_all_probability(rng):
    gate = toffoli_gate(inner="kerr")
    leaves = run_circuit(gate.circuit, gate.input_state(random_amplitudes(rng, 3)))
    assert sum(leaf.probability for leaf in leaves) == pytest.approx(1.0, abs=1e-12)
