import math

import numpy as np
import pytest

from kerrgates.circuit import Circuit, Element, Homodyne, Postselect, run_circuit
from kerrgates.errors import NonUnitaryError, OracleLimitError
from kerrgates.gates import GateSpec, build_gate, fredkin_gate, toffoli_gate
from kerrgates.oracle import (
    BELL,
    compare_with_engine,
    enumerate_oracle,
    ideal_gate_matrix,
    logical_fidelity,
    permanent,
    truth_table,
)
from kerrgates.gates import qubit_basis
from kerrgates.state import logical_state

from conftest import basis_vector, random_amplitudes

H, V = 0, 1


def ket(*bits):
    return basis_vector(int("".join(map(str, bits)), 2), len(bits))


def test_cnot_matrix_flips_target_on_control_v():
    assert np.allclose(ideal_gate_matrix("cnot") @ ket(V, H), ket(V, V))
    assert np.allclose(ideal_gate_matrix("cnot") @ ket(H, V), ket(H, V))


def test_fredkin_matrix_on_singlet():
    psi = np.kron(ket(V), BELL["psi-minus"])
    assert np.allclose(ideal_gate_matrix("fredkin") @ psi, -psi)
    for name in ("psi-plus", "phi-plus", "phi-minus"):
        s = np.kron(ket(V), BELL[name])
        assert np.allclose(ideal_gate_matrix("fredkin") @ s, s)


def test_controlled_identity_and_toffoli():
    assert np.allclose(ideal_gate_matrix("cu", np.eye(2)), np.eye(4))
    assert np.allclose(ideal_gate_matrix("toffoli") @ ket(V, V, H), ket(V, V, V))
    assert np.allclose(ideal_gate_matrix("mcu", n_controls=3) @ ket(V, V, V, V), ket(V, V, V, H))
    for kind in ("cnot", "fredkin", "toffoli"):
        u = ideal_gate_matrix(kind)
        assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)


def test_ideal_matrix_errors():
    with pytest.raises(NonUnitaryError):
        ideal_gate_matrix("cu", np.ones((2, 2)))
    with pytest.raises(ValueError):
        ideal_gate_matrix("cu")
    with pytest.raises(ValueError):
        ideal_gate_matrix("swap")


def test_logical_fidelity_identical_and_orthogonal():
    basis = qubit_basis(["a", "b"])
    s = logical_state(["a", "b"], BELL["phi-plus"])
    assert logical_fidelity(s, BELL["phi-plus"], basis) == pytest.approx((1.0, 0.0))
    assert logical_fidelity(s, BELL["psi-minus"], basis)[0] == pytest.approx(0.0)
    # global phase is irrelevant
    assert logical_fidelity(s, 1j * BELL["phi-plus"], basis)[0] == pytest.approx(1.0)


def test_logical_fidelity_reports_leakage():
    s = logical_state(["a", "b"], BELL["phi-plus"])
    # a basis holding only HH and HV: the VV half is leakage
    fid, leak = logical_fidelity(s, [1, 0], qubit_basis(["a", "b"])[:2])
    assert leak == pytest.approx(0.5)
    assert fid == pytest.approx(0.5)


def test_permanent_small_cases():
    assert permanent(np.zeros((0, 0))) == 1
    assert permanent(np.array([[1, 2], [3, 4]])) == 10
    assert permanent(np.ones((3, 3))) == 6


def test_single_beam_splitter_single_photon():
    T = 0.2
    c = Circuit([Element("bs", ["a", "b"], {"T": T})])
    (leaf,) = enumerate_oracle(c, logical_state(["a"], [1, 0]))
    amps = {occ: a for (occ, _), a in leaf.amplitudes.items()}
    assert amps[((("a", "H"), 1),)] == pytest.approx(math.sqrt(T))
    assert amps[((("b", "H"), 1),)] == pytest.approx(1j * math.sqrt(1 - T))


SPECS = [
    GateSpec("cpath", feedforward=False),
    GateSpec("cpath", feedforward=True),
    GateSpec("povm", feedforward=True),
    GateSpec("cnot"),
    GateSpec("cnot", (0.3, 0.3)),
    GateSpec("cnot", (0.3, 0.7)),
    GateSpec("fredkin"),
    GateSpec("fredkin", feedforward=True),
    GateSpec("toffoli", feedforward=True),
    GateSpec("cu", inner_success=1 / 16),
    GateSpec("mcu"),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.kind}-{s.transmissivities}-{s.feedforward}")
def test_engine_matches_oracle(spec, rng):
    gate = build_gate(spec)
    expanded = gate.circuit.expanded()
    for _ in range(3):
        state = gate.input_state(random_amplitudes(rng, gate.n_qubits))
        assert compare_with_engine(run_circuit(gate.circuit, state), enumerate_oracle(expanded, state)) == []


def test_engine_matches_oracle_for_kerr_toffoli(rng):
    gate = toffoli_gate(inner="kerr")
    state = gate.input_state(random_amplitudes(rng, 3))
    assert compare_with_engine(run_circuit(gate.circuit, state), enumerate_oracle(gate.circuit.expanded(), state)) == []


def test_oracle_detects_a_wrong_tree(rng):
    state = fredkin_gate().input_state(random_amplitudes(rng, 3))
    engine = run_circuit(fredkin_gate().circuit, state)
    oracle = enumerate_oracle(fredkin_gate(0.55, 0.5, 0.5, 0.5).circuit.expanded(), state)
    assert compare_with_engine(engine, oracle)


def test_fredkin_class_probabilities():
    # joint (class, one photon per port) weights; class 1 takes the rest
    gate = fredkin_gate()
    for i in range(8):
        state = gate.input_state(basis_vector(i, 3))
        leaves = enumerate_oracle(gate.circuit.expanded(), state)
        joint = {}
        for leaf in leaves:
            rec = dict(leaf.record)
            if rec["ports"] == (1, 1, 1):
                joint[rec["p1"]] = joint.get(rec["p1"], 0) + leaf.probability
        assert joint.get(0, 0) == pytest.approx(1 / 16, abs=1e-12)
        assert joint.get(2, 0) == pytest.approx(1 / 16, abs=1e-12)
        assert sum(leaf.probability for leaf in leaves) == pytest.approx(1.0, abs=1e-12)


def test_oracle_guard():
    paths = [f"q{i}" for i in range(8)]
    c = Circuit([Element("kerr", [p], {"probe": "k", "multiplier": 1}) for p in paths] + [Homodyne("k")], ("k",))
    with pytest.raises(OracleLimitError):
        enumerate_oracle(c, logical_state(paths, basis_vector(0, 8)))


def test_truth_table_rows():
    rows = truth_table(build_gate(GateSpec("fredkin", feedforward=True)))
    assert [r.label for r in rows][8:10] == ["H*bell:phi-plus", "H*bell:phi-minus"]
    rows = truth_table(toffoli_gate())
    T = 1 / (2**0.25 + 1)
    assert all(r.probability == pytest.approx(T**4, abs=1e-12) for r in rows)
    assert abs(2 * T**4 - 2 / 23) < 2e-4


def test_postselect_node_in_oracle():
    c = Circuit([Element("bs", ["a", "b"], {"T": 0.5}), Postselect(["a", "b"])])
    leaves = enumerate_oracle(c, logical_state(["a", "b"], [1, 0, 0, 0]))
    assert {dict(l.record)["ports"] for l in leaves} == {(2, 0), (0, 2)}
