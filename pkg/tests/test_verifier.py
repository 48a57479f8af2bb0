import json

import numpy as np
import pytest

from oracle import controlled_u_matrix, random_vec
from telegate.gates import H, I, X, Z
from telegate.model import DistributedGateSpec, Ownership
from telegate.presets import bipartite_case1, tripartite
from telegate.statevector import StateVector, from_amplitudes
from telegate.verifier import (
    apply_ideal,
    random_configuration,
    random_state,
    truth_table,
    verify_gate,
)

D8 = np.array([0.1, 0.2, -0.3, 0.4j, 0.5, -0.2j, 0.35, 0.25 + 0.3j], dtype=complex)
D8 /= np.linalg.norm(D8)


def test_apply_ideal_toffoli_swaps_last_two_amplitudes():
    own, spec = bipartite_case1()
    out = apply_ideal(spec, own, from_amplitudes(D8))
    expected = D8.copy()
    expected[[6, 7]] = expected[[7, 6]]
    assert np.max(np.abs(out.amps - expected)) < 1e-12


def test_apply_ideal_identity_is_noop():
    own, spec = bipartite_case1()
    spec = DistributedGateSpec(spec.controls, spec.target, I)
    out = apply_ideal(spec, own, from_amplitudes(D8))
    assert np.max(np.abs(out.amps - D8)) < 1e-12


def test_apply_ideal_tripartite_matches_dense_oracle(rng):
    own, spec = tripartite()
    vec = random_vec(3, rng)
    expected = controlled_u_matrix(3, (0, 1), 2, X) @ vec
    out = apply_ideal(spec, own, StateVector(3, vec.copy()))
    assert np.max(np.abs(out.amps - expected)) < 1e-12


def test_apply_ideal_involution_for_x_and_z(rng):
    own, spec = tripartite()
    for u in (X, Z):
        s = DistributedGateSpec(spec.controls, spec.target, u)
        state = random_state(3, rng)
        twice = apply_ideal(s, own, apply_ideal(s, own, state))
        assert np.max(np.abs(twice.amps - state.amps)) < 1e-12


def test_apply_ideal_size_mismatch():
    own, spec = bipartite_case1()
    with pytest.raises(ValueError):
        apply_ideal(spec, own, random_state(4, np.random.default_rng(0)))


# ----------------------------------------------------------------- verify

def test_verify_bipartite_case1_random_inputs(rng):
    own, spec = bipartite_case1()
    inputs = [random_state(3, rng) for _ in range(20)]
    report = verify_gate(spec, own, inputs, tol=1e-12)
    assert report.passed
    assert len(report.checks) == 20 * 4
    assert report.max_deviation <= 1e-12
    assert report.min_fidelity > 1 - 1e-12
    assert report.resources.entangled_pairs == 1


def test_verify_tripartite_basis_inputs():
    own, spec = tripartite()
    inputs = [from_amplitudes(np.eye(8)[k]) for k in range(8)]
    report = verify_gate(spec, own, inputs, tol=1e-12)
    assert report.passed
    assert report.branches_per_input == 16


def test_verify_controlled_z_three_groups(rng):
    own = Ownership(
        [("A1", "A"), ("A2", "A"), ("B1", "B"), ("B2", "B"),
         ("C1", "C"), ("C2", "C"), ("D1", "D")]
    )
    spec = DistributedGateSpec(["A1", "A2", "B1", "B2", "C1", "C2"], "D1", Z)
    report = verify_gate(spec, own, [random_state(7, rng) for _ in range(3)])
    assert report.passed
    assert report.resources.entangled_pairs == 3
    assert report.branches_per_input == 64


def test_verify_report_rendering(rng):
    own, spec = bipartite_case1()
    report = verify_gate(spec, own, [random_state(3, rng)])
    text = report.to_text()
    assert "PASS" in text and "max dev" in text
    payload = json.loads(report.to_json())
    assert payload["pass"] is True
    assert payload["total_comparisons"] == 4
    assert payload["resources"]["entangled_pairs"] == 1
    assert len(payload["branches"]) == 4


def test_verify_random_configurations_smoke(rng):
    for _ in range(6):
        own, spec = random_configuration(rng, max_data_qubits=6)
        report = verify_gate(spec, own, [random_state(len(own), rng)])
        assert report.passed, report.to_text()


# ----------------------------------------------------------------- tables

def test_truth_table_two_controls():
    own, spec = tripartite()
    table = truth_table(spec, own)
    assert len(table) == 8
    for basis in range(8):
        if basis == 0b110:
            assert table[basis] == 0b111
        elif basis == 0b111:
            assert table[basis] == 0b110
        else:
            assert table[basis] == basis


def test_truth_table_zero_controls_is_not():
    own = Ownership([("B1", "B")])
    table = truth_table(DistributedGateSpec([], "B1", X), own)
    assert table == {0: 1, 1: 0}


def test_truth_table_one_control_is_cnot():
    own = Ownership([("A1", "A"), ("B1", "B")])
    table = truth_table(DistributedGateSpec(["A1"], "B1", X), own)
    assert table == {0b00: 0b00, 0b01: 0b01, 0b10: 0b11, 0b11: 0b10}


def test_truth_table_rejects_non_permutation_u():
    own, spec = tripartite()
    with pytest.raises(ValueError):
        truth_table(DistributedGateSpec(spec.controls, spec.target, H), own)
