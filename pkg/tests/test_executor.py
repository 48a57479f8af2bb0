import dataclasses

import numpy as np
import pytest

from oracle import (
    H2,
    X2,
    Z2,
    basis_vec,
    controlled_u_matrix,
    measure_x,
    measure_z,
    random_vec,
    single_matrix,
)
from telegate.compiler import (
    CondX,
    LocalMCX,
    MeasureZ,
    Program,
    Send,
    compile_plan,
)
from telegate.errors import CapacityError, ImpossibleBranchError, LocalityError
from telegate.executor import (
    BranchResult,
    check_locality,
    enumerate_branches,
    execute_branch,
    extract_data_state,
    run_sampled,
)
from telegate.model import DistributedGateSpec, Ownership, plan_groups
from telegate.presets import bipartite_case1, bipartite_case2, three_node_chain, tripartite
from telegate.statevector import StateVector, from_amplitudes, init_zero

D8 = np.array([0.1, 0.2, -0.3, 0.4j, 0.5, -0.2j, 0.35, 0.25 + 0.3j], dtype=complex)
D8 /= np.linalg.norm(D8)
TOFFOLI_OUT = D8.copy()
TOFFOLI_OUT[[6, 7]] = TOFFOLI_OUT[[7, 6]]  # amplitudes of |110> and |111> swap


def compiled(builder, *args):
    own, spec = builder(*args)
    return compile_plan(plan_groups(spec, own), spec.u), own, spec


def oracle_bipartite_case1(d8, z, x):
    """Dense 5-qubit pipeline for the two-node split-control program:
    register A1,B1,B2,A_e,B_e1; returns (branch probability, data state)."""
    n = 5
    vec = np.kron(d8, basis_vec(2, 0))
    vec = single_matrix(n, 3, H2) @ vec  # Bell prep
    vec = controlled_u_matrix(n, (3,), 4, X2) @ vec
    vec = controlled_u_matrix(n, (0,), 3, X2) @ vec  # group CNOT
    pz, vec = measure_z(vec, n, 3, z)
    if z:
        vec = single_matrix(n, 4, X2) @ vec
    vec = controlled_u_matrix(n, (4, 1), 2, X2) @ vec  # target-side Toffoli
    px, vec = measure_x(vec, n, 4, x)
    if x:
        vec = single_matrix(n, 0, Z2) @ vec
    data = vec.reshape(8, 4)[:, 2 * z + x]  # bell qubits collapsed to (z, x)
    return pz * px, data


# -------------------------------------------------------------- forced runs

@pytest.mark.parametrize("z,x", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_bipartite_case1_branches_match_dense_oracle(z, x):
    prog, own, spec = compiled(bipartite_case1)
    result = execute_branch(prog, from_amplitudes(D8), {"z_A": z, "x_A": x}, own)
    p_exp, data_exp = oracle_bipartite_case1(D8, z, x)
    assert abs(result.probability - p_exp) < 1e-12
    assert abs(result.probability - 0.25) < 1e-12
    data = extract_data_state(prog, result)
    assert np.max(np.abs(data.amps - data_exp)) < 1e-12
    assert np.max(np.abs(data.amps - TOFFOLI_OUT)) < 1e-12


def test_branch_prob_product_of_measurement_probs():
    prog, own, _ = compiled(tripartite)
    res = execute_branch(prog, from_amplitudes(D8), dict.fromkeys(prog.measurement_tags, 0), own)
    meas_ps = [float(line.rsplit("p=", 1)[1]) for line in res.trace if " p=" in line]
    assert len(meas_ps) == 4
    prod = np.prod(meas_ps)
    assert abs(res.probability - prod) < 1e-15
    assert abs(res.probability - 1 / 16) < 1e-12


def test_execute_requires_all_tags_forced():
    prog, own, _ = compiled(bipartite_case1)
    with pytest.raises(ValueError, match="x_A"):
        execute_branch(prog, from_amplitudes(D8), {"z_A": 0}, own)


def test_forcing_impossible_branch_names_the_measurement():
    own = Ownership([("A1", "A")])
    prog = Program(
        instructions=(MeasureZ("A", "A1", "m"),),
        layout=own,
        data_labels=("A1",),
        measurement_tags=("m",),
    )
    with pytest.raises(ImpossibleBranchError, match="'m'"):
        execute_branch(prog, init_zero(1), {"m": 1})


def test_fully_local_program_is_plain_gate():
    own = Ownership([("B1", "B"), ("B2", "B"), ("B3", "B")])
    spec = DistributedGateSpec(["B1", "B2"], "B3", X2)
    prog = compile_plan(plan_groups(spec, own), spec.u)
    res = execute_branch(prog, from_amplitudes(basis_vec(3, 0b110)), {}, own)
    assert res.probability == 1.0
    assert abs(res.final_state.amplitude(0b111) - 1) < 1e-12


# -------------------------------------------------------------- enumeration

def test_enumerate_bipartite_case1_four_equal_branches():
    prog, own, _ = compiled(bipartite_case1)
    branches = enumerate_branches(prog, from_amplitudes(D8), own)
    assert len(branches) == 4
    bits = [b.outcome_bits(prog.measurement_tags) for b in branches]
    assert bits == ["00", "01", "10", "11"]
    for b in branches:
        assert abs(b.probability - 0.25) < 1e-12
        data = extract_data_state(prog, b)
        assert np.max(np.abs(data.amps - TOFFOLI_OUT)) < 1e-12
    assert abs(sum(b.probability for b in branches) - 1.0) < 1e-10


def test_enumerate_tripartite_sixteen_branches():
    prog, own, _ = compiled(tripartite)
    branches = enumerate_branches(prog, from_amplitudes(D8), own)
    assert len(branches) == 16
    for b in branches:
        assert abs(b.probability - 1 / 16) < 1e-12
        data = extract_data_state(prog, b)
        assert np.max(np.abs(data.amps - TOFFOLI_OUT)) < 1e-12
    # every measurement in this protocol is unbiased
    for b in branches:
        for line in b.trace:
            if " p=" in line:
                assert line.endswith("p=0.500000000000")


def test_enumerate_local_program_single_branch():
    own = Ownership([("B1", "B"), ("B2", "B")])
    spec = DistributedGateSpec(["B1"], "B2", X2)
    prog = compile_plan(plan_groups(spec, own), spec.u)
    branches = enumerate_branches(prog, init_zero(2), own)
    assert len(branches) == 1
    assert branches[0].probability == 1.0


def test_enumerate_measurement_limit():
    prog, own, _ = compiled(tripartite)
    with pytest.raises(CapacityError):
        enumerate_branches(prog, from_amplitudes(D8), own, max_measurements=3)


def test_all_branches_agree_on_data_state_random_inputs(rng):
    prog, own, spec = compiled(bipartite_case2)
    for _ in range(5):
        vec = random_vec(3, rng)
        branches = enumerate_branches(prog, from_amplitudes(vec), own)
        states = [extract_data_state(prog, b).amps for b in branches]
        for s in states[1:]:
            assert np.max(np.abs(s - states[0])) < 1e-12
        assert abs(sum(b.probability for b in branches) - 1.0) < 1e-10


def test_group_order_independence(rng):
    own, spec = tripartite()
    plan = plan_groups(spec, own)
    flipped = dataclasses.replace(plan, control_groups=plan.control_groups[::-1])
    p1 = compile_plan(plan, spec.u)
    p2 = compile_plan(flipped, spec.u)
    assert p1.to_text() != p2.to_text()
    vec = random_vec(3, rng)
    b1 = {b.outcome_bits(sorted(b.outcomes)): extract_data_state(p1, b).amps
          for b in enumerate_branches(p1, from_amplitudes(vec), own)}
    b2 = {b.outcome_bits(sorted(b.outcomes)): extract_data_state(p2, b).amps
          for b in enumerate_branches(p2, from_amplitudes(vec), own)}
    assert set(b1) == set(b2)
    for key in b1:
        assert np.max(np.abs(b1[key] - b2[key])) < 1e-12


# -------------------------------------------------------------- sampling

def test_run_sampled_is_deterministic_per_seed():
    prog, own, _ = compiled(tripartite)
    state = from_amplitudes(D8)
    a = run_sampled(prog, state, seed=42, own=own)
    b = run_sampled(prog, state, seed=42, own=own)
    assert a.outcomes == b.outcomes
    assert a.trace == b.trace
    assert np.array_equal(a.final_state.amps, b.final_state.amps)


def test_sampled_state_matches_enumerated_branch():
    prog, own, _ = compiled(bipartite_case1)
    state = from_amplitudes(D8)
    by_bits = {
        b.outcome_bits(prog.measurement_tags): b
        for b in enumerate_branches(prog, state, own)
    }
    for seed in range(8):
        s = run_sampled(prog, state, seed=seed, own=own)
        match = by_bits[s.outcome_bits(prog.measurement_tags)]
        assert np.max(np.abs(s.final_state.amps - match.final_state.amps)) < 1e-12
        assert abs(s.probability - match.probability) < 1e-12


def test_sampled_frequencies_are_uniform():
    prog, own, _ = compiled(bipartite_case1)
    state = from_amplitudes(D8)
    counts = {}
    n_samples = 2000
    for seed in range(n_samples):
        bits = run_sampled(prog, state, seed=seed, own=own).outcome_bits(
            prog.measurement_tags)
        counts[bits] = counts.get(bits, 0) + 1
    assert set(counts) == {"00", "01", "10", "11"}
    for c in counts.values():
        assert abs(c / n_samples - 0.25) < 0.04  # ~4 sigma


# -------------------------------------------------------------- locality

def test_compiled_programs_pass_locality():
    for builder in (bipartite_case1, bipartite_case2, tripartite):
        prog, own, _ = compiled(builder)
        assert check_locality(prog, own) == []
    prog, own, _ = compiled(three_node_chain, 3)
    assert check_locality(prog, own) == []


def test_cross_node_gate_rejected():
    own = Ownership([("A1", "A"), ("B1", "B")])
    prog = Program(
        instructions=(LocalMCX("A", ("A1",), "B1"),),
        layout=own,
        data_labels=("A1", "B1"),
        measurement_tags=(),
    )
    violations = check_locality(prog, own)
    assert len(violations) == 1
    assert "cross-node" in violations[0].reason
    with pytest.raises(LocalityError):
        execute_branch(prog, init_zero(2), {})


def test_condition_without_send_rejected():
    own = Ownership([("A1", "A"), ("B1", "B")])
    prog = Program(
        instructions=(
            MeasureZ("A", "A1", "m"),
            CondX("B", "B1", "m"),
        ),
        layout=own,
        data_labels=("A1", "B1"),
        measurement_tags=("m",),
    )
    violations = check_locality(prog, own)
    assert any("never sent" in v.reason for v in violations)


def test_send_of_unavailable_tag_rejected():
    own = Ownership([("A1", "A"), ("B1", "B")])
    prog = Program(
        instructions=(
            MeasureZ("A", "A1", "m"),
            Send("m", "B", "A"),  # B never had the bit
        ),
        layout=own,
        data_labels=("A1", "B1"),
        measurement_tags=("m",),
    )
    violations = check_locality(prog, own)
    assert any("not available" in v.reason for v in violations)


def test_trace_is_replayable_text():
    prog, own, _ = compiled(bipartite_case1)
    res = execute_branch(prog, from_amplitudes(D8), {"z_A": 1, "x_A": 0}, own)
    assert res.trace == (
        "bellprep A_e@A ~ B_e1@B",
        "mcx @A A1 -> A_e",
        "measZ @A A_e z_A=1 p=0.500000000000",
        "send z_A A->B 1",
        "condx @B B_e1 (z_A=1) apply",
        "mcu @B B_e1,B1 -> B2 u=X",
        "measX @B B_e1 x_A=0 p=0.500000000000",
        "send x_A B->A 0",
        "condmcz @A - -> A1 (x_A=0) skip",
    )
