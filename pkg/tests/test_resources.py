from collections import Counter

import pytest

from telegate.compiler import compile_plan
from telegate.model import plan_groups
from telegate.presets import bipartite_case1, bipartite_case2, three_node_chain, tripartite
from telegate.resources import (
    account,
    baseline_eisert,
    render_table1,
    render_table2,
    render_tables,
    table1_data,
    table2_data,
)


def report_for(builder, *args):
    own, spec = builder(*args)
    return account(compile_plan(plan_groups(spec, own), spec.u))


def test_bipartite_case1_counts():
    rep = report_for(bipartite_case1)
    assert rep.entangled_pairs == 1
    assert rep.auxiliary_qubits == 0
    assert rep.ops_by_name() == {"CNOT": 1, "Toffoli": 1}
    assert rep.single_qubit_measurements == 2
    assert rep.classical_bits_sent == 2


def test_bipartite_case2_counts():
    rep = report_for(bipartite_case2)
    assert rep.entangled_pairs == 1
    assert rep.ops_by_name() == {"Toffoli": 1, "CNOT": 1}
    # group gate (a Toffoli) comes before the target-side CNOT
    assert list(rep.ops_by_name()) == ["Toffoli", "CNOT"]
    assert rep.single_qubit_measurements == 2


def test_tripartite_counts():
    rep = report_for(tripartite)
    assert rep.entangled_pairs == 2
    assert rep.ops_by_name() == {"CNOT": 2, "Toffoli": 1}
    assert rep.single_qubit_measurements == 4
    assert rep.classical_bits_sent == 4
    assert rep.conditional_corrections == Counter({("X", 1): 2, ("Z", 1): 2})


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_three_node_chain_counts_independent_of_n(n):
    rep = report_for(three_node_chain, n)
    assert rep.entangled_pairs == 2
    assert rep.single_qubit_measurements == 4
    assert rep.classical_bits_sent == 4
    assert rep.unconditional_ops == Counter({("X", n + 1): 2, ("X", n + 2): 1})


def test_counts_match_compiler_structure(rng):
    # pairs equal control groups; SM and classical bits are twice that
    for builder, args in [(bipartite_case1, ()), (tripartite, ()), (three_node_chain, (4,))]:
        own, spec = builder(*args)
        plan = plan_groups(spec, own)
        rep = account(compile_plan(plan, spec.u))
        g = len(plan.control_groups)
        assert rep.entangled_pairs == g
        assert rep.single_qubit_measurements == 2 * g
        assert rep.classical_bits_sent == 2 * g
        assert sum(rep.conditional_corrections.values()) == 2 * g


def test_baseline_closed_forms():
    b1 = baseline_eisert(1)
    assert b1.entangled_pairs == 2
    assert b1.single_qubit_measurements == 4
    assert b1.ops_by_name() == {"CNOT": 2, "Toffoli": 1, "Hadamard": 2}
    b3 = baseline_eisert(3)
    assert b3.entangled_pairs == 8
    assert b3.single_qubit_measurements == 16
    assert b3.ops_by_name()["9-qubit Toffoli"] == 1
    # at n=1 the three-node chain and the tripartite program tie on pairs
    assert baseline_eisert(1).entangled_pairs == report_for(tripartite).entangled_pairs


def test_table1_rows():
    rows = table1_data()
    by_key = {(r["scenario"], r["method"]): r for r in rows}
    ours = by_key[("bipartite case 2", "grouped")]
    assert (ours["entangled"], ours["operations"], ours["measurements"]) == (
        1, "1 Toffoli, 1 CNOT", "2 SM")
    published = by_key[("bipartite case 2", "eisert2000")]
    assert (published["entangled"], published["operations"], published["measurements"]) == (
        2, "2 CNOT, 1 Toffoli, 2 Hadamard", "4 SM")
    echoed = by_key[("tripartite", "luoli2016")]
    assert (echoed["entangled"], echoed["auxiliary"], echoed["operations"]) == (
        4, 4, "3 CE, 3 CNOT")
    assert echoed["simulated"] is False


def test_table2_rows_and_headline():
    rows = table2_data(range(1, 6))
    grouped = [r for r in rows if r["method"] == "grouped"]
    baseline = [r for r in rows if r["method"] == "eisert2000"]
    assert [r["entangled"] for r in grouped] == [2] * 5
    assert [r["measurements"] for r in grouped] == [4] * 5
    assert [r["entangled"] for r in baseline] == [2, 5, 8, 11, 14]
    assert [r["measurements"] for r in baseline] == [4, 10, 16, 22, 28]
    at5 = [r for r in rows if r["n"] == 5 and r["method"] == "grouped"][0]
    assert at5["operations"] == "2 6-qubit Toffoli, 1 7-qubit Toffoli"


def test_rendered_tables_contain_key_cells():
    t1 = render_table1()
    assert "1 CNOT, 1 Toffoli" in t1
    assert "luoli2016*" in t1  # flagged not simulated
    assert "not simulated" in t1
    t2 = render_table2(range(1, 6))
    assert " 14 " in t2 or "14" in t2.split()
    both = render_tables([1, 2])
    assert "scenario" in both and "n" in both
