"""Canonical remote-Toffoli scenarios used by reports, the CLI, and tests."""

from __future__ import annotations

from .gates import X
from .model import DistributedGateSpec, Ownership

Scenario = tuple[Ownership, DistributedGateSpec]


def bipartite_case1() -> Scenario:
    """Two nodes; one control on each, target beside the second control."""
    own = Ownership([("A1", "A"), ("B1", "B"), ("B2", "B")])
    return own, DistributedGateSpec(["A1", "B1"], "B2", X)


def bipartite_case2() -> Scenario:
    """Two nodes; both controls on one, target alone on the other."""
    own = Ownership([("A1", "A"), ("A2", "A"), ("B1", "B")])
    return own, DistributedGateSpec(["A1", "A2"], "B1", X)


def tripartite() -> Scenario:
    """Three nodes; one control on each of two, target on the third."""
    own = Ownership([("A1", "A"), ("B1", "B"), ("C", "C")])
    return own, DistributedGateSpec(["A1", "B1"], "C", X)


def three_node_chain(n: int) -> Scenario:
    """Three nodes with n qubits each: all of A's and B's qubits and C's
    first n-1 are controls; C's last qubit is the target."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    qubits = [(f"A{i}", "A") for i in range(1, n + 1)]
    qubits += [(f"B{i}", "B") for i in range(1, n + 1)]
    qubits += [(f"C{i}", "C") for i in range(1, n + 1)]
    controls = [f"A{i}" for i in range(1, n + 1)]
    controls += [f"B{i}" for i in range(1, n + 1)]
    controls += [f"C{i}" for i in range(1, n)]
    return Ownership(qubits), DistributedGateSpec(controls, f"C{n}", X)


TABLE1_SCENARIOS: tuple[tuple[str, str], ...] = (
    ("bipartite case 1", "bipartite_case1"),
    ("bipartite case 2", "bipartite_case2"),
    ("tripartite", "tripartite"),
)

BUILDERS = {
    "bipartite_case1": bipartite_case1,
    "bipartite_case2": bipartite_case2,
    "tripartite": tripartite,
}
