"""Ideal-gate oracle and branch-exact equivalence checking.

The protocol's claim is that every measurement branch leaves the data
qubits in exactly the state the monolithic controlled-u would produce --
amplitude-wise, with no residual phase. verify_gate checks that claim by
exhaustive branch enumeration; fidelity is reported only as a diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .compiler import Program, compile_plan
from .executor import enumerate_branches, extract_data_state
from .gates import X as _X
from .model import DistributedGateSpec, Ownership, plan_groups
from .resources import ResourceReport, account
from .statevector import StateVector, apply_controlled_u, fidelity

__all__ = [
    "apply_ideal",
    "random_state",
    "random_configuration",
    "BranchCheck",
    "VerificationReport",
    "verify_gate",
    "truth_table",
]


def apply_ideal(spec: DistributedGateSpec, own: Ownership,
                input_state: StateVector) -> StateVector:
    """The monolithic controlled-u on the data register, ignoring node
    boundaries; the reference every protocol branch is compared against."""
    if input_state.num_qubits != len(own):
        raise ValueError(
            f"input covers {input_state.num_qubits} qubits, register has {len(own)}"
        )
    controls = [own.index(c) for c in spec.controls]
    return apply_controlled_u(input_state, controls, own.index(spec.target), spec.u)


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Reproducible random pure state: complex Gaussian, then normalize."""
    v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    v /= np.linalg.norm(v)
    return StateVector(num_qubits, v.astype(np.complex128))


def random_configuration(rng: np.random.Generator, max_nodes: int = 4,
                         max_data_qubits: int = 12) -> tuple[Ownership, DistributedGateSpec]:
    """Random register/gate pair: 2..max_nodes nodes, 2..max_data_qubits
    qubits with random ownership, a random control subset (qubits left out
    ride along as spectators), and u drawn from X, Z, H, or a random
    unitary."""
    from .gates import H, Z, random_unitary

    n_nodes = int(rng.integers(2, max_nodes + 1))
    n_data = int(rng.integers(2, max_data_qubits + 1))
    nodes = [f"N{i}" for i in range(n_nodes)]
    own = Ownership(
        [(f"q{i}", nodes[int(rng.integers(n_nodes))]) for i in range(n_data)]
    )
    target = own.labels[int(rng.integers(n_data))]
    rest = [lab for lab in own.labels if lab != target]
    k = int(rng.integers(1, len(rest) + 1))
    controls = [str(c) for c in rng.choice(rest, size=k, replace=False)]
    u = [_X, Z, H, random_unitary(rng)][int(rng.integers(4))]
    return own, DistributedGateSpec(controls, target, u)


@dataclass(frozen=True)
class BranchCheck:
    input_index: int
    outcomes: str
    deviation: float
    fidelity: float
    passed: bool


@dataclass
class VerificationReport:
    gate: str
    tolerance: float
    num_inputs: int
    branches_per_input: int
    max_deviation: float
    min_fidelity: float
    passed: bool
    resources: ResourceReport
    checks: list[BranchCheck]

    def failures(self) -> list[BranchCheck]:
        return [c for c in self.checks if not c.passed]

    def to_json_dict(self) -> dict:
        return {
            "gate": self.gate,
            "tolerance": self.tolerance,
            "num_inputs": self.num_inputs,
            "branches_per_input": self.branches_per_input,
            "total_comparisons": len(self.checks),
            "max_deviation": self.max_deviation,
            "min_fidelity": self.min_fidelity,
            "pass": self.passed,
            "resources": self.resources.to_json_dict(),
            "branches": [
                {
                    "input": c.input_index,
                    "outcomes": c.outcomes,
                    "deviation": c.deviation,
                    "fidelity": c.fidelity,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def to_text(self) -> str:
        lines = [
            f"gate:        {self.gate}",
            f"inputs:      {self.num_inputs}",
            f"branches:    {self.branches_per_input} per input, "
            f"{len(self.checks)} comparisons",
            f"max dev:     {self.max_deviation:.3e} (tolerance {self.tolerance:.0e})",
            f"min fid:     {self.min_fidelity:.15f}",
            f"resources:   {self.resources.summary()}",
            f"result:      {'PASS' if self.passed else 'FAIL'}",
        ]
        for c in self.failures():
            lines.append(
                f"  FAIL input {c.input_index} outcomes {c.outcomes}: "
                f"deviation {c.deviation:.3e}"
            )
        return "\n".join(lines) + "\n"


def describe_gate(spec: DistributedGateSpec, own: Ownership) -> str:
    u = spec.u_label or "U"
    groups = sorted({own.node(c) for c in spec.controls})
    return (f"controls={','.join(spec.controls)} target={spec.target} u={u} "
            f"nodes={','.join(own.nodes)} control-nodes={','.join(groups)}")


def verify_gate(spec: DistributedGateSpec, own: Ownership,
                inputs: list[StateVector], tol: float = 1e-12,
                program: Program | None = None) -> VerificationReport:
    """Compile the protocol, enumerate every branch for every input, and
    compare each branch's data state amplitude-wise against apply_ideal."""
    if tol <= 0:
        raise ValueError(f"tolerance must be > 0, got {tol}")
    if program is None:
        program = compile_plan(plan_groups(spec, own), spec.u)
    checks: list[BranchCheck] = []
    branch_count = 0
    for k, state in enumerate(inputs):
        ideal = apply_ideal(spec, own, state)
        branches = enumerate_branches(program, state, own)
        branch_count = max(branch_count, len(branches))
        for b in branches:
            data = extract_data_state(program, b)
            dev = float(np.max(np.abs(data.amps - ideal.amps)))
            fid = fidelity(data, ideal)
            checks.append(BranchCheck(
                input_index=k,
                outcomes=b.outcome_bits(program.measurement_tags),
                deviation=dev,
                fidelity=fid,
                passed=dev <= tol,
            ))
    max_dev = max((c.deviation for c in checks), default=0.0)
    min_fid = min((c.fidelity for c in checks), default=1.0)
    return VerificationReport(
        gate=describe_gate(spec, own),
        tolerance=tol,
        num_inputs=len(inputs),
        branches_per_input=branch_count,
        max_deviation=max_dev,
        min_fidelity=min_fid,
        passed=all(c.passed for c in checks),
        resources=account(program),
        checks=checks,
    )


def truth_table(spec: DistributedGateSpec, own: Ownership) -> dict[int, int]:
    """Basis input -> basis output over the whole data register, checked to
    be deterministic across branches. Only defined for u = X."""
    if np.max(np.abs(spec.u - _X)) > 1e-12:
        raise ValueError("truth tables require u = X (a permutation gate)")
    program = compile_plan(plan_groups(spec, own), spec.u)
    n = len(own)
    table: dict[int, int] = {}
    for basis in range(1 << n):
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[basis] = 1.0
        outputs = set()
        for b in enumerate_branches(program, StateVector(n, amps), own):
            data = extract_data_state(program, b)
            top = int(np.argmax(np.abs(data.amps)))
            if abs(data.amps[top] - 1.0) > 1e-12:
                raise ValueError(
                    f"branch output for basis input {basis:0{n}b} is not a "
                    f"computational basis state"
                )
            outputs.add(top)
        if len(outputs) != 1:
            raise ValueError(
                f"branches disagree on basis input {basis:0{n}b}: {sorted(outputs)}"
            )
        table[basis] = outputs.pop()
    return table
