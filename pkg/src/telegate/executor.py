"""Execute compiled programs on a global state vector.

The simulation is central (one wavefunction over every node's qubits) but
locality is enforced syntactically: gate instructions must stay on one node
and conditional corrections may only consume bits that an earlier Send
delivered to their node. Execution refuses to start on any violation.

Measured qubits stay in the register in their collapsed computational
state; use extract_data_state to compare data qubits afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .compiler import (
    BellPrep,
    CondMCZ,
    CondX,
    Instruction,
    LocalMCU,
    LocalMCX,
    MeasureX,
    MeasureZ,
    Program,
    Send,
    render_instruction,
    unitary_matrix,
)
from .errors import (
    CapacityError,
    ImpossibleBranchError,
    LocalityError,
    PreconditionError,
    TelegateError,
)
from .gates import X as _X
from .gates import Z as _Z
from .gates import as_unitary
from .model import Ownership
from .statevector import (
    MIN_BRANCH_PROBABILITY,
    StateVector,
    _bit_mask,
    _ctrl_u_inplace,
    _measure_inplace,
    extend_with_zeros,
    extract_subregister,
)

DEFAULT_MAX_MEASUREMENTS = 16


@dataclass(frozen=True)
class Violation:
    index: int
    reason: str


@dataclass
class ClassicalChannel:
    """Ordered classical messages plus per-node received-bit tables."""

    messages: list[tuple[str, str, str, int]] = field(default_factory=list)
    produced: dict[str, tuple[str, int]] = field(default_factory=dict)
    received: dict[tuple[str, str], int] = field(default_factory=dict)

    def fork(self) -> "ClassicalChannel":
        return ClassicalChannel(
            list(self.messages), dict(self.produced), dict(self.received)
        )

    def produce(self, tag: str, node: str, bit: int) -> None:
        self.produced[tag] = (node, bit)

    def known_bit(self, node: str, tag: str) -> int | None:
        if tag in self.produced and self.produced[tag][0] == node:
            return self.produced[tag][1]
        return self.received.get((node, tag))

    def send(self, tag: str, from_node: str, to_node: str) -> int:
        bit = self.known_bit(from_node, tag)
        if bit is None:
            raise TelegateError(
                f"node {from_node!r} cannot send {tag!r}: bit not available there"
            )
        self.messages.append((tag, from_node, to_node, bit))
        self.received[(to_node, tag)] = bit
        return bit

    def consume(self, node: str, tag: str) -> int:
        bit = self.received.get((node, tag))
        if bit is None:
            raise TelegateError(
                f"unresolved condition tag {tag!r} at node {node!r} (never delivered)"
            )
        return bit


@dataclass
class BranchResult:
    """One assignment of outcomes to all measurements of a run."""

    outcomes: dict[str, int]
    probability: float
    final_state: StateVector
    trace: tuple[str, ...]

    def outcome_bits(self, tags) -> str:
        return "".join(str(self.outcomes[t]) for t in tags)


# ----------------------------------------------------------------- locality

def check_locality(program: Program, own: Ownership | None = None) -> list[Violation]:
    """Statically verify single-node gates and classical dataflow.

    Returns all violations (empty list means ok). `own`, when given, must
    agree with the program layout on the data qubits.
    """
    v: list[Violation] = []
    layout = program.layout
    if own is not None:
        if tuple(own.labels) != tuple(program.data_labels):
            v.append(Violation(-1, "data register does not match the provided ownership"))
        else:
            for lab in own.labels:
                if layout.node(lab) != own.node(lab):
                    v.append(Violation(-1, f"qubit {lab!r} owned by {layout.node(lab)!r} "
                                           f"in program but {own.node(lab)!r} in ownership"))

    def owner(i: int, label: str) -> str | None:
        if label not in layout:
            v.append(Violation(i, f"unknown qubit label {label!r}"))
            return None
        return layout.node(label)

    def gate_on_one_node(i: int, node: str, qubits: tuple[str, ...]) -> None:
        nodes = {owner(i, q) for q in qubits}
        nodes.discard(None)
        if nodes and nodes != {node}:
            v.append(Violation(
                i, f"gate at node {node!r} touches qubits on nodes "
                   f"{sorted(nodes)}: cross-node gates are forbidden"))
        if len(set(qubits)) != len(qubits):
            v.append(Violation(i, f"operand collision in {qubits}"))

    produced: dict[str, str] = {}
    delivered: set[tuple[str, str]] = set()
    for i, ins in enumerate(program.instructions):
        if isinstance(ins, BellPrep):
            for q, node in zip((ins.local_qubit, ins.remote_qubit), ins.owner_pair):
                got = owner(i, q)
                if got is not None and got != node:
                    v.append(Violation(i, f"Bell qubit {q!r} owned by {got!r}, "
                                          f"declared {node!r}"))
            if ins.local_qubit == ins.remote_qubit:
                v.append(Violation(i, "Bell pair needs two distinct qubits"))
        elif isinstance(ins, (LocalMCX, LocalMCU)):
            gate_on_one_node(i, ins.node, ins.controls + (ins.target,))
        elif isinstance(ins, (MeasureZ, MeasureX)):
            got = owner(i, ins.qubit)
            if got is not None and got != ins.node:
                v.append(Violation(i, f"node {ins.node!r} cannot measure qubit "
                                      f"{ins.qubit!r} owned by {got!r}"))
            if ins.result_tag in produced:
                v.append(Violation(i, f"result tag {ins.result_tag!r} reused"))
            produced[ins.result_tag] = ins.node
        elif isinstance(ins, Send):
            at_source = (produced.get(ins.result_tag) == ins.from_node
                         or (ins.from_node, ins.result_tag) in delivered)
            if not at_source:
                v.append(Violation(i, f"tag {ins.result_tag!r} not available at "
                                      f"node {ins.from_node!r} when sent"))
            delivered.add((ins.to_node, ins.result_tag))
        elif isinstance(ins, CondX):
            got = owner(i, ins.qubit)
            if got is not None and got != ins.node:
                v.append(Violation(i, f"conditional X at {ins.node!r} on qubit "
                                      f"{ins.qubit!r} owned by {got!r}"))
            if (ins.node, ins.condition_tag) not in delivered:
                v.append(Violation(i, f"condition tag {ins.condition_tag!r} never "
                                      f"sent to node {ins.node!r}"))
        elif isinstance(ins, CondMCZ):
            gate_on_one_node(i, ins.node, ins.controls + (ins.target,))
            if (ins.node, ins.condition_tag) not in delivered:
                v.append(Violation(i, f"condition tag {ins.condition_tag!r} never "
                                      f"sent to node {ins.node!r}"))
        else:
            v.append(Violation(i, f"unknown instruction {ins!r}"))
    return v


def _require_local(program: Program, own: Ownership | None) -> None:
    violations = check_locality(program, own)
    if violations:
        raise LocalityError(violations)


# ---------------------------------------------------------------- execution

def _initial_amps(program: Program, input_state: StateVector) -> np.ndarray:
    n_data = len(program.data_labels)
    if input_state.num_qubits != n_data:
        raise ValueError(
            f"input covers {input_state.num_qubits} qubits, program has "
            f"{n_data} data qubits"
        )
    return extend_with_zeros(input_state, len(program.layout) - n_data).amps


def _apply_gate(amps: np.ndarray, ins: Instruction, n: int, idx, channel: ClassicalChannel) -> str:
    """Apply a non-measurement instruction in place; returns the trace line."""
    if isinstance(ins, BellPrep):
        for q in (ins.local_qubit, ins.remote_qubit):
            if kernels.prob_bit(amps, _bit_mask(n, idx[q]), 1) > MIN_BRANCH_PROBABILITY:
                raise PreconditionError(
                    f"Bell qubit {q!r} must be |0> before preparation"
                )
        _ctrl_u_inplace(amps, n, (), idx[ins.local_qubit], np.asarray(
            [[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0))
        _ctrl_u_inplace(amps, n, (idx[ins.local_qubit],), idx[ins.remote_qubit], _X)
        return render_instruction(ins)
    if isinstance(ins, LocalMCX):
        _ctrl_u_inplace(amps, n, tuple(idx[c] for c in ins.controls), idx[ins.target], _X)
        return render_instruction(ins)
    if isinstance(ins, LocalMCU):
        u = as_unitary(unitary_matrix(ins.u))
        _ctrl_u_inplace(amps, n, tuple(idx[c] for c in ins.controls), idx[ins.target], u)
        return render_instruction(ins)
    if isinstance(ins, Send):
        bit = channel.send(ins.result_tag, ins.from_node, ins.to_node)
        return f"send {ins.result_tag} {ins.from_node}->{ins.to_node} {bit}"
    if isinstance(ins, CondX):
        bit = channel.consume(ins.node, ins.condition_tag)
        if bit:
            _ctrl_u_inplace(amps, n, (), idx[ins.qubit], _X)
        word = "apply" if bit else "skip"
        return (f"condx @{ins.node} {ins.qubit} "
                f"({ins.condition_tag}={bit}) {word}")
    if isinstance(ins, CondMCZ):
        bit = channel.consume(ins.node, ins.condition_tag)
        if bit:
            _ctrl_u_inplace(amps, n, tuple(idx[c] for c in ins.controls), idx[ins.target], _Z)
        word = "apply" if bit else "skip"
        ctrls = ",".join(ins.controls) if ins.controls else "-"
        return (f"condmcz @{ins.node} {ctrls} -> {ins.target} "
                f"({ins.condition_tag}={bit}) {word}")
    raise TypeError(f"not an executable instruction: {ins!r}")


def _measure_line(ins, outcome: int, probability: float) -> str:
    kind = "measZ" if isinstance(ins, MeasureZ) else "measX"
    return (f"{kind} @{ins.node} {ins.qubit} "
            f"{ins.result_tag}={outcome} p={probability:.12f}")


def _finish(amps: np.ndarray, n: int, outcomes, probability, trace) -> BranchResult:
    norm_sq = float((amps.real**2 + amps.imag**2).sum())
    if abs(norm_sq - 1.0) > 1e-9:
        raise TelegateError(f"state norm drifted to {norm_sq!r}")
    return BranchResult(
        outcomes=outcomes,
        probability=probability,
        final_state=StateVector(n, amps),
        trace=tuple(trace),
    )


def execute_branch(program: Program, input_state: StateVector,
                   forced: dict[str, int],
                   own: Ownership | None = None) -> BranchResult:
    """Run every instruction, resolving each measurement to its forced bit.

    Raises ImpossibleBranchError when a forced bit has probability <= 1e-14
    and ValueError when a measurement tag is missing from `forced`.
    """
    _require_local(program, own)
    n = len(program.layout)
    idx = {lab: i for i, lab in enumerate(program.layout.labels)}
    amps = _initial_amps(program, input_state)
    channel = ClassicalChannel()
    outcomes: dict[str, int] = {}
    probability = 1.0
    trace: list[str] = []
    for ins in program.instructions:
        if isinstance(ins, (MeasureZ, MeasureX)):
            tag = ins.result_tag
            if tag not in forced:
                raise ValueError(f"no forced outcome for measurement tag {tag!r}")
            basis = "Z" if isinstance(ins, MeasureZ) else "X"
            try:
                rec = _measure_inplace(amps, n, idx[ins.qubit], basis,
                                       forced_outcome=forced[tag])
            except ImpossibleBranchError as e:
                raise ImpossibleBranchError(f"measurement {tag!r}: {e}") from None
            outcomes[tag] = rec.outcome
            probability *= rec.probability
            channel.produce(tag, ins.node, rec.outcome)
            trace.append(_measure_line(ins, rec.outcome, rec.probability))
        else:
            trace.append(_apply_gate(amps, ins, n, idx, channel))
    return _finish(amps, n, outcomes, probability, trace)


def enumerate_branches(program: Program, input_state: StateVector,
                       own: Ownership | None = None,
                       max_measurements: int = DEFAULT_MAX_MEASUREMENTS) -> list[BranchResult]:
    """All measurement branches with probability > 1e-14, in lexicographic
    order of their outcome bits (measurements in program order).

    Probabilities over the returned branches sum to 1 within 1e-10.
    """
    _require_local(program, own)
    n_meas = len(program.measurement_tags)
    if n_meas > max_measurements:
        raise CapacityError(
            f"{n_meas} measurements exceed the enumeration limit of {max_measurements}"
        )
    n = len(program.layout)
    idx = {lab: i for i, lab in enumerate(program.layout.labels)}
    instrs = program.instructions
    results: list[BranchResult] = []

    def walk(amps, i, probability, outcomes, trace, channel):
        while i < len(instrs):
            ins = instrs[i]
            if isinstance(ins, (MeasureZ, MeasureX)):
                mask = _bit_mask(n, idx[ins.qubit])
                if isinstance(ins, MeasureX):
                    _ctrl_u_inplace(amps, n, (), idx[ins.qubit], np.asarray(
                        [[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0))
                probs = (kernels.prob_bit(amps, mask, 0), kernels.prob_bit(amps, mask, 1))
                for outcome in (0, 1):
                    p = probs[outcome]
                    branch_p = probability * p
                    if p <= MIN_BRANCH_PROBABILITY or branch_p <= MIN_BRANCH_PROBABILITY:
                        continue
                    forked = amps.copy()
                    kernels.collapse(forked, mask, outcome, 1.0 / np.sqrt(p))
                    chan = channel.fork()
                    chan.produce(ins.result_tag, ins.node, outcome)
                    walk(forked, i + 1, branch_p,
                         {**outcomes, ins.result_tag: outcome},
                         trace + [_measure_line(ins, outcome, p)], chan)
                return
            trace.append(_apply_gate(amps, ins, n, idx, channel))
            i += 1
        results.append(_finish(amps, n, outcomes, probability, trace))

    amps0 = _initial_amps(program, input_state)
    walk(amps0, 0, 1.0, {}, [], ClassicalChannel())
    return results


def run_sampled(program: Program, input_state: StateVector, seed: int,
                own: Ownership | None = None) -> BranchResult:
    """One run with outcomes drawn from the exact branch probabilities by a
    generator seeded with `seed`; identical seeds give identical results."""
    _require_local(program, own)
    rng = np.random.default_rng(seed)
    n = len(program.layout)
    idx = {lab: i for i, lab in enumerate(program.layout.labels)}
    amps = _initial_amps(program, input_state)
    channel = ClassicalChannel()
    outcomes: dict[str, int] = {}
    probability = 1.0
    trace: list[str] = []
    for ins in program.instructions:
        if isinstance(ins, (MeasureZ, MeasureX)):
            basis = "Z" if isinstance(ins, MeasureZ) else "X"
            rec = _measure_inplace(amps, n, idx[ins.qubit], basis, rng=rng)
            outcomes[ins.result_tag] = rec.outcome
            probability *= rec.probability
            channel.produce(ins.result_tag, ins.node, rec.outcome)
            trace.append(_measure_line(ins, rec.outcome, rec.probability))
        else:
            trace.append(_apply_gate(amps, ins, n, idx, channel))
    return _finish(amps, n, outcomes, probability, trace)


def extract_data_state(program: Program, result: BranchResult) -> StateVector:
    """Pure state of the data qubits after fixing every measured qubit to
    its recorded outcome."""
    layout = program.layout
    fixed = {}
    for ins in program.instructions:
        if isinstance(ins, (MeasureZ, MeasureX)):
            fixed[layout.index(ins.qubit)] = result.outcomes[ins.result_tag]
    keep = [layout.index(lab) for lab in program.data_labels]
    return extract_subregister(result.final_state, keep, fixed)
