"""Compile a group plan into the distributed instruction stream.

Per control group, in group order: Bell preparation, the group's
multi-controlled X onto its local Bell qubit, a Z measurement of that qubit,
a classical send to the target node, and a conditional X on the target-side
Bell qubit. Then a single multi-controlled U at the target node whose
controls are all target-side Bell qubits followed by the target group's own
controls. Finally, per group: an X measurement of the target-side Bell
qubit, a send back, and a conditional multi-controlled Z within the group
(a plain conditional Z when the group has one control).

Group blocks touch disjoint qubits, so their relative order does not affect
any outcome; they are emitted sequentially for deterministic traces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .gates import format_unitary
from .model import GroupPlan, Ownership

UMatrix = tuple[tuple[complex, complex], tuple[complex, complex]]


def freeze_unitary(u) -> UMatrix:
    m = np.asarray(u, dtype=np.complex128)
    return ((complex(m[0, 0]), complex(m[0, 1])), (complex(m[1, 0]), complex(m[1, 1])))


def unitary_matrix(u: UMatrix) -> np.ndarray:
    return np.array(u, dtype=np.complex128)


@dataclass(frozen=True)
class BellPrep:
    local_qubit: str
    remote_qubit: str
    owner_pair: tuple[str, str]


@dataclass(frozen=True)
class LocalMCX:
    node: str
    controls: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class LocalMCU:
    node: str
    controls: tuple[str, ...]
    target: str
    u: UMatrix


@dataclass(frozen=True)
class MeasureZ:
    node: str
    qubit: str
    result_tag: str


@dataclass(frozen=True)
class MeasureX:
    node: str
    qubit: str
    result_tag: str


@dataclass(frozen=True)
class Send:
    result_tag: str
    from_node: str
    to_node: str


@dataclass(frozen=True)
class CondX:
    node: str
    qubit: str
    condition_tag: str


@dataclass(frozen=True)
class CondMCZ:
    node: str
    controls: tuple[str, ...]
    target: str
    condition_tag: str


Instruction = Union[BellPrep, LocalMCX, LocalMCU, MeasureZ, MeasureX, Send, CondX, CondMCZ]


def _labels(labels: tuple[str, ...]) -> str:
    return ",".join(labels) if labels else "-"


def render_instruction(ins: Instruction) -> str:
    """One-line text form, stable across runs (used for golden traces)."""
    if isinstance(ins, BellPrep):
        a, b = ins.owner_pair
        return f"bellprep {ins.local_qubit}@{a} ~ {ins.remote_qubit}@{b}"
    if isinstance(ins, LocalMCX):
        return f"mcx @{ins.node} {_labels(ins.controls)} -> {ins.target}"
    if isinstance(ins, LocalMCU):
        u = format_unitary(unitary_matrix(ins.u))
        return f"mcu @{ins.node} {_labels(ins.controls)} -> {ins.target} u={u}"
    if isinstance(ins, MeasureZ):
        return f"measZ @{ins.node} {ins.qubit} -> {ins.result_tag}"
    if isinstance(ins, MeasureX):
        return f"measX @{ins.node} {ins.qubit} -> {ins.result_tag}"
    if isinstance(ins, Send):
        return f"send {ins.result_tag} {ins.from_node}->{ins.to_node}"
    if isinstance(ins, CondX):
        return f"condx @{ins.node} {ins.qubit} ? {ins.condition_tag}"
    if isinstance(ins, CondMCZ):
        return f"condmcz @{ins.node} {_labels(ins.controls)} -> {ins.target} ? {ins.condition_tag}"
    raise TypeError(f"not an instruction: {ins!r}")


@dataclass(frozen=True)
class Program:
    """Ordered instruction stream over a fixed register layout."""

    instructions: tuple[Instruction, ...]
    layout: Ownership
    data_labels: tuple[str, ...]
    measurement_tags: tuple[str, ...]

    def tag_table(self) -> dict[str, Instruction]:
        return {
            ins.result_tag: ins
            for ins in self.instructions
            if isinstance(ins, (MeasureZ, MeasureX))
        }

    def to_text(self) -> str:
        return "\n".join(render_instruction(ins) for ins in self.instructions) + "\n"


def compile_plan(plan: GroupPlan, u) -> Program:
    """Instruction stream realizing the remote controlled-u for `plan`."""
    target_node = plan.target_node
    instructions: list[Instruction] = []
    tags: list[str] = []
    for g in plan.control_groups:
        z_tag = f"z_{g.node}"
        instructions.append(BellPrep(g.bell_local, g.bell_target, (g.node, target_node)))
        instructions.append(LocalMCX(g.node, g.controls, g.bell_local))
        instructions.append(MeasureZ(g.node, g.bell_local, z_tag))
        instructions.append(Send(z_tag, g.node, target_node))
        instructions.append(CondX(target_node, g.bell_target, z_tag))
        tags.append(z_tag)
    mcu_controls = tuple(g.bell_target for g in plan.control_groups) + plan.local_controls
    instructions.append(LocalMCU(target_node, mcu_controls, plan.target, freeze_unitary(u)))
    for g in plan.control_groups:
        x_tag = f"x_{g.node}"
        instructions.append(MeasureX(target_node, g.bell_target, x_tag))
        instructions.append(Send(x_tag, target_node, g.node))
        instructions.append(CondMCZ(g.node, g.controls[:-1], g.controls[-1], x_tag))
        tags.append(x_tag)
    return Program(
        instructions=tuple(instructions),
        layout=plan.register_layout(),
        data_labels=plan.ownership.labels,
        measurement_tags=tuple(tags),
    )
