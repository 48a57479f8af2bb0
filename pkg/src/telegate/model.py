"""Distributed register description and control-group planning.

A requested remote gate names control qubits and one target qubit over a
register whose qubits are owned by network nodes. Planning buckets the
controls by owning node: controls on the target's node join the target
group directly; every other control-owning node becomes one control group
and is assigned exactly one Bell pair shared with the target node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import SpecValidationError
from .gates import is_unitary, unitary_name


class Ownership:
    """Ordered qubit labels with the node that owns each of them."""

    __slots__ = ("_labels", "_node_of", "_index_of")

    def __init__(self, assignments: Iterable[tuple[str, str]]):
        labels: list[str] = []
        node_of: dict[str, str] = {}
        for label, node in assignments:
            if label in node_of:
                raise ValueError(f"duplicate qubit label {label!r}")
            labels.append(label)
            node_of[label] = node
        self._labels = tuple(labels)
        self._node_of = node_of
        self._index_of = {lab: i for i, lab in enumerate(labels)}

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def nodes(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for lab in self._labels:
            seen.setdefault(self._node_of[lab], None)
        return tuple(seen)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: str) -> bool:
        return label in self._node_of

    def items(self) -> Iterator[tuple[str, str]]:
        return ((lab, self._node_of[lab]) for lab in self._labels)

    def index(self, label: str) -> int:
        try:
            return self._index_of[label]
        except KeyError:
            raise ValueError(f"unknown qubit label {label!r}") from None

    def node(self, label: str) -> str:
        try:
            return self._node_of[label]
        except KeyError:
            raise ValueError(f"unknown qubit label {label!r}") from None

    def extended(self, extra: Iterable[tuple[str, str]]) -> "Ownership":
        return Ownership(list(self.items()) + list(extra))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ownership):
            return NotImplemented
        return self._labels == other._labels and self._node_of == other._node_of

    def __hash__(self) -> int:
        return hash((self._labels, tuple(sorted(self._node_of.items()))))

    def __repr__(self) -> str:
        return f"Ownership({list(self.items())!r})"


class DistributedGateSpec:
    """A controlled-u gate over labeled qubits, target possibly remote."""

    __slots__ = ("controls", "target", "u", "u_label")

    def __init__(self, controls: Iterable[str], target: str, u, u_label: str | None = None):
        self.controls = tuple(controls)
        self.target = target
        self.u = np.asarray(u, dtype=np.complex128)
        self.u_label = u_label if u_label is not None else unitary_name(self.u)

    def __repr__(self) -> str:
        u = self.u_label or "U"
        return f"DistributedGateSpec(controls={self.controls!r}, target={self.target!r}, u={u})"


@dataclass(frozen=True)
class ControlGroup:
    """Controls of one non-target node plus its Bell-pair qubit labels."""

    node: str
    controls: tuple[str, ...]
    bell_local: str
    bell_target: str


@dataclass(frozen=True)
class GroupPlan:
    """Grouping of a gate's qubits by node, with Bell pairs assigned."""

    ownership: Ownership = field(compare=False)
    target_node: str = ""
    target: str = ""
    local_controls: tuple[str, ...] = ()
    control_groups: tuple[ControlGroup, ...] = ()

    def bell_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple((g.bell_local, g.bell_target) for g in self.control_groups)

    def register_layout(self) -> Ownership:
        """Data qubits in register order followed by (local, target) Bell
        qubits per group, in group order."""
        extra: list[tuple[str, str]] = []
        for g in self.control_groups:
            extra.append((g.bell_local, g.node))
            extra.append((g.bell_target, self.target_node))
        return self.ownership.extended(extra)


def validate_spec(spec: DistributedGateSpec, own: Ownership) -> list[str]:
    """All invariant violations of the gate request; empty list means ok."""
    problems: list[str] = []
    seen: set[str] = set()
    for c in spec.controls:
        if c in seen:
            problems.append(f"duplicate control {c!r}")
        seen.add(c)
        if c not in own:
            problems.append(f"unknown control label {c!r}")
    if spec.target not in own:
        problems.append(f"unknown target label {spec.target!r}")
    if spec.target in spec.controls:
        problems.append(f"target {spec.target!r} also listed as control")
    if spec.u.shape != (2, 2):
        problems.append(f"unitary must be 2x2, got shape {spec.u.shape}")
    elif not np.all(np.isfinite(spec.u)):
        problems.append("unitary contains non-finite entries")
    elif not is_unitary(spec.u):
        problems.append("matrix u is not unitary")
    return problems


def _fresh_label(base: str, used: set[str]) -> str:
    label, k = base, 2
    while label in used:
        label = f"{base}{k}"
        k += 1
    used.add(label)
    return label


def plan_groups(spec: DistributedGateSpec, own: Ownership) -> GroupPlan:
    """Deterministic grouping: one control group per non-target node owning
    controls, ordered by first appearance in the control list; controls on
    the target node join the target group and need no Bell pair."""
    problems = validate_spec(spec, own)
    if problems:
        raise SpecValidationError(problems)
    target_node = own.node(spec.target)
    local_controls: list[str] = []
    grouped: dict[str, list[str]] = {}
    for c in spec.controls:
        node = own.node(c)
        if node == target_node:
            local_controls.append(c)
        else:
            grouped.setdefault(node, []).append(c)
    used = set(own.labels)
    groups = []
    for k, (node, controls) in enumerate(grouped.items(), start=1):
        groups.append(
            ControlGroup(
                node=node,
                controls=tuple(controls),
                bell_local=_fresh_label(f"{node}_e", used),
                bell_target=_fresh_label(f"{target_node}_e{k}", used),
            )
        )
    return GroupPlan(
        ownership=own,
        target_node=target_node,
        target=spec.target,
        local_controls=tuple(local_controls),
        control_groups=tuple(groups),
    )
