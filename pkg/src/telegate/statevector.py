"""Dense pure-state register: gates, projective measurement, Bell preparation.

Amplitude-index convention: register qubit 0 is the MOST significant bit of
the amplitude index, so the ket |q0 q1 ... q_{n-1}> reads left to right from
the top of the register and flipping qubit 0 of an n-qubit state moves an
amplitude by 2**(n-1).

All operations return new (or exclusively owned) states; nothing here keeps
global mutable state, so values can move freely between threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import (
    CapacityError,
    FactorizationError,
    ImpossibleBranchError,
    PreconditionError,
)
from .gates import H as _H
from .gates import as_unitary

DEFAULT_MAX_QUBITS = 26
# branches below this probability are treated as impossible
MIN_BRANCH_PROBABILITY = 1e-14
SUPPORT_TOL = 1e-12


def register_capacity() -> int:
    """Maximum register size; TELEGATE_MAX_QUBITS overrides the default of 26."""
    raw = os.environ.get("TELEGATE_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError:
        raise CapacityError(f"TELEGATE_MAX_QUBITS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise CapacityError(f"TELEGATE_MAX_QUBITS must be >= 1, got {cap}")
    return cap


class StateVector:
    """2**num_qubits complex amplitudes, unit norm."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray):
        self.num_qubits = num_qubits
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())

    def norm_sq(self) -> float:
        return float((self.amps.real**2 + self.amps.imag**2).sum())

    def amplitude(self, basis_index: int) -> complex:
        return complex(self.amps[basis_index])

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective measurement: Z outcomes are 0<->|0>, 1<->|1>;
    X outcomes are 0<->|+>, 1<->|->."""

    qubit: int
    basis: str
    outcome: int
    probability: float


def _bit_mask(num_qubits: int, qubit: int) -> int:
    return 1 << (num_qubits - 1 - qubit)


def _check_qubit(num_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {num_qubits} qubits")


def init_zero(num_qubits: int, max_qubits: int | None = None) -> StateVector:
    """All-|0> state of the given width."""
    cap = register_capacity() if max_qubits is None else max_qubits
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be >= 1, got {num_qubits}")
    if num_qubits > cap:
        raise CapacityError(f"register of {num_qubits} qubits exceeds the cap of {cap}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def from_amplitudes(amps, max_qubits: int | None = None) -> StateVector:
    """State with the given amplitudes; length must be a power of two and the
    norm within 1e-9 of 1 (it is then renormalized exactly)."""
    arr = np.asarray(amps, dtype=np.complex128).reshape(-1).copy()
    n = arr.shape[0]
    if n < 2 or n & (n - 1):
        raise ValueError(f"amplitude count must be a power of two >= 2, got {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes contain non-finite entries")
    num_qubits = n.bit_length() - 1
    cap = register_capacity() if max_qubits is None else max_qubits
    if num_qubits > cap:
        raise CapacityError(f"register of {num_qubits} qubits exceeds the cap of {cap}")
    norm = float(np.sqrt((arr.real**2 + arr.imag**2).sum()))
    if norm == 0.0:
        raise ValueError("zero vector is not a state")
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"amplitudes are not normalized (norm {norm!r})")
    arr /= norm
    return StateVector(num_qubits, arr)


def extend_with_zeros(state: StateVector, extra_qubits: int) -> StateVector:
    """Append extra qubits in |0> below the existing register."""
    if extra_qubits == 0:
        return state.copy()
    n = state.num_qubits + extra_qubits
    if n > register_capacity():
        raise CapacityError(f"register of {n} qubits exceeds the cap of {register_capacity()}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps.reshape(-1, 1 << extra_qubits)[:, 0] = state.amps
    return StateVector(n, amps)


# in-place core shared with the executor ------------------------------------

def _ctrl_u_inplace(amps: np.ndarray, num_qubits: int, controls: tuple[int, ...],
                    target: int, u: np.ndarray) -> None:
    ctrl_mask = 0
    for c in controls:
        ctrl_mask |= _bit_mask(num_qubits, c)
    targ_mask = _bit_mask(num_qubits, target)
    kernels.controlled_u(
        amps, ctrl_mask, targ_mask,
        complex(u[0, 0]), complex(u[0, 1]), complex(u[1, 0]), complex(u[1, 1]),
    )


def _measure_inplace(amps: np.ndarray, num_qubits: int, qubit: int, basis: str,
                     forced_outcome: int | None = None,
                     rng: np.random.Generator | None = None) -> MeasurementRecord:
    """Collapse `amps` in place; X basis is realized as H, Z-measure, no H after
    (the qubit is left in the computational state recording the outcome)."""
    mask = _bit_mask(num_qubits, qubit)
    if basis == "X":
        kernels.controlled_u(
            amps, 0, mask,
            complex(_H[0, 0]), complex(_H[0, 1]), complex(_H[1, 0]), complex(_H[1, 1]),
        )
    elif basis != "Z":
        raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
    probs = (kernels.prob_bit(amps, mask, 0), kernels.prob_bit(amps, mask, 1))
    if forced_outcome is not None:
        if forced_outcome not in (0, 1):
            raise ValueError(f"forced outcome must be 0 or 1, got {forced_outcome!r}")
        outcome = forced_outcome
        if probs[outcome] <= MIN_BRANCH_PROBABILITY:
            raise ImpossibleBranchError(
                f"{basis}-measurement of qubit {qubit}: forced outcome {outcome} "
                f"has probability {probs[outcome]:.3e}"
            )
    else:
        if rng is None:
            rng = np.random.default_rng()
        outcome = 1 if rng.random() < probs[1] else 0
    p = probs[outcome]
    kernels.collapse(amps, mask, outcome, 1.0 / np.sqrt(p))
    return MeasurementRecord(qubit=qubit, basis=basis, outcome=outcome, probability=p)


# public operations ----------------------------------------------------------

def apply_controlled_u(state: StateVector, controls: Iterable[int], target: int,
                       u) -> StateVector:
    """Apply u to `target` on the subspace where all `controls` are 1.

    With no controls this is a plain single-qubit gate.
    """
    ctrls = tuple(controls)
    n = state.num_qubits
    _check_qubit(n, target)
    for c in ctrls:
        _check_qubit(n, c)
    operands = ctrls + (target,)
    if len(set(operands)) != len(operands):
        raise ValueError(f"control/target indices collide: {operands}")
    mat = as_unitary(u)
    amps = state.amps.copy()
    _ctrl_u_inplace(amps, n, ctrls, target, mat)
    return StateVector(n, amps)


def measure(state: StateVector, qubit: int, basis: str = "Z",
            forced_outcome: int | None = None,
            rng: np.random.Generator | None = None) -> tuple[MeasurementRecord, StateVector]:
    """Projective measurement with collapse; returns the record and the new state.

    `forced_outcome` selects a branch deterministically and raises
    ImpossibleBranchError if that branch has probability <= 1e-14; otherwise
    the outcome is drawn from `rng` (a fresh generator when omitted).
    """
    _check_qubit(state.num_qubits, qubit)
    amps = state.amps.copy()
    record = _measure_inplace(amps, state.num_qubits, qubit, basis,
                              forced_outcome=forced_outcome, rng=rng)
    return record, StateVector(state.num_qubits, amps)


def prepare_bell(state: StateVector, q1: int, q2: int) -> StateVector:
    """Put qubits q1,q2 -- both currently |0> -- into (|00>+|11>)/sqrt(2)
    via H on q1 then controlled-X(q1 -> q2)."""
    n = state.num_qubits
    _check_qubit(n, q1)
    _check_qubit(n, q2)
    if q1 == q2:
        raise ValueError("Bell pair needs two distinct qubits")
    for q in (q1, q2):
        if kernels.prob_bit(state.amps, _bit_mask(n, q), 1) > MIN_BRANCH_PROBABILITY:
            raise PreconditionError(
                f"qubit {q} must be |0> before Bell preparation"
            )
    amps = state.amps.copy()
    _ctrl_u_inplace(amps, n, (), q1, _H)
    _ctrl_u_inplace(amps, n, (q1,), q2, np.array([[0, 1], [1, 0]], dtype=np.complex128))
    return StateVector(n, amps)


def extract_subregister(state: StateVector, keep: Iterable[int],
                        fixed: Mapping[int, int]) -> StateVector:
    """Pure state on `keep` (in the given order) after fixing every other
    qubit to the bit in `fixed`.

    Raises FactorizationError if any amplitude outside the fixed assignment
    exceeds 1e-12 in magnitude.
    """
    keep = list(keep)
    n = state.num_qubits
    fixed_axes = list(fixed.keys())
    covered = keep + fixed_axes
    if sorted(covered) != list(range(n)):
        raise ValueError(
            f"keep {keep} plus fixed {sorted(fixed_axes)} must cover qubits 0..{n - 1} exactly"
        )
    for q, b in fixed.items():
        if b not in (0, 1):
            raise ValueError(f"fixed bit for qubit {q} must be 0 or 1, got {b!r}")
    tensor = state.amps.reshape([2] * n)
    moved = np.transpose(tensor, keep + fixed_axes).copy()
    selector = (slice(None),) * len(keep) + tuple(fixed[q] for q in fixed_axes)
    sub = moved[selector].copy()
    moved[selector] = 0.0
    residual = float(np.max(np.abs(moved))) if moved.size else 0.0
    if residual > SUPPORT_TOL:
        raise FactorizationError(
            f"state has amplitude {residual:.3e} outside the fixed assignment "
            f"{dict(fixed)}; it does not factor"
        )
    out = sub.reshape(-1)
    out /= np.sqrt((out.real**2 + out.imag**2).sum())
    return StateVector(len(keep), out)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| -- diagnostic only; equivalence checks compare amplitudes."""
    return abs(inner_product(a, b))
