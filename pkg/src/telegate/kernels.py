"""Hot amplitude-array kernels with selectable backend.

Every kernel mutates a contiguous complex128 array in place and addresses
qubits through bit masks over the amplitude index (register qubit 0 is the
most significant bit). Two interchangeable implementations exist:

* ``numba`` -- @njit'ed index loops, JIT-compiled on first use and cached
  on disk. Default whenever numba imports.
* ``numpy`` -- vectorized fallback with identical semantics.

Set ``TELEGATE_BACKEND`` to ``numba``, ``numpy``, or ``auto`` (default) to
choose. ``numba`` raises at import if numba is unavailable.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

__all__ = [
    "backend",
    "get_kernels",
    "controlled_u",
    "prob_bit",
    "collapse",
    "warmup",
]


# ------------------------------------------------------------------ numpy

def _controlled_u_numpy(amps, ctrl_mask, targ_mask, u00, u01, u10, u11):
    if ctrl_mask == 0:
        # plain single-qubit gate: strided views, no index array
        low = targ_mask.bit_length() - 1
        v = amps.reshape(-1, 2, 1 << low)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = u00 * a0 + u01 * a1
        v[:, 1, :] = u10 * a0 + u11 * a1
        return
    idx = np.arange(amps.shape[0])
    i0 = idx[(idx & (ctrl_mask | targ_mask)) == ctrl_mask]
    i1 = i0 | targ_mask
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = u00 * a0 + u01 * a1
    amps[i1] = u10 * a0 + u11 * a1


def _prob_bit_numpy(amps, mask, bit):
    low = mask.bit_length() - 1
    half = amps.reshape(-1, 2, 1 << low)[:, bit, :]
    return float((half.real**2 + half.imag**2).sum())


def _collapse_numpy(amps, mask, outcome, inv_norm):
    low = mask.bit_length() - 1
    v = amps.reshape(-1, 2, 1 << low)
    v[:, 1 - outcome, :] = 0.0
    v[:, outcome, :] *= inv_norm


_NUMPY = SimpleNamespace(
    name="numpy",
    controlled_u=_controlled_u_numpy,
    prob_bit=_prob_bit_numpy,
    collapse=_collapse_numpy,
)


# ------------------------------------------------------------------ numba

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def controlled_u(amps, ctrl_mask, targ_mask, u00, u01, u10, u11):
        both = ctrl_mask | targ_mask
        for i in range(amps.shape[0]):
            if (i & both) == ctrl_mask:
                j = i | targ_mask
                a0 = amps[i]
                a1 = amps[j]
                amps[i] = u00 * a0 + u01 * a1
                amps[j] = u10 * a0 + u11 * a1

    @njit(cache=True)
    def prob_bit(amps, mask, bit):
        want = mask if bit == 1 else 0
        total = 0.0
        for i in range(amps.shape[0]):
            if (i & mask) == want:
                a = amps[i]
                total += a.real * a.real + a.imag * a.imag
        return total

    @njit(cache=True)
    def collapse(amps, mask, outcome, inv_norm):
        keep = mask if outcome == 1 else 0
        for i in range(amps.shape[0]):
            if (i & mask) == keep:
                amps[i] = amps[i] * inv_norm
            else:
                amps[i] = 0.0

    return SimpleNamespace(
        name="numba", controlled_u=controlled_u, prob_bit=prob_bit, collapse=collapse
    )


_numba_impl = None


def get_kernels(name: str) -> SimpleNamespace:
    """Kernel namespace for an explicit backend (used by the benchmark)."""
    global _numba_impl
    if name == "numpy":
        return _NUMPY
    if name == "numba":
        if _numba_impl is None:
            _numba_impl = _build_numba()
        return _numba_impl
    raise ValueError(f"unknown kernel backend {name!r}")


def _select() -> SimpleNamespace:
    choice = os.environ.get("TELEGATE_BACKEND", "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"TELEGATE_BACKEND must be 'auto', 'numba', or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return _NUMPY
    try:
        return get_kernels("numba")
    except ImportError:
        if choice == "numba":
            raise RuntimeError(
                "TELEGATE_BACKEND=numba but numba is not importable"
            ) from None
        return _NUMPY


_ACTIVE = _select()

controlled_u = _ACTIVE.controlled_u
prob_bit = _ACTIVE.prob_bit
collapse = _ACTIVE.collapse


def backend() -> str:
    """Name of the active kernel backend."""
    return _ACTIVE.name


def warmup() -> None:
    """Trigger JIT compilation of all kernels (no-op on the numpy backend)."""
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = 1.0
    controlled_u(amps, 0, 2, 0j, 1 + 0j, 1 + 0j, 0j)
    controlled_u(amps, 2, 1, 0j, 1 + 0j, 1 + 0j, 0j)
    p = prob_bit(amps, 2, 1)
    collapse(amps, 2, 1, 1.0 / np.sqrt(p))
