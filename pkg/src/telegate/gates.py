"""Standard 2x2 matrices and helpers for single-qubit unitaries."""

from __future__ import annotations

import numpy as np

UNITARY_TOL = 1e-10


def _const(rows) -> np.ndarray:
    m = np.array(rows, dtype=np.complex128)
    m.setflags(write=False)
    return m


I = _const([[1, 0], [0, 1]])
X = _const([[0, 1], [1, 0]])
Z = _const([[1, 0], [0, -1]])
H = _const(np.array([[1, 1], [1, -1]]) / np.sqrt(2.0))

NAMED_UNITARIES = {"I": I, "X": X, "Z": Z, "H": H}


def as_unitary(u) -> np.ndarray:
    """Coerce to a validated 2x2 complex matrix; raises ValueError if not unitary."""
    m = np.asarray(u, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"single-qubit unitary must be 2x2, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("unitary contains non-finite entries")
    if not is_unitary(m):
        raise ValueError("matrix is not unitary (U U+ != I within 1e-10)")
    return m


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u @ u.conj().T - I)) <= tol)


def unitary_name(u: np.ndarray, tol: float = 1e-12) -> str | None:
    """Return the conventional name of u if it matches one, else None."""
    for name, m in NAMED_UNITARIES.items():
        if np.max(np.abs(u - m)) <= tol:
            return name
    return None


def named_unitary(name: str) -> np.ndarray:
    try:
        return NAMED_UNITARIES[name]
    except KeyError:
        raise ValueError(
            f"unknown unitary name {name!r}; expected one of {sorted(NAMED_UNITARIES)}"
        ) from None


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary from a seeded generator (QR with phase fix)."""
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def format_unitary(u: np.ndarray) -> str:
    """Stable text form for traces: the short name, or all four entries."""
    name = unitary_name(u)
    if name is not None:
        return name
    entries = ",".join(f"{c.real:.12f}{c.imag:+.12f}j" for c in np.asarray(u).ravel())
    return f"U[{entries}]"
