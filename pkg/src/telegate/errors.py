"""Exception types raised across the package."""


class TelegateError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(TelegateError):
    """A register, amplitude array, or enumeration exceeds its configured cap."""


class PreconditionError(TelegateError):
    """An operation's required input state does not hold (e.g. Bell prep on non-|0> qubits)."""


class ImpossibleBranchError(TelegateError):
    """A forced measurement outcome has (numerically) zero probability."""


class FactorizationError(TelegateError):
    """A state has amplitude support outside the asserted fixed-qubit assignment."""


class SpecValidationError(TelegateError):
    """A distributed gate request violates its invariants.

    Carries the full list of problems so callers can report all of them.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class LocalityError(TelegateError):
    """A program contains cross-node gates or ill-formed classical dataflow."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "; ".join(f"instruction {v.index}: {v.reason}" for v in self.violations)
        )


class ScenarioError(TelegateError):
    """A scenario file is malformed or inconsistent."""
