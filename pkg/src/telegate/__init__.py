"""Entanglement-assisted remote multi-controlled gates: simulation and verification.

One Bell pair per control-owning node, local gates, and classically fed-forward
corrections realize an n-controlled-U across a distributed register; this
package compiles that protocol, executes it branch by branch on a dense state
vector, and checks every branch against the monolithic gate.
"""

from .errors import (
    CapacityError,
    FactorizationError,
    ImpossibleBranchError,
    LocalityError,
    PreconditionError,
    ScenarioError,
    SpecValidationError,
    TelegateError,
)
from .gates import H, I, X, Z, named_unitary, random_unitary
from .statevector import (
    MeasurementRecord,
    StateVector,
    apply_controlled_u,
    extract_subregister,
    fidelity,
    from_amplitudes,
    init_zero,
    inner_product,
    measure,
    prepare_bell,
)

__version__ = "0.1.0"
