"""Quantum arithmetic, comparator, phase-estimation and order-finding circuits on a statevector simulator."""

from .errors import CapacityError, DomainError, ExhaustionError, QArithError, StructuralError
from .layout import Register, RegisterLayout
from .simulator import (
    Circuit,
    CircuitBuilder,
    Gate,
    MeasurementHistogram,
    ResourceReport,
    SparseBatch,
    apply_gate,
    controlled,
    dump,
    inverse,
    marginal_distribution,
    marginal_probabilities,
    measure_register,
    new_state,
    parse,
    resources,
    run,
    run_basis,
    run_sparse,
)

__version__ = "0.1.0"
