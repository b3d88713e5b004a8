"""Quantum phase estimation with a pluggable controlled-power supplier.

A supplier maps ``(t, control)`` to a circuit applying ``U**(2**t)`` to the
work register under one control qubit. :class:`PhasePowerSupplier` covers
diagonal single-qubit phase unitaries and fuses each power into one rotation.
:class:`RepeatedPowerSupplier` wraps an arbitrary circuit for ``U`` and
repeats its controlled version ``2**t`` times.

Counting qubit ``t`` controls ``U**(2**t)``, so after the Hadamard layer
and the controlled powers the counting register holds the Fourier image of
``2**n * theta``. The closing inverse QFT (with its swap layer) reads it out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import DomainError, StructuralError
from .layout import check_disjoint
from .qft import append_iqft
from .simulator import Circuit, CircuitBuilder, marginal_probabilities, new_state, run


class ControlledPowerSupplier(Protocol):
    def __call__(self, t: int, control: int) -> Circuit: ...


@dataclass(frozen=True)
class PhasePowerSupplier:
    """``U = diag(1, exp(2*pi*i*theta))`` on one work qubit; powers fused by angle scaling."""

    target: int
    theta: float

    def __call__(self, t: int, control: int) -> Circuit:
        b = CircuitBuilder()
        angle = math.remainder(2 * math.pi * self.theta * (1 << t), 2 * math.pi)
        b.cphase(control, self.target, angle)
        return b.build()


@dataclass(frozen=True)
class RepeatedPowerSupplier:
    """Generic supplier: the controlled ``unitary`` applied ``2**t`` times."""

    unitary: Circuit

    def __call__(self, t: int, control: int) -> Circuit:
        one = self.unitary.controlled((control,))
        b = CircuitBuilder()
        for _ in range(1 << t):
            b.extend(one)
        return b.build()


def prepare_basis_eigenstate(work_group: Sequence[int], value: int) -> Circuit:
    """X gates loading the computational-basis state ``|value>`` into ``work_group``."""
    work_group = tuple(work_group)
    if not 0 <= value < 1 << len(work_group):
        raise DomainError(f"{value} does not fit {len(work_group)} work qubits")
    b = CircuitBuilder(1 + max(work_group))
    for i, q in enumerate(work_group):
        if value >> i & 1:
            b.x(q)
    return b.build()


def qpe_circuit(
    counting_group: Sequence[int],
    work_group: Sequence[int],
    supplier: ControlledPowerSupplier | Callable[[int, int], Circuit],
    qubit_count: int | None = None,
) -> Circuit:
    """H on every counting qubit, controlled ``U**(2**t)`` from counting qubit ``t``, inverse QFT.

    Raises
    ------
    StructuralError
        If a supplied circuit acts outside the work register and its control.
    """
    counting_group, work_group = tuple(counting_group), tuple(work_group)
    if not counting_group:
        raise StructuralError("counting register must be nonempty")
    check_disjoint(counting_group, work_group)
    b = CircuitBuilder(qubit_count or 1 + max(counting_group + work_group))
    for q in counting_group:
        b.h(q)
    allowed = set(work_group)
    for t, c in enumerate(counting_group):
        power = supplier(t, c)
        foreign = power.acting_qubits - allowed - {c}
        if foreign:
            raise StructuralError(f"supplier circuit touches foreign qubits {sorted(foreign)}")
        b.extend(power)
    append_iqft(b, counting_group, swaps=True)
    return b.build()


@dataclass(frozen=True)
class PhaseEstimate:
    """Most likely counting value, its phase ``j0 / 2**n`` and the full marginal."""

    measured: int
    width: int
    distribution: np.ndarray = field(repr=False)

    @property
    def theta(self) -> float:
        return self.measured / (1 << self.width)

    @property
    def probability(self) -> float:
        return float(self.distribution[self.measured])


def estimate_phase(state: np.ndarray, counting_group: Sequence[int]) -> PhaseEstimate:
    p = marginal_probabilities(state, counting_group)
    return PhaseEstimate(int(np.argmax(p)), len(tuple(counting_group)), p)


def sinc_distribution(theta: float, n: int) -> np.ndarray:
    """Closed-form QPE outcome distribution ``|sin(pi 2**n d) / (2**n sin(pi d))|**2`` with ``d = theta - j/2**n``."""
    M = 1 << n
    d = theta - np.arange(M) / M
    num = np.sin(np.pi * M * d)
    den = M * np.sin(np.pi * d)
    out = np.ones(M)
    live = np.abs(den) > 1e-12
    out[live] = (num[live] / den[live]) ** 2
    return out


def phase_qpe_circuit(theta: float, n: int) -> Circuit:
    """QPE of the single-qubit phase gate with eigenstate ``|1>``: ``n`` counting qubits then the work qubit."""
    work = n
    prep = prepare_basis_eigenstate((work,), 1).resized(n + 1)
    return prep + qpe_circuit(tuple(range(n)), (work,), PhasePowerSupplier(work, theta), n + 1)


def run_phase_qpe(theta: float, n: int) -> PhaseEstimate:
    """Run :func:`phase_qpe_circuit` and read the counting register."""
    state = run(phase_qpe_circuit(theta, n), new_state(n + 1))
    return estimate_phase(state, tuple(range(n)))
