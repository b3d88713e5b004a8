"""QFT and inverse-QFT circuits.

The ladder follows the textbook construction: the most significant qubit
gets a Hadamard followed by ``CR_k`` rotations (angle ``2*pi/2**k``)
controlled by each lower qubit, then the next qubit down, and so on. Without
the closing SWAP layer qubit ``q`` ends up holding the phase
``exp(2*pi*i*j / 2**(q+1))``; with it the register reads as the standard DFT
``|j> -> sum_k exp(2*pi*i*j*k/2**n) |k> / 2**(n/2)``.

Fourier-basis arithmetic builds on the no-swap variant (``swaps=False``)
because the per-qubit phase schedule is then independent of register order.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import StructuralError
from .layout import RegisterLayout, check_disjoint
from .simulator import Circuit, CircuitBuilder, inverse

__all__ = ["RegisterLayout", "qft_circuit", "iqft_circuit", "append_qft", "append_iqft"]


def _ladder(b: CircuitBuilder, qubits: Sequence[int], swaps: bool) -> None:
    n = len(qubits)
    for i in range(n - 1, -1, -1):
        b.h(qubits[i])
        for k in range(2, i + 2):
            b.cphase(qubits[i - k + 1], qubits[i], 2 * math.pi / (1 << k))
    if swaps:
        for i in range(n // 2):
            b.swap(qubits[i], qubits[n - 1 - i])


def append_qft(b: CircuitBuilder, qubits: Sequence[int], swaps: bool = True) -> None:
    with b.block("qft"):
        _ladder(b, qubits, swaps)


def append_iqft(b: CircuitBuilder, qubits: Sequence[int], swaps: bool = True) -> None:
    b.extend(iqft_circuit(qubits, swaps=swaps))


def qft_circuit(qubits: Sequence[int], swaps: bool = True, qubit_count: int | None = None) -> Circuit:
    """QFT on ``qubits`` (LSB first). ``swaps=False`` drops the reversal layer."""
    qubits = tuple(qubits)
    if not qubits:
        raise StructuralError("QFT needs a nonempty register")
    check_disjoint(qubits)
    b = CircuitBuilder(qubit_count)
    append_qft(b, qubits, swaps)
    return b.build()


def iqft_circuit(qubits: Sequence[int], swaps: bool = True, qubit_count: int | None = None) -> Circuit:
    """Gate-by-gate inverse of :func:`qft_circuit`."""
    return inverse(qft_circuit(qubits, swaps, qubit_count))

