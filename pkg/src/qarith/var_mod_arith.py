"""Modular arithmetic with both operands held in quantum registers.

Every modular step follows the same reduce-and-uncompute pattern: form the
raw sum in an ``(n+1)``-qubit register whose top qubit is an ancilla,
subtract ``N``, add it back where that borrowed, then clear the ancilla using
a second comparison that is constant on every valid branch.

Doubling (MDbl) is a SWAP-chain left shift followed by the same reduction.
The ancilla is cleared from the parity of the result: ``2x`` is even and
``2x - N`` is odd when ``N`` is odd, so the result LSB tells which branch
was taken. This is why odd moduli are required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, StructuralError
from .layout import RegisterLayout, check_disjoint
from .qft import append_iqft, append_qft
from .qft_const_arith import append_const_add
from .ripple_arith import append_ripple_add
from .simulator import Circuit, CircuitBuilder, inverse


def _check_modulus(width: int, modulus: int, odd: bool = False) -> None:
    if modulus < 2 or modulus > 1 << width:
        raise DomainError(f"modulus {modulus} does not fit a {width}-qubit register")
    if odd and modulus % 2 == 0:
        raise DomainError(f"odd modulus required, got {modulus}")


@dataclass(frozen=True)
class VarModLayout:
    """Register layout of one variable modular block, with its qubit budget."""

    layout: RegisterLayout
    budget: int

    @property
    def qubit_count(self) -> int:
        return self.layout.num_qubits

    @classmethod
    def for_op(cls, op: str, n: int) -> "VarModLayout":
        specs = {
            "add": ([("x", n), ("y", n), ("aux0", 1, "aux"), ("aux1", 1, "carry")], 2 * n + 2),
            "double": ([("x", n), ("aux", 1, "aux")], n + 1),
            "mul": ([("x", n), ("y", n), ("result", n), ("aux", 2, "aux")], 3 * n + 2),
            "square": ([("x", n), ("result", n), ("aux", 1, "aux"), ("flag", 1, "flag")], 2 * n + 2),
        }
        if op not in specs:
            raise StructuralError(f"unknown variable modular op {op!r}")
        spec, budget = specs[op]
        return cls(RegisterLayout(spec), budget)


# ------------------------------------------------------------------- modular add


def append_var_mod_add(
    b: CircuitBuilder,
    x: Sequence[int],
    y: Sequence[int],
    aux0: int,
    aux1: int,
    modulus: int,
    controls: Sequence[int] = (),
) -> None:
    sub = CircuitBuilder()
    ext = tuple(x) + (aux1,)
    append_ripple_add(sub, x, y, aux0, aux1)
    append_const_add(sub, ext, -modulus)
    append_const_add(sub, x, modulus, (aux1,))
    undo = CircuitBuilder()
    append_ripple_add(undo, x, y, aux0, aux1)
    sub.extend(inverse(undo.build()))
    sub.x(aux1)
    append_ripple_add(sub, x, y, aux0)
    b.extend(sub.build(), controls)


def var_mod_add(
    x: Sequence[int],
    y: Sequence[int],
    aux0: int,
    aux1: int,
    modulus: int,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|y>|0>|0> -> |(x + y) mod N>|y>|0>|0>`` for ``x, y < N``.

    1. ``(x, aux1) <- x + y`` with the ripple adder (``aux0`` is its carry-in).
    2. Subtract ``N`` from ``(x, aux1)``; add it back to ``x`` when ``aux1`` borrowed.
    3. Subtract ``y`` from ``(x, aux1)``. Whichever branch was taken, this
       flips ``aux1`` to 1, and an ``X`` clears it.
    4. Add ``y`` to ``x`` again.

    Total ``2n + 2`` qubits.
    """
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise StructuralError("operands must share a width")
    check_disjoint(x, y, (aux0,), (aux1,))
    _check_modulus(len(x), modulus)
    b = CircuitBuilder(qubit_count)
    append_var_mod_add(b, x, y, aux0, aux1, modulus)
    return b.build()


# ------------------------------------------------------------------- doubling


def append_left_shift(b: CircuitBuilder, x: Sequence[int], aux: int) -> None:
    chain = tuple(x) + (aux,)
    for i in range(len(x), 0, -1):
        b.swap(chain[i], chain[i - 1])


def left_shift_double(x: Sequence[int], aux: int, qubit_count: int | None = None) -> Circuit:
    """Double ``x`` into the ``n + 1`` qubits ``(x, aux)`` using ``n`` SWAPs (``aux`` starts at 0)."""
    x = tuple(x)
    check_disjoint(x, (aux,))
    b = CircuitBuilder(qubit_count)
    append_left_shift(b, x, aux)
    return b.build()


def append_mod_double(
    b: CircuitBuilder, x: Sequence[int], aux: int, modulus: int, controls: Sequence[int] = ()
) -> None:
    sub = CircuitBuilder()
    ext = tuple(x) + (aux,)
    append_left_shift(sub, x, aux)
    append_const_add(sub, ext, -modulus)
    append_const_add(sub, x, modulus, (aux,))
    # aux = [2x < N] = NOT (LSB of the result)
    sub.x(x[0])
    sub.x(aux, (x[0],))
    sub.x(x[0])
    b.extend(sub.build(), controls)


def mod_double(x: Sequence[int], aux: int, modulus: int, qubit_count: int | None = None) -> Circuit:
    """MDbl: ``|x>|0> -> |2x mod N>|0>`` on ``n + 1`` qubits, ``N`` odd, ``x < N``."""
    x = tuple(x)
    check_disjoint(x, (aux,))
    _check_modulus(len(x), modulus, odd=True)
    b = CircuitBuilder(qubit_count)
    append_mod_double(b, x, aux, modulus)
    return b.build()


# ------------------------------------------------------------------- multiply


def var_mod_mul(
    x: Sequence[int],
    y: Sequence[int],
    result: Sequence[int],
    aux: Sequence[int],
    modulus: int,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|y>|0> -> |x>|y>|x*y mod N>`` on ``3n + 2`` qubits, ``N`` odd.

    Horner order, high bit first: ``result <- 2*result + x_i*y (mod N)``,
    i.e. an ``x_i``-controlled modular add of ``y`` followed by MDbl for
    every bit except the last.
    """
    x, y, result, aux = tuple(x), tuple(y), tuple(result), tuple(aux)
    n = len(x)
    if len(y) != n or len(result) != n:
        raise StructuralError("x, y and result must share a width")
    if len(aux) != 2:
        raise StructuralError("variable modular multiplier takes exactly 2 aux qubits")
    check_disjoint(x, y, result, aux)
    _check_modulus(n, modulus, odd=True)
    b = CircuitBuilder(qubit_count)
    for i in reversed(range(n)):
        append_var_mod_add(b, result, y, aux[0], aux[1], modulus, (x[i],))
        if i:
            append_mod_double(b, result, aux[1], modulus)
    return b.build()


# ------------------------------------------------------------------- square


def _append_fourier_register_add(
    b: CircuitBuilder, target: Sequence[int], source: Sequence[int], sign: int, controls: Sequence[int]
) -> None:
    """``target += sign * source`` (mod ``2**len(target)``), no ancilla needed."""
    append_qft(b, target, swaps=False)
    for k, t in enumerate(target):
        for j, s in enumerate(source[: k + 1]):
            b.phase(t, sign * 2 * math.pi / (1 << (k + 1 - j)), (s,) + tuple(controls))
    append_iqft(b, target, swaps=False)


def append_fourier_mod_add(
    b: CircuitBuilder,
    target: Sequence[int],
    source: Sequence[int],
    aux: int,
    modulus: int,
    controls: Sequence[int] = (),
) -> None:
    """``target <- (target + source) mod N`` under ``controls``, one clean ancilla.

    Same four steps as :func:`var_mod_add` with the ripple adders replaced by
    Fourier-basis register adders, which need no carry-in qubit.
    """
    ext = tuple(target) + (aux,)
    _append_fourier_register_add(b, ext, source, +1, controls)
    append_const_add(b, ext, -modulus)
    append_const_add(b, target, modulus, (aux,))
    _append_fourier_register_add(b, ext, source, -1, controls)
    b.x(aux)
    _append_fourier_register_add(b, target, source, +1, controls)


def var_mod_square(
    x: Sequence[int],
    result: Sequence[int],
    aux: Sequence[int] | int,
    flag_aux: int,
    modulus: int,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|0> -> |x>|x**2 mod N>`` on ``2n + 2`` qubits, ``N`` odd.

    Horner order as in :func:`var_mod_mul` with ``y = x``. Bit ``x_i`` cannot
    control an adder that reads ``x``, so it is first copied into
    ``flag_aux`` with a CNOT, which is undone right after the add. The
    modular add works in the Fourier basis so ``x`` is never modified and
    a single ``aux`` qubit suffices.
    """
    x, result = tuple(x), tuple(result)
    aux = (aux,) if isinstance(aux, int) else tuple(aux)
    n = len(x)
    if len(result) != n:
        raise StructuralError("x and result must share a width")
    if len(aux) != 1:
        raise StructuralError("variable modular square takes exactly 1 aux qubit")
    check_disjoint(x, result, aux, (flag_aux,))
    _check_modulus(n, modulus, odd=True)
    b = CircuitBuilder(qubit_count)
    for i in reversed(range(n)):
        b.x(flag_aux, (x[i],))
        append_fourier_mod_add(b, result, x, aux[0], modulus, (flag_aux,))
        b.x(flag_aux, (x[i],))
        if i:
            append_mod_double(b, result, aux[0], modulus)
    return b.build()


# ------------------------------------------------------------------- instances


def instance(op: str, modulus: int, n: int | None = None) -> tuple[Circuit, RegisterLayout]:
    """Standalone circuit for ``op`` in ``add, double, mul, square`` over ``n = ceil(log2 N)`` qubits."""
    n = n or max(1, (modulus - 1).bit_length())
    vl = VarModLayout.for_op(op, n)
    lay = vl.layout
    q = lay.num_qubits
    if op == "add":
        c = var_mod_add(lay["x"], lay["y"], lay["aux0"][0], lay["aux1"][0], modulus, q)
    elif op == "double":
        c = mod_double(lay["x"], lay["aux"][0], modulus, q)
    elif op == "mul":
        c = var_mod_mul(lay["x"], lay["y"], lay["result"], lay["aux"], modulus, q)
    else:
        c = var_mod_square(lay["x"], lay["result"], lay["aux"], lay["flag"][0], modulus, q)
    return c, lay
