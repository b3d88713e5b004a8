"""QFT comparators and the one-ancilla modular adders built from them.

The integer comparator treats ``(x, flag)`` as an ``(n+1)``-qubit register:
subtracting ``a`` there leaves ``flag = [x < a]`` as the borrow, and adding
``a`` back on the low ``n`` qubits alone restores ``x`` because the Fourier
addition wraps modulo ``2**n``. Four QFT blocks, ``2*n**2`` controlled
rotations, no other multi-qubit gates.

Modular reduction and addition reuse the same first stage but only undo it
(``+M`` on the low qubits) where the borrow fired. They need the modulus to
satisfy ``2**(n-1) <= M < 2**n``.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import DomainError, StructuralError
from .layout import RegisterLayout, check_disjoint
from .qft import append_iqft, append_qft
from .qft_const_arith import append_const_add
from .simulator import Circuit, CircuitBuilder

RELATIONS = ("lt", "le", "ge", "gt")


def _check_constant(a: int, n: int) -> None:
    if not 0 <= a < (1 << n):
        raise DomainError(f"constant {a} outside [0, {1 << n})")


def _check_modulus(M: int, n: int) -> None:
    if not (1 << (n - 1)) <= M < (1 << n):
        raise DomainError(
            f"modulus {M} must lie in [{1 << (n - 1)}, {1 << n}) for a {n}-qubit register"
        )


def append_int_compare_lt(b: CircuitBuilder, x_group: Sequence[int], a: int, flag: int) -> None:
    """``flag ^= [x < a]``, ``x`` restored."""
    append_const_add(b, tuple(x_group) + (flag,), -a)
    append_const_add(b, x_group, a)


def int_compare_lt(x_group: Sequence[int], a: int, flag: int, qubit_count: int | None = None) -> Circuit:
    """``|x>|0> -> |x>|x < a>`` with a single ancilla, for ``0 <= a < 2**n``."""
    x_group = tuple(x_group)
    check_disjoint(x_group, (flag,))
    _check_constant(a, len(x_group))
    b = CircuitBuilder(qubit_count)
    append_int_compare_lt(b, x_group, a, flag)
    return b.build()


def append_compare(b: CircuitBuilder, x_group: Sequence[int], a: int, flag: int, relation: str) -> None:
    n = len(x_group)
    if relation not in RELATIONS:
        raise DomainError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    threshold = a + 1 if relation in ("le", "gt") else a
    if threshold == 1 << n:
        b.x(flag)  # x <= 2**n - 1 always holds
    else:
        append_int_compare_lt(b, x_group, threshold, flag)
    if relation in ("ge", "gt"):
        b.x(flag)


def compare_variants(
    x_group: Sequence[int], a: int, flag: int, relation: str = "lt", qubit_count: int | None = None
) -> Circuit:
    """``flag ^= x REL a`` for ``REL`` in ``lt, le, ge, gt``.

    ``le`` compares against ``a + 1``; ``ge``/``gt`` negate ``lt``/``le``
    with a trailing ``X``. ``le`` with ``a = 2**n - 1`` is constant true and
    compiles to a bare ``X``.
    """
    x_group = tuple(x_group)
    check_disjoint(x_group, (flag,))
    _check_constant(a, len(x_group))
    b = CircuitBuilder(qubit_count or 1 + max(x_group + (flag,)))
    append_compare(b, x_group, a, flag, relation)
    return b.build()


def _append_register_phase_add(
    b: CircuitBuilder, target: Sequence[int], source: Sequence[int], sign: int
) -> None:
    """Add ``sign * source`` to a no-swap Fourier register ``target`` using rotations controlled by ``source``."""
    for k, t in enumerate(target):
        for j, s in enumerate(source):
            if j > k:
                break  # 2*pi multiples
            b.cphase(s, t, sign * 2 * math.pi / (1 << (k + 1 - j)))


def states_compare(
    x1_group: Sequence[int], x2_group: Sequence[int], flag: int, qubit_count: int | None = None
) -> Circuit:
    """``|x1>|x2>|0> -> |x1>|x2>|x2 < x1>``; both registers left untouched."""
    x1_group, x2_group = tuple(x1_group), tuple(x2_group)
    if len(x1_group) != len(x2_group):
        raise StructuralError("states comparator needs equal register widths")
    check_disjoint(x1_group, x2_group, (flag,))
    ext = x2_group + (flag,)
    b = CircuitBuilder(qubit_count)
    append_qft(b, ext, swaps=False)
    _append_register_phase_add(b, ext, x1_group, -1)
    append_iqft(b, ext, swaps=False)
    append_qft(b, x2_group, swaps=False)
    _append_register_phase_add(b, x2_group, x1_group, +1)
    append_iqft(b, x2_group, swaps=False)
    return b.build()


def append_mod_reduce(b: CircuitBuilder, x_group: Sequence[int], flag: int, M: int) -> None:
    append_const_add(b, tuple(x_group) + (flag,), -M)
    append_const_add(b, x_group, M, (flag,))


def mod_reduce(x_group: Sequence[int], flag: int, M: int, qubit_count: int | None = None) -> Circuit:
    """``|x>|0> -> |x mod M>|x < M>``.

    The flag cannot be cleared afterwards: ``x`` and ``x - M`` land on the
    same residue, and only the flag tells them apart.
    """
    x_group = tuple(x_group)
    check_disjoint(x_group, (flag,))
    _check_modulus(M, len(x_group))
    b = CircuitBuilder(qubit_count)
    append_mod_reduce(b, x_group, flag, M)
    return b.build()


def mod_add_const_restricted(
    x_group: Sequence[int],
    a: int,
    M: int,
    flag: int,
    full_space: bool = False,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|0> -> |(x + a) mod M>|x + a < M>``, flag not reusable.

    Correct when ``x < M``, or for every ``x`` in the register when
    ``a <= 2*M - 2**n``. ``full_space=True`` promises the latter and checks it.
    """
    x_group = tuple(x_group)
    n = len(x_group)
    check_disjoint(x_group, (flag,))
    _check_modulus(M, n)
    if not 0 <= a < M:
        raise DomainError(f"constant {a} outside [0, {M})")
    if full_space and a > 2 * M - (1 << n):
        raise DomainError(
            f"a = {a} exceeds 2M - 2**n = {2 * M - (1 << n)}; inputs x >= M would wrap "
            "incorrectly. Restrict inputs to x < M or use the full-space adder."
        )
    b = CircuitBuilder(qubit_count)
    append_const_add(b, x_group + (flag,), a - M)
    append_const_add(b, x_group, M, (flag,))
    return b.build()


def append_mod_add_const_clean(b: CircuitBuilder, x_group: Sequence[int], a: int, M: int, ancilla: int) -> None:
    ext = tuple(x_group) + (ancilla,)
    append_const_add(b, ext, a - M)
    append_const_add(b, x_group, M, (ancilla,))
    append_const_add(b, ext, -a)
    b.x(ancilla)
    append_const_add(b, x_group, a)


def mod_add_const_clean(
    x_group: Sequence[int], a: int, M: int, ancilla: int, qubit_count: int | None = None
) -> Circuit:
    """``|x>|0> -> |(x + a) mod M>|0>`` for ``x, a < M``; 8 QFT blocks, one reusable ancilla.

    Subtract ``a`` by adding ``M - a``.
    """
    x_group = tuple(x_group)
    check_disjoint(x_group, (ancilla,))
    _check_modulus(M, len(x_group))
    if not 0 <= a < M:
        raise DomainError(f"constant {a} outside [0, {M})")
    b = CircuitBuilder(qubit_count)
    append_mod_add_const_clean(b, x_group, a, M, ancilla)
    return b.build()


def mod_add_const_fullspace(
    x_group: Sequence[int],
    a: int,
    M: int,
    anc_top: int,
    anc_flag: int,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|0>|0> -> |(x + a) mod M>|0>|x < M>`` for every ``x < 2**n``.

    Reduction first, then the clean adder; ``anc_flag`` keeps ``[x < M]``.
    """
    x_group = tuple(x_group)
    check_disjoint(x_group, (anc_top,), (anc_flag,))
    _check_modulus(M, len(x_group))
    if not 0 <= a < M:
        raise DomainError(f"constant {a} outside [0, {M})")
    b = CircuitBuilder(qubit_count)
    append_mod_reduce(b, x_group, anc_flag, M)
    append_mod_add_const_clean(b, x_group, a, M, anc_top)
    return b.build()


# ------------------------------------------------------------ standalone instances


def comparator_instance(n: int, a: int, relation: str = "lt") -> tuple[Circuit, RegisterLayout]:
    lay = RegisterLayout([("x", n), ("flag", 1, "flag")])
    return compare_variants(lay["x"], a, lay["flag"][0], relation, lay.num_qubits), lay


def states_comparator_instance(n: int) -> tuple[Circuit, RegisterLayout]:
    lay = RegisterLayout([("x1", n), ("x2", n), ("flag", 1, "flag")])
    return states_compare(lay["x1"], lay["x2"], lay["flag"][0], lay.num_qubits), lay


def clean_adder_instance(n: int, a: int, M: int) -> tuple[Circuit, RegisterLayout]:
    lay = RegisterLayout([("x", n), ("anc", 1, "aux")])
    return mod_add_const_clean(lay["x"], a, M, lay["anc"][0], lay.num_qubits), lay
