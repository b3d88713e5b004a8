"""Carry-based reversible arithmetic: MAJ/UMA ripple adder and what builds on it.

The adder needs one incoming-carry ancilla. A chain of MAJ blocks pushes the
carry up through the addend qubits, an optional CNOT copies the final carry
out, and the mirrored UMA chain writes the sum bits while restoring the
addend and the incoming-carry ancilla.

Signed values use a sign bit on top of a magnitude (``+5`` and ``-5`` differ
only in the sign). Before adding, a register with its sign set is converted
to two's complement by :func:`complement_circuit`. That circuit is its own
inverse, so applying it again afterwards converts the sum back.
Negative zero is not a valid signed input: its two's-complement image is
``-2**n`` rather than 0. A negative-zero output reads as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .comparator import append_compare
from .errors import CapacityError, DomainError, StructuralError
from .layout import RegisterLayout, check_disjoint, read_bits
from .qft_const_arith import append_const_add
from .simulator import Circuit, CircuitBuilder, inverse


@dataclass(frozen=True)
class SignedRegisterSpec:
    """Qubits of a signed (or plain) fixed-point register.

    Attributes
    ----------
    value : tuple of int
        Magnitude qubits, least significant first.
    sign : int or None
        Sign qubit, above every value qubit. ``None`` for unsigned registers.
    point : int or None
        Number of value bits below the binary point.
    """

    value: tuple[int, ...]
    sign: int | None = None
    point: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "value", tuple(self.value))
        if not self.value:
            raise StructuralError("register needs at least one value qubit")
        if self.sign is not None and self.sign <= max(self.value):
            raise StructuralError("sign qubit must have the highest index of the register")
        check_disjoint(self.value, () if self.sign is None else (self.sign,))
        if self.point is not None and not 0 <= self.point < len(self.value):
            raise StructuralError("fixed-point position must be below the register width")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.value + (() if self.sign is None else (self.sign,))

    @property
    def width(self) -> int:
        return len(self.qubits)

    def encode(self, number: int) -> int:
        """Basis index of ``number`` (sign-magnitude, ``point`` ignored)."""
        n = len(self.value)
        mag = abs(number)
        if mag >= 1 << n or (number < 0 and self.sign is None):
            raise DomainError(f"{number} does not fit this register")
        index = sum(1 << q for i, q in enumerate(self.value) if mag >> i & 1)
        if number < 0:
            index |= 1 << self.sign
        return index

    def decode(self, index: int) -> int:
        mag = read_bits(int(index), self.value)
        if self.sign is not None and (int(index) >> self.sign) & 1:
            return -mag
        return mag

    def to_float(self, index: int) -> float:
        return self.decode(index) / (1 << (self.point or 0))


def _signed(reg) -> SignedRegisterSpec:
    if isinstance(reg, SignedRegisterSpec):
        return reg
    reg = tuple(reg)
    return SignedRegisterSpec(reg[:-1], reg[-1])


def _distinct(*qubits: int) -> None:
    if len(set(qubits)) != len(qubits):
        raise StructuralError("MAJ/UMA need three distinct qubits")


# ------------------------------------------------------------------- MAJ / UMA


def append_maj(b: CircuitBuilder, c: int, bq: int, a: int) -> None:
    b.x(bq, (a,))
    b.x(c, (a,))
    b.x(a, (c, bq))


def append_uma(b: CircuitBuilder, c: int, bq: int, a: int) -> None:
    b.x(a, (c, bq))
    b.x(c, (a,))
    b.x(bq, (c,))


def maj_circuit(c_i: int, b_i: int, a_i: int, qubit_count: int | None = None) -> Circuit:
    """``|c, b, a> -> |a^c, a^b, maj(a, b, c)>``: 2 CNOT + 1 Toffoli."""
    _distinct(c_i, b_i, a_i)
    b = CircuitBuilder(qubit_count)
    append_maj(b, c_i, b_i, a_i)
    return b.build()


def uma_circuit(c_i: int, b_i: int, a_i: int, qubit_count: int | None = None) -> Circuit:
    """Undo MAJ on ``c`` and ``a`` and leave the sum bit ``a^b^c`` on ``b``."""
    _distinct(c_i, b_i, a_i)
    b = CircuitBuilder(qubit_count)
    append_uma(b, c_i, b_i, a_i)
    return b.build()


# ------------------------------------------------------------------- adder


def append_ripple_add(
    b: CircuitBuilder,
    target: Sequence[int],
    addend: Sequence[int],
    c0: int,
    carry: int | None = None,
    controls: Sequence[int] = (),
) -> None:
    """``target += addend`` (mod ``2**n``); ``carry ^= `` bit ``n`` of the sum if given.

    With ``controls`` every gate is controlled, so the block is the identity
    when any control is 0.
    """
    n = len(target)
    sub = CircuitBuilder()
    chain = (c0,) + tuple(addend)
    for i in range(n):
        append_maj(sub, chain[i], target[i], addend[i])
    if carry is not None:
        sub.x(carry, (addend[n - 1],))
    for i in reversed(range(n)):
        append_uma(sub, chain[i], target[i], addend[i])
    b.extend(sub.build(), controls)


def _check_adder(a_group, b_group, aux) -> None:
    if len(a_group) != len(b_group):
        raise StructuralError(f"operand widths differ ({len(a_group)} vs {len(b_group)})")
    if not a_group:
        raise StructuralError("operands must be nonempty")
    check_disjoint(a_group, b_group, aux)


def adder(
    a_group: Sequence[int],
    b_group: Sequence[int],
    aux_carry: Sequence[int],
    keep_carry: bool = False,
    qubit_count: int | None = None,
) -> Circuit:
    """Ripple-carry adder ``a <- a + b``; ``b`` and the first aux qubit restored.

    Parameters
    ----------
    a_group, b_group : sequence of int
        Equal-width operands, LSB first. The sum replaces ``a``.
    aux_carry : sequence of int
        ``[c0]`` for the wrapping adder, ``[c0, carry]`` with ``keep_carry``.
        ``carry`` is XORed with bit ``n`` of the sum.
    keep_carry : bool
        Whether to output the carry.
    """
    a_group, b_group, aux_carry = tuple(a_group), tuple(b_group), tuple(aux_carry)
    need = 2 if keep_carry else 1
    if len(aux_carry) != need:
        raise CapacityError(f"adder needs exactly {need} aux qubit(s), got {len(aux_carry)}")
    _check_adder(a_group, b_group, aux_carry)
    b = CircuitBuilder(qubit_count)
    append_ripple_add(b, a_group, b_group, aux_carry[0], aux_carry[1] if keep_carry else None)
    return b.build()


def subtractor(
    a_group: Sequence[int],
    b_group: Sequence[int],
    aux_carry: Sequence[int],
    keep_carry: bool = False,
    qubit_count: int | None = None,
) -> Circuit:
    """``a <- a - b`` (mod ``2**n``); with ``keep_carry`` the carry qubit gets ``[a < b]``."""
    return inverse(adder(a_group, b_group, aux_carry, keep_carry, qubit_count))


# ------------------------------------------------------------------- signed


def append_complement(b: CircuitBuilder, reg: SignedRegisterSpec, aux: Sequence[int]) -> None:
    n = len(reg.value)
    one, c0 = tuple(aux[:n]), aux[n]
    for q in reg.value:
        b.x(q, (reg.sign,))
    b.x(one[0], (reg.sign,))
    append_ripple_add(b, reg.value, one, c0)
    b.x(one[0], (reg.sign,))


def complement_circuit(reg_with_sign, control_aux: Sequence[int], qubit_count: int | None = None) -> Circuit:
    """Two's complement of the value bits when the sign bit is 1.

    Bits are flipped under control of the sign, then 1 is added by loading
    the sign into a clean ``n``-qubit aux register and running the ripple
    adder. Needs ``n + 1`` clean aux qubits, all returned to 0. Negating
    twice is the identity, so the circuit is an involution.
    """
    if not isinstance(reg_with_sign, SignedRegisterSpec) and len(tuple(reg_with_sign)) < 2:
        raise StructuralError("complement needs a value qubit and a sign qubit")
    reg = _signed(reg_with_sign)
    if reg.sign is None:
        raise StructuralError("complement needs a sign qubit")
    control_aux = tuple(control_aux)
    n = len(reg.value)
    if len(control_aux) < n + 1:
        raise CapacityError(f"complement needs {n + 1} aux qubits, got {len(control_aux)}")
    check_disjoint(reg.qubits, control_aux)
    b = CircuitBuilder(qubit_count)
    append_complement(b, reg, control_aux)
    return b.build()


def _signed_pair(a, b, aux):
    ra, rb = _signed(a), _signed(b)
    if ra.sign is None or rb.sign is None:
        raise StructuralError("signed operands need a sign qubit")
    if len(ra.value) != len(rb.value):
        raise StructuralError("signed operands must share a layout")
    aux = tuple(aux)
    n = len(ra.value)
    if len(aux) < n + 1:
        raise CapacityError(f"signed add/sub needs at least {n + 1} aux qubits, got {len(aux)}")
    check_disjoint(ra.qubits, rb.qubits, aux)
    return ra, rb, aux


def _signed_op(a, b, aux, subtract: bool, qubit_count: int | None) -> Circuit:
    ra, rb, aux = _signed_pair(a, b, aux)
    core = CircuitBuilder()
    append_ripple_add(core, ra.qubits, rb.qubits, aux[0])
    core_c = core.build()
    bld = CircuitBuilder(qubit_count)
    append_complement(bld, ra, aux)
    append_complement(bld, rb, aux)
    bld.extend(inverse(core_c) if subtract else core_c)
    append_complement(bld, rb, aux)
    append_complement(bld, ra, aux)
    return bld.build()


def signed_add(a, b, aux: Sequence[int], qubit_count: int | None = None) -> Circuit:
    """``a <- a + b`` on sign-magnitude registers (value qubits then sign qubit).

    Both operands go to two's complement, are added over all ``n + 1`` bits
    (wrapping on overflow), and come back. ``aux`` needs ``n + 1`` clean
    qubits; wider aux registers are accepted and left untouched.
    """
    return _signed_op(a, b, aux, False, qubit_count)


def signed_sub(a, b, aux: Sequence[int], qubit_count: int | None = None) -> Circuit:
    """``a <- a - b`` on sign-magnitude registers; a negative difference sets the sign bit."""
    return _signed_op(a, b, aux, True, qubit_count)


# ------------------------------------------------------------------- multiplier


def append_shift_add_multiply(
    b: CircuitBuilder, a_value: Sequence[int], b_value: Sequence[int], result: Sequence[int], c0: int
) -> None:
    n = len(b_value)
    for i, ai in enumerate(a_value):
        append_ripple_add(b, result[i : i + n], b_value, c0, result[i + n], (ai,))


def multiplier(
    a,
    b,
    aux: Sequence[int],
    result: Sequence[int],
    signed: bool = False,
    qubit_count: int | None = None,
) -> Circuit:
    """``result ^= a * b`` by shift-and-add; ``a``, ``b`` and ``aux`` unchanged.

    Round ``i`` adds ``b`` into ``result[i : i+n]`` under control of
    ``a_i``, with the carry landing in ``result[i+n]``. Signed operands
    multiply their magnitudes into the low ``2n`` result qubits and XOR the
    two sign bits into the top one.

    Widths: unsigned ``a``, ``b`` have ``n`` qubits and ``result`` ``2n``;
    signed operands have ``n + 1`` (sign last) and ``result`` ``2n + 1``.
    ``aux`` needs at least one clean qubit.
    """
    result, aux = tuple(result), tuple(aux)
    if signed:
        ra, rb = _signed(a), _signed(b)
        if ra.sign is None or rb.sign is None:
            raise StructuralError("signed multiplier needs sign qubits")
        av, bv = ra.value, rb.value
        need_result = 2 * len(av) + 1
    else:
        av, bv = tuple(a), tuple(b)
        need_result = 2 * len(av)
    if len(av) != len(bv):
        raise StructuralError("multiplier operands must have equal width")
    if len(result) != need_result:
        raise CapacityError(f"result register must have {need_result} qubits, got {len(result)}")
    if not aux:
        raise CapacityError("multiplier needs at least one aux qubit")
    if signed:
        check_disjoint(ra.qubits, rb.qubits, result, aux)
    else:
        check_disjoint(av, bv, result, aux)
    bld = CircuitBuilder(qubit_count)
    append_shift_add_multiply(bld, av, bv, result[: 2 * len(av)], aux[0])
    if signed:
        bld.x(result[-1], (ra.sign,))
        bld.x(result[-1], (rb.sign,))
    return bld.build()


# ------------------------------------------------------------------- divider


def divider(
    a: Sequence[int],
    b: Sequence[int],
    quotient: Sequence[int],
    aux: Sequence[int],
    qubit_count: int | None = None,
) -> Circuit:
    """Restoring division: ``quotient <- a // b``, ``a <- a % b``, ``b`` unchanged.

    The circuit is static: ``2**n`` rounds, each of which

    1. subtracts ``b`` from ``a`` and records the borrow ``s = [a < b]``,
    2. adds ``b`` back when ``s`` is set,
    3. increments the quotient when ``s`` is clear,
    4. clears ``s``: after round ``k`` it equals ``[quotient < k + 1]``,
       which a Fourier comparator recomputes from the quotient alone.

    ``aux`` needs two clean qubits (``s`` and the adder's incoming carry).
    The quotient register starts at 0. With ``b = 0`` every round subtracts
    nothing and the quotient fills to ``2**n - 1``; the classical front end
    rejects that input.
    """
    a, b, quotient, aux = tuple(a), tuple(b), tuple(quotient), tuple(aux)
    n = len(a)
    if len(b) != n or len(quotient) != n:
        raise StructuralError("dividend, divisor and quotient must share a width")
    if len(aux) < 2:
        raise CapacityError(f"divider needs at least 2 aux qubits, got {len(aux)}")
    check_disjoint(a, b, quotient, aux)
    s, c0 = aux[0], aux[1]
    sub = CircuitBuilder()
    append_ripple_add(sub, a, b, c0, s)
    sub_c = inverse(sub.build())
    bld = CircuitBuilder(qubit_count)
    for k in range(1 << n):
        bld.extend(sub_c)
        append_ripple_add(bld, a, b, c0, None, (s,))
        bld.x(s)
        append_const_add(bld, quotient, 1, (s,))
        bld.x(s)
        if k + 1 < 1 << n:
            append_compare(bld, quotient, k + 1, s, "lt")
        else:
            bld.x(s)  # quotient < 2**n always holds
    return bld.build()


# ------------------------------------------------------------------- instances


def adder_instance(n: int, keep_carry: bool = False) -> tuple[Circuit, RegisterLayout]:
    spec = [("a", n), ("b", n), ("c0", 1, "aux")]
    if keep_carry:
        spec.append(("carry", 1, "carry"))
    lay = RegisterLayout(spec)
    aux = lay["c0"] + (lay["carry"] if keep_carry else ())
    return adder(lay["a"], lay["b"], aux, keep_carry, lay.num_qubits), lay


def signed_instance(n: int, subtract: bool = False) -> tuple[Circuit, RegisterLayout]:
    lay = RegisterLayout([("a", n + 1), ("b", n + 1), ("aux", n + 1, "aux")])
    op = signed_sub if subtract else signed_add
    return op(lay["a"], lay["b"], lay["aux"], lay.num_qubits), lay


def multiplier_instance(n: int, signed: bool = False) -> tuple[Circuit, RegisterLayout]:
    w = n + 1 if signed else n
    lay = RegisterLayout(
        [("a", w), ("b", w), ("result", 2 * n + (1 if signed else 0)), ("aux", 1, "aux")]
    )
    return multiplier(lay["a"], lay["b"], lay["aux"], lay["result"], signed, lay.num_qubits), lay


def divider_instance(n: int) -> tuple[Circuit, RegisterLayout]:
    lay = RegisterLayout([("a", n), ("b", n), ("quotient", n), ("aux", 2, "aux")])
    return divider(lay["a"], lay["b"], lay["quotient"], lay["aux"], lay.num_qubits), lay


def arithmetic_chain(
    dividend: int = 4, divisor: int = 1, addend: int = 1, subtrahend: int = 3, factor: int = 5, width: int = 3
) -> tuple[Circuit, RegisterLayout]:
    """``((dividend / divisor) + addend - subtrahend) * factor`` as one circuit.

    Divide, then add the divisor register (reloaded with ``addend``) to the
    quotient, load ``subtrahend`` into the emptied dividend register and
    subtract it, then multiply by ``factor`` held in the same register.
    Integer division; intermediate values wrap modulo ``2**width`` and the
    product lands in ``result``.
    """
    if divisor == 0:
        raise DomainError("division by zero")
    for v in (dividend, divisor, addend, subtrahend, factor):
        if not 0 <= v < 1 << width:
            raise DomainError(f"operand {v} does not fit {width} bits")
    lay = RegisterLayout(
        [("a", width), ("b", width), ("q", width), ("result", 2 * width), ("aux", 2, "aux")]
    )
    A, B, Q, R, aux = lay["a"], lay["b"], lay["q"], lay["result"], lay["aux"]
    bld = CircuitBuilder(lay.num_qubits)

    def load(reg, old, new):
        for i, q in enumerate(reg):
            if (old ^ new) >> i & 1:
                bld.x(q)

    load(A, 0, dividend)
    load(B, 0, divisor)
    bld.extend(divider(A, B, Q, aux))
    rem = dividend % divisor
    load(B, divisor, addend)
    append_ripple_add(bld, Q, B, aux[0])
    load(A, rem, subtrahend)
    bld.extend(subtractor(Q, A, aux[:1]))
    load(A, subtrahend, factor)
    append_shift_add_multiply(bld, Q, A, R, aux[0])
    return bld.build(), lay
