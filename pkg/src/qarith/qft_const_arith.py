"""Arithmetic with a classically known operand, done in the Fourier basis.

Every block here follows one pattern: QFT (no swap layer) on the target
register, one ``PHASE`` per qubit carrying the constant, inverse QFT. After
the no-swap QFT qubit ``k`` holds ``exp(2*pi*i*x / 2**(k+1))``, so adding
``a`` means rotating qubit ``k`` by ``theta_k(a) = 2*pi*(a mod 2**(k+1)) / 2**(k+1)``.

Controlled versions only put controls on those rotations: with the control
off the QFT/IQFT pair cancels. Modular blocks likewise control only their
``+a`` / ``-a`` steps; with the control off the remaining ``-N, +N`` pair is
the identity on every ``x < N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, StructuralError
from .layout import check_disjoint
from .qft import append_iqft, append_qft
from .simulator import Circuit, CircuitBuilder, inverse

TWO_PI = 2 * math.pi


# ----------------------------------------------------------------- classical helpers


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) = s*a + t*b``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def mod_inverse(a: int, modulus: int) -> int:
    g, s, _ = egcd(a % modulus, modulus)
    if g != 1:
        raise DomainError(f"{a} has no inverse modulo {modulus} (gcd {g})")
    return s % modulus


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Square-and-multiply modular power."""
    if exponent < 0:
        raise DomainError("negative exponent")
    result, base = 1 % modulus, base % modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def squaring_schedule(base: int, count: int, modulus: int) -> list[int]:
    """``[base**(2**i) mod modulus for i in range(count)]`` by repeated squaring."""
    out, cur = [], base % modulus
    for _ in range(count):
        out.append(cur)
        cur = cur * cur % modulus
    return out


def bit_length_of_modulus(modulus: int) -> int:
    """``ceil(log2(modulus))``."""
    return (modulus - 1).bit_length()


@dataclass(frozen=True)
class ModulusSpec:
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"modulus must be >= 2, got {self.N}")

    @property
    def n(self) -> int:
        return bit_length_of_modulus(self.N)

    def check_constant(self, a: int) -> None:
        if not 0 <= a < self.N:
            raise DomainError(f"constant {a} outside [0, {self.N - 1}]")


# ----------------------------------------------------------------- phase schedule


@dataclass(frozen=True)
class PhaseSchedule:
    a: int
    width: int
    angles: tuple[float, ...]


def phase_angles(a: int, n: int) -> PhaseSchedule:
    """Rotation per qubit that adds ``a`` to an ``n``-qubit no-swap Fourier register.

    ``theta_k = 2*pi * sum_{j<=k} a_j / 2**(k+1-j)`` where ``a_j`` are the bits of ``a``.
    """
    if n < 1:
        raise DomainError("width must be positive")
    if not 0 <= a < (1 << n):
        raise DomainError(f"constant {a} does not fit {n} bits")
    angles = tuple(
        TWO_PI * sum(((a >> j) & 1) / (1 << (k + 1 - j)) for j in range(k + 1))
        for k in range(n)
    )
    return PhaseSchedule(a, n, angles)


def append_phase_add(b: CircuitBuilder, qubits: Sequence[int], a: int, controls: Sequence[int] = ()) -> None:
    """Rotate a no-swap Fourier register by the constant ``a`` (taken mod ``2**width``)."""
    width = len(qubits)
    sched = phase_angles(a % (1 << width), width)
    for q, theta in zip(qubits, sched.angles):
        if theta:
            b.phase(q, theta, controls)


def append_const_add(b: CircuitBuilder, qubits: Sequence[int], a: int, controls: Sequence[int] = ()) -> None:
    """``x <- (x + a) mod 2**len(qubits)``; ``a`` may be negative."""
    append_qft(b, qubits, swaps=False)
    append_phase_add(b, qubits, a, controls)
    append_iqft(b, qubits, swaps=False)


def const_add(x_group: Sequence[int], a: int, controls: Sequence[int] = (), qubit_count: int | None = None) -> Circuit:
    """Constant adder ``|x> -> |(x + a) mod 2**w>`` on a ``w``-qubit group.

    Use one more qubit than the operands need if the carry must survive. The
    inverse circuit subtracts with wrap-around.
    """
    x_group = tuple(x_group)
    check_disjoint(x_group, tuple(controls))
    b = CircuitBuilder(qubit_count)
    append_const_add(b, x_group, a, controls)
    return b.build()


# ----------------------------------------------------------------- modular blocks


def _modulus_for(x_group: Sequence[int], modulus: int) -> None:
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2, got {modulus}")
    if modulus > (1 << len(x_group)):
        raise DomainError(f"modulus {modulus} does not fit a {len(x_group)}-qubit register")


def append_const_mod_add(
    b: CircuitBuilder,
    x_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
) -> None:
    """ADDN: ``|x>|0> -> |(x + a) mod N>|0>`` for ``x < N``.

    Steps on the extended register ``(x, aux)``: ``+a``, ``-N``, ``+N`` on
    ``x`` controlled by the borrow in ``aux``, ``-a``; at that point ``aux``
    is 1 on every branch, so an ``X`` clears it and ``+a`` on ``x`` alone
    finishes the sum.
    """
    ext = tuple(x_group) + (aux,)
    a %= modulus
    append_const_add(b, ext, a, controls)
    append_const_add(b, ext, -modulus)
    append_const_add(b, x_group, modulus, (aux,))
    append_const_add(b, ext, -a, controls)
    b.x(aux)
    append_const_add(b, x_group, a, controls)


def const_mod_add(
    x_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
    qubit_count: int | None = None,
) -> Circuit:
    x_group = tuple(x_group)
    check_disjoint(x_group, (aux,), tuple(controls))
    _modulus_for(x_group, modulus)
    if not 0 <= a < modulus:
        raise DomainError(f"constant {a} outside [0, {modulus - 1}]")
    b = CircuitBuilder(qubit_count)
    append_const_mod_add(b, x_group, a, modulus, aux, controls)
    return b.build()


def append_const_mod_addmul(
    b: CircuitBuilder,
    x_group: Sequence[int],
    b_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
) -> None:
    """AMULN: ``|x>|b> -> |x>|(b + a*x) mod N>``, one ADDN of ``2**i * a mod N`` per bit ``x_i``."""
    for i, xi in enumerate(x_group):
        c = (a << i) % modulus
        if c:
            append_const_mod_add(b, b_group, c, modulus, aux, tuple(controls) + (xi,))


def const_mod_addmul(
    x_group: Sequence[int],
    b_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
    qubit_count: int | None = None,
) -> Circuit:
    x_group, b_group = tuple(x_group), tuple(b_group)
    check_disjoint(x_group, b_group, (aux,), tuple(controls))
    _modulus_for(b_group, modulus)
    if not 0 <= a < modulus:
        raise DomainError(f"constant {a} outside [0, {modulus - 1}]")
    bld = CircuitBuilder(qubit_count)
    append_const_mod_addmul(bld, x_group, b_group, a, modulus, aux, controls)
    return bld.build()


def append_const_mod_mul(
    b: CircuitBuilder,
    x_group: Sequence[int],
    zero_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
) -> None:
    """ConMULTN: ``|x>|0> -> |a*x mod N>|0>`` via AMULN(a), register swap, AMULN(a^-1)^dagger."""
    a_inv = mod_inverse(a, modulus)
    append_const_mod_addmul(b, x_group, zero_group, a, modulus, aux, controls)
    for p, q in zip(x_group, zero_group):
        b.swap(p, q, controls)
    undo = CircuitBuilder()
    append_const_mod_addmul(undo, x_group, zero_group, a_inv, modulus, aux, controls)
    if len(undo):
        b.extend(inverse(undo.build()))


def const_mod_mul(
    x_group: Sequence[int],
    zero_group: Sequence[int],
    a: int,
    modulus: int,
    aux: int,
    controls: Sequence[int] = (),
    qubit_count: int | None = None,
) -> Circuit:
    x_group, zero_group = tuple(x_group), tuple(zero_group)
    if len(x_group) != len(zero_group):
        raise StructuralError("ConMULTN registers must have equal width")
    check_disjoint(x_group, zero_group, (aux,), tuple(controls))
    _modulus_for(zero_group, modulus)
    if not 0 <= a < modulus:
        raise DomainError(f"constant {a} outside [0, {modulus - 1}]")
    if math.gcd(a, modulus) != 1:
        raise DomainError(f"gcd({a}, {modulus}) != 1: no modular inverse")
    b = CircuitBuilder(qubit_count)
    append_const_mod_mul(b, x_group, zero_group, a, modulus, aux, controls)
    return b.build()


def const_mod_exp(
    x_group: Sequence[int],
    result_group: Sequence[int],
    work_group: Sequence[int],
    a: int,
    modulus: int,
    init_one: bool = True,
    qubit_count: int | None = None,
) -> Circuit:
    """``|x>|0>|0> -> |x>|a**x mod N>|0>``.

    ``work_group`` holds ``n + 1`` qubits: the ConMULTN scratch register
    followed by the ADDN ancilla. With ``init_one`` the circuit starts with
    the ``X`` that loads 1 into ``result_group``.
    """
    x_group, result_group, work_group = tuple(x_group), tuple(result_group), tuple(work_group)
    if len(work_group) != len(result_group) + 1:
        raise StructuralError("work register must be one qubit wider than the result register")
    check_disjoint(x_group, result_group, work_group)
    _modulus_for(result_group, modulus)
    if not 0 <= a < modulus or math.gcd(a, modulus) != 1:
        raise DomainError(f"base {a} must lie in [0, {modulus}) and be coprime to {modulus}")
    zero, aux = work_group[:-1], work_group[-1]
    b = CircuitBuilder(qubit_count)
    if init_one:
        b.x(result_group[0])
    for xi, c in zip(x_group, squaring_schedule(a, len(x_group), modulus)):
        if c != 1:
            append_const_mod_mul(b, result_group, zero, c, modulus, aux, (xi,))
    return b.build()
