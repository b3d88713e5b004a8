import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qarith.errors import DomainError, StructuralError
from qarith.layout import RegisterLayout
from qarith.qft_const_arith import (
    ModulusSpec,
    bit_length_of_modulus,
    const_add,
    const_mod_add,
    const_mod_addmul,
    const_mod_exp,
    const_mod_mul,
    egcd,
    mod_inverse,
    mod_pow,
    phase_angles,
    squaring_schedule,
)
from qarith.simulator import resources

from conftest import exhaust, grid

MODULI = [5, 7, 11, 13]


# ----------------------------------------------------------------- classical helpers


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_egcd_bezout(a, b):
    g, s, t = egcd(a, b)
    assert g == math.gcd(a, b) == s * a + t * b


@given(st.integers(2, 500), st.integers(0, 499))
def test_mod_inverse(N, a):
    a %= N
    if math.gcd(a, N) == 1:
        assert a * mod_inverse(a, N) % N == 1 % N
    else:
        with pytest.raises(DomainError):
            mod_inverse(a, N)


@given(st.integers(0, 1000), st.integers(0, 200), st.integers(1, 1000))
def test_mod_pow_matches_builtin(b, e, m):
    assert mod_pow(b, e, m) == pow(b, e, m)


def test_squaring_schedule():
    assert squaring_schedule(2, 4, 15) == [2, 4, 1, 1]


@pytest.mark.parametrize("N, n", [(5, 3), (7, 3), (8, 3), (9, 4), (15, 4), (16, 4), (35, 6)])
def test_bit_length_of_modulus(N, n):
    assert bit_length_of_modulus(N) == n == ModulusSpec(N).n


def test_modulus_spec_validation():
    with pytest.raises(DomainError):
        ModulusSpec(1)
    with pytest.raises(DomainError):
        ModulusSpec(7).check_constant(7)


def test_phase_angles_closed_form():
    """theta_k(a) = 2 pi (a mod 2**(k+1)) / 2**(k+1)."""
    for n in range(1, 6):
        for a in range(1 << n):
            sched = phase_angles(a, n)
            want = [2 * math.pi * (a % 2 ** (k + 1)) / 2 ** (k + 1) for k in range(n)]
            np.testing.assert_allclose(sched.angles, want, atol=1e-12)


def test_phase_angles_range():
    with pytest.raises(DomainError):
        phase_angles(16, 4)
    with pytest.raises(DomainError):
        phase_angles(0, 0)


# ----------------------------------------------------------------- adder


@pytest.mark.parametrize("a", range(16))
def test_const_add_width4_exhaustive(a):
    lay = RegisterLayout([("x", 4)])
    outs = exhaust(const_add(lay["x"], a, qubit_count=4), lay, grid(x=range(16)))
    assert [o["x"] for o in outs] == [(x + a) % 16 for x in range(16)]


@pytest.mark.parametrize("a", [-1, -5, 17])
def test_const_add_wraps_any_integer(a):
    lay = RegisterLayout([("x", 4)])
    outs = exhaust(const_add(lay["x"], a, qubit_count=4), lay, grid(x=range(16)))
    assert [o["x"] for o in outs] == [(x + a) % 16 for x in range(16)]


def test_const_add_controlled():
    lay = RegisterLayout([("x", 3), ("c", 1)])
    c = const_add(lay["x"], 3, controls=lay["c"], qubit_count=4)
    outs = exhaust(c, lay, grid(x=range(8), c=range(2)))
    for case, o in zip(grid(x=range(8), c=range(2)), outs):
        assert o["x"] == (case["x"] + 3 * case["c"]) % 8


def test_const_add_resources():
    rep = resources(const_add(range(4), 5))
    assert rep.qft_invocations == 2
    assert rep.cr_count == 2 * 6
    assert rep.gate_counts["PHASE"] == 4  # 5 = 0b0101: every theta_k nonzero


# ----------------------------------------------------------------- modular blocks


def _mod_layout(N, *extra):
    n = bit_length_of_modulus(N)
    return RegisterLayout([("x", n), *extra, ("aux", 1, "aux")]), n


@pytest.mark.parametrize("N", MODULI)
def test_const_mod_add_exhaustive(N):
    lay, n = _mod_layout(N)
    for a in range(N):
        c = const_mod_add(lay["x"], a, N, lay["aux"][0], qubit_count=lay.num_qubits)
        outs = exhaust(c, lay, grid(x=range(N)))
        assert [(o["x"], o["aux"]) for o in outs] == [((x + a) % N, 0) for x in range(N)]


@pytest.mark.parametrize("N", [7, 11])
def test_const_mod_add_controlled(N):
    lay, n = _mod_layout(N, ("c", 1))
    a = N - 2
    c = const_mod_add(lay["x"], a, N, lay["aux"][0], controls=lay["c"], qubit_count=lay.num_qubits)
    cases = grid(x=range(N), c=range(2))
    for case, o in zip(cases, exhaust(c, lay, cases)):
        assert o["x"] == (case["x"] + a * case["c"]) % N and o["aux"] == 0


def test_const_mod_add_rejects_out_of_range_constant():
    with pytest.raises(DomainError):
        const_mod_add(range(3), 7, 7, 3)
    with pytest.raises(DomainError):
        const_mod_add(range(3), 1, 9, 3)


@pytest.mark.parametrize("N", [5, 7])
def test_const_mod_addmul_exhaustive(N):
    n = bit_length_of_modulus(N)
    lay = RegisterLayout([("x", n), ("b", n), ("aux", 1, "aux")])
    for a in range(N):
        c = const_mod_addmul(lay["x"], lay["b"], a, N, lay["aux"][0], qubit_count=lay.num_qubits)
        cases = grid(x=range(1 << n), b=range(N))
        for case, o in zip(cases, exhaust(c, lay, cases)):
            assert o["b"] == (case["b"] + a * case["x"]) % N
            assert o["x"] == case["x"] and o["aux"] == 0


@pytest.mark.parametrize("N", MODULI)
def test_const_mod_mul_exhaustive(N):
    n = bit_length_of_modulus(N)
    lay = RegisterLayout([("x", n), ("zero", n, "aux"), ("aux", 1, "aux")])
    for a in range(1, N):
        c = const_mod_mul(lay["x"], lay["zero"], a, N, lay["aux"][0], qubit_count=lay.num_qubits)
        outs = exhaust(c, lay, grid(x=range(N)))
        assert [(o["x"], o["zero"], o["aux"]) for o in outs] == [(a * x % N, 0, 0) for x in range(N)]


def test_const_mod_mul_requires_coprime():
    with pytest.raises(DomainError):
        const_mod_mul(range(4), range(4, 8), 3, 15, 8)


def test_const_mod_mul_width_mismatch():
    with pytest.raises(StructuralError):
        const_mod_mul(range(4), range(4, 7), 2, 15, 8)


@pytest.mark.parametrize("N", MODULI)
def test_const_mod_exp_exhaustive(N):
    n = bit_length_of_modulus(N)
    w = 4
    lay = RegisterLayout([("x", w), ("result", n), ("work", n + 1, "aux")])
    for a in range(2, N):
        c = const_mod_exp(lay["x"], lay["result"], lay["work"], a, N, qubit_count=lay.num_qubits)
        outs = exhaust(c, lay, grid(x=range(1 << w)))
        assert [(o["x"], o["result"], o["work"]) for o in outs] == [(x, pow(a, x, N), 0) for x in range(1 << w)]


def test_const_mod_exp_worked_example():
    """3**x mod 7 on a 3-qubit exponent."""
    lay = RegisterLayout([("x", 3), ("result", 3), ("work", 4, "aux")])
    c = const_mod_exp(lay["x"], lay["result"], lay["work"], 3, 7, qubit_count=lay.num_qubits)
    outs = exhaust(c, lay, grid(x=range(8)))
    assert [o["result"] for o in outs] == [1, 3, 2, 6, 4, 5, 1, 3]


def test_const_mod_exp_work_width():
    with pytest.raises(StructuralError):
        const_mod_exp(range(3), range(3, 6), range(6, 9), 3, 7)


def test_const_mod_exp_non_coprime_base():
    with pytest.raises(DomainError):
        const_mod_exp(range(3), range(3, 7), range(7, 12), 3, 15)
