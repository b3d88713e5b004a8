import numpy as np
import pytest

from qarith.errors import DomainError, StructuralError
from qarith.layout import RegisterLayout
from qarith.simulator import basis_batch, norm, resources, run
from qarith.var_mod_arith import (
    VarModLayout,
    instance,
    left_shift_double,
    mod_double,
    var_mod_mul,
    var_mod_square,
)

from conftest import exhaust, grid

MODULI = [5, 7, 11, 13]


def nbits(N):
    return (N - 1).bit_length()


@pytest.mark.parametrize("N", MODULI)
def test_var_mod_add_exhaustive(N):
    circ, lay = instance("add", N)
    cases = grid(x=range(N), y=range(N))
    for c, o in zip(cases, exhaust(circ, lay, cases)):
        assert (o["x"], o["y"], o["aux0"], o["aux1"]) == ((c["x"] + c["y"]) % N, c["y"], 0, 0)


def test_var_mod_add_example():
    circ, lay = instance("add", 11)
    (o,) = exhaust(circ, lay, [dict(x=6, y=8)])
    assert o["x"] == 3


def test_var_mod_add_permutes_superposition():
    N = 11
    circ, lay = instance("add", N)
    y = 4
    psi = basis_batch(lay.num_qubits, [lay.encode(x=x, y=y) for x in range(N)]).sum(axis=1) / np.sqrt(N)
    out = run(circ, psi)
    assert abs(norm(out) - 1) < 1e-9
    expected = {lay.encode(x=(x + y) % N, y=y) for x in range(N)}
    support = set(np.flatnonzero(np.abs(out) > 1e-9))
    assert support == expected
    np.testing.assert_allclose(np.abs(out[sorted(expected)]), 1 / np.sqrt(N), atol=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_left_shift_exhaustive(n):
    lay = RegisterLayout([("x", n), ("aux", 1, "aux")])
    circ = left_shift_double(lay["x"], lay["aux"][0], lay.num_qubits)
    cases = grid(x=range(1 << n))
    for c, o in zip(cases, exhaust(circ, lay, cases)):
        assert o["x"] + (o["aux"] << n) == 2 * c["x"]
    assert resources(circ).gate_counts["SWAP"] == n == len(circ)


def test_left_shift_example():
    lay = RegisterLayout([("x", 4), ("aux", 1, "aux")])
    (o,) = exhaust(left_shift_double(lay["x"], 4, 5), lay, [dict(x=5)])
    assert (o["x"], o["aux"]) == (10, 0)


@pytest.mark.parametrize("N", MODULI)
def test_mod_double_exhaustive(N):
    circ, lay = instance("double", N)
    outs = exhaust(circ, lay, grid(x=range(N)))
    assert [(o["x"], o["aux"]) for o in outs] == [(2 * x % N, 0) for x in range(N)]


def test_mod_double_example():
    circ, lay = instance("double", 11)
    (o,) = exhaust(circ, lay, [dict(x=7)])
    assert o["x"] == 3


@pytest.mark.parametrize("N", [4, 10, 12])
def test_mod_double_even_modulus_rejected(N):
    with pytest.raises(DomainError):
        mod_double(range(nbits(N)), nbits(N), N)


@pytest.mark.parametrize("N", MODULI)
def test_var_mod_mul_exhaustive(N):
    circ, lay = instance("mul", N)
    cases = grid(x=range(N), y=range(N))
    for c, o in zip(cases, exhaust(circ, lay, cases)):
        assert (o["x"], o["y"], o["result"], o["aux"]) == (c["x"], c["y"], c["x"] * c["y"] % N, 0)


def test_var_mod_mul_example():
    circ, lay = instance("mul", 7)
    (o,) = exhaust(circ, lay, [dict(x=3, y=4)])
    assert o["result"] == 5


def test_var_mod_mul_even_modulus_rejected():
    with pytest.raises(DomainError):
        var_mod_mul(range(4), range(4, 8), range(8, 12), (12, 13), 10)


def test_var_mod_mul_uses_n_minus_one_doublings():
    """Each MDbl contributes one n-SWAP shift chain."""
    N = 13
    n = nbits(N)
    circ, _ = instance("mul", N)
    assert resources(circ).gate_counts["SWAP"] == (n - 1) * n


@pytest.mark.parametrize("N", MODULI)
def test_var_mod_square_exhaustive(N):
    circ, lay = instance("square", N)
    outs = exhaust(circ, lay, grid(x=range(N)))
    assert [(o["x"], o["result"], o["aux"], o["flag"]) for o in outs] == [(x, x * x % N, 0, 0) for x in range(N)]


def test_var_mod_square_example():
    circ, lay = instance("square", 11)
    (o,) = exhaust(circ, lay, [dict(x=7)])
    assert o["result"] == 5


def test_var_mod_square_even_modulus_rejected():
    with pytest.raises(DomainError):
        var_mod_square(range(3), range(3, 6), 6, 7, 6)


BUDGETS = {
    "add": lambda n: 2 * n + 2,
    "double": lambda n: n + 1,
    "mul": lambda n: 3 * n + 2,
    "square": lambda n: 2 * n + 2,
}


@pytest.mark.parametrize("op", sorted(BUDGETS))
@pytest.mark.parametrize("N", MODULI)
def test_qubit_budgets(op, N):
    n = nbits(N)
    circ, lay = instance(op, N)
    assert circ.qubit_count == lay.num_qubits == BUDGETS[op](n) == VarModLayout.for_op(op, n).budget


def test_unknown_op():
    with pytest.raises(StructuralError):
        VarModLayout.for_op("divide", 3)


def test_structural_errors():
    with pytest.raises(StructuralError):
        var_mod_mul(range(3), range(3, 6), range(6, 9), (9,), 7)
    with pytest.raises(StructuralError):
        var_mod_square(range(3), range(3, 5), 6, 7, 7)
