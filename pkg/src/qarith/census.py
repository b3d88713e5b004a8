"""Gate census of every circuit family at small register widths.

``python3 -m qarith.census`` prints the Markdown table kept in
``docs/census.md``; a test checks that the file matches.
"""

from __future__ import annotations

import sys
from typing import Callable, Iterable

from . import comparator, ripple_arith, var_mod_arith
from .layout import RegisterLayout
from .qft import qft_circuit
from .qft_const_arith import const_add, const_mod_exp
from .simulator import Circuit, resources

WIDTHS = range(3, 7)
COLUMNS = ("op", "n", "qubits", "ancillas", "gates", "depth", "qft", "CR", "CNOT", "TOFFOLI", "MCX", "MCR")


def _odd_modulus(n: int) -> int:
    """Smallest odd modulus with ``ceil(log2 N) = n``."""
    return (1 << (n - 1)) + 1


def _plain(circuit: Circuit) -> tuple[Circuit, int]:
    return circuit, 0


def _with_layout(pair: tuple[Circuit, RegisterLayout]) -> tuple[Circuit, int]:
    circuit, layout = pair
    return circuit, layout.ancilla_count()


def _mod_exp(n: int) -> tuple[Circuit, int]:
    lay = RegisterLayout([("x", n), ("result", n), ("work", n + 1, "aux")])
    return const_mod_exp(lay["x"], lay["result"], lay["work"], 2, _odd_modulus(n), qubit_count=lay.num_qubits), n + 1


#: op name -> builder taking the width ``n`` and returning ``(circuit, ancillas)``.
CENSUS_OPS: dict[str, Callable[[int], tuple[Circuit, int]]] = {
    "qft": lambda n: _plain(qft_circuit(range(n))),
    "const-add": lambda n: _plain(const_add(range(n), (1 << n) - 1)),
    "ripple-add": lambda n: _with_layout(ripple_arith.adder_instance(n, keep_carry=True)),
    "signed-add": lambda n: _with_layout(ripple_arith.signed_instance(n)),
    "mul": lambda n: _with_layout(ripple_arith.multiplier_instance(n)),
    "div": lambda n: _with_layout(ripple_arith.divider_instance(n)),
    "compare": lambda n: _with_layout(comparator.comparator_instance(n, (1 << n) - 1)),
    "states-compare": lambda n: _with_layout(comparator.states_comparator_instance(n)),
    "clean-mod-add": lambda n: _with_layout(comparator.clean_adder_instance(n, 1, _odd_modulus(n))),
    "var-mod-add": lambda n: _with_layout(var_mod_arith.instance("add", _odd_modulus(n))),
    "var-mod-mul": lambda n: _with_layout(var_mod_arith.instance("mul", _odd_modulus(n))),
    "mod-square": lambda n: _with_layout(var_mod_arith.instance("square", _odd_modulus(n))),
    "mod-exp": _mod_exp,
}


def census_rows(widths: Iterable[int] = WIDTHS) -> list[dict]:
    rows = []
    for op, build in CENSUS_OPS.items():
        for n in widths:
            circuit, ancillas = build(n)
            rep = resources(circuit)
            rows.append(
                {
                    "op": op,
                    "n": n,
                    "qubits": rep.qubit_count,
                    "ancillas": ancillas,
                    "gates": rep.total_gates,
                    "depth": rep.depth,
                    "qft": rep.qft_invocations,
                    "CR": rep.cr_count,
                    "CNOT": rep.gate_counts["CNOT"],
                    "TOFFOLI": rep.gate_counts["TOFFOLI"],
                    "MCX": rep.gate_counts["MCX"],
                    "MCR": rep.gate_counts["MCR"],
                }
            )
    return rows


def census_markdown(widths: Iterable[int] = WIDTHS) -> str:
    """Markdown table of :func:`census_rows`.

    Modular rows use the smallest odd modulus ``2**(n-1) + 1`` of width ``n``;
    ``mod-exp`` uses base 2 and an ``n``-qubit exponent.
    """
    lines = [
        "# Gate census",
        "",
        "Generated by `python3 -m qarith.census`. Widths n = 3..6.",
        "Modular rows use N = 2**(n-1) + 1; `mod-exp` uses base 2 with an n-qubit exponent.",
        "`qft` counts QFT and inverse-QFT blocks. `CR` counts phase rotations with one control; `MCR` counts those with more.",
        "Multiplications by a squared base equal to 1 are skipped, so `mod-exp` shrinks when 2 has small order mod N (n = 5, N = 17).",
        "",
        "| " + " | ".join(COLUMNS) + " |",
        "|" + "|".join("---" for _ in COLUMNS) + "|",
    ]
    for row in census_rows(widths):
        lines.append("| " + " | ".join(str(row[c]) for c in COLUMNS) + " |")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.stdout.write(census_markdown())
