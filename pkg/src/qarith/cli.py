"""Command-line front end: build a circuit, simulate it, print the result.

Every arithmetic subcommand loads its operands into a basis state, runs the
circuit, and reads the registers back. ``resources`` and ``dump`` take the
same operation names and report on the circuit instead of running it.

Exit codes: 0 success, 1 attempt budget exhausted, 2 invalid input,
3 capacity exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable

from . import comparator, phase_estimation, qft, qft_const_arith, ripple_arith, shor, var_mod_arith
from .errors import CapacityError, DomainError, ExhaustionError, QArithError
from .layout import RegisterLayout
from .ripple_arith import SignedRegisterSpec
from .simulator import Circuit, dump, measure_register, new_state, resources, run, run_basis

EXIT_OK, EXIT_EXHAUSTED, EXIT_DOMAIN, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------------ jobs


@dataclass
class Job:
    """A circuit plus the basis input to feed it and how to read the answer."""

    circuit: Circuit
    layout: RegisterLayout
    index: int
    inputs: dict
    readout: Callable[[int], dict]
    primary: tuple[str, ...] = ("result",)


def _bits(*values: int) -> int:
    return max(1, *(abs(v).bit_length() for v in values))


def _need_modulus(m):
    if m is None:
        raise DomainError("--modulus is required")
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    return m


def _below(name: str, value: int, bound: int) -> None:
    if not 0 <= value < bound:
        raise DomainError(f"{name} = {value} must lie in [0, {bound})")


def _operands(ops: list[int], count: int, defaults: tuple[int, ...]) -> list[int]:
    if len(ops) > count:
        raise DomainError(f"expected at most {count} operand(s), got {len(ops)}")
    return list(ops) + list(defaults[len(ops) :])


def _signed_job(ops, opt, subtract: bool) -> Job:
    a, b = _operands(ops, 2, (0, 0))
    n = opt.width or _bits(a, b) + 1
    if max(abs(a), abs(b)) >= 1 << n:
        raise DomainError(f"operands must fit {n} value bits")
    circ, lay = ripple_arith.signed_instance(n, subtract)
    ra = SignedRegisterSpec(lay["a"][:-1], lay["a"][-1])
    rb = SignedRegisterSpec(lay["b"][:-1], lay["b"][-1])
    return Job(circ, lay, ra.encode(a) | rb.encode(b), {"a": a, "b": b}, lambda i: {"result": ra.decode(i), "b": rb.decode(i)})


def job_add(ops, opt):
    return _signed_job(ops, opt, False)


def job_sub(ops, opt):
    return _signed_job(ops, opt, True)


def job_mul(ops, opt):
    a, b = _operands(ops, 2, (0, 0))
    signed = a < 0 or b < 0
    n = opt.width or _bits(a, b)
    if max(abs(a), abs(b)) >= 1 << n:
        raise DomainError(f"operands must fit {n} bits")
    circ, lay = ripple_arith.multiplier_instance(n, signed)
    if signed:
        ra = SignedRegisterSpec(lay["a"][:-1], lay["a"][-1])
        rb = SignedRegisterSpec(lay["b"][:-1], lay["b"][-1])
        rr = SignedRegisterSpec(lay["result"][:-1], lay["result"][-1])
        index = ra.encode(a) | rb.encode(b)
        return Job(circ, lay, index, {"a": a, "b": b}, lambda i: {"result": rr.decode(i)})
    return Job(circ, lay, lay.encode(a=a, b=b), {"a": a, "b": b}, lambda i: {"result": lay.decode(i)["result"]})


def job_div(ops, opt):
    a, b = _operands(ops, 2, (0, 1))
    if b == 0:
        raise DomainError("division by zero")
    if a < 0 or b < 0:
        raise DomainError("divider takes nonnegative operands")
    n = opt.width or _bits(a, b)
    _below("a", a, 1 << n)
    _below("b", b, 1 << n)
    circ, lay = ripple_arith.divider_instance(n)

    def read(i):
        d = lay.decode(i)
        return {"quotient": d["quotient"], "remainder": d["a"]}

    return Job(circ, lay, lay.encode(a=a, b=b), {"a": a, "b": b}, read, ("quotient", "remainder"))


def job_const_add(ops, opt):
    x, a = _operands(ops, 2, (0, 1))
    n = opt.width or _bits(x, a) + 1
    _below("x", x, 1 << n)
    lay = RegisterLayout([("x", n)])
    circ = qft_const_arith.const_add(lay["x"], a, qubit_count=n)
    return Job(circ, lay, lay.encode(x=x), {"x": x, "a": a}, lambda i: {"result": lay.decode(i)["x"]})


def _mod_n(opt) -> tuple[int, int]:
    N = _need_modulus(opt.modulus)
    return N, qft_const_arith.bit_length_of_modulus(N)


def job_mod_add(ops, opt):
    x, a = _operands(ops, 2, (0, 1))
    N, n = _mod_n(opt)
    _below("x", x, N)
    _below("a", a, N)
    lay = RegisterLayout([("x", n), ("aux", 1, "aux")])
    circ = qft_const_arith.const_mod_add(lay["x"], a, N, lay["aux"][0], qubit_count=lay.num_qubits)
    return Job(circ, lay, lay.encode(x=x), {"x": x, "a": a}, lambda i: {"result": lay.decode(i)["x"]})


def job_mod_mul(ops, opt):
    x, a = _operands(ops, 2, (0, 1))
    N, n = _mod_n(opt)
    _below("x", x, N)
    _below("a", a, N)
    lay = RegisterLayout([("x", n), ("zero", n, "aux"), ("aux", 1, "aux")])
    circ = qft_const_arith.const_mod_mul(lay["x"], lay["zero"], a, N, lay["aux"][0], qubit_count=lay.num_qubits)
    return Job(circ, lay, lay.encode(x=x), {"x": x, "a": a}, lambda i: {"result": lay.decode(i)["x"]})


def job_mod_exp(ops, opt):
    base, exponent = _operands(ops, 2, (2, 0))
    N, n = _mod_n(opt)
    _below("base", base, N)
    if exponent < 0:
        raise DomainError("exponent must be nonnegative")
    w = opt.width or _bits(exponent)
    _below("exponent", exponent, 1 << w)
    lay = RegisterLayout([("x", w), ("result", n, "result"), ("work", n + 1, "aux")])
    circ = qft_const_arith.const_mod_exp(lay["x"], lay["result"], lay["work"], base, N, qubit_count=lay.num_qubits)
    return Job(circ, lay, lay.encode(x=exponent), {"base": base, "exponent": exponent}, lambda i: {"result": lay.decode(i)["result"]})


def _var_job(op: str, names: tuple[str, ...], out: str):
    def build(ops, opt):
        vals = _operands(ops, len(names), (0,) * len(names))
        N, _ = _mod_n(opt)
        for k, v in zip(names, vals):
            _below(k, v, N)
        circ, lay = var_mod_arith.instance(op, N)
        inputs = dict(zip(names, vals))
        return Job(circ, lay, lay.encode(**inputs), inputs, lambda i: {"result": lay.decode(i)[out]})

    return build


def job_compare(ops, opt):
    x, a = _operands(ops, 2, (0, 0))
    n = opt.width or _bits(x, a)
    _below("x", x, 1 << n)
    _below("a", a, 1 << n)
    circ, lay = comparator.comparator_instance(n, a, opt.relation)
    return Job(circ, lay, lay.encode(x=x), {"x": x, "a": a}, lambda i: {"result": lay.decode(i)["flag"]})


def job_states_compare(ops, opt):
    x1, x2 = _operands(ops, 2, (0, 0))
    n = opt.width or _bits(x1, x2)
    _below("x1", x1, 1 << n)
    _below("x2", x2, 1 << n)
    circ, lay = comparator.states_comparator_instance(n)
    return Job(circ, lay, lay.encode(x1=x1, x2=x2), {"x1": x1, "x2": x2}, lambda i: {"result": lay.decode(i)["flag"]})


def job_mod_reduce(ops, opt):
    (x,) = _operands(ops, 1, (0,))
    M = _need_modulus(opt.modulus)
    n = opt.width or M.bit_length()
    _below("x", x, 1 << n)
    lay = RegisterLayout([("x", n), ("flag", 1, "flag")])
    circ = comparator.mod_reduce(lay["x"], lay["flag"][0], M, lay.num_qubits)

    def read(i):
        d = lay.decode(i)
        return {"result": d["x"], "flag": d["flag"]}

    return Job(circ, lay, lay.encode(x=x), {"x": x}, read)


def job_clean_mod_add(ops, opt):
    x, a = _operands(ops, 2, (0, 1))
    M = _need_modulus(opt.modulus)
    n = M.bit_length()
    _below("x", x, M)
    _below("a", a, M)
    circ, lay = comparator.clean_adder_instance(n, a, M)
    return Job(circ, lay, lay.encode(x=x), {"x": x, "a": a}, lambda i: {"result": lay.decode(i)["x"]})


def job_qft(ops, opt):
    (x,) = _operands(ops, 1, (0,))
    n = opt.width or _bits(x)
    lay = RegisterLayout([("x", n)])
    circ = qft.qft_circuit(lay["x"], qubit_count=n)
    return Job(circ, lay, lay.encode(x=x), {"x": x}, lambda i: {"result": lay.decode(i)["x"]})


JOBS: dict[str, Callable] = {
    "add": job_add,
    "sub": job_sub,
    "mul": job_mul,
    "div": job_div,
    "const-add": job_const_add,
    "mod-add": job_mod_add,
    "mod-mul": job_mod_mul,
    "mod-exp": job_mod_exp,
    "var-mod-add": _var_job("add", ("x", "y"), "x"),
    "mod-double": _var_job("double", ("x",), "x"),
    "var-mod-mul": _var_job("mul", ("x", "y"), "result"),
    "mod-square": _var_job("square", ("x",), "result"),
    "compare": job_compare,
    "mod-reduce": job_mod_reduce,
}
#: Circuits available to ``resources`` and ``dump`` but not runnable on their own.
EXTRA_JOBS: dict[str, Callable] = {
    "states-compare": job_states_compare,
    "clean-mod-add": job_clean_mod_add,
    "qft": job_qft,
}
OPERAND_HELP = {
    "add": "A B",
    "sub": "A B",
    "mul": "A B",
    "div": "A B",
    "const-add": "X A",
    "mod-add": "X A",
    "mod-mul": "X A",
    "mod-exp": "BASE EXPONENT",
    "var-mod-add": "X Y",
    "mod-double": "X",
    "var-mod-mul": "X Y",
    "mod-square": "X",
    "compare": "X A",
    "mod-reduce": "X",
}


# ------------------------------------------------------------------ output


def _emit(payload: dict, text: str, as_json: bool) -> None:
    print(json.dumps(payload, sort_keys=True) if as_json else text)


def cmd_run(opt) -> int:
    job = JOBS[opt.command](opt.operands, opt)
    out, prob = run_basis(job.circuit, [job.index])
    result = job.readout(int(out[0]))
    payload = {
        "op": opt.command,
        "inputs": job.inputs,
        "outputs": result,
        "probability": round(float(prob[0]), 12),
        "qubits": job.circuit.qubit_count,
    }
    text = " ".join(str(result[k]) for k in job.primary)
    _emit(payload, text, opt.json)
    return EXIT_OK


def _lookup(name: str) -> Callable:
    if name in JOBS:
        return JOBS[name]
    if name in EXTRA_JOBS:
        return EXTRA_JOBS[name]
    raise DomainError(f"unknown operation {name!r}; choose from {sorted(JOBS) + sorted(EXTRA_JOBS)}")


def cmd_resources(opt) -> int:
    job = _lookup(opt.op)(opt.operands, opt)
    rep = resources(job.circuit)
    payload = {"op": opt.op, "ancillas": job.layout.ancilla_count(), "cr_gates": rep.cr_count, **rep.as_dict()}
    lines = [
        f"op: {opt.op}",
        f"qubits: {rep.qubit_count}",
        f"ancillas: {job.layout.ancilla_count()}",
        f"gates: {rep.total_gates}",
        f"depth: {rep.depth}",
        f"qft_invocations: {rep.qft_invocations}",
        f"cr_gates: {rep.cr_count}",
    ]
    lines += [f"  {k}: {v}" for k, v in rep.gate_counts.items() if v]
    _emit(payload, "\n".join(lines), opt.json)
    return EXIT_OK


def cmd_dump(opt) -> int:
    job = _lookup(opt.op)(opt.operands, opt)
    text = dump(job.circuit)
    _emit({"op": opt.op, "qubits": job.circuit.qubit_count, "circuit": text}, text.rstrip("\n"), opt.json)
    return EXIT_OK


def cmd_qpe(opt) -> int:
    n = opt.width or 3
    if not 0 <= opt.theta < 1:
        raise DomainError("theta must lie in [0, 1)")
    counting = tuple(range(n))
    state = run(phase_estimation.phase_qpe_circuit(opt.theta, n), new_state(n + 1))
    est = phase_estimation.estimate_phase(state, counting)
    if opt.argmax:
        measured = est.measured
        counts = {est.measured: opt.shots}
    else:
        hist = measure_register(state, counting, opt.shots, opt.seed)
        counts = hist.counts
        measured = hist.most_common()
    payload = {
        "theta": opt.theta,
        "width": n,
        "measured": measured,
        "estimate": measured / (1 << n),
        "probability": round(float(est.distribution[measured]), 12),
        "shots": opt.shots,
        "seed": opt.seed,
        "counts": {str(k): v for k, v in sorted(counts.items())},
    }
    text = f"measured {measured} estimate {measured / (1 << n)!r} probability {est.distribution[measured]:.6f}"
    _emit(payload, text, opt.json)
    return EXIT_OK


def cmd_factor(opt) -> int:
    try:
        report = shor.factor(
            opt.N, seed=opt.seed, backend=opt.backend, a=opt.base, t=opt.t, argmax=opt.argmax
        )
    except ExhaustionError as exc:
        if exc.trace is not None:
            print(exc.trace.to_json())
        raise
    print(report.to_json())
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--modulus", type=int, help="modulus N for modular operations")
    common.add_argument("--width", type=int, help="register width in qubits (default: smallest that fits)")
    common.add_argument("--shots", type=int, default=1024, help="measurement shots (default 1024)")
    common.add_argument("--seed", type=int, default=1, help="RNG seed (default 1)")
    common.add_argument("--backend", choices=shor.BACKENDS, default="auto", help="order-finding backend")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--argmax", action="store_true", help="take the most likely outcome instead of sampling")
    common.add_argument(
        "--relation", choices=comparator.RELATIONS, default="lt", help="comparison for compare (default lt)"
    )

    parser = _Parser(prog="qarith", description="Quantum arithmetic circuits on a statevector simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in JOBS:
        p = sub.add_parser(name, parents=[common], help=f"run {name} on {OPERAND_HELP[name]}")
        p.add_argument("operands", type=int, nargs="*", metavar="INT", help=OPERAND_HELP[name])
        p.set_defaults(handler=cmd_run)
    p = sub.add_parser("qpe", parents=[common], help="phase estimation of a phase gate with eigenstate |1>")
    p.add_argument("theta", type=float, help="phase in [0, 1)")
    p.set_defaults(handler=cmd_qpe)
    p = sub.add_parser("factor", parents=[common], help="factor N with order finding")
    p.add_argument("N", type=int)
    p.add_argument("--a", dest="base", type=int, help="force the base a")
    p.add_argument("--t", type=int, help="counting qubits (default 2n)")
    p.set_defaults(handler=cmd_factor)
    ops = sorted(JOBS) + sorted(EXTRA_JOBS)
    for name, handler, what in (("resources", cmd_resources, "gate census"), ("dump", cmd_dump, "text listing")):
        p = sub.add_parser(name, parents=[common], help=f"{what} of an operation's circuit")
        p.add_argument("op", choices=ops)
        p.add_argument("operands", type=int, nargs="*", metavar="INT")
        p.set_defaults(handler=handler)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        opt = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        if opt.shots < 1:
            raise DomainError("--shots must be at least 1")
        return opt.handler(opt)
    except ExhaustionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (QArithError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
