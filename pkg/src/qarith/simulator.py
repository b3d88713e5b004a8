"""Dense statevector engine.

Conventions
-----------
Qubit ``q`` is bit ``2**q`` of the basis index, so qubit 0 is the least
significant bit. A state over ``n`` qubits is a complex128 array whose first
axis has length ``2**n``; any further axes are a batch of independent states
that are evolved together (handy for exhaustive basis-state checks).

Gates are applied natively, multi-controlled ones included, by slicing a
``(2,)*n`` tensor view of the amplitude array; nothing is decomposed into
two-qubit gates.

Measurement uses numpy's ``PCG64`` bit generator seeded with the caller's
integer seed, so histograms are bit-for-bit reproducible.
"""

from __future__ import annotations

import json
import math
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, StructuralError

#: Absolute tolerance used whenever amplitudes or probabilities are compared.
ATOL = 1e-9
MAX_QUBITS = 28

X = "X"
H = "H"
SWAP = "SWAP"
PHASE = "PHASE"
CPHASE = "CPHASE"
KINDS = (X, H, SWAP, PHASE, CPHASE)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One gate: a kind, its target qubit(s), extra control qubits and an angle.

    ``CPHASE`` is the controlled rotation used by QFT ladders; it needs at
    least one control. Any other kind may also carry controls, which lifts it
    to the multi-controlled version (``X`` with two controls is a Toffoli).
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "angle", float(self.angle))
        if self.kind not in KINDS:
            raise StructuralError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == SWAP else 1
        if len(self.targets) != want:
            raise StructuralError(f"{self.kind} takes {want} target(s), got {self.targets}")
        if self.kind == CPHASE and not self.controls:
            raise StructuralError("CPHASE needs at least one control")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise StructuralError(f"repeated qubit in {self.kind} {qubits}")
        if min(qubits) < 0:
            raise StructuralError(f"negative qubit index in {qubits}")
        if not math.isfinite(self.angle):
            raise StructuralError("gate angle must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    @property
    def is_phase(self) -> bool:
        return self.kind in (PHASE, CPHASE)

    def inverse(self) -> "Gate":
        if self.is_phase:
            return Gate(self.kind, self.targets, self.controls, -self.angle)
        return self

    def with_controls(self, extra: Sequence[int]) -> "Gate":
        if not extra:
            return self
        return Gate(self.kind, self.targets, self.controls + tuple(extra), self.angle)


@dataclass(frozen=True)
class Block:
    """A labelled half-open gate range ``[start, stop)`` inside a circuit."""

    label: str
    start: int
    stop: int


_INVERSE_LABEL = {"qft": "iqft", "iqft": "qft"}


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate sequence over ``qubit_count`` qubits.

    ``blocks`` tags sub-ranges (QFT / inverse-QFT invocations) so resource
    reports can count them without pattern matching on gates.
    """

    qubit_count: int
    gates: tuple[Gate, ...] = ()
    blocks: tuple[Block, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.qubit_count < 1:
            raise StructuralError("a circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.qubit_count:
                raise StructuralError(
                    f"gate {g.kind} on {g.qubits} exceeds qubit count {self.qubit_count}"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        b = CircuitBuilder(max(self.qubit_count, other.qubit_count))
        b.extend(self)
        b.extend(other)
        return b.build()

    @property
    def acting_qubits(self) -> frozenset[int]:
        return frozenset(q for g in self.gates for q in g.qubits)

    def resized(self, qubit_count: int) -> "Circuit":
        """Same gates on a wider (or equal) register."""
        return Circuit(qubit_count, self.gates, self.blocks)

    def inverse(self) -> "Circuit":
        return inverse(self)

    def controlled(self, control_qubits: Sequence[int]) -> "Circuit":
        return controlled(self, control_qubits)


class CircuitBuilder:
    """Mutable accumulator used by every circuit builder in the package."""

    def __init__(self, qubit_count: int | None = None):
        self.qubit_count = qubit_count
        self._gates: list[Gate] = []
        self._blocks: list[Block] = []

    def __len__(self) -> int:
        return len(self._gates)

    def append(self, gate: Gate) -> "CircuitBuilder":
        self._gates.append(gate)
        return self

    def x(self, target: int, controls: Sequence[int] = ()) -> "CircuitBuilder":
        return self.append(Gate(X, (target,), tuple(controls)))

    def h(self, target: int, controls: Sequence[int] = ()) -> "CircuitBuilder":
        return self.append(Gate(H, (target,), tuple(controls)))

    def swap(self, a: int, b: int, controls: Sequence[int] = ()) -> "CircuitBuilder":
        return self.append(Gate(SWAP, (a, b), tuple(controls)))

    def phase(self, target: int, angle: float, controls: Sequence[int] = ()) -> "CircuitBuilder":
        return self.append(Gate(PHASE, (target,), tuple(controls), angle))

    def cphase(self, control: int, target: int, angle: float) -> "CircuitBuilder":
        return self.append(Gate(CPHASE, (target,), (control,), angle))

    def extend(self, circuit: Circuit, controls: Sequence[int] = ()) -> "CircuitBuilder":
        """Append ``circuit``, optionally lifting every gate with ``controls``."""
        if controls:
            circuit = controlled(circuit, controls)
        offset = len(self._gates)
        self._gates.extend(circuit.gates)
        self._blocks.extend(
            Block(b.label, b.start + offset, b.stop + offset) for b in circuit.blocks
        )
        return self

    @contextmanager
    def block(self, label: str):
        start = len(self._gates)
        yield self
        self._blocks.append(Block(label, start, len(self._gates)))

    def build(self, qubit_count: int | None = None) -> Circuit:
        n = qubit_count or self.qubit_count
        if n is None:
            n = 1 + max((q for g in self._gates for q in g.qubits), default=0)
        return Circuit(n, tuple(self._gates), tuple(self._blocks))


# ---------------------------------------------------------------- states


def _check_qubit_count(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside supported range 1..{MAX_QUBITS}")


def new_state(qubit_count: int) -> np.ndarray:
    """Return ``|0...0>`` on ``qubit_count`` qubits."""
    _check_qubit_count(qubit_count)
    psi = np.zeros(1 << qubit_count, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def basis_state(qubit_count: int, index: int) -> np.ndarray:
    _check_qubit_count(qubit_count)
    if not 0 <= index < (1 << qubit_count):
        raise StructuralError(f"basis index {index} out of range for {qubit_count} qubits")
    psi = np.zeros(1 << qubit_count, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def basis_batch(qubit_count: int, indices: Iterable[int]) -> np.ndarray:
    """Stack basis states as columns of a ``(2**n, k)`` array."""
    _check_qubit_count(qubit_count)
    idx = np.asarray(list(indices), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= (1 << qubit_count)):
        raise StructuralError("basis index out of range")
    psi = np.zeros((1 << qubit_count, idx.size), dtype=np.complex128)
    psi[idx, np.arange(idx.size)] = 1.0
    return psi


def qubit_count_of(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise StructuralError(f"state dimension {dim} is not a power of two >= 2")
    return n


def _tensor_view(state: np.ndarray, n: int) -> np.ndarray:
    return state.reshape((2,) * n + state.shape[1:])


def _apply(t: np.ndarray, gate: Gate, n: int) -> None:
    """In-place application on a ``(2,)*n + batch`` tensor view."""
    idx: list = [slice(None)] * n
    for c in gate.controls:
        idx[n - 1 - c] = 1
    if gate.is_phase:
        idx[n - 1 - gate.targets[0]] = 1
        t[tuple(idx)] *= complex(math.cos(gate.angle), math.sin(gate.angle))
        return
    if gate.kind == SWAP:
        a, b = (n - 1 - q for q in gate.targets)
        i01, i10 = list(idx), list(idx)
        i01[a], i01[b] = 0, 1
        i10[a], i10[b] = 1, 0
        i01, i10 = tuple(i01), tuple(i10)
        tmp = t[i01].copy()
        t[i01] = t[i10]
        t[i10] = tmp
        return
    ax = n - 1 - gate.targets[0]
    i0, i1 = list(idx), list(idx)
    i0[ax], i1[ax] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    if gate.kind == X:
        tmp = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = tmp
    else:  # H
        a = t[i0].copy()
        b = t[i1]
        t[i0] = (a + b) * _SQRT_HALF
        t[i1] = (a - b) * _SQRT_HALF


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Return a new state with ``gate`` applied."""
    n = qubit_count_of(state)
    if max(gate.qubits) >= n:
        raise StructuralError(f"gate on {gate.qubits} does not fit {n} qubits")
    out = np.array(state, dtype=np.complex128, copy=True)
    _apply(_tensor_view(out, n), gate, n)
    return out


def run(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Apply every gate of ``circuit`` in order; returns a new array.

    ``state`` may carry trailing batch axes; each column evolves independently.
    """
    n = qubit_count_of(state)
    if circuit.qubit_count != n:
        raise StructuralError(
            f"circuit has {circuit.qubit_count} qubits but state has {n}"
        )
    out = np.array(state, dtype=np.complex128, copy=True, order="C")
    view = _tensor_view(out, n)
    for g in circuit.gates:
        _apply(view, g, n)
    return out


class SparseBatch:
    """Nonzero amplitudes of a batch of states, one ``(column, index)`` key each.

    Keys are ``column << n | index``. Useful when every column stays close to
    a basis state, as arithmetic circuits do on basis inputs: the cost scales
    with the number of live branches rather than with ``2**n``.
    """

    def __init__(self, qubit_count: int, keys: np.ndarray, amps: np.ndarray, columns: int):
        self.qubit_count = qubit_count
        self.keys = keys
        self.amps = amps
        self.columns = columns

    @classmethod
    def from_indices(cls, qubit_count: int, indices: Iterable[int]) -> "SparseBatch":
        _check_qubit_count(qubit_count)
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= 1 << qubit_count):
            raise StructuralError("basis index out of range")
        cols = np.arange(idx.size, dtype=np.int64)
        return cls(qubit_count, (cols << qubit_count) | idx, np.ones(idx.size, np.complex128), idx.size)

    def apply(self, gate: Gate, prune: float = 1e-13) -> None:
        keys, amps = self.keys, self.amps
        cm = sum(1 << c for c in gate.controls)
        sel = (keys & cm) == cm
        if gate.is_phase:
            hit = sel & ((keys >> gate.targets[0]) & 1).astype(bool)
            amps[hit] *= complex(math.cos(gate.angle), math.sin(gate.angle))
        elif gate.kind == X:
            keys[sel] ^= 1 << gate.targets[0]
        elif gate.kind == SWAP:
            a, b = gate.targets
            hit = sel & (((keys >> a) ^ (keys >> b)) & 1).astype(bool)
            keys[hit] ^= (1 << a) | (1 << b)
        else:  # H
            tb = 1 << gate.targets[0]
            k, a = keys[sel], amps[sel] * _SQRT_HALF
            sign = np.where(k & tb, -1.0, 1.0)
            keys = np.concatenate([keys[~sel], k & ~tb, k | tb])
            amps = np.concatenate([amps[~sel], a, a * sign])
            uniq, inv = np.unique(keys, return_inverse=True)
            merged = np.zeros(uniq.size, np.complex128)
            np.add.at(merged, inv, amps)
            keep = np.abs(merged) > prune
            self.keys, self.amps = uniq[keep], merged[keep]

    def to_dense(self) -> np.ndarray:
        n = self.qubit_count
        out = np.zeros((1 << n, self.columns), np.complex128)
        out[self.keys & ((1 << n) - 1), self.keys >> n] = self.amps
        return out


def run_sparse(circuit: Circuit, indices: Iterable[int]) -> SparseBatch:
    """Run ``circuit`` on each basis index with the sparse engine."""
    batch = SparseBatch.from_indices(circuit.qubit_count, indices)
    for g in circuit.gates:
        batch.apply(g)
    return batch


def run_basis(circuit: Circuit, indices: Iterable[int], method: str = "sparse") -> tuple[np.ndarray, np.ndarray]:
    """Run ``circuit`` on each basis index; return (most likely output index, its probability).

    A probability of 1 (within :data:`ATOL`) means the circuit maps that
    input to a single basis state, ancillas included. ``method`` picks the
    sparse engine (default) or the dense one; both give the same amplitudes.
    """
    indices = list(indices)
    if method == "dense":
        out = run(circuit, basis_batch(circuit.qubit_count, indices))
        probs = np.abs(out) ** 2
        best = probs.argmax(axis=0)
        return best, probs[best, np.arange(probs.shape[1])]
    if method != "sparse":
        raise StructuralError(f"unknown method {method!r}")
    batch = run_sparse(circuit, indices)
    n = circuit.qubit_count
    best = np.zeros(len(indices), np.int64)
    prob = np.zeros(len(indices))
    if batch.keys.size:
        p = np.abs(batch.amps) ** 2
        cols = batch.keys >> n
        order = np.lexsort((-p, cols))  # per column, largest probability first
        cols_o = cols[order]
        first = order[np.r_[True, cols_o[1:] != cols_o[:-1]]]
        best[cols[first]] = batch.keys[first] & ((1 << n) - 1)
        prob[cols[first]] = p[first]
    return best, prob


def norm(state: np.ndarray) -> float | np.ndarray:
    return np.sqrt((np.abs(state) ** 2).sum(axis=0))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


def circuit_matrix(circuit: Circuit) -> np.ndarray:
    """Full unitary (column ``j`` is the image of ``|j>``); small circuits only."""
    n = circuit.qubit_count
    if n > 12:
        raise CapacityError("matrix extraction limited to 12 qubits")
    return run(circuit, np.eye(1 << n, dtype=np.complex128))


# ---------------------------------------------------------------- measurement


@dataclass(frozen=True)
class MeasurementHistogram:
    shots: int
    counts: dict[int, int]
    seed: int

    def to_json(self) -> str:
        payload = {
            "shots": self.shots,
            "seed": self.seed,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
        }
        return json.dumps(payload, sort_keys=True)

    def most_common(self) -> int:
        return max(self.counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _check_register(qubits: Sequence[int], n: int) -> None:
    if not qubits:
        raise StructuralError("empty qubit list")
    if len(set(qubits)) != len(qubits):
        raise StructuralError("qubits must be distinct")
    if min(qubits) < 0 or max(qubits) >= n:
        raise StructuralError(f"qubits {list(qubits)} out of range for {n} qubits")


def marginal_probabilities(state: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Exact marginal over ``qubits`` (listed LSB first) as a length-``2**k`` array."""
    n = qubit_count_of(state)
    qubits = [int(q) for q in qubits]
    _check_register(qubits, n)
    p = (np.abs(state) ** 2).reshape((2,) * n + state.shape[1:])
    axes = [n - 1 - q for q in qubits]
    drop = tuple(a for a in range(n) if a not in axes)
    p = p.sum(axis=drop)
    # remaining axes are in increasing tensor-axis order; put the MSB of the register first
    kept = sorted(axes)
    order = [kept.index(a) for a in reversed(axes)]
    extra = list(range(len(kept), p.ndim))
    p = np.transpose(p, order + extra)
    return p.reshape((1 << len(qubits),) + state.shape[1:])


def marginal_distribution(state: np.ndarray, qubits: Sequence[int], cutoff: float = 1e-15) -> dict[int, float]:
    """Exact marginal as ``{value: probability}``; entries below ``cutoff`` are dropped."""
    p = marginal_probabilities(state, qubits)
    return {int(v): float(p[v]) for v in np.flatnonzero(p > cutoff)}


def measure_register(state: np.ndarray, qubits: Sequence[int], shots: int, seed: int) -> MeasurementHistogram:
    """Sample ``shots`` outcomes of ``qubits`` without touching ``state``."""
    if shots < 1:
        raise StructuralError("shots must be >= 1")
    p = marginal_probabilities(state, qubits)
    p = p / p.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.multinomial(shots, p)
    counts = {int(v): int(draws[v]) for v in np.flatnonzero(draws)}
    return MeasurementHistogram(shots=shots, counts=counts, seed=seed)


# ---------------------------------------------------------------- transforms


def inverse(circuit: Circuit) -> Circuit:
    """Reverse the gate order and negate every angle."""
    m = len(circuit.gates)
    gates = tuple(g.inverse() for g in reversed(circuit.gates))
    blocks = tuple(
        Block(_INVERSE_LABEL.get(b.label, b.label), m - b.stop, m - b.start)
        for b in reversed(circuit.blocks)
    )
    return Circuit(circuit.qubit_count, gates, blocks)


def controlled(circuit: Circuit, control_qubits: Sequence[int]) -> Circuit:
    """Append ``control_qubits`` to the controls of every gate."""
    control_qubits = tuple(int(c) for c in control_qubits)
    if not control_qubits:
        return circuit
    if len(set(control_qubits)) != len(control_qubits):
        raise StructuralError("repeated control qubit")
    overlap = circuit.acting_qubits & set(control_qubits)
    if overlap:
        raise StructuralError(f"control qubits {sorted(overlap)} overlap the circuit")
    n = max(circuit.qubit_count, 1 + max(control_qubits))
    gates = tuple(g.with_controls(control_qubits) for g in circuit.gates)
    return Circuit(n, gates, circuit.blocks)


# ---------------------------------------------------------------- resources

CENSUS_KEYS = ("H", "CH", "X", "CNOT", "TOFFOLI", "MCX", "SWAP", "CSWAP", "PHASE", "CR", "MCR")


def census_key(gate: Gate) -> str:
    k = len(gate.controls)
    if gate.is_phase:
        return "PHASE" if k == 0 else "CR" if k == 1 else "MCR"
    if gate.kind == X:
        return ("X", "CNOT", "TOFFOLI")[k] if k < 3 else "MCX"
    if gate.kind == H:
        return "H" if k == 0 else "CH"
    return "SWAP" if k == 0 else "CSWAP"


@dataclass(frozen=True)
class ResourceReport:
    qubit_count: int
    gate_counts: dict[str, int]
    depth: int
    qft_invocations: int

    @property
    def total_gates(self) -> int:
        return sum(self.gate_counts.values())

    @property
    def cr_count(self) -> int:
        """Controlled rotations with exactly one control (the QFT ``CR_k`` gates)."""
        return self.gate_counts["CR"]

    def as_dict(self) -> dict:
        return {
            "qubit_count": self.qubit_count,
            "gate_counts": dict(self.gate_counts),
            "total_gates": self.total_gates,
            "depth": self.depth,
            "qft_invocations": self.qft_invocations,
        }


def resources(circuit: Circuit) -> ResourceReport:
    counts = dict.fromkeys(CENSUS_KEYS, 0)
    level = [0] * circuit.qubit_count
    depth = 0
    for g in circuit.gates:
        counts[census_key(g)] += 1
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
        depth = max(depth, d)
    qfts = sum(1 for b in circuit.blocks if b.label in ("qft", "iqft"))
    return ResourceReport(circuit.qubit_count, counts, depth, qfts)


# ---------------------------------------------------------------- text format

_LINE = re.compile(
    r"^(?P<kind>[A-Z]+) (?P<targets>\d+(?:,\d+)?)"
    r"(?: ctrl: (?P<ctrl>\d+(?:,\d+)*))?"
    r"(?: angle: (?P<angle>\S+))?$"
)


def format_gate(g: Gate) -> str:
    parts = [g.kind, ",".join(map(str, g.targets))]
    if g.controls:
        parts.append("ctrl: " + ",".join(map(str, g.controls)))
    if g.is_phase:
        parts.append(f"angle: {g.angle!r}")
    return " ".join(parts)


def dump(circuit: Circuit) -> str:
    """One gate per line: ``KIND t[,t] [ctrl: c1,c2] [angle: radians]``."""
    return "".join(format_gate(g) + "\n" for g in circuit.gates)


def parse(text: str, qubit_count: int | None = None) -> Circuit:
    b = CircuitBuilder(qubit_count)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise StructuralError(f"line {lineno}: cannot parse {raw!r}")
        targets = tuple(int(t) for t in m["targets"].split(","))
        ctrl = tuple(int(c) for c in m["ctrl"].split(",")) if m["ctrl"] else ()
        angle = float(m["angle"]) if m["angle"] else 0.0
        b.append(Gate(m["kind"], targets, ctrl, angle))
    return b.build()
