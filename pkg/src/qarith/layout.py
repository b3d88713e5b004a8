"""Named qubit registers on a flat qubit space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError

ROLES = ("value", "aux", "carry", "sign", "counting", "result", "flag", "work")
ANCILLA_ROLES = frozenset({"aux", "carry", "flag"})


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]  # LSB first
    role: str = "value"

    @property
    def width(self) -> int:
        return len(self.qubits)

    def __iter__(self):
        return iter(self.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]


class RegisterLayout:
    """Disjoint named qubit groups, allocated in order starting at qubit 0.

    >>> lay = RegisterLayout([("x", 3), ("flag", 1, "flag")])
    >>> lay["x"], lay["flag"]
    ((0, 1, 2), (3,))
    >>> lay.encode(x=5, flag=1)
    13
    """

    def __init__(self, spec: Iterable[tuple] = ()):
        self._regs: dict[str, Register] = {}
        self._next = 0
        for item in spec:
            self.add(*item)

    def add(self, name: str, width: int, role: str = "value") -> tuple[int, ...]:
        if name in self._regs:
            raise StructuralError(f"register {name!r} already defined")
        if width < 1:
            raise StructuralError(f"register {name!r} must have at least one qubit")
        if role not in ROLES:
            raise StructuralError(f"unknown register role {role!r}")
        qubits = tuple(range(self._next, self._next + width))
        self._next += width
        self._regs[name] = Register(name, qubits, role)
        return qubits

    @classmethod
    def from_groups(cls, groups: Mapping[str, Sequence[int]], roles: Mapping[str, str] | None = None):
        """Wrap already-chosen qubit groups, checking they are disjoint."""
        lay = cls()
        seen: set[int] = set()
        for name, qubits in groups.items():
            qubits = tuple(int(q) for q in qubits)
            if not qubits:
                raise StructuralError(f"register {name!r} is empty")
            if seen & set(qubits) or len(set(qubits)) != len(qubits):
                raise StructuralError(f"register {name!r} overlaps another register")
            seen |= set(qubits)
            lay._regs[name] = Register(name, qubits, (roles or {}).get(name, "value"))
            lay._next = max(lay._next, 1 + max(qubits))
        return lay

    def __getitem__(self, name: str) -> tuple[int, ...]:
        return self._regs[name].qubits

    def __contains__(self, name: str) -> bool:
        return name in self._regs

    def register(self, name: str) -> Register:
        return self._regs[name]

    @property
    def names(self) -> list[str]:
        return list(self._regs)

    @property
    def num_qubits(self) -> int:
        return self._next

    def ancillas(self) -> list[Register]:
        return [r for r in self._regs.values() if r.role in ANCILLA_ROLES]

    def ancilla_count(self) -> int:
        return sum(r.width for r in self.ancillas())

    def encode(self, **values: int) -> int:
        """Basis index holding the given register values (unlisted registers are 0)."""
        index = 0
        for name, value in values.items():
            reg = self._regs[name]
            if not 0 <= value < (1 << reg.width):
                raise StructuralError(f"value {value} does not fit register {name!r}")
            for i, q in enumerate(reg.qubits):
                if value >> i & 1:
                    index |= 1 << q
        return index

    def decode(self, index: int) -> dict[str, int]:
        index = int(index)
        return {name: read_bits(index, reg.qubits) for name, reg in self._regs.items()}


def read_bits(index: int, qubits: Sequence[int]) -> int:
    """Value of ``qubits`` (LSB first) inside basis index ``index``."""
    return sum(((index >> q) & 1) << i for i, q in enumerate(qubits))


def check_disjoint(*groups: Sequence[int]) -> None:
    """Raise unless the groups share no qubit (empty groups are ignored)."""
    flat = [q for g in groups for q in g]
    if len(set(flat)) != len(flat):
        raise StructuralError("register groups must be pairwise disjoint")
