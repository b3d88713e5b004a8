"""Order finding and the classical factoring loop around it.

Two backends produce the counting-register distribution of the
order-finding circuit:

``full``
    Builds the circuit (Hadamards on ``t`` counting qubits, controlled
    modular exponentiation, inverse QFT) and runs it on the statevector.
``fast``
    Uses the structure of the state after exponentiation. The counting
    register splits into one class per value ``c = a**j mod N``. Each class
    contributes the squared DFT of its indicator ``[a**j = c]``, scaled by
    ``1 / 2**t``. This is exact (not an approximation) and costs
    ``O(r * 2**t log 2**t)``.

Both return the same distribution to floating-point accuracy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError, ExhaustionError
from .layout import RegisterLayout, read_bits
from .qft import append_iqft
from .qft_const_arith import bit_length_of_modulus, const_mod_exp
from .simulator import MAX_QUBITS, Circuit, CircuitBuilder, run_sparse

BACKENDS = ("full", "fast", "auto")
#: Largest qubit count the ``auto`` backend hands to the full simulation.
AUTO_FULL_LIMIT = 18
ORDER_MULTIPLES = 4
ATTEMPT_BUDGET = 64


@dataclass(frozen=True)
class OrderFindingConfig:
    N: int
    a: int
    t: int | None = None

    def __post_init__(self):
        if self.N < 3:
            raise DomainError(f"N must be at least 3, got {self.N}")
        if not 1 < self.a < self.N:
            raise DomainError(f"base a = {self.a} must satisfy 1 < a < N")
        if math.gcd(self.a, self.N) != 1:
            raise DomainError(f"gcd({self.a}, {self.N}) != 1")
        if self.t is None:
            object.__setattr__(self, "t", 2 * self.n)
        if self.t < 1:
            raise DomainError("counting width t must be positive")

    @property
    def n(self) -> int:
        return bit_length_of_modulus(self.N)

    @property
    def qubit_count(self) -> int:
        return self.t + 2 * self.n + 1

    def layout(self) -> RegisterLayout:
        return RegisterLayout(
            [("counting", self.t, "counting"), ("result", self.n, "result"), ("work", self.n + 1, "work")]
        )


def order_finding_circuit(config: OrderFindingConfig, include_iqft: bool = True) -> Circuit:
    """Order-finding circuit on ``t + 2n + 1`` qubits.

    Register order: counting (``t``), result (``n``, loaded with 1), then
    ``n + 1`` work qubits for the multiplier scratch space and its ancilla.
    """
    q = config.qubit_count
    if q > MAX_QUBITS:
        raise CapacityError(
            f"order finding needs {q} qubits (limit {MAX_QUBITS}); use the fast backend"
        )
    lay = config.layout()
    b = CircuitBuilder(q)
    for c in lay["counting"]:
        b.h(c)
    b.extend(const_mod_exp(lay["counting"], lay["result"], lay["work"], config.a, config.N))
    if include_iqft:
        append_iqft(b, lay["counting"], swaps=True)
    return b.build()


def order_finding_full(config: OrderFindingConfig) -> np.ndarray:
    """Counting-register distribution from a gate-by-gate simulation.

    The sparse engine is used because the live support stays far below
    ``2**qubit_count``; the result equals a dense run to rounding.
    """
    circ = order_finding_circuit(config)
    batch = run_sparse(circ, [0])
    index = batch.keys & ((1 << circ.qubit_count) - 1)
    probs = np.abs(batch.amps) ** 2
    counting = read_bits(index, config.layout()["counting"])
    return np.bincount(counting, weights=probs, minlength=1 << config.t)


def order_finding_fast(config: OrderFindingConfig) -> np.ndarray:
    """Exact counting-register distribution from the per-class DFT."""
    M = 1 << config.t
    powers = np.empty(M, dtype=np.int64)
    v = 1
    for j in range(M):
        powers[j] = v
        v = v * config.a % config.N
    dist = np.zeros(M)
    for c in np.unique(powers):
        amp = np.fft.fft((powers == c).astype(float)) / M
        dist += np.abs(amp) ** 2
    return dist


def order_finding_distribution(config: OrderFindingConfig, backend: str = "auto") -> np.ndarray:
    if backend not in BACKENDS:
        raise DomainError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "auto":
        backend = "full" if config.qubit_count <= AUTO_FULL_LIMIT else "fast"
    return order_finding_full(config) if backend == "full" else order_finding_fast(config)


# ------------------------------------------------------------ continued fractions


@dataclass(frozen=True)
class Convergent:
    numerator: int
    denominator: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def continued_fraction(numerator: int, denominator: int, max_denominator: int) -> list[Convergent]:
    """Convergents of ``numerator / denominator`` with denominator at most ``max_denominator``.

    A convergent whose denominator equals the previous one replaces it, so
    denominators strictly increase.

    >>> [(c.numerator, c.denominator) for c in continued_fraction(3414, 4096, 35)]
    [(1, 1), (5, 6)]
    """
    if denominator <= 0:
        raise DomainError("denominator must be positive")
    if max_denominator < 1:
        raise DomainError("max_denominator must be at least 1")
    out: list[Convergent] = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    p, q = numerator, denominator
    while q:
        a, r = divmod(p, q)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_denominator:
            break
        conv = Convergent(h1, k1)
        if out and out[-1].denominator == k1:
            out[-1] = conv
        else:
            out.append(conv)
        p, q = q, r
    return out


@dataclass(frozen=True)
class OrderResult:
    r: int | None
    reason: str
    convergents: tuple[Convergent, ...] = ()

    @property
    def accepted(self) -> bool:
        return self.r is not None


def recover_order(measured: int, t: int, config: OrderFindingConfig) -> OrderResult:
    """Least ``d * k`` (``d`` a convergent denominator, ``k <= 4``, ``d * k <= N``) with ``a**(d*k) = 1 mod N``.

    Every candidate is verified classically.
    """
    M = 1 << t
    if not 0 <= measured < M:
        raise DomainError(f"measured value {measured} outside [0, {M})")
    if measured == 0:
        return OrderResult(None, "measured 0 carries no information")
    convs = tuple(continued_fraction(measured, M, config.N))
    candidates = sorted(
        {c.denominator * k for c in convs for k in range(1, ORDER_MULTIPLES + 1) if c.denominator * k <= config.N}
    )
    for d in candidates:
        if pow(config.a, d, config.N) == 1:
            return OrderResult(d, "verified", convs)
    return OrderResult(None, "no convergent denominator is an order", convs)


# ------------------------------------------------------------ factoring


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def perfect_power(n: int) -> tuple[int, int] | None:
    """``(b, k)`` with ``b**k == n`` and ``k >= 2`` if one exists."""
    for k in range(n.bit_length(), 1, -1):
        b = round(n ** (1.0 / k))
        for cand in (b - 1, b, b + 1):
            if cand > 1 and cand**k == n:
                return cand, k
    return None


@dataclass
class Attempt:
    a: int
    status: str
    measured: int | None = None
    convergents: list[list[int]] = field(default_factory=list)
    r: int | None = None

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "measured": self.measured,
            "convergents": self.convergents,
            "r": self.r,
            "status": self.status,
        }


@dataclass
class FactorReport:
    N: int
    factors: list[int]
    seed: int
    attempts: list[Attempt] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "factors": self.factors,
            "seed": self.seed,
            "attempts": [a.as_dict() for a in self.attempts],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _split(N: int, p: int) -> list[int]:
    return sorted((p, N // p))


def factor(
    N: int,
    seed: int = 1,
    backend: str = "auto",
    a: int | None = None,
    t: int | None = None,
    argmax: bool = False,
    budget: int = ATTEMPT_BUDGET,
) -> FactorReport:
    """Find a nontrivial factor pair of ``N``.

    Even ``N`` and perfect powers are split classically. Otherwise each
    attempt picks a random base (or the forced ``a``), takes a lucky gcd if
    there is one, and samples the order-finding distribution with a
    PCG64 generator seeded by ``seed``. The recovered order is then used for
    ``gcd(a**(r/2) +- 1, N)``. ``argmax=True`` replaces sampling with the
    outcomes of each base in decreasing probability order, one per attempt.

    Raises
    ------
    DomainError
        ``N < 4`` or ``N`` prime.
    ExhaustionError
        No factor within ``budget`` attempts (``trace`` holds the report).
    """
    if N < 4 or is_prime(N):
        raise DomainError(f"{N} is not composite")
    report = FactorReport(N, [], seed)
    if N % 2 == 0:
        report.factors = _split(N, 2)
        report.attempts.append(Attempt(2, "even"))
        return report
    pp = perfect_power(N)
    if pp:
        report.factors = _split(N, pp[0])
        report.attempts.append(Attempt(pp[0], "perfect power"))
        return report
    rng = np.random.Generator(np.random.PCG64(seed))
    cache: dict[int, np.ndarray] = {}
    rank: dict[int, int] = {}
    for _ in range(budget):
        base = a if a is not None else int(rng.integers(2, N))
        g = math.gcd(base, N)
        if g > 1:
            report.attempts.append(Attempt(base, "gcd"))
            report.factors = _split(N, g)
            return report
        config = OrderFindingConfig(N, base, t)
        if base not in cache:
            cache[base] = order_finding_distribution(config, backend)
        dist = cache[base]
        if argmax:
            order = np.argsort(-dist, kind="stable")
            measured = int(order[rank.get(base, 0) % dist.size])
            rank[base] = rank.get(base, 0) + 1
        else:
            measured = int(rng.choice(dist.size, p=dist / dist.sum()))
        res = recover_order(measured, config.t, config)
        att = Attempt(
            base,
            "",
            measured,
            [[c.numerator, c.denominator] for c in res.convergents],
            res.r,
        )
        report.attempts.append(att)
        if not res.accepted:
            att.status = "rejected: " + res.reason
            continue
        if res.r % 2:
            att.status = "rejected: odd order"
            continue
        x = pow(base, res.r // 2, N)
        if x == N - 1:
            att.status = "rejected: a^(r/2) = -1 mod N"
            continue
        for g in (math.gcd(x - 1, N), math.gcd(x + 1, N)):
            if 1 < g < N:
                att.status = "factored"
                report.factors = _split(N, g)
                return report
        att.status = "rejected: trivial gcd"
    raise ExhaustionError(f"no factor of {N} after {budget} attempts", report)
