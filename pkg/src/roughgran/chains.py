"""Tolerances on finite chains ``L_n = {0 < 1 < ... < n-1}``.

A block system of a compatible tolerance on a chain is a run of intervals
``[n_1, m_1], ..., [n_k, m_k]`` with ``n_1 = 0``, ``m_k = n - 1`` and, for
consecutive intervals, ``n_i < n_{i+1} <= m_i + 1`` and ``m_i < m_{i+1}``.
Glued tolerances tighten the middle bound to ``n_{i+1} <= m_i`` (neighbours
overlap); congruences force ``n_{i+1} = m_i + 1`` (neighbours abut).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .checks import Check
from .errors import ParameterError
from .tolerance import BlockSystem, Tolerance

KINDS = ("tolerance", "glued", "congruence")


def _interval_violation(n: int, intervals: Sequence[tuple[int, int]]) -> str | None:
    if not intervals:
        return "no intervals"
    for a, b in intervals:
        if a > b:
            return f"interval [{a}, {b}] is reversed"
        if a < 0 or b >= n:
            return f"interval [{a}, {b}] leaves 0..{n - 1}"
    if intervals[0][0] != 0:
        return "first interval does not start at 0"
    if intervals[-1][1] != n - 1:
        return f"last interval does not end at {n - 1}"
    for (a, b), (c, d) in zip(intervals, intervals[1:]):
        if not a < c:
            return f"left endpoints {a}, {c} not increasing"
        if not c <= b + 1:
            return f"gap between [{a}, {b}] and [{c}, {d}]"
        if not b < d:
            return f"right endpoints {b}, {d} not increasing"
    return None


@dataclass(frozen=True)
class ChainBlockSystem:
    n: int
    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if self.n < 1:
            raise ParameterError("chain length must be positive")
        problem = _interval_violation(self.n, ivs)
        if problem:
            raise ParameterError(f"not a chain block system on L_{self.n}: {problem}")

    @classmethod
    def total(cls, n: int) -> "ChainBlockSystem":
        return cls(n, ((0, n - 1),))

    @classmethod
    def identity(cls, n: int) -> "ChainBlockSystem":
        return cls(n, tuple((i, i) for i in range(n)))

    def __len__(self):
        return len(self.intervals)

    @property
    def is_glued(self) -> bool:
        return all(c <= b for (_, b), (c, _) in zip(self.intervals, self.intervals[1:]))

    @property
    def is_congruence(self) -> bool:
        return all(c == b + 1 for (_, b), (c, _) in zip(self.intervals, self.intervals[1:]))

    def block_system(self) -> BlockSystem:
        return BlockSystem(self.n, tuple(frozenset(range(a, b + 1)) for a, b in self.intervals))

    def relation(self) -> Tolerance:
        m = np.zeros((self.n, self.n), dtype=bool)
        for a, b in self.intervals:
            m[a:b + 1, a:b + 1] = True
        return Tolerance(m)

    def containing(self, i: int) -> list[int]:
        """Indices of the intervals holding chain element ``i``."""
        return [j for j, (a, b) in enumerate(self.intervals) if a <= i <= b]

    def to_json(self) -> dict:
        return {"n": self.n, "intervals": [list(iv) for iv in self.intervals]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ChainBlockSystem":
        return cls(int(data["n"]), tuple(tuple(iv) for iv in data["intervals"]))


@dataclass(frozen=True)
class UniversalBlockDistribution:
    """All block systems of one family of tolerances on ``L_n``.

    Systems are ordered by number of intervals, then lexicographically; this
    order is the index space used by reasoner configurations.
    """

    n: int
    systems: tuple[ChainBlockSystem, ...]
    kind: str = "tolerance"

    def __len__(self):
        return len(self.systems)

    def __iter__(self):
        return iter(self.systems)

    def __getitem__(self, i):
        return self.systems[i]

    def index(self, system: ChainBlockSystem) -> int:
        return self.systems.index(system)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "count": len(self.systems),
            "systems": [s.to_json()["intervals"] for s in self.systems],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "UniversalBlockDistribution":
        n = int(data["n"])
        systems = tuple(ChainBlockSystem(n, tuple(tuple(iv) for iv in s)) for s in data["systems"])
        return cls(n, systems, data.get("kind", "tolerance"))


def _generate(n: int, kind: str) -> Iterator[tuple[tuple[int, int], ...]]:
    def extend(prefix):
        a, b = prefix[-1]
        if b == n - 1:
            yield tuple(prefix)
            return
        if kind == "congruence":
            starts = range(b + 1, b + 2)
        elif kind == "glued":
            starts = range(a + 1, b + 1)
        else:
            starts = range(a + 1, b + 2)
        for c in starts:
            for d in range(max(b + 1, c), n):
                prefix.append((c, d))
                yield from extend(prefix)
                prefix.pop()

    for m in range(n):
        yield from extend([(0, m)])


def enumerate_chain(n: int, kind: str = "tolerance") -> UniversalBlockDistribution:
    if kind not in KINDS:
        raise ParameterError(f"unknown chain family {kind!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"chain length must be a positive integer, got {n!r}")
    found = sorted(_generate(int(n), kind), key=lambda ivs: (len(ivs), ivs))
    return UniversalBlockDistribution(int(n), tuple(ChainBlockSystem(n, ivs) for ivs in found), kind)


def enumerate_chain_tolerances(n: int) -> UniversalBlockDistribution:
    return enumerate_chain(n, "tolerance")


def enumerate_chain_glued(n: int) -> UniversalBlockDistribution:
    return enumerate_chain(n, "glued")


def enumerate_chain_congruences(n: int) -> UniversalBlockDistribution:
    return enumerate_chain(n, "congruence")


def catalan(n: int) -> int:
    c = 1
    for i in range(n):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c


LatticeCheck = Check


def validate_lattice_blocks(n: int, intervals: Sequence[Sequence[int]]) -> LatticeCheck:
    """Check a candidate interval collection against the block criteria for a
    finite lattice, specialised to the chain ``L_n`` (join is ``max``).

    The conditions are tested in order: cover, equal left endpoints force
    equal right endpoints, and closure of left endpoints under join with a
    dominating right endpoint.
    """
    ivs = [tuple(int(v) for v in iv) for iv in intervals]
    for a, b in ivs:
        if a > b:
            raise ParameterError(f"malformed interval [{a}, {b}]")
        if a < 0 or b >= n:
            raise ParameterError(f"interval [{a}, {b}] outside 0..{n - 1}")
    covered = set()
    for a, b in ivs:
        covered.update(range(a, b + 1))
    for x in range(n):
        if x not in covered:
            return LatticeCheck(False, f"cover: element {x} lies in no interval")
    for i, (a, b) in enumerate(ivs):
        for c, d in ivs[i + 1:]:
            if a == c and b != d:
                return LatticeCheck(False, f"equal left endpoint {a} with right endpoints {b} and {d}")
    for a, b in ivs:
        for c, d in ivs:
            left, right = max(a, c), max(b, d)
            if not any(e == left and right <= f for e, f in ivs):
                return LatticeCheck(
                    False, f"join: no interval starts at {left} and reaches {right}"
                )
    return LatticeCheck(True)


def is_compatible_tolerance(n: int, t: Tolerance) -> bool:
    """Whether ``t`` on ``L_n`` is preserved by the chain's min and max."""
    if t.size != n:
        return False
    i, j = np.nonzero(t.matrix)
    lo_a, lo_b = np.minimum.outer(i, i), np.minimum.outer(j, j)
    hi_a, hi_b = np.maximum.outer(i, i), np.maximum.outer(j, j)
    return bool(t.matrix[lo_a, lo_b].all() and t.matrix[hi_a, hi_b].all())
