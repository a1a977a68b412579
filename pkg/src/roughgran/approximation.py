"""Granular approximations over block systems, rough objects, and rough
random functions built on them.

The lower approximation of ``X`` is the union of blocks inside ``X``; the
upper approximation is the union of blocks meeting ``X``.  With tolerance
blocks the two are not dual: ``upper(X)`` is generally not the complement of
``lower(S - X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from .errors import BoundsError, CapacityError, ContractError, DomainError, ParameterError
from .tolerance import BlockSystem

ENUMERATION_LIMIT = 16


def _mask(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def _members(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _check(bs: BlockSystem, x: Iterable[int]) -> frozenset:
    x = frozenset(int(i) for i in x)
    bad = [i for i in x if not 0 <= i < bs.universe_size]
    if bad:
        raise BoundsError(f"elements {sorted(bad)} outside 0..{bs.universe_size - 1}")
    return x


@dataclass(frozen=True)
class GranularApproximation:
    query: frozenset
    lower: frozenset
    upper: frozenset
    lower_blocks: tuple[int, ...]
    upper_blocks: tuple[int, ...]

    @property
    def boundary(self) -> frozenset:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {
            "query": sorted(self.query),
            "lower": sorted(self.lower),
            "upper": sorted(self.upper),
            "lower_blocks": list(self.lower_blocks),
            "upper_blocks": list(self.upper_blocks),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GranularApproximation":
        return cls(
            frozenset(data["query"]),
            frozenset(data["lower"]),
            frozenset(data["upper"]),
            tuple(data["lower_blocks"]),
            tuple(data["upper_blocks"]),
        )


def approximate(bs: BlockSystem, x: Iterable[int]) -> GranularApproximation:
    x = _check(bs, x)
    inside = tuple(i for i, b in enumerate(bs.blocks) if b <= x)
    meeting = tuple(i for i, b in enumerate(bs.blocks) if b & x)
    lo = frozenset().union(*(bs.blocks[i] for i in inside))
    up = frozenset().union(*(bs.blocks[i] for i in meeting))
    return GranularApproximation(x, lo, up, inside, meeting)


def lower(bs: BlockSystem, x: Iterable[int]) -> frozenset:
    return approximate(bs, x).lower


def upper(bs: BlockSystem, x: Iterable[int]) -> frozenset:
    return approximate(bs, x).upper


def xi5(a: Iterable, b: Iterable) -> float:
    """Share of ``b`` lying outside ``a``: ``|b - a| / |b|``."""
    a, b = set(a), set(b)
    if not b:
        raise DomainError("xi5 is undefined for an empty second argument")
    return len(b - a) / len(b)


def accuracy(bs: BlockSystem, x: Iterable[int]) -> float:
    """``|lower(X)| / |upper(X)|``, taken as 1 for the empty set."""
    approx = approximate(bs, x)
    if not approx.upper:
        return 1.0
    return len(approx.lower) / len(approx.upper)


class _MaskApproximator:
    def __init__(self, bs: BlockSystem):
        self.masks = [_mask(b) for b in bs.blocks]

    def lower(self, x: int) -> int:
        out = 0
        for b in self.masks:
            if not b & ~x:
                out |= b
        return out

    def upper(self, x: int) -> int:
        out = 0
        for b in self.masks:
            if b & x:
                out |= b
        return out


def _subsets(bs: BlockSystem, limit: int, samples: int | None, seed: int) -> tuple[Iterable[int], bool]:
    n = bs.universe_size
    if samples is None:
        if n > limit:
            raise CapacityError(
                f"universe of {n} exceeds exhaustive limit {limit}; pass samples= to sample"
            )
        return range(1 << n), True
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, 2, size=(samples, n))
    weights = [1 << i for i in range(n)]
    chosen = {0, (1 << n) - 1}
    chosen.update(sum(w for w, bit in zip(weights, row) if bit) for row in draws)
    return sorted(chosen), False


def _set_key(s: frozenset):
    return (len(s), sorted(s))


ROUGH_KINDS = ("E1", "E2", "F")


@dataclass(frozen=True)
class RoughObjectSpace:
    kind: str
    members: tuple
    exhaustive: bool = True

    def __post_init__(self):
        if self.kind not in ROUGH_KINDS:
            raise ParameterError(f"unknown rough object kind {self.kind!r}")

    def __len__(self):
        return len(self.members)

    def __contains__(self, item):
        return item in set(self.members)

    def to_json(self) -> dict:
        if self.kind == "E1":
            members = [[sorted(a), sorted(b)] for a, b in self.members]
        else:
            members = [sorted(m) for m in self.members]
        return {"kind": self.kind, "exhaustive": self.exhaustive, "members": members}


def rough_pairs(
    bs: BlockSystem, limit: int = ENUMERATION_LIMIT, samples: int | None = None, seed: int = 0
) -> RoughObjectSpace:
    """Distinct ``(lower(x), upper(x))`` pairs over all (or sampled) subsets."""
    approx = _MaskApproximator(bs)
    subsets, exhaustive = _subsets(bs, limit, samples, seed)
    pairs = {(approx.lower(x), approx.upper(x)) for x in subsets}
    members = sorted(
        ((_members(lo), _members(up)) for lo, up in pairs),
        key=lambda p: (_set_key(p[0]), _set_key(p[1])),
    )
    return RoughObjectSpace("E1", tuple(members), exhaustive)


def approximation_sets(
    bs: BlockSystem, limit: int = ENUMERATION_LIMIT, samples: int | None = None, seed: int = 0
) -> frozenset:
    """Every set that is some subset's lower or upper approximation."""
    space = rough_pairs(bs, limit, samples, seed)
    return frozenset(s for pair in space.members for s in pair)


def upper_definite_sets(bs: BlockSystem, limit: int = ENUMERATION_LIMIT) -> RoughObjectSpace:
    approx = _MaskApproximator(bs)
    subsets, _ = _subsets(bs, limit, None, 0)
    found = [_members(b) for b in subsets if approx.upper(b) == b]
    return RoughObjectSpace("E2", tuple(sorted(found, key=_set_key)))


def non_approximations(bs: BlockSystem, limit: int = ENUMERATION_LIMIT) -> RoughObjectSpace:
    """Subsets that are neither a lower nor an upper approximation.

    Only certifiable exhaustively, so sampling is not offered.
    """
    approx = _MaskApproximator(bs)
    subsets, _ = _subsets(bs, limit, None, 0)
    subsets = list(subsets)
    hit = set()
    for x in subsets:
        hit.add(approx.lower(x))
        hit.add(approx.upper(x))
    found = [_members(x) for x in subsets if x not in hit]
    return RoughObjectSpace("F", tuple(sorted(found, key=_set_key)))


def minimal_cover_rrf1(bs: BlockSystem, a: Iterable[int], limit: int = ENUMERATION_LIMIT):
    """A minimal approximation pair whose components both contain ``a``.

    Minimality is componentwise inclusion; among several minimal pairs the
    one with the smallest upper component wins, then the lexicographically
    first.  Sets that are not approximations are outside the domain.
    """
    a = _check(bs, a)
    space = rough_pairs(bs, limit)
    if a not in {s for pair in space.members for s in pair}:
        raise DomainError(f"{sorted(a)} is not a lower or upper approximation")
    covers = [(e, f) for e, f in space.members if a <= e and a <= f]
    if not covers:
        raise DomainError(f"no approximation pair covers {sorted(a)}")
    minimal = [
        p for p in covers
        if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in covers)
    ]
    return min(minimal, key=lambda p: (len(p[1]), sorted(p[1]), sorted(p[0])))


RRF_TYPES = ("type-1", "type-2", "type-3", "type-H")


@dataclass(frozen=True)
class RRFDescriptor:
    """A registered rough random function.

    ``domain`` and ``codomain`` are membership predicates; evaluation rejects
    inputs outside the domain and treats outputs outside the codomain as a
    bug in the wrapped map.
    """

    rrf_type: str
    func: Callable[[Any], Any]
    domain: Callable[[Any], bool]
    codomain: Callable[[Any], bool]
    domain_spec: str = ""
    codomain_spec: str = ""
    partial: bool = field(default=False)

    def __post_init__(self):
        if self.rrf_type not in RRF_TYPES:
            raise ParameterError(f"unknown RRF type {self.rrf_type!r}")
        if self.partial and self.rrf_type in ("type-2", "type-3"):
            raise ParameterError(f"{self.rrf_type} maps are total on their domain")


def evaluate_rrf(desc: RRFDescriptor, value):
    if not desc.domain(value):
        raise DomainError(f"input outside the domain of this {desc.rrf_type} map")
    out = desc.func(value)
    if not desc.codomain(out):
        raise ContractError(f"{desc.rrf_type} map left its codomain: {out!r}")
    return out


def minimal_cover_descriptor(bs: BlockSystem, limit: int = ENUMERATION_LIMIT, total: bool = False) -> RRFDescriptor:
    """Minimal-cover map from approximations to approximation pairs.

    With ``total=True`` the map is registered as type-3: it is defined on
    every approximation.
    """
    space = rough_pairs(bs, limit)
    pairs = set(space.members)
    domain = {s for pair in space.members for s in pair}
    return RRFDescriptor(
        "type-3" if total else "type-1",
        lambda a: minimal_cover_rrf1(bs, a, limit),
        lambda a: frozenset(a) in domain,
        lambda p: p in pairs,
        "lower and upper approximations",
        "approximation pairs (E1)",
        partial=not total,
    )


def xi5_descriptor() -> RRFDescriptor:
    return RRFDescriptor(
        "type-2",
        lambda ab: xi5(*ab),
        lambda ab: len(ab) == 2 and len(set(ab[1])) > 0,
        lambda v: 0.0 <= v <= 1.0,
        "(set, nonempty set)",
        "[0, 1]",
    )


def accuracy_descriptor(bs: BlockSystem) -> RRFDescriptor:
    return RRFDescriptor(
        "type-2",
        lambda x: accuracy(bs, x),
        lambda x: all(0 <= i < bs.universe_size for i in x),
        lambda v: 0.0 <= v <= 1.0,
        "subsets of the universe",
        "[0, 1]",
    )


OPERATORS = ("l", "u")


def operator_descriptor(bs: BlockSystem) -> RRFDescriptor:
    """Type-H map ``(operator, X)`` to the blocks making up that approximation."""

    def decompose(arg):
        op, x = arg
        approx = approximate(bs, x)
        chosen = approx.lower_blocks if op == "l" else approx.upper_blocks
        return tuple(bs.blocks[i] for i in chosen)

    block_set = set(bs.blocks)
    return RRFDescriptor(
        "type-H",
        decompose,
        lambda arg: len(arg) == 2 and arg[0] in OPERATORS
        and all(0 <= i < bs.universe_size for i in arg[1]),
        lambda out: all(b in block_set for b in out),
        "{l, u} x subsets",
        "collections of blocks",
        partial=True,
    )
