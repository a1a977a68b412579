"""Tolerance relations, their blocks, and distance-derived tolerances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cliques import iter_bits, maximal_cliques
from .errors import BoundsError, DimensionError, NumericError, ParameterError, SchemaError
from .table import InformationTable


class Tolerance:
    """A reflexive symmetric relation on ``0..size-1`` as a boolean matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"tolerance matrix must be square and nonempty, got {m.shape}")
        if not m.diagonal().all():
            raise ParameterError("tolerance is not reflexive")
        if not (m == m.T).all():
            raise ParameterError("tolerance is not symmetric")
        m.setflags(write=False)
        self.matrix = m

    @classmethod
    def identity(cls, size: int) -> "Tolerance":
        return cls(np.eye(size, dtype=bool))

    @classmethod
    def total(cls, size: int) -> "Tolerance":
        return cls(np.ones((size, size), dtype=bool))

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterable[Sequence[int]]) -> "Tolerance":
        m = np.eye(size, dtype=bool)
        for i, j in pairs:
            if not (0 <= i < size and 0 <= j < size):
                raise BoundsError(f"pair ({i}, {j}) outside 0..{size - 1}")
            m[i, j] = m[j, i] = True
        return cls(m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def __eq__(self, other):
        if not isinstance(other, Tolerance):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool((self.matrix == other.matrix).all())

    def __hash__(self):
        return hash((self.size, self.matrix.tobytes()))

    def __repr__(self):
        return f"Tolerance(size={self.size}, pairs={self.pairs()})"

    def pairs(self) -> list[list[int]]:
        """Off-diagonal related pairs ``i < j``."""
        i, j = np.nonzero(np.triu(self.matrix, k=1))
        return [[int(a), int(b)] for a, b in zip(i, j)]

    def adjacency(self) -> list[int]:
        """Bitset adjacency rows without self loops."""
        rows = []
        for i in range(self.size):
            mask = 0
            for j in np.flatnonzero(self.matrix[i]):
                if j != i:
                    mask |= 1 << int(j)
            rows.append(mask)
        return rows

    def restrict(self, indices: Sequence[int]) -> "Tolerance":
        idx = np.asarray(indices, dtype=int)
        return Tolerance(self.matrix[np.ix_(idx, idx)])

    def to_json(self) -> dict:
        return {"size": self.size, "pairs": self.pairs()}

    @classmethod
    def from_json(cls, data: Mapping) -> "Tolerance":
        return cls.from_pairs(int(data["size"]), data["pairs"])


def canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[frozenset, ...]:
    """Deduplicate and sort by minimum element, then size, then contents."""
    unique = {frozenset(b) for b in blocks}
    return tuple(sorted(unique, key=lambda b: (min(b), len(b), sorted(b))))


@dataclass(frozen=True)
class BlockSystem:
    """Blocks (maximal pre-blocks) over the universe ``0..universe_size-1``."""

    universe_size: int
    blocks: tuple[frozenset, ...]
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", canonical_blocks(self.blocks))
        if not self.check:
            return
        if self.universe_size <= 0:
            raise ParameterError("universe must be nonempty")
        covered = frozenset().union(*self.blocks) if self.blocks else frozenset()
        if any(not b for b in self.blocks):
            raise ParameterError("empty block")
        if not covered <= frozenset(range(self.universe_size)):
            raise BoundsError("block element outside the universe")
        if len(covered) != self.universe_size:
            missing = sorted(set(range(self.universe_size)) - covered)
            raise ParameterError(f"blocks do not cover elements {missing}")
        for i, b in enumerate(self.blocks):
            for c in self.blocks[i + 1:]:
                if b <= c or c <= b:
                    raise ParameterError(f"block {sorted(b)} nested with {sorted(c)}")

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def relation(self) -> Tolerance:
        """Co-membership in some block."""
        m = np.zeros((self.universe_size, self.universe_size), dtype=bool)
        for b in self.blocks:
            idx = np.fromiter(b, dtype=int)
            m[np.ix_(idx, idx)] = True
        return Tolerance(m)

    def to_json(self) -> dict:
        return {"size": self.universe_size, "blocks": [sorted(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: Mapping) -> "BlockSystem":
        return cls(int(data["size"]), tuple(frozenset(b) for b in data["blocks"]))


def blocks(t: Tolerance) -> BlockSystem:
    """Blocks of a tolerance: the maximal cliques of its graph."""
    found = maximal_cliques(t.adjacency())
    return BlockSystem(t.size, tuple(frozenset(iter_bits(m)) for m in found), check=False)


def _check_subset(t: Tolerance, k: Iterable[int]) -> list[int]:
    k = sorted(set(k))
    if k and (k[0] < 0 or k[-1] >= t.size):
        raise BoundsError(f"element outside 0..{t.size - 1}")
    return k


def is_pre_block(t: Tolerance, k: Iterable[int]) -> bool:
    k = _check_subset(t, k)
    return bool(t.matrix[np.ix_(k, k)].all()) if k else True


def is_block(t: Tolerance, k: Iterable[int]) -> bool:
    k = _check_subset(t, k)
    if not is_pre_block(t, k):
        return False
    members = set(k)
    rest = [j for j in range(t.size) if j not in members]
    if not rest:
        return True
    # K is maximal iff no outside element is related to all of K
    if not k:
        return False
    return not t.matrix[np.ix_(rest, k)].all(axis=1).any()


DISTANCE_KINDS = ("absolute", "normalized", "discrete", "table")
VARIANTS = ("sum", "ratio")


@dataclass(frozen=True)
class DistanceSpec:
    """Per-attribute distance and the threshold turning it into a tolerance.

    ``variant="sum"`` relates ``a, b`` when ``d(a,b) + d(b,a) <= epsilon``;
    ``variant="ratio"`` when ``s / (1 + s) <= epsilon`` for that same sum
    ``s``.  ``kind="table"`` reads ``d`` from ``table[(a, b)]``; the table may
    be asymmetric.
    """

    attribute: str
    kind: str = "absolute"
    epsilon: float = 0.0
    variant: str = "sum"
    table: Mapping | None = None

    def __post_init__(self):
        if self.kind not in DISTANCE_KINDS:
            raise ParameterError(f"unknown distance kind {self.kind!r}")
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown variant {self.variant!r}")
        if not (self.epsilon >= 0):
            raise ParameterError("epsilon must be nonnegative")
        if self.variant == "ratio" and self.epsilon >= 1:
            raise ParameterError("ratio variant needs epsilon < 1")
        if self.kind == "table" and self.table is None:
            raise ParameterError("table distance needs a table")

    def to_json(self) -> dict:
        out = {
            "attribute": self.attribute,
            "kind": self.kind,
            "epsilon": self.epsilon,
            "variant": self.variant,
        }
        if self.table is not None:
            out["table"] = [[a, b, d] for (a, b), d in sorted(self.table.items(), key=repr)]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "DistanceSpec":
        table = data.get("table")
        if table is not None:
            table = {(a, b): float(d) for a, b, d in table}
        return cls(
            data["attribute"],
            data.get("kind", "absolute"),
            float(data.get("epsilon", 0.0)),
            data.get("variant", "sum"),
            table,
        )


def distance_matrix(values: Sequence, spec: DistanceSpec) -> np.ndarray:
    """``d[i, j] = rho(values[i], values[j])`` under the distance described by ``spec``."""
    n = len(values)
    if spec.kind == "discrete":
        codes = {v: i for i, v in enumerate(dict.fromkeys(values))}
        c = np.array([codes[v] for v in values])
        return (c[:, None] != c[None, :]).astype(float)
    if spec.kind == "table":
        d = np.empty((n, n))
        for i, a in enumerate(values):
            for j, b in enumerate(values):
                if a == b and (a, b) not in spec.table:
                    d[i, j] = 0.0
                    continue
                try:
                    d[i, j] = spec.table[(a, b)]
                except KeyError:
                    raise ParameterError(f"distance table has no entry for ({a!r}, {b!r})") from None
        if np.any(np.diag(d) != 0):
            raise NumericError("distance table gives nonzero self-distance")
        return d
    try:
        x = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        raise NumericError(f"{spec.kind} distance needs numeric values") from None
    if not np.isfinite(x).all():
        raise NumericError(f"non-finite value on attribute {spec.attribute!r}")
    d = np.abs(x[:, None] - x[None, :])
    if spec.kind == "normalized":
        span = np.nanmax(x) - np.nanmin(x) if n else 0.0
        d = d / span if span > 0 else np.zeros_like(d)
    return d


def tolerance_from_distance(values: Sequence, spec: DistanceSpec) -> Tolerance:
    d = distance_matrix(values, spec)
    if not np.isfinite(d).all():
        raise NumericError(f"non-finite distance on attribute {spec.attribute!r}")
    if (d < 0).any():
        raise NumericError(f"negative distance on attribute {spec.attribute!r}")
    s = d + d.T
    if spec.variant == "ratio":
        s = s / (1.0 + s)
    return Tolerance(s <= spec.epsilon)


def combine_tolerances(ts: Sequence[Tolerance], mode: str = "and", k: int | None = None) -> Tolerance:
    """Pairwise AND, OR, or at-least-k vote over equally sized tolerances."""
    if not ts:
        raise ParameterError("nothing to combine")
    sizes = {t.size for t in ts}
    if len(sizes) != 1:
        raise DimensionError(f"tolerance sizes differ: {sorted(sizes)}")
    stack = np.stack([t.matrix for t in ts])
    mode = mode.lower()
    if mode == "and":
        return Tolerance(stack.all(axis=0))
    if mode == "or":
        return Tolerance(stack.any(axis=0))
    if mode in ("at-least", "at_least", "atleast"):
        if k is None or not (1 <= k <= len(ts)):
            raise ParameterError(f"k must lie in 1..{len(ts)}, got {k}")
        return Tolerance(stack.sum(axis=0) >= k)
    raise ParameterError(f"unknown combination mode {mode!r}")


def similarity_matrix(
    t: InformationTable,
    specs: Sequence[DistanceSpec],
    mode: str = "and",
    k: int | None = None,
) -> Tolerance:
    per_attribute = []
    for spec in specs:
        if spec.attribute not in t.attributes:
            raise SchemaError(f"unknown attribute {spec.attribute!r}")
        per_attribute.append(tolerance_from_distance(t.column(spec.attribute), spec))
    return combine_tolerances(per_attribute, mode, k)


def product_tolerance(ts: Sequence[Tolerance]) -> Tolerance:
    """Coordinatewise tolerance on a product; tuples are indexed row-major."""
    if not ts:
        raise ParameterError("product of no factors")
    m = np.ones((1, 1), dtype=bool)
    for t in ts:
        m = np.kron(m, t.matrix).astype(bool)
    return Tolerance(m)


def unravel(index: int, sizes: Sequence[int]) -> tuple[int, ...]:
    """Row-major tuple for a product index."""
    return tuple(int(i) for i in np.unravel_index(index, tuple(sizes)))


def ravel(coords: Sequence[int], sizes: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(coords), tuple(sizes)))


def product_size(sizes: Sequence[int]) -> int:
    return math.prod(sizes)
