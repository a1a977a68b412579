"""Semi-supervised tolerance discovery on ordered columns.

Each conditional attribute is discretised into overlapping value intervals
around its quantiles.  The intervals become a block system on the chain of
the attribute's distinct values, and block systems of several attributes
combine into table blocks as products.  Two schemes are provided:

* ``agrssa_m`` fixes one chain block system per attribute (the minimal
  scheme) and returns a single model;
* ``agrssa_lmr`` evaluates every tuple accepted by a large-minded reasoner
  and ranks the resulting models by decision quality.

``explain`` decomposes the approximations of a set into table blocks and the
per-attribute intervals that generate them.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .approximation import RRFDescriptor, approximate
from .chains import ChainBlockSystem, catalan, enumerate_chain_tolerances, validate_lattice_blocks
from .errors import (
    CapacityError,
    ContractError,
    DegenerateColumnError,
    DiscretizationError,
    DomainError,
    ParameterError,
    SchemaError,
)
from .table import InformationTable, column_chain, column_rank
from .tolerance import BlockSystem

log = logging.getLogger(__name__)

E_MODES = ("global", "local", "fixed")
DEFAULT_CAP = 10**6
MAX_CUTS = 16


@dataclass(frozen=True)
class BoundarySpec:
    """Quantile cuts of one column.

    Each cut is a pair ``(q - e, q + e)`` clamped to ``[bottom, top]``.
    Interval ``j`` of the discretisation runs from the lower end of cut
    ``j - 1`` (or ``bottom``) to the upper end of cut ``j`` (or ``top``), so
    neighbouring intervals overlap by ``2e`` around each quantile.
    """

    attribute: str
    q: int
    e_mode: str
    e_fraction: float
    bottom: float
    top: float
    quantiles: tuple[float, ...]
    cuts: tuple[tuple[float, float], ...]

    @property
    def boundaries(self) -> list[float]:
        """``bottom, q1-e1, q1+e1, ..., top`` sorted, with repeats merged.

        Wide offsets can push ``q1+e1`` past ``q2-e2``; the intervals still
        come from the cuts, this list is only their ordered endpoints.
        """
        return sorted({self.bottom, self.top, *(v for cut in self.cuts for v in cut)})

    def value_intervals(self) -> list[tuple[float, float]]:
        los = [self.bottom] + [lo for lo, _ in self.cuts]
        his = [hi for _, hi in self.cuts] + [self.top]
        return list(zip(los, his))

    def with_cuts(self, keep: Iterable[int]) -> "BoundarySpec":
        keep = sorted(set(keep))
        return BoundarySpec(
            self.attribute, self.q, self.e_mode, self.e_fraction, self.bottom, self.top,
            tuple(self.quantiles[i] for i in keep), tuple(self.cuts[i] for i in keep),
        )

    def to_json(self) -> dict:
        return {
            "attribute": self.attribute,
            "q": self.q,
            "e_mode": self.e_mode,
            "e_fraction": self.e_fraction,
            "bottom": self.bottom,
            "top": self.top,
            "quantiles": list(self.quantiles),
            "cuts": [list(c) for c in self.cuts],
            "boundaries": self.boundaries,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BoundarySpec":
        return cls(
            data["attribute"], int(data["q"]), data["e_mode"], float(data["e_fraction"]),
            float(data["bottom"]), float(data["top"]),
            tuple(float(v) for v in data["quantiles"]),
            tuple((float(a), float(b)) for a, b in data["cuts"]),
        )


def quantile_boundaries(
    values: Sequence[float],
    q: int,
    e_mode: str = "global",
    e_fraction: float = 0.25,
    attribute: str = "",
) -> BoundarySpec:
    """Cut a column at its ``q`` interior quantiles (probabilities
    ``j / (q + 1)``, linear interpolation), each widened by ``e``.

    ``e`` is ``e_fraction`` times the column's standard deviation
    (``global``), times the standard deviation of values strictly between
    the neighbouring quantiles (``local``), or ``e_fraction`` itself
    (``fixed``).
    """
    if e_mode not in E_MODES:
        raise ParameterError(f"unknown e_mode {e_mode!r}")
    if e_fraction < 0:
        raise ParameterError("e_fraction must be nonnegative")
    x = np.asarray(values, dtype=float)
    distinct = np.unique(x)
    if len(distinct) < 2:
        raise DegenerateColumnError(f"column {attribute!r} has fewer than two distinct values")
    if not 1 <= q < len(distinct):
        raise ParameterError(f"q must lie in 1..{len(distinct) - 1} for column {attribute!r}, got {q}")
    bottom, top = float(distinct[0]), float(distinct[-1])
    qs = [float(v) for v in np.quantile(x, [j / (q + 1) for j in range(1, q + 1)])]
    if e_mode == "fixed":
        es = [float(e_fraction)] * q
    elif e_mode == "global":
        es = [float(e_fraction * x.std())] * q
    else:
        edges = [bottom] + qs + [top]
        es = []
        for i in range(1, q + 1):
            window = x[(x > edges[i - 1]) & (x < edges[i + 1])]
            es.append(float(e_fraction * window.std()) if len(window) > 1 else 0.0)
    cuts = tuple(
        (min(max(qv - e, bottom), top), min(max(qv + e, bottom), top)) for qv, e in zip(qs, es)
    )
    return BoundarySpec(attribute, q, e_mode, float(e_fraction), bottom, top, tuple(qs), cuts)


def _rank_interval(chain: Sequence[float], lo: float, hi: float) -> tuple[int, int] | None:
    inside = [r for r, v in enumerate(chain) if lo <= v <= hi]
    return (inside[0], inside[-1]) if inside else None


def _repair(k: int, raw: list[tuple[int, int]]) -> tuple[tuple[tuple[int, int], ...], list[str]]:
    notes = []
    ivs = sorted(set(raw), key=lambda iv: (iv[0], -iv[1]))
    kept = []
    for iv in ivs:
        if any(a <= iv[0] and iv[1] <= b for a, b in kept):
            notes.append(f"dropped nested interval {list(iv)}")
            continue
        kept.append(iv)
    if kept[0][0] != 0:
        notes.append(f"widened {list(kept[0])} down to 0")
        kept[0] = (0, kept[0][1])
    if kept[-1][1] != k - 1:
        notes.append(f"widened {list(kept[-1])} up to {k - 1}")
        kept[-1] = (kept[-1][0], k - 1)
    for i in range(len(kept) - 1):
        (a, b), (c, _) = kept[i], kept[i + 1]
        if c > b + 1:
            notes.append(f"widened {[a, b]} to {c - 1} to close a gap")
            kept[i] = (a, c - 1)
    return tuple(kept), notes


def chain_intervals(spec: BoundarySpec, chain: Sequence[float]) -> tuple[ChainBlockSystem, list[str]]:
    """Chain block system for ``spec`` plus the repairs that were needed."""
    k = len(chain)
    wanted = spec.value_intervals()
    if len(wanted) > k:
        raise DiscretizationError(
            f"{len(wanted)} intervals requested on {spec.attribute!r} with only {k} distinct values"
        )
    raw = []
    notes = []
    for lo, hi in wanted:
        iv = _rank_interval(chain, lo, hi)
        if iv is None:
            notes.append(f"dropped empty value interval [{lo}, {hi}]")
        else:
            raw.append(iv)
    if not raw:
        raise DiscretizationError(f"no value of {spec.attribute!r} falls in any interval")
    intervals, more = _repair(k, raw)
    notes.extend(more)
    check = validate_lattice_blocks(k, intervals)
    if not check:
        raise DiscretizationError(f"repair failed on {spec.attribute!r}: {check.violation}")
    for note in notes:
        log.info("%s: %s", spec.attribute or "column", note)
    return ChainBlockSystem(k, intervals), notes


def intervals_to_chain_blocks(spec: BoundarySpec, chain: Sequence[float]) -> ChainBlockSystem:
    """Map value intervals onto the chain of distinct values (``chain[r]`` is
    the value of rank ``r``), repairing the result into a valid block
    system by dropping nested intervals and widening endpoints."""
    return chain_intervals(spec, chain)[0]


def tv_distance(left: Sequence, right: Sequence) -> float:
    """Total-variation distance between two empirical label distributions;
    0 when either side is empty."""
    if not len(left) or not len(right):
        return 0.0
    p, r = Counter(left), Counter(right)
    return 0.5 * sum(abs(p[c] / len(left) - r[c] / len(right)) for c in set(p) | set(r))


def prune_boundaries(
    spec: BoundarySpec, values: Sequence[float], decisions: Sequence, delta: float
) -> BoundarySpec:
    """Keep the cuts across which the decision distribution shifts by at
    least ``delta`` in total variation.

    The comparison windows reach from the previous cut centre (or the
    column minimum) to this one, and from this one to the next (or the
    column maximum).
    """
    if not 0 <= delta <= 1:
        raise ParameterError("delta must lie in [0, 1]")
    if len(values) != len(decisions):
        raise SchemaError("values and decisions differ in length")
    x = np.asarray(values, dtype=float)
    d = np.asarray(decisions, dtype=object)
    centres = [(lo + hi) / 2 for lo, hi in spec.cuts]
    edges = [spec.bottom] + centres + [spec.top]
    keep = []
    for i in range(1, len(edges) - 1):
        left = d[(x >= edges[i - 1]) & (x < edges[i])]
        if i + 1 == len(edges) - 1:
            right = d[(x >= edges[i]) & (x <= edges[i + 1])]
        else:
            right = d[(x >= edges[i]) & (x < edges[i + 1])]
        if tv_distance(list(left), list(right)) >= delta:
            keep.append(i - 1)
    return spec.with_cuts(keep)


def boundary_candidates(spec: BoundarySpec, chain: Sequence[float]) -> list[ChainBlockSystem]:
    """Chain block systems from every subset of the surviving cuts.

    Ordered from all cuts down to none, lexicographically within a size;
    duplicates after repair keep their first position.  Index 0 is the full
    minimal-scheme discretisation.
    """
    f = len(spec.cuts)
    if f > MAX_CUTS:
        raise ParameterError(f"{f} cuts on {spec.attribute!r}; at most {MAX_CUTS} supported")
    out: list[ChainBlockSystem] = []
    for size in range(f, -1, -1):
        for keep in itertools.combinations(range(f), size):
            system = intervals_to_chain_blocks(spec.with_cuts(keep), chain)
            if system not in out:
                out.append(system)
    return out


def seam_tv(system: ChainBlockSystem, ranks: Sequence[int], decisions: Sequence) -> list[float]:
    """Decision shift across each seam between consecutive intervals.

    For intervals ``[a, b]`` and ``[c, d]`` the two sides are the ranks
    ``a..c-1`` (only in the first) and ``b+1..d`` (only in the second).
    """
    r = np.asarray(ranks)
    dec = np.asarray(decisions, dtype=object)
    out = []
    for (a, b), (c, d) in zip(system.intervals, system.intervals[1:]):
        left = dec[(r >= a) & (r < c)]
        right = dec[(r > b) & (r <= d)]
        out.append(tv_distance(list(left), list(right)))
    return out


def _interval_masks(system: ChainBlockSystem, ranks: np.ndarray) -> list[int]:
    masks = []
    for a, b in system.intervals:
        mask = 0
        for o in np.flatnonzero((ranks >= a) & (ranks <= b)):
            mask |= 1 << int(o)
        masks.append(mask)
    return masks


def _members(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def product_blocks(
    systems: Sequence[ChainBlockSystem], ranks: np.ndarray
) -> tuple[BlockSystem, dict[frozenset, tuple[tuple[int, ...], ...]]]:
    """Table blocks as object traces of products of per-attribute intervals.

    ``ranks[o, i]`` is the chain index of object ``o`` on attribute ``i``.
    Empty traces and traces strictly inside another trace are dropped; the
    survivors are the blocks of the product tolerance restricted to the
    objects.  The second result maps each block to every interval-index
    tuple whose trace it is.
    """
    ranks = np.asarray(ranks)
    n_objects = ranks.shape[0]
    for i, s in enumerate(systems):
        if ranks[:, i].min() < 0 or ranks[:, i].max() >= s.n:
            raise ContractError(f"ranks of attribute {i} do not fit a chain of length {s.n}")
    per_attr = [_interval_masks(s, ranks[:, i]) for i, s in enumerate(systems)]
    full = (1 << n_objects) - 1
    traces: dict[int, list[tuple[int, ...]]] = {}
    for combo in itertools.product(*(range(len(m)) for m in per_attr)):
        mask = full
        for i, j in enumerate(combo):
            mask &= per_attr[i][j]
            if not mask:
                break
        if mask:
            traces.setdefault(mask, []).append(combo)
    masks = sorted(traces, key=lambda m: -m.bit_count())
    maximal = []
    for m in masks:
        if not any(m & ~big == 0 for big in maximal):
            maximal.append(m)
    factors = {_members(m): tuple(traces[m]) for m in maximal}
    return BlockSystem(n_objects, tuple(factors)), factors


def decision_quality(bs: BlockSystem, decisions: Sequence) -> float:
    """Share of objects inside the lower approximation of their decision class."""
    classes: dict = {}
    for o, d in enumerate(decisions):
        classes.setdefault(d, set()).add(o)
    positive = set()
    for members in classes.values():
        positive |= approximate(bs, members).lower
    return len(positive) / bs.universe_size


@dataclass(frozen=True)
class ToleranceModel:
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    chains: tuple[tuple, ...]
    per_attribute_blocks: tuple[ChainBlockSystem, ...]
    table_blocks: BlockSystem
    factors: Mapping[frozenset, tuple[tuple[int, ...], ...]]
    decision_quality: float
    provenance: Mapping = field(default_factory=dict)

    def block_factors(self, block: frozenset) -> list[list[dict]]:
        """Per-attribute intervals (as ranks and values) generating ``block``."""
        out = []
        for combo in self.factors[block]:
            parts = []
            for attr, chain, system, j in zip(self.attributes, self.chains, self.per_attribute_blocks, combo):
                a, b = system.intervals[j]
                parts.append({"attribute": attr, "interval": [a, b], "values": [chain[a], chain[b]]})
            out.append(parts)
        return out

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "attributes": list(self.attributes),
            "chains": [list(c) for c in self.chains],
            "per_attribute_blocks": [s.to_json() for s in self.per_attribute_blocks],
            "table_blocks": [
                {
                    "objects": [self.objects[i] for i in sorted(b)],
                    "indices": sorted(b),
                    "factors": [list(c) for c in self.factors[b]],
                }
                for b in self.table_blocks.blocks
            ],
            "decision_quality": self.decision_quality,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ToleranceModel":
        objects = tuple(data["objects"])
        factors = {
            frozenset(b["indices"]): tuple(tuple(c) for c in b["factors"])
            for b in data["table_blocks"]
        }
        return cls(
            objects,
            tuple(data["attributes"]),
            tuple(tuple(c) for c in data["chains"]),
            tuple(ChainBlockSystem.from_json(s) for s in data["per_attribute_blocks"]),
            BlockSystem(len(objects), tuple(factors)),
            factors,
            float(data["decision_quality"]),
            data.get("provenance", {}),
        )

    def __eq__(self, other):
        if not isinstance(other, ToleranceModel):
            return NotImplemented
        return self.to_json() == other.to_json()

    __hash__ = None


@dataclass(frozen=True)
class AttributeConfig:
    q: int = 1
    e_mode: str = "global"
    e_fraction: float = 0.25


SELECTION_RULES = ("max-quality", "top-k", "threshold")


@dataclass(frozen=True)
class Selection:
    rule: str = "max-quality"
    k: int = 1
    theta: float = 0.0

    def __post_init__(self):
        if self.rule not in SELECTION_RULES:
            raise ParameterError(f"unknown selection rule {self.rule!r}")
        if self.rule == "top-k" and self.k < 1:
            raise ParameterError("top-k needs k >= 1")

    def apply(self, ranked: list) -> list:
        if not ranked:
            return []
        if self.rule == "top-k":
            return ranked[: self.k]
        if self.rule == "threshold":
            return [m for m in ranked if m.decision_quality >= self.theta]
        best = ranked[0].decision_quality
        return [m for m in ranked if m.decision_quality == best]

    def to_json(self) -> dict:
        return {"rule": self.rule, "k": self.k, "theta": self.theta}


@dataclass(frozen=True)
class AgrssaConfig:
    """Pipeline settings, usually read from a JSON config file.

    ``psi`` keeps the raw reasoner description: ``candidates`` maps each
    attribute to ``"all"``, ``"boundaries"`` or a list of indices into the
    attribute's universal block distribution; ``filter`` maps attributes to
    allowlists of such indices (a conjunction).
    """

    attributes: Mapping[str, AttributeConfig] = field(default_factory=dict)
    delta: float = 0.0
    sigma: tuple[int, ...] | None = None
    psi: Mapping | None = None
    selection: Selection = Selection()
    cap: int = DEFAULT_CAP

    @classmethod
    def from_json(cls, data: Mapping) -> "AgrssaConfig":
        attrs = {
            name: AttributeConfig(int(v.get("q", 1)), v.get("e_mode", "global"), float(v.get("e_fraction", 0.25)))
            for name, v in data.get("attributes", {}).items()
        }
        sel = data.get("selection", {})
        if isinstance(sel, str):
            sel = {"rule": sel}
        sigma = data.get("sigma")
        return cls(
            attrs,
            float(data.get("delta", 0.0)),
            tuple(int(s) for s in sigma) if sigma is not None else None,
            data.get("psi"),
            Selection(sel.get("rule", "max-quality"), int(sel.get("k", 1)), float(sel.get("theta", 0.0))),
            int(data.get("cap", DEFAULT_CAP)),
        )

    def to_json(self) -> dict:
        return {
            "attributes": {
                a: {"q": c.q, "e_mode": c.e_mode, "e_fraction": c.e_fraction}
                for a, c in self.attributes.items()
            },
            "delta": self.delta,
            "sigma": list(self.sigma) if self.sigma is not None else None,
            "psi": self.psi,
            "selection": self.selection.to_json(),
            "cap": self.cap,
        }


@dataclass(frozen=True)
class PreparedTable:
    """Deterministic table reduced to chain ranks and decisions."""

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    chains: tuple[tuple, ...]
    ranks: np.ndarray
    decisions: tuple

    def column_values(self, i: int) -> np.ndarray:
        """Numeric stand-ins for column ``i``: the values when numeric, else ranks."""
        chain = self.chains[i]
        if all(isinstance(v, (int, float)) for v in chain):
            return np.asarray([chain[r] for r in self.ranks[:, i]], dtype=float)
        return self.ranks[:, i].astype(float)

    def numeric_chain(self, i: int) -> list[float]:
        chain = self.chains[i]
        if all(isinstance(v, (int, float)) for v in chain):
            return [float(v) for v in chain]
        return [float(r) for r in range(len(chain))]


def prepare(t: InformationTable, attributes: Sequence[str] | None = None) -> PreparedTable:
    if t.decision is None:
        raise SchemaError("a decision attribute is required")
    attrs = tuple(attributes) if attributes else t.conditional_attributes
    if not attrs:
        raise SchemaError("no conditional attributes")
    chains = tuple(tuple(column_chain(t, a)) for a in attrs)
    ranks = np.array([[column_rank(t, a)[x] for a in attrs] for x in t.objects], dtype=int)
    return PreparedTable(t.objects, attrs, chains, ranks, tuple(t.column(t.decision)))


def _model(
    prep: PreparedTable, systems: Sequence[ChainBlockSystem], provenance: Mapping
) -> ToleranceModel:
    bs, factors = product_blocks(systems, prep.ranks)
    return ToleranceModel(
        prep.objects, prep.attributes, prep.chains, tuple(systems), bs, factors,
        decision_quality(bs, prep.decisions), provenance,
    )


def minimal_scheme(t: InformationTable, config: AgrssaConfig):
    """Boundary specs and candidate chain systems of every attribute."""
    attrs = tuple(config.attributes) or t.conditional_attributes
    prep = prepare(t, attrs)
    specs, candidates = [], []
    for i, attr in enumerate(prep.attributes):
        ac = config.attributes.get(attr, AttributeConfig())
        values = prep.column_values(i)
        if len(prep.chains[i]) == 1:
            log.info("%s: constant column, using the total tolerance", attr)
            specs.append(None)
            candidates.append([ChainBlockSystem.total(1)])
            continue
        spec = quantile_boundaries(values, ac.q, ac.e_mode, ac.e_fraction, attr)
        pruned = prune_boundaries(spec, values, prep.decisions, config.delta)
        specs.append(pruned)
        candidates.append(boundary_candidates(pruned, prep.numeric_chain(i)))
    return prep, specs, candidates


def agrssa_m(t: InformationTable, config: AgrssaConfig = AgrssaConfig()) -> ToleranceModel:
    """Minimal scheme: quantile cuts, decision-driven pruning, and one chain
    block system per attribute chosen by ``config.sigma`` (default all
    zeros, the full pruned discretisation)."""
    prep, specs, candidates = minimal_scheme(t, config)
    sigma = config.sigma if config.sigma is not None else (0,) * len(candidates)
    if len(sigma) != len(candidates):
        raise ParameterError(f"sigma has {len(sigma)} entries for {len(candidates)} attributes")
    for attr, s, cands in zip(prep.attributes, sigma, candidates):
        if not 0 <= s < len(cands):
            raise ParameterError(f"sigma index {s} out of range 0..{len(cands) - 1} for {attr!r}")
    systems = [cands[s] for s, cands in zip(sigma, candidates)]
    provenance = {
        "scheme": "agrssa-m",
        "sigma": list(sigma),
        "delta": config.delta,
        "boundaries": [s.to_json() if s is not None else None for s in specs],
        "candidate_counts": [len(c) for c in candidates],
    }
    return _model(prep, systems, provenance)


def ubd_chain(n: int):
    return enumerate_chain_tolerances(n)


@dataclass(frozen=True)
class LargeMindedReasoner:
    """Partial map from tuples of per-attribute chain block systems to table
    block systems.

    A tuple of candidate positions is in the domain when it passes the
    per-attribute ``allow`` lists and the optional ``domain_filter``.
    ``labels`` name candidates in provenance and allowlists: the index in
    the universal block distribution, or the position among minimal-scheme
    candidates.
    """

    attributes: tuple[str, ...]
    candidates: tuple[tuple[ChainBlockSystem, ...], ...]
    domain_filter: Callable[[tuple[int, ...]], bool] | None = None
    allow: tuple[frozenset | None, ...] | None = None
    labels: tuple[tuple, ...] | None = None
    combiner: Callable = product_blocks

    def __post_init__(self):
        if len(self.attributes) != len(self.candidates):
            raise ParameterError("one candidate list per attribute is required")
        if self.allow is not None and len(self.allow) != len(self.candidates):
            raise ParameterError("one allowlist (or None) per attribute is required")

    def allowed(self) -> list[list[int]]:
        out = []
        for i, cands in enumerate(self.candidates):
            ok = self.allow[i] if self.allow is not None else None
            out.append([j for j in range(len(cands)) if ok is None or j in ok])
        return out

    def in_domain(self, combo: Sequence[int]) -> bool:
        combo = tuple(combo)
        if len(combo) != len(self.candidates):
            return False
        for i, j in enumerate(combo):
            if not 0 <= j < len(self.candidates[i]):
                return False
            if self.allow is not None and self.allow[i] is not None and j not in self.allow[i]:
                return False
        return self.domain_filter is None or bool(self.domain_filter(combo))

    def label(self, combo: Sequence[int]) -> list:
        if self.labels is None:
            return list(combo)
        return [self.labels[i][j] for i, j in enumerate(combo)]


def _as_indices(psi: LargeMindedReasoner, combo) -> tuple[int, ...]:
    out = []
    for i, item in enumerate(combo):
        if isinstance(item, ChainBlockSystem):
            try:
                out.append(psi.candidates[i].index(item))
            except ValueError:
                raise DomainError(f"system {item.intervals} is not a candidate for {psi.attributes[i]!r}") from None
        else:
            out.append(int(item))
    return tuple(out)


def lmr_apply(psi: LargeMindedReasoner, combo, ranks: np.ndarray) -> BlockSystem:
    """Table block system for one tuple (candidate positions or systems)."""
    idx = _as_indices(psi, combo)
    if not psi.in_domain(idx):
        raise DomainError(f"tuple {list(idx)} is outside the reasoner's domain")
    systems = [psi.candidates[i][j] for i, j in enumerate(idx)]
    return psi.combiner(systems, ranks)[0]


@dataclass(frozen=True)
class RankedModels:
    models: tuple[ToleranceModel, ...]
    evaluated: int
    notice: str | None = None

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __getitem__(self, i):
        return self.models[i]

    def to_json(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "notice": self.notice,
            "models": [m.to_json() for m in self.models],
        }


def _domain_size(psi: LargeMindedReasoner, allowed: list[list[int]], cap: int) -> int:
    total = math.prod(len(a) for a in allowed)
    if total <= cap:
        return total
    sizes = ", ".join(f"{a}={len(s)}" for a, s in zip(psi.attributes, allowed))
    if psi.domain_filter is None:
        raise CapacityError(f"{total} candidate tuples exceed cap {cap} ({sizes})")
    count = 0
    for combo in itertools.product(*allowed):
        if psi.domain_filter(combo):
            count += 1
            if count > cap:
                raise CapacityError(f"more than {cap} in-domain tuples ({sizes})")
    return count


def agrssa_lmr(
    t: InformationTable,
    psi: LargeMindedReasoner,
    delta: float = 0.0,
    selection: Selection = Selection(),
    cap: int = DEFAULT_CAP,
    provenance: Mapping | None = None,
) -> RankedModels:
    """Evaluate every in-domain tuple of ``psi`` and rank by decision quality.

    Candidates whose seams show a decision shift below ``delta`` are
    removed from the domain first.  Ties are broken by the candidate index
    tuple.
    """
    prep = prepare(t, psi.attributes)
    for i, cands in enumerate(psi.candidates):
        for s in cands:
            if s.n != len(prep.chains[i]):
                raise ParameterError(
                    f"candidate on L_{s.n} for {psi.attributes[i]!r}, whose chain has {len(prep.chains[i])} values"
                )
    allowed = psi.allowed()
    if delta > 0:
        allowed = [
            [j for j in alist
             if all(tv >= delta for tv in seam_tv(psi.candidates[i][j], prep.ranks[:, i], prep.decisions))]
            for i, alist in enumerate(allowed)
        ]
    _domain_size(psi, allowed, cap)
    scored = []
    for combo in itertools.product(*allowed):
        if psi.domain_filter is not None and not psi.domain_filter(combo):
            continue
        systems = [psi.candidates[i][j] for i, j in enumerate(combo)]
        bs, factors = psi.combiner(systems, prep.ranks)
        meta = {"scheme": "agrssa-lmr", "instance": list(combo), "labels": psi.label(combo), "delta": delta}
        meta.update(provenance or {})
        scored.append((combo, ToleranceModel(
            prep.objects, prep.attributes, prep.chains, tuple(systems), bs, factors,
            decision_quality(bs, prep.decisions), meta,
        )))
    if not scored:
        return RankedModels((), 0, "empty domain: the reasoner accepts no candidate tuple")
    scored.sort(key=lambda cm: (-cm[1].decision_quality, cm[0]))
    chosen = selection.apply([m for _, m in scored])
    return RankedModels(tuple(chosen), len(scored))


def build_reasoner(t: InformationTable, config: AgrssaConfig) -> LargeMindedReasoner:
    """Reasoner described by ``config.psi``.

    Without ``psi`` the candidates are the minimal-scheme candidates of each
    attribute.  ``"all"`` takes the whole universal block distribution of
    the attribute's chain, subject to ``config.cap``.
    """
    psi_cfg = config.psi or {}
    cand_cfg = psi_cfg.get("candidates", "boundaries")
    attrs = tuple(config.attributes) or t.conditional_attributes
    prep = prepare(t, attrs)
    boundary = None
    candidates, labels = [], []
    for i, attr in enumerate(prep.attributes):
        choice = cand_cfg.get(attr, "boundaries") if isinstance(cand_cfg, Mapping) else cand_cfg
        k = len(prep.chains[i])
        if choice == "boundaries":
            if boundary is None:
                boundary = minimal_scheme(t, config)[2]
            candidates.append(tuple(boundary[i]))
            labels.append(tuple(range(len(boundary[i]))))
            continue
        if catalan(k) > config.cap:
            raise CapacityError(f"universal block distribution of {attr!r} (L_{k}) has {catalan(k)} systems, above cap {config.cap}")
        ubd = enumerate_chain_tolerances(k)
        idx = list(range(len(ubd))) if choice in ("all", "ubd") else [int(j) for j in choice]
        for j in idx:
            if not 0 <= j < len(ubd):
                raise ParameterError(f"UBD index {j} out of range for {attr!r} (L_{k} has {len(ubd)})")
        candidates.append(tuple(ubd[j] for j in idx))
        labels.append(tuple(idx))
    allow = None
    flt = psi_cfg.get("filter")
    if flt:
        allow = tuple(
            frozenset(j for j, lab in enumerate(labels[i]) if lab in {int(v) for v in flt[attr]})
            if attr in flt else None
            for i, attr in enumerate(prep.attributes)
        )
    return LargeMindedReasoner(prep.attributes, tuple(candidates), None, allow, tuple(labels))


@dataclass(frozen=True)
class Explanation:
    query: frozenset
    lower: frozenset
    upper: frozenset
    lower_parts: tuple[tuple[frozenset, list], ...]
    upper_parts: tuple[tuple[frozenset, list], ...]

    def to_json(self, objects: Sequence[str]) -> dict:
        def parts(ps):
            return [
                {"block": [objects[i] for i in sorted(b)], "indices": sorted(b), "factors": f}
                for b, f in ps
            ]

        return {
            "query": [objects[i] for i in sorted(self.query)],
            "lower": [objects[i] for i in sorted(self.lower)],
            "upper": [objects[i] for i in sorted(self.upper)],
            "lower_parts": parts(self.lower_parts),
            "upper_parts": parts(self.upper_parts),
        }

    def render(self, objects: Sequence[str]) -> str:
        lines = []
        for name, approx, ps in (("lower", self.lower, self.lower_parts), ("upper", self.upper, self.upper_parts)):
            lines.append(f"{name}: {{{', '.join(objects[i] for i in sorted(approx))}}}")
            for b, factors in ps:
                members = ", ".join(objects[i] for i in sorted(b))
                shapes = " or ".join(
                    " x ".join(f"{p['attribute']} in [{p['values'][0]}, {p['values'][1]}]" for p in combo)
                    for combo in factors
                )
                lines.append(f"  {{{members}}} = {shapes}")
        return "\n".join(lines)


def explain(model: ToleranceModel, x: Iterable[int]) -> Explanation:
    approx = approximate(model.table_blocks, x)
    blocks = model.table_blocks.blocks

    def parts(indices):
        return tuple((blocks[i], model.block_factors(blocks[i])) for i in indices)

    return Explanation(approx.query, approx.lower, approx.upper,
                       parts(approx.lower_blocks), parts(approx.upper_blocks))


def explain_descriptor(model: ToleranceModel) -> RRFDescriptor:
    """The interpreted reasoner as a type-H map ``(operator, X)`` to the
    factored blocks of that approximation."""

    def run(arg):
        op, x = arg
        e = explain(model, x)
        return e.lower_parts if op == "l" else e.upper_parts

    blocks = set(model.table_blocks.blocks)
    size = model.table_blocks.universe_size
    return RRFDescriptor(
        "type-H",
        run,
        lambda arg: len(arg) == 2 and arg[0] in ("l", "u") and all(0 <= i < size for i in arg[1]),
        lambda out: all(b in blocks for b, _ in out),
        "{l, u} x subsets of objects",
        "factored table blocks",
        partial=True,
    )
