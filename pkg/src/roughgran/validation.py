"""Validation of soft and hard clusterings against a granular rough model.

The clustering is given; the model comes from per-attribute distance
tolerances combined into one tolerance over objects.  Each core (and
optionally each exterior) is approximated by the blocks of that tolerance,
and a cluster is trusted when its approximations stay close to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .approximation import GranularApproximation, accuracy, approximate, xi5
from .checks import PASS, Check
from .errors import BoundsError, ParameterError, SchemaError
from .table import InformationTable
from .tolerance import BlockSystem, DistanceSpec, blocks, similarity_matrix

VALID, MARGINAL, INVALID = "valid", "marginal", "invalid"


@dataclass(frozen=True)
class Cluster:
    core: frozenset
    exterior: frozenset = frozenset()


@dataclass(frozen=True)
class SoftClustering:
    clusters: tuple[Cluster, ...]
    kind: str = "soft"

    def __post_init__(self):
        if self.kind not in ("soft", "hard"):
            raise ParameterError(f"clustering kind must be soft or hard, got {self.kind!r}")

    @classmethod
    def hard(cls, cores: Sequence) -> "SoftClustering":
        return cls(tuple(Cluster(frozenset(c)) for c in cores), "hard")

    @classmethod
    def from_json(cls, data: Mapping, objects: Sequence[str]) -> "SoftClustering":
        """Build from ``{"kind": ..., "clusters": [{"core": [ids], "exterior": [ids]}]}``."""
        position = {o: i for i, o in enumerate(objects)}

        def indices(ids):
            try:
                return frozenset(position[str(o)] for o in ids)
            except KeyError as exc:
                raise SchemaError(f"clustering names unknown object {exc.args[0]!r}") from None

        clusters = tuple(
            Cluster(indices(c.get("core", [])), indices(c.get("exterior", [])))
            for c in data["clusters"]
        )
        return cls(clusters, data.get("kind", "soft"))

    def to_json(self, objects: Sequence[str]) -> dict:
        return {
            "kind": self.kind,
            "clusters": [
                {
                    "core": [objects[i] for i in sorted(c.core)],
                    "exterior": [objects[i] for i in sorted(c.exterior)],
                }
                for c in self.clusters
            ],
        }


def check_clustering(c: SoftClustering, universe_size: int) -> Check:
    for i, cl in enumerate(c.clusters):
        for x in cl.core | cl.exterior:
            if not 0 <= x < universe_size:
                return Check(False, f"cluster {i} names element {x} outside the universe")
    for i, a in enumerate(c.clusters):
        for j in range(i + 1, len(c.clusters)):
            if a.core & c.clusters[j].core:
                return Check(False, f"cores not disjoint: clusters {i} and {j}")
    for i, cl in enumerate(c.clusters):
        if cl.core & cl.exterior:
            return Check(False, f"exterior meets own core in cluster {i}")
    if c.kind == "hard":
        if any(cl.exterior for cl in c.clusters):
            return Check(False, "hard clustering with a nonempty exterior")
        covered = frozenset().union(*(cl.core for cl in c.clusters))
        if len(covered) != universe_size:
            return Check(False, "hard clustering cores do not cover the universe")
    return PASS


def closeness(bs: BlockSystem, x) -> float:
    """1 minus the mean of two escape shares: the part of ``X`` missed by its
    lower approximation and the part of its upper approximation outside it."""
    approx = approximate(bs, x)
    if not approx.query:
        return 1.0
    return 1.0 - 0.5 * (xi5(approx.lower, approx.query) + xi5(approx.query, approx.upper))


@dataclass(frozen=True)
class Thresholds:
    valid: float = 0.8
    invalid: float = 0.5

    def __post_init__(self):
        if not self.invalid <= self.valid:
            raise ParameterError("invalid threshold must not exceed the valid threshold")

    def verdict(self, score: float) -> str:
        if score >= self.valid:
            return VALID
        if score < self.invalid:
            return INVALID
        return MARGINAL


@dataclass(frozen=True)
class ClusterScore:
    core: GranularApproximation
    exterior: GranularApproximation
    core_accuracy: float
    core_closeness: float
    exterior_closeness: float
    score: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "core": self.core.to_json(),
            "exterior": self.exterior.to_json(),
            "core_accuracy": self.core_accuracy,
            "core_closeness": self.core_closeness,
            "exterior_closeness": self.exterior_closeness,
            "score": self.score,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ValidationReport:
    per_cluster: tuple[ClusterScore, ...]
    overall: float
    verdict: str
    model: Mapping
    thresholds: Thresholds

    def to_json(self) -> dict:
        return {
            "per_cluster": [c.to_json() for c in self.per_cluster],
            "overall": self.overall,
            "verdict": self.verdict,
            "thresholds": {"valid": self.thresholds.valid, "invalid": self.thresholds.invalid},
            "model": dict(self.model),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ValidationReport":
        per_cluster = tuple(
            ClusterScore(
                GranularApproximation.from_json(c["core"]),
                GranularApproximation.from_json(c["exterior"]),
                c["core_accuracy"],
                c["core_closeness"],
                c["exterior_closeness"],
                c["score"],
                c["verdict"],
            )
            for c in data["per_cluster"]
        )
        th = data["thresholds"]
        return cls(per_cluster, data["overall"], data["verdict"], data["model"],
                   Thresholds(th["valid"], th["invalid"]))


def validate_blocks(
    bs: BlockSystem,
    c: SoftClustering,
    thresholds: Thresholds = Thresholds(),
    include_exteriors: bool = False,
    model: Mapping | None = None,
) -> ValidationReport:
    """Score a clustering against an already computed block system."""
    check = check_clustering(c, bs.universe_size)
    if not check:
        raise ParameterError(f"invalid clustering: {check.violation}")
    scores = []
    weighted = weight = 0.0
    for cl in c.clusters:
        core_c = closeness(bs, cl.core)
        ext_c = closeness(bs, cl.exterior)
        if include_exteriors and cl.exterior:
            n_core, n_ext = len(cl.core), len(cl.exterior)
            score = (core_c * n_core + ext_c * n_ext) / (n_core + n_ext)
            weighted += core_c * n_core + ext_c * n_ext
            weight += n_core + n_ext
        else:
            score = core_c
            weighted += core_c * len(cl.core)
            weight += len(cl.core)
        scores.append(ClusterScore(
            approximate(bs, cl.core),
            approximate(bs, cl.exterior),
            accuracy(bs, cl.core),
            core_c,
            ext_c,
            score,
            thresholds.verdict(score),
        ))
    overall = weighted / weight if weight else 1.0
    if overall >= thresholds.valid and all(s.verdict != INVALID for s in scores):
        verdict = VALID
    elif overall < thresholds.invalid:
        verdict = INVALID
    else:
        verdict = MARGINAL
    provenance = {"blocks": bs.to_json()}
    provenance.update(model or {})
    return ValidationReport(tuple(scores), overall, verdict, provenance, thresholds)


def validate_clusters(
    t: InformationTable,
    c: SoftClustering,
    specs: Sequence[DistanceSpec],
    mode: str = "and",
    k: int | None = None,
    thresholds: Thresholds = Thresholds(),
    include_exteriors: bool = False,
) -> ValidationReport:
    """Build the combined tolerance of ``t``, take its blocks and score ``c``."""
    if any(x >= len(t) for cl in c.clusters for x in cl.core | cl.exterior):
        raise BoundsError("clustering refers to objects beyond the table")
    tol = similarity_matrix(t, specs, mode, k)
    bs = blocks(tol)
    model = {
        "objects": list(t.objects),
        "distances": [s.to_json() for s in specs],
        "mode": mode,
        "k": k,
    }
    return validate_blocks(bs, c, thresholds, include_exteriors, model)
