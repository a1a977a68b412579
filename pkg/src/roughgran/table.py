"""Information tables: loading, ordering and diffing.

An information table maps every (attribute, object) pair to a finite set of
values.  Single-element sets everywhere make the table deterministic; any
multi-element cell makes it indeterministic.  Ordering operations need a
deterministic table.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO, Union

from .errors import DeterminismError, OrderingError, ParseError, SchemaError

Value = Union[int, float, str]

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


class Comparison(str, enum.Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"
    INCOMPARABLE = "INCOMPARABLE"


def parse_value(token: str) -> Value:
    """Turn a cell token into an int, a float or a stripped string."""
    token = token.strip()
    if _NUMBER.fullmatch(token):
        try:
            return int(token)
        except ValueError:
            return float(token)
    return token


@dataclass(frozen=True)
class InformationTable:
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    valuation: Mapping[tuple[str, str], frozenset]
    decision: str | None = None
    value_order: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if not self.objects:
            raise SchemaError("table has no objects")
        if not self.attributes:
            raise SchemaError("table has no attributes")
        if len(set(self.objects)) != len(self.objects):
            raise SchemaError("duplicate object identifiers")
        if len(set(self.attributes)) != len(self.attributes):
            raise SchemaError("duplicate attribute identifiers")
        if self.decision is not None and self.decision not in self.attributes:
            raise SchemaError(f"decision attribute {self.decision!r} not in table")
        for a in self.attributes:
            for x in self.objects:
                cell = self.valuation.get((a, x))
                if not cell:
                    raise SchemaError(f"missing valuation for ({a!r}, {x!r})")

    @property
    def conditional_attributes(self) -> tuple[str, ...]:
        return tuple(a for a in self.attributes if a != self.decision)

    def __len__(self) -> int:
        return len(self.objects)

    def index(self, obj: str) -> int:
        try:
            return self.objects.index(obj)
        except ValueError:
            raise SchemaError(f"unknown object {obj!r}") from None

    def cell(self, attribute: str, obj: str) -> frozenset:
        return self.valuation[(attribute, obj)]

    def value(self, attribute: str, obj: str) -> Value:
        """The single value of a deterministic cell."""
        cell = self.valuation[(attribute, obj)]
        if len(cell) != 1:
            raise DeterminismError(
                f"cell ({attribute!r}, {obj!r}) holds {len(cell)} values"
            )
        return next(iter(cell))

    def column(self, attribute: str) -> list[Value]:
        if attribute not in self.attributes:
            raise SchemaError(f"unknown attribute {attribute!r}")
        return [self.value(attribute, x) for x in self.objects]

    def is_deterministic(self) -> bool:
        return is_deterministic(self)


def is_deterministic(t: InformationTable) -> bool:
    return all(len(cell) == 1 for cell in t.valuation.values())


def load_table(
    source: TextIO | str,
    *,
    delimiter: str = ",",
    decision: str | None = None,
    separator: str = "|",
    id_column: str | None = None,
    value_order: Mapping[str, Sequence] | None = None,
) -> InformationTable:
    """Read a CSV information table.

    The identifier column defaults to the first header field; every other
    column becomes an attribute.  A cell containing ``separator`` becomes a
    multi-element valuation.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = [r for r in csv.reader(source, delimiter=delimiter)]
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError("empty table")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError(f"duplicate header names: {', '.join(dupes)}")
    if id_column is None:
        id_pos = 0
    elif id_column in header:
        id_pos = header.index(id_column)
    else:
        raise SchemaError(f"id column {id_column!r} not in header")
    attributes = tuple(h for i, h in enumerate(header) if i != id_pos)
    if len(rows) < 2:
        raise SchemaError("table has a header but no rows")

    objects = []
    valuation = {}
    for row_no, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {len(row)}", row=row_no
            )
        obj = row[id_pos].strip()
        objects.append(obj)
        for i, (name, raw) in enumerate(zip(header, row)):
            if i == id_pos:
                continue
            parts = [p for p in raw.split(separator)] if separator else [raw]
            if any(not p.strip() for p in parts):
                raise ParseError(f"missing value in column {name!r}", row=row_no)
            valuation[(name, obj)] = frozenset(parse_value(p) for p in parts)

    order = {a: tuple(parse_value(str(v)) for v in vs) for a, vs in (value_order or {}).items()}
    return InformationTable(tuple(objects), attributes, valuation, decision, order)


def load_value_order(source: TextIO | str) -> dict[str, tuple]:
    """Parse ``attr: v1 < v2 < ...`` lines into explicit value orders."""
    if isinstance(source, str):
        source = io.StringIO(source)
    orders = {}
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 'attribute: v1 < v2 < ...'", row=line_no)
        values = tuple(parse_value(v) for v in rest.split("<"))
        if len(set(values)) != len(values):
            raise ParseError(f"repeated value in order for {name.strip()!r}", row=line_no)
        orders[name.strip()] = values
    return orders


def _sort_key(t: InformationTable, attribute: str):
    values = t.column(attribute)
    numeric = [isinstance(v, (int, float)) for v in values]
    if all(numeric):
        return lambda v: v
    if any(numeric):
        raise OrderingError(f"column {attribute!r} mixes numbers and tokens")
    order = t.value_order.get(attribute)
    if order is None:
        return lambda v: v
    position = {v: i for i, v in enumerate(order)}
    missing = sorted({v for v in values if v not in position})
    if missing:
        raise OrderingError(f"values {missing} of {attribute!r} absent from its value order")
    return position.__getitem__


def column_rank(t: InformationTable, attribute: str) -> dict[str, int]:
    """Dense ranks 0..k-1 of the column values; ties share a rank."""
    key = _sort_key(t, attribute)
    values = t.column(attribute)
    distinct = sorted({key(v) for v in values})
    rank = {k: i for i, k in enumerate(distinct)}
    return {x: rank[key(v)] for x, v in zip(t.objects, values)}


def column_chain(t: InformationTable, attribute: str) -> list[Value]:
    """Distinct values of a column in rank order (the value chain)."""
    key = _sort_key(t, attribute)
    seen = {}
    for v in t.column(attribute):
        seen.setdefault(key(v), v)
    return [seen[k] for k in sorted(seen)]


def _cmp(a, b) -> Comparison:
    if a < b:
        return Comparison.LT
    if a > b:
        return Comparison.GT
    return Comparison.EQ


def lex_compare(
    t: InformationTable, x: str, w: str, attr_order: Sequence[str] | None = None
) -> Comparison:
    """Compare the valuation tuples of two objects lexicographically."""
    for a in attr_order if attr_order is not None else t.conditional_attributes:
        key = _sort_key(t, a)
        c = _cmp(key(t.value(a, x)), key(t.value(a, w)))
        if c is not Comparison.EQ:
            return c
    return Comparison.EQ


def product_compare(t: InformationTable, x: str, w: str) -> Comparison:
    """Coordinatewise dominance over the conditional attributes."""
    below = above = False
    for a in t.conditional_attributes:
        key = _sort_key(t, a)
        c = _cmp(key(t.value(a, x)), key(t.value(a, w)))
        below |= c is Comparison.LT
        above |= c is Comparison.GT
    if below and above:
        return Comparison.INCOMPARABLE
    if below:
        return Comparison.LT
    if above:
        return Comparison.GT
    return Comparison.EQ


CHANGE_KINDS = ("O+", "O-", "O±", "At+", "At-", "At±", "V+")


@dataclass(frozen=True)
class ChangeSet:
    """Transition between two tables, matched by identifier equality.

    ``kinds`` lists one tag per changed dimension (objects, attributes,
    values) in that order; a single transition may carry several.
    """

    kinds: tuple[str, ...] = ()
    added_objects: frozenset = frozenset()
    removed_objects: frozenset = frozenset()
    added_attributes: frozenset = frozenset()
    removed_attributes: frozenset = frozenset()
    modified_cells: frozenset = frozenset()

    @property
    def kind(self) -> str | None:
        """The single tag, ``None`` for no change, or ``"composite"``."""
        if not self.kinds:
            return None
        return self.kinds[0] if len(self.kinds) == 1 else "composite"

    def is_empty(self) -> bool:
        return not self.kinds

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "kinds": list(self.kinds),
            "added_objects": sorted(self.added_objects),
            "removed_objects": sorted(self.removed_objects),
            "added_attributes": sorted(self.added_attributes),
            "removed_attributes": sorted(self.removed_attributes),
            "modified_cells": [list(c) for c in sorted(self.modified_cells)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ChangeSet":
        return cls(
            tuple(data["kinds"]),
            frozenset(data["added_objects"]),
            frozenset(data["removed_objects"]),
            frozenset(data["added_attributes"]),
            frozenset(data["removed_attributes"]),
            frozenset(tuple(c) for c in data["modified_cells"]),
        )


def _tag(prefix: str, added: Iterable, removed: Iterable) -> str | None:
    if added and removed:
        return prefix + "±"
    if added:
        return prefix + "+"
    if removed:
        return prefix + "-"
    return None


def diff_tables(t1: InformationTable, t2: InformationTable) -> ChangeSet:
    o1, o2 = set(t1.objects), set(t2.objects)
    a1, a2 = set(t1.attributes), set(t2.attributes)
    added_o, removed_o = frozenset(o2 - o1), frozenset(o1 - o2)
    added_a, removed_a = frozenset(a2 - a1), frozenset(a1 - a2)
    modified = frozenset(
        (a, x)
        for a in a1 & a2
        for x in o1 & o2
        if t1.cell(a, x) != t2.cell(a, x)
    )
    kinds = [
        _tag("O", added_o, removed_o),
        _tag("At", added_a, removed_a),
        "V+" if modified else None,
    ]
    return ChangeSet(
        tuple(k for k in kinds if k),
        added_o,
        removed_o,
        added_a,
        removed_a,
        modified,
    )
