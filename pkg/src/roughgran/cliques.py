"""Maximal clique enumeration on bitset adjacency.

Vertices are ``0..n-1`` and ``adj[v]`` is an int whose bit ``u`` is set when
``u`` and ``v`` are adjacent (no self loops).  The search is Bron-Kerbosch
with Tomita pivoting, run from an explicit stack so deep cliques do not hit
the recursion limit.  Above ``DEGENERACY_THRESHOLD`` vertices the outer
level follows a degeneracy ordering (Eppstein, Loffler and Strash).
"""

from __future__ import annotations

from typing import Iterator, Sequence

DEGENERACY_THRESHOLD = 256


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def degeneracy_order(adj: Sequence[int]) -> list[int]:
    n = len(adj)
    alive = (1 << n) - 1
    degree = [a.bit_count() for a in adj]
    order = []
    for _ in range(n):
        v = min(iter_bits(alive), key=lambda u: (degree[u], u))
        order.append(v)
        alive &= ~(1 << v)
        for u in iter_bits(adj[v] & alive):
            degree[u] -= 1
    return order


def _expand(adj: Sequence[int], r: int, p: int, x: int, out: list[int]) -> None:
    stack = [(r, p, x)]
    while stack:
        r, p, x = stack.pop()
        if not p:
            if not x:
                out.append(r)
            continue
        pivot = max(iter_bits(p | x), key=lambda u: ((p & adj[u]).bit_count(), -u))
        children = []
        for v in iter_bits(p & ~adj[pivot]):
            bit = 1 << v
            children.append((r | bit, p & adj[v], x & adj[v]))
            p &= ~bit
            x |= bit
        stack.extend(reversed(children))


def maximal_cliques(adj: Sequence[int]) -> list[int]:
    """All maximal cliques as bitmasks, in no particular order."""
    n = len(adj)
    out: list[int] = []
    if n == 0:
        return out
    if n <= DEGENERACY_THRESHOLD:
        _expand(adj, 0, (1 << n) - 1, 0, out)
        return out
    position = {v: i for i, v in enumerate(degeneracy_order(adj))}
    later_mask = [0] * n
    for v in range(n):
        later_mask[v] = sum(1 << u for u in iter_bits(adj[v]) if position[u] > position[v])
    for v in sorted(range(n), key=position.__getitem__):
        _expand(adj, 1 << v, later_mask[v], adj[v] & ~later_mask[v], out)
    return out
