"""Switching equivalence, balance and exact minimum signatures."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import SignedGraph, StructuralError, bridges, components

DEFAULT_SWITCH_LIMIT = int(os.environ.get("SIGCOVER_SWITCH_LIMIT", "24"))
_CHUNK_BITS = 16


class InexactSignatureError(RuntimeError):
    """The exact search was not run; carries the best signature count found."""

    def __init__(self, message: str, best_bound: int):
        self.best_bound = best_bound
        super().__init__(message)


@dataclass(frozen=True)
class Switching:
    vertices: frozenset[int]

    @classmethod
    def of(cls, vs) -> "Switching":
        return cls(frozenset(vs))


@dataclass(frozen=True)
class SignatureStats:
    eps: int
    eps_tilde: int


def apply_switching(g: SignedGraph, s: Switching) -> SignedGraph:
    """Negate every non-loop edge with exactly one endpoint in the switched set."""
    for v in s.vertices:
        if not g.has_vertex(v):
            raise StructuralError(f"switching references unknown vertex {v}")
    flips = {e.id: -e.sign for e in g.edges if (e.u in s.vertices) != (e.v in s.vertices)}
    return g.with_signs(flips)


def balancing_switch(g: SignedGraph) -> Switching | None:
    """A switching that makes ``g`` all-positive, or None if ``g`` is unbalanced.

    Propagates a potential along a spanning forest and checks every other edge.
    """
    side: dict[int, int] = {}
    adj = g.adjacency()
    for root in g.vertices:
        if root in side:
            continue
        side[root] = 0
        q = deque([root])
        while q:
            x = q.popleft()
            for e in adj[x]:
                y = e.other(x)
                want = side[x] ^ (1 if e.sign < 0 else 0)
                if e.is_loop:
                    if e.sign < 0:
                        return None
                    continue
                if y in side:
                    if side[y] != want:
                        return None
                else:
                    side[y] = want
                    q.append(y)
    return Switching(frozenset(v for v, b in side.items() if b))


def is_balanced(g: SignedGraph) -> bool:
    """Every circuit carries an even number of negative edges."""
    return balancing_switch(g) is not None


def signature_stats(g: SignedGraph) -> SignatureStats:
    br = bridges(g)
    eps = g.negative_count()
    return SignatureStats(eps, eps - sum(1 for i in br if g.sign(i) < 0))


def _minimum_switch_component(g: SignedGraph, limit: int) -> tuple[int, frozenset[int]]:
    verts = list(g.vertices)
    fixed_neg = sum(1 for e in g.edges if e.is_loop and e.sign < 0)
    plain = [e for e in g.edges if not e.is_loop]
    if not plain:
        return fixed_neg, frozenset()
    if balancing_switch(g.without([e.id for e in g.edges if e.is_loop])) is not None:
        sw = balancing_switch(g.without([e.id for e in g.edges if e.is_loop]))
        # normalise so the first vertex is never switched
        vs = sw.vertices
        if verts[0] in vs:
            vs = frozenset(verts) - vs
        return fixed_neg, vs
    free = verts[1:]
    k = len(free)
    if len(verts) > limit:
        raise InexactSignatureError(
            f"component with {len(verts)} vertices exceeds exact switching limit {limit}",
            best_bound=g.negative_count(),
        )
    pos = {v: i for i, v in enumerate(free)}
    # vertex verts[0] is never switched: column index -1 means "constant 0"
    us = np.array([pos.get(e.u, -1) for e in plain])
    vs_ = np.array([pos.get(e.v, -1) for e in plain])
    neg = np.array([1 if e.sign < 0 else 0 for e in plain], dtype=np.int8)
    best_val = None
    best_mask = 0
    total = 1 << k
    chunk = 1 << min(k, _CHUNK_BITS)
    shifts = np.arange(k, dtype=np.int64)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.int8)
        bits = np.concatenate([bits, np.zeros((len(masks), 1), dtype=np.int8)], axis=1)
        flipped = bits[:, us] ^ bits[:, vs_]
        counts = (flipped ^ neg[None, :]).sum(axis=1)
        i = int(np.argmin(counts))
        val = int(counts[i])
        if best_val is None or val < best_val:
            best_val = val
            best_mask = int(masks[i])
    chosen = frozenset(v for v in free if best_mask >> pos[v] & 1)
    return best_val + fixed_neg, chosen


def minimum_signature(g: SignedGraph, limit: int = DEFAULT_SWITCH_LIMIT) -> tuple[SignedGraph, Switching, int]:
    """Equivalent signature with the fewest negative edges, by exhaustive switching.

    Each component is searched over all switchings that keep its first vertex
    fixed; among optima the one with the smallest bitmask (bit ``i`` for the
    ``i``-th free vertex) wins.  Negative loops cannot be switched away and are
    counted as a constant.
    """
    total = 0
    switched: set[int] = set()
    for comp in components(g):
        val, vs = _minimum_switch_component(comp, limit)
        total += val
        switched |= vs
    sw = Switching(frozenset(switched))
    return apply_switching(g, sw), sw, total


MINSIG_AUDIT_LIMIT = int(os.environ.get("SIGCOVER_MINSIG_AUDIT_LIMIT", "12"))


@dataclass(frozen=True)
class CutViolation:
    """An edge cut with more negative than positive edges."""

    side: frozenset[int]
    negative: int
    positive: int


def minsig_cut_violations(g: SignedGraph, limit: int = MINSIG_AUDIT_LIMIT) -> list[CutViolation]:
    """Every vertex bipartition whose cut holds more negative than positive edges.

    A minimum signature has none, since switching one side would lower the
    negative count.  Exhaustive over ``2^(n-1)`` sides; raises
    :class:`InexactSignatureError` above ``limit`` vertices.
    """
    verts = list(g.vertices)
    if len(verts) > limit:
        raise InexactSignatureError(f"{len(verts)} vertices exceed the cut audit limit {limit}", g.negative_count())
    plain = [e for e in g.edges if not e.is_loop]
    if len(verts) < 2 or not plain:
        return []
    free = verts[1:]
    pos = {v: i for i, v in enumerate(free)}
    us = np.array([pos.get(e.u, len(free)) for e in plain])
    vs_ = np.array([pos.get(e.v, len(free)) for e in plain])
    neg = np.array([e.sign < 0 for e in plain])
    masks = np.arange(1, 1 << len(free), dtype=np.int64)
    bits = (masks[:, None] >> np.arange(len(free), dtype=np.int64)[None, :]) & 1
    bits = np.concatenate([bits, np.zeros((len(masks), 1), dtype=np.int64)], axis=1).astype(bool)
    cut = bits[:, us] ^ bits[:, vs_]
    n_neg = (cut & neg[None, :]).sum(axis=1)
    n_pos = (cut & ~neg[None, :]).sum(axis=1)
    out = []
    for i in np.nonzero(n_neg > n_pos)[0]:
        side = frozenset(v for v in free if masks[i] >> pos[v] & 1)
        out.append(CutViolation(side, int(n_neg[i]), int(n_pos[i])))
    return out
