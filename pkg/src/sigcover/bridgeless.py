"""Circuit covers of bridgeless balanced graphs: exact at small size, greedy beyond."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .circuits import EnumerationCapExceeded, enumerate_circuits
from .graph import SignedGraph, StructuralError, bfs_path, bridges, components, is_circuit
from .setcover import min_set_cover
from .signature import is_balanced

EXACT_EDGE_LIMIT = int(os.environ.get("SIGCOVER_EXACT_LIMIT", "16"))
CIRCUIT_CAP = int(os.environ.get("SIGCOVER_CIRCUIT_CAP", "200000"))


class OverLimit(RuntimeError):
    """The exact solver was asked to handle more edges than it is configured for."""


@dataclass(frozen=True)
class PositiveCover:
    """Multiset of circuits covering every edge of a bridgeless balanced graph.

    ``exact`` says the length is optimal; ``certified`` says it meets the
    5/3 bound.
    """

    circuits: tuple[frozenset[int], ...]
    m: int
    n: int
    exact: bool
    certified: bool = field(default=False)

    @property
    def length(self) -> int:
        return sum(len(c) for c in self.circuits)

    def widths(self) -> Counter:
        w: Counter = Counter()
        for c in self.circuits:
            w.update(c)
        return w

    @property
    def meets_fan_bound(self) -> bool:
        return self.length <= self.n + self.m - 1 if self.m else True


def _check_input(g: SignedGraph) -> None:
    if bridges(g):
        raise StructuralError("graph has a bridge")
    if not is_balanced(g):
        raise StructuralError("graph is unbalanced")


def _component_graphs(g: SignedGraph) -> list[SignedGraph]:
    return [c for c in components(g) if c.m]


def exact_min_circuit_cover(g: SignedGraph, limit: int = EXACT_EDGE_LIMIT,
                            cap: int = CIRCUIT_CAP) -> PositiveCover:
    """Shortest circuit cover by exact set cover over all circuits.

    Components are solved independently.  Raises :class:`OverLimit` when a
    component has more than ``limit`` edges and
    :class:`EnumerationCapExceeded` when circuit enumeration overflows.
    """
    _check_input(g)
    chosen: list[frozenset[int]] = []
    for comp in _component_graphs(g):
        if comp.m > limit:
            raise OverLimit(f"component with {comp.m} edges exceeds the exact limit {limit}")
        chosen.extend(_exact_component(comp, cap))
    return _finish(g, chosen, exact=True)


def _exact_component(comp: SignedGraph, cap: int) -> list[frozenset[int]]:
    if is_circuit(comp):
        return [frozenset(comp.edge_ids)]
    ids = list(comp.edge_ids)
    bit = {e: i for i, e in enumerate(ids)}
    circs = sorted(enumerate_circuits(comp, cap=cap), key=lambda c: (len(c), sorted(c)))
    masks = [sum(1 << bit[e] for e in c) for c in circs]
    res = min_set_cover(len(ids), masks, [len(c) for c in circs])
    if res is None:
        raise StructuralError("some edge lies on no circuit")
    return [frozenset(circs[j]) for j in res[1]]


def _shortest_circuit_through(g: SignedGraph, eid: int) -> frozenset[int]:
    e = g.edge(eid)
    if e.is_loop:
        return frozenset([eid])
    p = bfs_path(g.without([eid]), [e.u], [e.v])
    if p is None:
        raise StructuralError(f"edge {eid} is a bridge")
    return frozenset([eid, *p])


def greedy_circuit_cover(g: SignedGraph) -> PositiveCover:
    """Repeatedly add the shortest circuit through an uncovered edge, then drop redundant circuits."""
    _check_input(g)
    chosen: list[frozenset[int]] = []
    covered: set[int] = set()
    for eid in g.edge_ids:
        if eid not in covered:
            c = _shortest_circuit_through(g, eid)
            chosen.append(c)
            covered |= c
    # redundancy pruning, longest circuits first
    for c in sorted(chosen, key=len, reverse=True):
        others = Counter()
        for d in chosen:
            others.update(d)
        if all(others[e] > 1 for e in c):
            chosen.remove(c)
    return _finish(g, chosen, exact=False)


def _finish(g: SignedGraph, chosen: list[frozenset[int]], exact: bool) -> PositiveCover:
    pc = PositiveCover(tuple(chosen), g.m, g.n, exact)
    certified = Fraction(pc.length) <= Fraction(5, 3) * g.m
    return PositiveCover(pc.circuits, g.m, g.n, exact, certified)


def cover_bridgeless(g: SignedGraph, limit: int = EXACT_EDGE_LIMIT) -> PositiveCover:
    """Circuit cover of a bridgeless balanced graph.

    Uses the exact solver when every component fits under ``limit`` and the
    circuit enumeration stays under its cap; otherwise the greedy cover, whose
    ``certified`` flag reports whether the 5/3 bound happens to hold.
    """
    _check_input(g)
    try:
        return exact_min_circuit_cover(g, limit)
    except (OverLimit, EnumerationCapExceeded):
        return greedy_circuit_cover(g)
