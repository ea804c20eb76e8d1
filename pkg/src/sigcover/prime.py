"""Covers of a positive spanning tree plus negative edges (the graph G').

The recursion splits at end-blocks with auxiliary negative loops, handles
the two degenerate 2-connected shapes directly, and otherwise branches on
the number of negative loops.  For an odd number of negative edges with at
most one loop, a pool of candidate covers is searched; the case engines in
:mod:`sigcover.engines` describe the candidates the bound argument relies
on and are run as audits: their configuration (or failure) is recorded and
their cover is used when it beats the pool.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass

from .circuits import (
    Cover,
    EnumerationCapExceeded,
    FundamentalSystem,
    InvalidElement,
    SignedCircuitElement,
    classify,
    connect_into_euler_tree,
    fundamental_system,
    join_circuits,
    simple_paths_between,
)
from .engines import EngineFailure, case_b_engine, case_c_engine
from .euler_covers import even_tree_cover, even_tree_three_covers, odd_leaf_cover
from .euler_tree import (
    ConstructionError,
    add_negative_loop,
    build_euler_tree,
    leaf_cover,
    merge_on_loops,
    prune_pendants,
    split_endblock,
)
from .graph import SignedGraph, StructuralError, bridges, components

PATH_CAP = int(os.environ.get("SIGCOVER_PATH_CAP", "5000"))
ENGINE_AUDIT = os.environ.get("SIGCOVER_ENGINE_AUDIT", "1") != "0"


@dataclass(frozen=True)
class EngineAudit:
    """Outcome of one case engine run next to the candidate pool."""

    case: str
    configuration: str | None
    engine_length: int | None
    pool_length: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_record(self) -> dict:
        return {"case": self.case, "configuration": self.configuration,
                "engine_length": self.engine_length, "pool_length": self.pool_length,
                "error": self.error}


@dataclass(frozen=True)
class PrimeResult:
    cover: Cover
    audits: tuple[EngineAudit, ...]


class CaseAnalysisError(ConstructionError):
    """No construction met the length bound; ``instance`` holds the serialized graph."""

    def __init__(self, message: str, g: SignedGraph):
        self.instance = _serialize(g)
        super().__init__(f"{message}\n--- instance ---\n{self.instance}")


def _serialize(g: SignedGraph) -> str:
    idx = {v: i for i, v in enumerate(g.vertices)}
    lines = [f"{g.n} {g.m}"]
    for e in g.edges:
        lines.append(f"{idx[e.u]} {idx[e.v]} {'+' if e.sign > 0 else '-'}  # edge {e.id}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# coverage targets


@dataclass(frozen=True)
class PrimeTargets:
    negatives: frozenset[int]
    separating_bridges: frozenset[int]
    cut_partners: frozenset[int]

    @property
    def all(self) -> frozenset[int]:
        return self.negatives | self.separating_bridges | self.cut_partners


def separating_bridges(g: SignedGraph) -> set[int]:
    """Bridges whose removal leaves two unbalanced sides."""
    from .signature import is_balanced

    out = set()
    for comp in components(g):
        for b in bridges(comp):
            sides = components(comp.without([b]))
            if len(sides) == 2 and not any(is_balanced(s) for s in sides):
                out.add(b)
    return out


def cut_partners(g: SignedGraph, negatives) -> dict[int, set[int]]:
    """For each negative ``t``, the non-bridge edges ``s`` with ``{s, t}`` a 2-edge-cut."""
    br = bridges(g)
    out = {}
    for t in negatives:
        if t in br or g.edge(t).is_loop:
            out[t] = set()
            continue
        out[t] = {s for s in bridges(g.without([t])) if s not in br}
    return out


def prime_targets(g: SignedGraph) -> PrimeTargets:
    neg = set(g.negative_ids())
    sp = cut_partners(g, neg)
    s_all = set().union(*sp.values()) if sp else set()
    return PrimeTargets(frozenset(neg), frozenset(separating_bridges(g)), frozenset(s_all - neg))


# ---------------------------------------------------------------------------
# entry point


def cover_prime(gp: SignedGraph) -> Cover:
    """Signed circuits covering the negatives, separating bridges and 2-cut partners of ``gp``.

    ``gp`` must be a spanning tree of positive edges plus at least two
    negative edges.  The total length is at most ``2 * m`` and every
    negative loop is used exactly twice; both are asserted.
    """
    return cover_prime_report(gp).cover


def cover_prime_report(gp: SignedGraph, audit: bool | None = None) -> PrimeResult:
    """:func:`cover_prime` together with the engine audits run along the way."""
    fundamental_system(gp)  # validates the tree shape
    if len(gp.negative_ids()) < 2:
        raise StructuralError("need at least two negative edges")
    log: list[EngineAudit] | None = [] if (ENGINE_AUDIT if audit is None else audit) else None
    els = _prime(gp, log)
    root = gp.root
    els = [classify(root, el.edges) for el in els]
    cover = Cover(els, "targets")
    _audit(gp, cover)
    return PrimeResult(cover, tuple(log or ()))


def _audit(g: SignedGraph, cover: Cover) -> None:
    w = cover.widths()
    missing = sorted(e for e in prime_targets(g).all if w[e] == 0)
    if missing:
        raise CaseAnalysisError(f"edges {missing} left uncovered", g)
    for l in g.loop_ids():
        if g.sign(l) < 0 and w[l] != 2:
            raise CaseAnalysisError(f"negative loop {l} covered {w[l]} times", g)
    if cover.length > 2 * g.m:
        raise CaseAnalysisError(f"length {cover.length} exceeds 2*{g.m}", g)


def _prime(g: SignedGraph, log: list[EngineAudit] | None = None) -> list[SignedCircuitElement]:
    g = prune_pendants(g)
    split = split_endblock(g)
    if split is not None:
        h1, h2, v = split
        g1, e1 = add_negative_loop(h1, v)
        g2, e2 = add_negative_loop(h2, v)
        r1, r2 = _prime(g1, log), _prime(g2, log)
        l1, l2 = sum(map(len, r1)), sum(map(len, r2))
        merged = merge_on_loops(g, r1, e1, r2, e2)
        total = sum(map(len, merged))
        if total != l1 + l2 - 4:
            raise CaseAnalysisError("merging changed the length unexpectedly", g)
        if total > 2 * g.m:
            raise CaseAnalysisError(f"merged cover of length {total} exceeds 2*{g.m}", g)
        return merged
    loops = sorted(e.id for e in g.edges if e.is_loop and e.sign < 0)
    if g.n == 1:
        k = len(loops)
        return [classify(g, [loops[i], loops[(i + 1) % k]]) for i in range(k)]
    if sum(1 for e in g.edges if not e.is_loop) == 1:
        return list(leaf_cover(g).elements)
    if len(loops) >= 2:
        res = _case_a(g)
    elif len(loops) == 1:
        res = _case_b(g, loops[0], log)
    else:
        res = _case_c(g, log)
    if sum(map(len, res)) > 2 * g.m:
        raise CaseAnalysisError("2-connected case exceeded the length bound", g)
    return res


# ---------------------------------------------------------------------------
# shared pieces


def connected_symmetric_difference(g: SignedGraph, fs: FundamentalSystem, a) -> SignedGraph:
    """``C_A`` connected into a tree of Eulerian graphs inside ``g``."""
    acc: set[int] = set()
    for x in a:
        acc ^= fs.circuits[x]
    parts = [c for c in components(g.sub(acc)) if c.m]
    h, _ = connect_into_euler_tree(g, parts)
    return h


def pair_elements(g: SignedGraph, fs: FundamentalSystem, a: int, b: int,
                  cap: int = PATH_CAP) -> list[SignedCircuitElement]:
    """Signed circuits containing ``C_{a,b}``.

    A balanced circuit or short barbell is returned as is; two disjoint
    unbalanced circuits are joined by every connecting path (or just a
    shortest one if the path enumeration overflows).
    """
    cab = fs.circuits[a] ^ fs.circuits[b]
    try:
        return [classify(g, cab)]
    except InvalidElement:
        pass
    parts = [frozenset(c.edge_ids) for c in components(g.sub(cab)) if c.m]
    if len(parts) != 2:
        raise ConstructionError("symmetric difference of two circuits has an unexpected shape")
    c1, c2 = parts
    try:
        paths = simple_paths_between(g, g.endpoints(c1), g.endpoints(c2), set(), cap)
    except EnumerationCapExceeded:
        el = join_circuits(g, c1, c2)
        return [el] if el is not None else []
    out = []
    for p in paths:
        try:
            out.append(classify(g, c1 | c2 | set(p)))
        except InvalidElement:
            continue
    return out


def _shortest(cands: list[list[SignedCircuitElement]]) -> list[SignedCircuitElement] | None:
    best = None
    for c in cands:
        if best is None or sum(map(len, c)) < sum(map(len, best)):
            best = c
    return best


def _pair_covers(g: SignedGraph, pool: list[SignedCircuitElement], targets: frozenset[int],
                 loop: int | None) -> list[list[SignedCircuitElement]]:
    """Two-element covers from ``pool``; the loop, if any, must be used twice."""
    out = []
    for p, q in itertools.combinations_with_replacement(range(len(pool)), 2):
        a, b = pool[p], pool[q]
        if not targets <= (a.edges | b.edges):
            continue
        if loop is not None and (loop in a.edges) + (loop in b.edges) != 2:
            continue
        out.append([a, b])
    return out


# ---------------------------------------------------------------------------
# Case A: at least two negative loops


def _case_a(g: SignedGraph) -> list[SignedCircuitElement]:
    fs = fundamental_system(g)
    h = connected_symmetric_difference(g, fs, fs.negatives)
    out: list[SignedCircuitElement] = []
    while True:
        t = build_euler_tree(h)
        even_leaf = next((b for b in t.balloons
                          if b.leaf and not b.odd and not b.trivial and not b.is_loop), None)
        if even_leaf is None:
            break
        out.extend(even_tree_cover(h.root.sub(even_leaf.edges)).elements)
        rest = [i for i in h.edge_ids if i not in even_leaf.edges]
        h = prune_pendants(h.root.sub(rest))
    out.extend(odd_leaf_cover(h).elements)
    return out


# ---------------------------------------------------------------------------
# Case B: exactly one negative loop


def _case_b(g: SignedGraph, loop: int, log=None) -> list[SignedCircuitElement]:
    fs = fundamental_system(g)
    neg = fs.negatives
    if len(neg) % 2 == 0:
        h = connected_symmetric_difference(g, fs, neg)
        return list(even_tree_three_covers(h)[0].elements)
    best = case_b_candidates(g, loop, fs)[0]
    if log is None:
        return best
    return _with_engine(g, "B", best, lambda: case_b_engine(g, loop, fs), loop, log)


def _with_engine(g, case, best, run, loop, log) -> list[SignedCircuitElement]:
    pool_len = sum(map(len, best))
    try:
        report = run()
    except EngineFailure as exc:
        log.append(EngineAudit(case, None, None, pool_len, str(exc)))
        return best
    log.append(EngineAudit(case, report.configuration, report.best_length, pool_len))
    eng = report.best
    w = widths_of(eng)
    valid = all(w[e] for e in prime_targets(g).all) and (loop is None or w[loop] == 2)
    return eng if valid and report.best_length < pool_len else best


def case_b_candidates(g: SignedGraph, loop: int, fs: FundamentalSystem | None = None):
    """Shortest candidate cover for an odd count with one loop, plus all candidates tried."""
    fs = fs or fundamental_system(g)
    neg = fs.negatives
    others = [x for x in neg if x != loop]
    targets = prime_targets(g).all
    cands: list[list[SignedCircuitElement]] = []
    pool: list[SignedCircuitElement] = []
    for a in others:
        h = connected_symmetric_difference(g, fs, [x for x in neg if x != a])
        c1, c2, c3 = even_tree_three_covers(h)
        with_loop = pair_elements(g, fs, loop, a)
        with_b = [el for b in others if b != a for el in pair_elements(g, fs, a, b)]
        pool.extend(with_loop)
        pool.extend(with_b)
        if with_b:
            cands.append(list(c1.elements) + [min(with_b, key=len)])
        if with_loop:
            best = min(with_loop, key=len)
            cands.append(list(c2.elements) + [best])
            cands.append(list(c3.elements) + [best])
    cands.extend(_pair_covers(g, _dedupe(pool), targets, loop))
    cands = [c for c in cands if _loop_twice(c, loop)]
    best = _shortest(cands)
    if best is None:
        raise CaseAnalysisError("no candidate cover with one loop", g)
    return best, cands


def _loop_twice(els, loop) -> bool:
    return sum(1 for el in els if loop in el.edges) == 2


def _dedupe(pool: list[SignedCircuitElement]) -> list[SignedCircuitElement]:
    seen = set()
    out = []
    for el in sorted(pool, key=lambda e: (len(e), sorted(e.edges))):
        if el.edges not in seen:
            seen.add(el.edges)
            out.append(el)
    return out


# ---------------------------------------------------------------------------
# Case C: no loops


def _case_c(g: SignedGraph, log=None) -> list[SignedCircuitElement]:
    fs = fundamental_system(g)
    neg = fs.negatives
    if len(neg) % 2 == 0:
        h = connected_symmetric_difference(g, fs, neg)
        return list(even_tree_cover(h).elements)
    best = case_c_candidates(g, fs)[0]
    if log is None:
        return best
    return _with_engine(g, "C", best, lambda: case_c_engine(g, fs), None, log)


def case_c_candidates(g: SignedGraph, fs: FundamentalSystem | None = None):
    """Shortest candidate cover for an odd count without loops, plus all candidates tried."""
    fs = fs or fundamental_system(g)
    neg = fs.negatives
    targets = prime_targets(g).all
    cands: list[list[SignedCircuitElement]] = []
    pool: list[SignedCircuitElement] = []
    pair_cache: dict[tuple[int, int], list[SignedCircuitElement]] = {}
    for a, b in itertools.combinations(neg, 2):
        pair_cache[(a, b)] = pair_cache[(b, a)] = pair_elements(g, fs, a, b)
        pool.extend(pair_cache[(a, b)])
    for a in neg:
        h = connected_symmetric_difference(g, fs, [x for x in neg if x != a])
        base = list(even_tree_cover(h).elements)
        opts = [el for b in neg if b != a for el in pair_cache[(a, b)]]
        if opts:
            cands.append(base + [min(opts, key=len)])
    cands.extend(_pair_covers(g, _dedupe(pool), targets, None))
    best = _shortest(cands)
    if best is None:
        raise CaseAnalysisError("no candidate cover without loops", g)
    return best, cands


def widths_of(els) -> Counter:
    w: Counter = Counter()
    for el in els:
        w.update(el.edges)
    return w
