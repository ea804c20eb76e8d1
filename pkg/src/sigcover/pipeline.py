"""Full signed circuit covers with length certificates.

The input signature is first replaced by a minimum one.  Its negative
edges ``X``, the bridges ``B`` with two unbalanced sides and the edges ``S``
forming a 2-edge-cut with some edge of ``X`` are covered inside ``G'`` (a
spanning tree of ``G - X`` plus ``X``); the rest is a bridgeless balanced
graph covered by ordinary circuits.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .bridgeless import PositiveCover, cover_bridgeless
from .circuits import (
    Cover,
    Kind,
    SignedCircuitElement,
    classify,
    flow_admissibility_witness,
    fundamental_system,
)
from .graph import SignedGraph, StructuralError, bridges, components, is_connected
from .prime import EngineAudit, cover_prime_report, cut_partners, separating_bridges
from .signature import (
    DEFAULT_SWITCH_LIMIT,
    MINSIG_AUDIT_LIMIT,
    CutViolation,
    Switching,
    minimum_signature,
    minsig_cut_violations,
)

STRATEGIES = ("main", "alt1", "alt2")


class NotFlowAdmissible(StructuralError):
    """Some edge lies in no signed circuit; ``witness`` is such an edge (or None)."""

    def __init__(self, message: str, witness: int | None = None):
        self.witness = witness
        super().__init__(message)


class NonMinimumSignature(StructuralError):
    """A cut with more negative than positive edges, or ``G - X`` disconnected."""

    def __init__(self, message: str, violation: CutViolation | None = None):
        self.violation = violation
        super().__init__(message)


class AuditFailure(AssertionError):
    """A structural claim the construction relies on did not hold."""


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Decomposition:
    X: frozenset[int]
    B: frozenset[int]
    S: frozenset[int]
    residual: SignedGraph


def two_cut_edges(g: SignedGraph, X) -> frozenset[int]:
    """Edges ``s`` outside ``X`` with a 2-edge-cut ``{s, t}`` for some ``t`` in ``X``."""
    acc: set[int] = set()
    for part in cut_partners(g, X).values():
        acc |= part
    return frozenset(acc - set(X))


def decompose_XBS(g: SignedGraph, audit_cuts: bool | None = None) -> Decomposition:
    """Split a connected, flow-admissible graph with minimum signature into X, B, S and the residual.

    The residual is asserted to be bridgeless and balanced, and ``S`` is
    checked to be exactly the bridge set of ``G - X - B``.  With
    ``audit_cuts`` (default: when ``n`` is at most the audit limit) every
    vertex bipartition is checked against the minimum-signature cut rule.
    """
    if not is_connected(g):
        raise StructuralError("decomposition needs a connected graph")
    w = flow_admissibility_witness(g)
    if w is not None:
        raise NotFlowAdmissible(f"not flow-admissible: edge {w} lies in no signed circuit", w)
    if audit_cuts is None:
        audit_cuts = g.n <= MINSIG_AUDIT_LIMIT
    if audit_cuts:
        bad = minsig_cut_violations(g, limit=max(g.n, 1))
        if bad:
            v = bad[0]
            raise NonMinimumSignature(
                f"cut around {sorted(v.side)} has {v.negative} negative and {v.positive} positive edges", v)
    X = frozenset(g.negative_ids())
    B = frozenset(separating_bridges(g))
    S = two_cut_edges(g, X)
    if B & X or S & X:
        raise NonMinimumSignature("a negative edge is a bridge or forms a 2-edge-cut with another one")
    rest = g.without(X | B)
    if frozenset(bridges(rest)) != S:
        raise AuditFailure(f"2-cut partners {sorted(S)} differ from the bridges of G-X-B {sorted(bridges(rest))}")
    residual = g.without(X | B | S)
    if bridges(residual) or residual.negative_count():
        raise AuditFailure("residual graph is not bridgeless and balanced")
    return Decomposition(X, B, S, residual)


def bfs_tree(g: SignedGraph) -> frozenset[int]:
    """Spanning tree edges found by BFS from the smallest vertex, scanning edges by id."""
    if not g.vertices:
        return frozenset()
    start = min(g.vertices)
    inc: dict[int, list] = {v: [] for v in g.vertices}
    for e in sorted(g.edges, key=lambda e: e.id):
        if not e.is_loop:
            inc[e.u].append(e)
            inc[e.v].append(e)
    seen = {start}
    tree: set[int] = set()
    q = deque([start])
    while q:
        x = q.popleft()
        for e in inc[x]:
            y = e.other(x)
            if y not in seen:
                seen.add(y)
                tree.add(e.id)
                q.append(y)
    return frozenset(tree)


def build_gprime(g: SignedGraph, X) -> SignedGraph:
    """Spanning tree of ``G - X`` together with ``X``; the inclusions ``B ⊆ B'`` and ``S ⊆ S'`` are asserted."""
    X = frozenset(X)
    rest = g.without(X)
    if not is_connected(rest) or set(rest.vertices) != set(g.vertices):
        raise NonMinimumSignature("G - X is disconnected")
    gp = g.sub(bfs_tree(rest) | X, keep=g.vertices)
    if frozenset(gp.negative_ids()) != X:
        raise AuditFailure("negative edges of G' differ from X")
    b, s = separating_bridges(g), two_cut_edges(g, X)
    bp, sp = separating_bridges(gp), two_cut_edges(gp, X)
    if not b <= bp or not s <= sp:
        raise AuditFailure("G' lost a separating bridge or a 2-cut partner")
    return gp


# ---------------------------------------------------------------------------
# structural shape checks on G'


def claim3_violations(gp: SignedGraph, max_size: int = 2) -> list[tuple[int, ...]]:
    """Subsets ``A`` (up to ``max_size``) whose ``C_A`` misses an edge of ``A`` or of its 2-cut partners."""
    fs = fundamental_system(gp)
    partners = cut_partners(gp, fs.negatives)
    bad = []
    for k in range(1, max_size + 1):
        for a in itertools.combinations(fs.negatives, k):
            ca: set[int] = set()
            for x in a:
                ca ^= fs.circuits[x]
            need = set(a).union(*(partners.get(x, set()) for x in a))
            if not need <= ca:
                bad.append(a)
    return bad


def claim4_shape(gp: SignedGraph, a: int, b: int) -> str:
    """Shape of ``C_{a,b}``: 'balanced_circuit', 'short_barbell' or 'disjoint_unbalanced'.

    Raises :class:`AuditFailure` for anything else.
    """
    fs = fundamental_system(gp)
    ca, cb = fs.circuits[a], fs.circuits[b]
    diff = ca ^ cb
    if not (ca & cb):
        shared = fs.vertices_of(a) & fs.vertices_of(b)
        if not shared:
            return "disjoint_unbalanced"
        if len(shared) == 1:
            return "short_barbell"
        raise AuditFailure(f"C_{a} and C_{b} share {len(shared)} vertices but no edge")
    el = classify(gp, diff)
    if el.kind is not Kind.BALANCED_CIRCUIT:
        raise AuditFailure(f"C_({a},{b}) with shared edges is a {el.kind.value}")
    return "balanced_circuit"


# ---------------------------------------------------------------------------
# bounds and certificates


@dataclass(frozen=True)
class Bounds:
    main: Fraction
    alt1: Fraction
    alt2: Fraction

    def of(self, strategy: str) -> Fraction:
        return getattr(self, strategy)

    def __add__(self, other: "Bounds") -> "Bounds":
        return Bounds(self.main + other.main, self.alt1 + other.alt1, self.alt2 + other.alt2)


def bounds(m: int, n: int, eps: int, x: int | None = None) -> Bounds:
    """The three length bounds as exact rationals; ``x`` defaults to ``eps``."""
    x = eps if x is None else x
    return Bounds(
        Fraction(11, 3) * m - Fraction(5, 3) * eps,
        Fraction(5, 3) * m + 2 * n + Fraction(x, 3) - 2,
        Fraction(m + 3 * n + x - 3),
    )


def _fraction_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass
class ComponentReport:
    vertices: tuple[int, ...]
    m: int
    n: int
    eps: int
    switching: Switching
    decomposition: Decomposition | None
    bounds: Bounds
    strategy: str
    residual_exact: bool
    residual_length: int
    prime_length: int
    audits: tuple[EngineAudit, ...] = ()


@dataclass
class CoverCertificate:
    """A cover of the whole graph with the bound it is checked against."""

    cover: Cover
    m: int
    n: int
    eps_N: int
    x_size: int
    bounds: Bounds
    strategy_requested: str
    strategy: str
    components: list[ComponentReport] = field(default_factory=list)
    edge_ids: tuple[int, ...] = ()
    graph: SignedGraph | None = None

    @property
    def achieved(self) -> int:
        return self.cover.length

    @property
    def bound(self) -> Fraction:
        return self.bounds.of(self.strategy)

    @property
    def widths(self) -> dict[int, int]:
        w = self.cover.widths()
        return {e: w.get(e, 0) for e in sorted(self.edge_ids)}

    @property
    def certified(self) -> bool:
        return self.achieved <= self.bound and all(self.widths.values())

    @property
    def engine_audits(self) -> list[EngineAudit]:
        return [a for c in self.components for a in c.audits]

    def to_record(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "eps_N": self.eps_N,
            "x_size": self.x_size,
            "strategy": self.strategy,
            "strategy_requested": self.strategy_requested,
            "bound": _fraction_text(self.bound),
            "bounds": {s: _fraction_text(self.bounds.of(s)) for s in STRATEGIES},
            "achieved": self.achieved,
            "certified": self.certified,
            "elements": [el.to_record(self.graph) for el in self.cover.elements],
            "widths": [[e, w] for e, w in self.widths.items()],
            "engine_audits": [a.to_record() for a in self.engine_audits],
        }


def _reclassify(g: SignedGraph, edge_sets) -> list[SignedCircuitElement]:
    return [classify(g, es) for es in edge_sets]


def _cover_component(comp: SignedGraph, strategy: str, audit_cuts: bool | None,
                     engine_audit: bool | None, switch_limit: int) -> tuple[list[frozenset[int]], ComponentReport]:
    gm, sw, eps = minimum_signature(comp, switch_limit)
    dec = decompose_XBS(gm, audit_cuts)
    b = bounds(comp.m, comp.n, eps, len(dec.X))
    if len(dec.X) == 1:
        (x,) = dec.X
        raise NotFlowAdmissible("not flow-admissible: a single negative edge remains after switching", x)
    sets: list[frozenset[int]] = []
    res: PositiveCover | None = None
    if dec.residual.m:
        res = cover_bridgeless(dec.residual)
        sets.extend(res.circuits)
    res_len = res.length if res else 0
    prime_len = 0
    audits: tuple[EngineAudit, ...] = ()
    if dec.X:
        gp = build_gprime(gm, dec.X)
        pr = cover_prime_report(gp, engine_audit)
        sets.extend(el.edges for el in pr.cover.elements)
        prime_len = pr.cover.length
        audits = pr.audits
    used = strategy
    if strategy == "alt2":
        fan = comp.m - len(dec.X) + comp.n - 1
        if res is not None and not (res.exact and res_len <= fan):
            used = "main"
    report = ComponentReport(comp.vertices, comp.m, comp.n, eps, sw, dec, b, used,
                             res.exact if res else True, res_len, prime_len, audits)
    return sets, report


def cover_full(g: SignedGraph, strategy: str = "main", *, audit_cuts: bool | None = None,
               engine_audit: bool | None = None,
               switch_limit: int = DEFAULT_SWITCH_LIMIT) -> CoverCertificate:
    """Signed circuit cover of a flow-admissible graph with its bound certificate.

    Components are handled independently and their bounds added.  For
    ``alt2`` the residual must be covered exactly within ``m - |X| + n - 1``;
    when it is not, the whole certificate falls back to ``main``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    w = flow_admissibility_witness(g)
    if w is not None:
        raise NotFlowAdmissible(f"not flow-admissible: edge {w} lies in no signed circuit", w)
    sets: list[frozenset[int]] = []
    reports: list[ComponentReport] = []
    for comp in components(g):
        if comp.m == 0:
            continue
        s, r = _cover_component(comp, strategy, audit_cuts, engine_audit, switch_limit)
        sets.extend(s)
        reports.append(r)
    used = strategy
    if strategy == "alt2" and any(r.strategy != "alt2" for r in reports):
        used = "main"
    total = sum((r.bounds for r in reports), Bounds(Fraction(0), Fraction(0), Fraction(0)))
    eps = sum(r.eps for r in reports)
    xs = sum(len(r.decomposition.X) for r in reports)
    cover = Cover(_reclassify(g.root, sets), "full")
    cert = CoverCertificate(cover, g.m, g.n, eps, xs, total, strategy, used, reports,
                            tuple(g.edge_ids), g.root)
    if not all(cert.widths.values()):
        missing = [e for e, k in cert.widths.items() if not k]
        raise AuditFailure(f"edges {missing} left uncovered")
    return cert
