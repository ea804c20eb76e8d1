import itertools

import pytest
from brute import build, min_negative_count
from conftest import signed_graphs
from hypothesis import given
from hypothesis import strategies as st

from sigcover.generators import petersen
from sigcover.graph import StructuralError
from sigcover.signature import (
    InexactSignatureError,
    Switching,
    apply_switching,
    is_balanced,
    minimum_signature,
    minsig_cut_violations,
    signature_stats,
)


def circuit_sign(g, cycle):
    p = 1
    for e in cycle:
        p *= g.sign(e)
    return p


class TestSwitching:
    def test_moves_the_negative_edge_of_a_triangle(self):
        g = build(3, "0 1 -, 1 2 +, 2 0 +")
        h = apply_switching(g, Switching.of([1]))
        assert [h.sign(i) for i in h.edge_ids] == [1, -1, 1]
        assert circuit_sign(h, [0, 1, 2]) == circuit_sign(g, [0, 1, 2]) == -1

    def test_empty_switching_is_identity(self):
        g = build(3, "0 1 -, 1 2 +, 2 0 +")
        assert apply_switching(g, Switching.of([])).same_edges(g)

    def test_alternate_pair_of_negative_square(self):
        g = build(4, "0 1 -, 1 2 -, 2 3 -, 3 0 -")
        h = apply_switching(g, Switching.of([0, 2]))
        assert h.negative_count() == 0

    def test_loops_keep_their_sign(self):
        g = build(2, "0 0 -, 0 1 +")
        h = apply_switching(g, Switching.of([0]))
        assert h.sign(0) == -1 and h.sign(1) == -1

    def test_unknown_vertex_rejected(self):
        with pytest.raises(StructuralError):
            apply_switching(build(2, "0 1 +"), Switching.of([7]))

    @given(signed_graphs(), st.data())
    def test_involution_and_circuit_signs(self, g, data):
        side = data.draw(st.sets(st.sampled_from(g.vertices)))
        s = Switching.of(side)
        h = apply_switching(g, s)
        assert apply_switching(h, s).same_edges(g)
        for e in g.edges:
            if e.is_loop:
                assert h.sign(e.id) == e.sign
        # every digon and triangle keeps its sign product
        for k in (2, 3):
            for cyc in itertools.combinations(g.edge_ids, k):
                d = {}
                for i in cyc:
                    ed = g.edge(i)
                    d[ed.u] = d.get(ed.u, 0) + 1
                    d[ed.v] = d.get(ed.v, 0) + 1
                if all(v == 2 for v in d.values()) and len(d) == k:
                    assert circuit_sign(g, cyc) == circuit_sign(h, cyc)


class TestBalance:
    @pytest.mark.parametrize("text, n, expected", [
        ("0 1 +, 1 2 +, 2 0 +", 3, True),
        ("0 1 -, 1 2 +, 2 0 +", 3, False),
        ("0 1 -, 1 2 -, 2 3 -, 3 0 -", 4, True),
        ("0 0 -", 1, False),
        ("0 1 -, 1 2 -", 3, True),
    ])
    def test_examples(self, text, n, expected):
        assert is_balanced(build(n, text)) is expected

    @given(signed_graphs())
    def test_balanced_iff_switchable_to_positive(self, g):
        assert is_balanced(g) == (min_negative_count(g) == 0)


class TestMinimumSignature:
    def test_balanced_graph_has_zero(self):
        _, _, eps = minimum_signature(build(4, "0 1 -, 1 2 -, 2 3 -, 3 0 -"))
        assert eps == 0

    def test_unbalanced_triangle_has_one(self):
        assert minimum_signature(build(3, "0 1 -, 1 2 -, 2 0 -"))[2] == 1

    def test_petersen_negative_pentagon(self):
        # every pentagon vertex sees two negative and one positive edge, so
        # switching it lowers the count; the exhaustive minimum is 3
        g = petersen()
        gm, sw, eps = minimum_signature(g)
        assert eps == min_negative_count(g) == 3
        assert gm.negative_count() == 3
        assert apply_switching(g, sw).same_edges(gm)

    @given(signed_graphs(max_n=7, max_m=11))
    def test_matches_exhaustive_search(self, g):
        gm, sw, eps = minimum_signature(g)
        assert eps == min_negative_count(g) == gm.negative_count()
        assert apply_switching(g, sw).same_edges(gm)

    @given(signed_graphs(max_n=7, max_m=11))
    def test_minimum_has_no_heavy_cut(self, g):
        gm, _, _ = minimum_signature(g)
        assert minsig_cut_violations(gm) == []

    def test_cut_audit_finds_switchable_side(self):
        g = build(3, "0 1 -, 1 2 -, 0 2 +")
        (v,) = minsig_cut_violations(g)
        assert v.side == {1} and (v.negative, v.positive) == (2, 0)

    def test_over_limit_reports_bound(self):
        g = build(4, "0 1 -, 1 2 -, 2 3 +, 3 0 +, 0 2 -")
        with pytest.raises(InexactSignatureError) as exc:
            minimum_signature(g, limit=3)
        assert exc.value.best_bound == 3

    def test_deterministic(self):
        g = petersen()
        assert minimum_signature(g)[1] == minimum_signature(g)[1]


class TestStats:
    def test_long_barbell(self):
        s = signature_stats(build(3, "0 0 -, 0 1 +, 1 2 +, 2 2 -"))
        assert (s.eps, s.eps_tilde) == (2, 2)

    def test_negative_path(self):
        s = signature_stats(build(4, "0 1 -, 1 2 -, 2 3 -"))
        assert (s.eps, s.eps_tilde) == (3, 0)

    def test_triangle_with_pendant(self):
        s = signature_stats(build(4, "0 1 -, 1 2 +, 2 0 +, 2 3 -"))
        assert (s.eps, s.eps_tilde) == (2, 1)

    @given(signed_graphs())
    def test_eps_tilde_at_most_eps(self, g):
        s = signature_stats(g)
        assert 0 <= s.eps_tilde <= s.eps
