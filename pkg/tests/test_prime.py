import itertools
import random

import pytest
from brute import brute_targets, build, ends, signed_circuit_kind

from sigcover.circuits import Kind, fundamental_system
from sigcover.engines import EngineFailure, case_b_engine, case_c_engine
from sigcover.generators import tree_plus_chords
from sigcover.graph import StructuralError
from sigcover.pipeline import claim3_violations, claim4_shape
from sigcover.prime import cover_prime, cover_prime_report, prime_targets


def random_gprime(seed):
    rng = random.Random(seed)
    return tree_plus_chords(rng, rng.randint(1, 8), rng.randint(2, 5), loop_prob=rng.choice((0, 0.2, 0.4)))


def d_xyz():
    # C_x and C_y share 2-3, C_y and C_z share 4-5, C_x and C_z are disjoint
    return build(8, "0 1 +, 1 2 +, 2 3 +, 3 4 +, 4 5 +, 5 6 +, 6 7 +, 0 3 -, 2 5 -, 4 7 -")


STRADDLE = "0 2 +, 1 3 -, 0 5 -, 4 3 -, 3 4 -, 2 3 +, 2 5 +, 5 5 -, 4 1 +, 0 4 +"


class TestTargets:
    @pytest.mark.parametrize("seed", range(60))
    def test_match_definition(self, seed):
        g = random_gprime(seed)
        t = prime_targets(g)
        neg, sep, part = brute_targets(g)
        assert (set(t.negatives), set(t.separating_bridges), set(t.cut_partners)) == (neg, sep, part)


class TestExamples:
    def test_two_loops_on_one_edge(self):
        g = build(2, "0 0 -, 0 1 +, 1 1 -")
        cv = cover_prime(g)
        assert [el.kind for el in cv.elements] == [Kind.LONG_BARBELL] * 2
        assert cv.length == 6 == 2 * g.m
        assert cv.width(0) == cv.width(2) == 2

    def test_two_overlapping_chords(self):
        g = build(4, "0 1 +, 1 2 +, 2 3 +, 0 2 -, 1 3 -")
        cv = cover_prime(g)
        assert cv.width(3) >= 1 and cv.width(4) >= 1
        assert cv.length <= 2 * g.m

    def test_d_xyz_engine_gives_two_barbells(self):
        g = d_xyz()
        rep = case_c_engine(g)
        assert rep.configuration == "D_xyz"
        got = sorted(sorted(el.edges) for el in rep.best)
        # B_{x,z} through the tree edge 3-4, and through the chord y
        assert got == [[0, 1, 2, 3, 4, 5, 6, 7, 9], [0, 1, 2, 4, 5, 6, 7, 8, 9]]
        for el in rep.best:
            assert signed_circuit_kind(g, el.edges) == "long_barbell"
        cv = cover_prime(g)
        assert cv.length <= rep.best_length <= 2 * g.m

    def test_single_negative_rejected(self):
        with pytest.raises(StructuralError):
            cover_prime(build(3, "0 1 +, 1 2 +, 0 2 -"))

    def test_positive_cycle_rejected(self):
        with pytest.raises(StructuralError):
            cover_prime(build(3, "0 1 +, 1 2 +, 2 0 +, 0 0 -, 1 1 -"))


class TestContract:
    @pytest.mark.parametrize("seed", range(300))
    def test_cover_prime(self, seed):
        g = random_gprime(seed)
        res = cover_prime_report(g)
        cv = res.cover
        w = cv.widths()
        neg, sep, part = brute_targets(g)
        assert all(w[e] >= 1 for e in neg | sep | part)
        assert cv.length <= 2 * g.m
        for e in g.edges:
            if e.is_loop and e.sign < 0:
                assert w[e.id] == 2
        for el in cv.elements:
            assert signed_circuit_kind(g, el.edges) == el.kind.value
        for a in res.audits:
            assert a.case in ("B", "C")
            if a.ok:
                assert a.engine_length is None or a.engine_length <= 2 * g.m

    def test_audit_can_be_switched_off(self):
        g = d_xyz()
        assert cover_prime_report(g, audit=False).audits == ()
        assert cover_prime_report(g, audit=True).audits[0].to_record()["configuration"] == "D_xyz"


class TestCaseBStraddle:
    def test_engine_fails_but_pool_covers(self):
        g = build(6, STRADDLE)
        loop = next(e.id for e in g.edges if e.is_loop)
        with pytest.raises(EngineFailure):
            case_b_engine(g, loop)
        res = cover_prime_report(g)
        assert res.cover.length <= 2 * g.m
        assert res.cover.width(loop) == 2
        assert any(a.case == "B" and not a.ok for a in res.audits)


class TestClaims:
    @pytest.mark.parametrize("seed", range(80))
    def test_claim3_on_random_gprime(self, seed):
        assert claim3_violations(random_gprime(seed)) == []

    @pytest.mark.parametrize("seed", range(80))
    def test_claim4_shapes(self, seed):
        g = random_gprime(seed)
        fs = fundamental_system(g)
        for a, b in itertools.combinations(fs.negatives, 2):
            shape = claim4_shape(g, a, b)
            ca, cb = fs.circuits[a], fs.circuits[b]
            if shape == "balanced_circuit":
                assert signed_circuit_kind(g, ca ^ cb) == "balanced_circuit"
            elif shape == "short_barbell":
                assert signed_circuit_kind(g, ca | cb) == "short_barbell"
            else:
                va = {x for e in ca for x in ends(g, e)}
                vb = {x for e in cb for x in ends(g, e)}
                assert not va & vb

    def test_claim4_examples(self):
        assert claim4_shape(build(3, "0 1 +, 1 2 +, 0 1 -, 1 2 -"), 2, 3) == "short_barbell"
        assert claim4_shape(build(4, "0 1 +, 1 2 +, 1 3 +, 0 2 -, 0 3 -"), 3, 4) == "balanced_circuit"
        # parallel chords give a negative digon, which is balanced
        assert claim4_shape(build(3, "0 1 +, 1 2 +, 0 2 -, 0 2 -"), 2, 3) == "balanced_circuit"
        assert claim4_shape(build(4, "0 1 +, 1 2 +, 2 3 +, 0 0 -, 3 3 -"), 3, 4) == "disjoint_unbalanced"
