import itertools
from fractions import Fraction

import pytest

from monounion import analysis
from monounion.element import Element
from monounion.evlin import EPSet, EvLinMap, Piece
from monounion.model import SemigroupSpec


def two_block(ab: EvLinMap, ba: EvLinMap | None = None) -> SemigroupSpec:
    """Type-valid (not necessarily associative) spec on ``a, b``."""
    return SemigroupSpec(
        "ab",
        {
            ("a", "a"): EvLinMap.shift("a"),
            ("b", "b"): EvLinMap.shift("b"),
            ("a", "b"): ab,
            ("b", "a"): ba or EvLinMap.shift("a"),
        },
    )


class TestTSets:
    def test_ex2_full(self, ex2):
        t = analysis.t_set(ex2, "a", Element("b", 1), "a")
        assert t.F == frozenset() and t.prog == (1, 1) and t.law == (2, 1)
        assert t.members == EPSet.full()

    def test_ex2_empty(self, ex2):
        t = analysis.t_set(ex2, "a", Element("b", 1), "b")
        assert t.is_empty and t.prog is None and t.law is None

    def test_ex1_shift(self, ex1):
        t = analysis.t_set(ex1, "a", Element("a", 5), "a")
        assert t.prog == (1, 1) and t.law == (6, 1)

    def test_finite_head(self, ex3):
        # c^1 b = a^2 while c^k b stays in N_c for k >= 2
        t = analysis.t_set(ex3, "c", Element("b", 1), "c")
        assert t.F == frozenset() and t.prog == (2, 1) and t.law == (3, 1)
        t = analysis.t_set(ex3, "c", Element("b", 1), "a")
        assert t.F == frozenset({1}) and t.prog is None
        assert t.to_json() == {"a": "c", "x": "b^1", "b": "a", "F": [1], "p": None, "q": None, "r": None, "s": None}

    def test_shape_split(self):
        s = EPSet(frozenset({2}), ((5, 2),))
        assert analysis.split_shape(s) == (frozenset({2}), (5, 2))
        with pytest.raises(analysis.ShapeViolation):
            analysis.split_shape(EPSet(progressions=((1, 3), (2, 3))))
        with pytest.raises(analysis.ShapeViolation):
            analysis.split_shape(EPSet(frozenset({1, 4})))


class TestQSum:
    def test_examples(self, ex1, ex2):
        assert analysis.q_sum_check(ex2, "a", Element("b", 1)) == 1
        assert analysis.q_sum_check(ex1, "a", Element("a", 1)) == 1

    def test_odds_evens(self):
        m = EvLinMap.from_parts([], [Piece(1, 2, "a", 1, 1), Piece(2, 2, "b", 1, 1)])
        x = Element("b", 1)
        qs = [analysis.tset_from_map("a", x, b, m).q for b in "ab"]
        assert qs == [2, 2]
        assert sum(Fraction(1, q) for q in qs) == 1

    def test_unit_fraction_examples(self):
        assert analysis.unit_fraction_solutions(1, 1) == [(1,)]
        assert analysis.unit_fraction_solutions(2, 1) == [(2, 2)]
        assert analysis.unit_fraction_solutions(3, 1) == [(3, 3, 3), (4, 4, 2), (6, 3, 2)]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("r", [Fraction(1), Fraction(1, 2), Fraction(3, 4)])
    def test_unit_fractions_brute(self, n, r):
        # choose the n-1 smallest denominators up to a cap, solve for the largest
        brute = set()
        for ms in itertools.combinations_with_replacement(range(1, 121), n - 1):
            rest = r - sum((Fraction(1, m) for m in ms), Fraction(0))
            if rest > 0 and rest.numerator == 1 and rest.denominator >= max(ms, default=1):
                brute.add(tuple(sorted(ms + (rest.denominator,), reverse=True)))
        assert analysis.unit_fraction_solutions(n, r) == sorted(brute)

    def test_unit_fraction_counts(self):
        # number of ways to write 1 as a sum of n unit fractions: 1, 1, 3, 14, 147
        assert [len(analysis.unit_fraction_solutions(n, 1)) for n in range(1, 6)] == [1, 1, 3, 14, 147]


class TestReports:
    def test_p_bound_ex2(self, ex2):
        rep = analysis.p_bound_check(ex2, 3)
        assert rep["pass"] and rep["bound"] == 4 and rep["max_p"] == 1
        assert set(rep["max_p_by_pair"]) == {"a|a", "b|a", "b|b"}

    def test_p_bound_ex1(self, ex1):
        rep = analysis.p_bound_check(ex1, 2)
        assert rep["pass"] and rep["bound"] == 2

    def test_census_ex2(self, ex2):
        c = analysis.census(ex2, 4)
        assert c["distinct"] == 3 and c["stabilized_at"] == 1
        assert {(t["a"], t["b"]) for t in c["tsets"]} == {("a", "a"), ("b", "b"), ("b", "a")}

    def test_census_ex1(self, ex1):
        assert analysis.census(ex1, 4)["distinct"] == 1

    def test_census_monotone(self, corpus_spec):
        def keys(L):
            return {(t["a"], t["b"], str(t["set"])) for t in analysis.census(corpus_spec, L)["tsets"]}

        for L in range(1, 4):
            assert keys(L) <= keys(L + 1)

    def test_census_not_stable_at_horizon(self, ex3):
        c = analysis.census(ex3, 1)
        assert c["stabilized_at"] is None

    def test_dichotomy_violation(self):
        # T(a,b,b) = {1} + {3,4,...}; constant law b^1 but a^1 b = b^5
        ab = EvLinMap.from_parts([(1, Element("b", 5)), (2, Element("a", 1))], [Piece(3, 1, "b", 1, 0)])
        spec = two_block(ab)
        t = analysis.t_set(spec, "a", Element("b", 1), "b")
        assert t.F == frozenset({1}) and t.law == (1, 0)
        f = analysis.dichotomy_finding(spec, t)
        assert f["check"] == "dichotomy" and f["head_images"] == [5]

    def test_left_growth_violation(self):
        spec = two_block(EvLinMap.from_parts([], [Piece(1, 1, "a", 1, 0)]))
        rep = analysis.left_growth_check(spec, 5)
        assert not rep["pass"]
        assert {"check": "left_growth", "a": "a", "p": 2, "b": "b", "q": 1, "r": 1} in rep["findings"]

    def test_exponent_order_violation(self):
        ab = EvLinMap.from_parts([(1, Element("b", 3))], [Piece(2, 1, "b", 1, 1)])
        rep = analysis.exponent_order_check(two_block(ab), 3)
        assert not rep["pass"]
        f = rep["findings"][0]
        assert (f["a"], f["x"], f["p"], f["p2"], f["r"], f["s"]) == ("a", "b^1", 1, 2, 3, 1)

    def test_analyze_bad_spec_reports(self):
        ab = EvLinMap.from_parts([(1, Element("b", 3))], [Piece(2, 1, "b", 1, 1)])
        rep = analysis.analyze(two_block(ab), 2)
        assert rep["pass"] is False

    def test_analyze_corpus(self, corpus_spec):
        rep = analysis.analyze(corpus_spec)
        assert rep["pass"], rep
        assert rep["defaults"]["horizon"] == analysis.DEFAULT_HORIZON
        assert set(rep["checks"]) == {
            "shape", "left_growth", "exponent_order", "partition",
            "linearity", "dichotomy", "q_sum", "p_bound",
        }
