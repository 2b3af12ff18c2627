import itertools

import pytest

from monounion import presentation as pr
from monounion.wordprob import normalize


def w(text):
    return tuple(text)


def test_ex1_has_no_relations(ex1):
    assert pr.extract_presentation(ex1).relations == ()


def test_ex2_relations(ex2):
    pres = pr.extract_presentation(ex2)
    assert pres.render() == "ab = aa\nba = aa\naab = aaa\nbba = aaa\n"
    assert pres.to_json()["relations"] == [["ab", "aa"], ["ba", "aa"], ["aab", "aaa"], ["bba", "aaa"]]


def test_finite_part_relation(ex3):
    # F(c, b, a) = {1}: the single extra relation cb = aa
    pres = pr.extract_presentation(ex3)
    assert pr.make_relation(w("cb"), w("aa"), ex3.generators) in pres.relations


def test_relations_hold(corpus_spec):
    for rel in pr.extract_presentation(corpus_spec).relations:
        assert normalize(corpus_spec, rel.lhs) == normalize(corpus_spec, rel.rhs)


def test_parse_roundtrip(corpus_spec):
    pres = pr.extract_presentation(corpus_spec)
    again = pr.parse_presentation(pres.render(), corpus_spec.generators)
    assert again == pres


def test_make_relation_orients():
    r = pr.make_relation(w("aa"), w("bab"), ("a", "b"))
    assert r.lhs == w("bab") and r.rhs == w("aa")
    with pytest.raises(ValueError):
        pr.make_relation((), w("a"), ("a",))


class TestDerive:
    def test_bbba(self, ex2):
        pres = pr.extract_presentation(ex2)
        d = pr.derive(pres, w("bbba"), w("aaaa"))
        assert len(d) == 3
        assert d.words() == [w("bbba"), w("baaa"), w("bbaa"), w("aaaa")]
        assert pr.check_derivation(pres, d)

    def test_trivial(self, ex2):
        pres = pr.extract_presentation(ex2)
        d = pr.derive(pres, w("abba"), w("abba"))
        assert len(d) == 0 and d.end == w("abba")

    def test_ab_ba(self, ex2):
        pres = pr.extract_presentation(ex2)
        d = pr.derive(pres, w("ab"), w("ba"))
        assert w("aa") in d.words()
        assert pr.check_derivation(pres, d) and d.end == w("ba")

    def test_unequal_words(self, ex2):
        pres = pr.extract_presentation(ex2)
        with pytest.raises(pr.DerivationFailure):
            pr.derive(pres, w("ab"), w("bb"))

    def test_budget(self, ex5):
        pres = pr.extract_presentation(ex5)
        with pytest.raises(pr.BudgetExceeded):
            pr.derive(pres, w("bbaa"), normalize(ex5, w("bbaa")).word(), budget=1)

    def test_missing_relations(self, ex2):
        pres = pr.extract_presentation(ex2)
        weak = pr.Presentation(pres.generators, pres.relations[:1])
        with pytest.raises(pr.DerivationFailure):
            pr.derive(weak, w("bba"), w("aaa"))


class TestCheck:
    @pytest.fixture
    def setup(self, ex2):
        pres = pr.extract_presentation(ex2)
        return pres, pr.derive(pres, w("bbba"), w("aaaa"))

    def test_wrong_position(self, setup):
        pres, d = setup
        st = d.steps[0]
        bad = pr.Derivation(d.start, (pr.Step(st.word, st.relation, st.position + 1, st.direction),) + d.steps[1:])
        assert not pr.check_derivation(pres, bad)

    def test_foreign_relation(self, setup):
        pres, d = setup
        st = d.steps[0]
        bad = pr.Derivation(d.start, (pr.Step(st.word, len(pres.relations), st.position, st.direction),) + d.steps[1:])
        assert not pr.check_derivation(pres, bad)

    def test_wrong_direction(self, setup):
        pres, d = setup
        st = d.steps[0]
        flip = pr.BACKWARD if st.direction == pr.FORWARD else pr.FORWARD
        bad = pr.Derivation(d.start, (pr.Step(st.word, st.relation, st.position, flip),) + d.steps[1:])
        assert not pr.check_derivation(pres, bad)

    def test_reversed(self, setup):
        pres, d = setup
        back = d.reversed(pres.relations)
        assert back.start == d.end and back.end == d.start
        assert pr.check_derivation(pres, back)


def test_verify_ex2(ex2):
    rep = pr.verify_presentation(ex2, pr.extract_presentation(ex2), 6)
    assert rep["pass"] and rep["words"] == sum(2**n for n in range(1, 7)) == rep["certified"]


def test_verify_ex1(ex1):
    rep = pr.verify_presentation(ex1, pr.extract_presentation(ex1), 6)
    assert rep["pass"] and rep["words"] == 6 and rep["total_steps"] == 0


def test_verify_reports_missing_relation(ex2):
    pres = pr.extract_presentation(ex2)
    rep = pr.verify_presentation(ex2, pr.Presentation(pres.generators, pres.relations[1:]), 3)
    assert not rep["pass"] and rep["budget_failures"] > 0 and rep["relations_satisfied"]


def test_every_derivation_checks(corpus_spec):
    pres = pr.extract_presentation(corpus_spec)
    for n in range(1, 5):
        for u in itertools.product(corpus_spec.generators, repeat=n):
            target = normalize(corpus_spec, u).word()
            d = pr.derive(pres, u, target)
            assert pr.check_derivation(pres, d) and d.end == target
