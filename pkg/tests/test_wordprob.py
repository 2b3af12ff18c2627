import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monounion.element import Element
from monounion.evlin import EvLinMap
from monounion.wordprob import fold_elements, multiply, naive_oracle, normalize, right_mult_map, runs


@pytest.mark.parametrize(
    "word,expected",
    [("ba", ("a", 2)), ("bbba", ("a", 4)), ("abab", ("a", 4)), ("bb", ("b", 2)), ("a", ("a", 1))],
)
def test_normalize_ex2(ex2, word, expected):
    assert normalize(ex2, tuple(word)) == Element(*expected)


def test_normalize_ex1(ex1):
    assert normalize(ex1, ("a",) * 3) == Element("a", 3)


def test_empty_word(ex2):
    with pytest.raises(ValueError):
        normalize(ex2, ())
    with pytest.raises(ValueError):
        naive_oracle(ex2, ())


def test_runs():
    assert runs(("a", "a", "b")) == [Element("a", 2), Element("b", 1)]


def test_multiply_examples(ex1, ex2):
    assert multiply(ex1, Element("a", 3), Element("a", 4)) == Element("a", 7)
    assert multiply(ex2, Element("b", 2), Element("a", 5)) == Element("a", 7)


def test_huge_exponents(ex2):
    n = 10**12
    assert multiply(ex2, Element("a", n), Element("b", 1)) == Element("a", n + 1)
    assert multiply(ex2, Element("b", 3), Element("a", n)) == Element("a", n + 3)


def test_right_mult_maps(ex2, ex3):
    assert right_mult_map(ex2, "a", Element("b", 3)) == EvLinMap.shift("a", 3)
    assert right_mult_map(ex2, "b", Element("a", 1)) == EvLinMap.shift("a")
    for j in (1, 2, 7):
        assert right_mult_map(ex3, "c", Element("c", j)) == EvLinMap.shift("c", j)


def test_exception_reached(ex3):
    # c^1 b is the exceptional value a^2
    assert normalize(ex3, ("c", "b")) == Element("a", 2)
    assert normalize(ex3, ("c", "c", "b")) == Element("c", 3)


def test_normalize_matches_oracle_exhaustive(corpus_spec):
    for n in range(1, 7):
        for w in itertools.product(corpus_spec.generators, repeat=n):
            assert normalize(corpus_spec, w) == naive_oracle(corpus_spec, w), w


@given(st.data())
def test_multiply_matches_folding(corpus_spec, data):
    gens = st.sampled_from(corpus_spec.generators)
    x = Element(data.draw(gens), data.draw(st.integers(1, 50)))
    y = Element(data.draw(gens), data.draw(st.integers(1, 50)))
    assert multiply(corpus_spec, x, y) == fold_elements(corpus_spec, x, y)


@given(st.data())
def test_multiply_is_associative(corpus_spec, data):
    gens = st.sampled_from(corpus_spec.generators)
    x, y, z = (Element(data.draw(gens), data.draw(st.integers(1, 10**6))) for _ in range(3))
    m = multiply
    assert m(corpus_spec, m(corpus_spec, x, y), z) == m(corpus_spec, x, m(corpus_spec, y, z))
