import json

import pytest

from monounion import validate as v
from monounion.evlin import EvLinMap, Piece
from monounion.model import SemigroupSpec, load_spec, render_spec

from .conftest import CORPUS


@pytest.fixture(scope="module")
def mutated(ex2):
    tables = ex2.tables
    tables[("b", "a")] = EvLinMap.shift("a", 2)
    return SemigroupSpec(ex2.generators, tables)


def test_valid_corpus(corpus_spec):
    assert v.verify_associativity(corpus_spec).valid
    assert v.validate(corpus_spec).verdict == v.VALID


def test_brute_corpus(corpus_spec):
    assert v.brute_oracle_associativity(corpus_spec, 30, 8).valid


def test_mutated_symbolic(mutated):
    rep = v.verify_associativity(mutated)
    assert rep.verdict == v.INVALID
    assert rep.findings[0] == {
        "check": "associativity", "triple": ["a", "b", "a"], "k": 1, "left": "a^3", "right": "a^4",
    }
    assert {f["triple"][0] for f in rep.findings} == {"a", "b"}


def test_mutated_brute(mutated):
    rep = v.brute_oracle_associativity(mutated, 30)
    assert rep.verdict == v.INVALID
    f = rep.findings[0]
    assert (f["x"], f["y"], f["z"], f["(xy)z"], f["x(yz)"]) == ("a^1", "b^1", "a^1", "a^3", "a^4")


def test_invalid_needs_witness():
    with pytest.raises(ValueError):
        v.ValidationReport(v.INVALID)


def test_semantics_flags_left_growth_violation():
    # a^k b = a^1: associativity fails too, but the structural check suite reports on its own
    spec = SemigroupSpec(
        "ab",
        {
            ("a", "a"): EvLinMap.shift("a"),
            ("b", "b"): EvLinMap.shift("b"),
            ("a", "b"): EvLinMap.from_parts([], [Piece(1, 1, "a", 1, 0)]),
            ("b", "a"): EvLinMap.shift("a"),
        },
    )
    rep = v.validate_semantics(spec, 2)
    assert rep.verdict == v.INVALID
    assert any(f["check"] == "left_growth" and f["p"] == 2 and f["r"] == 1 for f in rep.findings)


class TestSearch:
    def test_config_bounds(self):
        with pytest.raises(ValueError):
            v.SearchConfig(max_period=0)
        with pytest.raises(ValueError):
            v.SearchConfig(max_slope=-1)
        v.SearchConfig(max_slope=0, max_exceptions=0)

    def test_one_block(self, ex1):
        assert v.search(v.SearchConfig(blocks=1)) == [ex1]

    def test_smallest_two_block(self, ex2):
        found = v.search(v.SearchConfig(blocks=2))
        assert ex2 in found
        assert len(found) == 6
        assert len(set(found)) == len(found)

    def test_candidate_count(self):
        assert sum(1 for _ in v.enumerate_candidates(v.SearchConfig(blocks=2))) == 64

    def test_slices_partition_space(self):
        cfg = v.SearchConfig(blocks=2)
        whole = list(v.enumerate_candidates(cfg))
        n = len(v.candidate_maps(cfg, cfg.generators()))
        sliced = [s for i in range(n) for s in v.enumerate_candidates(cfg, i)]
        assert sliced == whole

    def test_parallel_matches_serial(self):
        cfg = v.SearchConfig(blocks=2)
        assert v.search(cfg, jobs=2) == v.search(cfg, jobs=1)

    def test_emitted_specs_pass_semantics(self):
        for spec in v.search(v.SearchConfig(blocks=2)):
            assert v.validate_semantics(spec).valid

    def test_shape_prefilter(self):
        bad = SemigroupSpec(
            "ab",
            {
                ("a", "a"): EvLinMap.shift("a"),
                ("b", "b"): EvLinMap.shift("b"),
                ("a", "b"): EvLinMap.from_parts([], [Piece(1, 2, "a", 2, 2), Piece(2, 2, "b", 2, 2)]),
                ("b", "a"): EvLinMap.shift("a"),
            },
        )
        assert v.shape_rejection(bad) is None  # odds / evens is a valid shape
        bad2 = SemigroupSpec(
            "ab",
            {
                ("a", "a"): EvLinMap.shift("a"),
                ("b", "b"): EvLinMap.shift("b"),
                ("a", "b"): EvLinMap.from_parts(
                    [], [Piece(1, 3, "a", 2, 3), Piece(2, 3, "a", 3, 3), Piece(3, 3, "b", 2, 3)]
                ),
                ("b", "a"): EvLinMap.shift("a"),
            },
        )
        assert v.shape_rejection(bad2).startswith("T(a,b,a)")

    def test_write_corpus(self, tmp_path):
        cfg = v.SearchConfig(blocks=2)
        specs = v.search(cfg)
        index = v.write_corpus(specs, tmp_path / "out", cfg)
        data = json.loads(index.read_text())
        assert data["count"] == 6 and len(data["specs"]) == 6
        for name, spec in zip(data["specs"], specs):
            assert name == v.spec_digest(spec) + ".json"
            assert load_spec(tmp_path / "out" / name) == spec
        again = v.write_corpus(specs, tmp_path / "again", cfg)
        assert again.read_text() == index.read_text()


def test_corpus_files_are_canonical():
    for path in sorted(CORPUS.glob("*.json")):
        assert render_spec(load_spec(path)) == path.read_text()
