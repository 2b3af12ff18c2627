"""Semigroup instances: generators, right-multiplication tables, file format.

An instance file is UTF-8 JSON::

    {
      "generators": ["a", "b"],
      "tables": {
        "a|b": {"exceptions": [{"k": 1, "to": ["a", 2]}],
                "pieces": [{"p": 2, "q": 1, "to": "a", "r": 3, "s": 1}]},
        ...
      }
    }

``"x|y"`` holds the map ``k -> x^k y``.  Every ordered pair needs a table and
``x|x`` must be the shift ``k -> x^(k+1)``.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .element import IDENTITY, Element, Identity
from .evlin import EvLinMap, Piece

__all__ = [
    "Element",
    "IDENTITY",
    "Identity",
    "SemigroupSpec",
    "SpecError",
    "Word",
    "parse_spec",
    "render_spec",
    "load_spec",
    "parse_element",
    "render_element",
    "parse_word",
    "render_word",
    "word_key",
]

Word = tuple[str, ...]

GEN_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
ELEMENT_RE = re.compile(r"\s*([a-z][a-z0-9_]*)\s*(?:\^\s*(-?\d+))?\s*\Z")


class SpecError(ValueError):
    """Malformed instance data; ``line``/``col`` point into the source when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)


class SemigroupSpec:
    """Finite generator list plus one :class:`EvLinMap` per ordered pair.

    Immutable.  Carries a lock-protected memo used by :mod:`monounion.wordprob`
    that never affects equality.
    """

    __slots__ = ("generators", "_tables", "_index", "_cache", "_lock")

    def __init__(self, generators: Iterable[str], tables: Mapping[tuple[str, str], EvLinMap]):
        gens = tuple(generators)
        if not gens:
            raise SpecError("at least one generator is required")
        for g in gens:
            if not isinstance(g, str) or not GEN_RE.match(g):
                raise SpecError(f"bad generator name {g!r}")
        if len(set(gens)) != len(gens):
            raise SpecError("duplicate generator names")
        canon = {}
        for a in gens:
            for b in gens:
                if (a, b) not in tables:
                    raise SpecError(f"missing table for pair {a}|{b}")
                m = tables[(a, b)]
                err = m.partition_error()
                if err:
                    raise SpecError(f"table {a}|{b}: {err}")
                for tgt in m.targets():
                    if tgt not in gens:
                        raise SpecError(f"table {a}|{b}: unknown target generator {tgt!r}")
                canon[(a, b)] = m.canonical()
            if canon[(a, a)] != EvLinMap.shift(a):
                raise SpecError(f"table {a}|{a}: ({a},{a}) must be shift k -> {a}^(k+1)")
        extra = set(tables) - set(canon)
        if extra:
            raise SpecError(f"tables for unknown pairs: {sorted(extra)}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_tables", canon)
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(gens)})
        object.__setattr__(self, "_cache", {})
        object.__setattr__(self, "_lock", threading.Lock())

    def __setattr__(self, name, value):
        raise AttributeError("SemigroupSpec is immutable")

    def __reduce__(self):
        # the memo and its lock are rebuilt on the other side
        return SemigroupSpec, (self.generators, self._tables)

    def table(self, a: str, b: str) -> EvLinMap:
        return self._tables[(a, b)]

    def family(self, b: str) -> dict[str, EvLinMap]:
        """Right multiplication by the generator ``b``, block by block."""
        return {a: self._tables[(a, b)] for a in self.generators}

    @property
    def tables(self) -> dict[tuple[str, str], EvLinMap]:
        return dict(self._tables)

    @property
    def n(self) -> int:
        return len(self.generators)

    def gen_index(self, g: str) -> int:
        return self._index[g]

    def single_char(self) -> bool:
        return all(len(g) == 1 for g in self.generators)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemigroupSpec):
            return NotImplemented
        return self.generators == other.generators and self._tables == other._tables

    def __hash__(self) -> int:
        return hash((self.generators, tuple(sorted(self._tables.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        return f"SemigroupSpec(generators={list(self.generators)})"


def word_key(spec: SemigroupSpec, w: Word) -> tuple:
    """Length-lex sort key in generator declaration order."""
    return len(w), tuple(spec.gen_index(x) for x in w)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------


def _strict_keys(obj: object, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SpecError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise SpecError(f"{where}: missing field(s) {sorted(missing)}")
    return obj


def _int(value: object, low: int, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < low:
        raise SpecError(f"{where}: expected integer >= {low}, got {value!r}")
    return value


def _gen(value: object, gens: set[str], where: str) -> str:
    if value not in gens:
        raise SpecError(f"{where}: unknown generator {value!r}")
    return value


def _parse_table(obj: object, gens: set[str], where: str) -> EvLinMap:
    obj = _strict_keys(obj, {"exceptions", "pieces"}, where)
    if not isinstance(obj["exceptions"], list) or not isinstance(obj["pieces"], list):
        raise SpecError(f"{where}: exceptions and pieces must be lists")
    exceptions = []
    for i, e in enumerate(obj["exceptions"]):
        w = f"{where}.exceptions[{i}]"
        e = _strict_keys(e, {"k", "to"}, w)
        to = e["to"]
        if not isinstance(to, list) or len(to) != 2:
            raise SpecError(f"{w}.to: expected [generator, exponent]")
        exceptions.append((_int(e["k"], 1, w + ".k"), Element(_gen(to[0], gens, w), _int(to[1], 1, w))))
    pieces = []
    for i, pc in enumerate(obj["pieces"]):
        w = f"{where}.pieces[{i}]"
        pc = _strict_keys(pc, {"p", "q", "to", "r", "s"}, w)
        pieces.append(
            Piece(
                _int(pc["p"], 1, w + ".p"),
                _int(pc["q"], 1, w + ".q"),
                _gen(pc["to"], gens, w + ".to"),
                _int(pc["r"], 1, w + ".r"),
                _int(pc["s"], 0, w + ".s"),
            )
        )
    m = EvLinMap(tuple(exceptions), tuple(pieces))
    err = m.partition_error()
    if err:
        raise SpecError(f"{where}: overlapping/uncovered exponents: {err}")
    return m


def spec_from_json(data: object) -> SemigroupSpec:
    data = _strict_keys(data, {"generators", "tables"}, "instance")
    gens = data["generators"]
    if not isinstance(gens, list) or not gens:
        raise SpecError("generators: expected a nonempty list")
    for g in gens:
        if not isinstance(g, str) or not GEN_RE.match(g):
            raise SpecError(f"generators: bad name {g!r}")
    gset = set(gens)
    if len(gset) != len(gens):
        raise SpecError("generators: duplicate names")
    raw = data["tables"]
    if not isinstance(raw, dict):
        raise SpecError("tables: expected an object")
    tables = {}
    for key, obj in raw.items():
        parts = key.split("|")
        if len(parts) != 2 or not all(p in gset for p in parts):
            raise SpecError(f"tables: bad key {key!r}")
        tables[(parts[0], parts[1])] = _parse_table(obj, gset, f"tables[{key!r}]")
    return SemigroupSpec(gens, tables)


def parse_spec(text: str) -> SemigroupSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    return spec_from_json(data)


def load_spec(path) -> SemigroupSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def table_to_json(m: EvLinMap) -> dict:
    return {
        "exceptions": [{"k": k, "to": [v.gen, v.exp]} for k, v in m.exceptions],
        "pieces": [
            {"p": pc.p, "q": pc.q, "to": pc.target, "r": pc.r, "s": pc.s} for pc in m.pieces
        ],
    }


def spec_to_json(spec: SemigroupSpec) -> dict:
    return {
        "generators": list(spec.generators),
        "tables": {
            f"{a}|{b}": table_to_json(spec.table(a, b))
            for a in spec.generators
            for b in spec.generators
        },
    }


def render_spec(spec: SemigroupSpec) -> str:
    """Canonical text; byte-identical for equal specs."""
    return json.dumps(spec_to_json(spec), indent=2) + "\n"


# ---------------------------------------------------------------------------
# elements and words
# ---------------------------------------------------------------------------


def parse_element(text: str, generators: Iterable[str] | None = None) -> Element:
    m = ELEMENT_RE.match(text)
    if not m:
        raise SpecError(f"bad element syntax {text!r} (expected g^k)")
    gen, exp = m.group(1), m.group(2)
    if generators is not None and gen not in set(generators):
        raise SpecError(f"unknown generator {gen!r}")
    k = 1 if exp is None else int(exp)
    if k < 1:
        raise SpecError(f"exponent must be >= 1 in {text!r}")
    return Element(gen, k)


def render_element(x: Element) -> str:
    return f"{x.gen}^{x.exp}"


def parse_word(text: str, generators: Iterable[str]) -> Word:
    gens = list(generators)
    tokens = text.split()
    if not tokens:
        raise SpecError("empty word")
    if len(tokens) == 1 and tokens[0] not in gens and all(len(g) == 1 for g in gens):
        tokens = list(tokens[0])
    for t in tokens:
        if t not in gens:
            raise SpecError(f"unknown generator {t!r}")
    return tuple(tokens)


def render_word(w: Word, generators: Iterable[str] | None = None) -> str:
    if not w:
        raise SpecError("empty word")
    bare = all(len(g) == 1 for g in (generators if generators is not None else w))
    return "".join(w) if bare else " ".join(w)
