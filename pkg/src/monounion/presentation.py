"""Finite presentations and checked derivations.

For each ordered pair ``a != b`` and each target block ``c`` the relations
``a^i b = c^j`` are kept for ``i`` in the finite part of ``T(a,b,c)`` and for
the first two members ``p`` and ``p + q`` of its progression; every other
relation ``a^k b = c^l`` follows from that pair by the induction

    a^(p+q(t+1)) b -> a^q c^(r+st) = a^q (c^r) c^(st) -> a^q (a^p b) c^(st)
                   -> c^(r+s) c^(st)

which :func:`derive` replays step by step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .analysis import t_sets
from .model import Element, SemigroupSpec, Word, render_word
from .wordprob import normalize

FORWARD, BACKWARD = "forward", "backward"


class DerivationFailure(Exception):
    """No derivation found; inconclusive, not a disproof."""


class BudgetExceeded(DerivationFailure):
    pass


def _lenlex(order: dict[str, int], w: Word) -> tuple:
    return len(w), tuple(order[x] for x in w)


@dataclass(frozen=True)
class Relation:
    lhs: Word
    rhs: Word

    def render(self, generators=None) -> str:
        return f"{render_word(self.lhs, generators)} = {render_word(self.rhs, generators)}"


def make_relation(u: Word, v: Word, generators: tuple[str, ...]) -> Relation:
    """Orient so that ``lhs >= rhs`` in length-lex order."""
    if not u or not v:
        raise ValueError("relation sides must be nonempty")
    order = {g: i for i, g in enumerate(generators)}
    if _lenlex(order, u) < _lenlex(order, v):
        u, v = v, u
    return Relation(tuple(u), tuple(v))


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[Relation, ...]

    def __post_init__(self) -> None:
        if len(set(self.relations)) != len(self.relations):
            raise ValueError("duplicate relations")

    def render(self) -> str:
        return "".join(r.render(self.generators) + "\n" for r in self.relations)

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [
                [render_word(r.lhs, self.generators), render_word(r.rhs, self.generators)]
                for r in self.relations
            ],
        }


def extract_presentation(spec: SemigroupSpec) -> Presentation:
    """The finite relation set: finite-part relations plus two per progression.

    No minimisation is attempted.
    """
    rels = set()
    for a in spec.generators:
        for b in spec.generators:
            if a == b:
                continue
            x = Element(b, 1)
            m = spec.table(a, b)
            for t in t_sets(spec, a, x):
                keep = sorted(t.F)
                if t.prog:
                    keep += [t.prog[0], t.prog[0] + t.prog[1]]
                for i in keep:
                    lhs = (a,) * i + (b,)
                    rhs = m.apply(i).word()
                    if lhs != rhs:
                        rels.add(make_relation(lhs, rhs, spec.generators))
    order = {g: i for i, g in enumerate(spec.generators)}
    ordered = sorted(rels, key=lambda r: (_lenlex(order, r.lhs), _lenlex(order, r.rhs)))
    return Presentation(spec.generators, tuple(ordered))


def parse_presentation(text: str, generators: tuple[str, ...]) -> Presentation:
    from .model import parse_word

    rels = []
    for line in text.splitlines():
        if not line.strip():
            continue
        left, sep, right = line.partition("=")
        if not sep:
            raise ValueError(f"bad relation line {line!r}")
        rels.append(make_relation(parse_word(left, generators), parse_word(right, generators), generators))
    return Presentation(tuple(generators), tuple(rels))


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """Replace one occurrence of a relation side at ``position``.

    ``forward`` rewrites ``lhs`` into ``rhs``; ``word`` is the result.
    """

    word: Word
    relation: int
    position: int
    direction: str


@dataclass(frozen=True)
class Derivation:
    start: Word
    steps: tuple[Step, ...]

    @property
    def end(self) -> Word:
        return self.steps[-1].word if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def words(self) -> list[Word]:
        return [self.start] + [s.word for s in self.steps]

    def reversed(self, relations: tuple[Relation, ...]) -> Derivation:
        ws = self.words()
        steps = []
        for i in range(len(self.steps) - 1, -1, -1):
            st = self.steps[i]
            flip = BACKWARD if st.direction == FORWARD else FORWARD
            steps.append(Step(ws[i], st.relation, st.position, flip))
        return Derivation(self.end, tuple(steps))


def check_derivation(pres: Presentation, d: Derivation) -> bool:
    """True iff every step is a single legal relation replacement."""
    cur = tuple(d.start)
    if not cur:
        return False
    for st in d.steps:
        if not 0 <= st.relation < len(pres.relations) or st.direction not in (FORWARD, BACKWARD):
            return False
        rel = pres.relations[st.relation]
        src, dst = (rel.lhs, rel.rhs) if st.direction == FORWARD else (rel.rhs, rel.lhs)
        i = st.position
        if i < 0 or cur[i:i + len(src)] != src:
            return False
        nxt = cur[:i] + dst + cur[i + len(src):]
        if nxt != tuple(st.word):
            return False
        cur = nxt
    return True


class _Rewriter:
    """Drives a word to the power-of-a-generator form using only the relations."""

    def __init__(self, pres: Presentation, budget: int):
        self.pres = pres
        self.budget = budget
        self.steps: list[Step] = []
        self.word: list[str] = []
        # rules[(a, b)] = [(i, c, j, relation index, direction)] for a^i b = c^j
        self.rules: dict[tuple[str, str], list[tuple[int, str, int, int, str]]] = {}
        for idx, rel in enumerate(pres.relations):
            for src, dst, direction in ((rel.lhs, rel.rhs, FORWARD), (rel.rhs, rel.lhs, BACKWARD)):
                a, b = src[0], src[-1]
                if (
                    len(src) >= 2
                    and a != b
                    and all(x == a for x in src[:-1])
                    and all(x == dst[0] for x in dst)
                ):
                    self.rules.setdefault((a, b), []).append((len(src) - 1, dst[0], len(dst), idx, direction))
        for lst in self.rules.values():
            lst.sort()

    def _apply(self, idx: int, position: int, direction: str) -> None:
        if len(self.steps) >= self.budget:
            raise BudgetExceeded(f"step budget {self.budget} exhausted")
        rel = self.pres.relations[idx]
        src, dst = (rel.lhs, rel.rhs) if direction == FORWARD else (rel.rhs, rel.lhs)
        assert tuple(self.word[position:position + len(src)]) == src
        self.word[position:position + len(src)] = dst
        self.steps.append(Step(tuple(self.word), idx, position, direction))

    def _pair(self, a: str, k: int, b: str):
        """Two rules ``a^i1 b = c^j1``, ``a^i2 b = c^j2`` whose progression hits ``k``."""
        best = None
        rules = self.rules.get((a, b), [])
        for r1, r2 in itertools.combinations(rules, 2):
            (i1, c1, j1, *_), (i2, c2, j2, *_) = r1, r2
            if c1 != c2 or i2 <= i1 or j2 < j1 or k < i1 or (k - i1) % (i2 - i1):
                continue
            key = ((k - i1) // (i2 - i1), i1, i2)
            if best is None or key < best[0]:
                best = (key, r1, r2)
        if best is None:
            raise DerivationFailure(f"no relation reduces {a}^{k}{b}")
        return best[1], best[2]

    def reduce(self, a: str, k: int, b: str, pos: int) -> tuple[str, int]:
        """Rewrite ``a^k b`` at ``pos`` into ``c^j``; returns ``(c, j)``."""
        for i, c, j, idx, direction in self.rules.get((a, b), []):
            if i == k:
                self._apply(idx, pos, direction)
                return c, j
        r1, r2 = self._pair(a, k, b)
        return self._along(a, k, pos, r1, r2)

    def _along(self, a: str, k: int, pos: int, r1, r2) -> tuple[str, int]:
        i1, c, j1, idx1, dir1 = r1
        i2, _, j2, idx2, dir2 = r2
        q, s = i2 - i1, j2 - j1
        if k == i1:
            self._apply(idx1, pos, dir1)
            return c, j1
        if k == i2:
            self._apply(idx2, pos, dir2)
            return c, j2
        _, j = self._along(a, k - q, pos + q, r1, r2)
        back = BACKWARD if dir1 == FORWARD else FORWARD
        self._apply(idx1, pos + q, back)
        self._apply(idx2, pos, dir2)
        return c, j + s

    def normal_form(self, w: Word) -> tuple[Word, Derivation]:
        self.steps = []
        self.word = list(w)
        gen, k = w[0], 1
        while k < len(self.word):
            nxt = self.word[k]
            if nxt == gen:
                k += 1
            else:
                gen, k = self.reduce(gen, k, nxt, 0)
        return tuple(self.word), Derivation(tuple(w), tuple(self.steps))


def derive(pres: Presentation, u: Word, v: Word, budget: int | None = None) -> Derivation:
    """A checked derivation from ``u`` to ``v``.

    Both words are rewritten to a power of a single generator and the two
    paths are joined.  Raises :class:`DerivationFailure` (or its subclass
    :class:`BudgetExceeded`) when that fails; neither is a disproof.
    """
    u, v = tuple(u), tuple(v)
    if not u or not v:
        raise ValueError("words must be nonempty")
    if budget is None:
        budget = 10 * len(u) + len(v)
    if u == v:
        return Derivation(u, ())
    rw = _Rewriter(pres, budget)
    nf_u, du = rw.normal_form(u)
    rw.budget = budget - len(du)
    nf_v, dv = rw.normal_form(v)
    if nf_u != nf_v:
        raise DerivationFailure(
            f"normal forms differ: {render_word(nf_u)} vs {render_word(nf_v)}"
        )
    back = dv.reversed(pres.relations)
    return Derivation(u, du.steps + back.steps)


def verify_presentation(
    spec: SemigroupSpec, pres: Presentation, max_len: int = 6, budget: int | None = None
) -> dict:
    """Derive every word of length ``<= max_len`` to its normal-form word and
    re-check each derivation."""
    words = failures = total_steps = longest = rejected = 0
    failed = []
    for n in range(1, max_len + 1):
        for w in itertools.product(spec.generators, repeat=n):
            words += 1
            target = normalize(spec, w).word()
            try:
                d = derive(pres, w, target, budget)
            except DerivationFailure as exc:
                failures += 1
                failed.append({"word": render_word(w, spec.generators), "reason": str(exc)})
                continue
            if not check_derivation(pres, d) or d.end != target:
                rejected += 1
                failed.append({"word": render_word(w, spec.generators), "reason": "check failed"})
                continue
            total_steps += len(d)
            longest = max(longest, len(d))
    satisfied = all(
        normalize(spec, r.lhs) == normalize(spec, r.rhs) for r in pres.relations
    )
    return {
        "pass": satisfied and not failures and not rejected,
        "relations_satisfied": satisfied,
        "max_len": max_len,
        "words": words,
        "certified": words - failures - rejected,
        "budget_failures": failures,
        "check_failures": rejected,
        "total_steps": total_steps,
        "max_derivation_length": longest,
        "failed": failed,
    }
