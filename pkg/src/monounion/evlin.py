"""Eventually-linear exponent maps and eventually-periodic subsets of N.

Everything infinite in the theory reduces to two finite objects:

* :class:`EvLinMap` -- a total map ``k -> c^j`` on the exponents of one block,
  given by finitely many exceptional values plus arithmetic-progression
  pieces ``p + q*t -> target^(r + s*t)``;
* :class:`EPSet` -- a set of positive integers equal to a finite set plus
  finitely many arithmetic progressions.

Both are kept in a canonical form, so structural equality is extensional
equality.  All arithmetic is on Python ints and :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Mapping, Union

from .element import Element

Law = tuple[str, Fraction, Fraction]  # (target, slope per unit k, intercept)


def divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _check_int(name: str, value: object, low: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < low:
        raise ValueError(f"{name} must be an integer >= {low}, got {value!r}")


def solve_congruence(a: int, b: int, m: int) -> tuple[int, int] | None:
    """Solve ``a*t = b (mod m)``; return ``(t0, period)`` with ``0 <= t0 < period``.

    Returns ``None`` when there is no solution.
    """
    g = gcd(a, m)
    if (b % m) % g:
        return None
    period = m // g
    if period == 1:
        return 0, 1
    inv = pow((a // g) % period, -1, period)  # extended gcd
    return ((b // g) * inv) % period, period


# ---------------------------------------------------------------------------
# eventually-linear maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Piece:
    """``p + q*t  ->  target^(r + s*t)`` for all ``t >= 0``."""

    p: int
    q: int
    target: str
    r: int
    s: int

    def __post_init__(self) -> None:
        _check_int("p", self.p, 1)
        _check_int("q", self.q, 1)
        _check_int("r", self.r, 1)
        _check_int("s", self.s, 0)

    def covers(self, k: int) -> bool:
        return k >= self.p and (k - self.p) % self.q == 0

    def image(self, k: int) -> Element:
        return Element(self.target, self.r + self.s * ((k - self.p) // self.q))

    def law(self) -> Law:
        slope = Fraction(self.s, self.q)
        return self.target, slope, self.r - slope * self.p


def _law_value(law: Law, k: int) -> Element | None:
    target, slope, intercept = law
    value = intercept + slope * k
    if value.denominator != 1 or value < 1:
        return None
    return Element(target, int(value))


@dataclass(frozen=True)
class EvLinMap:
    """Total map from exponents ``k >= 1`` of one block to elements.

    Build validated maps with :meth:`from_parts`; the plain constructor
    trusts its input (it is used internally on already-partitioned data).
    """

    exceptions: tuple[tuple[int, Element], ...] = ()
    pieces: tuple[Piece, ...] = ()
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)
    _canon: list = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "exceptions", tuple(self.exceptions))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "_lookup", dict(self.exceptions))
        object.__setattr__(self, "_canon", [])

    @classmethod
    def from_parts(
        cls,
        exceptions: Iterable[tuple[int, Element]],
        pieces: Iterable[Piece],
    ) -> EvLinMap:
        """Validate the partition invariant and return the canonical map."""
        m = cls(tuple(exceptions), tuple(pieces))
        err = m.partition_error()
        if err:
            raise ValueError(err)
        return m.canonical()

    @classmethod
    def shift(cls, gen: str, by: int = 1) -> EvLinMap:
        return cls((), (Piece(1, 1, gen, 1 + by, 1),))

    @classmethod
    def identity(cls, gen: str) -> EvLinMap:
        return cls((), (Piece(1, 1, gen, 1, 1),))

    @property
    def threshold(self) -> int:
        """Every exponent ``>=`` this lies in a piece that has already started."""
        starts = [pc.p for pc in self.pieces] + [k + 1 for k in self._lookup]
        return max(starts, default=1)

    @property
    def period(self) -> int:
        return lcm(*(pc.q for pc in self.pieces)) if self.pieces else 1

    def targets(self) -> set[str]:
        return {pc.target for pc in self.pieces} | {e.gen for e in self._lookup.values()}

    def partition_error(self) -> str | None:
        keys = [k for k, _ in self.exceptions]
        if len(set(keys)) != len(keys):
            return "duplicate exception keys"
        for k in keys:
            _check_int("exception key", k, 1)
        if not self.pieces:
            return "no pieces: finitely many exceptions cannot cover every exponent"
        top = self.threshold + self.period
        for k in range(1, top):
            n = (k in self._lookup) + sum(pc.covers(k) for pc in self.pieces)
            if n == 0:
                return f"exponent {k} is not covered"
            if n > 1:
                return f"exponent {k} is covered {n} times"
        return None

    def apply(self, k: int) -> Element:
        hit = self._lookup.get(k)
        if hit is not None:
            return hit
        for pc in self.pieces:
            if pc.covers(k):
                return pc.image(k)
        raise ValueError(f"exponent {k} not covered (invalid map)")

    def _eventual_laws(self) -> tuple[int, int, list[Law]]:
        P, L = self.threshold, self.period
        laws = []
        for rho in range(L):
            k = P + (rho - P) % L
            laws.append(next(pc for pc in self.pieces if pc.covers(k)).law())
        return P, L, laws

    def canonical(self) -> EvLinMap:
        """Unique representative of this map's extension.

        Minimal eventual period; residues sharing a law are merged into the
        coarsest progressions (greedily by increasing divisor); each piece's
        start is lowered while earlier values still follow its law, which
        absorbs exceptions.
        """
        if self._canon:
            return self._canon[0]
        P, L, laws = self._eventual_laws()
        d = next(d for d in divisors(L) if all(laws[i] == laws[i % d] for i in range(L)))
        assigned = [False] * d
        pieces = []
        for e in divisors(d):
            for c in range(e):
                members = range(c, d, e)
                if any(assigned[i] for i in members):
                    continue
                law = laws[c]
                if any(laws[i] != law for i in members):
                    continue
                for i in members:
                    assigned[i] = True
                k = P + (c - P) % e
                while k - e >= 1 and self.apply(k - e) == _law_value(law, k - e):
                    k -= e
                start = _law_value(law, k)
                pieces.append(Piece(k, e, law[0], start.exp, int(law[1] * e)))
        exceptions = tuple(
            (k, self.apply(k))
            for k in range(1, P)
            if not any(pc.covers(k) for pc in pieces)
        )
        result = EvLinMap(exceptions, tuple(sorted(pieces)))
        result._canon.append(result)
        self._canon.append(result)
        return result

    def describe(self) -> str:
        parts = [f"{k}->{v}" for k, v in self.exceptions]
        parts += [f"{pc.p}+{pc.q}t->{pc.target}^({pc.r}+{pc.s}t)" for pc in self.pieces]
        return "{" + ", ".join(parts) + "}"


Selector = Union[Mapping[str, EvLinMap], Callable[[str], EvLinMap]]


def _selector(g: Selector) -> Callable[[str], EvLinMap]:
    return g.__getitem__ if isinstance(g, Mapping) else g


def apply(m: EvLinMap, k: int) -> Element:
    return m.apply(k)


def compose(f: EvLinMap, g_of: Selector) -> EvLinMap:
    """The canonical map ``k -> g_c(f(k))`` where ``c`` is the block of ``f(k)``.

    Each piece of ``f`` is split against the structure of the relevant ``g``:
    the finitely many ``t`` whose image hits a ``g``-exception become
    exceptions, and for each ``g``-piece the admissible ``t`` form a
    progression found by solving a linear congruence.
    """
    g_of = _selector(g_of)
    exceptions: list[tuple[int, Element]] = []
    pieces: list[Piece] = []
    for k, val in f.exceptions:
        exceptions.append((k, g_of(val.gen).apply(val.exp)))
    for pc in f.pieces:
        g = g_of(pc.target)
        if pc.s == 0:
            img = g.apply(pc.r)
            pieces.append(Piece(pc.p, pc.q, img.gen, img.exp, 0))
            continue
        for e, val in g.exceptions:
            if e >= pc.r and (e - pc.r) % pc.s == 0:
                exceptions.append((pc.p + pc.q * ((e - pc.r) // pc.s), val))
        for gp in g.pieces:
            sol = solve_congruence(pc.s, gp.p - pc.r, gp.q)
            if sol is None:
                continue
            t0, T = sol
            t_min = _ceil_div(gp.p - pc.r, pc.s) if gp.p > pc.r else 0
            t1 = t0 if t_min <= t0 else t0 + T * _ceil_div(t_min - t0, T)
            m0 = pc.r + pc.s * t1
            pieces.append(
                Piece(
                    pc.p + pc.q * t1,
                    pc.q * T,
                    gp.target,
                    gp.r + gp.s * ((m0 - gp.p) // gp.q),
                    gp.s * pc.s // gcd(pc.s, gp.q),
                )
            )
    return EvLinMap(tuple(exceptions), tuple(pieces)).canonical()


def compose_families(
    first: Mapping[str, EvLinMap], then: Mapping[str, EvLinMap]
) -> dict[str, EvLinMap]:
    """Blockwise composition of two right-multiplication families."""
    return {block: compose(m, then) for block, m in first.items()}


def power(family: Mapping[str, EvLinMap], j: int) -> dict[str, EvLinMap]:
    """The ``j``-fold composite of a family, by square-and-multiply."""
    if j < 1:
        raise ValueError("power exponent must be >= 1")
    result: dict[str, EvLinMap] | None = None
    base = dict(family)
    while True:
        if j & 1:
            result = base if result is None else compose_families(result, base)
        j >>= 1
        if not j:
            return result
        base = compose_families(base, base)


def first_difference(f: EvLinMap, g: EvLinMap) -> int | None:
    """Smallest ``k`` with ``f(k) != g(k)``, or ``None`` if the maps agree.

    Beyond ``P = max threshold`` both maps are affine on each residue class
    modulo ``L = lcm`` of all periods, so agreement on ``1 .. P + 2L``
    (two points per class) decides equality.
    """
    P = max(f.threshold, g.threshold)
    L = lcm(f.period, g.period)
    for k in range(1, P + 2 * L + 1):
        if f.apply(k) != g.apply(k):
            return k
    return None


def maps_equal(f: EvLinMap, g: EvLinMap) -> bool:
    if f._canon and g._canon and f.canonical() == g.canonical():
        return True
    return first_difference(f, g) is None


# ---------------------------------------------------------------------------
# eventually-periodic sets
# ---------------------------------------------------------------------------


def _canonical_parts(
    pred: Callable[[int], bool], P: int, L: int
) -> tuple[frozenset[int], tuple[tuple[int, int], ...]]:
    """Canonical (finite part, progressions) of a set known to be
    ``L``-periodic from ``P`` on."""
    below = [k for k in range(1, P) if pred(k)]
    pattern = [pred(P + (rho - P) % L) for rho in range(L)]
    d = next(d for d in divisors(L) if all(pattern[i] == pattern[i % d] for i in range(L)))
    assigned = [not pattern[i] for i in range(d)]
    progs = []
    for e in divisors(d):
        for c in range(e):
            members = range(c, d, e)
            if any(assigned[i] for i in members):
                continue
            for i in members:
                assigned[i] = True
            k = P + (c - P) % e
            while k - e >= 1 and pred(k - e):
                k -= e
            progs.append((k, e))
    progs.sort()
    finite = frozenset(
        k for k in below if not any(k >= p and (k - p) % q == 0 for p, q in progs)
    )
    return finite, tuple(progs)


@dataclass(frozen=True)
class EPSet:
    """Eventually-periodic subset of the positive integers.

    Always stored canonically: minimal eventual period, coarsest progressions,
    minimal start per progression, finite part disjoint from all of them.
    """

    finite: frozenset[int] = frozenset()
    progressions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        finite = frozenset(self.finite)
        progs = tuple(tuple(pq) for pq in self.progressions)
        for k in finite:
            _check_int("finite member", k, 1)
        for p, q in progs:
            _check_int("progression start", p, 1)
            _check_int("progression period", q, 1)
        P = max([k + 1 for k in finite] + [p for p, _ in progs], default=1)
        L = lcm(*(q for _, q in progs)) if progs else 1

        def pred(k: int) -> bool:
            return k in finite or any(k >= p and (k - p) % q == 0 for p, q in progs)

        fin, prg = _canonical_parts(pred, P, L)
        object.__setattr__(self, "finite", fin)
        object.__setattr__(self, "progressions", prg)

    @classmethod
    def from_predicate(cls, pred: Callable[[int], bool], threshold: int, period: int) -> EPSet:
        """The set ``{k : pred(k)}``, given that membership is
        ``period``-periodic for ``k >= threshold``."""
        fin, prg = _canonical_parts(pred, max(threshold, 1), period)
        obj = object.__new__(cls)
        object.__setattr__(obj, "finite", fin)
        object.__setattr__(obj, "progressions", prg)
        return obj

    @classmethod
    def full(cls) -> EPSet:
        return cls(progressions=((1, 1),))

    @classmethod
    def empty(cls) -> EPSet:
        return cls()

    @property
    def threshold(self) -> int:
        return max([k + 1 for k in self.finite] + [p for p, _ in self.progressions], default=1)

    @property
    def period(self) -> int:
        return lcm(*(q for _, q in self.progressions)) if self.progressions else 1

    def __contains__(self, k: int) -> bool:
        return k in self.finite or any(
            k >= p and (k - p) % q == 0 for p, q in self.progressions
        )

    def member(self, k: int) -> bool:
        return k in self

    def is_empty(self) -> bool:
        return not self.finite and not self.progressions

    def is_finite(self) -> bool:
        return not self.progressions

    def elements(self, upto: int) -> list[int]:
        return [k for k in range(1, upto + 1) if k in self]

    def _combine(self, other: EPSet, op: Callable[[bool, bool], bool]) -> EPSet:
        P = max(self.threshold, other.threshold)
        L = lcm(self.period, other.period)
        return EPSet.from_predicate(lambda k: op(k in self, k in other), P, L)

    def union(self, other: EPSet) -> EPSet:
        return self._combine(other, lambda x, y: x or y)

    def intersect(self, other: EPSet) -> EPSet:
        return self._combine(other, lambda x, y: x and y)

    def difference(self, other: EPSet) -> EPSet:
        return self._combine(other, lambda x, y: x and not y)

    def complement(self) -> EPSet:
        return EPSet.from_predicate(lambda k: k not in self, self.threshold, self.period)

    complement_in_N = complement

    def issubset(self, other: EPSet) -> bool:
        return self.difference(other).is_empty()

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def to_json(self) -> dict:
        return {
            "finite": sorted(self.finite),
            "progressions": [{"p": p, "q": q} for p, q in self.progressions],
        }

    def __str__(self) -> str:
        parts = [str(k) for k in sorted(self.finite)]
        parts += [f"{p}+{q}N" for p, q in self.progressions]
        return "{" + ", ".join(parts) + "}" if parts else "{}"


def preimage_of_block(m: EvLinMap, block: str) -> EPSet:
    """Exponents ``k`` with ``m(k)`` in ``block``."""
    return EPSet.from_predicate(lambda k: m.apply(k).gen == block, m.threshold, m.period)


def preimage(m: EvLinMap, block: str, target: EPSet) -> EPSet:
    """Exponents ``k`` with ``m(k) = block^j`` and ``j`` in ``target``."""
    P = max([k + 1 for k, _ in m.exceptions], default=1)
    L = 1
    tP, tL = target.threshold, target.period
    for pc in m.pieces:
        if pc.target != block:
            P, L = max(P, pc.p), lcm(L, pc.q)
            continue
        t0 = _ceil_div(tP - pc.r, pc.s) if pc.s and pc.r < tP else 0
        P = max(P, pc.p + pc.q * t0)
        L = lcm(L, pc.q * tL)

    def pred(k: int) -> bool:
        img = m.apply(k)
        return img.gen == block and img.exp in target

    return EPSet.from_predicate(pred, P, L)
