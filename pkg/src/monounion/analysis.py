"""T-sets ``T(a,x,b) = {a^k : a^k x in N_b}`` and the structural checks built on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .evlin import EPSet, EvLinMap, preimage_of_block
from .model import Element, SemigroupSpec, Word, render_element
from .wordprob import multiply, normalize, right_mult_map

DEFAULT_HORIZON = 4


class ShapeViolation(ValueError):
    """A preimage that is not ``F + {p + q t}`` with ``F`` below ``p``."""


@dataclass(frozen=True)
class TSet:
    a: str
    x: Element
    b: str
    members: EPSet
    F: frozenset[int]
    prog: tuple[int, int] | None
    law: tuple[int, int] | None

    @property
    def is_empty(self) -> bool:
        return self.members.is_empty()

    @property
    def is_infinite(self) -> bool:
        return self.prog is not None

    @property
    def q(self) -> int | None:
        return self.prog[1] if self.prog else None

    @property
    def p(self) -> int | None:
        return self.prog[0] if self.prog else None

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "x": render_element(self.x),
            "b": self.b,
            "F": sorted(self.F),
            "p": self.p,
            "q": self.q,
            "r": self.law[0] if self.law else None,
            "s": self.law[1] if self.law else None,
        }


def split_shape(members: EPSet) -> tuple[frozenset[int], tuple[int, int] | None]:
    """Split a T-set into its finite head and single progression.

    ``q`` is the smallest gap between two members, then ``p`` the smallest
    member ``i`` with ``i + q`` also a member.  Raises :class:`ShapeViolation`
    if the set is not ``F + {p + q t}`` with ``F`` inside ``[1, p)``.
    """
    if members.is_finite():
        if len(members.finite) > 1:
            raise ShapeViolation(f"finite T-set with {len(members.finite)} members {members}")
        return members.finite, None
    upto = members.threshold + 2 * members.period
    elems = members.elements(upto)
    q = min(y - x for x, y in zip(elems, elems[1:]))
    p = next(i for i in elems if i + q in members)
    head = frozenset(i for i in elems if i < p)
    if EPSet(head, ((p, q),)) != members:
        raise ShapeViolation(f"T-set {members} is not a finite head plus one progression")
    return head, (p, q)


def tset_from_map(a: str, x: Element, b: str, m: EvLinMap) -> TSet:
    members = preimage_of_block(m, b)
    F, prog = split_shape(members)
    law = None
    if prog:
        p, q = prog
        r = m.apply(p).exp
        s = m.apply(p + q).exp - r
        if s < 0:
            raise ShapeViolation(f"image exponents decrease along {p}+{q}t")
        span = m.threshold + 2 * lcm(m.period, q)
        for t in range(span // q + 2):
            if m.apply(p + q * t) != Element(b, r + s * t):
                raise ShapeViolation(f"image of {p}+{q}t is not linear (fails at t={t})")
        law = (r, s)
    return TSet(a, x, b, members, F, prog, law)


def t_set(spec: SemigroupSpec, a: str, x: Element, b: str) -> TSet:
    return tset_from_map(a, x, b, right_mult_map(spec, a, x))


def t_sets(spec: SemigroupSpec, a: str, x: Element) -> list[TSet]:
    m = right_mult_map(spec, a, x)
    return [tset_from_map(a, x, b, m) for b in spec.generators]


def q_sum_check(spec: SemigroupSpec, a: str, x: Element) -> Fraction:
    """Sum of ``1/q(a,x,b)`` over the infinite T-sets; equals 1 for valid specs."""
    return sum((Fraction(1, t.q) for t in t_sets(spec, a, x) if t.is_infinite), Fraction(0))


def unit_fraction_solutions(n: int, r) -> list[tuple[int, ...]]:
    """All ``m_1 >= ... >= m_n >= 1`` with ``sum 1/m_i = r``, in ascending order.

    The smallest entry satisfies ``1/r < m_n <= n/r``; recurse on the rest.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    r = Fraction(r)

    def rec(n: int, r: Fraction, lo: int) -> list[tuple[int, ...]]:
        if r <= 0:
            return []
        if n == 1:
            return [(r.denominator,)] if r.numerator == 1 and r.denominator >= lo else []
        out = []
        m = max(lo, int(1 / r) + 1)
        while m * r <= n:
            out += [rest + (m,) for rest in rec(n - 1, r - Fraction(1, m), m)]
            m += 1
        return out

    return sorted(rec(n, r, 1))


def words(spec: SemigroupSpec, length: int) -> list[Word]:
    return [tuple(w) for w in itertools.product(spec.generators, repeat=length)]


def elements_by_horizon(spec: SemigroupSpec, horizon: int) -> dict[Element, int]:
    """Distinct elements of word length ``<= horizon`` with their shortest length,
    in length-lex order of their first word."""
    seen: dict[Element, int] = {}
    for h in range(1, horizon + 1):
        for w in words(spec, h):
            seen.setdefault(normalize(spec, w), h)
    return seen


def all_tsets(spec: SemigroupSpec, horizon: int) -> list[tuple[int, TSet]]:
    """``(horizon, TSet)`` for every ``a``, ``b`` and ``x`` of length ``<= horizon``.

    Shape violations propagate.
    """
    out = []
    for x, h in elements_by_horizon(spec, horizon).items():
        for a in spec.generators:
            out += [(h, t) for t in t_sets(spec, a, x)]
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _finding(check: str, **witness) -> dict:
    return {"check": check, **witness}


def p_bound_check(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """``p(a,x,b) <= 2 n Q`` with ``Q`` the largest ``q`` seen within the horizon."""
    sets = [t for _, t in all_tsets(spec, horizon) if t.is_infinite]
    Q = max(t.q for t in sets)
    bound = 2 * spec.n * Q
    maxima: dict[str, int] = {}
    findings = []
    for t in sets:
        key = f"{t.a}|{t.b}"
        maxima[key] = max(maxima.get(key, 0), t.p)
        if t.p > bound:
            findings.append(_finding("p_bound", **t.to_json(), bound=bound))
    return {
        "pass": not findings,
        "horizon": horizon,
        "Q": Q,
        "bound": bound,
        "max_p": max(t.p for t in sets),
        "max_p_by_pair": dict(sorted(maxima.items())),
        "findings": findings,
    }


def census(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """Distinct nonempty T-sets ``(a, b, set)`` and when each first appeared."""
    first: dict[tuple[str, str, EPSet], int] = {}
    for h, t in all_tsets(spec, horizon):
        if not t.is_empty:
            first.setdefault((t.a, t.b, t.members), h)
    last_new = max(first.values(), default=0)
    entries = sorted(
        first.items(),
        key=lambda kv: (spec.gen_index(kv[0][0]), spec.gen_index(kv[0][1]), kv[1], str(kv[0][2])),
    )
    return {
        "horizon": horizon,
        "distinct": len(first),
        "stabilized_at": last_new if last_new < horizon else None,
        "tsets": [
            {"a": a, "b": b, "set": m.to_json(), "first_horizon": h} for (a, b, m), h in entries
        ],
    }


def dichotomy_check(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """Each ``T(a,x,b) x`` is a single element or ``y -> yx`` is injective on ``T``."""
    findings = []
    for _, t in all_tsets(spec, horizon):
        f = dichotomy_finding(spec, t)
        if f:
            findings.append(f)
    return {"pass": not findings, "horizon": horizon, "findings": findings}


def dichotomy_finding(spec: SemigroupSpec, t: TSet) -> dict | None:
    if t.prog is None:
        return None
    p, q = t.prog
    r, s = t.law
    m = right_mult_map(spec, t.a, t.x)
    head = [m.apply(k).exp for k in sorted(t.F)]
    if s == 0:
        if any(j != r for j in head):
            return _finding("dichotomy", **t.to_json(), head_images=head)
        return None
    in_prog = [j for j in head if j >= r and (j - r) % s == 0]
    seq = head + [r]
    increasing = all(x < y for x, y in zip(seq, seq[1:]))
    if in_prog or len(set(head)) != len(head) or not increasing:
        return _finding("dichotomy", **t.to_json(), head_images=head)
    return None


def left_growth_check(spec: SemigroupSpec, bound: int = 50) -> dict:
    """``a^p b^q = a^r`` implies ``p <= r``."""
    findings = []
    for a in spec.generators:
        for b in spec.generators:
            for q in range(1, bound + 1):
                m = right_mult_map(spec, a, Element(b, q))
                for p in range(1, bound + 1):
                    y = m.apply(p)
                    if y.gen == a and p > y.exp:
                        findings.append(_finding("left_growth", a=a, p=p, b=b, q=q, r=y.exp))
    return {"pass": not findings, "bound": bound, "findings": findings}


def exponent_order_check(spec: SemigroupSpec, bound: int = 20) -> dict:
    """``a^p x = b^r`` and ``a^(p') x = b^s`` with ``p < p'`` imply ``r <= s``."""
    findings = []
    for a in spec.generators:
        for c in spec.generators:
            for e in range(1, bound + 1):
                x = Element(c, e)
                m = right_mult_map(spec, a, x)
                imgs = [m.apply(p) for p in range(1, bound + 1)]
                for i, yi in enumerate(imgs):
                    for j in range(i + 1, len(imgs)):
                        yj = imgs[j]
                        if yi.gen == yj.gen and yi.exp > yj.exp:
                            findings.append(
                                _finding("exponent_order", a=a, x=str(x), p=i + 1, p2=j + 1, r=yi.exp, s=yj.exp)
                            )
    return {"pass": not findings, "bound": bound, "findings": findings}


def linearity_check(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON, tmax: int = 25) -> dict:
    """``a^(p+qt) x = b^(r+st)`` for ``t <= tmax`` on every infinite T-set."""
    findings = []
    for _, t in all_tsets(spec, horizon):
        if not t.prog:
            continue
        p, q = t.prog
        r, s = t.law
        for i in range(tmax + 1):
            got = multiply(spec, Element(t.a, p + q * i), t.x)
            if got != Element(t.b, r + s * i):
                findings.append(_finding("linearity", **t.to_json(), t=i, got=str(got)))
                break
    return {"pass": not findings, "horizon": horizon, "tmax": tmax, "findings": findings}


def partition_check(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """For fixed ``a`` and ``x`` the T-sets over ``b`` partition ``N`` exactly."""
    findings = []
    full = EPSet.full()
    for x in elements_by_horizon(spec, horizon):
        for a in spec.generators:
            sets = [preimage_of_block(right_mult_map(spec, a, x), b) for b in spec.generators]
            union = EPSet.empty()
            for i, si in enumerate(sets):
                for sj in sets[i + 1:]:
                    if not (si & sj).is_empty():
                        findings.append(_finding("partition", a=a, x=str(x), overlap=str(si & sj)))
                union = union | si
            if union != full:
                findings.append(_finding("partition", a=a, x=str(x), uncovered=str(full - union)))
    return {"pass": not findings, "horizon": horizon, "findings": findings}


def shape_check(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    findings = []
    for x in elements_by_horizon(spec, horizon):
        for a in spec.generators:
            m = right_mult_map(spec, a, x)
            for b in spec.generators:
                try:
                    tset_from_map(a, x, b, m)
                except ShapeViolation as exc:
                    findings.append(_finding("shape", a=a, x=str(x), b=b, reason=str(exc)))
    return {"pass": not findings, "horizon": horizon, "findings": findings}


def q_sum_report(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """q-sum identity plus membership of the q multiset among unit-fraction solutions."""
    findings = []
    checked = 0
    solutions: dict[int, set] = {}
    for x in elements_by_horizon(spec, horizon):
        for a in spec.generators:
            qs = sorted((t.q for t in t_sets(spec, a, x) if t.is_infinite), reverse=True)
            total = sum((Fraction(1, q) for q in qs), Fraction(0))
            checked += 1
            if total != 1:
                findings.append(_finding("q_sum", a=a, x=str(x), sum=str(total)))
                continue
            if len(qs) not in solutions:
                solutions[len(qs)] = set(unit_fraction_solutions(len(qs), 1))
            if tuple(qs) not in solutions[len(qs)]:
                findings.append(_finding("unit_fractions", a=a, x=str(x), qs=qs))
    return {"pass": not findings, "horizon": horizon, "checked": checked, "findings": findings}


def analyze(spec: SemigroupSpec, horizon: int = DEFAULT_HORIZON) -> dict:
    """Full structural report; shape violations become findings instead of errors."""
    report = {
        "generators": list(spec.generators),
        "defaults": {"horizon": horizon, "left_growth_bound": 50, "exponent_order_bound": 20, "linearity_tmax": 25},
        "checks": {},
    }
    checks = report["checks"]
    checks["shape"] = shape_check(spec, horizon)
    checks["left_growth"] = left_growth_check(spec)
    checks["exponent_order"] = exponent_order_check(spec)
    checks["partition"] = partition_check(spec, horizon)
    if checks["shape"]["pass"]:
        checks["linearity"] = linearity_check(spec, horizon)
        checks["dichotomy"] = dichotomy_check(spec, horizon)
        checks["q_sum"] = q_sum_report(spec, horizon)
        checks["p_bound"] = p_bound_check(spec, horizon)
        report["census"] = census(spec, horizon)
    report["pass"] = all(c["pass"] for c in checks.values())
    return report

