"""Finite quotients separating pairs of elements.

``rho`` relates ``x`` and ``y`` when ``xz`` and ``yz`` share a block for every
``z`` in ``S^1``.  It is computed as the partition into atoms of the T-sets
``T(a,x,b)`` for ``|x| <= L``, growing ``L`` until the partition is closed
under right multiplication by generators; a closed partition at that stage
is exactly ``rho``.

Pairs inside one ``rho`` class are separated by the coarser-period partition
``tau``: singletons below ``p_a`` and residues modulo ``2 d q_a`` from ``p_a``
on, where ``d`` is the distance of the pair.  Each partition acts on its
classes (plus the identity state) by right multiplication, giving a finite
transformation semigroup in which ``x`` and ``y`` move the identity state to
different places.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import lcm

from .evlin import EPSet, preimage_of_block, solve_congruence
from .model import IDENTITY, Element, SemigroupSpec, render_element
from .wordprob import normalize, right_mult_map

DEFAULT_MAX_HORIZON = 6


class RhoInconclusive(Exception):
    """The horizon partition was not closed by ``max_horizon``."""

    def __init__(self, message: str, partition: RightCongruence):
        super().__init__(message)
        self.partition = partition


class NonMonogenicShape(ValueError):
    """A block's classes are not of the form ``{i = j or i, j >= p, i = j mod q}``."""


class NotRelated(ValueError):
    pass


class NotClosed(ValueError):
    """A partition that should be a right congruence is not."""


def _least(s: EPSet) -> int:
    return min(list(s.finite) + [p for p, _ in s.progressions])


@dataclass(frozen=True)
class RightCongruence:
    """Finite partition of each block's exponents; classes listed block by block,
    each block's classes ordered by least member."""

    generators: tuple[str, ...]
    classes: tuple[tuple[str, EPSet], ...]
    horizon: int | None = None

    @classmethod
    def from_blocks(cls, generators, per_block: dict[str, list[EPSet]], horizon=None):
        classes = []
        for a in generators:
            classes += [(a, c) for c in sorted(per_block[a], key=_least)]
        return cls(tuple(generators), tuple(classes), horizon)

    def block(self, a: str) -> list[EPSet]:
        return [c for g, c in self.classes if g == a]

    @cached_property
    def _tables(self) -> dict[str, tuple[int, int, list[int]]]:
        # per block: (threshold T, period P, class index of k for k < T + P)
        out = {}
        for a in self.generators:
            members = [(i, c) for i, (g, c) in enumerate(self.classes) if g == a]
            T = max((c.threshold for _, c in members), default=1)
            P = lcm(*(c.period for _, c in members)) if members else 1
            row = [-1] * (T + P)
            for k in range(1, T + P):
                for i, c in members:
                    if k in c:
                        row[k] = i
                        break
                else:
                    raise ValueError(f"{a}^{k} lies in no class")
            out[a] = (T, P, row)
        return out

    def index(self, x: Element) -> int:
        T, P, row = self._tables[x.gen]
        k = x.exp if x.exp < T + P else T + (x.exp - T) % P
        return row[k]

    def related(self, x: Element, y: Element) -> bool:
        return self.index(x) == self.index(y)

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "classes": [{"block": g, "set": c.to_json()} for g, c in self.classes],
        }


def _successors(spec: SemigroupSpec, cong: RightCongruence, i: int, g: str) -> list[int]:
    """Indices of the classes met by ``C g`` for the ``i``-th class ``C``.

    Each progression of ``C`` meets each piece of the map in a progression
    whose image is again a progression ``e, e + step, ...``; its classes
    repeat with the target block's period once past the block's threshold,
    so a bounded walk along it is exhaustive.
    """
    a, cls = cong.classes[i]
    m = spec.table(a, g)
    hit = {cong.index(m.apply(k)) for k in cls.finite}
    for c0, pc in cls.progressions:
        for k, val in m.exceptions:
            if k >= c0 and (k - c0) % pc == 0:
                hit.add(cong.index(val))
        for pc_ in m.pieces:
            sol = solve_congruence(pc, pc_.p - c0, pc_.q)
            if sol is None:
                continue
            step_k = pc * sol[1]
            k0 = c0 + pc * sol[0]
            if k0 < pc_.p:
                k0 += step_k * -(-(pc_.p - k0) // step_k)
            e = pc_.image(k0).exp
            step = pc_.s * step_k // pc_.q
            if step == 0:
                hit.add(cong.index(Element(pc_.target, e)))
                continue
            T, P, _ = cong._tables[pc_.target]
            n = max(0, -(-(T - e) // step)) + P
            for t in range(n):
                hit.add(cong.index(Element(pc_.target, e + step * t)))
    return sorted(hit)


def close_check(spec: SemigroupSpec, cong: RightCongruence) -> tuple[bool, list[dict]]:
    """Whether every class times every generator lies inside one class.

    Closure alone does not identify ``rho``: a finer closed partition also
    passes.  :func:`rho` therefore only tests partitions built from T-set atoms,
    for which closure implies equality with ``rho``.
    """
    witnesses = []
    for i in range(len(cong.classes)):
        for g in spec.generators:
            hit = _successors(spec, cong, i, g)
            if len(hit) != 1:
                a, cls = cong.classes[i]
                witnesses.append(
                    {"block": a, "class": str(cls), "generator": g, "meets": [str(cong.classes[j][1]) for j in hit]}
                )
    return not witnesses, witnesses


def _refine(classes: list[EPSet], t: EPSet) -> list[EPSet]:
    out = []
    for c in classes:
        for part in (c & t, c - t):
            if not part.is_empty():
                out.append(part)
    return out


def rho(spec: SemigroupSpec, max_horizon: int = DEFAULT_MAX_HORIZON) -> RightCongruence:
    """The right congruence ``rho``; memoised per spec and horizon bound."""
    key = ("rho", max_horizon)
    with spec._lock:
        hit = spec._cache.get(key)
    if hit is not None:
        return hit
    result = _rho(spec, max_horizon)
    with spec._lock:
        spec._cache.setdefault(key, result)
    return result


def _rho(spec: SemigroupSpec, max_horizon: int) -> RightCongruence:
    per_block = {a: [EPSet.full()] for a in spec.generators}
    seen: set[Element] = set()
    cong = None
    for horizon in range(max_horizon + 1):
        if horizon:
            for w in itertools.product(spec.generators, repeat=horizon):
                x = normalize(spec, w)
                if x in seen:
                    continue
                seen.add(x)
                for a in spec.generators:
                    m = right_mult_map(spec, a, x)
                    for b in spec.generators:
                        per_block[a] = _refine(per_block[a], preimage_of_block(m, b))
        cong = RightCongruence.from_blocks(spec.generators, per_block, horizon)
        if close_check(spec, cong)[0]:
            return cong
    raise RhoInconclusive(f"partition not closed by horizon {max_horizon}", cong)


@dataclass(frozen=True)
class BlockCongParams:
    params: tuple[tuple[str, int, int], ...]  # (block, p_a, q_a)

    def __getitem__(self, a: str) -> tuple[int, int]:
        for g, p, q in self.params:
            if g == a:
                return p, q
        raise KeyError(a)

    def to_json(self) -> dict:
        return {g: {"p": p, "q": q} for g, p, q in self.params}


def block_params(cong: RightCongruence) -> BlockCongParams:
    """Read ``p_a``, ``q_a`` off each block's classes."""
    out = []
    for a in cong.generators:
        classes = cong.block(a)
        infinite = [c for c in classes if not c.is_finite()]
        finite = [c for c in classes if c.is_finite()]
        q = len(infinite)
        p = len(finite) + 1
        if q == 0:
            raise NonMonogenicShape(f"block {a}: no infinite class")
        expected = [EPSet(frozenset({i})) for i in range(1, p)]
        expected += [EPSet(progressions=((p + i, q),)) for i in range(q)]
        if sorted(classes, key=_least) != expected:
            raise NonMonogenicShape(f"block {a}: classes {[str(c) for c in classes]}")
        out.append((a, p, q))
    return BlockCongParams(tuple(out))


def rho_related(params: BlockCongParams, x: Element, y: Element) -> bool:
    if x.gen != y.gen:
        return False
    p, q = params[x.gen]
    return x.exp == y.exp or (x.exp >= p and y.exp >= p and (x.exp - y.exp) % q == 0)


def distance(params: BlockCongParams, x: Element, y: Element) -> int:
    """``|i - j| / q_a`` for ``rho``-related ``a^i``, ``a^j``."""
    if not rho_related(params, x, y):
        raise NotRelated(f"{x} and {y} are not rho-related")
    return abs(x.exp - y.exp) // params[x.gen][1]


def separating_congruence(
    spec: SemigroupSpec, rho_cong: RightCongruence, params: BlockCongParams, x: Element, y: Element
) -> RightCongruence:
    """Partition with period ``2 d q_a`` above ``p_a`` in every block."""
    if x == y:
        raise ValueError("x and y must differ")
    d = distance(params, x, y)
    per_block = {}
    for a in spec.generators:
        p, q = params[a]
        period = 2 * d * q
        per_block[a] = [EPSet(frozenset({i})) for i in range(1, p)]
        per_block[a] += [EPSet(progressions=((p + i, period),)) for i in range(period)]
    tau = RightCongruence.from_blocks(spec.generators, per_block)
    closed, witnesses = close_check(spec, tau)
    if not closed:
        raise NotClosed(f"separating partition is not a right congruence: {witnesses[:3]}")
    return tau


@dataclass(frozen=True)
class FiniteQuotient:
    """State 0 is the identity; state ``i >= 1`` is class ``i - 1``.

    ``action[g][i]`` is the state reached from ``i`` by right multiplication
    by ``g``.  Transformations compose left to right.
    """

    generators: tuple[str, ...]
    labels: tuple[str, ...]
    action: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def gen_action(self, g: str) -> tuple[int, ...]:
        return self.action[self.generators.index(g)]

    def transformation(self, x: Element) -> tuple[int, ...]:
        """Transformation of ``x = g^m`` (square-and-multiply)."""
        return transformation_power(self.gen_action(x.gen), x.exp)

    def element_of(self, x: Element) -> int:
        return self.transformation(x)[0]


def then(f: tuple[int, ...], g: tuple[int, ...]) -> tuple[int, ...]:
    """``f`` followed by ``g``."""
    return tuple(g[i] for i in f)


def transformation_power(f: tuple[int, ...], m: int) -> tuple[int, ...]:
    result = None
    while True:
        if m & 1:
            result = f if result is None else then(result, f)
        m >>= 1
        if not m:
            return result
        f = then(f, f)


def build_quotient(spec: SemigroupSpec, cong: RightCongruence) -> FiniteQuotient:
    labels = [str(IDENTITY)] + [f"{g}:{c}" for g, c in cong.classes]
    action = []
    for g in spec.generators:
        row = [1 + cong.index(Element(g, 1))]
        for i in range(len(cong.classes)):
            hit = _successors(spec, cong, i, g)
            if len(hit) != 1:
                raise NotClosed(f"class {cong.classes[i][1]} times {g} meets {len(hit)} classes")
            row.append(1 + hit[0])
        action.append(tuple(row))
    return FiniteQuotient(spec.generators, tuple(labels), tuple(action))


@dataclass(frozen=True)
class SeparationCertificate:
    x: Element
    y: Element
    congruence: str  # "rho" or "tau"
    distance: int | None
    quotient: FiniteQuotient
    witness: int = 0

    @property
    def image_x(self) -> int:
        return self.quotient.transformation(self.x)[self.witness]

    @property
    def image_y(self) -> int:
        return self.quotient.transformation(self.y)[self.witness]

    def to_json(self) -> dict:
        q = self.quotient
        return {
            "x": render_element(self.x),
            "y": render_element(self.y),
            "congruence": self.congruence,
            "distance": self.distance,
            "states": list(q.labels),
            "generators": list(q.generators),
            "action": {g: list(row) for g, row in zip(q.generators, q.action)},
            "witness": self.witness,
            "image_x": self.image_x,
            "image_y": self.image_y,
        }


def replay_certificate(cert: dict) -> bool:
    """Re-check an exported certificate from its transformation arrays alone."""

    def image(elem: str) -> int:
        gen, _, exp = elem.partition("^")
        row = cert["action"][gen]
        state = cert["witness"]
        for _ in range(int(exp or 1)):
            state = row[state]
        return state

    n = len(cert["states"])
    if any(len(row) != n or not all(0 <= v < n for v in row) for row in cert["action"].values()):
        return False
    ix, iy = image(cert["x"]), image(cert["y"])
    return ix != iy and ix == cert["image_x"] and iy == cert["image_y"]


def separate(
    spec: SemigroupSpec, x: Element, y: Element, max_horizon: int = DEFAULT_MAX_HORIZON
) -> SeparationCertificate:
    """A finite quotient in which ``x`` and ``y`` act differently."""
    if x == y:
        raise ValueError("x and y must be distinct")
    r = rho(spec, max_horizon)
    params = block_params(r)
    if not rho_related(params, x, y):
        cert = SeparationCertificate(x, y, "rho", None, build_quotient(spec, r))
    else:
        tau = separating_congruence(spec, r, params, x, y)
        cert = SeparationCertificate(x, y, "tau", distance(params, x, y), build_quotient(spec, tau))
    if cert.image_x == cert.image_y:
        raise NotClosed(f"quotient does not separate {x} and {y}")
    return cert


def tau_size(params: BlockCongParams, d: int) -> int:
    """``sum_a ((p_a - 1) + 2 d q_a) + 1``."""
    return sum((p - 1) + 2 * d * q for _, p, q in params.params) + 1
