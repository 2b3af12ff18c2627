"""Normal forms and multiplication.

Every element has a unique normal form ``g^k``.  Right multiplication by an
element ``c^m`` is the ``m``-th power of the generator family for ``c``,
computed by square-and-multiply, so products cost ``O(log m)`` compositions.
"""

from __future__ import annotations

from itertools import groupby

from .evlin import EvLinMap, compose_families
from .model import Element, SemigroupSpec, Word


def _power_family(spec: SemigroupSpec, c: str, j: int) -> dict[str, EvLinMap]:
    """Family ``block -> (k -> block^k c^j)``; memoised on the spec.

    Powers of two are cached under the spec's lock; assembling ``j`` from them
    gives the same canonical maps as the uncached square-and-multiply.
    """
    if j < 1:
        raise ValueError("exponent must be >= 1")
    cache = spec._cache
    key = ("pow", c, j)
    with spec._lock:
        hit = cache.get(key)
    if hit is not None:
        return hit
    result = None
    bit, prev = 0, None
    while j >> bit:
        bkey = ("pow", c, 1 << bit)
        with spec._lock:
            base = cache.get(bkey)
        if base is None:
            base = spec.family(c) if bit == 0 else compose_families(prev, prev)
            with spec._lock:
                base = cache.setdefault(bkey, base)
        prev = base
        if (j >> bit) & 1:
            result = base if result is None else compose_families(result, base)
        bit += 1
    with spec._lock:
        if len(cache) > 4096:
            cache.clear()
        cache.setdefault(key, result)
    return result


def right_mult_map(spec: SemigroupSpec, a: str, x: Element) -> EvLinMap:
    """Canonical map ``k -> normal form of a^k x``."""
    return _power_family(spec, x.gen, x.exp)[a]


def multiply(spec: SemigroupSpec, x: Element, y: Element) -> Element:
    return right_mult_map(spec, x.gen, y).apply(x.exp)


def runs(w: Word) -> list[Element]:
    """Run-length decomposition ``aab -> [a^2, b^1]``."""
    if not w:
        raise ValueError("empty word")
    return [Element(g, len(list(grp))) for g, grp in groupby(w)]


def normalize(spec: SemigroupSpec, w: Word) -> Element:
    """Normal form of a word: fold its runs left to right with :func:`multiply`."""
    parts = runs(w)
    acc = parts[0]
    for y in parts[1:]:
        acc = multiply(spec, acc, y)
    return acc


def naive_oracle(spec: SemigroupSpec, w: Word) -> Element:
    """Normal form by single-letter folding over the raw table data.

    Deliberately avoids the map algebra so it can check :func:`normalize`
    and :func:`multiply`.
    """
    if not w:
        raise ValueError("empty word")
    gen, exp = w[0], 1
    for b in w[1:]:
        gen, exp = _lookup(spec.table(gen, b), exp)
    return Element(gen, exp)


def _lookup(m: EvLinMap, k: int) -> tuple[str, int]:
    for key, val in m.exceptions:
        if key == k:
            return val.gen, val.exp
    for pc in m.pieces:
        if k >= pc.p and (k - pc.p) % pc.q == 0:
            return pc.target, pc.r + pc.s * ((k - pc.p) // pc.q)
    raise ValueError(f"exponent {k} not covered")


def fold_elements(spec: SemigroupSpec, x: Element, y: Element) -> Element:
    """``x * y`` by letter-by-letter folding (reference for :func:`multiply`)."""
    gen, exp = x.gen, x.exp
    for _ in range(y.exp):
        gen, exp = _lookup(spec.table(gen, y.gen), exp)
    return Element(gen, exp)
