"""Semantic validation of candidate tables and exhaustive search for valid ones."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from . import analysis
from .evlin import EvLinMap, Piece, compose, first_difference, preimage_of_block
from .model import Element, SemigroupSpec, render_spec
from .wordprob import _lookup, right_mult_map

log = logging.getLogger(__name__)

VALID, INVALID, INCONCLUSIVE = "valid", "invalid", "inconclusive"


@dataclass
class ValidationReport:
    verdict: str
    findings: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.verdict == INVALID and not self.findings:
            raise ValueError("an invalid verdict needs a witness")

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "findings": self.findings}


def verify_associativity(spec: SemigroupSpec) -> ValidationReport:
    """Symbolic associativity check on generator triples.

    For each block ``d`` and generators ``b, c`` with ``bc = e^m`` it compares
    ``k -> (d^k b) c`` with ``k -> d^k e^m`` as exponent maps.  Right
    multiplication maps then agree for equal words, so the folded product is
    associative.
    """
    findings = []
    for b in spec.generators:
        for c in spec.generators:
            e = spec.table(b, c).apply(1)
            fam_c = spec.family(c)
            for d in spec.generators:
                lhs = compose(spec.table(d, b), fam_c)
                rhs = right_mult_map(spec, d, e)
                k = first_difference(lhs, rhs)
                if k is not None:
                    findings.append(
                        {
                            "check": "associativity",
                            "triple": [d, b, c],
                            "k": k,
                            "left": str(lhs.apply(k)),
                            "right": str(rhs.apply(k)),
                        }
                    )
    return ValidationReport(INVALID if findings else VALID, findings)


def brute_oracle_associativity(
    spec: SemigroupSpec, exp_bound: int = 50, z_bound: int | None = None
) -> ValidationReport:
    """``(xy)z = x(yz)`` by plain letter folding, for all ``x, y`` with exponent
    ``<= exp_bound`` and ``z`` with exponent ``<= z_bound`` (default ``exp_bound``).

    Stops at the first counterexample.
    """
    z_bound = exp_bound if z_bound is None else z_bound
    rows: dict[tuple[str, int, str], list[tuple[str, int]]] = {}
    tables = spec.tables

    def fold(gen: str, exp: int, c: str, m: int) -> tuple[str, int]:
        row = rows.setdefault((gen, exp, c), [])
        while len(row) < m:
            g, e = row[-1] if row else (gen, exp)
            row.append(_lookup(tables[(g, c)], e))
        return row[m - 1]

    gens = spec.generators
    for d, c, e in itertools.product(gens, repeat=3):
        for k in range(1, exp_bound + 1):
            for m in range(1, exp_bound + 1):
                xy = fold(d, k, c, m)
                for l in range(1, z_bound + 1):
                    lhs = fold(*xy, e, l)
                    rhs = fold(d, k, *fold(c, m, e, l))
                    if lhs != rhs:
                        x, y, z = Element(d, k), Element(c, m), Element(e, l)
                        return ValidationReport(
                            INVALID,
                            [
                                {
                                    "check": "associativity_brute",
                                    "x": str(x),
                                    "y": str(y),
                                    "z": str(z),
                                    "(xy)z": f"{lhs[0]}^{lhs[1]}",
                                    "x(yz)": f"{rhs[0]}^{rhs[1]}",
                                }
                            ],
                        )
    return ValidationReport(VALID)


def validate_semantics(spec: SemigroupSpec, horizon: int = analysis.DEFAULT_HORIZON) -> ValidationReport:
    """Run the structural structural check suite; each failure is a finding."""
    report = analysis.analyze(spec, horizon)
    findings = [f for check in report["checks"].values() for f in check["findings"]]
    return ValidationReport(INVALID if findings else VALID, findings)


def validate(spec: SemigroupSpec, horizon: int = analysis.DEFAULT_HORIZON) -> ValidationReport:
    """Associativity first, then the structural check suite."""
    assoc = verify_associativity(spec)
    if not assoc.valid:
        return assoc
    return validate_semantics(spec, horizon)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    """Bounds for candidate tables.

    ``max_intercept`` bounds how far an image exponent may sit above its
    source exponent: a piece has ``r <= p + max_intercept`` and an exception
    ``k -> c^j`` has ``j <= k + max_intercept``.
    """

    blocks: int = 2
    max_exceptions: int = 1
    max_threshold: int = 1
    max_period: int = 1
    max_slope: int = 1
    max_intercept: int = 1

    def __post_init__(self) -> None:
        for name in ("blocks", "max_threshold", "max_period", "max_intercept"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.max_slope < 0 or self.max_exceptions < 0:
            raise ValueError("max_slope and max_exceptions must be >= 0")

    def generators(self) -> list[str]:
        if self.blocks <= 26:
            return [chr(ord("a") + i) for i in range(self.blocks)]
        return [f"g{i}" for i in range(self.blocks)]


def _coverings(cfg: SearchConfig) -> list[tuple[tuple[int, ...], tuple[tuple[int, int], ...]]]:
    """Exception keys plus disjoint progressions covering every exponent once."""
    progs = [(p, q) for q in range(1, cfg.max_period + 1) for p in range(1, cfg.max_threshold + 1)]
    out = []
    for size in range(1, len(progs) + 1):
        for chosen in itertools.combinations(progs, size):
            top = max(p for p, _ in chosen)
            period = 1
            for _, q in chosen:
                period = period * q // _gcd(period, q)
            counts = [sum(k >= p and (k - p) % q == 0 for p, q in chosen) for k in range(1, top + period)]
            if any(c > 1 for c in counts):
                continue
            if any(c == 0 for c in counts[top - 1:]):
                continue
            holes = tuple(k for k, c in enumerate(counts, 1) if c == 0)
            if len(holes) <= cfg.max_exceptions:
                out.append((holes, chosen))
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def candidate_maps(cfg: SearchConfig, gens: list[str]) -> list[EvLinMap]:
    """Distinct canonical maps within the bounds, sorted by their canonical text."""
    seen: dict[str, EvLinMap] = {}
    for holes, chosen in _coverings(cfg):
        piece_opts = [
            [
                Piece(p, q, c, r, s)
                for c in gens
                for r in range(1, p + cfg.max_intercept + 1)
                for s in range(cfg.max_slope + 1)
            ]
            for p, q in chosen
        ]
        exc_opts = [
            [(k, Element(c, j)) for c in gens for j in range(1, k + cfg.max_intercept + 1)]
            for k in holes
        ]
        for pieces in itertools.product(*piece_opts):
            for excs in itertools.product(*exc_opts):
                m = EvLinMap(excs, pieces).canonical()
                seen.setdefault(m.describe(), m)
    return [seen[key] for key in sorted(seen)]


def shape_rejection(spec: SemigroupSpec) -> str | None:
    """Reason the generator T-sets break the finite-head-plus-progression shape."""
    for a in spec.generators:
        for b in spec.generators:
            m = spec.table(a, b)
            for c in spec.generators:
                try:
                    analysis.split_shape(preimage_of_block(m, c))
                except analysis.ShapeViolation as exc:
                    return f"T({a},{b},{c}): {exc}"
    return None


def enumerate_candidates(cfg: SearchConfig, first: int | None = None) -> Iterator[SemigroupSpec]:
    """Every candidate spec within the bounds, in canonical enumeration order.

    With ``first`` set, only candidates whose first cross-pair table is
    ``candidate_maps(...)[first]``; these slices partition the space in order.
    """
    gens = cfg.generators()
    maps = candidate_maps(cfg, gens)
    pairs = [(a, b) for a in gens for b in gens if a != b]
    shifts = {(a, a): EvLinMap.shift(a) for a in gens}
    if not pairs:
        if first in (None, 0):
            yield SemigroupSpec(gens, shifts)
        return
    heads = maps if first is None else [maps[first]]
    for head in heads:
        for rest in itertools.product(maps, repeat=len(pairs) - 1):
            yield SemigroupSpec(gens, {**shifts, **dict(zip(pairs, (head,) + rest))})


def _screen(spec: SemigroupSpec) -> tuple[str, str | None]:
    reason = shape_rejection(spec)
    if reason:
        return "shape", reason
    report = verify_associativity(spec)
    if not report.valid:
        return "associativity", json.dumps(report.findings[0])
    return "valid", None


def _screen_slice(cfg: SearchConfig, first: int | None) -> list[SemigroupSpec]:
    out = []
    for spec in enumerate_candidates(cfg, first):
        kind, reason = _screen(spec)
        if kind == "valid":
            out.append(spec)
        else:
            log.debug("rejected (%s): %s", kind, reason)
    return out


def search(cfg: SearchConfig, jobs: int | None = None) -> list[SemigroupSpec]:
    """All valid specs within the bounds, deterministic and duplicate-free.

    Candidates whose generator T-sets violate the single-progression shape rule are dropped
    before the associativity check.  With ``jobs > 1`` the space is split by
    the first cross-pair table; slices come back in enumeration order.
    """
    jobs = jobs if jobs is not None else int(os.environ.get("MONOUNION_THREADS", "1"))
    if jobs <= 1 or cfg.blocks < 2:
        return _screen_slice(cfg, None)
    heads = range(len(candidate_maps(cfg, cfg.generators())))
    with ProcessPoolExecutor(jobs) as pool:
        slices = pool.map(_screen_slice, itertools.repeat(cfg), heads)
        return [s for part in slices for s in part]


def spec_digest(spec: SemigroupSpec) -> str:
    return hashlib.sha256(render_spec(spec).encode("utf-8")).hexdigest()[:16]


def write_corpus(specs: list[SemigroupSpec], out_dir: str | os.PathLike, cfg: SearchConfig) -> Path:
    """One file per spec named by content hash, plus ``index.json`` in search order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for spec in specs:
        name = f"{spec_digest(spec)}.json"
        (out / name).write_text(render_spec(spec), encoding="utf-8")
        names.append(name)
    index = {"config": cfg.__dict__, "count": len(names), "specs": names}
    path = out / "index.json"
    path.write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")
    return path
