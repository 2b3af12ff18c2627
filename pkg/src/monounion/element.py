"""Elements ``g^k`` of a disjoint union of free monogenic blocks."""

from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Element:
    """The normal form ``gen^exp`` (``exp >= 1``)."""

    gen: str
    exp: int

    def __post_init__(self) -> None:
        if not isinstance(self.exp, int) or isinstance(self.exp, bool) or self.exp < 1:
            raise ValueError(f"exponent must be a positive integer, got {self.exp!r}")

    def __str__(self) -> str:
        return f"{self.gen}^{self.exp}"

    def word(self) -> tuple[str, ...]:
        return (self.gen,) * self.exp


class Identity(enum.Enum):
    """Adjoined identity of ``S^1``; never confused with a word."""

    IDENTITY = "1"

    def __str__(self) -> str:
        return "1"


IDENTITY = Identity.IDENTITY
