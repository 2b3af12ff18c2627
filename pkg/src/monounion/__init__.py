"""Finite disjoint unions of free monogenic semigroups.

Exact multiplication via eventually-linear exponent maps, structural checks
on T-sets, finite presentations with checked derivations, and explicit
finite quotients witnessing residual finiteness.
"""

from .element import IDENTITY, Element
from .model import SemigroupSpec, SpecError, load_spec, parse_spec, render_spec
from .wordprob import multiply, normalize

__all__ = [
    "Element",
    "IDENTITY",
    "SemigroupSpec",
    "SpecError",
    "load_spec",
    "parse_spec",
    "render_spec",
    "multiply",
    "normalize",
]

__version__ = "0.1.0"
