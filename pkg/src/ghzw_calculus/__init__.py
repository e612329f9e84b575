"""Tensor semantics, rewriting and SLOCC tools for the GHZ/W calculus."""

from .tensor import DEFAULT_TOL, Tensor, TensorError, Tolerance
from .cfa import CFA, GHZ, W, check_cfa, classify_cfa, cfa_from_state, get_algebra
from .slocc import SloccLabel, superclass_label, tripartite_classify

__version__ = "0.1.0"

__all__ = [
    "CFA",
    "DEFAULT_TOL",
    "GHZ",
    "Tensor",
    "TensorError",
    "Tolerance",
    "W",
    "cfa_from_state",
    "check_cfa",
    "classify_cfa",
    "get_algebra",
    "superclass_label",
    "tripartite_classify",
]
