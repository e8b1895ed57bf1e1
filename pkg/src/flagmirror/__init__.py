"""Vertex functions and elliptic stable envelopes of T*Fl_n, with numerical
checks of the 3d mirror identities that relate them."""

from .combinatorics import Perm, all_perms, preceq, precedes, total_order
from .errors import FlagMirrorError, NonGenericParameters, ParameterError, TailTooLarge
from .numerics import ParamSet, build_params, sample_params
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "FlagMirrorError",
    "NonGenericParameters",
    "ParamSet",
    "ParameterError",
    "Perm",
    "Report",
    "TailTooLarge",
    "all_perms",
    "build_params",
    "preceq",
    "precedes",
    "sample_params",
    "total_order",
]
