"""Spectral certificates of absolute separability for permutation-symmetric qubit states."""

from .states import Spectrum, SymmetricState
from .witnesses import (
    Verdict,
    YParams,
    check_all,
    extremal_y,
    s1_polytope,
    w0_check,
    w1_check,
    w2_check,
    w3_check,
)

__version__ = "0.1.0"

__all__ = [
    "Spectrum",
    "SymmetricState",
    "Verdict",
    "YParams",
    "check_all",
    "extremal_y",
    "s1_polytope",
    "w0_check",
    "w1_check",
    "w2_check",
    "w3_check",
]
