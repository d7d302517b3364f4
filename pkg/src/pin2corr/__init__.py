"""Correction terms of Pin(2)-monopole Floer modules over F2[[V]][Q]/Q^3.

Submodules: ``algebra`` (graded F2 linear algebra), ``standard_module``
(HS-to modules and their correction terms), ``hm_side`` (HM-to over F2[U]),
``tor_engine`` (Tor over R and connected sums), ``surgery`` (surgery rules and
exact triangles), ``catalog``, ``textio`` and ``cli``.
"""

from .standard_module import CorrectionData, StandardRModule, correction_terms, validate
from .hm_side import StandardUModule, connected_sum_hm, delta_and_t
from .tor_engine import FPModule, tor_r
from .textio import emit_module, parse_module

__all__ = [
    "CorrectionData",
    "FPModule",
    "StandardRModule",
    "StandardUModule",
    "connected_sum_hm",
    "correction_terms",
    "delta_and_t",
    "emit_module",
    "parse_module",
    "tor_r",
    "validate",
]
__version__ = "0.1.0"
