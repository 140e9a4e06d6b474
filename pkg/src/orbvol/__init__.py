"""Census Dehn filling searches, volume-bound chains and homology checks for link orbifolds."""

from .bounds import BoundChain, drill_factor, fill_factor, max_slope_length
from .homology import AbelianGroupPresentation, smith_normal_form
from .solver import OutcomeClass, solve
from .triangulation import IdealTriangulation, Slope, census, parse_triangulation
from .volume import bloch_wigner

__all__ = [
    "AbelianGroupPresentation",
    "BoundChain",
    "IdealTriangulation",
    "OutcomeClass",
    "Slope",
    "bloch_wigner",
    "census",
    "drill_factor",
    "fill_factor",
    "max_slope_length",
    "parse_triangulation",
    "smith_normal_form",
    "solve",
]

__version__ = "0.1.0"
