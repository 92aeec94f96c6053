"""Numerical kernel for polygon moduli, hipped hypersurfaces and AdS geometry."""

from .forms import (DESITTER2, SPHERE2, AmbientVector, ModelPoint, NullRay,
                    PairRelation, SpaceTag, anti_de_sitter, de_sitter, hyperbolic)
from .polygons import Polygon, invariants, regular_polygon, validate

__version__ = "0.1.0"

__all__ = [
    "SPHERE2", "DESITTER2", "AmbientVector", "ModelPoint", "NullRay", "PairRelation",
    "SpaceTag", "anti_de_sitter", "de_sitter", "hyperbolic", "Polygon", "invariants",
    "regular_polygon", "validate",
]
