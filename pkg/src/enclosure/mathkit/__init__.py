"""Numerical substrate: frames, scaled arithmetic, Bessel tables, sphere
quadrature, VSH transforms, and halfspace hulls."""

from .bessel import riccati_tables, riccati_tables_at, sph_bessel
from .frames import Frame, build_frame
from .hull import HullMesh, halfspace_hull
from .scaled import ScaledComplex, ScaledVector, scaled, scaled_from_ln
from .spheregrid import SphereGrid, sphere_quadrature
from .vsh import (VshCoeffs, VshTransform, get_transform,
                  synth_modes_at_points, vsh_analyze, vsh_synthesize)

__all__ = [
    "Frame", "build_frame",
    "ScaledComplex", "ScaledVector", "scaled", "scaled_from_ln",
    "sph_bessel", "riccati_tables", "riccati_tables_at",
    "SphereGrid", "sphere_quadrature",
    "VshCoeffs", "VshTransform", "get_transform",
    "vsh_analyze", "vsh_synthesize", "synth_modes_at_points",
    "HullMesh", "halfspace_hull",
]
