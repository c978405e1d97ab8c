"""Real-polarization quantization toolkit.

Čech cohomology of leafwise-flat sections on cylinder bands and plane
discs, Mayer-Vietoris assembly, Leray-style band cohomology in any
dimension, and interior versus total lattice counts for Delzant polytopes.
"""
from .errors import BSQError, DomainError, InconsistencyError, InvariantError, ParseError
from .geometry import Band, Leaf, ModelSpace, bs_set_in_band
from .cech import (
    Annulus,
    BrickWallCover,
    CircleCover,
    CohomologyReport,
    PlaneCover,
    PointwiseComplex,
    band_cohomology,
    build_brick_wall,
    build_ek_cover,
    build_plane_cover,
    coboundary_solve,
    plane_cohomology,
    pointwise_complex,
    pointwise_h,
)
from .assembly import BandDecomposition, decompose_band, mv_assemble
from .spectral import BigradedPage, band_cohomology_leray, direct_image_table, is_stable, turn_page
from .toric import DelzantPolytope, LatticeReport, enumerate_lattice_points, quantize

__version__ = "0.1.0"
