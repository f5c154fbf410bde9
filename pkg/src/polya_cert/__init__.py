"""Certified lower bounds for the Neumann eigenvalue counting function on
convex planar domains: Bessel trial-function certificates, triangular-lattice
packings, and an independent finite-element eigensolver for cross-validation.
"""

from .bounds import (
    BoundReport,
    DimComparison,
    VerificationError,
    convex_bound,
    dimension_comparison_table,
    eigenvalue_gap_check,
    levenshtein_density,
    unit_ball_volume,
    verify_counting_bound,
    weyl_bounds,
)
from .geometry import (
    ConvexPolygon,
    RadialCap,
    convex_hull,
    equilateral_triangle,
    load_polygon,
    polygon_area,
    rectangle,
    regular_polygon,
    unit_square,
)
from .lattice import (
    PackingResult,
    ShiftSearchError,
    TriangularLattice,
    count_in_domain,
    find_shift,
    lattice_points_in_box,
    packing_points,
)
from .special_functions import (
    BracketingError,
    bessel_energy_gap,
    bessel_identity_residual,
    bessel_j,
    bessel_zero,
    gamma_fn,
    quad_gk,
)
from .spectrum import (
    MeshError,
    NeumannSpectrum,
    SpectrumRangeError,
    TriangleMesh,
    assemble,
    counting_function,
    mesh_polygon,
    neumann_spectrum,
    solve_eigs,
)
from .trial_functions import (
    BesselProfile,
    CertificateError,
    TrialFunctionPack,
    build_pack,
    certified_upper_bound,
    rayleigh_quotient,
)

__version__ = "0.1.0"
