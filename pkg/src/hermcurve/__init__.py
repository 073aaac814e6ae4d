"""Finite-field computations on Hermitian surfaces and the nonplanar rational
curves of degree q + 1 they contain."""

from .field_tower import FieldCtx, FieldError, build_ctx, ctx_for_q
from .group_action import (
    ProjectiveUnitary,
    curve_orbit,
    enumerate_group,
    generators,
    group_order,
    incidence_profile,
    orbit_count,
    stabilizer_order,
)
from .hermitian_geometry import HermitianSurface, lines_on_surface, rational_points
from .matrix_gf import Mat, MatrixError, hermitian_decompose
from .rational_curves import (
    CurveMatrix,
    ReducedCurveMatrix,
    curve_on_surface,
    fermat_curve,
    phi,
    phi_star,
    scan_low_degree,
)

__all__ = [
    "CurveMatrix",
    "FieldCtx",
    "FieldError",
    "HermitianSurface",
    "Mat",
    "MatrixError",
    "ProjectiveUnitary",
    "ReducedCurveMatrix",
    "build_ctx",
    "ctx_for_q",
    "curve_on_surface",
    "curve_orbit",
    "enumerate_group",
    "fermat_curve",
    "generators",
    "group_order",
    "hermitian_decompose",
    "incidence_profile",
    "lines_on_surface",
    "orbit_count",
    "phi",
    "phi_star",
    "rational_points",
    "scan_low_degree",
    "stabilizer_order",
]
