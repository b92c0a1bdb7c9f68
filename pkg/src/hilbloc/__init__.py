"""Exact equivariant localization on Hilbert schemes of points on toric
surfaces: fixed-point enumeration, Euler characteristics of determinant
line bundles, quotient counts, virtual integrals over the ambient pair
space, and universal-polynomial extraction, all in exact rational
arithmetic.
"""

from .cache import ENGINE_VERSION, ResultCache, default_cache
from .errors import (
    ComputationError,
    EngineError,
    ParseError,
    PoleError,
    RealizationError,
    UsageError,
)
from .hilb import (
    HilbFixedPoint,
    Partition,
    count_fixed_points,
    enumerate_fixed_points,
    fixed_point_list,
    tangent_weights,
    taut_weights,
    theta_weight,
)
from .integrals import (
    ChernExpr,
    ConjectureRow,
    ConstructionReport,
    IntegralRequest,
    c2_for_expected_dim_zero,
    chi_theta,
    expected_dim_pairs,
    integrate,
    quot_count,
    validate_construction,
    verify_conjecture,
)
from .symbolic import DEFAULT_SEED, Weight
from .tautological import (
    ITClass,
    UniversalPolynomial,
    it_class,
    universal_poly,
    virtual_integral,
)
from .toric import (
    ChernData,
    EquivariantLineBundle,
    SplitBundle,
    ToricSurfaceModel,
    bundle_from_json,
    bundle_to_json,
    chi_from_chern,
    chi_pair,
    chi_surface,
    e_from_v,
    line_bundle,
    make_surface,
    realize_split_model,
    split_bundle,
    surface_from_json,
    surface_to_json,
)
from .cli import parse_chern_expr

__version__ = ENGINE_VERSION

__all__ = [
    "ENGINE_VERSION",
    "__version__",
    "DEFAULT_SEED",
    "Weight",
    "ResultCache",
    "default_cache",
    "EngineError",
    "UsageError",
    "ComputationError",
    "PoleError",
    "RealizationError",
    "ParseError",
    "ToricSurfaceModel",
    "make_surface",
    "EquivariantLineBundle",
    "line_bundle",
    "SplitBundle",
    "split_bundle",
    "ChernData",
    "chi_surface",
    "chi_from_chern",
    "chi_pair",
    "e_from_v",
    "realize_split_model",
    "surface_to_json",
    "surface_from_json",
    "bundle_to_json",
    "bundle_from_json",
    "Partition",
    "HilbFixedPoint",
    "enumerate_fixed_points",
    "fixed_point_list",
    "count_fixed_points",
    "tangent_weights",
    "taut_weights",
    "theta_weight",
    "ChernExpr",
    "IntegralRequest",
    "integrate",
    "quot_count",
    "chi_theta",
    "expected_dim_pairs",
    "c2_for_expected_dim_zero",
    "validate_construction",
    "ConstructionReport",
    "verify_conjecture",
    "ConjectureRow",
    "ITClass",
    "it_class",
    "virtual_integral",
    "UniversalPolynomial",
    "universal_poly",
    "parse_chern_expr",
]
