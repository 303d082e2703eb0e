"""Vertex sets of plane level curves near umbilic points.

Exact construction of the vertex function of a polynomial surface, curve
tracing of its zero set, per-level vertex censuses, and bifurcation scans
over two-parameter deformations of an umbilic.
"""

from .bifurcation import (
    CupSection,
    DegenerateVertexPoint,
    DiscriminantScan,
    PairingFlip,
    ScanResult,
    ScanSample,
    SelfIntersection,
    classify_at,
    cup_reference,
    cup_section,
    detect_polyline_cusps,
    discriminant_angles,
    kstar_field,
    pairing_flip_1param,
    sector_anchors,
    two_degenerate_vertex,
    vertex_set_self_intersection,
)
from .errors import (
    ConfigError,
    DegenerateLevelError,
    GenericityError,
    InputError,
    InsufficientSamplingError,
    NearCriticalPointError,
    NoTransitionError,
    NumericError,
    UnresolvedTopologyError,
    VertexSetError,
)
from .cli import RunConfig, parse_config
from .poly import BivarPoly, NVarPoly, ParamPoly
from .svg import SvgPlot
from .surface import (
    SurfaceFamily,
    deformation_projection,
    deformation_rank,
    genericity_check,
    make_canonical_family,
    make_fixed_surface,
    normal_form_rotation,
    umbilic_check,
)
from .tracer import (
    Branch,
    BranchSet,
    PairingLabel,
    PolyField,
    TracedCurve,
    TraceResult,
    VertexSetAnalysis,
    analyze_vertex_set,
    boundary_crossings,
    classify_pairing,
    intersect_curves,
    origin_branches,
    trace_zero_set,
)
from .vertexfn import (
    CurvatureSample,
    JetStructure,
    build_vertex_function,
    calibrate_vertex_scale,
    curvature,
    hexagonal_symmetry_defect,
    jet_structure_check,
    kappa_derivative_polys,
    oracle_residuals,
    vertex_poly,
)
from .verify import SUITES, CheckResult, run_check, run_suite
from .vertices import (
    CensusSweep,
    CriticalPoint,
    KStarResult,
    LevelAnalyzer,
    LevelCensus,
    VertexRecord,
    vertex_census_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BivarPoly",
    "Branch",
    "BranchSet",
    "CensusSweep",
    "CheckResult",
    "ConfigError",
    "CriticalPoint",
    "CupSection",
    "CurvatureSample",
    "DegenerateLevelError",
    "DegenerateVertexPoint",
    "DiscriminantScan",
    "GenericityError",
    "InputError",
    "InsufficientSamplingError",
    "JetStructure",
    "KStarResult",
    "LevelAnalyzer",
    "LevelCensus",
    "NVarPoly",
    "NearCriticalPointError",
    "NoTransitionError",
    "NumericError",
    "PairingFlip",
    "PairingLabel",
    "ParamPoly",
    "PolyField",
    "RunConfig",
    "SUITES",
    "ScanResult",
    "ScanSample",
    "SelfIntersection",
    "SurfaceFamily",
    "SvgPlot",
    "TraceResult",
    "TracedCurve",
    "UnresolvedTopologyError",
    "VertexRecord",
    "VertexSetAnalysis",
    "VertexSetError",
    "analyze_vertex_set",
    "boundary_crossings",
    "build_vertex_function",
    "calibrate_vertex_scale",
    "classify_at",
    "classify_pairing",
    "cup_reference",
    "cup_section",
    "curvature",
    "deformation_projection",
    "deformation_rank",
    "detect_polyline_cusps",
    "discriminant_angles",
    "genericity_check",
    "hexagonal_symmetry_defect",
    "intersect_curves",
    "jet_structure_check",
    "kappa_derivative_polys",
    "kstar_field",
    "make_canonical_family",
    "make_fixed_surface",
    "normal_form_rotation",
    "oracle_residuals",
    "origin_branches",
    "pairing_flip_1param",
    "parse_config",
    "run_check",
    "run_suite",
    "sector_anchors",
    "trace_zero_set",
    "two_degenerate_vertex",
    "umbilic_check",
    "vertex_census_sweep",
    "vertex_poly",
    "vertex_set_self_intersection",
    "__version__",
]
