"""twinmat: compact queryable representation of binary matrices whose rows
and columns admit a bounded-error contraction sequence (bounded twin-width).

The pipeline: a matrix arrives as a rectangle decomposition of its 1 entries;
a geometric types oracle classifies arbitrary submatrices; zone approximation
finds representative zones per granularity; the layered compact oracle stores
one object per distinct zone and answers entry queries by a constant number
of table dereferences plus one bit read.
"""

from .compact import (
    BitsizeReport,
    CompactOracle,
    Schedule,
    bitsize,
    build,
    deserialize,
    make_schedule,
    query,
    query_with_hops,
    serialize,
)
from .errors import (
    BoundsError,
    ConstructionInvariantError,
    ContractViolation,
    EmptyError,
    FormatError,
    InvalidN,
    MalformedSequence,
    OverlapError,
    TwinmatError,
)
from .geom import (
    PersistentKTree,
    PointLocator,
    RangeEmptiness,
    RayShooter,
    build_point_locator,
    ktree_insert,
    ktree_member,
    ktree_remove,
    range_empty,
    ray_shoot,
    seg_intersect_empty,
)
from .matrix import (
    BinaryMatrix,
    DivisionDiagnostics,
    Rect,
    RectangleDecomposition,
    RegularDivision,
    SubmatrixType,
    classify,
    corners,
    diagnostics,
    realize,
    zone_bounds,
    zone_family_count,
    zone_family_naive,
)
from .subtypes import AreaBoundary, TypesOracle, build_types_oracle
from .twinorder import (
    ContractionSequence,
    Division,
    error_value,
    extract_decomposition,
    generate,
    verify_sequence,
)
from .zoneapprox import CoverMaintainer, CoverTag, ZoneCover, zone_approximation, xi

__all__ = [
    "AreaBoundary",
    "BinaryMatrix",
    "BitsizeReport",
    "BoundsError",
    "CompactOracle",
    "ConstructionInvariantError",
    "ContractionSequence",
    "ContractViolation",
    "CoverMaintainer",
    "CoverTag",
    "Division",
    "DivisionDiagnostics",
    "EmptyError",
    "FormatError",
    "InvalidN",
    "MalformedSequence",
    "OverlapError",
    "PersistentKTree",
    "PointLocator",
    "RangeEmptiness",
    "RayShooter",
    "Rect",
    "RectangleDecomposition",
    "RegularDivision",
    "Schedule",
    "SubmatrixType",
    "TwinmatError",
    "TypesOracle",
    "ZoneCover",
    "bitsize",
    "build",
    "build_point_locator",
    "build_types_oracle",
    "classify",
    "corners",
    "deserialize",
    "diagnostics",
    "error_value",
    "extract_decomposition",
    "generate",
    "ktree_insert",
    "ktree_member",
    "ktree_remove",
    "make_schedule",
    "query",
    "query_with_hops",
    "range_empty",
    "ray_shoot",
    "realize",
    "seg_intersect_empty",
    "serialize",
    "verify_sequence",
    "xi",
    "zone_approximation",
    "zone_bounds",
    "zone_family_count",
    "zone_family_naive",
]

__version__ = "0.1.0"
