"""Exact finite metric geometry: submetries, descent gluing and Gromov-Hausdorff distance."""

from __future__ import annotations

from .core import (
    FinSpace,
    GroupAction,
    Morphism,
    SpaceClass,
    check_morphism,
    colimit_glue,
    compose,
    constant,
    fiber_product,
    find_isometry,
    identity,
    l_infty_product,
    metric_identification,
    point_space,
    quotient_by_group,
    two_point,
    validate_space,
)
from .descent import (
    Covering,
    DescentDatum,
    GluedSpace,
    check_cocycle,
    covering_compose,
    covering_from_submetry,
    covering_pullback,
    descent_datum_from_family,
    glue_descent,
    glue_morphisms,
    local_submetry_radius,
    lsm_covering_check,
)
from .errors import MetricError, ParseError
from .gh import (
    Correspondence,
    GHResult,
    TwoPointFamily,
    chain_upper_bound,
    correspondence,
    correspondence_from_family,
    distortion,
    gh_enum_oracle,
    gh_exact,
    glue_over_two_points,
    two_point_family,
)
from .submetry import (
    Family,
    PointedFamily,
    SubmetryReport,
    SubsetRef,
    absolute_hyperspace,
    check_pointed_family,
    diagonal_family,
    family_to_map,
    hausdorff_distance,
    hyperspace,
    map_to_family,
    pointed_pullback,
    proper_family_check,
    submetry_check,
    subset,
)
from .values import INF, ExtValue, format_value, to_value

# Operations exposed on the command line; the CLI dispatch table must cover
# exactly these, one command each.
OPERATIONS = (
    validate_space,
    l_infty_product,
    fiber_product,
    colimit_glue,
    quotient_by_group,
    metric_identification,
    hausdorff_distance,
    submetry_check,
    proper_family_check,
    hyperspace,
    map_to_family,
    family_to_map,
    pointed_pullback,
    diagonal_family,
    lsm_covering_check,
    covering_from_submetry,
    covering_pullback,
    covering_compose,
    glue_morphisms,
    check_cocycle,
    glue_descent,
    gh_exact,
    gh_enum_oracle,
    distortion,
    glue_over_two_points,
    correspondence_from_family,
    chain_upper_bound,
)
