"""Distances, defect classification and distance censuses for Artin-Schreier
extensions of valued fields of Hahn series."""

from __future__ import annotations

from .census import (
    BoundContext,
    BoundQuery,
    CensusReport,
    bound_value,
    brute_force_distances,
    check_bounds,
    ndd_census,
    sample_polynomials,
)
from .cuts import (
    EdgeMinus,
    EdgePlus,
    Infinity,
    PrincipalMinus,
    PrincipalPlus,
    Unresolved,
    classify_edge,
    compare_cuts,
    equal_mod,
    parse_cut,
    render_cut,
    scale_cut,
    shift_cut,
)
from .distance import (
    DistanceReport,
    distance_of,
    is_weakly_immediate,
    strong_immediacy_witness,
    transport_distance,
    value_set,
)
from .extension import (
    ASExtensionRecord,
    DefectCertificate,
    as_extension,
    classify_as,
    defect_certificate,
)
from .fields import FieldDescriptor, FieldKind, best_approx, insep_defect_exponent, p_degree
from .gf import FiniteField, gf
from .hahn import (
    HahnSeries,
    Polynomial,
    artin_schreier_operator,
    artin_schreier_root,
    hasse_taylor,
    parse_series,
    render_series,
)
from .ordgroup import ConvexSubgroup, GroupElement, OrderedGroupSpec, convex_subgroups, rank_of

__version__ = "0.1.0"

__all__ = [
    "ASExtensionRecord", "BoundContext", "BoundQuery", "CensusReport", "ConvexSubgroup",
    "DefectCertificate", "DistanceReport", "EdgeMinus", "EdgePlus", "FieldDescriptor", "FieldKind",
    "FiniteField", "GroupElement", "HahnSeries", "Infinity", "OrderedGroupSpec", "Polynomial",
    "PrincipalMinus", "PrincipalPlus", "Unresolved", "artin_schreier_operator", "artin_schreier_root",
    "as_extension", "best_approx", "bound_value", "brute_force_distances", "check_bounds",
    "classify_as", "classify_edge", "compare_cuts", "convex_subgroups", "defect_certificate",
    "distance_of", "equal_mod", "gf", "hasse_taylor", "insep_defect_exponent", "is_weakly_immediate",
    "ndd_census", "p_degree", "parse_cut", "parse_series", "rank_of", "render_cut", "render_series",
    "sample_polynomials", "scale_cut", "shift_cut", "strong_immediacy_witness", "transport_distance",
    "value_set",
]
