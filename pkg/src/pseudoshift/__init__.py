"""Weighted pseudo-shifts and finite certificates for disjoint hypercyclicity and supercyclicity."""

from .criteria import (
    Schedule,
    ScheduleNotFound,
    ShiftTuple,
    Windows,
    check_dhc,
    check_dsc,
    search_schedule,
    synthesize_vector,
    verify_criterion_pointwise,
)
from .dsl import parse_set_expr
from .errors import (
    ModeHypothesisError,
    NonmonotoneFamilyError,
    ParamRangeError,
    ParseError,
    PseudoShiftError,
    ScheduleError,
    SpaceMismatchError,
    TreeError,
    ValidationError,
)
from .gallery import build_example_4_3, build_tree_example, build_unilateral_example
from .index_core import (
    UNDEFINED,
    FiniteTable,
    Grid,
    Integers,
    Naturals,
    ShiftMap,
    TreeVertices,
    escapes_range,
    has_periodic_point,
    is_run_away,
    iterate,
)
from .logmag import LogProduct
from .ows import DiagonalWeightFamily, OwsOperator, OwsProblem, check_ows_dsc, check_ows_powers_dsc, ows_apply, ows_to_pseudoshift
from .report import FAIL, INCONCLUSIVE, PASS, CertificateReport
from .shift_ops import PseudoShift, apply, backward_product, forward_product, power_apply, s_map
from .spaces import FinVector, SpaceModel, path_tree, tree_from_parent, vector_norm, weighted_lp, zk_hilbert
from .specfile import ProblemSpec, parse_spec, run_spec, serialize

__version__ = "0.1.0"

__all__ = [
    "Schedule",
    "ScheduleNotFound",
    "ShiftTuple",
    "Windows",
    "check_dhc",
    "check_dsc",
    "search_schedule",
    "synthesize_vector",
    "verify_criterion_pointwise",
    "ModeHypothesisError",
    "NonmonotoneFamilyError",
    "ParamRangeError",
    "ParseError",
    "PseudoShiftError",
    "ScheduleError",
    "SpaceMismatchError",
    "TreeError",
    "ValidationError",
    "UNDEFINED",
    "FiniteTable",
    "Grid",
    "Integers",
    "Naturals",
    "ShiftMap",
    "TreeVertices",
    "escapes_range",
    "has_periodic_point",
    "is_run_away",
    "iterate",
    "parse_set_expr",
    "build_example_4_3",
    "build_tree_example",
    "build_unilateral_example",
    "LogProduct",
    "DiagonalWeightFamily",
    "OwsOperator",
    "OwsProblem",
    "check_ows_dsc",
    "check_ows_powers_dsc",
    "ows_apply",
    "ows_to_pseudoshift",
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "CertificateReport",
    "PseudoShift",
    "apply",
    "backward_product",
    "forward_product",
    "power_apply",
    "s_map",
    "FinVector",
    "SpaceModel",
    "path_tree",
    "tree_from_parent",
    "vector_norm",
    "weighted_lp",
    "zk_hilbert",
    "ProblemSpec",
    "parse_spec",
    "run_spec",
    "serialize",
]
