"""Finite generalized-quadrangle toolkit.

Builds the classical rank-2 polar geometry of a parabolic quadric in four
projective dimensions and its affine (conic based) model, searches for
maximal partial ovoids one short of a spread bound, and verifies the
symmetric-function and intersection-number identities those examples
satisfy at small odd field orders.
"""

from ovoid.census import run_census
from ovoid.gf import Field, FieldError, field_from_json, make_field
from ovoid.io import load_point_set, save_point_set
from ovoid.q4 import Q4Model, build_q4_model
from ovoid.redei import run_redei_suite
from ovoid.search import SearchConfig, SearchOutcome, search_maximal
from ovoid.t2 import T2Model, build_t2_model
from ovoid.verify import find_example, invariant_profile, verify_members

__version__ = "0.1.0"

__all__ = [
    "Field",
    "FieldError",
    "Q4Model",
    "SearchConfig",
    "SearchOutcome",
    "T2Model",
    "build_q4_model",
    "build_t2_model",
    "field_from_json",
    "find_example",
    "invariant_profile",
    "load_point_set",
    "make_field",
    "run_census",
    "run_redei_suite",
    "save_point_set",
    "search_maximal",
    "verify_members",
    "__version__",
]
