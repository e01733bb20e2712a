"""Exact arithmetic in jet groups of formal diffeomorphisms of (C^n, 0)."""
from .errors import (
    DecompositionError,
    DomainError,
    FieldMismatchError,
    JetError,
    ParseError,
    PrecisionError,
    ResonanceError,
    ShapeError,
    UndecidedError,
)
from .scalar import (
    DEFAULT_FIELD,
    GAUSSIAN,
    RATIONALS,
    ExactScalar,
    Field,
    field_arith,
    nth_root,
    parse_scalar,
    root_of_unity,
)
from .series import (
    TruncatedSeries,
    binomial_power,
    parse_series,
    retruncate,
    series_arith,
    substitute,
    valuation,
)
from .jetgroup import (
    JetDiffeo,
    LinearMap,
    commutator,
    compose,
    conj,
    det_linear,
    identity,
    invert,
    linear_part,
    parse_jet,
    power,
    project,
    tangency_order,
)
from .lie import (
    JetVectorField,
    bch,
    bracket,
    exp_flow,
    flows_commute,
    log_jet,
    normal_field,
    parse_field,
    pushforward,
)
from .classify import (
    NormalForm1D,
    ResonanceReport,
    centralizer_membership,
    coefficient_automorphism,
    cohopf_embed,
    decide_conjugate_1d,
    linearize_finite_group,
    normal_form_1d,
    poincare_linearize,
    realize_commutator,
    resonance_check,
)
from .words import (
    GroupWord,
    check_relation,
    evaluate_word,
    free_group_generators,
    parse_word,
    separation_index,
    verify_no_relations,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionError",
    "DomainError",
    "FieldMismatchError",
    "JetError",
    "ParseError",
    "PrecisionError",
    "ResonanceError",
    "ShapeError",
    "UndecidedError",
    "DEFAULT_FIELD",
    "GAUSSIAN",
    "RATIONALS",
    "ExactScalar",
    "Field",
    "field_arith",
    "nth_root",
    "parse_scalar",
    "root_of_unity",
    "TruncatedSeries",
    "binomial_power",
    "parse_series",
    "retruncate",
    "series_arith",
    "substitute",
    "valuation",
    "JetDiffeo",
    "LinearMap",
    "commutator",
    "compose",
    "conj",
    "det_linear",
    "identity",
    "invert",
    "linear_part",
    "parse_jet",
    "power",
    "project",
    "tangency_order",
    "JetVectorField",
    "bch",
    "bracket",
    "exp_flow",
    "flows_commute",
    "log_jet",
    "normal_field",
    "parse_field",
    "pushforward",
    "NormalForm1D",
    "ResonanceReport",
    "centralizer_membership",
    "coefficient_automorphism",
    "cohopf_embed",
    "decide_conjugate_1d",
    "linearize_finite_group",
    "normal_form_1d",
    "poincare_linearize",
    "realize_commutator",
    "resonance_check",
    "GroupWord",
    "check_relation",
    "evaluate_word",
    "free_group_generators",
    "parse_word",
    "separation_index",
    "verify_no_relations",
]
