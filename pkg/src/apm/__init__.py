"""Rewriting modulo algebraic theories: algebraic polygraphs modulo."""
from .confluence import (
    Branching,
    ConfluenceVerdict,
    classify_local_branching,
    critical_branchings,
    joinable_modulo,
    local_confluence_report,
    newman_confluence_report,
    quotient_system,
)
from .engine import (
    AlgebraicPolygraphModulo,
    apply_step,
    complete_post,
    find_redexes,
    make_apm,
    quasi_normal_form,
    reachability,
    termination_check,
)
from .normalize import ac_canonical, canonical_key, enumerate_class, equiv_modulo, linear_canonical
from .paradigms import ParadigmSpec, parse_native, render_native, validate_rules
from .specfile import load_spec, parse_spec
from .steps import Bounds, GroundRule, Policy, RewritingPath, RewritingStep
from .strategy import DeglexOrder, PositiveStrategy, deglex_compare, is_positive, positive_confluence_check, sigma_representative
from .terms import Signature, parse_term, format_term
from .theories import builtin_theory, groundify_matches, modulo_split

__version__ = "0.1.0"

__all__ = [
    "AlgebraicPolygraphModulo",
    "Bounds",
    "Branching",
    "ConfluenceVerdict",
    "DeglexOrder",
    "GroundRule",
    "ParadigmSpec",
    "Policy",
    "PositiveStrategy",
    "RewritingPath",
    "RewritingStep",
    "Signature",
    "ac_canonical",
    "apply_step",
    "builtin_theory",
    "canonical_key",
    "classify_local_branching",
    "complete_post",
    "critical_branchings",
    "deglex_compare",
    "enumerate_class",
    "equiv_modulo",
    "find_redexes",
    "format_term",
    "groundify_matches",
    "is_positive",
    "joinable_modulo",
    "linear_canonical",
    "load_spec",
    "local_confluence_report",
    "make_apm",
    "modulo_split",
    "newman_confluence_report",
    "parse_native",
    "parse_spec",
    "parse_term",
    "positive_confluence_check",
    "quasi_normal_form",
    "quotient_system",
    "reachability",
    "render_native",
    "sigma_representative",
    "termination_check",
    "validate_rules",
]
