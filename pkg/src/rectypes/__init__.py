"""Simply typed lambda and lambda-mu calculus with recursive type equations."""
from .checker import EMPTY, Context, check, infer, subject_reduction_probe, typable
from .congruence import CongruenceIndex, NotAFunctionType, build_index
from .parser import parse_context, parse_equations, parse_term, parse_term_file, parse_type
from .positivity import AnalysisReport, analyze, check_goodness, class_membership, order_analysis, polarity
from .reduction import (
    FuelExhausted,
    eta_metric,
    explore,
    normalize,
    sn_probe,
    step,
    subterms_of_reducts,
)
from .syntax import (
    App,
    Arrow,
    Atom,
    Bottom,
    EquationSystem,
    Lam,
    Mu,
    Name,
    TVar,
    Var,
    alpha_eq,
    mu_subst,
    show_term,
    show_type,
    subst,
)
from .translation import build_mt, translate, verify_translation

__all__ = [
    "EMPTY", "Context", "check", "infer", "subject_reduction_probe", "typable",
    "CongruenceIndex", "NotAFunctionType", "build_index",
    "parse_context", "parse_equations", "parse_term", "parse_term_file", "parse_type",
    "AnalysisReport", "analyze", "check_goodness", "class_membership", "order_analysis", "polarity",
    "FuelExhausted", "eta_metric", "explore", "normalize", "sn_probe", "step", "subterms_of_reducts",
    "App", "Arrow", "Atom", "Bottom", "EquationSystem", "Lam", "Mu", "Name", "TVar", "Var",
    "alpha_eq", "mu_subst", "show_term", "show_type", "subst",
    "build_mt", "translate", "verify_translation",
]
