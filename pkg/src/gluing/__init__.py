"""Exact checks for whether local accounts over measurement contexts glue together."""

from .cbd import (
    CbDSystem,
    OrderEffectData,
    build_order_effect_system,
    cbd_contextual,
    cyclic_criterion,
    multimaximal_constraints,
    parse_cbd,
    qq_statistic,
)
from .cech import build_nerve, obstruction, presheaf_restriction_matrix
from .glue import classify, extend_section, global_sections, signalling_report, support_model
from .lp import contextual_fraction, incidence_matrix, noncontextuality_lp
from .qorder import quantum_order_model
from .scenario import (
    Context,
    EmpiricalModel,
    Section,
    marginalize,
    parse_scenario,
    restrict_section,
    serialize_model,
    validate_model,
)
from .simplex import LPProblem, solve_lp
from .snf import smith_normal_form

__version__ = "0.1.0"
