"""Sum-GDoF of the K-user symmetric MIMO interference channel under
finite precision CSIT, with brute-force cross-checks of the converse and
achievability machinery."""

__version__ = "0.1.0"

from .exceptions import (BudgetExceeded, DomainError, NotCovered, PreconditionError,
                         ValidationFailure)
from .gdof import (Branch, GdofParams, GdofResult, bound_b1, bound_b1_plus, bound_b2,
                   bound_b2_plus, bound_b3, min_of_bounds, siso_per_user_gdof, sum_gdof)
from .lemma import LemmaInstance, closed_form_coefficient, converse_instance, lemma_coefficient
from .mac import MacProblem, check_achievable, check_achievable_bruteforce, gamma_levels
from .planner import plan, plan_for, validate, zero_force_plan
