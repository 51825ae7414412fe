"""Causal harm quantification over finite structural causal models."""

__version__ = "0.1.0"

from .cause import ContrastiveQuery, check_contrastive_cause, oracle_check
from .collective import aggregate_harm, compare_policies
from .errors import HarmError, InputError, ModelError, PreconditionError, QueryError
from .harm import UtilityModel, qualitative_harm, quantitative_benefit, quantitative_harm, rbt_harm
from .modelfile import parse_model, serialize
from .scenario import load
from .scm import CausalModel, intervene, satisfies, solve, validate_model
from .uncertainty import ContextDistribution, expected_harm, expected_utility, wqh

__all__ = [
    "CausalModel", "ContextDistribution", "ContrastiveQuery", "HarmError", "InputError", "ModelError",
    "PreconditionError", "QueryError", "UtilityModel", "aggregate_harm", "check_contrastive_cause",
    "compare_policies", "expected_harm", "expected_utility", "intervene", "load", "oracle_check",
    "parse_model", "qualitative_harm", "quantitative_benefit", "quantitative_harm", "rbt_harm",
    "satisfies", "serialize", "solve", "validate_model", "wqh",
]
