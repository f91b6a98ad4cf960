"""Constraint-aware travel planning over a closed sandbox.

Five cooperating components — search, constraint construction, planning,
checking, and search advising — are wired through an orchestrator that
interleaves planning with targeted information gathering, carries domain
knowledge across conversation turns, and always delivers a plan.
"""

from .checker import PlanFeedback, UnsatCertificate, Verdict, check, evaluate
from .constraints import ConstraintSet, build_constraints, extract_explicit, implicit_catalogue
from .csp import (
    Assignment,
    CspInstance,
    Preferences,
    StructuredQuery,
    parse_plan,
    query_from_dict,
    query_to_dict,
    serialize_plan,
    variable_set,
)
from .domains import DomainSet, domains_from_sandbox, extract_domains
from .metrics import ConstraintOutcome, MetricsReport, aggregate, failure_breakdown, score_plan
from .orchestrator import (
    OrchestratorConfig,
    Patch,
    SessionState,
    SolutionTrajectory,
    TurnResult,
    apply_patches,
    new_session,
    run_session,
    run_turn,
)
from .planner import PlanResult, plan, route_skeleton
from .sandbox import Notebook, Sandbox, ToolDirective, execute_tool, load_dataset
from .search import SearchFeedback, initial_directives, run_search

__all__ = [
    "Assignment",
    "ConstraintOutcome",
    "ConstraintSet",
    "CspInstance",
    "DomainSet",
    "MetricsReport",
    "Notebook",
    "OrchestratorConfig",
    "Patch",
    "PlanFeedback",
    "PlanResult",
    "Preferences",
    "Sandbox",
    "SearchFeedback",
    "SessionState",
    "SolutionTrajectory",
    "StructuredQuery",
    "ToolDirective",
    "TurnResult",
    "UnsatCertificate",
    "Verdict",
    "aggregate",
    "apply_patches",
    "build_constraints",
    "check",
    "domains_from_sandbox",
    "evaluate",
    "execute_tool",
    "extract_domains",
    "extract_explicit",
    "failure_breakdown",
    "implicit_catalogue",
    "initial_directives",
    "load_dataset",
    "new_session",
    "parse_plan",
    "plan",
    "query_from_dict",
    "query_to_dict",
    "route_skeleton",
    "run_search",
    "run_session",
    "run_turn",
    "score_plan",
    "serialize_plan",
    "variable_set",
]
