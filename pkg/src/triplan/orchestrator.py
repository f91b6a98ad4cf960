"""Per-turn planning loop and multi-turn session driver.

Each turn plans first on the cached domains from the last valid plan, runs
the plan/check loop up to K times per search step, and on unsat lets the
advisor direct new searches for up to L interleaved steps. Every turn
delivers an assignment: when nothing validates, the attempt with the fewest
violations wins (ties to the earliest attempt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .advisor import Exhausted, NoGapFound, advise
from .checker import AttemptHistory, PlanFeedback, Verdict, check
from .constraints import build_constraints
from .csp import (
    Assignment,
    CspInstance,
    PlanRecord,
    StructuredQuery,
    query_from_dict,
    query_to_dict,
    serialize_plan,
    variable_set,
)
from .domains import DomainSet, extract_domains
from .planner import EmptyDomain, fallback_plan, plan
from .sandbox import Notebook, Sandbox
from .search import (
    DirectiveKey,
    SearchFeedback,
    ToolBudget,
    ToolBudgetExceeded,
    run_search,
)


@dataclass(frozen=True)
class OrchestratorConfig:
    k: int = 3            # max plan/check attempts per search step
    l: int = 10           # max interleaved search steps per turn
    tool_budget: int = 120

    def __post_init__(self) -> None:
        if self.k < 0 or self.l < 0 or self.tool_budget < 1:
            raise ValueError("need k >= 0, l >= 0, tool_budget >= 1")


class PatchError(ValueError):
    def __init__(self, field_name: str, reason: str = ""):
        self.field = field_name
        msg = f"bad patch for field {field_name!r}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


@dataclass(frozen=True)
class Patch:
    op: str  # add | remove | modify
    field: str
    value: object = None


ConstraintPatchSet = Sequence[Patch]
TurnInput = Union[StructuredQuery, ConstraintPatchSet]

_SET_FIELDS = ("prefs.cuisines", "prefs.room_rules")
_SCALAR_FIELDS = ("budget", "people", "prefs.room_type", "prefs.transport")


def patch_from_dict(data: dict) -> Patch:
    try:
        return Patch(op=data["op"], field=data["field"], value=data.get("value"))
    except KeyError as exc:
        raise PatchError(str(data.get("field", "?")), f"missing {exc.args[0]}")


def apply_patches(q: StructuredQuery, patches: ConstraintPatchSet) -> StructuredQuery:
    data = query_to_dict(q)
    for p in patches:
        if p.op not in ("add", "remove", "modify"):
            raise PatchError(p.field, f"unknown op {p.op!r}")
        if p.field in _SET_FIELDS:
            key = p.field.split(".", 1)[1]
            values = set(data["prefs"][key])
            if p.op in ("add",):
                if p.value is None:
                    raise PatchError(p.field, "add needs a value")
                values.add(p.value)
            elif p.op == "remove":
                if p.value is None:
                    raise PatchError(p.field, "remove needs a value")
                values.discard(p.value)
            else:  # modify replaces the whole set
                if not isinstance(p.value, (list, tuple, set, frozenset)):
                    raise PatchError(p.field, "modify needs a list of values")
                values = set(p.value)
            data["prefs"][key] = sorted(values)
        elif p.field in _SCALAR_FIELDS:
            if p.op == "remove":
                if p.field in ("budget", "people"):
                    raise PatchError(p.field, "cannot remove a required field")
                data["prefs"][p.field.split(".", 1)[1]] = None
            else:
                if p.value is None:
                    raise PatchError(p.field, f"{p.op} needs a value")
                if p.field in ("budget", "people"):
                    data[p.field] = p.value
                else:
                    data["prefs"][p.field.split(".", 1)[1]] = p.value
        else:
            raise PatchError(p.field, "unknown field")
    try:
        return query_from_dict(data)
    except Exception as exc:
        raise PatchError(patches[-1].field if patches else "?", str(exc))


@dataclass
class TurnResult:
    turn: int
    verdict: str
    best_effort: bool
    assignment: Assignment
    plan: PlanRecord
    violations: list[str]
    l_used: int
    k_total: int
    tool_calls: int
    cities: list[str]
    trace: list[str] = field(default_factory=list)


@dataclass
class SessionState:
    sandbox: Sandbox
    config: OrchestratorConfig
    notebook: Notebook = field(default_factory=Notebook)
    executed: set[DirectiveKey] = field(default_factory=set)
    domains_cache: Optional[DomainSet] = None
    budget: ToolBudget = field(init=False)
    turn: int = 0
    queries: list[StructuredQuery] = field(default_factory=list)
    trajectory: list[TurnResult] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.budget = ToolBudget(self.config.tool_budget)


def new_session(sb: Sandbox, cfg: OrchestratorConfig | None = None) -> SessionState:
    return SessionState(sb, cfg or OrchestratorConfig())


def seed_session(state: SessionState, fb: SearchFeedback, q: StructuredQuery) -> DomainSet:
    """Run a scripted search and adopt its result as the session cache.

    Test and replay helper for starting a session from a known partial
    knowledge state.
    """
    domains = run_search(state.sandbox, state.notebook, q, fb,
                         budget=state.budget, executed=state.executed)
    state.domains_cache = domains
    return domains


def run_turn(state: SessionState, q: StructuredQuery,
             cfg: OrchestratorConfig | None = None) -> TurnResult:
    cfg = cfg or state.config
    state.turn += 1
    t = state.turn
    state.queries.append(q)
    trace: list[str] = []
    tools_before = state.budget.used

    def log(l: int, k: int, agent: str, outcome: str) -> None:
        line = f"t={t} l={l} k={k} {agent} -> {outcome}"
        trace.append(line)
        state.trace.append(line)

    domains = state.domains_cache
    if domains is None and len(state.notebook) == 0:
        # Brand-new session: no cache and no observations to plan from, so
        # the opening script runs before the first planning round.
        try:
            domains = run_search(state.sandbox, state.notebook, q,
                                 budget=state.budget, executed=state.executed)
        except ToolBudgetExceeded:
            domains = extract_domains(state.notebook)
        log(1, 0, "search", f"{state.budget.used - tools_before}-directives")
    elif domains is None:
        domains = extract_domains(state.notebook)

    attempts: list[tuple[int, int, Assignment, Verdict, PlanFeedback, list[str], int, int]] = []
    rounds = max(cfg.l, 1)
    k_total = 0
    l_used = 0
    for l in range(1, rounds + 1):
        l_used = l
        constraints = build_constraints(q, domains)
        inst = CspInstance(variable_set(q), domains, constraints, q)
        log(l, 0, "constrain", f"{len(constraints)}-constraints")
        hist: AttemptHistory = []
        verdict = Verdict.INVALID
        for k in range(1, max(cfg.k, 1) + 1):
            k_total += 1
            try:
                result = plan(inst, hist)
            except EmptyDomain:
                result = fallback_plan(inst)
            log(l, k, "plan", "best-effort" if result.best_effort else "assignment")
            verdict, feedback = check(inst, result.assignment, hist)
            hist.append((result.assignment, feedback))
            log(l, k, "check", verdict.value)
            attempts.append((len(feedback.violations), len(attempts), result.assignment,
                             verdict, feedback, result.cities, l, k_total))
            if verdict is Verdict.VALID:
                state.domains_cache = domains
                turn_result = TurnResult(
                    turn=t, verdict=verdict.value, best_effort=False,
                    assignment=result.assignment,
                    plan=serialize_plan(result.assignment),
                    violations=[], l_used=l, k_total=k_total,
                    tool_calls=state.budget.used - tools_before,
                    cities=result.cities, trace=trace,
                )
                state.trajectory.append(turn_result)
                return turn_result
            if verdict is Verdict.UNSAT:
                break
        if l == rounds:
            break
        try:
            feedback_search = advise(inst, hist, state.executed)
        except (NoGapFound, Exhausted) as exc:
            log(l, 0, "advise", type(exc).__name__.lower())
            break
        log(l, 0, "advise", f"{len(feedback_search.directives)}-directives")
        try:
            domains = run_search(state.sandbox, state.notebook, q, feedback_search,
                                 budget=state.budget, executed=state.executed)
            log(l, 0, "search", f"{len(feedback_search.directives)}-directives")
        except ToolBudgetExceeded:
            domains = extract_domains(state.notebook)
            log(l, 0, "search", "budget-exhausted")
            break

    best = min(attempts, key=lambda item: (item[0], item[1]))
    _, _, assignment, verdict, feedback, cities, _, _ = best
    turn_result = TurnResult(
        turn=t, verdict=verdict.value, best_effort=True,
        assignment=assignment, plan=serialize_plan(assignment),
        violations=feedback.render_lines(),
        l_used=l_used, k_total=k_total,
        tool_calls=state.budget.used - tools_before,
        cities=cities, trace=trace,
    )
    state.trajectory.append(turn_result)
    return turn_result


@dataclass
class SolutionTrajectory:
    results: list[TurnResult]
    queries: list[StructuredQuery]

    @property
    def final_plan(self) -> PlanRecord:
        return self.results[-1].plan

    @property
    def final_result(self) -> TurnResult:
        return self.results[-1]


def run_session(sb: Sandbox, turns: Sequence[TurnInput],
                cfg: OrchestratorConfig | None = None,
                state: SessionState | None = None) -> SolutionTrajectory:
    """Drive a whole session: the first element must be a full query; later
    elements are full queries or patch sets applied to the previous one."""
    cfg = cfg or OrchestratorConfig()
    state = state or new_session(sb, cfg)
    q: Optional[StructuredQuery] = None
    results = []
    for item in turns:
        if isinstance(item, StructuredQuery):
            q = item
        else:
            if q is None:
                raise PatchError("?", "first turn must be a full query")
            q = apply_patches(q, list(item))
        results.append(run_turn(state, q, cfg))
    return SolutionTrajectory(results, list(state.queries))


def session_record(state: SessionState) -> dict:
    """Replayable session snapshot: query sequence, notebook, trajectory."""
    return {
        "queries": [query_to_dict(q) for q in state.queries],
        "notebook": [
            {"index": e.index, "description": e.short_description,
             "kind": e.observation.kind, "rows": len(e.observation.rows)}
            for e in state.notebook.entries
        ],
        "trajectory": [
            {"turn": r.turn, "verdict": r.verdict, "best_effort": r.best_effort,
             "plan": r.plan, "violations": r.violations, "l_used": r.l_used,
             "k_total": r.k_total, "tool_calls": r.tool_calls}
            for r in state.trajectory
        ],
        "trace": list(state.trace),
        "tool_calls_used": state.budget.used,
    }
