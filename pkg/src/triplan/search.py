"""Deterministic search agent: decides which tool calls to make for a query,
records every observation in the notebook, and returns the extracted domains.

The exploratory loop is replaced by a fixed directive script (transport ->
stays -> food -> attractions); the advisor channel supplies targeted
refinements. The ``run_search`` signature is the pluggable agent boundary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .csp import StructuredQuery, route_legs
from .domains import DomainSet, extract_domains
from .sandbox import Notebook, Sandbox, ToolDirective, directive, execute_tool

logger = logging.getLogger(__name__)

DirectiveKey = tuple[str, tuple[str, ...]]


class ToolBudgetExceeded(Exception):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"session tool-call budget of {budget} exhausted")


@dataclass
class ToolBudget:
    limit: int
    used: int = 0

    def spend(self) -> None:
        if self.used >= self.limit:
            raise ToolBudgetExceeded(self.limit)
        self.used += 1


@dataclass(frozen=True)
class SearchFeedback:
    """Advisor output: concrete new directives plus the reasoning behind them."""

    directives: tuple[ToolDirective, ...]
    rationale: str = ""

    def render_lines(self) -> list[str]:
        return ["Suggested actions:"] + [d.render() for d in self.directives]


def directive_key(d: ToolDirective) -> DirectiveKey:
    return (d.tool, tuple(a.lower() for a in d.args))


def describe_directive(d: ToolDirective) -> str:
    if d.tool == "FlightSearch":
        return f"Flights from {d.args[0]} to {d.args[1]} on {d.args[2]}"
    if d.tool == "AccommodationSearch":
        return f"Accommodations in {d.args[0]}"
    if d.tool == "RestaurantSearch":
        return f"Restaurants in {d.args[0]}"
    if d.tool == "AttractionSearch":
        return f"Attractions in {d.args[0]}"
    if d.tool == "DistanceMatrix":
        return f"Ground travel ({d.args[2]}) from {d.args[0]} to {d.args[1]}"
    return f"Cities in {d.args[0]}"


def _city_block(cities: list[str]) -> list[ToolDirective]:
    block = [directive("AccommodationSearch", c) for c in cities]
    block += [directive("RestaurantSearch", c) for c in cities]
    block += [directive("AttractionSearch", c) for c in cities]
    return block


def script_for_route(q: StructuredQuery, cities: list[str]) -> list[ToolDirective]:
    """Full coverage script for a fixed visit order: every leg by flight and
    both ground modes, then stays, food, and attractions per city."""
    out: list[ToolDirective] = []
    for _, origin, dest, date in route_legs(q, cities):
        out.append(directive("FlightSearch", origin, dest, date))
        out.append(directive("DistanceMatrix", origin, dest, "self-driving"))
        out.append(directive("DistanceMatrix", origin, dest, "taxi"))
    out += _city_block(cities)
    return out


def initial_directives(q: StructuredQuery) -> list[ToolDirective]:
    """Opening script for a query. For state destinations only the city
    lookup can be issued up front; the per-city block follows once the
    state's cities are known."""
    if q.destination_is_state:
        return [directive("CitySearch", q.destination)]
    return script_for_route(q, [q.destination])


def _execute(sb: Sandbox, nb: Notebook, d: ToolDirective,
             budget: ToolBudget | None,
             executed: set[DirectiveKey] | None) -> int:
    if budget is not None:
        budget.spend()
    obs = execute_tool(sb, d)
    nb.record(describe_directive(d), obs)
    if executed is not None:
        executed.add(directive_key(d))
    logger.info("TOOL %s -> %d rows", d.render(), len(obs.rows))
    return len(obs.rows)


def run_search(sb: Sandbox, nb: Notebook, q: StructuredQuery,
               fb: SearchFeedback | None = None, *,
               budget: ToolBudget | None = None,
               executed: set[DirectiveKey] | None = None) -> DomainSet:
    """Execute the feedback directives if given, else the opening script,
    recording every observation; returns domains over the full notebook.

    Raises ToolBudgetExceeded once the session cap would be crossed; the
    notebook keeps everything executed up to that point.
    """
    if fb is not None:
        for d in fb.directives:
            _execute(sb, nb, d, budget, executed)
        return extract_domains(nb)

    for d in initial_directives(q):
        _execute(sb, nb, d, budget, executed)
    if q.destination_is_state:
        # Pick the first k known cities and finish the script over them.
        cities = [c.city for c in sb.cities_in_state(q.destination)]
        chosen = cities[: q.visiting_city_count]
        if chosen:
            for d in script_for_route(q, chosen) if len(chosen) == q.visiting_city_count \
                    else _city_block(chosen):
                _execute(sb, nb, d, budget, executed)
    return extract_domains(nb)
