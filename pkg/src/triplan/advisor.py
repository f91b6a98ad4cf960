"""Search advisor: turns an unsat outcome into concrete new tool directives.

The diagnosis -> directive mapping is a closed table driven by the
certificates attached to the failing attempt, and every emitted directive is
deduplicated against what the session has already executed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .checker import AttemptHistory, CertKind, UnsatCertificate
from .csp import CspInstance, change_days
from .sandbox import ToolDirective, directive
from .search import DirectiveKey, SearchFeedback, directive_key
from .constraints import stay_passes_gates, day_cities


class NoGapFound(Exception):
    """Every certificate is a repeated logic failure: nothing new to search."""


class Exhausted(Exception):
    """Every mapped directive was already executed this session."""


@dataclass(frozen=True)
class GapDiagnosis:
    kind: str  # missing-leg | no-stay-under-constraints | insufficient-restaurants
    #           | insufficient-attractions | budget-infeasible | no-route-city
    context: tuple[tuple[str, str], ...]
    evidence: UnsatCertificate

    def context_dict(self) -> dict[str, str]:
        return dict(self.context)


_GAP_TO_KIND = {
    "leg": "missing-leg",
    "stay": "no-stay-under-constraints",
    "restaurants": "insufficient-restaurants",
    "cuisine": "insufficient-restaurants",
    "attractions": "insufficient-attractions",
    "budget": "budget-infeasible",
    "state": "no-route-city",
}


def _route_context(inst: CspInstance, hist: AttemptHistory) -> list[str]:
    """Cities of the route the failing attempt declared."""
    q = inst.query
    if hist:
        a = hist[-1][0]
        visited = []
        for day in change_days(q.days)[:-1]:
            cities = day_cities(a, day)
            if len(cities) == 2:
                visited.append(cities[1])
        if len(visited) == q.visiting_city_count:
            return visited
    if not q.destination_is_state:
        return [q.destination]
    return inst.domains.city_pool(q.destination)[: q.visiting_city_count]


def diagnose(inst: CspInstance, hist: AttemptHistory) -> list[GapDiagnosis]:
    """One diagnosis per distinct certificate kind and context, in a fixed
    order. Raises NoGapFound when only repeated logic failures remain."""
    if not hist:
        raise NoGapFound("no attempts recorded")
    feedback = hist[-1][1]
    if not feedback.unsat_certificates:
        raise NoGapFound("last attempt carries no unsat certificates")
    informational = [c for c in feedback.unsat_certificates
                     if c.kind != CertKind.REPEATED_FAILURE]
    if not informational:
        raise NoGapFound("only repeated-failure certificates: logic dead-end")
    out: list[GapDiagnosis] = []
    seen = set()
    for cert in informational:
        ctx = cert.context_dict()
        kind = _GAP_TO_KIND.get(ctx.get("gap", ""))
        if kind is None:
            continue
        key = (kind, cert.context)
        if key in seen:
            continue
        seen.add(key)
        out.append(GapDiagnosis(kind, cert.context, cert))
    if not out:
        raise NoGapFound("certificates map to no known gap")
    out.sort(key=lambda g: (g.kind, g.context))
    return out


def _alternate_cities(inst: CspInstance, route: list[str]) -> list[str]:
    """Other cities of the destination state, ordered by how many
    already-known stays pass the gates, then lexicographically."""
    q = inst.query
    if not q.destination_is_state:
        return []
    taken = {c.lower() for c in route}
    alts = [c for c in inst.domains.city_pool(q.destination) if c.lower() not in taken]
    ranked = sorted(
        alts,
        key=lambda c: (-sum(1 for s in inst.domains.stay_pool(c)
                            if stay_passes_gates(s, q)), c),
    )
    return ranked[:3]


def advise(inst: CspInstance, hist: AttemptHistory,
           executed: set[DirectiveKey]) -> SearchFeedback:
    """Map each diagnosis to tool directives, never repeating an executed one."""
    diags = diagnose(inst, hist)
    q = inst.query
    route = _route_context(inst, hist)
    chain = [q.origin] + route + [q.origin]
    legs = []
    for i, day in enumerate(change_days(q.days)):
        if i + 1 < len(chain):
            legs.append((chain[i], chain[i + 1], q.dates[day - 1]))

    wanted: list[ToolDirective] = []

    def want(d: ToolDirective) -> None:
        wanted.append(d)

    for diag in diags:
        ctx = diag.context_dict()
        if diag.kind == "missing-leg":
            for origin, dest, date in legs:
                want(directive("FlightSearch", origin, dest, date))
            for mode in ("self-driving", "taxi"):
                want(directive("DistanceMatrix", ctx["origin"], ctx["dest"], mode))
        elif diag.kind == "no-stay-under-constraints":
            for city in ctx.get("cities", "").split(","):
                if city:
                    want(directive("AccommodationSearch", city))
            # A route switch to an alternate city also needs its food and
            # attraction pools, so fetch the whole block.
            for city in _alternate_cities(inst, route):
                want(directive("AccommodationSearch", city))
                want(directive("RestaurantSearch", city))
                want(directive("AttractionSearch", city))
        elif diag.kind == "insufficient-restaurants":
            for city in route:
                want(directive("RestaurantSearch", city))
        elif diag.kind == "insufficient-attractions":
            for city in route:
                want(directive("AttractionSearch", city))
        elif diag.kind == "budget-infeasible":
            flown = [leg for leg in ctx.get("legs", "").split(";") if leg]
            if flown:
                for leg in flown:
                    pair = leg.split("@")[0]
                    origin, dest = pair.split("->")
                    want(directive("DistanceMatrix", origin, dest, "self-driving"))
            else:
                for origin, dest, _ in legs:
                    want(directive("DistanceMatrix", origin, dest, "self-driving"))
        elif diag.kind == "no-route-city":
            want(directive("CitySearch", ctx["state"]))

    fresh: list[ToolDirective] = []
    seen: set[DirectiveKey] = set(executed)
    for d in wanted:
        key = directive_key(d)
        if key not in seen:
            seen.add(key)
            fresh.append(d)
    if not fresh:
        raise Exhausted("every mapped directive was already executed")
    rationale = "; ".join(f"{g.kind}({dict(g.context).get('gap', '')})" for g in diags)
    return SearchFeedback(tuple(fresh), rationale)
