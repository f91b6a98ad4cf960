"""Plan verification: evaluate every constraint, classify the outcome as
valid / invalid / unsat, and certify unsatisfiability when candidate pools
cannot support a constraint at all.

Certification probes are scope-local: each looks only at the pools feeding
the violated constraint (with explicit candidate gates applied), never at
global satisfiability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .constraints import (
    Violation,
    day_cities,
    flight_cost,
    ground_cost,
    meal_cost,
    night_city,
    stay_night_cost,
    stay_passes_gates,
)
from .csp import (
    Assignment,
    CspInstance,
    SlotKind,
    StructuredQuery,
    MEAL_KINDS,
    change_days,
)
from .domains import DomainSet


class Verdict(str, Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNSAT = "unsat"


class CertKind(str, Enum):
    EMPTY_DOMAIN = "empty-domain"
    FILTERED_EMPTY = "filtered-empty"
    REPEATED_FAILURE = "repeated-failure"


@dataclass(frozen=True)
class UnsatCertificate:
    constraint_id: str
    kind: CertKind
    witness: str
    context: tuple[tuple[str, str], ...] = ()

    def context_dict(self) -> dict[str, str]:
        return dict(self.context)


@dataclass
class PlanFeedback:
    violations: list[Violation] = field(default_factory=list)
    unsat_certificates: list[UnsatCertificate] = field(default_factory=list)

    def render_lines(self) -> list[str]:
        return [f"{i}. {v.message}" for i, v in enumerate(self.violations, start=1)]

    def violated_ids(self) -> set[str]:
        return {v.constraint_id for v in self.violations}


AttemptHistory = list[tuple[Assignment, PlanFeedback]]

ViolationReport = list[Violation]

# Same constraint violated in this many consecutive prior attempts => unsat.
REPEAT_THRESHOLD = 2


def evaluate(inst: CspInstance, a: Assignment) -> ViolationReport:
    """Run every constraint predicate exactly once, in constraint order."""
    report: ViolationReport = []
    for c in inst.constraints:
        report.extend(c.evaluate(a, inst.domains, inst.query))
    return report


# ---------------------------------------------------------------------------
# Scope-local feasibility probes

def _ctx(**kwargs: str) -> tuple[tuple[str, str], ...]:
    return tuple(sorted((k, str(v)) for k, v in kwargs.items()))


def _declared_route(inst: CspInstance, a: Optional[Assignment]) -> list[str]:
    """Cities the plan claims to visit, falling back to the query."""
    q = inst.query
    visited: list[str] = []
    if a is not None:
        for day in change_days(q.days)[:-1]:
            cities = day_cities(a, day)
            if len(cities) == 2:
                visited.append(cities[1])
    if len(visited) == q.visiting_city_count:
        return visited
    if not q.destination_is_state:
        return [q.destination]
    pool = inst.domains.city_pool(q.destination)
    return pool[: q.visiting_city_count]


def _route_legs_of(inst: CspInstance, a: Optional[Assignment]) -> list[tuple[int, str, str, str]]:
    q = inst.query
    cities = _declared_route(inst, a)
    chain = [q.origin] + cities + [q.origin]
    legs = []
    for i, day in enumerate(change_days(q.days)):
        if i + 1 < len(chain):
            legs.append((day, chain[i], chain[i + 1], q.dates[day - 1]))
    return legs


def _transport_candidates(d: DomainSet, q: StructuredQuery, origin: str, dest: str,
                          date: str, *, gated: bool) -> list:
    pool: list = list(d.flight_pool(origin, dest, date))
    pool += d.ground_pool(origin, dest, "self-driving")
    pool += d.ground_pool(origin, dest, "taxi")
    pref = q.prefs.transport
    if not gated or pref is None:
        return pool
    out = []
    for rec in pool:
        if hasattr(rec, "number"):  # flight
            ok = pref not in ("no-flights", "must-self-drive")
        elif rec.mode == "self-driving":
            ok = pref != "no-self-driving"
        else:  # taxi
            ok = pref != "must-self-drive"
        if ok:
            out.append(rec)
    return out


def _leg_cert(inst: CspInstance, constraint_id: str, day: int, origin: str,
              dest: str, date: str) -> Optional[UnsatCertificate]:
    raw = _transport_candidates(inst.domains, inst.query, origin, dest, date, gated=False)
    ctx = _ctx(gap="leg", origin=origin, dest=dest, date=date, day=day)
    if not raw:
        return UnsatCertificate(constraint_id, CertKind.EMPTY_DOMAIN,
                                f"no transport candidates from {origin} to {dest} on {date}",
                                ctx)
    gated = _transport_candidates(inst.domains, inst.query, origin, dest, date, gated=True)
    if not gated:
        names = [getattr(r, "number", getattr(r, "mode", "?")) for r in raw]
        return UnsatCertificate(constraint_id, CertKind.FILTERED_EMPTY,
                                f"all transport candidates {names} from {origin} to {dest} "
                                f"are excluded by the transport preference", ctx)
    return None


def _stay_cert(inst: CspInstance, constraint_id: str,
               cities: list[str]) -> Optional[UnsatCertificate]:
    d, q = inst.domains, inst.query
    for city in cities:
        raw = d.stay_pool(city)
        ctx = _ctx(gap="stay", city=city, cities=",".join(cities))
        if not raw:
            return UnsatCertificate(constraint_id, CertKind.EMPTY_DOMAIN,
                                    f"no accommodation candidates in {city}", ctx)
        viable = [s for s in raw if stay_passes_gates(s, q)]
        if not viable:
            names = [s.name for s in raw]
            return UnsatCertificate(constraint_id, CertKind.FILTERED_EMPTY,
                                    f"every accommodation in {city} fails the stay "
                                    f"filters: {names}", ctx)
    return None


def _required_meal_count(inst: CspInstance) -> int:
    # Any valid plan moves exactly on the canonical change days, so the
    # distinct-meal requirement is fixed by the trip shape, not by whatever
    # labels the failing attempt carried.
    q = inst.query
    moves = set(change_days(q.days))
    return 3 * sum(1 for day in range(1, q.days + 1) if day not in moves)


def _restaurant_cert(inst: CspInstance, constraint_id: str,
                     cities: list[str]) -> Optional[UnsatCertificate]:
    d = inst.domains
    distinct = {(r.name, r.city.lower()) for city in cities for r in d.restaurant_pool(city)}
    ctx = _ctx(gap="restaurants", cities=",".join(cities))
    if not distinct:
        return UnsatCertificate(constraint_id, CertKind.EMPTY_DOMAIN,
                                f"no restaurant candidates in {cities}", ctx)
    need = _required_meal_count(inst)
    if len(distinct) < need:
        return UnsatCertificate(constraint_id, CertKind.FILTERED_EMPTY,
                                f"only {len(distinct)} distinct restaurants across "
                                f"{cities} but {need} distinct meals are required", ctx)
    return None


def _cuisine_cert(inst: CspInstance, constraint_id: str, cuisine: str,
                  cities: list[str]) -> Optional[UnsatCertificate]:
    d = inst.domains
    pools = [r for city in cities for r in d.restaurant_pool(city)]
    ctx = _ctx(gap="cuisine", cuisine=cuisine, cities=",".join(cities))
    if not pools:
        return UnsatCertificate(constraint_id, CertKind.EMPTY_DOMAIN,
                                f"no restaurant candidates in {cities}", ctx)
    for r in pools:
        if cuisine.lower() in {c.lower() for c in r.cuisines}:
            return None
    return UnsatCertificate(constraint_id, CertKind.FILTERED_EMPTY,
                            f"none of {len(pools)} restaurants in {cities} serves "
                            f"{cuisine}", ctx)


def _attraction_cert(inst: CspInstance, constraint_id: str, city: str,
                     cities: list[str]) -> Optional[UnsatCertificate]:
    pool = inst.domains.attraction_pool(city)
    if pool:
        return None
    return UnsatCertificate(constraint_id, CertKind.EMPTY_DOMAIN,
                            f"no attraction candidates in {city}",
                            _ctx(gap="attractions", city=city, cities=",".join(cities)))


def _conflict_cert(inst: CspInstance, constraint_id: str,
                   a: Optional[Assignment]) -> Optional[UnsatCertificate]:
    d, q = inst.domains, inst.query
    legs = _route_legs_of(inst, a)
    airish = driveish = True
    missing = False
    for _, origin, dest, date in legs:
        cands = _transport_candidates(d, q, origin, dest, date, gated=True)
        if not cands:
            missing = True
        has_air = any(hasattr(c, "number") or c.mode == "taxi" for c in cands)
        has_drive = any(getattr(c, "mode", None) == "self-driving" for c in cands)
        airish = airish and has_air
        driveish = driveish and has_drive
    if airish or driveish:
        return None
    kind = CertKind.EMPTY_DOMAIN if missing else CertKind.FILTERED_EMPTY
    first = legs[0] if legs else (0, q.origin, q.destination, q.dates[0])
    return UnsatCertificate(
        constraint_id, kind,
        "no mode-consistent transport covering: legs must be all self-driving or "
        "all flight/taxi",
        _ctx(gap="leg", origin=first[1], dest=first[2], date=first[3], day=first[0]),
    )


def _budget_cert(inst: CspInstance, constraint_id: str,
                 a: Optional[Assignment]) -> Optional[UnsatCertificate]:
    """Admissible lower bound on deliverable cost; certify when it exceeds
    the budget, since every completion costs at least the bound."""
    d, q = inst.domains, inst.query
    legs = _route_legs_of(inst, a)
    total = 0.0
    witness: list[str] = []
    flown: list[tuple[str, str, str]] = []
    for day, origin, dest, date in legs:
        cands = _transport_candidates(d, q, origin, dest, date, gated=True)
        if not cands:
            continue  # other probes own missing legs
        costs = []
        for c in cands:
            if hasattr(c, "number"):
                costs.append((flight_cost(c, q), f"flight {c.number}"))
            else:
                costs.append((ground_cost(c, q), c.mode))
        best = min(costs)
        if all(hasattr(c, "number") for c in cands):
            flown.append((origin, dest, date))
        total += best[0]
        witness.append(f"{origin}->{dest}: {best[1]} ${best[0]:.2f}")
    cities = _declared_route(inst, a)
    nights_per_visit = 2 if q.visiting_city_count > 1 else q.days - 1
    for city in cities:
        viable = [s for s in d.stay_pool(city) if stay_passes_gates(s, q)]
        if viable:
            best = min(stay_night_cost(s, q) for s in viable)
            total += best * nights_per_visit
            witness.append(f"stay {city}: ${best:.2f}/night x {nights_per_visit}")
    meal_counts = _required_meal_count(inst)
    pools = [r for city in cities for r in d.restaurant_pool(city)]
    if pools and meal_counts:
        cheapest = min(meal_cost(r, q) for r in pools)
        total += cheapest * meal_counts
        witness.append(f"meals: {meal_counts} x ${cheapest:.2f}")
    if total <= q.budget + 1e-9:
        return None
    return UnsatCertificate(
        constraint_id, CertKind.FILTERED_EMPTY,
        f"cheapest deliverable plan costs at least ${total:.2f} > budget "
        f"${q.budget:.2f} ({'; '.join(witness)})",
        _ctx(gap="budget", legs=";".join(f"{o}->{t}@{dt}" for o, t, dt in flown)),
    )


def _route_cert(inst: CspInstance, constraint_id: str) -> Optional[UnsatCertificate]:
    q = inst.query
    if not q.destination_is_state:
        return None
    pool = inst.domains.city_pool(q.destination)
    if len(pool) >= q.visiting_city_count:
        return None
    return UnsatCertificate(
        constraint_id, CertKind.EMPTY_DOMAIN,
        f"state {q.destination} has {len(pool)} known city(ies), need "
        f"{q.visiting_city_count}",
        _ctx(gap="state", state=q.destination),
    )


def certify_unsat(inst: CspInstance, v: Violation,
                  a: Optional[Assignment] = None) -> Optional[UnsatCertificate]:
    """Certificate iff the violated constraint cannot be satisfied from the
    current pools (probing only the constraint's own scope pools)."""
    cid = v.constraint_id
    q = inst.query
    cities = _declared_route(inst, a)
    if cid == "complete-information":
        slot = v.slots[0]
        if slot.kind == SlotKind.TRANSPORTATION:
            for day, origin, dest, date in _route_legs_of(inst, a):
                if day == slot.day:
                    return _leg_cert(inst, cid, day, origin, dest, date)
            return None
        if slot.kind == SlotKind.ACCOMMODATION:
            city = night_city(a, slot.day) if a is not None else None
            return _stay_cert(inst, cid, [city] if city else cities)
        if slot.kind in MEAL_KINDS:
            day_pool_cities = list(day_cities(a, slot.day)) if a is not None else cities
            return _restaurant_cert(inst, cid, day_pool_cities or cities)
        if slot.kind == SlotKind.ATTRACTION:
            day_pool = list(day_cities(a, slot.day)) if a is not None else cities
            city = day_pool[0] if day_pool else (cities[0] if cities else q.destination)
            return _attraction_cert(inst, cid, city, cities)
        return None
    if cid == "budget-cap":
        return _budget_cert(inst, cid, a)
    if cid.startswith("cuisine-"):
        return _cuisine_cert(inst, cid, cid[len("cuisine-"):], cities)
    if cid in ("min-nights-respected", "stay-min-nights-gate", "stay-occupancy-gate",
               "room-type") or cid.startswith("room-rule-"):
        return _stay_cert(inst, cid, cities)
    if cid == "no-repeated-restaurants":
        return _restaurant_cert(inst, cid, cities)
    if cid == "no-conflicting-transport":
        return _conflict_cert(inst, cid, a)
    if cid == "transport-pref":
        day = v.slots[0].day
        for leg_day, origin, dest, date in _route_legs_of(inst, a):
            if leg_day == day:
                return _leg_cert(inst, cid, day, origin, dest, date)
        return None
    if cid == "reasonable-city-route":
        return _route_cert(inst, cid)
    # within-current-city and no-hallucinated-details are planner logic
    # errors: alternatives always exist inside the pools that produced them.
    return None


def check(inst: CspInstance, a: Assignment,
          hist: AttemptHistory) -> tuple[Verdict, PlanFeedback]:
    """Verdict plus structured feedback; a pure function of its inputs."""
    report = evaluate(inst, a)
    if not report:
        return Verdict.VALID, PlanFeedback([], [])
    certs: list[UnsatCertificate] = []
    certified: set[str] = set()
    for v in report:
        if v.constraint_id in certified:
            continue
        cert = certify_unsat(inst, v, a)
        if cert:
            certs.append(cert)
            certified.add(v.constraint_id)
    if len(hist) >= REPEAT_THRESHOLD:
        prior = [fb.violated_ids() for _, fb in hist[-REPEAT_THRESHOLD:]]
        for v in report:
            if v.constraint_id in certified:
                continue
            if all(v.constraint_id in ids for ids in prior):
                certs.append(UnsatCertificate(
                    v.constraint_id, CertKind.REPEATED_FAILURE,
                    f"constraint {v.constraint_id} violated in "
                    f"{REPEAT_THRESHOLD} consecutive prior attempts",
                ))
                certified.add(v.constraint_id)
    verdict = Verdict.UNSAT if certs else Verdict.INVALID
    return verdict, PlanFeedback(report, certs)
