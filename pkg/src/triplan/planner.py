"""Backtracking planner over a CSP instance.

Chronological backtracking in the order route -> transport legs -> stays ->
meals -> attractions, cheapest value first, pruned by nogoods learned from
failed attempts, stay candidate gates, transport-mode consistency, and an
admissible budget lower bound. Delivery never fails: when no feasible
assignment exists within the node cap, the least-violating complete
assignment found is returned marked best-effort.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import checker as _checker
from .checker import AttemptHistory
from .constraints import (
    flight_cost,
    ground_cost,
    meal_cost,
    stay_night_cost,
    stay_passes_gates,
    transport_allowed,
)
from .csp import (
    EMPTY,
    Assignment,
    AttractionChoice,
    CspInstance,
    FlightLeg,
    GroundLeg,
    MealChoice,
    SlotId,
    SlotKind,
    StayChoice,
    StructuredQuery,
    Value,
    MEAL_KINDS,
    change_days,
    city_label,
    route_day_cities,
    route_legs,
)
from .domains import DomainSet

DEFAULT_NODE_CAP = 200_000
MAX_ROUTE_CITIES = 12  # bound on permutation fan-out for state destinations
_BIG = 10**9


class NoRoute(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class EmptyDomain(Exception):
    """A required slot has zero candidates and the empty marker is illegal."""

    def __init__(self, slot: SlotId, reason: str = ""):
        self.slot = slot
        super().__init__(f"{slot!r}: {reason}" if reason else repr(slot))


class _CapReached(Exception):
    pass


@dataclass(frozen=True)
class Nogood:
    """Slot-value pairs forbidden jointly, learned from a violated constraint."""

    pairs: frozenset[tuple[SlotId, Value]]
    source: str


@dataclass
class PlanStats:
    nodes: int = 0
    backtracks: int = 0
    pruned_by_budget: int = 0
    leaf_rejects: int = 0


@dataclass
class PlanResult:
    assignment: Assignment
    best_effort: bool
    cities: list[str]
    stats: PlanStats = field(default_factory=PlanStats)


# Constraints whose violation is fully determined by the offending slot
# values themselves (given the fixed day labels), so forbidding the exact
# combination can never exclude a feasible assignment.
def _nogood_eligible(constraint_id: str) -> bool:
    if constraint_id in ("min-nights-respected", "budget-cap", "complete-information"):
        return False
    return True


def derive_nogoods(hist: AttemptHistory) -> list[Nogood]:
    out: list[Nogood] = []
    seen: set[frozenset] = set()
    for a, fb in hist:
        for v in fb.violations:
            if not _nogood_eligible(v.constraint_id):
                continue
            if not 1 <= len(v.slots) <= 4:
                continue
            pairs = []
            ok = True
            for slot in v.slots:
                if slot not in a:
                    ok = False
                    break
                value = a[slot]
                if value == EMPTY:
                    ok = False
                    break
                pairs.append((slot, value))
                # Day-local location conflicts also depend on the day's label.
                if v.constraint_id == "within-current-city":
                    label_slot = SlotId(slot.day, SlotKind.CURRENT_CITY)
                    if label_slot in a:
                        pairs.append((label_slot, a[label_slot]))
            if not ok:
                continue
            key = frozenset(pairs)
            if key not in seen:
                seen.add(key)
                out.append(Nogood(key, v.constraint_id))
    return out


def _hits_nogood(values: dict[SlotId, Value], nogoods: list[Nogood]) -> bool:
    for ng in nogoods:
        if all(values.get(slot) == val for slot, val in ng.pairs):
            return True
    return False


# ---------------------------------------------------------------------------
# Route skeletons

def _leg_lower_bound(d: DomainSet, q: StructuredQuery, origin: str, dest: str,
                     date: str) -> float:
    best = _BIG
    for f in d.flight_pool(origin, dest, date):
        if transport_allowed(FlightLeg(f.number, f.origin, f.dest, f.dep_time, f.arr_time),
                             q.prefs.transport):
            best = min(best, flight_cost(f, q))
    for mode in ("self-driving", "taxi"):
        for g in d.ground_pool(origin, dest, mode):
            if transport_allowed(GroundLeg(g.mode, g.origin, g.dest), q.prefs.transport):
                best = min(best, ground_cost(g, q))
    return best


def route_skeleton(q: StructuredQuery, d: DomainSet) -> list[list[str]]:
    """Candidate closed-loop visit orders, cheapest transport bound first."""
    if not q.destination_is_state:
        return [[q.destination]]
    pool = d.city_pool(q.destination)
    if len(pool) < q.visiting_city_count:
        raise NoRoute(
            f"state {q.destination} offers {len(pool)} known city(ies), "
            f"need {q.visiting_city_count}")
    pool = pool[:MAX_ROUTE_CITIES]
    scored = []
    for seq in itertools.permutations(pool, q.visiting_city_count):
        chain = [q.origin] + list(seq) + [q.origin]
        bound = 0.0
        for i, day in enumerate(change_days(q.days)):
            bound += _leg_lower_bound(d, q, chain[i], chain[i + 1], q.dates[day - 1])
        scored.append((bound, seq))
    scored.sort(key=lambda item: (item[0], item[1]))
    return [list(seq) for _, seq in scored]


def _visit_spans(q: StructuredQuery, cities: list[str]) -> list[tuple[str, list[int]]]:
    moves = change_days(q.days)
    return [(city, list(range(moves[i], moves[i + 1]))) for i, city in enumerate(cities)]


# ---------------------------------------------------------------------------
# Decision construction

@dataclass
class _Decision:
    slots: tuple[SlotId, ...]  # one slot, or a visit's night slots
    candidates: list[tuple[Value, float, Optional[str], object]]
    # (value, cost, mode-class, record); mode-class in {"air", "drive", None}
    required: bool
    is_meal: bool = False


def _transport_decision(d: DomainSet, q: StructuredQuery, day: int, origin: str,
                        dest: str, date: str) -> _Decision:
    cands = []
    for f in d.flight_pool(origin, dest, date):
        leg = FlightLeg(f.number, f.origin, f.dest, f.dep_time, f.arr_time)
        if transport_allowed(leg, q.prefs.transport):
            cands.append((leg, flight_cost(f, q), "air", f))
    for mode, cls in (("self-driving", "drive"), ("taxi", "air")):
        for g in d.ground_pool(origin, dest, mode):
            leg = GroundLeg(g.mode, g.origin, g.dest)
            if transport_allowed(leg, q.prefs.transport):
                cands.append((leg, ground_cost(g, q), cls, g))
    cands.sort(key=lambda c: (c[1], repr(c[0])))
    return _Decision((SlotId(day, SlotKind.TRANSPORTATION),), cands, required=True)


def _stay_decision(d: DomainSet, q: StructuredQuery, city: str,
                   nights: list[int]) -> _Decision:
    cands = []
    for s in d.stay_pool(city):
        if stay_passes_gates(s, q):
            cands.append((StayChoice(s.name, s.city),
                          stay_night_cost(s, q) * len(nights), None, s))
    cands.sort(key=lambda c: (c[1], c[0].name))
    slots = tuple(SlotId(day, SlotKind.ACCOMMODATION) for day in nights)
    return _Decision(slots, cands, required=True)


def _meal_decision(d: DomainSet, q: StructuredQuery, day: int, kind: SlotKind,
                   cities: tuple[str, ...], required: bool) -> _Decision:
    cands = []
    for city in cities:
        for r in d.restaurant_pool(city):
            cands.append((MealChoice(r.name, r.city), meal_cost(r, q), None, r))
    cands.sort(key=lambda c: (c[1], c[0].name, c[0].city))
    if not required:
        cands = [(EMPTY, 0.0, None, None)] + cands
    return _Decision((SlotId(day, kind),), cands, required=required, is_meal=True)


def _attraction_decision(d: DomainSet, day: int, city: str) -> _Decision:
    cands = [((AttractionChoice(a.name, a.city),), 0.0, None, a)
             for a in sorted(d.attraction_pool(city), key=lambda a: a.name)]
    return _Decision((SlotId(day, SlotKind.ATTRACTION),), cands, required=True)


def _build_decisions(inst: CspInstance, cities: list[str]) -> Optional[list[_Decision]]:
    """Decision sequence for one skeleton; None when a required pool is empty."""
    q, d = inst.query, inst.domains
    decisions: list[_Decision] = []
    for day, origin, dest, date in route_legs(q, cities):
        dec = _transport_decision(d, q, day, origin, dest, date)
        if not dec.candidates:
            return None
        decisions.append(dec)
    for city, nights in _visit_spans(q, cities):
        dec = _stay_decision(d, q, city, nights)
        if not dec.candidates:
            return None
        decisions.append(dec)
    day_map = route_day_cities(q, cities)
    moves = set(change_days(q.days))
    for day in range(1, q.days + 1):
        for kind in MEAL_KINDS:
            dec = _meal_decision(d, q, day, kind, day_map[day], required=day not in moves)
            if dec.required and not dec.candidates:
                return None
            decisions.append(dec)
    for day in range(1, q.days + 1):
        if day not in moves:
            dec = _attraction_decision(d, day, day_map[day][0])
            if not dec.candidates:
                return None
            decisions.append(dec)
    return decisions


def _base_values(q: StructuredQuery, cities: list[str]) -> dict[SlotId, Value]:
    day_map = route_day_cities(q, cities)
    moves = set(change_days(q.days))
    values: dict[SlotId, Value] = {}
    for day in range(1, q.days + 1):
        values[SlotId(day, SlotKind.CURRENT_CITY)] = city_label(day_map[day])
        if day in moves:
            values[SlotId(day, SlotKind.ATTRACTION)] = EMPTY
        if day not in moves:
            values[SlotId(day, SlotKind.TRANSPORTATION)] = EMPTY
    values[SlotId(q.days, SlotKind.ACCOMMODATION)] = EMPTY
    return values


# ---------------------------------------------------------------------------
# Search

def _search(inst: CspInstance, cities: list[str], nogoods: list[Nogood],
            stats: PlanStats, node_cap: int) -> Optional[Assignment]:
    q = inst.query
    decisions = _build_decisions(inst, cities)
    if decisions is None:
        return None
    base = _base_values(q, cities)
    if _hits_nogood(base, nogoods):
        return None

    suffix_min = [0.0] * (len(decisions) + 1)
    for i in range(len(decisions) - 1, -1, -1):
        cheapest = min((c[1] for c in decisions[i].candidates), default=0.0)
        suffix_min[i] = suffix_min[i + 1] + (cheapest if decisions[i].candidates else 0.0)

    wanted_cuisines = {c.lower() for c in q.prefs.cuisines}
    # Per-position reachability for each cuisine across later meal decisions.
    cuisine_later: list[dict[str, bool]] = [dict() for _ in range(len(decisions) + 1)]
    reach: dict[str, bool] = {c: False for c in wanted_cuisines}
    for i in range(len(decisions) - 1, -1, -1):
        if decisions[i].is_meal:
            for _, _, _, rec in decisions[i].candidates:
                if rec is not None:
                    for c in rec.cuisines:
                        if c.lower() in reach:
                            reach[c.lower()] = True
        cuisine_later[i] = dict(reach)

    nogoods_by_slot: dict[SlotId, list[Nogood]] = {}
    for ng in nogoods:
        for slot, _ in ng.pairs:
            nogoods_by_slot.setdefault(slot, []).append(ng)

    partial = dict(base)
    used_restaurants: set[MealChoice] = set()
    covered: set[str] = set()
    mode_counts = {"air": 0, "drive": 0}

    def recurse(i: int, cost: float) -> Optional[Assignment]:
        if i == len(decisions):
            a = Assignment(partial)
            if _checker.evaluate(inst, a):
                stats.leaf_rejects += 1
                return None
            return a
        dec = decisions[i]
        for value, c_cost, mode_cls, rec in dec.candidates:
            stats.nodes += 1
            if stats.nodes > node_cap:
                raise _CapReached()
            if mode_cls == "drive" and mode_counts["air"]:
                continue
            if mode_cls == "air" and mode_counts["drive"]:
                continue
            if cost + c_cost + suffix_min[i + 1] > q.budget + 1e-9:
                stats.pruned_by_budget += 1
                continue
            if isinstance(value, MealChoice) and value in used_restaurants:
                continue
            for slot in dec.slots:
                partial[slot] = value
            conflict = False
            for slot in dec.slots:
                for ng in nogoods_by_slot.get(slot, ()):
                    if all(partial.get(s) == v for s, v in ng.pairs):
                        conflict = True
                        break
                if conflict:
                    break
            newly = set()
            if not conflict and isinstance(value, MealChoice) and rec is not None:
                newly = {c.lower() for c in rec.cuisines} & wanted_cuisines - covered
            if not conflict and wanted_cuisines:
                missing = wanted_cuisines - covered - newly
                if any(not cuisine_later[i + 1].get(c, False) for c in missing):
                    conflict = True
            if not conflict:
                if isinstance(value, MealChoice):
                    used_restaurants.add(value)
                covered.update(newly)
                if mode_cls:
                    mode_counts[mode_cls] += 1
                found = recurse(i + 1, cost + c_cost)
                if found is not None:
                    return found
                stats.backtracks += 1
                if mode_cls:
                    mode_counts[mode_cls] -= 1
                covered.difference_update(newly)
                if isinstance(value, MealChoice):
                    used_restaurants.discard(value)
            for slot in dec.slots:
                partial.pop(slot, None)
        return None

    return recurse(0, 0.0)


# ---------------------------------------------------------------------------
# Best effort

def _greedy(inst: CspInstance, cities: list[str], nogoods: list[Nogood]) -> Assignment:
    q, d = inst.query, inst.domains
    values = _base_values(q, cities)
    moves = set(change_days(q.days))
    day_map = route_day_cities(q, cities)

    for day, origin, dest, date in route_legs(q, cities):
        dec = _transport_decision(d, q, day, origin, dest, date)
        values[SlotId(day, SlotKind.TRANSPORTATION)] = (
            dec.candidates[0][0] if dec.candidates else EMPTY)
    for city, nights in _visit_spans(q, cities):
        pool = d.stay_pool(city)
        viable = [s for s in pool if stay_passes_gates(s, q)]
        chosen = min(viable, key=lambda s: (stay_night_cost(s, q), s.name)) if viable else (
            min(pool, key=lambda s: (stay_night_cost(s, q), s.name)) if pool else None)
        for day in nights:
            values[SlotId(day, SlotKind.ACCOMMODATION)] = (
                StayChoice(chosen.name, chosen.city) if chosen else EMPTY)
    used: set[MealChoice] = set()
    for day in range(1, q.days + 1):
        for kind in MEAL_KINDS:
            slot = SlotId(day, kind)
            if day in moves:
                values[slot] = EMPTY
                continue
            pool = sorted(d.restaurant_pool(day_map[day][0]),
                          key=lambda r: (meal_cost(r, q), r.name))
            pick = next((r for r in pool if MealChoice(r.name, r.city) not in used), None)
            if pick is None and pool:
                pick = pool[0]
            if pick is None:
                values[slot] = EMPTY
            else:
                values[slot] = MealChoice(pick.name, pick.city)
                used.add(values[slot])
        if day not in moves:
            pool = sorted(d.attraction_pool(day_map[day][0]), key=lambda a: a.name)
            values[SlotId(day, SlotKind.ATTRACTION)] = (
                (AttractionChoice(pool[0].name, pool[0].city),) if pool else EMPTY)

    # Break any contained nogood by blanking one of its slots; the empty
    # marker never appears inside a nogood, so this terminates.
    for _ in range(100):
        hit = next((ng for ng in nogoods
                    if all(values.get(s) == v for s, v in ng.pairs)), None)
        if hit is None:
            break
        slot = max((s for s, _ in hit.pairs), key=lambda s: (s.day, s.kind_index))
        if slot.kind == SlotKind.CURRENT_CITY:
            break  # labels are structural; leave as-is
        values[slot] = EMPTY
    return Assignment(values)


def fallback_plan(inst: CspInstance) -> PlanResult:
    """Deliverable plan when no route skeleton exists: pad the visit list
    with the destination name itself and fill greedily."""
    q = inst.query
    pool = inst.domains.city_pool(q.destination) if q.destination_is_state else [q.destination]
    cities = (pool + [q.destination] * q.visiting_city_count)[: q.visiting_city_count]
    a = _greedy(inst, cities, [])
    return PlanResult(a, best_effort=True, cities=cities)


def plan(inst: CspInstance, hist: AttemptHistory,
         node_cap: int = DEFAULT_NODE_CAP) -> PlanResult:
    """Search for a feasible assignment; otherwise deliver the least-violating
    complete assignment found, marked best-effort."""
    q = inst.query
    nogoods = derive_nogoods(hist)
    stats = PlanStats()
    try:
        skeletons = route_skeleton(q, inst.domains)
    except NoRoute as exc:
        raise EmptyDomain(SlotId(1, SlotKind.CURRENT_CITY), exc.reason)

    for cities in skeletons:
        try:
            found = _search(inst, cities, nogoods, stats, node_cap)
        except _CapReached:
            break
        if found is not None:
            return PlanResult(found, best_effort=False, cities=cities, stats=stats)

    candidates: list[tuple[int, int, Assignment, list[str]]] = []
    order = 0
    for prev, _fb in hist:
        if not _hits_nogood(prev.values, nogoods):
            candidates.append((len(_checker.evaluate(inst, prev)), order, prev,
                               skeletons[0]))
            order += 1
    for cities in skeletons[:3]:
        a = _greedy(inst, cities, nogoods)
        candidates.append((len(_checker.evaluate(inst, a)), order, a, cities))
        order += 1
    candidates.sort(key=lambda item: (item[0], item[1]))
    _, _, best, best_cities = candidates[0]
    return PlanResult(best, best_effort=True, cities=best_cities, stats=stats)
