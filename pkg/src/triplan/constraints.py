"""Constraint construction: the fixed commonsense catalogue plus rules
derived from the query and from observed records.

Every constraint is an intensional predicate over (assignment, domains,
query); relations like all-different are never materialized as tuple sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .csp import (
    EMPTY,
    Assignment,
    FlightLeg,
    GroundLeg,
    MealChoice,
    SlotId,
    SlotKind,
    StayChoice,
    StructuredQuery,
    MEAL_KINDS,
    change_days,
    parse_city_label,
)
from .domains import DomainSet
from .sandbox import FlightRec, GroundRouteRec, RestaurantRec, StayRec

# Party-size capacity per vehicle for the two ground modes.
CAR_SEATS = 5
TAXI_SEATS = 4

# Allowance tokens a query may request, mapped to the prohibition that
# disqualifies a stay. Absence of a prohibition permits the activity.
RULE_PROHIBITIONS = {
    "parties": "no-parties",
    "smoking": "no-smoking",
    "children-under-10": "no-children-under-10",
    "pets": "no-pets",
    "visitors": "no-visitors",
}


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    slots: tuple[SlotId, ...]
    message: str


CheckFn = Callable[[Assignment, DomainSet, StructuredQuery], list[tuple[tuple[SlotId, ...], str]]]


@dataclass(frozen=True)
class Constraint:
    id: str
    kind: str  # "explicit" | "implicit"
    category: str  # "hard" | "commonsense"
    scope: frozenset[SlotId]
    check: CheckFn = field(compare=False)
    describe: str = ""

    def evaluate(self, a: Assignment, d: DomainSet, q: StructuredQuery) -> list[Violation]:
        return [Violation(self.id, slots, msg) for slots, msg in self.check(a, d, q)]


@dataclass
class ConstraintSet:
    constraints: list[Constraint]

    def __post_init__(self) -> None:
        self.by_id = {c.id: c for c in self.constraints}
        if len(self.by_id) != len(self.constraints):
            raise ValueError("duplicate constraint ids")

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def dump_lines(self) -> list[str]:
        return [f"{c.id} | {c.kind} | {c.category} | {c.describe}" for c in self.constraints]


# ---------------------------------------------------------------------------
# Resolution against candidate pools

def resolve_flight(d: DomainSet, leg: FlightLeg, date: str) -> Optional[FlightRec]:
    for f in d.flight_pool(leg.origin, leg.dest, date):
        if (f.number == leg.number and f.dep_time == leg.dep_time
                and f.arr_time == leg.arr_time):
            return f
    return None


def resolve_ground(d: DomainSet, leg: GroundLeg) -> Optional[GroundRouteRec]:
    return d.find_ground(leg.origin, leg.dest, leg.mode)


def resolve_stay(d: DomainSet, choice: StayChoice) -> Optional[StayRec]:
    return d.find_stay(choice.name, choice.city)


def resolve_restaurant(d: DomainSet, choice: MealChoice) -> Optional[RestaurantRec]:
    return d.find_restaurant(choice.name, choice.city)


# ---------------------------------------------------------------------------
# Cost model
#
# Flight prices are per person per leg; ground cost is per vehicle with
# ceil(people/seats) vehicles; stays are per room per night with
# ceil(people/max_occupancy) rooms; meals are per person; attractions free.

def flight_cost(rec: FlightRec, q: StructuredQuery) -> float:
    return rec.price * q.people


def ground_cost(rec: GroundRouteRec, q: StructuredQuery) -> float:
    seats = CAR_SEATS if rec.mode == "self-driving" else TAXI_SEATS
    return rec.cost * math.ceil(q.people / seats)


def stay_night_cost(rec: StayRec, q: StructuredQuery) -> float:
    return rec.price * math.ceil(q.people / rec.max_occupancy)


def meal_cost(rec: RestaurantRec, q: StructuredQuery) -> float:
    return rec.avg_cost * q.people


def trip_cost(a: Assignment, d: DomainSet, q: StructuredQuery) -> float:
    """Total cost of the resolvable parts of a plan.

    Values with no matching record contribute nothing; the grounding
    constraint reports those separately.
    """
    total = 0.0
    for day in range(1, q.days + 1):
        value = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(value, FlightLeg):
            rec = resolve_flight(d, value, q.dates[day - 1])
            if rec:
                total += flight_cost(rec, q)
        elif isinstance(value, GroundLeg):
            rec = resolve_ground(d, value)
            if rec:
                total += ground_cost(rec, q)
        for kind in MEAL_KINDS:
            meal = a.get(day, kind)
            if isinstance(meal, MealChoice):
                rec = resolve_restaurant(d, meal)
                if rec:
                    total += meal_cost(rec, q)
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if isinstance(stay, StayChoice):
            rec = resolve_stay(d, stay)
            if rec:
                total += stay_night_cost(rec, q)  # one night per non-final day
    return total


# ---------------------------------------------------------------------------
# Shared shape helpers

def day_cities(a: Assignment, day: int) -> tuple[str, ...]:
    label = a.get(day, SlotKind.CURRENT_CITY)
    return parse_city_label(label) if isinstance(label, str) else ()


def is_move_day(a: Assignment, day: int) -> bool:
    return len(day_cities(a, day)) == 2


def night_city(a: Assignment, day: int) -> Optional[str]:
    cities = day_cities(a, day)
    if not cities:
        return None
    return cities[-1]


def visit_nights(q: StructuredQuery) -> int:
    """Consecutive nights available at each visited city for the trip shape."""
    moves = change_days(q.days)
    return moves[1] - moves[0] if len(moves) > 1 else q.days - 1


def stay_passes_gates(rec: StayRec, q: StructuredQuery) -> bool:
    """Candidate filter for stays: minimum-nights fits the visit length and
    the room can be booked for the party; query room rules and type apply."""
    if rec.min_nights > visit_nights(q):
        return False
    if rec.max_occupancy < 1:
        return False
    for allowance in q.prefs.room_rules:
        if RULE_PROHIBITIONS.get(allowance) in rec.house_rules:
            return False
    if q.prefs.room_type is not None and not _room_type_ok(rec, q.prefs.room_type):
        return False
    return True


def _room_type_ok(rec: StayRec, wanted: str) -> bool:
    if wanted == "not-shared-room":
        return rec.room_type != "shared-room"
    return rec.room_type == wanted


def transport_allowed(value, pref: Optional[str]) -> bool:
    if pref is None or value == EMPTY:
        return True
    if pref == "no-flights":
        return not isinstance(value, FlightLeg)
    if pref == "no-self-driving":
        return not (isinstance(value, GroundLeg) and value.mode == "self-driving")
    # must-self-drive
    return isinstance(value, GroundLeg) and value.mode == "self-driving"


def _slots(day: int, *kinds: SlotKind) -> tuple[SlotId, ...]:
    return tuple(SlotId(day, k) for k in kinds)


def _same(x: str, y: str) -> bool:
    return x.lower() == y.lower()


# ---------------------------------------------------------------------------
# Implicit catalogue

def _check_conflicting_transport(a, d, q):
    flights, drives, taxis = [], [], []
    for day in range(1, q.days + 1):
        value = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(value, FlightLeg):
            flights.append(SlotId(day, SlotKind.TRANSPORTATION))
        elif isinstance(value, GroundLeg):
            (drives if value.mode == "self-driving" else taxis).append(
                SlotId(day, SlotKind.TRANSPORTATION))
    if drives and (flights or taxis):
        slots = tuple(drives + flights + taxis)
        return [(slots, "The transportation plan is not logical: self-driving cannot "
                        "be mixed with flights or taxis, the car would be left behind.")]
    return []


def _check_complete_information(a, d, q):
    out = []
    for day in range(1, q.days + 1):
        moving = is_move_day(a, day)
        if moving and a.get(day, SlotKind.TRANSPORTATION) == EMPTY:
            out.append((_slots(day, SlotKind.TRANSPORTATION),
                        f"The transportation choice is missing for Day {day}."))
        if not moving:
            for kind in MEAL_KINDS:
                if a.get(day, kind) == EMPTY:
                    out.append((_slots(day, kind),
                                f"The {kind.value} choice is missing for Day {day}."))
            if a.get(day, SlotKind.ATTRACTION) == EMPTY:
                out.append((_slots(day, SlotKind.ATTRACTION),
                            f"The attraction choice is missing for Day {day}."))
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if day < q.days and stay == EMPTY:
            out.append((_slots(day, SlotKind.ACCOMMODATION),
                        f"The accommodation choice is missing for Day {day}."))
        if day == q.days and stay != EMPTY:
            out.append((_slots(day, SlotKind.ACCOMMODATION),
                        "The final day must not book an accommodation."))
    return out


def _check_city_route(a, d, q):
    out = []
    moves = set(change_days(q.days))
    current = q.origin
    visited: list[str] = []
    for day in range(1, q.days + 1):
        cities = day_cities(a, day)
        slot = _slots(day, SlotKind.CURRENT_CITY)
        if (day in moves) != (len(cities) == 2):
            out.append((slot, f"Day {day} must {'move between cities' if day in moves else 'stay in one city'}."))
            current = cities[-1] if cities else current
            continue
        if len(cities) == 2:
            frm, to = cities
            if not _same(frm, current):
                out.append((slot, f"Day {day} departs from {frm} but the plan is in {current}."))
            if day == q.days and not _same(to, q.origin):
                out.append((slot, f"The trip must be a closed loop returning to {q.origin}."))
            if day < q.days:
                visited.append(to)
            current = to
        else:
            if not _same(cities[0], current):
                out.append((slot, f"Day {day} is in {cities[0]} but the plan is in {current}."))
            if a.get(day, SlotKind.TRANSPORTATION) != EMPTY:
                out.append((_slots(day, SlotKind.TRANSPORTATION),
                            f"Day {day} books transportation without a city change."))
        # Transport leg must follow the day's declared movement.
        leg = a.get(day, SlotKind.TRANSPORTATION)
        if len(cities) == 2 and isinstance(leg, (FlightLeg, GroundLeg)):
            if not (_same(leg.origin, cities[0]) and _same(leg.dest, cities[1])):
                out.append((_slots(day, SlotKind.TRANSPORTATION),
                            f"Day {day} transportation does not match the declared route."))
    reachable = [v.lower() for v in visited]
    if len(visited) != q.visiting_city_count or len(set(reachable)) != len(visited):
        out.append((tuple(SlotId(day, SlotKind.CURRENT_CITY) for day in range(1, q.days + 1)),
                    f"The route must visit {q.visiting_city_count} distinct city(ies)."))
    elif any(_same(v, q.origin) for v in visited):
        out.append((tuple(SlotId(day, SlotKind.CURRENT_CITY) for day in range(1, q.days + 1)),
                    "The route must not revisit the origin mid-trip."))
    elif q.destination_is_state:
        pool = {c.lower() for c in d.city_pool(q.destination)}
        if pool:
            strays = [v for v in visited if v.lower() not in pool]
            if strays:
                out.append((tuple(SlotId(day, SlotKind.CURRENT_CITY) for day in range(1, q.days + 1)),
                            f"Cities {strays} are not known cities of {q.destination}."))
    else:
        if not any(_same(v, q.destination) for v in visited):
            out.append((tuple(SlotId(day, SlotKind.CURRENT_CITY) for day in range(1, q.days + 1)),
                        f"The destination city is {q.destination}."))
    return out


def _stay_runs(a: Assignment, q: StructuredQuery) -> list[tuple[StayChoice, list[int]]]:
    """Maximal runs of consecutive nights booked at the same stay."""
    runs: list[tuple[StayChoice, list[int]]] = []
    for day in range(1, q.days):  # final day books no night
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if not isinstance(stay, StayChoice):
            continue
        if runs and runs[-1][0] == stay and runs[-1][1][-1] == day - 1:
            runs[-1][1].append(day)
        else:
            runs.append((stay, [day]))
    return runs


def _check_min_nights(a, d, q):
    out = []
    for stay, days_run in _stay_runs(a, q):
        rec = resolve_stay(d, stay)
        if rec and len(days_run) < rec.min_nights:
            slots = tuple(SlotId(day, SlotKind.ACCOMMODATION) for day in days_run)
            out.append((slots,
                        f"The minimum nights for '{stay.name}, {stay.city}' is "
                        f"{rec.min_nights}, but it is only booked for {len(days_run)} "
                        f"night(s)."))
    return out


def _check_repeated_restaurants(a, d, q):
    seen: dict[MealChoice, list[SlotId]] = {}
    for day in range(1, q.days + 1):
        for kind in MEAL_KINDS:
            meal = a.get(day, kind)
            if isinstance(meal, MealChoice):
                seen.setdefault(meal, []).append(SlotId(day, kind))
    out = []
    for meal, slots in sorted(seen.items(), key=lambda kv: (kv[0].name, kv[0].city)):
        if len(slots) > 1:
            out.append((tuple(slots),
                        f"The restaurant '{meal.name}, {meal.city}' is repeated."))
    return out


def _check_grounding(a, d, q):
    out = []
    for day in range(1, q.days + 1):
        leg = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(leg, FlightLeg) and not resolve_flight(d, leg, q.dates[day - 1]):
            out.append((_slots(day, SlotKind.TRANSPORTATION),
                        f"The transportation information in day {day} is hallucinated."))
        elif isinstance(leg, GroundLeg) and not resolve_ground(d, leg):
            out.append((_slots(day, SlotKind.TRANSPORTATION),
                        f"The transportation information in day {day} is hallucinated."))
        for kind in MEAL_KINDS:
            meal = a.get(day, kind)
            if isinstance(meal, MealChoice) and not resolve_restaurant(d, meal):
                out.append((_slots(day, kind),
                            f"The {kind.value} information in day {day} is hallucinated."))
        attraction = a.get(day, SlotKind.ATTRACTION)
        if isinstance(attraction, tuple):
            for pick in attraction:
                if not d.find_attraction(pick.name, pick.city):
                    out.append((_slots(day, SlotKind.ATTRACTION),
                                f"The attraction information in day {day} is hallucinated."))
                    break
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if isinstance(stay, StayChoice) and not resolve_stay(d, stay):
            out.append((_slots(day, SlotKind.ACCOMMODATION),
                        f"The accommodation information in day {day} is hallucinated."))
    return out


def _check_within_city(a, d, q):
    out = []
    for day in range(1, q.days + 1):
        cities = {c.lower() for c in day_cities(a, day)}
        if not cities:
            continue
        for kind in MEAL_KINDS:
            meal = a.get(day, kind)
            if isinstance(meal, MealChoice) and meal.city.lower() not in cities:
                out.append((_slots(day, kind),
                            f"The {kind.value} in day {day} is outside that day's city(s)."))
        attraction = a.get(day, SlotKind.ATTRACTION)
        if isinstance(attraction, tuple):
            for pick in attraction:
                if pick.city.lower() not in cities:
                    out.append((_slots(day, SlotKind.ATTRACTION),
                                f"The attraction in day {day} is outside that day's city(s)."))
                    break
        stay = a.get(day, SlotKind.ACCOMMODATION)
        sleep_city = night_city(a, day)
        if isinstance(stay, StayChoice) and sleep_city and not _same(stay.city, sleep_city):
            out.append((_slots(day, SlotKind.ACCOMMODATION),
                        f"The accommodation in day {day} is not in {sleep_city}."))
    return out


def implicit_catalogue(q: StructuredQuery) -> list[Constraint]:
    """The fixed commonsense rules applied to every plan."""
    all_days = range(1, q.days + 1)
    transport = frozenset(SlotId(day, SlotKind.TRANSPORTATION) for day in all_days)
    meals = frozenset(SlotId(day, kind) for day in all_days for kind in MEAL_KINDS)
    stays = frozenset(SlotId(day, SlotKind.ACCOMMODATION) for day in all_days)
    cities = frozenset(SlotId(day, SlotKind.CURRENT_CITY) for day in all_days)
    everything = frozenset(SlotId(day, kind) for day in all_days for kind in SlotKind)
    return [
        Constraint("no-conflicting-transport", "implicit", "commonsense", transport,
                   _check_conflicting_transport,
                   "Transportation modes must be consistent: self-driving cannot be "
                   "mixed with flights or taxis."),
        Constraint("complete-information", "implicit", "commonsense", everything,
                   _check_complete_information,
                   "No key information may be left out of the plan."),
        Constraint("reasonable-city-route", "implicit", "commonsense",
                   cities | transport, _check_city_route,
                   "City changes must be reasonable and form a closed loop back to "
                   "the origin."),
        Constraint("min-nights-respected", "implicit", "commonsense", stays,
                   _check_min_nights,
                   "Consecutive nights at an accommodation must meet its minimum-"
                   "nights requirement."),
        Constraint("no-repeated-restaurants", "implicit", "commonsense", meals,
                   _check_repeated_restaurants,
                   "Restaurant choices must not repeat throughout the trip."),
        Constraint("no-hallucinated-details", "implicit", "commonsense", everything,
                   _check_grounding,
                   "All plan details must come from records observed in the sandbox."),
        Constraint("within-current-city", "implicit", "commonsense",
                   meals | stays | frozenset(SlotId(day, SlotKind.ATTRACTION) for day in all_days),
                   _check_within_city,
                   "All scheduled activities must lie within that day's city(s)."),
    ]


# ---------------------------------------------------------------------------
# Explicit constraints

def _cost_scope(q: StructuredQuery) -> frozenset[SlotId]:
    return frozenset(
        SlotId(day, kind)
        for day in range(1, q.days + 1)
        for kind in (SlotKind.TRANSPORTATION, SlotKind.ACCOMMODATION, *MEAL_KINDS)
    )


def _make_budget(q: StructuredQuery) -> Constraint:
    def check(a, d, q2):
        cost = trip_cost(a, d, q2)
        if cost > q2.budget + 1e-9:
            offending = tuple(
                SlotId(day, kind)
                for day in range(1, q2.days + 1)
                for kind in (SlotKind.TRANSPORTATION, SlotKind.ACCOMMODATION, *MEAL_KINDS)
                if a.get(day, kind) != EMPTY
            )
            return [(offending,
                     f"The total cost ${cost:.2f} exceeds the budget of ${q2.budget:.2f}.")]
        return []

    return Constraint("budget-cap", "explicit", "hard", _cost_scope(q), check,
                      f"The total cost of the trip must not exceed ${q.budget:.2f}.")


def _make_cuisine(q: StructuredQuery, cuisine: str) -> Constraint:
    meals = frozenset(SlotId(day, kind) for day in range(1, q.days + 1) for kind in MEAL_KINDS)

    def check(a, d, q2):
        for day in range(1, q2.days + 1):
            for kind in MEAL_KINDS:
                meal = a.get(day, kind)
                if isinstance(meal, MealChoice):
                    rec = resolve_restaurant(d, meal)
                    if rec and cuisine.lower() in {c.lower() for c in rec.cuisines}:
                        return []
        return [(tuple(sorted(meals)),
                 f"No chosen restaurant serves {cuisine} cuisine.")]

    return Constraint(f"cuisine-{cuisine.lower()}", "explicit", "hard", meals, check,
                      f"At least one restaurant serving {cuisine} cuisine must be included.")


def _make_room_rule(q: StructuredQuery, allowance: str) -> Constraint:
    stays = frozenset(SlotId(day, SlotKind.ACCOMMODATION) for day in range(1, q.days + 1))
    prohibition = RULE_PROHIBITIONS[allowance]

    def check(a, d, q2):
        out = []
        for day in range(1, q2.days + 1):
            stay = a.get(day, SlotKind.ACCOMMODATION)
            if isinstance(stay, StayChoice):
                rec = resolve_stay(d, stay)
                if rec and prohibition in rec.house_rules:
                    out.append((_slots(day, SlotKind.ACCOMMODATION),
                                f"'{stay.name}, {stay.city}' prohibits {allowance}."))
        return out

    return Constraint(f"room-rule-{allowance}", "explicit", "hard", stays, check,
                      f"Chosen accommodations must allow {allowance}.")


def _make_room_type(q: StructuredQuery) -> Constraint:
    stays = frozenset(SlotId(day, SlotKind.ACCOMMODATION) for day in range(1, q.days + 1))
    wanted = q.prefs.room_type

    def check(a, d, q2):
        out = []
        for day in range(1, q2.days + 1):
            stay = a.get(day, SlotKind.ACCOMMODATION)
            if isinstance(stay, StayChoice):
                rec = resolve_stay(d, stay)
                if rec and not _room_type_ok(rec, wanted):
                    out.append((_slots(day, SlotKind.ACCOMMODATION),
                                f"'{stay.name}, {stay.city}' is {rec.room_type}, "
                                f"not {wanted}."))
        return out

    return Constraint("room-type", "explicit", "hard", stays, check,
                      f"Accommodations must offer {wanted}.")


def _make_transport_pref(q: StructuredQuery) -> Constraint:
    transport = frozenset(SlotId(day, SlotKind.TRANSPORTATION) for day in range(1, q.days + 1))
    pref = q.prefs.transport

    def check(a, d, q2):
        out = []
        for day in range(1, q2.days + 1):
            value = a.get(day, SlotKind.TRANSPORTATION)
            if not transport_allowed(value, pref):
                out.append((_slots(day, SlotKind.TRANSPORTATION),
                            f"Day {day} transportation violates the {pref} preference."))
        return out

    return Constraint("transport-pref", "explicit", "hard", transport, check,
                      f"The transportation preference is {pref}.")


def _make_stay_min_nights_gate(q: StructuredQuery) -> Constraint:
    stays = frozenset(SlotId(day, SlotKind.ACCOMMODATION) for day in range(1, q.days + 1))
    nights = visit_nights(q)

    def check(a, d, q2):
        out = []
        for day in range(1, q2.days + 1):
            stay = a.get(day, SlotKind.ACCOMMODATION)
            if isinstance(stay, StayChoice):
                rec = resolve_stay(d, stay)
                if rec and rec.min_nights > nights:
                    out.append((_slots(day, SlotKind.ACCOMMODATION),
                                f"'{stay.name}, {stay.city}' requires "
                                f"{rec.min_nights} nights but only {nights} are "
                                f"available at each city."))
        return out

    return Constraint("stay-min-nights-gate", "explicit", "hard", stays, check,
                      f"Chosen accommodations must have a minimum stay requirement of "
                      f"{nights} nights or less.")


def _make_stay_occupancy_gate(q: StructuredQuery) -> Constraint:
    stays = frozenset(SlotId(day, SlotKind.ACCOMMODATION) for day in range(1, q.days + 1))

    def check(a, d, q2):
        out = []
        for day in range(1, q2.days + 1):
            stay = a.get(day, SlotKind.ACCOMMODATION)
            if isinstance(stay, StayChoice):
                rec = resolve_stay(d, stay)
                if rec and rec.max_occupancy < 1:
                    out.append((_slots(day, SlotKind.ACCOMMODATION),
                                f"'{stay.name}, {stay.city}' cannot host any guests."))
        return out

    return Constraint("stay-occupancy-gate", "explicit", "hard", stays, check,
                      "Chosen accommodations are booked as ceil(people/max_occupancy) "
                      "rooms, so they must admit at least one guest per room.")


def extract_explicit(q: StructuredQuery, d: DomainSet) -> list[Constraint]:
    """Hard constraints from the query plus gates that arise from observations."""
    out = [_make_budget(q)]
    for cuisine in sorted(q.prefs.cuisines):
        out.append(_make_cuisine(q, cuisine))
    for allowance in sorted(q.prefs.room_rules):
        if allowance not in RULE_PROHIBITIONS:
            raise ValueError(f"unknown room-rule allowance {allowance!r}")
        out.append(_make_room_rule(q, allowance))
    if q.prefs.room_type is not None:
        out.append(_make_room_type(q))
    if q.prefs.transport is not None:
        out.append(_make_transport_pref(q))
    if d.stays:
        out.append(_make_stay_min_nights_gate(q))
        out.append(_make_stay_occupancy_gate(q))
    return out


def build_constraints(q: StructuredQuery, d: DomainSet) -> ConstraintSet:
    """The complete rule set: explicit first, then the implicit catalogue."""
    return ConstraintSet(extract_explicit(q, d) + implicit_catalogue(q))
