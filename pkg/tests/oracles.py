"""Independent oracles for the acceptance suite.

Everything here re-derives plan legality from first principles, in its own
straightforward code, so production logic can be compared against it:

- ``oracle_violations``: per-constraint brute evaluation of an assignment.
- ``brute_force_feasible``: exhaustive enumeration over the canonical
  assignment space of a small instance.
- ``validate_certificate``: re-validation of unsat certificates against the
  candidate pools they cite.
"""

from __future__ import annotations

import itertools
import math
import re

from triplan.checker import CertKind
from triplan.csp import (
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
)

MEALS = (SlotKind.BREAKFAST, SlotKind.LUNCH, SlotKind.DINNER)


def _label(a: Assignment, day: int) -> str:
    return a.get(day, SlotKind.CURRENT_CITY)


def _move(label: str):
    m = re.match(r"^from (.+?) to (.+)$", label)
    return (m.group(1), m.group(2)) if m else None


def _day_cities(a, day):
    mv = _move(_label(a, day))
    return list(mv) if mv else [_label(a, day)]


def _lookup_flight(d, leg: FlightLeg, date: str):
    for f in d.flight_pool(leg.origin, leg.dest, date):
        if (f.number, f.dep_time, f.arr_time) == (leg.number, leg.dep_time, leg.arr_time):
            return f
    return None


def _lookup_stay(d, choice: StayChoice):
    for s in d.stay_pool(choice.city):
        if s.name == choice.name:
            return s
    return None


def _lookup_restaurant(d, choice: MealChoice):
    for r in d.restaurant_pool(choice.city):
        if r.name == choice.name:
            return r
    return None


def _stay_ok(stay, q, nights_available: int) -> bool:
    """Joint stay filter: minimum nights, occupancy, room rules, room type."""
    if stay.min_nights > nights_available:
        return False
    if stay.max_occupancy < 1:
        return False
    for allowance in q.prefs.room_rules:
        if f"no-{allowance}" in stay.house_rules:
            return False
    if q.prefs.room_type == "not-shared-room":
        if stay.room_type == "shared-room":
            return False
    elif q.prefs.room_type is not None and stay.room_type != q.prefs.room_type:
        return False
    return True


def _transport_pref_ok(value, pref) -> bool:
    if pref is None or value == EMPTY:
        return True
    if pref == "no-flights":
        return not isinstance(value, FlightLeg)
    if pref == "no-self-driving":
        return not (isinstance(value, GroundLeg) and value.mode == "self-driving")
    return isinstance(value, GroundLeg) and value.mode == "self-driving"


def oracle_cost(a: Assignment, inst: CspInstance) -> float:
    q, d = inst.query, inst.domains
    total = 0.0
    for day in range(1, q.days + 1):
        t = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(t, FlightLeg):
            rec = _lookup_flight(d, t, q.dates[day - 1])
            if rec:
                total += rec.price * q.people
        elif isinstance(t, GroundLeg):
            pool = d.ground_pool(t.origin, t.dest, t.mode)
            if pool:
                seats = 5 if t.mode == "self-driving" else 4
                total += pool[0].cost * math.ceil(q.people / seats)
        for kind in MEALS:
            m = a.get(day, kind)
            if isinstance(m, MealChoice):
                rec = _lookup_restaurant(d, m)
                if rec:
                    total += rec.avg_cost * q.people
        s = a.get(day, SlotKind.ACCOMMODATION)
        if isinstance(s, StayChoice):
            rec = _lookup_stay(d, s)
            if rec:
                total += rec.price * math.ceil(q.people / rec.max_occupancy)
    return total


def oracle_violations(inst: CspInstance, a: Assignment) -> dict[str, frozenset[SlotId]]:
    """Map violated constraint id -> union of offending slots, re-derived
    rule by rule."""
    q, d = inst.query, inst.domains
    days = q.days
    out: dict[str, set[SlotId]] = {}

    def flag(cid: str, slots) -> None:
        out.setdefault(cid, set()).update(slots)

    move_days = set(range(1, days + 1, 2))
    nights_available = 2 if q.visiting_city_count > 1 else days - 1

    # conflicting transport
    drive_slots, air_slots = [], []
    for day in range(1, days + 1):
        t = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(t, GroundLeg) and t.mode == "self-driving":
            drive_slots.append(SlotId(day, SlotKind.TRANSPORTATION))
        elif isinstance(t, (FlightLeg, GroundLeg)):
            air_slots.append(SlotId(day, SlotKind.TRANSPORTATION))
    if drive_slots and air_slots:
        flag("no-conflicting-transport", drive_slots + air_slots)

    # complete information
    for day in range(1, days + 1):
        moving = _move(_label(a, day)) is not None
        if moving and a.get(day, SlotKind.TRANSPORTATION) == EMPTY:
            flag("complete-information", [SlotId(day, SlotKind.TRANSPORTATION)])
        if not moving:
            for kind in MEALS:
                if a.get(day, kind) == EMPTY:
                    flag("complete-information", [SlotId(day, kind)])
            if a.get(day, SlotKind.ATTRACTION) == EMPTY:
                flag("complete-information", [SlotId(day, SlotKind.ATTRACTION)])
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if day < days and stay == EMPTY:
            flag("complete-information", [SlotId(day, SlotKind.ACCOMMODATION)])
        if day == days and stay != EMPTY:
            flag("complete-information", [SlotId(day, SlotKind.ACCOMMODATION)])

    # reasonable city route
    current = q.origin
    visited = []
    for day in range(1, days + 1):
        label_slot = SlotId(day, SlotKind.CURRENT_CITY)
        mv = _move(_label(a, day))
        if (day in move_days) != (mv is not None):
            flag("reasonable-city-route", [label_slot])
            current = mv[1] if mv else current
            continue
        if mv:
            frm, to = mv
            if frm.lower() != current.lower():
                flag("reasonable-city-route", [label_slot])
            if day == days and to.lower() != q.origin.lower():
                flag("reasonable-city-route", [label_slot])
            if day < days:
                visited.append(to)
            current = to
        else:
            if _label(a, day).lower() != current.lower():
                flag("reasonable-city-route", [label_slot])
            if a.get(day, SlotKind.TRANSPORTATION) != EMPTY:
                flag("reasonable-city-route", [SlotId(day, SlotKind.TRANSPORTATION)])
        t = a.get(day, SlotKind.TRANSPORTATION)
        if mv and isinstance(t, (FlightLeg, GroundLeg)):
            if t.origin.lower() != mv[0].lower() or t.dest.lower() != mv[1].lower():
                flag("reasonable-city-route", [SlotId(day, SlotKind.TRANSPORTATION)])
    all_city_slots = [SlotId(day, SlotKind.CURRENT_CITY) for day in range(1, days + 1)]
    lowered = [v.lower() for v in visited]
    if len(visited) != q.visiting_city_count or len(set(lowered)) != len(lowered):
        flag("reasonable-city-route", all_city_slots)
    elif any(v == q.origin.lower() for v in lowered):
        flag("reasonable-city-route", all_city_slots)
    elif q.destination_is_state:
        pool = {c.lower() for c in d.city_pool(q.destination)}
        if pool and any(v not in pool for v in lowered):
            flag("reasonable-city-route", all_city_slots)
    elif q.destination.lower() not in lowered:
        flag("reasonable-city-route", all_city_slots)

    # minimum nights over consecutive runs
    run: list[int] = []
    run_stay = None
    for day in range(1, days):
        stay = a.get(day, SlotKind.ACCOMMODATION)
        if isinstance(stay, StayChoice) and stay == run_stay:
            run.append(day)
        else:
            if run_stay is not None:
                rec = _lookup_stay(d, run_stay)
                if rec and len(run) < rec.min_nights:
                    flag("min-nights-respected",
                         [SlotId(x, SlotKind.ACCOMMODATION) for x in run])
            run_stay = stay if isinstance(stay, StayChoice) else None
            run = [day] if isinstance(stay, StayChoice) else []
    if run_stay is not None:
        rec = _lookup_stay(d, run_stay)
        if rec and len(run) < rec.min_nights:
            flag("min-nights-respected", [SlotId(x, SlotKind.ACCOMMODATION) for x in run])

    # repeated restaurants
    places: dict[MealChoice, list[SlotId]] = {}
    for day in range(1, days + 1):
        for kind in MEALS:
            m = a.get(day, kind)
            if isinstance(m, MealChoice):
                places.setdefault(m, []).append(SlotId(day, kind))
    for m, slots in places.items():
        if len(slots) > 1:
            flag("no-repeated-restaurants", slots)

    # sandbox grounding
    for day in range(1, days + 1):
        t = a.get(day, SlotKind.TRANSPORTATION)
        if isinstance(t, FlightLeg) and not _lookup_flight(d, t, q.dates[day - 1]):
            flag("no-hallucinated-details", [SlotId(day, SlotKind.TRANSPORTATION)])
        if isinstance(t, GroundLeg) and not d.ground_pool(t.origin, t.dest, t.mode):
            flag("no-hallucinated-details", [SlotId(day, SlotKind.TRANSPORTATION)])
        for kind in MEALS:
            m = a.get(day, kind)
            if isinstance(m, MealChoice) and not _lookup_restaurant(d, m):
                flag("no-hallucinated-details", [SlotId(day, kind)])
        attr = a.get(day, SlotKind.ATTRACTION)
        if isinstance(attr, tuple):
            for pick in attr:
                if not any(x.name == pick.name
                           for x in d.attraction_pool(pick.city)):
                    flag("no-hallucinated-details", [SlotId(day, SlotKind.ATTRACTION)])
        s = a.get(day, SlotKind.ACCOMMODATION)
        if isinstance(s, StayChoice) and not _lookup_stay(d, s):
            flag("no-hallucinated-details", [SlotId(day, SlotKind.ACCOMMODATION)])

    # within current city
    for day in range(1, days + 1):
        cities = {c.lower() for c in _day_cities(a, day)}
        for kind in MEALS:
            m = a.get(day, kind)
            if isinstance(m, MealChoice) and m.city.lower() not in cities:
                flag("within-current-city", [SlotId(day, kind)])
        attr = a.get(day, SlotKind.ATTRACTION)
        if isinstance(attr, tuple):
            if any(pick.city.lower() not in cities for pick in attr):
                flag("within-current-city", [SlotId(day, SlotKind.ATTRACTION)])
        s = a.get(day, SlotKind.ACCOMMODATION)
        sleep = _day_cities(a, day)[-1].lower()
        if isinstance(s, StayChoice) and s.city.lower() != sleep:
            flag("within-current-city", [SlotId(day, SlotKind.ACCOMMODATION)])

    # budget
    if oracle_cost(a, inst) > q.budget + 1e-9:
        slots = []
        for day in range(1, days + 1):
            for kind in (SlotKind.TRANSPORTATION, SlotKind.ACCOMMODATION, *MEALS):
                if a.get(day, kind) != EMPTY:
                    slots.append(SlotId(day, kind))
        flag("budget-cap", slots)

    # cuisines
    for cuisine in q.prefs.cuisines:
        served = False
        for day in range(1, days + 1):
            for kind in MEALS:
                m = a.get(day, kind)
                if isinstance(m, MealChoice):
                    rec = _lookup_restaurant(d, m)
                    if rec and cuisine.lower() in {c.lower() for c in rec.cuisines}:
                        served = True
        if not served:
            flag(f"cuisine-{cuisine.lower()}",
                 [SlotId(day, kind) for day in range(1, days + 1) for kind in MEALS])

    # room rules, room type, gates (only emitted when the instance has them)
    have = {c.id for c in inst.constraints}
    for day in range(1, days + 1):
        s = a.get(day, SlotKind.ACCOMMODATION)
        if not isinstance(s, StayChoice):
            continue
        rec = _lookup_stay(d, s)
        if rec is None:
            continue
        slot = [SlotId(day, SlotKind.ACCOMMODATION)]
        for allowance in q.prefs.room_rules:
            if f"no-{allowance}" in rec.house_rules:
                flag(f"room-rule-{allowance}", slot)
        if q.prefs.room_type == "not-shared-room":
            if rec.room_type == "shared-room":
                flag("room-type", slot)
        elif q.prefs.room_type is not None and rec.room_type != q.prefs.room_type:
            flag("room-type", slot)
        if "stay-min-nights-gate" in have and rec.min_nights > nights_available:
            flag("stay-min-nights-gate", slot)
        if "stay-occupancy-gate" in have and rec.max_occupancy < 1:
            flag("stay-occupancy-gate", slot)

    # transport preference
    if q.prefs.transport is not None:
        for day in range(1, days + 1):
            t = a.get(day, SlotKind.TRANSPORTATION)
            if not _transport_pref_ok(t, q.prefs.transport):
                flag("transport-pref", [SlotId(day, SlotKind.TRANSPORTATION)])

    return {cid: frozenset(slots) for cid, slots in out.items()}


# ---------------------------------------------------------------------------
# Full-space brute force

def canonical_space(inst: CspInstance, cities: list[str]) -> tuple[list[SlotId], list[list]]:
    """Slot list and per-slot candidate pools of the canonical shape for one
    visit order: required slots draw from their pools, optional slots also
    admit the empty marker."""
    q, d = inst.query, inst.domains
    moves = list(range(1, q.days + 1, 2))
    chain = [q.origin] + cities + [q.origin]
    slots: list[SlotId] = []
    pools: list[list] = []
    for i, day in enumerate(moves):
        frm, to = chain[i], chain[i + 1]
        date = q.dates[day - 1]
        pool = [FlightLeg(f.number, f.origin, f.dest, f.dep_time, f.arr_time)
                for f in d.flight_pool(frm, to, date)]
        for mode in ("self-driving", "taxi"):
            pool += [GroundLeg(g.mode, g.origin, g.dest)
                     for g in d.ground_pool(frm, to, mode)]
        slots.append(SlotId(day, SlotKind.TRANSPORTATION))
        pools.append(pool)
    stay_city = {}
    for i, day in enumerate(moves[:-1]):
        for night in range(day, moves[i + 1]):
            stay_city[night] = chain[i + 1]
    for day in range(1, q.days):
        pool = [StayChoice(s.name, s.city) for s in d.stay_pool(stay_city[day])]
        slots.append(SlotId(day, SlotKind.ACCOMMODATION))
        pools.append(pool)
    for day in range(1, q.days + 1):
        if day in moves:
            continue
        city = stay_city.get(day, cities[-1] if cities else q.destination)
        meals = [MealChoice(r.name, r.city) for r in d.restaurant_pool(city)]
        for kind in MEALS:
            slots.append(SlotId(day, kind))
            pools.append(list(meals))
        attrs = [(AttractionChoice(x.name, x.city),) for x in d.attraction_pool(city)]
        slots.append(SlotId(day, SlotKind.ATTRACTION))
        pools.append(attrs)
    return slots, pools


def space_size(inst: CspInstance, cities: list[str]) -> int:
    _, pools = canonical_space(inst, cities)
    n = 1
    for pool in pools:
        n *= max(len(pool), 1)
    return n


def _base_assignment(inst: CspInstance, cities: list[str]) -> dict:
    q = inst.query
    moves = list(range(1, q.days + 1, 2))
    chain = [q.origin] + cities + [q.origin]
    values = {}
    for day in range(1, q.days + 1):
        if day in moves:
            i = moves.index(day)
            values[SlotId(day, SlotKind.CURRENT_CITY)] = f"from {chain[i]} to {chain[i + 1]}"
            values[SlotId(day, SlotKind.ATTRACTION)] = EMPTY
            for kind in MEALS:
                values[SlotId(day, kind)] = EMPTY
        else:
            i = max(j for j, m in enumerate(moves) if m < day)
            values[SlotId(day, SlotKind.CURRENT_CITY)] = chain[i + 1]
            values[SlotId(day, SlotKind.TRANSPORTATION)] = EMPTY
    values[SlotId(q.days, SlotKind.ACCOMMODATION)] = EMPTY
    return values


def brute_force_feasible(inst: CspInstance, max_combos: int = 2_000_000):
    """Exhaustively enumerate the canonical space over every admissible visit
    order; return a feasible assignment or None."""
    q, d = inst.query, inst.domains
    if q.destination_is_state:
        pool = d.city_pool(q.destination)
        orders = [list(p) for p in
                  itertools.permutations(pool, q.visiting_city_count)]
    else:
        orders = [[q.destination]]
    for cities in orders:
        slots, pools = canonical_space(inst, cities)
        if any(not p for p in pools):
            continue
        total = 1
        for pool in pools:
            total *= len(pool)
        if total > max_combos:
            raise ValueError(f"assignment space {total} too large to enumerate")
        base = _base_assignment(inst, cities)
        for combo in itertools.product(*pools):
            values = dict(base)
            values.update(zip(slots, combo))
            a = Assignment(values)
            if not oracle_violations(inst, a):
                return a
    return None


# ---------------------------------------------------------------------------
# Certificate re-validation

def oracle_route_context(inst: CspInstance, a: Assignment | None) -> list[str]:
    q = inst.query
    visited = []
    if a is not None:
        for day in range(1, q.days + 1, 2):
            mv = _move(_label(a, day))
            if mv and day < q.days:
                visited.append(mv[1])
    if len(visited) == q.visiting_city_count:
        return visited
    if not q.destination_is_state:
        return [q.destination]
    return inst.domains.city_pool(q.destination)[: q.visiting_city_count]


def validate_certificate(inst: CspInstance, a: Assignment, cert) -> bool:
    """Re-check a domain-based certificate against the pools it cites."""
    q, d = inst.query, inst.domains
    ctx = cert.context_dict()
    gap = ctx.get("gap")
    nights_available = 2 if q.visiting_city_count > 1 else q.days - 1
    if cert.kind == CertKind.REPEATED_FAILURE:
        return True  # history-based, validated by the flow tests
    if gap == "leg":
        if cert.constraint_id == "no-conflicting-transport":
            # Re-check exhaustiveness: no all-air/taxi covering and no
            # all-self-driving covering of the route legs.
            legs = []
            cities = oracle_route_context(inst, a)
            chain = [q.origin] + cities + [q.origin]
            for i, day in enumerate(range(1, q.days + 1, 2)):
                if i + 1 < len(chain):
                    legs.append((chain[i], chain[i + 1], q.dates[day - 1]))

            def cands(o, t, dt):
                pool = [f for f in d.flight_pool(o, t, dt)
                        if _transport_pref_ok(
                            FlightLeg(f.number, f.origin, f.dest, f.dep_time, f.arr_time),
                            q.prefs.transport)]
                ground = []
                for mode in ("self-driving", "taxi"):
                    ground += [g for g in d.ground_pool(o, t, mode)
                               if _transport_pref_ok(GroundLeg(g.mode, g.origin, g.dest),
                                                     q.prefs.transport)]
                return pool, ground

            all_air = all(
                bool(cands(o, t, dt)[0]) or
                any(g.mode == "taxi" for g in cands(o, t, dt)[1])
                for o, t, dt in legs)
            all_drive = all(
                any(g.mode == "self-driving" for g in cands(o, t, dt)[1])
                for o, t, dt in legs)
            return not (all_air or all_drive)
        origin, dest, date = ctx["origin"], ctx["dest"], ctx["date"]
        raw = (d.flight_pool(origin, dest, date)
               + d.ground_pool(origin, dest, "self-driving")
               + d.ground_pool(origin, dest, "taxi"))
        if cert.kind == CertKind.EMPTY_DOMAIN:
            return not raw
        filtered = [r for r in raw if _transport_pref_ok(
            FlightLeg(r.number, r.origin, r.dest, r.dep_time, r.arr_time)
            if hasattr(r, "number") else GroundLeg(r.mode, r.origin, r.dest),
            q.prefs.transport)]
        return bool(raw) and not filtered
    if gap == "stay":
        city = ctx.get("city")
        pool = d.stay_pool(city) if city else []
        if cert.kind == CertKind.EMPTY_DOMAIN:
            return not pool
        return bool(pool) and not any(_stay_ok(s, q, nights_available) for s in pool)
    if gap == "restaurants":
        cities = [c for c in ctx.get("cities", "").split(",") if c]
        pools = [r for c in cities for r in d.restaurant_pool(c)]
        if cert.kind == CertKind.EMPTY_DOMAIN:
            return not pools
        distinct = {(r.name, r.city.lower()) for r in pools}
        moves = set(range(1, q.days + 1, 2))
        need = 3 * sum(1 for day in range(1, q.days + 1) if day not in moves)
        return len(distinct) < need
    if gap == "cuisine":
        cities = [c for c in ctx.get("cities", "").split(",") if c]
        pools = [r for c in cities for r in d.restaurant_pool(c)]
        if cert.kind == CertKind.EMPTY_DOMAIN:
            return not pools
        wanted = ctx["cuisine"].lower()
        return bool(pools) and not any(
            wanted in {c.lower() for c in r.cuisines} for r in pools)
    if gap == "attractions":
        return not d.attraction_pool(ctx["city"])
    if gap == "budget":
        cities = oracle_route_context(inst, a)
        try:
            slots_pools = canonical_space(inst, cities)
        except Exception:
            return True
        slots, pools = slots_pools
        total = 1
        for pool in pools:
            total *= max(len(pool), 1)
        if total > 10_000:
            return True  # beyond the oracle's enumeration cap
        base = _base_assignment(inst, cities)
        best = None
        viable_pools = []
        for slot, pool in zip(slots, pools):
            if slot.kind == SlotKind.ACCOMMODATION:
                pool = [p for p in pool
                        if _stay_ok(_lookup_stay(d, p), q, nights_available)]
            if slot.kind == SlotKind.TRANSPORTATION:
                pool = [p for p in pool if _transport_pref_ok(p, q.prefs.transport)]
            viable_pools.append(pool if pool else [EMPTY])
        for combo in itertools.product(*viable_pools):
            values = dict(base)
            values.update(zip(slots, combo))
            cost = oracle_cost(Assignment(values), inst)
            best = cost if best is None else min(best, cost)
        return best is None or best > q.budget
    if gap == "state":
        pool = d.city_pool(ctx["state"])
        return len(pool) < q.visiting_city_count
    return False
