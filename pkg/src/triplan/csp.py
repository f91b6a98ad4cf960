"""CSP vocabulary: queries, slots, assignments, and the day-by-day plan format.

A plan serializes to one JSON object per day whose key order and value
grammar are fixed; ``parse_plan`` inverts ``serialize_plan`` exactly on its
image so recorded plans can be replayed bit-for-bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .domains import DomainSet

EMPTY = "-"

VALID_DAYS = (3, 5, 7)
CITIES_FOR_DAYS = {3: 1, 5: 2, 7: 3}

TRANSPORT_PREFS = ("no-flights", "no-self-driving", "must-self-drive")

# Room-type tokens tolerated (and dropped) when they appear inside an
# accommodation string, e.g. "Name, Entire house, City".
_ROOM_TYPE_TOKENS = {
    "entire home/apt", "entire house", "entire room", "entire-room",
    "private room", "private-room", "shared room", "shared-room",
    "not shared room", "not-shared-room",
}

_FLIGHT_RE = re.compile(
    r"^Flight Number: (?P<number>[^,]+), from (?P<origin>.+?) to (?P<dest>.+?), "
    r"Departure Time: (?P<dep>\d{2}:\d{2}), Arrival Time: (?P<arr>\d{2}:\d{2})$"
)
_GROUND_RE = re.compile(r"^(?P<mode>[^,]+), from (?P<origin>.+?) to (?P<dest>.+?)$")
_MOVE_RE = re.compile(r"^from (?P<origin>.+?) to (?P<dest>.+?)$")


class InvalidQuery(ValueError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class IncompleteAssignment(ValueError):
    def __init__(self, missing: list["SlotId"]):
        self.missing = missing
        super().__init__(f"assignment missing {len(missing)} slot(s): {missing[:4]}")


class FormatError(ValueError):
    def __init__(self, day: int, field_name: str, reason: str = ""):
        self.day = day
        self.field = field_name
        msg = f"day {day}, field {field_name!r}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


@dataclass(frozen=True)
class Preferences:
    cuisines: frozenset[str] = frozenset()
    room_rules: frozenset[str] = frozenset()
    room_type: Optional[str] = None
    transport: Optional[str] = None


@dataclass(frozen=True)
class StructuredQuery:
    origin: str
    destination: str
    visiting_city_count: int
    dates: tuple[str, ...]
    days: int
    people: int
    budget: float
    prefs: Preferences = Preferences()

    def __post_init__(self) -> None:
        if self.days not in VALID_DAYS:
            raise InvalidQuery(f"days must be one of {VALID_DAYS}, got {self.days}")
        if self.visiting_city_count != CITIES_FOR_DAYS[self.days]:
            raise InvalidQuery(
                f"{self.days}-day trips visit {CITIES_FOR_DAYS[self.days]} city(ies), "
                f"got {self.visiting_city_count}"
            )
        if len(self.dates) != self.days:
            raise InvalidQuery(f"need {self.days} dates, got {len(self.dates)}")
        if self.people < 1:
            raise InvalidQuery("people must be >= 1")
        if self.budget <= 0:
            raise InvalidQuery("budget must be positive")
        if self.prefs.transport is not None and self.prefs.transport not in TRANSPORT_PREFS:
            raise InvalidQuery(f"unknown transport preference {self.prefs.transport!r}")

    @property
    def destination_is_state(self) -> bool:
        # Multi-city trips name a state; single-city trips name the city itself.
        return self.visiting_city_count > 1


def query_from_dict(data: dict) -> StructuredQuery:
    try:
        prefs_raw = data.get("prefs", {}) or {}
        prefs = Preferences(
            cuisines=frozenset(prefs_raw.get("cuisines", ())),
            room_rules=frozenset(prefs_raw.get("room_rules", ())),
            room_type=prefs_raw.get("room_type"),
            transport=prefs_raw.get("transport"),
        )
        return StructuredQuery(
            origin=data["origin"],
            destination=data["destination"],
            visiting_city_count=int(data["visiting_city_count"]),
            dates=tuple(data["dates"]),
            days=int(data["days"]),
            people=int(data["people"]),
            budget=float(data["budget"]),
            prefs=prefs,
        )
    except KeyError as exc:
        raise InvalidQuery(f"missing query field {exc.args[0]!r}")


def query_to_dict(q: StructuredQuery) -> dict:
    return {
        "origin": q.origin,
        "destination": q.destination,
        "visiting_city_count": q.visiting_city_count,
        "dates": list(q.dates),
        "days": q.days,
        "people": q.people,
        "budget": q.budget,
        "prefs": {
            "cuisines": sorted(q.prefs.cuisines),
            "room_rules": sorted(q.prefs.room_rules),
            "room_type": q.prefs.room_type,
            "transport": q.prefs.transport,
        },
    }


class SlotKind(str, Enum):
    CURRENT_CITY = "current-city"
    TRANSPORTATION = "transportation"
    BREAKFAST = "breakfast"
    LUNCH = "lunch"
    DINNER = "dinner"
    ATTRACTION = "attraction"
    ACCOMMODATION = "accommodation"


KIND_ORDER = tuple(SlotKind)
MEAL_KINDS = (SlotKind.BREAKFAST, SlotKind.LUNCH, SlotKind.DINNER)


@dataclass(frozen=True, order=True)
class SlotId:
    day: int
    kind_index: int = field(compare=True)

    def __init__(self, day: int, kind: SlotKind):
        object.__setattr__(self, "day", day)
        object.__setattr__(self, "kind_index", KIND_ORDER.index(kind))

    @property
    def kind(self) -> SlotKind:
        return KIND_ORDER[self.kind_index]

    def __repr__(self) -> str:
        return f"Slot({self.day}, {self.kind.value})"


def variable_set(q: StructuredQuery) -> list[SlotId]:
    """All slots in canonical order: day-major, then kind order."""
    return [SlotId(day, kind) for day in range(1, q.days + 1) for kind in KIND_ORDER]


# ---------------------------------------------------------------------------
# Values

@dataclass(frozen=True)
class FlightLeg:
    number: str
    origin: str
    dest: str
    dep_time: str
    arr_time: str


@dataclass(frozen=True)
class GroundLeg:
    mode: str
    origin: str
    dest: str


@dataclass(frozen=True)
class MealChoice:
    name: str
    city: str


@dataclass(frozen=True)
class StayChoice:
    name: str
    city: str


@dataclass(frozen=True)
class AttractionChoice:
    name: str
    city: str


Value = Union[str, FlightLeg, GroundLeg, MealChoice, StayChoice,
              tuple[AttractionChoice, ...]]


class Assignment:
    """A complete mapping slot -> value; the empty marker is ``"-"``."""

    def __init__(self, values: dict[SlotId, Value]):
        self._values = dict(values)

    @property
    def values(self) -> dict[SlotId, Value]:
        return dict(self._values)

    def get(self, day: int, kind: SlotKind) -> Value:
        return self._values[SlotId(day, kind)]

    def __getitem__(self, slot: SlotId) -> Value:
        return self._values[slot]

    def __contains__(self, slot: SlotId) -> bool:
        return slot in self._values

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Assignment) and self._values == other._values

    def __hash__(self) -> int:
        return hash(frozenset(self._values.items()))

    def __repr__(self) -> str:
        days = max((s.day for s in self._values), default=0)
        return f"Assignment({days} days, {len(self._values)} slots)"

    def replace(self, updates: dict[SlotId, Value]) -> "Assignment":
        merged = dict(self._values)
        merged.update(updates)
        return Assignment(merged)

    def missing_slots(self, slots: list[SlotId]) -> list[SlotId]:
        return [s for s in slots if s not in self._values]

    def days(self) -> int:
        return max((s.day for s in self._values), default=0)


@dataclass
class CspInstance:
    slots: list[SlotId]
    domains: DomainSet
    constraints: "ConstraintSet"  # noqa: F821 - defined in constraints module
    query: StructuredQuery


# ---------------------------------------------------------------------------
# Route shape helpers

def change_days(days: int) -> list[int]:
    """Days on which the plan moves between cities (closed-loop shape)."""
    return list(range(1, days + 1, 2))


def full_days(days: int) -> list[int]:
    return [d for d in range(1, days + 1) if d not in set(change_days(days))]


def route_day_cities(q: StructuredQuery, cities: list[str]) -> dict[int, tuple[str, ...]]:
    """Map day -> cities occupied that day for a visit order ``cities``.

    Movement days carry (from, to) pairs; other days a single city.
    """
    if len(cities) != q.visiting_city_count:
        raise ValueError(f"route needs {q.visiting_city_count} cities, got {len(cities)}")
    chain = [q.origin] + list(cities) + [q.origin]
    out: dict[int, tuple[str, ...]] = {}
    moves = change_days(q.days)
    for day in range(1, q.days + 1):
        if day in moves:
            i = moves.index(day)
            out[day] = (chain[i], chain[i + 1])
        else:
            out[day] = (chain[moves.index(max(m for m in moves if m < day)) + 1],)
    return out


def route_legs(q: StructuredQuery, cities: list[str]) -> list[tuple[int, str, str, str]]:
    """(day, origin, dest, date) for each inter-city leg of a visit order."""
    day_cities = route_day_cities(q, cities)
    legs = []
    for day in change_days(q.days):
        a, b = day_cities[day]
        legs.append((day, a, b, q.dates[day - 1]))
    return legs


def city_label(day_cities: tuple[str, ...]) -> str:
    if len(day_cities) == 2:
        return f"from {day_cities[0]} to {day_cities[1]}"
    return day_cities[0]


def parse_city_label(label: str) -> tuple[str, ...]:
    m = _MOVE_RE.match(label)
    if m:
        return (m.group("origin"), m.group("dest"))
    return (label,)


def nights_by_day(days: int) -> dict[int, int]:
    """Day -> consecutive nights spent at that day's accommodation slot.

    Every non-final day books one night; the final day books none.
    """
    return {day: (1 if day < days else 0) for day in range(1, days + 1)}


# ---------------------------------------------------------------------------
# Serialization

PLAN_KEYS = ("day", "current_city", "transportation", "breakfast", "attraction",
             "lunch", "dinner", "accommodation")

PlanRecord = list[dict]


def _render_transport(value: Value, day: int) -> str:
    if value == EMPTY:
        return EMPTY
    if isinstance(value, FlightLeg):
        return (f"Flight Number: {value.number}, from {value.origin} to {value.dest}, "
                f"Departure Time: {value.dep_time}, Arrival Time: {value.arr_time}")
    if isinstance(value, GroundLeg):
        return f"{value.mode}, from {value.origin} to {value.dest}"
    raise FormatError(day, "transportation", f"cannot render {value!r}")


def _render_place(value: Value, day: int, field_name: str) -> str:
    if value == EMPTY:
        return EMPTY
    if isinstance(value, (MealChoice, StayChoice)):
        return f"{value.name}, {value.city}"
    raise FormatError(day, field_name, f"cannot render {value!r}")


def _render_attraction(value: Value, day: int) -> str:
    if value == EMPTY:
        return EMPTY
    if isinstance(value, tuple):
        if not value:
            return EMPTY
        return "".join(f"{a.name}, {a.city};" for a in value)
    raise FormatError(day, "attraction", f"cannot render {value!r}")


def serialize_plan(a: Assignment) -> PlanRecord:
    """Emit the per-day records in fixed key order."""
    n_days = a.days()
    slots = [SlotId(day, kind) for day in range(1, n_days + 1) for kind in KIND_ORDER]
    missing = a.missing_slots(slots)
    if missing:
        raise IncompleteAssignment(missing)
    records = []
    for day in range(1, n_days + 1):
        cc = a.get(day, SlotKind.CURRENT_CITY)
        records.append({
            "day": day,
            "current_city": cc if isinstance(cc, str) else city_label(cc),
            "transportation": _render_transport(a.get(day, SlotKind.TRANSPORTATION), day),
            "breakfast": _render_place(a.get(day, SlotKind.BREAKFAST), day, "breakfast"),
            "attraction": _render_attraction(a.get(day, SlotKind.ATTRACTION), day),
            "lunch": _render_place(a.get(day, SlotKind.LUNCH), day, "lunch"),
            "dinner": _render_place(a.get(day, SlotKind.DINNER), day, "dinner"),
            "accommodation": _render_place(a.get(day, SlotKind.ACCOMMODATION), day, "accommodation"),
        })
    return records


def _parse_transport(text: str, day: int) -> Value:
    if text == EMPTY:
        return EMPTY
    m = _FLIGHT_RE.match(text)
    if m:
        return FlightLeg(m.group("number").strip(), m.group("origin"), m.group("dest"),
                         m.group("dep"), m.group("arr"))
    m = _GROUND_RE.match(text)
    if m:
        mode = m.group("mode").strip()
        if mode not in ("self-driving", "taxi"):
            raise FormatError(day, "transportation", f"unknown mode {mode!r}")
        return GroundLeg(mode, m.group("origin"), m.group("dest"))
    raise FormatError(day, "transportation", f"unparseable {text!r}")


def _split_place(text: str, day: int, field_name: str) -> tuple[str, str]:
    if ", " not in text:
        raise FormatError(day, field_name, f"expected 'Name, City': {text!r}")
    name, city = text.rsplit(", ", 1)
    # Tolerate and drop a trailing room-type token: "Name, Entire house, City".
    if ", " in name:
        head, maybe_type = name.rsplit(", ", 1)
        if maybe_type.strip().lower() in _ROOM_TYPE_TOKENS:
            name = head
    return name, city


def _parse_attraction(text: str, day: int) -> Value:
    if text == EMPTY:
        return EMPTY
    picks = []
    for part in text.rstrip(".").split(";"):
        part = part.strip()
        if not part:
            continue
        name, city = _split_place(part, day, "attraction")
        picks.append(AttractionChoice(name, city))
    if not picks:
        raise FormatError(day, "attraction", f"no attractions in {text!r}")
    return tuple(picks)


def parse_plan(p: PlanRecord) -> Assignment:
    """Inverse of ``serialize_plan`` on its image.

    Purely syntactic: names that no candidate pool contains still parse,
    and are caught later by the sandbox-grounding check.
    """
    values: dict[SlotId, Value] = {}
    if not isinstance(p, list) or not p:
        raise FormatError(0, "day", "plan must be a non-empty list of day records")
    for i, rec in enumerate(p, start=1):
        if not isinstance(rec, dict):
            raise FormatError(i, "day", "day record must be an object")
        day = rec.get("day")
        if day != i:
            raise FormatError(i, "day", f"expected day {i}, got {day!r}")
        for key in PLAN_KEYS:
            if key not in rec:
                raise FormatError(i, key, "missing field")
        cc = rec["current_city"]
        if not isinstance(cc, str) or not cc or cc == EMPTY:
            raise FormatError(i, "current_city", f"bad label {cc!r}")
        values[SlotId(i, SlotKind.CURRENT_CITY)] = cc
        values[SlotId(i, SlotKind.TRANSPORTATION)] = _parse_transport(rec["transportation"], i)
        for kind, key in ((SlotKind.BREAKFAST, "breakfast"), (SlotKind.LUNCH, "lunch"),
                          (SlotKind.DINNER, "dinner")):
            text = rec[key]
            if text == EMPTY:
                values[SlotId(i, kind)] = EMPTY
            else:
                name, city = _split_place(text, i, key)
                values[SlotId(i, kind)] = MealChoice(name, city)
        values[SlotId(i, SlotKind.ATTRACTION)] = _parse_attraction(rec["attraction"], i)
        acc = rec["accommodation"]
        if acc == EMPTY:
            values[SlotId(i, SlotKind.ACCOMMODATION)] = EMPTY
        else:
            name, city = _split_place(acc, i, "accommodation")
            values[SlotId(i, SlotKind.ACCOMMODATION)] = StayChoice(name, city)
    return Assignment(values)
