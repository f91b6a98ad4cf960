"""Closed-world travel data store and the six query tools that read it.

All external information enters the system through this module: a Sandbox is
loaded once from a directory of delimited files and is immutable afterwards,
and every tool call is answered verbatim from its tables.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

HOUSE_RULES = frozenset(
    {"no-parties", "no-smoking", "no-children-under-10", "no-pets", "no-visitors"}
)
ROOM_TYPES = frozenset({"entire-room", "private-room", "shared-room", "not-shared-room"})
GROUND_MODES = ("self-driving", "taxi")

# tool name -> number of positional arguments
TOOL_ARITY = {
    "FlightSearch": 3,
    "AccommodationSearch": 1,
    "RestaurantSearch": 1,
    "AttractionSearch": 1,
    "DistanceMatrix": 3,
    "CitySearch": 1,
}

_TIME_RE = re.compile(r"^\d{2}:\d{2}$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class SandboxError(Exception):
    """Base class for dataset and tool errors."""


class MissingFile(SandboxError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"dataset file missing: {name}")


class SchemaError(SandboxError):
    """A malformed row; carries the exact file/row/column position."""

    def __init__(self, file: str, row: int, column: str, reason: str = ""):
        self.file = file
        self.row = row
        self.column = column
        self.reason = reason
        msg = f"{file}, row {row}, column {column!r}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class UnknownTool(SandboxError):
    def __init__(self, tool: str):
        self.tool = tool
        super().__init__(f"unknown tool: {tool}")


class ArityError(SandboxError):
    def __init__(self, tool: str, got: int, want: int):
        self.tool = tool
        super().__init__(f"{tool} takes {want} argument(s), got {got}")


@dataclass(frozen=True)
class FlightRec:
    number: str
    price: float
    dep_time: str
    arr_time: str
    date: str
    origin: str
    dest: str


@dataclass(frozen=True)
class StayRec:
    name: str
    price: float
    room_type: str
    house_rules: frozenset[str]
    min_nights: int
    max_occupancy: int
    rating: float
    city: str


@dataclass(frozen=True)
class RestaurantRec:
    name: str
    avg_cost: float
    cuisines: frozenset[str]
    rating: float
    city: str


@dataclass(frozen=True)
class AttractionRec:
    name: str
    address: str
    phone: str
    website: str
    city: str


@dataclass(frozen=True)
class GroundRouteRec:
    origin: str
    dest: str
    mode: str
    duration: int
    distance: float
    cost: float


@dataclass(frozen=True)
class CityRec:
    state: str
    city: str


Record = Union[FlightRec, StayRec, RestaurantRec, AttractionRec, GroundRouteRec, CityRec]


@dataclass(frozen=True)
class Observation:
    """One tool result: a category tag plus the matching records, in load order.

    An empty ``rows`` tuple is a first-class result, not an error; downstream
    reasoning needs to see absences.
    """

    kind: str
    rows: tuple[Record, ...]


@dataclass(frozen=True)
class ToolDirective:
    """A single tool invocation: name plus positional text arguments."""

    tool: str
    args: tuple[str, ...]

    def render(self) -> str:
        return f"{self.tool}[{', '.join(self.args)}]"


def directive(tool: str, *args: str) -> ToolDirective:
    return ToolDirective(tool, tuple(args))


@dataclass(frozen=True)
class NotebookEntry:
    index: int
    short_description: str
    observation: Observation


class Notebook:
    """Append-only store of tool observations.

    Entries are never mutated or removed, so the observation set within a
    session only grows; indices are dense from 0.
    """

    def __init__(self) -> None:
        self._entries: list[NotebookEntry] = []

    @property
    def entries(self) -> tuple[NotebookEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def record(self, short_description: str, observation: Observation) -> int:
        index = len(self._entries)
        self._entries.append(NotebookEntry(index, short_description, observation))
        return index


def notebook_record(nb: Notebook, description: str, obs: Observation) -> int:
    """Append an observation; duplicates are appended anyway (dedup is the
    domain extractor's job). Returns the new entry's index."""
    return nb.record(description, obs)


@dataclass
class Sandbox:
    """Immutable-after-load closed world; safe to share across sessions."""

    flights: tuple[FlightRec, ...]
    stays: tuple[StayRec, ...]
    restaurants: tuple[RestaurantRec, ...]
    attractions: tuple[AttractionRec, ...]
    ground_routes: tuple[GroundRouteRec, ...]
    cities_by_state: dict[str, tuple[str, ...]]
    _city_records: tuple[CityRec, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self._city_records:
            recs = tuple(
                CityRec(state, city)
                for state, cities in self.cities_by_state.items()
                for city in cities
            )
            object.__setattr__(self, "_city_records", recs)

    def known_cities(self) -> set[str]:
        return {c.city.lower() for c in self._city_records}

    def cities_in_state(self, state: str) -> tuple[CityRec, ...]:
        want = state.lower()
        return tuple(c for c in self._city_records if c.state.lower() == want)


# ---------------------------------------------------------------------------
# Dataset loading

_FILES = {
    "flights": ("number", "price", "dep_time", "arr_time", "date", "origin", "dest"),
    "accommodations": (
        "name",
        "price",
        "room_type",
        "house_rules",
        "min_nights",
        "max_occupancy",
        "rating",
        "city",
    ),
    "restaurants": ("name", "avg_cost", "cuisines", "rating", "city"),
    "attractions": ("name", "address", "phone", "website", "city"),
    "ground_routes": ("origin", "dest", "mode", "duration_min", "distance_km", "cost"),
    "cities": ("state", "city"),
}


def _read_rows(root: Path, stem: str) -> list[tuple[int, dict[str, str]]]:
    path = root / f"{stem}.csv"
    if not path.is_file():
        raise MissingFile(stem)
    columns = _FILES[stem]
    rows: list[tuple[int, dict[str, str]]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{stem}.csv", 0, columns[0], "empty file")
        if tuple(h.strip() for h in header) != columns:
            raise SchemaError(f"{stem}.csv", 0, columns[0], f"bad header {header!r}")
        for lineno, raw in enumerate(reader, start=1):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(columns):
                raise SchemaError(f"{stem}.csv", lineno, columns[min(len(raw), len(columns) - 1)],
                                  f"expected {len(columns)} fields, got {len(raw)}")
            rows.append((lineno, dict(zip(columns, (cell.strip() for cell in raw)))))
    return rows


def _number(stem: str, row: int, col: str, text: str, *, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise SchemaError(f"{stem}.csv", row, col, f"not a number: {text!r}")


def _require(cond: bool, stem: str, row: int, col: str, reason: str) -> None:
    if not cond:
        raise SchemaError(f"{stem}.csv", row, col, reason)


def load_dataset(root_path: str | Path) -> Sandbox:
    """Load and fully index the six dataset files under one root.

    Malformed rows are rejected with their exact position, never silently
    dropped. Record order follows file order, which fixes tool-result order.
    """
    root = Path(root_path)
    for stem in ("flights", "accommodations", "restaurants", "attractions",
                 "ground_routes", "cities"):
        if not (root / f"{stem}.csv").is_file():
            raise MissingFile(stem)

    city_rows = _read_rows(root, "cities")
    cities_by_state: dict[str, list[str]] = {}
    city_records = []
    for lineno, row in city_rows:
        _require(bool(row["state"]), "cities", lineno, "state", "empty state")
        _require(bool(row["city"]), "cities", lineno, "city", "empty city")
        cities_by_state.setdefault(row["state"], []).append(row["city"])
        city_records.append(CityRec(row["state"], row["city"]))
    known = {c.city.lower() for c in city_records}

    def check_city(stem: str, lineno: int, name: str) -> None:
        _require(name.lower() in known, stem, lineno, "city", f"unknown city {name!r}")

    flights = []
    for lineno, row in _read_rows(root, "flights"):
        price = _number("flights", lineno, "price", row["price"])
        _require(price > 0, "flights", lineno, "price", "price must be > 0")
        for col in ("dep_time", "arr_time"):
            _require(bool(_TIME_RE.match(row[col])), "flights", lineno, col,
                     f"not HH:MM: {row[col]!r}")
        _require(bool(_DATE_RE.match(row["date"])), "flights", lineno, "date",
                 f"not YYYY-MM-DD: {row['date']!r}")
        _require(row["origin"].lower() != row["dest"].lower(), "flights", lineno, "dest",
                 "origin equals destination")
        _require(row["dep_time"] < row["arr_time"], "flights", lineno, "arr_time",
                 "arrival must follow same-day departure")
        check_city("flights", lineno, row["origin"])
        check_city("flights", lineno, row["dest"])
        flights.append(
            FlightRec(row["number"], price, row["dep_time"], row["arr_time"],
                      row["date"], row["origin"], row["dest"])
        )

    stays = []
    for lineno, row in _read_rows(root, "accommodations"):
        price = _number("accommodations", lineno, "price", row["price"])
        _require(row["room_type"] in ROOM_TYPES, "accommodations", lineno, "room_type",
                 f"unknown room type {row['room_type']!r}")
        rules = frozenset(r for r in row["house_rules"].split("&") if r)
        bad = rules - HOUSE_RULES
        _require(not bad, "accommodations", lineno, "house_rules",
                 f"unknown rules {sorted(bad)}")
        min_nights = _number("accommodations", lineno, "min_nights", row["min_nights"], kind=int)
        occupancy = _number("accommodations", lineno, "max_occupancy", row["max_occupancy"], kind=int)
        _require(min_nights >= 1, "accommodations", lineno, "min_nights", "must be >= 1")
        _require(occupancy >= 1, "accommodations", lineno, "max_occupancy", "must be >= 1")
        rating = _number("accommodations", lineno, "rating", row["rating"])
        _require(0 <= rating <= 5, "accommodations", lineno, "rating", "must be in 0..5")
        check_city("accommodations", lineno, row["city"])
        stays.append(StayRec(row["name"], price, row["room_type"], rules,
                             min_nights, occupancy, rating, row["city"]))

    restaurants = []
    for lineno, row in _read_rows(root, "restaurants"):
        avg_cost = _number("restaurants", lineno, "avg_cost", row["avg_cost"])
        _require(avg_cost > 0, "restaurants", lineno, "avg_cost", "must be > 0")
        rating = _number("restaurants", lineno, "rating", row["rating"])
        _require(0 <= rating <= 5, "restaurants", lineno, "rating", "must be in 0..5")
        check_city("restaurants", lineno, row["city"])
        cuisines = frozenset(c.strip() for c in row["cuisines"].split(",") if c.strip())
        restaurants.append(RestaurantRec(row["name"], avg_cost, cuisines, rating, row["city"]))

    attractions = []
    seen_attr: set[tuple[str, str]] = set()
    for lineno, row in _read_rows(root, "attractions"):
        check_city("attractions", lineno, row["city"])
        key = (row["name"], row["city"])
        _require(key not in seen_attr, "attractions", lineno, "name",
                 f"duplicate attraction {key}")
        seen_attr.add(key)
        attractions.append(AttractionRec(row["name"], row["address"], row["phone"],
                                         row["website"], row["city"]))

    routes = []
    for lineno, row in _read_rows(root, "ground_routes"):
        _require(row["mode"] in GROUND_MODES, "ground_routes", lineno, "mode",
                 f"unknown mode {row['mode']!r}")
        duration = _number("ground_routes", lineno, "duration_min", row["duration_min"], kind=int)
        distance = _number("ground_routes", lineno, "distance_km", row["distance_km"])
        cost = _number("ground_routes", lineno, "cost", row["cost"])
        _require(duration > 0, "ground_routes", lineno, "duration_min", "must be > 0")
        _require(cost >= 0, "ground_routes", lineno, "cost", "must be >= 0")
        check_city("ground_routes", lineno, row["origin"])
        check_city("ground_routes", lineno, row["dest"])
        routes.append(GroundRouteRec(row["origin"], row["dest"], row["mode"],
                                     duration, distance, cost))

    return Sandbox(
        flights=tuple(flights),
        stays=tuple(stays),
        restaurants=tuple(restaurants),
        attractions=tuple(attractions),
        ground_routes=tuple(routes),
        cities_by_state={s: tuple(cs) for s, cs in cities_by_state.items()},
        _city_records=tuple(city_records),
    )


# ---------------------------------------------------------------------------
# Tool execution

def validate_directive(d: ToolDirective) -> None:
    if d.tool not in TOOL_ARITY:
        raise UnknownTool(d.tool)
    want = TOOL_ARITY[d.tool]
    if len(d.args) != want:
        raise ArityError(d.tool, len(d.args), want)


def execute_tool(sb: Sandbox, d: ToolDirective) -> Observation:
    """Answer one directive from the sandbox tables.

    City and state names are matched case-insensitively but records are
    returned verbatim. A query that matches nothing yields an explicit empty
    observation.
    """
    validate_directive(d)
    if d.tool == "FlightSearch":
        origin, dest, date = (a.lower() for a in d.args)
        rows = tuple(
            f for f in sb.flights
            if f.origin.lower() == origin and f.dest.lower() == dest and f.date.lower() == date
        )
        return Observation("flights", rows)
    if d.tool == "AccommodationSearch":
        city = d.args[0].lower()
        return Observation("stays", tuple(s for s in sb.stays if s.city.lower() == city))
    if d.tool == "RestaurantSearch":
        city = d.args[0].lower()
        return Observation("restaurants",
                           tuple(r for r in sb.restaurants if r.city.lower() == city))
    if d.tool == "AttractionSearch":
        city = d.args[0].lower()
        return Observation("attractions",
                           tuple(a for a in sb.attractions if a.city.lower() == city))
    if d.tool == "DistanceMatrix":
        origin, dest, mode = (a.lower() for a in d.args)
        rows = tuple(
            g for g in sb.ground_routes
            if g.origin.lower() == origin and g.dest.lower() == dest and g.mode.lower() == mode
        )
        return Observation("ground_routes", rows)
    # CitySearch
    return Observation("cities", sb.cities_in_state(d.args[0]))
