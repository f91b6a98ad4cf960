"""Synthetic dataset generator: emits the six dataset files plus a manifest,
and can sample plausible queries against a generated sandbox.

Everything is driven by a seeded RNG so a (seed, cities) pair always yields
byte-identical output.
"""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

from .csp import CITIES_FOR_DAYS, Preferences, StructuredQuery
from .sandbox import Sandbox

_CITY_HEADS = ["Alder", "Birch", "Cedar", "Deer", "Elm", "Fern", "Glen",
               "Haven", "Iron", "Juniper", "Kest", "Lark", "Maple", "North",
               "Oak", "Pine"]
_CITY_TAILS = ["field", "ford", "haven", "port", "ridge", "ton", "vale", "wood"]
_STATES = ["Arvandia", "Brookland", "Corvana", "Drelmont", "Eastmere", "Farrow"]
_STAY_WORDS = ["Cozy", "Sunny", "Quiet", "Modern", "Rustic", "Grand", "Harbor",
               "Garden", "Downtown", "Lakeside"]
_STAY_NOUNS = ["Loft", "Studio", "House", "Suite", "Retreat", "Flat", "Bungalow",
               "Inn", "Perch", "Hideaway"]
_CUISINES = ["Chinese", "American", "Italian", "Mexican", "Indian",
             "Mediterranean", "French"]
_RULES = ["no-parties", "no-smoking", "no-children-under-10", "no-pets",
          "no-visitors"]
_ROOM_TYPES = ["entire-room", "private-room", "shared-room"]
_REST_WORDS = ["Golden", "Silver", "Blue", "Red", "Green", "Old", "New", "Royal"]
_REST_NOUNS = ["Spoon", "Table", "Kettle", "Garden", "Corner", "Grill", "Oven",
               "Lantern"]
_ATTR_NOUNS = ["Museum", "Park", "Gallery", "Tower", "Aquarium", "Garden",
               "Observatory", "Market"]

DATE_WINDOW = [f"2022-03-{d:02d}" for d in range(1, 29)]


def _city_names(rng: random.Random, n: int) -> list[str]:
    names = [h + t for h in _CITY_HEADS for t in _CITY_TAILS]
    rng.shuffle(names)
    return names[:n]


def _time_pair(rng: random.Random) -> tuple[str, str]:
    dep_h = rng.randint(5, 20)
    dep_m = rng.randrange(0, 60)
    dur = rng.randint(45, 170)
    total = dep_h * 60 + dep_m + dur
    arr_h, arr_m = min(total // 60, 23), total % 60
    return f"{dep_h:02d}:{dep_m:02d}", f"{arr_h:02d}:{arr_m:02d}"


def generate_dataset(seed: int, n_cities: int, out_dir: str | Path,
                     dates: list[str] | None = None) -> dict:
    """Write flights/accommodations/restaurants/attractions/ground_routes/
    cities CSVs under ``out_dir`` and return the manifest (also written as
    manifest.json)."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dates = dates or DATE_WINDOW
    cities = _city_names(rng, n_cities)
    states = {}
    per_state = max(3, (n_cities + len(_STATES) - 1) // len(_STATES))
    for i, city in enumerate(cities):
        states.setdefault(_STATES[i // per_state % len(_STATES)], []).append(city)

    rows: dict[str, list[list]] = {name: [] for name in
                                   ("flights", "accommodations", "restaurants",
                                    "attractions", "ground_routes", "cities")}
    for state, members in states.items():
        for city in members:
            rows["cities"].append([state, city])

    flight_no = 1000
    for a in cities:
        for b in cities:
            if a == b:
                continue
            for date in dates:
                for _ in range(rng.randint(0, 2)):
                    dep, arr = _time_pair(rng)
                    rows["flights"].append(
                        [f"F{flight_no}", rng.randint(40, 380), dep, arr, date, a, b])
                    flight_no += 1
            if rng.random() < 0.9:
                dist = rng.randint(60, 600)
                rows["ground_routes"].append(
                    [a, b, "self-driving", int(dist * 0.7), dist, rng.randint(5, 60)])
            if rng.random() < 0.8:
                dist = rng.randint(60, 600)
                rows["ground_routes"].append(
                    [a, b, "taxi", int(dist * 0.8), dist, rng.randint(30, 160)])

    for city in cities:
        for i in range(rng.randint(4, 8)):
            name = f"{rng.choice(_STAY_WORDS)} {rng.choice(_STAY_NOUNS)} {i + 1}"
            n_rules = rng.randint(0, 2)
            rules = "&".join(sorted(rng.sample(_RULES, n_rules)))
            rows["accommodations"].append(
                [name, rng.randint(40, 320), rng.choice(_ROOM_TYPES), rules,
                 rng.choice([1, 1, 1, 2, 2, 3]), rng.randint(1, 6),
                 round(rng.uniform(2.0, 5.0), 1), city])
        for i in range(rng.randint(6, 12)):
            name = f"{rng.choice(_REST_WORDS)} {rng.choice(_REST_NOUNS)} {i + 1}"
            cuisines = ", ".join(sorted(rng.sample(_CUISINES, rng.randint(1, 3))))
            rows["restaurants"].append(
                [name, rng.randint(10, 110), cuisines,
                 round(rng.uniform(2.0, 5.0), 1), city])
        for i in range(rng.randint(3, 7)):
            name = f"{city} {rng.choice(_ATTR_NOUNS)} {i + 1}"
            rows["attractions"].append(
                [name, f"{rng.randint(1, 999)} Main St, {city}",
                 f"({rng.randint(200, 989)}) 555-{rng.randint(1000, 9999)}",
                 f"https://example.org/{name.lower().replace(' ', '-')}", city])

    headers = {
        "flights": ["number", "price", "dep_time", "arr_time", "date", "origin", "dest"],
        "accommodations": ["name", "price", "room_type", "house_rules", "min_nights",
                           "max_occupancy", "rating", "city"],
        "restaurants": ["name", "avg_cost", "cuisines", "rating", "city"],
        "attractions": ["name", "address", "phone", "website", "city"],
        "ground_routes": ["origin", "dest", "mode", "duration_min", "distance_km", "cost"],
        "cities": ["state", "city"],
    }
    counts = {}
    for name, data in rows.items():
        with (out / f"{name}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(headers[name])
            writer.writerows(data)
        counts[name] = len(data)

    manifest = {"seed": seed, "cities": cities,
                "states": {s: list(ms) for s, ms in states.items()},
                "counts": counts}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return manifest


def generate_query(rng: random.Random, sb: Sandbox, days: int = 3,
                   budget_scale: float = 1.0) -> StructuredQuery:
    """Sample a query against a sandbox: real cities, dates with flight
    coverage, and a budget loose enough to usually be satisfiable."""
    k = CITIES_FOR_DAYS[days]
    states = [s for s, cs in sb.cities_by_state.items() if len(cs) >= k]
    all_cities = sorted({c for cs in sb.cities_by_state.values() for c in cs})
    origin = rng.choice(all_cities)
    if k == 1:
        dest_choices = [c for c in all_cities if c != origin]
        destination = rng.choice(dest_choices)
    else:
        if not states:  # undersized sandbox: largest state, query may be unsat
            states = [max(sb.cities_by_state, key=lambda s: len(sb.cities_by_state[s]))]
        destination = rng.choice(states)
        outside = [c for c in all_cities if c not in sb.cities_by_state[destination]]
        if outside:
            origin = rng.choice(outside)
    dates_with_flights = sorted({f.date for f in sb.flights}) or DATE_WINDOW
    start = rng.randrange(0, max(1, len(dates_with_flights) - days))
    dates = tuple(dates_with_flights[start:start + days])
    if len(dates) < days:
        dates = tuple(DATE_WINDOW[:days])
    people = rng.randint(1, 6)
    budget = round((600 + 420 * days) * people * budget_scale / 2, 0)
    prefs = Preferences()
    roll = rng.random()
    if roll < 0.3:
        prefs = Preferences(cuisines=frozenset(rng.sample(_CUISINES, rng.randint(1, 2))))
    elif roll < 0.5:
        prefs = Preferences(room_rules=frozenset({rng.choice(
            ["parties", "smoking", "children-under-10", "pets", "visitors"])}))
    elif roll < 0.6:
        prefs = Preferences(room_type=rng.choice(["entire-room", "private-room",
                                                  "not-shared-room"]))
    return StructuredQuery(
        origin=origin, destination=destination, visiting_city_count=k,
        dates=dates, days=days, people=people, budget=budget, prefs=prefs,
    )
