"""Structured candidate pools distilled from notebook observations.

Extraction is a pure function of the notebook: identical records across
entries are deduplicated keeping the earliest provenance, and because the
notebook is append-only the pools only ever grow within a session.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TypeVar

from .sandbox import (
    AttractionRec,
    CityRec,
    FlightRec,
    GroundRouteRec,
    Notebook,
    RestaurantRec,
    Sandbox,
    StayRec,
)

R = TypeVar("R")

FlightKey = tuple[str, str, str]  # (origin, dest, date), lowercased
GroundKey = tuple[str, str, str]  # (origin, dest, mode), lowercased


@dataclass(frozen=True)
class Candidate:
    """A pool entry plus the notebook index it was first observed at."""

    record: object
    provenance: int


@dataclass
class DomainSet:
    """Per-category candidate pools keyed by city or leg."""

    flights: dict[FlightKey, list[Candidate]] = field(default_factory=dict)
    ground: dict[GroundKey, list[Candidate]] = field(default_factory=dict)
    stays: dict[str, list[Candidate]] = field(default_factory=dict)
    restaurants: dict[str, list[Candidate]] = field(default_factory=dict)
    attractions: dict[str, list[Candidate]] = field(default_factory=dict)
    cities: dict[str, list[Candidate]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not any(
            (self.flights, self.ground, self.stays, self.restaurants,
             self.attractions, self.cities)
        )

    def flight_pool(self, origin: str, dest: str, date: str) -> list[FlightRec]:
        key = (origin.lower(), dest.lower(), date.lower())
        return [c.record for c in self.flights.get(key, [])]

    def ground_pool(self, origin: str, dest: str, mode: str) -> list[GroundRouteRec]:
        key = (origin.lower(), dest.lower(), mode.lower())
        return [c.record for c in self.ground.get(key, [])]

    def stay_pool(self, city: str) -> list[StayRec]:
        return [c.record for c in self.stays.get(city.lower(), [])]

    def restaurant_pool(self, city: str) -> list[RestaurantRec]:
        return [c.record for c in self.restaurants.get(city.lower(), [])]

    def attraction_pool(self, city: str) -> list[AttractionRec]:
        return [c.record for c in self.attractions.get(city.lower(), [])]

    def city_pool(self, state: str) -> list[str]:
        return [c.record.city for c in self.cities.get(state.lower(), [])]

    def find_flight(self, origin: str, dest: str, date: str, number: str) -> FlightRec | None:
        for f in self.flight_pool(origin, dest, date):
            if f.number == number:
                return f
        return None

    def find_ground(self, origin: str, dest: str, mode: str) -> GroundRouteRec | None:
        pool = self.ground_pool(origin, dest, mode)
        return pool[0] if pool else None

    def find_stay(self, name: str, city: str) -> StayRec | None:
        for s in self.stay_pool(city):
            if s.name == name:
                return s
        return None

    def find_restaurant(self, name: str, city: str) -> RestaurantRec | None:
        for r in self.restaurant_pool(city):
            if r.name == name:
                return r
        return None

    def find_attraction(self, name: str, city: str) -> AttractionRec | None:
        for a in self.attraction_pool(city):
            if a.name == name:
                return a
        return None

    def all_records(self) -> set:
        out: set = set()
        for pools in (self.flights, self.ground, self.stays,
                      self.restaurants, self.attractions, self.cities):
            for cands in pools.values():
                out.update(c.record for c in cands)
        return out

    def extends(self, earlier: "DomainSet") -> bool:
        """True when every candidate of ``earlier`` is still present here."""
        for attr in ("flights", "ground", "stays", "restaurants", "attractions", "cities"):
            old: dict = getattr(earlier, attr)
            new: dict = getattr(self, attr)
            for key, cands in old.items():
                have = {c.record for c in new.get(key, [])}
                if any(c.record not in have for c in cands):
                    return False
        return True


def _add(pool: dict, key, record, provenance: int, seen: set) -> None:
    if record in seen:
        return
    seen.add(record)
    pool.setdefault(key, []).append(Candidate(record, provenance))


def extract_domains(nb: Notebook) -> DomainSet:
    """Build candidate pools from the full notebook, earliest provenance wins."""
    d = DomainSet()
    seen: set = set()
    for entry in nb.entries:
        idx = entry.index
        for rec in entry.observation.rows:
            if isinstance(rec, FlightRec):
                key = (rec.origin.lower(), rec.dest.lower(), rec.date.lower())
                _add(d.flights, key, rec, idx, seen)
            elif isinstance(rec, GroundRouteRec):
                key = (rec.origin.lower(), rec.dest.lower(), rec.mode.lower())
                _add(d.ground, key, rec, idx, seen)
            elif isinstance(rec, StayRec):
                _add(d.stays, rec.city.lower(), rec, idx, seen)
            elif isinstance(rec, RestaurantRec):
                _add(d.restaurants, rec.city.lower(), rec, idx, seen)
            elif isinstance(rec, AttractionRec):
                _add(d.attractions, rec.city.lower(), rec, idx, seen)
            elif isinstance(rec, CityRec):
                _add(d.cities, rec.state.lower(), rec, idx, seen)
    return d


def domains_from_sandbox(sb: Sandbox) -> DomainSet:
    """Authoritative pools over the whole sandbox (used by the evaluator)."""
    from .sandbox import Observation

    nb = Notebook()
    nb.record("all flights", Observation("flights", sb.flights))
    nb.record("all ground routes", Observation("ground_routes", sb.ground_routes))
    nb.record("all stays", Observation("stays", sb.stays))
    nb.record("all restaurants", Observation("restaurants", sb.restaurants))
    nb.record("all attractions", Observation("attractions", sb.attractions))
    nb.record("all cities", Observation("cities", sb._city_records))
    return extract_domains(nb)
