"""Dataset fixtures for the golden end-to-end scenarios, plus builders for
small synthetic instances used by the oracle suites."""

from __future__ import annotations

import csv
from pathlib import Path

from triplan.csp import Preferences, StructuredQuery

HEADERS = {
    "flights": ["number", "price", "dep_time", "arr_time", "date", "origin", "dest"],
    "accommodations": ["name", "price", "room_type", "house_rules", "min_nights",
                       "max_occupancy", "rating", "city"],
    "restaurants": ["name", "avg_cost", "cuisines", "rating", "city"],
    "attractions": ["name", "address", "phone", "website", "city"],
    "ground_routes": ["origin", "dest", "mode", "duration_min", "distance_km", "cost"],
    "cities": ["state", "city"],
}


def write_dataset(root: Path, tables: dict[str, list[list]]) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    for name, header in HEADERS.items():
        with (root / f"{name}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(tables.get(name, []))
    return root


def _attr(name: str, city: str) -> list:
    return [name, f"1 Main St, {city}", "(555) 555-0100",
            f"https://example.org/{name.lower().replace(' ', '-')}", city]


def myrtle_dataset(root: Path) -> Path:
    """Washington -> Myrtle Beach, 3 days: a fully solvable one-city trip."""
    mb = "Myrtle Beach"
    return write_dataset(root, {
        "cities": [["Washington State", "Washington"], ["South Carolina", mb]],
        "flights": [
            ["F3792603", 130, "07:55", "10:10", "2022-03-13", "Washington", mb],
            ["F3927581", 120, "11:03", "13:31", "2022-03-13", "Washington", mb],
            ["F3791200", 96, "11:36", "13:06", "2022-03-15", mb, "Washington"],
            ["F3926434", 140, "15:40", "17:15", "2022-03-15", mb, "Washington"],
        ],
        "accommodations": [
            ["Yellow submarine", 150, "entire-room", "", 2, 2, 4.5, mb],
            ["Surfside Mansion", 90, "entire-room", "no-parties", 4, 4, 4.0, mb],
        ],
        "restaurants": [
            ["First Eat", 25, "American, Fast Food", 4.1, mb],
            ["Catfish Charlie's", 40, "American, Seafood", 4.4, mb],
            ["d' Curry House", 30, "Indian", 4.0, mb],
            ["La Pino'z Pizza", 28, "Italian, Pizza", 3.9, mb],
            ["Nizam's Kathi Kabab", 35, "Indian, BBQ", 4.2, mb],
            ["Turning Point Fast Food", 20, "American, Fast Food", 3.7, mb],
        ],
        "attractions": [
            _attr("Myrtle Beach Boardwalk and Promenade", mb),
            _attr("Ripley's Aquarium of Myrtle Beach", mb),
            _attr("SkyWheel Myrtle Beach", mb),
            _attr("Myrtle Beach State Park", mb),
        ],
    })


def myrtle_query() -> StructuredQuery:
    return StructuredQuery(
        origin="Washington", destination="Myrtle Beach", visiting_city_count=1,
        dates=("2022-03-13", "2022-03-14", "2022-03-15"), days=3, people=1,
        budget=1400.0,
    )


def baltimore_dataset(root: Path) -> Path:
    """Pittsburgh -> Baltimore, 3 days: the return leg has no ground route,
    so plans can only close the loop once flights are discovered."""
    b = "Baltimore"
    return write_dataset(root, {
        "cities": [["Pennsylvania", "Pittsburgh"], ["Maryland", b]],
        "flights": [
            ["F3969954", 40, "16:51", "17:49", "2022-03-04", "Pittsburgh", b],
            ["F3994096", 45, "21:45", "22:44", "2022-03-06", b, "Pittsburgh"],
        ],
        "ground_routes": [
            ["Pittsburgh", b, "self-driving", 238, 400, 20],
        ],
        "accommodations": [
            ["Contemporary Home Away from Home", 80, "entire-room", "", 2, 2, 4.0, b],
            ["Harbor Bunk", 45, "shared-room", "no-pets", 1, 1, 3.1, b],
        ],
        "restaurants": [
            ["Mr. Dunderbak's Biergarten and Marketplatz", 35, "American", 4.2, b],
            ["Amalfi", 30, "Italian", 4.0, b],
            ["Los Pablos", 25, "Mexican", 3.8, b],
            ["Farzi Cafe", 40, "Indian", 4.3, b],
            ["28 Capri Italy", 28, "Italian", 3.9, b],
            ["Tresind - Nassima Royal Hotel", 50, "Indian", 4.5, b],
            ["The Manhattan Fish Market", 45, "Seafood", 4.1, b],
            ["The Thai Bowl", 22, "Thai", 3.6, b],
            ["Salt", 38, "American", 4.0, b],
            ["RollsKing", 20, "Fast Food", 3.5, b],
            ["Tibb's Frankie", 18, "Fast Food", 3.4, b],
        ],
        "attractions": [
            _attr("Inner Harbor", b),
            _attr("National Aquarium", b),
            _attr("Fort McHenry National Monument and Historic Shrine", b),
            _attr("The Walters Art Museum", b),
        ],
    })


def baltimore_query() -> StructuredQuery:
    return StructuredQuery(
        origin="Pittsburgh", destination="Baltimore", visiting_city_count=1,
        dates=("2022-03-04", "2022-03-05", "2022-03-06"), days=3, people=1,
        budget=1200.0,
    )


def hilton_head_dataset(root: Path) -> Path:
    """Charlotte -> Hilton Head, 3 days, group of 5 with cuisine preferences;
    self-driving exists outbound only."""
    hh = "Hilton Head"
    c = "Charlotte"
    return write_dataset(root, {
        "cities": [["North Carolina", c], ["South Carolina", hh]],
        "flights": [
            ["F4055090", 92, "18:07", "19:27", "2022-03-26", c, hh],
            ["F4059890", 95, "13:01", "14:22", "2022-03-26", c, hh],
            ["F4056985", 46, "20:07", "21:31", "2022-03-28", hh, c],
            ["F4059921", 45, "14:52", "16:04", "2022-03-28", hh, c],
        ],
        "ground_routes": [
            [c, hh, "self-driving", 229, 398, 19],
        ],
        "accommodations": [
            ["Williamsburg Home Away From Home!", 164, "entire-room", "no-pets",
             4, 3, 3.0, hh],
            ["COZY Room @Williamsburg (10 mins to Manhattan)", 605, "private-room",
             "no-visitors", 2, 1, 4.0, hh],
            ["Hip, Vibrant, COLORFUL Downtown Manhattan 1 Bed", 180, "entire-room",
             "", 2, 2, 4.2, hh],
        ],
        "restaurants": [
            ["Taste Of China", 91, "Tea, Seafood, Bakery, Fast Food", 4.0, hh],
            ["K Raga's", 71, "Tea, BBQ, Mediterranean, Desserts", 2.9, hh],
            ["New Town Pastry Shop - Park Plaza", 51, "Tea, Cafe, Pizza, BBQ", 3.2, hh],
            ["Wrapster", 45, "Italian, Fast Food", 3.8, hh],
            ["Dhaba Ambarsariya", 55, "Italian", 4.1, hh],
            ["Cafe Coffee Day", 30, "French, Cafe", 3.5, hh],
            ["Mr. Brown", 48, "French", 4.0, hh],
            ["Sikkim Fast Food", 25, "Italian, Fast Food", 3.3, hh],
            ["Connoisseur", 60, "French", 4.4, hh],
            ["MR.D - Deliciousness Delivered", 35, "Italian", 3.7, hh],
        ],
        "attractions": [
            _attr("Coastal Discovery Museum", hh),
            _attr("Harbour Town Lighthouse", hh),
            _attr("Coligny Beach Park", hh),
            _attr("Sea Pines Forest Preserve", hh),
        ],
    })


def hilton_head_query() -> StructuredQuery:
    return StructuredQuery(
        origin="Charlotte", destination="Hilton Head", visiting_city_count=1,
        dates=("2022-03-26", "2022-03-27", "2022-03-28"), days=3, people=5,
        budget=7000.0, prefs=Preferences(cuisines=frozenset({"Italian", "French"})),
    )
