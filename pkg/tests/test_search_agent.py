import pytest

from triplan.csp import StructuredQuery
from triplan.sandbox import Notebook, directive
from triplan.search import (
    SearchFeedback,
    ToolBudget,
    ToolBudgetExceeded,
    initial_directives,
    run_search,
    script_for_route,
)


def state_query():
    return StructuredQuery(
        origin="Kona", destination="California", visiting_city_count=3,
        dates=tuple(f"2022-03-{d:02d}" for d in range(7, 14)), days=7,
        people=1, budget=5800.0,
    )


def test_initial_directives_city_query(myrtle_q):
    ds = initial_directives(myrtle_q)
    assert directive("FlightSearch", "Washington", "Myrtle Beach", "2022-03-13") in ds
    assert directive("FlightSearch", "Myrtle Beach", "Washington", "2022-03-15") in ds
    assert sum(1 for d in ds if d.tool == "AccommodationSearch") == 1
    for mode in ("self-driving", "taxi"):
        assert directive("DistanceMatrix", "Washington", "Myrtle Beach", mode) in ds
        assert directive("DistanceMatrix", "Myrtle Beach", "Washington", mode) in ds
    # transport block precedes stay, food, attraction blocks
    tools = [d.tool for d in ds]
    assert tools.index("AccommodationSearch") < tools.index("RestaurantSearch") \
        < tools.index("AttractionSearch")


def test_initial_directives_state_query_starts_with_city_search():
    ds = initial_directives(state_query())
    assert ds[0] == directive("CitySearch", "California")


def test_script_covers_all_legs_5day():
    q = StructuredQuery(origin="A", destination="Somestate", visiting_city_count=2,
                        dates=tuple(f"2022-03-{d:02d}" for d in range(1, 6)),
                        days=5, people=2, budget=900.0)
    ds = script_for_route(q, ["B", "C"])
    legs = [(d.args[0], d.args[1]) for d in ds if d.tool == "FlightSearch"]
    assert legs == [("A", "B"), ("B", "C"), ("C", "A")]


def test_run_search_records_and_extracts(baltimore_sb, baltimore_q):
    nb = Notebook()
    fb = SearchFeedback((
        directive("FlightSearch", "Pittsburgh", "Baltimore", "2022-03-04"),
        directive("FlightSearch", "Baltimore", "Pittsburgh", "2022-03-06"),
    ))
    d = run_search(baltimore_sb, nb, baltimore_q, fb)
    assert len(nb) == 2
    assert [f.number for f in d.flight_pool("Baltimore", "Pittsburgh", "2022-03-06")] \
        == ["F3994096"]
    assert nb.entries[0].short_description == \
        "Flights from Pittsburgh to Baltimore on 2022-03-04"


def test_run_search_idempotent_over_identical_notebook(baltimore_sb, baltimore_q):
    nb = Notebook()
    d1 = run_search(baltimore_sb, nb, baltimore_q)
    entries_before = len(nb)
    from triplan.domains import extract_domains

    d2 = extract_domains(nb)
    assert d1 == d2
    assert len(nb) == entries_before


def test_tool_budget_partial_progress(baltimore_sb, baltimore_q):
    nb = Notebook()
    budget = ToolBudget(limit=120)
    budget.used = 118
    fb = SearchFeedback(tuple(
        directive("RestaurantSearch", "Baltimore") for _ in range(5)))
    with pytest.raises(ToolBudgetExceeded):
        run_search(baltimore_sb, nb, baltimore_q, fb, budget=budget)
    assert len(nb) == 2
    assert budget.used == 120


def test_empty_result_recorded_as_observation(baltimore_sb, baltimore_q):
    nb = Notebook()
    fb = SearchFeedback((directive("DistanceMatrix", "Baltimore", "Pittsburgh",
                                   "self-driving"),))
    run_search(baltimore_sb, nb, baltimore_q, fb)
    assert len(nb) == 1
    assert nb.entries[0].observation.rows == ()
