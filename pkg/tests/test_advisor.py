import pytest

from triplan.advisor import Exhausted, NoGapFound, advise, diagnose
from triplan.checker import check
from triplan.constraints import build_constraints
from triplan.csp import CspInstance, Preferences, StructuredQuery, variable_set
from triplan.domains import extract_domains
from triplan.planner import plan
from triplan.sandbox import Notebook, directive, execute_tool
from triplan.search import directive_key

from .generators import instance_for, sandbox_from_records


def limited_baltimore_instance(baltimore_sb, baltimore_q):
    """Knowledge state mirroring the opening search of the worked example:
    driving out, stays, food, attractions; no return transport."""
    nb = Notebook()
    executed = set()
    for d in (directive("DistanceMatrix", "Pittsburgh", "Baltimore", "self-driving"),
              directive("DistanceMatrix", "Pittsburgh", "Baltimore", "taxi"),
              directive("DistanceMatrix", "Baltimore", "Pittsburgh", "self-driving"),
              directive("DistanceMatrix", "Baltimore", "Pittsburgh", "taxi"),
              directive("AccommodationSearch", "Baltimore"),
              directive("RestaurantSearch", "Baltimore"),
              directive("AttractionSearch", "Baltimore")):
        nb.record(d.render(), execute_tool(baltimore_sb, d))
        executed.add(directive_key(d))
    domains = extract_domains(nb)
    inst = CspInstance(variable_set(baltimore_q), domains,
                       build_constraints(baltimore_q, domains), baltimore_q)
    return inst, executed


def failing_history(inst):
    result = plan(inst, [])
    verdict, feedback = check(inst, result.assignment, [])
    assert verdict.value == "unsat"
    return [(result.assignment, feedback)]


def test_diagnose_missing_return_leg(baltimore_sb, baltimore_q):
    inst, _ = limited_baltimore_instance(baltimore_sb, baltimore_q)
    hist = failing_history(inst)
    diags = diagnose(inst, hist)
    assert [d.kind for d in diags] == ["missing-leg"]
    ctx = diags[0].context_dict()
    assert (ctx["origin"], ctx["dest"], ctx["date"]) == \
        ("Baltimore", "Pittsburgh", "2022-03-06")


def test_advise_exact_flight_directives(baltimore_sb, baltimore_q):
    inst, executed = limited_baltimore_instance(baltimore_sb, baltimore_q)
    hist = failing_history(inst)
    feedback = advise(inst, hist, executed)
    assert list(feedback.directives) == [
        directive("FlightSearch", "Pittsburgh", "Baltimore", "2022-03-04"),
        directive("FlightSearch", "Baltimore", "Pittsburgh", "2022-03-06"),
    ]
    assert feedback.render_lines()[0] == "Suggested actions:"


def test_advise_dedup_exhausted(baltimore_sb, baltimore_q):
    inst, executed = limited_baltimore_instance(baltimore_sb, baltimore_q)
    hist = failing_history(inst)
    executed = set(executed)
    executed.add(directive_key(directive("FlightSearch", "Pittsburgh", "Baltimore",
                                         "2022-03-04")))
    executed.add(directive_key(directive("FlightSearch", "Baltimore", "Pittsburgh",
                                         "2022-03-06")))
    with pytest.raises(Exhausted):
        advise(inst, hist, executed)


def test_no_gap_on_empty_history(baltimore_sb, baltimore_q):
    inst, _ = limited_baltimore_instance(baltimore_sb, baltimore_q)
    with pytest.raises(NoGapFound):
        diagnose(inst, [])


def test_no_gap_on_repeated_failure_only(myrtle_sb, myrtle_q):
    from triplan.csp import SlotId, SlotKind, StayChoice

    from .test_csp import golden_assignment

    inst = instance_for(myrtle_sb, myrtle_q)
    bad = golden_assignment().replace({
        SlotId(1, SlotKind.ACCOMMODATION): StayChoice("Phantom Lodge", "Myrtle Beach"),
        SlotId(2, SlotKind.ACCOMMODATION): StayChoice("Phantom Lodge", "Myrtle Beach"),
    })
    hist = []
    for _ in range(3):
        verdict, feedback = check(inst, bad, hist)
        hist.append((bad, feedback))
    assert verdict.value == "unsat"
    with pytest.raises(NoGapFound):
        diagnose(inst, hist)


def test_alternate_city_remedy_orders_by_known_viable_stays():
    from triplan.sandbox import (
        AttractionRec,
        GroundRouteRec,
        RestaurantRec,
        StayRec,
    )

    cities = {"N": ["Avon"], "S": ["Bryce", "Calder", "Drift"]}
    dates = tuple(f"2022-03-{d:02d}" for d in range(10, 15))
    grounds = []
    for a in ("Avon", "Bryce", "Calder", "Drift"):
        for b in ("Avon", "Bryce", "Calder", "Drift"):
            if a != b:
                grounds.append(GroundRouteRec(a, b, "self-driving", 100, 100, 20))
    # Bryce stays all prohibit pets; Calder unexplored; Drift has one viable stay.
    sb = sandbox_from_records(
        cities,
        stays=[StayRec("No Pets Inn", 50, "entire-room", frozenset({"no-pets"}),
                       1, 2, 4.0, "Bryce"),
               StayRec("Open Door", 66, "entire-room", frozenset(), 1, 2, 4.0, "Drift"),
               StayRec("Calder Rest", 61, "entire-room", frozenset(), 1, 2, 4.0,
                       "Calder")],
        restaurants=[RestaurantRec(f"Cafe {c}{i}", 15, frozenset({"American"}),
                                   4.0, c)
                     for c in ("Bryce", "Calder", "Drift") for i in range(4)],
        attractions=[AttractionRec(f"Sight {c}", "1 Main St", "(555) 555-0102",
                                   "https://example.org", c)
                     for c in ("Bryce", "Calder", "Drift")],
        grounds=grounds,
    )
    q = StructuredQuery(origin="Avon", destination="S", visiting_city_count=2,
                        dates=dates, days=5, people=1, budget=4000.0,
                        prefs=Preferences(room_rules=frozenset({"pets"})))
    # Session knowledge: city list, Bryce and Drift searched; Calder unknown.
    nb = Notebook()
    executed = set()
    for d in [directive("CitySearch", "S")] + [
            x for c in ("Bryce", "Drift") for x in (
                directive("AccommodationSearch", c),
                directive("RestaurantSearch", c),
                directive("AttractionSearch", c))] + [
            directive("DistanceMatrix", "Avon", "Bryce", "self-driving"),
            directive("DistanceMatrix", "Bryce", "Drift", "self-driving"),
            directive("DistanceMatrix", "Drift", "Avon", "self-driving")]:
        nb.record(d.render(), execute_tool(sb, d))
        executed.add(directive_key(d))
    domains = extract_domains(nb)
    inst = CspInstance(variable_set(q), domains, build_constraints(q, domains), q)
    result = plan(inst, [])
    verdict, feedback = check(inst, result.assignment, [])
    assert verdict.value == "unsat"
    fb = advise(inst, [(result.assignment, feedback)], executed)
    acc_targets = [d.args[0] for d in fb.directives if d.tool == "AccommodationSearch"]
    assert "Calder" in acc_targets
