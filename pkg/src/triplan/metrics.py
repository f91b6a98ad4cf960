"""Benchmark metrics over a batch of delivered plans.

Scoring evaluates each plan against the authoritative instance built from
the full sandbox. All rates use total queries as the denominator; an
undelivered (or unparseable) plan counts as failing every constraint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .checker import evaluate
from .csp import CspInstance, PlanRecord, parse_plan

CATEGORIES = ("commonsense", "hard")


class EmptyBatch(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintOutcome:
    delivered: bool
    results: tuple[tuple[str, str, bool], ...]  # (constraint id, category, passed)

    def passed_all(self, category: str | None = None) -> bool:
        if not self.delivered:
            return False
        return all(ok for _, cat, ok in self.results
                   if category is None or cat == category)


@dataclass(frozen=True)
class MetricsReport:
    delivery: float
    micro: dict[str, float]
    macro: dict[str, float]
    final: float

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("Delivery", self.delivery),
            ("Commonsense Micro", self.micro["commonsense"]),
            ("Commonsense Macro", self.macro["commonsense"]),
            ("Hard Micro", self.micro["hard"]),
            ("Hard Macro", self.macro["hard"]),
            ("Final", self.final),
        ]


def score_plan(plan: PlanRecord, ground: CspInstance) -> ConstraintOutcome:
    """Evaluate one plan against the authoritative instance.

    Parse failures mean the plan was not delivered, which fails everything.
    """
    constraints = list(ground.constraints)
    try:
        assignment = parse_plan(plan)
        if assignment.days() != ground.query.days:
            raise ValueError(f"expected {ground.query.days} days")
        missing = assignment.missing_slots(ground.slots)
        if missing:
            raise ValueError(f"missing slots {missing[:3]}")
    except Exception:
        return ConstraintOutcome(
            delivered=False,
            results=tuple((c.id, c.category, False) for c in constraints),
        )
    violated = {v.constraint_id for v in evaluate(ground, assignment)}
    return ConstraintOutcome(
        delivered=True,
        results=tuple((c.id, c.category, c.id not in violated) for c in constraints),
    )


def aggregate(outcomes: Iterable[ConstraintOutcome]) -> MetricsReport:
    batch = list(outcomes)
    if not batch:
        raise EmptyBatch("no outcomes to aggregate")
    total = len(batch)
    delivery = 100.0 * sum(1 for o in batch if o.delivered) / total
    micro: dict[str, float] = {}
    macro: dict[str, float] = {}
    for cat in CATEGORIES:
        passed = sum(1 for o in batch for _, c, ok in o.results if c == cat and ok)
        considered = sum(1 for o in batch for _, c, _ in o.results if c == cat)
        micro[cat] = 100.0 * passed / considered if considered else 100.0
        macro[cat] = 100.0 * sum(1 for o in batch if o.passed_all(cat)) / total
    final = 100.0 * sum(1 for o in batch if o.passed_all()) / total
    return MetricsReport(delivery, micro, macro, final)


def failure_breakdown(outcomes: Iterable[ConstraintOutcome]) -> dict[str, int]:
    """Per constraint id, the number of plans violating it."""
    counts: dict[str, int] = {}
    for o in outcomes:
        if not o.delivered:
            continue
        for cid, _, ok in o.results:
            if not ok:
                counts[cid] = counts.get(cid, 0) + 1
    return counts


def render_report(report: MetricsReport) -> str:
    header = " | ".join(name for name, _ in report.rows())
    values = " | ".join(f"{value:.2f}" for _, value in report.rows())
    return f"{header}\n{values}"
