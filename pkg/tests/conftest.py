from __future__ import annotations

from fractions import Fraction

import pytest

from skyline_search.instance import (
    Additive,
    CostGrid,
    Edge,
    Instance,
)
from skyline_search.instance_io import load_instance


@pytest.fixture
def example() -> Instance:
    return load_instance("running_example")


def grid(*levels) -> CostGrid:
    values = tuple(Fraction(x) for x in levels)
    return CostGrid(values, values[-1])


def line_instance(weights=(1, 1), length_grid=(0, 1, 2), targets=(2,), **overrides) -> Instance:
    """Three nodes in a row with one additive dimension; handy for hand-made cases."""
    fields = dict(
        node_names=("u", "v", "w"),
        attribute_names=("x",),
        context_names=("⊥", "x"),
        context_transition=((1,), (1,)),
        edges=tuple(Edge(i, i, i + 1, 0, (Fraction(w),)) for i, w in enumerate(weights)),
        dimension_names=("len",),
        rules=(Additive(),),
        grids=(grid(*length_grid),),
        source=0,
        targets=frozenset(targets),
        progressive=((0, Fraction(1)),),
    )
    fields.update(overrides)
    return Instance(**fields)



def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, whatever the verbosity."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and report.when == "call":
                name = nodeid.split("::")[-1].removeprefix("test_criterion_")
                number, _, label = name.partition("_")
                lines.append((int(number), f"criterion {number}: {outcome.upper():<6} {label.replace('_', ' ')}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
