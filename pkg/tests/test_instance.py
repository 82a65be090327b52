from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import grid, line_instance
from skyline_search.instance import (
    Advanced,
    Additive,
    AttributeSwitch,
    ContractError,
    Edge,
    ExplicitTable,
    InstanceError,
    Pruned,
    Signature,
    delta_min_vector,
    format_rational,
    max_step_count,
    replay,
    step,
    validate_instance,
)


def test_running_example_shape(example):
    assert example.node_names == ("s", "a", "b", "t")
    assert len(example.edges) == 5
    assert [len(g) for g in example.grids] == [3, 5, 2]
    assert example.budget == (2, 4, 1)
    assert example.context_names == ("⊥", "Z1", "Z2")
    assert validate_instance(example).ok


def test_step_additive_and_switch(example):
    s, a, b, t = range(4)
    out = step(example, Signature(s, 0), (0, 0, 0), example.edges[0])
    assert out == Advanced(Signature(a, 1), (1, 2, 0))
    # a -> b changes zone: the switch penalty applies
    out = step(example, out.sig, out.cost, example.edges[2])
    assert out == Advanced(Signature(b, 2), (1, 3, 1))


def test_no_switch_penalty_from_initial_context(example):
    out = step(example, Signature(0, 0), (0, 0, 0), example.edges[3])
    assert out.cost[2] == 0


def test_budget_prunes(example):
    # length 4 then one more metre overshoots
    out = step(example, Signature(1, 1), (1, 4, 0), example.edges[2])
    assert out == Pruned("budget-exceeded")


def test_step_rejects_foreign_edge(example):
    with pytest.raises(ContractError):
        step(example, Signature(2, 0), (0, 0, 0), example.edges[0])


def test_replay_paths(example):
    assert replay(example, (0, 1)) == Advanced(Signature(3, 1), (2, 4, 0))
    assert replay(example, (3, 4)) == Advanced(Signature(3, 2), (1, 2, 0))
    assert replay(example, (0, 2, 4)) == Advanced(Signature(3, 2), (1, 4, 1))
    assert replay(example, ()) == Advanced(Signature(0, 0), (0, 0, 0))


def test_delta_min_and_step_cap(example):
    assert delta_min_vector(example) == (0, 1, 0)
    assert max_step_count(example) == 4


def test_off_grid_transition_is_an_error():
    inst = line_instance(weights=(Fraction(1, 2), 1))
    report = validate_instance(inst)
    assert any("leaves the grid" in e for e in report.errors)


def test_grid_without_zero_rejected():
    inst = line_instance(grids=(grid(1, 2),))
    assert any("does not contain 0" in e for e in validate_instance(inst).errors)


def test_grid_must_end_at_budget():
    inst = line_instance(grids=(replace(grid(0, 1, 2), budget=Fraction(3)),))
    assert any("does not end at its budget" in e for e in validate_instance(inst).errors)


def test_negative_weight_rejected():
    inst = line_instance(weights=(1, -1))
    assert any("negative weight" in e for e in validate_instance(inst).errors)


def test_zero_increment_on_progressive_dimension():
    inst = line_instance(weights=(1, 0))
    report = validate_instance(inst)
    assert any("progress violated" in e for e in report.errors)


def test_declared_delta_smaller_than_actual_warns():
    inst = line_instance(weights=(2, 2), length_grid=(0, 1, 2, 3, 4))
    report = validate_instance(inst)
    assert report.ok
    assert report.computed_delta_min == {0: 2}
    assert report.warnings


def test_declared_delta_must_be_positive():
    inst = line_instance(progressive=((0, Fraction(0)),))
    assert not validate_instance(inst).ok


def test_no_progressive_dimension():
    inst = line_instance(progressive=())
    assert any("no progressive" in e for e in validate_instance(inst).errors)


def _table_instance(entries):
    base = line_instance()
    return replace(
        base,
        dimension_names=("len", "risk"),
        rules=(Additive(), ExplicitTable(tuple(entries))),
        grids=(grid(0, 1, 2), grid(0, 1, 2)),
        edges=tuple(replace(e, weights=e.weights + (Fraction(0),)) for e in base.edges),
    )


def _full_table(fn):
    return [(c, e, g, fn(c, e, g)) for c in range(2) for e in range(2) for g in range(3)]


def test_table_rule_valid_and_used():
    inst = _table_instance(_full_table(lambda c, e, g: min(2, g + 1)))
    assert validate_instance(inst).ok
    assert replay(inst, (0, 1)).cost == (2, 2)


def test_table_must_be_total():
    entries = _full_table(lambda c, e, g: g)[1:]
    assert any("missing" in e for e in validate_instance(_table_instance(entries)).errors)


def test_table_must_not_decrease():
    entries = _full_table(lambda c, e, g: 0)
    errors = validate_instance(_table_instance(entries)).errors
    assert any("level decreases" in e for e in errors)


def test_table_must_be_monotone():
    # 0 -> 2, 1 -> 1: non-decreasing per level but not monotone in the level
    entries = _full_table(lambda c, e, g: {0: 2, 1: 1, 2: 2}[g])
    errors = validate_instance(_table_instance(entries)).errors
    assert any("not monotone" in e for e in errors)


def test_switch_penalty_negative():
    base = line_instance()
    inst = replace(
        base,
        dimension_names=("len", "sw"),
        rules=(Additive(), AttributeSwitch(Fraction(-1))),
        grids=(grid(0, 1, 2), grid(0, 1)),
        edges=tuple(replace(e, weights=e.weights + (Fraction(0),)) for e in base.edges),
    )
    assert any("negative switch" in e for e in validate_instance(inst).errors)


def test_structural_errors_raise():
    with pytest.raises(InstanceError):
        line_instance(source=7)
    with pytest.raises(InstanceError):
        line_instance(edges=(Edge(1, 0, 1, 0, (Fraction(1),)),))


def test_source_target_warns():
    report = validate_instance(line_instance(targets=(0, 2)))
    assert report.ok and report.warnings


def test_delta_min_vector_rejects_overclaim():
    inst = line_instance(progressive=((0, Fraction(2)),))
    with pytest.raises(InstanceError):
        delta_min_vector(inst)


@pytest.mark.parametrize(
    "value, text",
    [(Fraction(3), "3"), (Fraction(1, 2), "0.5"), (Fraction(-5, 4), "-1.25"),
     (Fraction(1, 3), "1/3"), (Fraction(1, 20), "0.05"), (Fraction(0), "0")],
)
def test_format_rational(value, text):
    assert format_rational(value) == text
    assert Fraction(text) == value
