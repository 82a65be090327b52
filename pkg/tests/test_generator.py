from __future__ import annotations

import pytest

from skyline_search.generator import GenParams, generate_random_instance
from skyline_search.instance import AttributeSwitch, ExplicitTable, max_step_count, validate_instance
from skyline_search.oracle import enumerate_feasible


@pytest.mark.parametrize("seed", range(20))
def test_generated_instances_are_valid_and_feasible(seed):
    inst = generate_random_instance(seed)
    assert validate_instance(inst).ok
    assert enumerate_feasible(inst).feasible_paths
    assert len(inst.node_names) <= 12 and inst.dims <= 4


def test_same_seed_same_instance():
    assert generate_random_instance(7) == generate_random_instance(7)
    assert generate_random_instance(7) != generate_random_instance(8)


def test_rule_mix():
    inst = generate_random_instance(3, GenParams(dims=4, table_dimension=True))
    assert isinstance(inst.rules[1], ExplicitTable)
    assert isinstance(inst.rules[3], AttributeSwitch)
    assert validate_instance(inst).ok


def test_single_dimension():
    inst = generate_random_instance(0, GenParams(dims=1, attribute_switch=True))
    assert inst.dims == 1 and max_step_count(inst) >= 1


@pytest.mark.parametrize(
    "kwargs", [dict(nodes=1), dict(nodes=13), dict(dims=5), dict(grid_size=2), dict(attributes=4)]
)
def test_params_out_of_range(kwargs):
    with pytest.raises(ValueError):
        GenParams(**kwargs)


def test_gives_up_when_nothing_is_feasible():
    with pytest.raises(RuntimeError):
        generate_random_instance(0, GenParams(nodes=5, edge_probability=0.0, max_tries=3))


@pytest.mark.parametrize("seed", range(1, 101))
def test_progressive_weights_are_positive_integers(seed):
    inst = generate_random_instance(seed)
    (dim, delta), = inst.progressive
    assert delta.denominator == 1 and delta >= 1
    assert all(e.weights[dim].denominator == 1 and e.weights[dim] >= 1 for e in inst.edges)
