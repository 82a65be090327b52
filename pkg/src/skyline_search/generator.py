"""Seeded random instances for property sweeps."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import (
    INITIAL_CONTEXT,
    Additive,
    AttributeSwitch,
    CostGrid,
    CostRule,
    Edge,
    ExplicitTable,
    Instance,
    validate_instance,
)
from .oracle import enumerate_feasible

UNITS = (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(5, 2))


@dataclass(frozen=True)
class GenParams:
    nodes: int = 8
    dims: int = 3
    grid_size: int = 8
    attributes: int = 2
    edge_probability: float = 0.25
    attribute_switch: bool = True
    table_dimension: bool = False
    max_tries: int = 200

    def __post_init__(self) -> None:
        if not 2 <= self.nodes <= 12:
            raise ValueError("nodes must be in 2..12")
        if not 1 <= self.dims <= 4:
            raise ValueError("dims must be in 1..4")
        if not 3 <= self.grid_size <= 8:
            raise ValueError("grid_size must be in 3..8")
        if not 1 <= self.attributes <= 3:
            raise ValueError("attributes must be in 1..3")


def _grid(unit: Fraction, size: int) -> CostGrid:
    levels = tuple(unit * k for k in range(size))
    return CostGrid(levels, levels[-1])


def _attempt(rng: random.Random, p: GenParams) -> Instance:
    n = p.nodes
    attributes = tuple(f"z{i + 1}" for i in range(p.attributes))
    raw_edges = [
        (u, v, rng.randrange(p.attributes))
        for u in range(n)
        for v in range(n)
        if u != v and rng.random() < p.edge_probability
    ]
    targets = {n - 1}
    if n > 2 and rng.random() < 0.3:
        targets.add(rng.randrange(1, n - 1))

    kinds = ["progressive"] + ["additive"] * (p.dims - 1)
    if p.table_dimension and p.dims >= 2:
        kinds[1] = "table"
    if p.attribute_switch and p.dims >= 2 and kinds[-1] == "additive":
        kinds[-1] = "switch"

    grids: list[CostGrid] = []
    rules: list[CostRule] = []
    weights: list[list[Fraction]] = [[] for _ in raw_edges]
    progressive: tuple[tuple[int, Fraction], ...] = ()
    contexts = (INITIAL_CONTEXT,) + attributes
    for dim, kind in enumerate(kinds):
        # progressive weights stay integral
        unit = Fraction(1) if kind == "progressive" else rng.choice(UNITS)
        if kind == "switch":
            grids.append(_grid(unit, rng.randint(2, 3)))
            rules.append(AttributeSwitch(unit))
            for w in weights:
                w.append(Fraction(0))
            continue
        size = rng.randint(3, p.grid_size)
        grids.append(_grid(unit, size))
        if kind == "table":
            entries = []
            for ctx in range(len(contexts)):
                for eid in range(len(raw_edges)):
                    prev = 0
                    for g in range(size):
                        nxt = min(size - 1, max(g, prev) + rng.choice((0, 0, 1)))
                        entries.append((ctx, eid, g, nxt))
                        prev = nxt
            rules.append(ExplicitTable(tuple(entries)))
            for w in weights:
                w.append(Fraction(0))
            continue
        rules.append(Additive())
        low = 1 if kind == "progressive" else 0
        for w in weights:
            w.append(unit * rng.randint(low, 2))
        if kind == "progressive":
            smallest = min((w[dim] for w in weights), default=unit)
            progressive = ((dim, smallest),)

    edges = tuple(
        Edge(i, u, v, a, tuple(weights[i])) for i, (u, v, a) in enumerate(raw_edges)
    )
    return Instance(
        node_names=tuple(f"n{i}" for i in range(n)),
        attribute_names=attributes,
        context_names=contexts,
        context_transition=tuple(
            tuple(a + 1 for a in range(len(attributes))) for _ in contexts
        ),
        edges=edges,
        dimension_names=tuple(f"c{i + 1}" for i in range(p.dims)),
        rules=tuple(rules),
        grids=tuple(grids),
        source=0,
        targets=frozenset(targets),
        progressive=progressive,
    )


def generate_random_instance(seed: int, params: GenParams | None = None) -> Instance:
    """Deterministic-by-seed valid instance with at least one feasible path.

    Candidates are rejection-sampled until one validates and has a feasible
    path.
    """
    params = params or GenParams()
    rng = random.Random(seed)
    for _ in range(params.max_tries):
        inst = _attempt(rng, params)
        if not inst.edges or not validate_instance(inst).ok:
            continue
        if enumerate_feasible(inst).feasible_paths:
            return inst
    raise RuntimeError(f"no feasible instance after {params.max_tries} attempts (seed {seed})")
