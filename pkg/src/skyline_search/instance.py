"""Traversal instances and single-step cost dynamics.

A cost vector is stored as a tuple of grid indices, one per dimension. Grid
levels are exact :class:`fractions.Fraction` values, so every dominance test
reduces to integer comparisons on indices and no rounding can ever create or
hide a tie.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence, Union

INITIAL_CONTEXT = "⊥"
LAST_ATTRIBUTE = "last-attribute"

CostVector = tuple[int, ...]


class InstanceError(ValueError):
    """Raised for structurally malformed or invalid instances."""


class ContractError(RuntimeError):
    """Raised when a caller breaks an operation's precondition."""


class Signature(NamedTuple):
    node: int
    context: int


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    attribute: int
    weights: tuple[Fraction, ...]


@dataclass(frozen=True)
class CostGrid:
    levels: tuple[Fraction, ...]
    budget: Fraction

    @cached_property
    def index_of(self) -> dict[Fraction, int]:
        return {level: i for i, level in enumerate(self.levels)}

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Additive:
    """Next level is the current level plus the edge's weight in this dimension."""


@dataclass(frozen=True)
class AttributeSwitch:
    """Adds ``penalty`` when the edge attribute differs from the current context label.

    The initial context never pays the penalty.
    """

    penalty: Fraction


@dataclass(frozen=True)
class ExplicitTable:
    """Fully general transition: ``(context, edge id, level index) -> level index``."""

    entries: tuple[tuple[int, int, int, int], ...]

    @cached_property
    def lookup(self) -> dict[tuple[int, int, int], int]:
        return {(c, e, g): nxt for c, e, g, nxt in self.entries}


CostRule = Union[Additive, AttributeSwitch, ExplicitTable]


class Advanced(NamedTuple):
    sig: Signature
    cost: CostVector


class Pruned(NamedTuple):
    reason: str  # "budget-exceeded" | "off-grid"


StepOutcome = Union[Advanced, Pruned]

BUDGET_EXCEEDED = "budget-exceeded"
OFF_GRID = "off-grid"


@dataclass(frozen=True)
class Instance:
    """A complete search problem: graph, cost model, budget, source and targets.

    ``context_transition[c][a]`` is the context reached from context ``c`` along
    an edge with attribute ``a``. Context ``0`` is always the initial context.
    ``progressive`` maps dimension index to the declared minimum increment.
    """

    node_names: tuple[str, ...]
    attribute_names: tuple[str, ...]
    context_names: tuple[str, ...]
    context_transition: tuple[tuple[int, ...], ...]
    edges: tuple[Edge, ...]
    dimension_names: tuple[str, ...]
    rules: tuple[CostRule, ...]
    grids: tuple[CostGrid, ...]
    source: int
    targets: frozenset[int]
    progressive: tuple[tuple[int, Fraction], ...]
    context_rule: str = LAST_ATTRIBUTE

    def __post_init__(self) -> None:
        n, d = len(self.node_names), len(self.dimension_names)
        if len(self.rules) != d or len(self.grids) != d:
            raise InstanceError("rules and grids must have one entry per dimension")
        if not self.context_names or self.context_names[0] != INITIAL_CONTEXT:
            raise InstanceError(f"context 0 must be the initial context {INITIAL_CONTEXT!r}")
        if not 0 <= self.source < n:
            raise InstanceError(f"source {self.source} out of range")
        for t in self.targets:
            if not 0 <= t < n:
                raise InstanceError(f"target {t} out of range")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise InstanceError(f"edge ids must be dense: edge {i} has id {e.id}")
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise InstanceError(f"edge {i} references an unknown node")
            if not 0 <= e.attribute < len(self.attribute_names):
                raise InstanceError(f"edge {i} references an unknown attribute")
            if len(e.weights) != d:
                raise InstanceError(f"edge {i} must carry {d} weights")
        if len(self.context_transition) != len(self.context_names):
            raise InstanceError("context transition needs one row per context")
        for row in self.context_transition:
            if len(row) != len(self.attribute_names):
                raise InstanceError("context transition needs one column per attribute")
            if any(not 0 <= c < len(self.context_names) for c in row):
                raise InstanceError("context transition references an unknown context")
        for dim, _ in self.progressive:
            if not 0 <= dim < d:
                raise InstanceError(f"progressive dimension {dim} out of range")
        for dim, rule in enumerate(self.rules):
            if isinstance(rule, ExplicitTable):
                size = len(self.grids[dim])
                for c, e, g, nxt in rule.entries:
                    if not (0 <= c < len(self.context_names) and 0 <= e < len(self.edges)
                            and 0 <= g < size and 0 <= nxt < size):
                        raise InstanceError(f"table entry {(c, e, g, nxt)} of dimension {dim} out of range")

    @property
    def dims(self) -> int:
        return len(self.dimension_names)

    @property
    def budget(self) -> tuple[Fraction, ...]:
        return tuple(g.budget for g in self.grids)

    @cached_property
    def out_edges(self) -> tuple[tuple[Edge, ...], ...]:
        out: list[list[Edge]] = [[] for _ in self.node_names]
        for e in self.edges:
            out[e.src].append(e)
        return tuple(tuple(es) for es in out)

    @cached_property
    def progressive_dims(self) -> dict[int, Fraction]:
        return dict(self.progressive)

    @property
    def initial_signature(self) -> Signature:
        return Signature(self.source, 0)

    @property
    def zero_cost(self) -> CostVector:
        return (0,) * self.dims

    def signatures(self) -> Iterator[Signature]:
        for node in range(len(self.node_names)):
            for ctx in range(len(self.context_names)):
                yield Signature(node, ctx)

    def values(self, cost: CostVector) -> tuple[Fraction, ...]:
        return tuple(self.grids[i].levels[c] for i, c in enumerate(cost))

    def max_out_degree(self) -> int:
        return max((len(es) for es in self.out_edges), default=0)

    def describe_signature(self, sig: Signature) -> str:
        return f"({self.node_names[sig.node]},{self.context_names[sig.context]})"


def format_rational(x: Fraction) -> str:
    """Render exactly: integers plainly, terminating decimals as decimals, else ``p/q``."""
    if x.denominator == 1:
        return str(x.numerator)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    scaled = x * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def format_cost(instance: Instance, cost: CostVector) -> str:
    return "(" + ",".join(format_rational(v) for v in instance.values(cost)) + ")"


# -- single-step dynamics ---------------------------------------------------


def _next_level(instance: Instance, dim: int, context: int, edge: Edge, index: int) -> int | str:
    """Grid index reached in ``dim``, or a prune reason."""
    grid = instance.grids[dim]
    rule = instance.rules[dim]
    if isinstance(rule, ExplicitTable):
        try:
            return rule.lookup[(context, edge.id, index)]
        except KeyError:
            raise ContractError(
                f"dimension {dim} has no table entry for context {context}, edge {edge.id}, level {index}"
            ) from None
    current = grid.levels[index]
    if isinstance(rule, Additive):
        raw = current + edge.weights[dim]
    else:
        switched = context != 0 and instance.context_names[context] != instance.attribute_names[edge.attribute]
        raw = current + rule.penalty if switched else current
    if raw > grid.budget:
        return BUDGET_EXCEEDED
    nxt = grid.index_of.get(raw)
    return OFF_GRID if nxt is None else nxt


def step(instance: Instance, sig: Signature, cost: CostVector, edge: Edge) -> StepOutcome:
    """Extend the state ``(sig, cost)`` along ``edge``."""
    if edge.src != sig.node:
        raise ContractError(
            f"edge {edge.id} leaves node {edge.src}, not the signature's node {sig.node}"
        )
    nxt: list[int] = []
    for dim, index in enumerate(cost):
        level = _next_level(instance, dim, sig.context, edge, index)
        if isinstance(level, str):
            return Pruned(level)
        nxt.append(level)
    context = instance.context_transition[sig.context][edge.attribute]
    return Advanced(Signature(edge.dst, context), tuple(nxt))


def replay(instance: Instance, path: Sequence[int]) -> StepOutcome:
    """Run ``path`` (edge ids) from the source; the final state or the first prune."""
    state = Advanced(instance.initial_signature, instance.zero_cost)
    for eid in path:
        state = step(instance, state.sig, state.cost, instance.edges[eid])
        if isinstance(state, Pruned):
            return state
    return state


# -- validation -------------------------------------------------------------


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    computed_delta_min: dict[int, Fraction | None] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __str__(self) -> str:
        lines = [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


def _sweep(instance: Instance, dim: int) -> Iterator[tuple[int, Edge, int, int | str]]:
    for ctx in range(len(instance.context_names)):
        for edge in instance.edges:
            for index in range(len(instance.grids[dim])):
                yield ctx, edge, index, _next_level(instance, dim, ctx, edge, index)


def validate_instance(instance: Instance) -> ValidationReport:
    """Check every structural assumption of the cost model.

    Transitions are swept exhaustively over all contexts, edges and grid
    levels, so the report is exact for the finite model.
    """
    report = ValidationReport()
    err = report.errors.append
    names = instance.dimension_names

    if not instance.targets:
        err("target set is empty")
    if instance.source in instance.targets:
        report.warnings.append("source is a target; the empty path is not reported as a solution")
    if not instance.progressive:
        err("no progressive dimension declared")

    for dim, grid in enumerate(instance.grids):
        levels = grid.levels
        if not levels or levels[0] != 0:
            err(f"grid of {names[dim]!r} does not contain 0 as its lowest level")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            err(f"grid of {names[dim]!r} is not strictly increasing")
        if not levels or levels[-1] != grid.budget:
            err(f"grid of {names[dim]!r} does not end at its budget {format_rational(grid.budget)}")
        if any(x < 0 for x in levels):
            err(f"grid of {names[dim]!r} has a negative level")
    if report.errors:
        return report

    for edge in instance.edges:
        if any(w < 0 for w in edge.weights):
            err(f"edge {edge.id} has a negative weight")
    for dim, rule in enumerate(instance.rules):
        if isinstance(rule, AttributeSwitch) and rule.penalty < 0:
            err(f"dimension {names[dim]!r} has a negative switch penalty")
        if isinstance(rule, ExplicitTable):
            missing = sum(
                1
                for ctx in range(len(instance.context_names))
                for edge in instance.edges
                for g in range(len(instance.grids[dim]))
                if (ctx, edge.id, g) not in rule.lookup
            )
            if missing:
                err(f"table of dimension {names[dim]!r} is missing {missing} entries")
    if report.errors:
        return report

    declared = instance.progressive_dims
    for dim in range(instance.dims):
        grid = instance.grids[dim]
        previous: dict[tuple[int, int], int | str] = {}
        smallest: Fraction | None = None
        for ctx, edge, index, nxt in _sweep(instance, dim):
            where = f"{names[dim]!r}, context {instance.context_names[ctx]}, edge {edge.id}, level {format_rational(grid.levels[index])}"
            if nxt == OFF_GRID:
                err(f"transition leaves the grid below the budget ({where})")
                continue
            if isinstance(nxt, int):
                if nxt < index:
                    err(f"δ ≥ g violated: level decreases ({where})")
                gain = grid.levels[nxt] - grid.levels[index]
                smallest = gain if smallest is None else min(smallest, gain)
                if dim in declared and gain < declared[dim]:
                    err(
                        f"progress violated: increment {format_rational(gain)} below declared "
                        f"δ_min {format_rational(declared[dim])} ({where})"
                    )
            before = previous.get((ctx, edge.id))
            if before is not None and not _le(before, nxt):
                err(f"δ not monotone in the level ({where})")
            previous[(ctx, edge.id)] = nxt
        if dim in declared:
            report.computed_delta_min[dim] = smallest
            if declared[dim] <= 0:
                err(f"declared δ_min of progressive dimension {names[dim]!r} is not positive")
            elif smallest is not None and smallest > declared[dim]:
                report.warnings.append(
                    f"declared δ_min {format_rational(declared[dim])} of {names[dim]!r} is smaller "
                    f"than the computed minimum {format_rational(smallest)}"
                )
    return report


def _le(a: int | str, b: int | str) -> bool:
    # a pruned transition acts as +infinity
    if isinstance(b, str):
        return True
    if isinstance(a, str):
        return False
    return a <= b


def delta_min_vector(instance: Instance) -> tuple[Fraction, ...]:
    """Minimum per-step increment: the declared value on progressive dimensions, 0 elsewhere.

    The declared value is cross-checked against the exhaustive minimum over all
    non-pruning transitions; it may be smaller (still a valid lower bound) but
    never larger.
    """
    computed = validate_instance(instance).computed_delta_min
    out = [Fraction(0)] * instance.dims
    for dim, declared in instance.progressive_dims.items():
        actual = computed.get(dim)
        if actual is not None and actual <= 0:
            raise InstanceError(
                f"dimension {instance.dimension_names[dim]!r} is declared progressive but has a zero increment"
            )
        if actual is not None and actual < declared:
            raise InstanceError(
                f"declared δ_min {format_rational(declared)} of {instance.dimension_names[dim]!r} "
                f"exceeds the computed minimum {format_rational(actual)}"
            )
        out[dim] = declared
    return tuple(out)


def max_step_count(instance: Instance) -> int:
    """Hard bound on path length: ``min_i floor(B_i / δ_min,i)`` over progressive dims."""
    return min(int(instance.grids[dim].budget // delta) for dim, delta in instance.progressive)
