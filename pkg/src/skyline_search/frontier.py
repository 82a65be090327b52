"""Deduplicated frontier with per-signature skylines and Pareto layers."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence, TypeVar

from .instance import ContractError, CostVector, Signature
from .quantization import Quantization, bin_count, bin_index


class Dominance(enum.Enum):
    STRICTLY_DOMINATES = "strictly-dominates"
    EQUAL = "weakly-dominates-equal"
    DOMINATED_BY = "dominated-by"
    INCOMPARABLE = "incomparable"


def dominance(a: CostVector, b: CostVector) -> Dominance:
    """Relation of ``a`` to ``b`` under componentwise order."""
    if len(a) != len(b):
        raise ContractError("cost vectors differ in dimension")
    le = ge = True
    for x, y in zip(a, b):
        if x < y:
            ge = False
        elif x > y:
            le = False
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.STRICTLY_DOMINATES
    if ge:
        return Dominance.DOMINATED_BY
    return Dominance.INCOMPARABLE


def strictly_dominates(a: CostVector, b: CostVector) -> bool:
    return a != b and all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class FrontierEntry:
    sig: Signature
    cost: CostVector
    path: tuple[int, ...]

    @property
    def key(self) -> tuple[Signature, CostVector]:
        return (self.sig, self.cost)


class InsertResult(enum.Enum):
    INSERTED = "inserted"
    DUPLICATE = "duplicate"


class Frontier:
    """Frontier keyed by ``(signature, cost)`` holding one representative per key.

    Every entry carries the number of same-signature entries that strictly
    dominate it; the skyline of a signature is the set of entries whose count
    is zero. Insertion and removal each compare against the entries of a
    single signature, and dominated entries are kept so they can resurface.
    """

    def __init__(self, grid_sizes: Sequence[int] | None = None) -> None:
        self._grid_sizes = tuple(grid_sizes) if grid_sizes is not None else None
        self._entries: dict[tuple[Signature, CostVector], FrontierEntry] = {}
        self._dominators: dict[Signature, dict[CostVector, int]] = {}
        self._skyline: dict[Signature, set[CostVector]] = {}
        self.insert_comparisons = 0
        self.remove_comparisons = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __contains__(self, key: tuple[Signature, CostVector]) -> bool:
        return key in self._entries

    def entries(self) -> list[FrontierEntry]:
        return [self._entries[k] for k in sorted(self._entries)]

    def keys(self) -> list[tuple[Signature, CostVector]]:
        return sorted(self._entries)

    def active_signatures(self) -> list[Signature]:
        return sorted(self._dominators)

    def signature_costs(self, sig: Signature) -> list[CostVector]:
        return sorted(self._dominators.get(sig, ()))

    def skyline_costs(self, sig: Signature) -> list[CostVector]:
        return sorted(self._skyline.get(sig, ()))

    def skyline_size(self) -> int:
        return sum(len(s) for s in self._skyline.values())

    def get(self, key: tuple[Signature, CostVector]) -> FrontierEntry:
        return self._entries[key]

    def insert(self, entry: FrontierEntry) -> InsertResult:
        sig, cost = entry.sig, entry.cost
        if self._grid_sizes is not None and (
            len(cost) != len(self._grid_sizes)
            or any(not 0 <= c < n for c, n in zip(cost, self._grid_sizes))
        ):
            raise ContractError(f"cost {cost} is not on the grid")
        costs = self._dominators.setdefault(sig, {})
        if cost in costs:
            return InsertResult.DUPLICATE
        skyline = self._skyline.setdefault(sig, set())
        count = 0
        for other, n in list(costs.items()):
            self.insert_comparisons += 1
            rel = dominance(other, cost)
            if rel is Dominance.STRICTLY_DOMINATES:
                count += 1
            elif rel is Dominance.DOMINATED_BY:
                costs[other] = n + 1
                if n == 0:
                    skyline.discard(other)
        costs[cost] = count
        if count == 0:
            skyline.add(cost)
        self._entries[entry.key] = entry
        return InsertResult.INSERTED

    def remove(self, key: tuple[Signature, CostVector]) -> FrontierEntry:
        entry = self._entries.pop(key)
        sig, cost = key
        costs = self._dominators[sig]
        skyline = self._skyline[sig]
        del costs[cost]
        skyline.discard(cost)
        for other, n in list(costs.items()):
            self.remove_comparisons += 1
            if strictly_dominates(cost, other):
                costs[other] = n - 1
                if n == 1:
                    skyline.add(other)
        if not costs:
            del self._dominators[sig]
            del self._skyline[sig]
        return entry

    def skyline_entries(self) -> list[FrontierEntry]:
        return [
            self._entries[(sig, c)]
            for sig in sorted(self._skyline)
            for c in sorted(self._skyline[sig])
        ]


def skyline(frontier: Frontier) -> list[FrontierEntry]:
    return frontier.skyline_entries()


class _Keyed(Protocol):
    @property
    def sig(self) -> Signature: ...

    @property
    def cost(self) -> CostVector: ...


T = TypeVar("T", bound=_Keyed)


def non_dominated(items: Sequence[T]) -> list[T]:
    """Quadratic filter: items not strictly dominated by any same-signature item."""
    return [
        p for p in items
        if not any(q.sig == p.sig and strictly_dominates(q.cost, p.cost) for q in items)
    ]


def pareto_layers(items: Frontier | Iterable[T]) -> list[list[T]]:
    """Peel successive non-dominated shells per signature and union them by depth."""
    pool = items.entries() if isinstance(items, Frontier) else list(items)
    by_sig: dict[Signature, list[T]] = defaultdict(list)
    for p in pool:
        by_sig[p.sig].append(p)
    layers: list[list[T]] = []
    for sig in sorted(by_sig):
        residual = by_sig[sig]
        depth = 0
        while residual:
            shell = non_dominated(residual)
            if depth == len(layers):
                layers.append([])
            layers[depth].extend(shell)
            kept = {id(p) for p in shell}
            residual = [p for p in residual if id(p) not in kept]
            depth += 1
    return [sorted(layer, key=lambda p: (p.sig, p.cost)) for layer in layers]


class LayerInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class WidthReport:
    layer_count: int
    max_signature_width: int
    max_global_width: int
    bins: int
    width_bound: int


def layer_width_check(items: Frontier | Iterable[T], q: Quantization) -> WidthReport:
    """Check contiguity, bin exclusivity and the width bound on every layer."""
    layers = pareto_layers(items)
    bins = bin_count(q)
    signatures = {p.sig for layer in layers for p in layer}
    bound = len(signatures) * bins
    max_sig = max_glob = 0
    for k, layer in enumerate(layers, start=1):
        if not layer:
            raise LayerInvariantError(f"layer {k} is empty but deeper layers exist")
        seen: dict[Signature, set[tuple[int, ...]]] = defaultdict(set)
        for p in layer:
            b = bin_index(q, p.cost)
            if b in seen[p.sig]:
                raise LayerInvariantError(f"layer {k}, signature {p.sig}: two entries share bin {b}")
            seen[p.sig].add(b)
        for sig, bs in seen.items():
            if len(bs) > bins:
                raise LayerInvariantError(f"layer {k}, signature {sig}: width {len(bs)} exceeds {bins}")
            max_sig = max(max_sig, len(bs))
        if len(layer) > bound:
            raise LayerInvariantError(f"layer {k}: width {len(layer)} exceeds {bound}")
        max_glob = max(max_glob, len(layer))
    return WidthReport(len(layers), max_sig, max_glob, bins, bound)
