"""The search loop: extract, expand, record solutions, insert, certify."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .frontier import Frontier, FrontierEntry
from .instance import (
    Advanced,
    CostVector,
    Instance,
    InstanceError,
    Signature,
    delta_min_vector,
    step,
    validate_instance,
)
from .quantization import BinIndex, Quantization, bin_count, bin_index, rank_quantization
from .scheduler import CoverageSet, extract

log = logging.getLogger(__name__)

FrontierKey = tuple[Signature, CostVector]

# Per extraction: d cost updates per successor, one comparison per same-signature
# entry on insert and on removal. Both are at most B* <= W, so the total is
# at most t*.(D.d + D.W + W) <= 3.t*.D.W.d.
SEARCH_OPS_CONSTANT = 3


class Termination(enum.Enum):
    CERTIFICATE_HELD = "CertificateHeld"
    FRONTIER_EXHAUSTED = "FrontierExhausted"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class SolutionRecord:
    path: tuple[int, ...]
    cost: CostVector
    sig: Signature
    discovered_at_step: int


@dataclass(frozen=True)
class OpCounters:
    """Cumulative operation counts."""

    cost_updates: int = 0
    insert_comparisons: int = 0
    remove_comparisons: int = 0
    certificate_comparisons: int = 0

    @property
    def dominance_comparisons(self) -> int:
        return self.insert_comparisons + self.remove_comparisons + self.certificate_comparisons

    @property
    def search_operations(self) -> int:
        return self.cost_updates + self.insert_comparisons + self.remove_comparisons


@dataclass(frozen=True)
class TraceEvent:
    step: int
    extracted: tuple[Signature, CostVector, BinIndex]
    skyline_size_before: int
    frontier_size_after: int
    covered_bins: int
    solutions_count: int
    certificate_held: bool
    op_counters: OpCounters
    targets_reached: int = 0
    active_signatures_max: int = 0


@dataclass(frozen=True)
class RunConfig:
    cert_period: int = 1
    step_limit: int | None = None
    record_snapshots: bool = False

    def __post_init__(self) -> None:
        if self.cert_period < 1:
            raise ValueError("cert_period must be at least 1")
        if self.step_limit is not None and self.step_limit < 0:
            raise ValueError("step_limit must be non-negative")


@dataclass
class SearchResult:
    instance: Instance
    config: RunConfig
    solutions: list[SolutionRecord]
    trace: list[TraceEvent]
    termination: Termination
    final_frontier: list[FrontierEntry]
    # frontier keys before each extraction, then the final frontier
    snapshots: list[list[FrontierKey]] | None = None
    h_star: list[float] | None = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def counters(self) -> OpCounters:
        return self.trace[-1].op_counters if self.trace else OpCounters()


def _certificate(
    instance: Instance,
    skyline: Iterable[FrontierEntry],
    solution_values: Sequence[tuple[Fraction, ...]],
    delta_min: Sequence[Fraction],
) -> tuple[bool, int]:
    comparisons = 0
    for entry in skyline:
        bound = [v + dm for v, dm in zip(instance.values(entry.cost), delta_min)]
        for values in solution_values:
            comparisons += 1
            if all(s <= b for s, b in zip(values, bound)):
                break
        else:
            return False, comparisons
    return True, comparisons


def certificate_holds(
    instance: Instance,
    skyline: Iterable[FrontierEntry],
    solutions: Iterable[SolutionRecord],
    delta_min: Sequence[Fraction] | None = None,
) -> bool:
    """True iff every skyline entry ``p`` has a solution ``s`` with ``C(s) <= C(p) + delta_min``.

    Compared on exact level values since ``C(p) + delta_min`` may fall between
    grid levels.
    """
    if delta_min is None:
        delta_min = delta_min_vector(instance)
    values = [instance.values(s.cost) for s in solutions]
    return _certificate(instance, skyline, values, delta_min)[0]


def run(instance: Instance, config: RunConfig | None = None) -> SearchResult:
    config = config or RunConfig()
    report = validate_instance(instance)
    if not report.ok:
        raise InstanceError("invalid instance: " + "; ".join(report.errors))
    delta_min = delta_min_vector(instance)
    q = rank_quantization(instance)
    out_edges = instance.out_edges
    targets = instance.targets

    frontier = Frontier(len(g) for g in instance.grids)
    frontier.insert(FrontierEntry(instance.initial_signature, instance.zero_cost, ()))
    coverage = CoverageSet()
    solutions: list[SolutionRecord] = []
    solution_keys: set[FrontierKey] = set()
    solution_values: list[tuple[Fraction, ...]] = []
    trace: list[TraceEvent] = []
    snapshots: list[list[FrontierKey]] | None = [] if config.record_snapshots else None
    cost_updates = certificate_comparisons = 0
    peak_signatures = len(frontier.active_signatures())

    held, n = _certificate(instance, frontier.skyline_entries(), solution_values, delta_min)
    certificate_comparisons += n

    while True:
        if not frontier:
            termination = Termination.FRONTIER_EXHAUSTED
            break
        if held:
            termination = Termination.CERTIFICATE_HELD
            break
        if config.step_limit is not None and len(trace) >= config.step_limit:
            termination = Termination.STEP_LIMIT
            break

        number = len(trace) + 1
        if snapshots is not None:
            snapshots.append(frontier.keys())
        skyline_before = frontier.skyline_size()
        entry = extract(frontier, coverage, q)

        reached = 0
        for edge in out_edges[entry.sig.node]:
            cost_updates += instance.dims
            outcome = step(instance, entry.sig, entry.cost, edge)
            if not isinstance(outcome, Advanced):
                continue
            path = entry.path + (edge.id,)
            key = (outcome.sig, outcome.cost)
            if outcome.sig.node in targets:
                reached += 1
                if key not in solution_keys:
                    solution_keys.add(key)
                    solutions.append(SolutionRecord(path, outcome.cost, outcome.sig, number))
                    solution_values.append(instance.values(outcome.cost))
            if out_edges[outcome.sig.node]:
                frontier.insert(FrontierEntry(outcome.sig, outcome.cost, path))
        peak_signatures = max(peak_signatures, len(frontier.active_signatures()))

        held = False
        if number % config.cert_period == 0:
            held, n = _certificate(instance, frontier.skyline_entries(), solution_values, delta_min)
            certificate_comparisons += n

        trace.append(
            TraceEvent(
                step=number,
                extracted=(entry.sig, entry.cost, bin_index(q, entry.cost)),
                skyline_size_before=skyline_before,
                frontier_size_after=len(frontier),
                covered_bins=len(coverage),
                solutions_count=len(solutions),
                certificate_held=held,
                op_counters=OpCounters(
                    cost_updates,
                    frontier.insert_comparisons,
                    frontier.remove_comparisons,
                    certificate_comparisons,
                ),
                targets_reached=reached,
                active_signatures_max=peak_signatures,
            )
        )

    if snapshots is not None:
        snapshots.append(frontier.keys())
    log.debug("run finished after %d steps: %s", len(trace), termination.value)
    return SearchResult(
        instance=instance,
        config=config,
        solutions=solutions,
        trace=trace,
        termination=termination,
        final_frontier=frontier.entries(),
        snapshots=snapshots,
    )


@dataclass(frozen=True)
class BoundReport:
    steps: int
    max_out_degree: int
    peak_width: int
    dims: int
    bins: int
    constant: int
    search_operations: int
    certificate_comparisons: int
    certificate_budget: int
    holds: bool

    @property
    def bound(self) -> int:
        return self.constant * self.steps * max(self.max_out_degree, 1) * self.peak_width * self.dims


def runtime_bound_check(result: SearchResult, instance: Instance | None = None,
                        q: Quantization | None = None) -> BoundReport:
    """Compare measured operation counts against ``c * t* * D * W * d``.

    Certificate comparisons are not part of that bound; they are checked
    against ``sum over checks of |skyline| * |solutions|`` instead.
    """
    instance = instance or result.instance
    q = q or rank_quantization(instance)
    bins = bin_count(q)
    peak = max((e.active_signatures_max for e in result.trace), default=1)
    counters = result.counters
    cert_budget = _certificate_budget(result)
    report = BoundReport(
        steps=result.steps,
        max_out_degree=instance.max_out_degree(),
        peak_width=max(peak, 1) * bins,
        dims=instance.dims,
        bins=bins,
        constant=SEARCH_OPS_CONSTANT,
        search_operations=counters.search_operations,
        certificate_comparisons=counters.certificate_comparisons,
        certificate_budget=cert_budget,
        holds=False,
    )
    holds = report.search_operations <= report.bound and report.certificate_comparisons <= cert_budget
    return BoundReport(**{**report.__dict__, "holds": holds})


def _certificate_budget(result: SearchResult) -> int:
    # skyline sizes after each step are not stored, the frontier size is an upper bound
    budget = 0  # the initial check has no solutions to compare against
    for e in result.trace:
        if e.step % result.config.cert_period == 0:
            budget += e.frontier_size_after * e.solutions_count
    return budget
