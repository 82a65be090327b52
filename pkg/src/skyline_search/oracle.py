"""Brute-force ground truth and mechanical checks of the structural guarantees.

Everything here is desk-scale by design: feasible paths are enumerated
exhaustively and completion potentials are computed over the full finite
``(signature, cost)`` state space.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from .engine import RunConfig, SearchResult, Termination, run, runtime_bound_check
from .frontier import LayerInvariantError, layer_width_check, non_dominated, strictly_dominates
from .instance import (
    Advanced,
    CostVector,
    Instance,
    Signature,
    max_step_count,
    replay,
    step,
)
from .quantization import bin_index, rank_quantization

INF = math.inf
DEFAULT_CAP = 20


class OracleRefusal(RuntimeError):
    """The instance is too large for exhaustive enumeration."""


class FeasiblePath(NamedTuple):
    path: tuple[int, ...]
    sig: Signature
    cost: CostVector


class _Point(NamedTuple):
    sig: Signature
    cost: CostVector


@dataclass
class OracleEnumeration:
    feasible_paths: list[FeasiblePath]
    by_signature_pareto: dict[Signature, list[CostVector]]
    global_coverage_front: list[CostVector]


def enumerate_feasible(instance: Instance, cap: int = DEFAULT_CAP) -> OracleEnumeration:
    """Every path from the source of length ``1..Λ`` that ends in a target within budget."""
    limit = max_step_count(instance)
    if limit > cap:
        raise OracleRefusal(f"maximum step count {limit} exceeds the oracle cap {cap}")
    found: list[FeasiblePath] = []

    def walk(sig: Signature, cost: CostVector, path: tuple[int, ...]) -> None:
        if len(path) == limit:
            return
        for edge in instance.out_edges[sig.node]:
            outcome = step(instance, sig, cost, edge)
            if not isinstance(outcome, Advanced):
                continue
            extended = path + (edge.id,)
            if outcome.sig.node in instance.targets:
                found.append(FeasiblePath(extended, outcome.sig, outcome.cost))
            walk(outcome.sig, outcome.cost, extended)

    walk(instance.initial_signature, instance.zero_cost, ())
    found.sort(key=lambda p: (len(p.path), p.path))

    by_sig: dict[Signature, set[CostVector]] = defaultdict(set)
    for p in found:
        by_sig[p.sig].add(p.cost)
    pareto = {
        sig: sorted(c for c in costs if not any(strictly_dominates(o, c) for o in costs))
        for sig, costs in sorted(by_sig.items())
    }
    # grid indices order like values, so index vectors compare like costs
    all_costs = {p.cost for p in found}
    front = sorted(c for c in all_costs if not any(strictly_dominates(o, c) for o in all_costs))
    return OracleEnumeration(found, pareto, front)


class PotentialTable:
    """Completion potential: fewest edges (at least one) from a state to any target.

    The state graph is acyclic because every transition strictly raises a
    progressive dimension, so a memoised recursion over it is exact.
    """

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self._memo: dict[tuple[Signature, CostVector], float] = {}

    def __call__(self, sig: Signature, cost: CostVector) -> float:
        key = (sig, cost)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        best = INF
        for edge in self.instance.out_edges[sig.node]:
            outcome = step(self.instance, sig, cost, edge)
            if not isinstance(outcome, Advanced):
                continue
            if outcome.sig.node in self.instance.targets:
                best = 1
                break
            best = min(best, 1 + self(outcome.sig, outcome.cost))
        self._memo[key] = best
        return best


def completion_potential(instance: Instance, sig: Signature, cost: CostVector) -> float:
    return PotentialTable(instance)(sig, cost)


# -- verification reports ---------------------------------------------------


@dataclass
class VerifyReport:
    name: str
    applicable: bool = True
    failures: list[str] = field(default_factory=list)
    details: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        if not self.applicable:
            return f"{self.name}: not applicable"
        status = "pass" if self.passed else "FAIL"
        extra = "".join(f"\n  {f}" for f in self.failures[:10])
        return f"{self.name}: {status}{extra}"


def _ensure_snapshots(result: SearchResult) -> SearchResult:
    if result.snapshots is not None:
        return result
    config = RunConfig(result.config.cert_period, result.config.step_limit, record_snapshots=True)
    replayed = run(result.instance, config)
    if replayed.trace != result.trace:
        raise AssertionError("replay diverged from the recorded trace")
    return replayed


def verify_solutions(result: SearchResult) -> VerifyReport:
    """Each recorded solution replays from the source to a target with its recorded state."""
    report = VerifyReport("solution replay")
    inst = result.instance
    for s in result.solutions:
        end = replay(inst, s.path)
        if not isinstance(end, Advanced) or (end.sig, end.cost) != (s.sig, s.cost):
            report.failures.append(f"solution {s.path} replays to {end}")
        elif s.sig.node not in inst.targets or not s.path:
            report.failures.append(f"solution {s.path} does not end in a target")
    return report


def verify_dominance_coverage(result: SearchResult, oracle: OracleEnumeration) -> VerifyReport:
    """Every feasible path outside the solution set is weakly dominated by a solution.

    Comparison is on costs only, across signatures. A run that exhausted its
    frontier must have found every feasible ``(signature, cost)``.
    """
    report = VerifyReport("dominance coverage")
    if result.termination is Termination.STEP_LIMIT:
        report.applicable = False
        return report
    found = {(s.sig, s.cost) for s in result.solutions}
    costs = [s.cost for s in result.solutions]
    for p in oracle.feasible_paths:
        if (p.sig, p.cost) in found:
            continue
        if result.termination is Termination.FRONTIER_EXHAUSTED:
            report.failures.append(f"exhausted run missed feasible path {p.path}")
        elif not any(all(a <= b for a, b in zip(c, p.cost)) for c in costs):
            report.failures.append(f"feasible path {p.path} with cost {p.cost} is not covered")
    report.details["feasible_paths"] = len(oracle.feasible_paths)
    report.details["solutions"] = len(result.solutions)
    return report


def _floor(potential: PotentialTable, keys: list[tuple[Signature, CostVector]]) -> float:
    return min((potential(sig, cost) for sig, cost in keys), default=INF)


def h_star_series(result: SearchResult, potential: PotentialTable | None = None) -> list[float]:
    """Potential floor after each step; 0 on steps that reach a target."""
    result = _ensure_snapshots(result)
    potential = potential or PotentialTable(result.instance)
    assert result.snapshots is not None
    return [
        0 if event.targets_reached else _floor(potential, result.snapshots[i + 1])
        for i, event in enumerate(result.trace)
    ]


def annotate_h_star(result: SearchResult, potential: PotentialTable | None = None) -> SearchResult:
    result.h_star = h_star_series(result, potential)
    return result


@dataclass
class DescentReport(VerifyReport):
    initial: float = INF
    h_star: list[float] = field(default_factory=list)
    phase_descents: list[int] = field(default_factory=list)
    skyline_potential_max: float = 0
    max_steps: int = 0


def verify_descent(result: SearchResult, potential: PotentialTable | None = None) -> DescentReport:
    """Replay the run and check the potential-floor guarantees at every step.

    A phase ends at every step that reaches a target (a new feasible path);
    within a phase the floor must never rise, must drop whenever a
    minimum-potential element is extracted, and may drop only then.
    """
    result = _ensure_snapshots(result)
    inst = result.instance
    potential = potential or PotentialTable(inst)
    limit = max_step_count(inst)
    report = DescentReport("potential descent", max_steps=limit)
    fail = report.failures.append
    snaps = result.snapshots
    assert snaps is not None

    report.initial = _floor(potential, snaps[0]) if snaps else INF
    report.h_star = [report.initial]
    if report.initial != INF and report.initial > limit:
        fail(f"initial floor {report.initial} exceeds Λ={limit}")

    descents = 0
    for i, event in enumerate(result.trace):
        before = [_Point(s, c) for s, c in snaps[i]]
        sky = non_dominated(before)
        h_before = _floor(potential, snaps[i])
        sky_finite = [potential(p.sig, p.cost) for p in sky if potential(p.sig, p.cost) != INF]
        if sky_finite:
            report.skyline_potential_max = max(report.skyline_potential_max, max(sky_finite))
        sig, cost, _ = event.extracted
        h_extracted = potential(sig, cost)
        h_after = 0 if event.targets_reached else _floor(potential, snaps[i + 1])
        report.h_star.append(h_after)
        if h_before == INF:
            if h_after != INF:
                fail(f"step {event.step}: floor became finite from an uncompletable frontier")
            continue
        if min(sky_finite, default=INF) != h_before:
            fail(f"step {event.step}: no skyline element attains the floor {h_before}")
        if h_after > h_before:
            fail(f"step {event.step}: floor rose from {h_before} to {h_after}")
        if h_extracted == h_before and h_after > h_before - 1:
            fail(f"step {event.step}: minimum-potential extraction without strict descent")
        if h_after < h_before:
            if h_extracted != h_before:
                fail(f"step {event.step}: floor dropped without extracting a minimum-potential element")
            descents += 1
        if event.targets_reached:
            if descents > limit:
                fail(f"phase {len(report.phase_descents) + 1}: {descents} descents exceed Λ={limit}")
            report.phase_descents.append(descents)
            cumulative = sum(report.phase_descents)
            k = len(report.phase_descents)
            if cumulative > k * limit:
                fail(f"{cumulative} descents through solution {k} exceed {k}·Λ")
            descents = 0
    if descents:
        report.details["open_phase_descents"] = descents
    if report.skyline_potential_max > limit:
        fail(f"skyline potential {report.skyline_potential_max} exceeds Λ={limit}")
    return report


def verify_extraction_policy(result: SearchResult) -> VerifyReport:
    """Every extraction came from the skyline and preferred an uncovered bin when one existed."""
    result = _ensure_snapshots(result)
    q = rank_quantization(result.instance)
    report = VerifyReport("skyline-first policy")
    covered: set[tuple[int, ...]] = set()
    assert result.snapshots is not None
    for i, event in enumerate(result.trace):
        sky = non_dominated([_Point(s, c) for s, c in result.snapshots[i]])
        sig, cost, b = event.extracted
        if _Point(sig, cost) not in sky:
            report.failures.append(f"step {event.step}: extracted entry not on the skyline")
        if b in covered and any(bin_index(q, p.cost) not in covered for p in sky):
            report.failures.append(f"step {event.step}: covered bin chosen over an uncovered one")
        covered.add(b)
        if len(covered) != event.covered_bins:
            report.failures.append(f"step {event.step}: coverage count mismatch")
    return report


def verify_layers(result: SearchResult) -> VerifyReport:
    """Layer contiguity, bin exclusivity and width bounds on every frontier snapshot."""
    result = _ensure_snapshots(result)
    q = rank_quantization(result.instance)
    report = VerifyReport("layer geometry")
    widest = 0
    assert result.snapshots is not None
    for i, keys in enumerate(result.snapshots):
        try:
            width = layer_width_check([_Point(s, c) for s, c in keys], q)
        except LayerInvariantError as exc:
            report.failures.append(f"snapshot {i}: {exc}")
            continue
        widest = max(widest, width.max_signature_width)
    report.details["max_signature_width"] = widest
    return report


def verify_residual_budget(
    instance: Instance,
    potential: PotentialTable | None = None,
    all_pairs: bool = False,
) -> VerifyReport:
    """Potential is monotone in cost within every signature.

    By default only covering pairs (one grid step apart in one dimension) are
    compared; the product order is their transitive closure, so this is
    equivalent to the all-pairs sweep, which ``all_pairs`` runs literally.
    """
    potential = potential or PotentialTable(instance)
    report = VerifyReport("residual budget monotonicity")
    sizes = [len(g) for g in instance.grids]
    grid = list(itertools.product(*(range(n) for n in sizes)))
    checked = 0
    for sig in instance.signatures():
        if all_pairs:
            pairs = (
                (c, o) for c in grid for o in grid
                if all(a <= b for a, b in zip(c, o))
            )
        else:
            pairs = (
                (c, c[:i] + (c[i] + 1,) + c[i + 1:])
                for c in grid for i in range(len(c)) if c[i] + 1 < sizes[i]
            )
        for low, high in pairs:
            checked += 1
            if potential(sig, low) > potential(sig, high):
                report.failures.append(
                    f"{instance.describe_signature(sig)}: H{low}={potential(sig, low)} > H{high}={potential(sig, high)}"
                )
    report.details["pairs"] = checked
    return report


@dataclass
class Verification:
    result: SearchResult
    reports: list[VerifyReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def verify_run(instance: Instance, config: RunConfig | None = None, cap: int = DEFAULT_CAP) -> Verification:
    """Run the engine with snapshots and apply every oracle check."""
    base = config or RunConfig()
    result = run(instance, RunConfig(base.cert_period, base.step_limit, record_snapshots=True))
    potential = PotentialTable(instance)
    oracle = enumerate_feasible(instance, cap)
    bound = runtime_bound_check(result)
    bound_report = VerifyReport("runtime bound", details={"report": bound})
    if not bound.holds:
        bound_report.failures.append(
            f"search operations {bound.search_operations} exceed {bound.bound} "
            f"or certificate comparisons {bound.certificate_comparisons} exceed {bound.certificate_budget}"
        )
    reports = [
        verify_solutions(result),
        verify_dominance_coverage(result, oracle),
        verify_extraction_policy(result),
        verify_descent(result, potential),
        verify_layers(result),
        verify_residual_budget(instance, potential),
        bound_report,
    ]
    annotate_h_star(result, potential)
    return Verification(result, reports)
