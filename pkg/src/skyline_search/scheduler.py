"""Skyline-First extraction with bin-coverage tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontier import Frontier, FrontierEntry
from .quantization import BinIndex, Quantization, bin_count, bin_index


@dataclass
class CoverageSet:
    covered: set[BinIndex] = field(default_factory=set)

    def __contains__(self, b: BinIndex) -> bool:
        return b in self.covered

    def __len__(self) -> int:
        return len(self.covered)

    def add(self, b: BinIndex) -> None:
        self.covered.add(b)


@dataclass(frozen=True)
class CoverageReport:
    covered: int
    bins: int

    @property
    def ratio(self) -> float:
        return self.covered / self.bins if self.bins else 0.0


def extract(frontier: Frontier, coverage: CoverageSet, q: Quantization) -> FrontierEntry:
    """Remove and return the next entry to expand.

    Only skyline entries are candidates. Entries whose bin has not been
    extracted yet come first; remaining ties go to the smallest
    ``(signature, cost)`` so runs are reproducible.
    """
    candidates = frontier.skyline_entries()
    if not candidates:
        raise LookupError("extract from an empty frontier")
    chosen = min(candidates, key=lambda e: (bin_index(q, e.cost) in coverage, e.sig, e.cost))
    frontier.remove(chosen.key)
    coverage.add(bin_index(q, chosen.cost))
    return chosen


def coverage_stats(coverage: CoverageSet, q: Quantization) -> CoverageReport:
    return CoverageReport(len(coverage), bin_count(q))
