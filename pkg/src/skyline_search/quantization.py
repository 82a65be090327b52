"""Resolution bins over the cost grid."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .instance import CostVector, Instance

BinIndex = tuple[int, ...]


@dataclass(frozen=True)
class Quantization:
    """Per-dimension map from grid index to bin level.

    ``levels[i]`` holds the grid values of dimension ``i`` and ``ranks[i][j]``
    the bin of grid index ``j``; ``m[i]`` is the highest bin level.
    """

    levels: tuple[tuple[Fraction, ...], ...]
    ranks: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(r[-1] for r in self.ranks)

    def phi(self, dim: int, x: Fraction) -> int:
        """Bin of an arbitrary value in ``[0, B_i]``: the bin of the largest grid level ``<= x``."""
        pos = bisect_right(self.levels[dim], x) - 1
        if pos < 0:
            raise ValueError(f"{x} lies below the grid of dimension {dim}")
        return self.ranks[dim][pos]


def rank_quantization(instance: Instance) -> Quantization:
    return Quantization(
        levels=tuple(g.levels for g in instance.grids),
        ranks=tuple(tuple(range(len(g))) for g in instance.grids),
    )


def bin_index(q: Quantization, cost: CostVector) -> BinIndex:
    return tuple(r[c] for r, c in zip(q.ranks, cost))


def bin_count(q: Quantization) -> int:
    return math.prod(m + 1 for m in q.m)


def skyline_width_bound(q: Quantization, active_signature_count: int) -> int:
    if active_signature_count < 0:
        raise ValueError("active_signature_count must be non-negative")
    return active_signature_count * bin_count(q)
