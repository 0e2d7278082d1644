"""Maximal medians, nonincreasing rearrangements and best-constant oscillation.

For a cell-wise constant function with M cells, the maximal median with
parameter s is the order statistic v_(k+1) (ascending, 1-based) where
k = floor(s*M): exactly sup{m : #{v < m} <= s*M}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameter
from .grid import CubeRegion, SampledFunction, dyadic_tower

# Above this many samples the k-th value comes from np.partition instead of a full sort.
SORT_LIMIT = 4096
# Relative slack used to decide that p*M is an integer.
RANK_SNAP = 1e-9


def rank_floor(p: float, count: int) -> int:
    """floor(p * count), snapping values within RANK_SNAP of an integer onto it."""
    r = p * count
    k = round(r)
    if abs(r - k) <= RANK_SNAP * max(1.0, abs(r)):
        return int(k)
    return math.floor(r)


def is_integral_rank(p: float, count: int) -> bool:
    r = p * count
    return abs(r - round(r)) <= RANK_SNAP * max(1.0, abs(r))


def within_measure(n: int, p: float, count: int) -> bool:
    """True when ``n`` cells out of ``count`` have measure <= p * |Q|."""
    return n <= rank_floor(p, count)


def at_least_measure(n: int, p: float, count: int) -> bool:
    """True when ``n`` cells out of ``count`` have measure >= p * |Q|."""
    return n >= -rank_floor(-p, count)


def _check_open_unit(s: float, name: str = "s") -> None:
    if not (0.0 < s < 1.0):
        raise InvalidParameter(f"{name} must lie in (0, 1), got {s}")


def _check_lower_half(s: float) -> None:
    if not (0.0 < s <= 0.5):
        raise InvalidParameter(f"s must lie in (0, 1/2], got {s}")


@dataclass(frozen=True, eq=False)
class WeightedSamples:
    """Values of f on the cells of one cube, each cell of measure ``cell_volume``."""

    values: np.ndarray
    cell_volume: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise InvalidParameter("samples must be nonempty")
        if not self.cell_volume > 0:
            raise InvalidParameter("cell_volume must be positive")
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def total_measure(self) -> float:
        return self.count * self.cell_volume

    @classmethod
    def from_region(cls, f: SampledFunction, region: CubeRegion | None = None):
        region = f.frame.whole() if region is None else region
        return cls(f.restrict(region), f.frame.cell_volume)

    def map(self, values) -> "WeightedSamples":
        return WeightedSamples(values, self.cell_volume)


def as_samples(samples) -> WeightedSamples:
    """Accept WeightedSamples or a bare array (taken to fill a unit-measure cube)."""
    if isinstance(samples, WeightedSamples):
        return samples
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InvalidParameter("samples must be nonempty")
    return WeightedSamples(arr, 1.0 / arr.size)


def kth_smallest(values: np.ndarray, k: int) -> float:
    """0-based k-th smallest value. Sorts small inputs, introselects large ones."""
    if values.size <= SORT_LIMIT:
        return float(np.sort(values)[k])
    return float(np.partition(values, k)[k])


def maximal_median(samples, s: float) -> float:
    """Largest median of f over its cube with parameter s."""
    _check_open_unit(s)
    v = as_samples(samples).values
    return kth_smallest(v, rank_floor(s, v.size))


def defining_counts(samples, s: float) -> dict:
    """Cell counts behind the four defining median inequalities."""
    ws = as_samples(samples)
    m = maximal_median(ws, s)
    v = ws.values
    n = v.size
    below, above = int(np.sum(v < m)), int(np.sum(v > m))
    at_or_below, at_or_above = n - above, n - below
    return {
        "median": m,
        "cells": n,
        "cell_volume": ws.cell_volume,
        "below": below,
        "above": above,
        "at_or_below": at_or_below,
        "at_or_above": at_or_above,
        "s_cells": s * n,
        "holds": {
            "below<=s": within_measure(below, s, n),
            "above<=1-s": within_measure(above, 1.0 - s, n),
            "at_or_below>=s": at_least_measure(at_or_below, s, n),
            "at_or_above>=1-s": at_least_measure(at_or_above, 1.0 - s, n),
        },
    }


def rearrangement_value(samples, lam: float) -> float:
    """f*(lam) = inf{a >= 0 : |{|f| > a}| <= lam} over the sample cube."""
    if not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    ws = as_samples(samples)
    allowed = rank_floor(lam / ws.cell_volume, 1)
    return _rearrangement_by_count(np.abs(ws.values), allowed)


def _rearrangement_by_count(abs_values: np.ndarray, allowed: int) -> float:
    # at most `allowed` cells may exceed the level
    n = abs_values.size
    if allowed >= n:
        return 0.0
    return kth_smallest(abs_values, n - 1 - allowed)


def median_rearrangement_identity(samples, s: float) -> tuple[float, float]:
    """(m_|f|(1-s, Q), (f chi_Q)*(s|Q|)); equal unless s*M is an integer."""
    _check_open_unit(s)
    ws = as_samples(samples)
    a = np.abs(ws.values)
    left = maximal_median(a, 1.0 - s)
    right = _rearrangement_by_count(a, rank_floor(s, a.size))
    return left, right


@dataclass(frozen=True)
class OscillationValue:
    omega: float
    best_c: float
    window: tuple[int, int]


def window_size(s: float, count: int) -> int:
    """Number of sorted values the optimal constant must capture."""
    return rank_floor(1.0 - s, count) + 1


def window_oscillation(sorted_rows: np.ndarray, s: float):
    """Vectorized best-constant oscillation of rows that are already sorted.

    Returns ``(omega, best_c, left)`` arrays, one entry per row.
    """
    rows = np.atleast_2d(sorted_rows)
    m = rows.shape[1]
    j = window_size(s, m)
    lo = rows[:, : m - j + 1]
    hi = rows[:, j - 1:]
    left = np.argmin(hi - lo, axis=1)
    idx = np.arange(rows.shape[0])
    a, b = lo[idx, left], hi[idx, left]
    c = 0.5 * (a + b)
    omega = np.maximum(c - a, b - c)
    return omega, c, left


def best_constant_oscillation(samples, s: float) -> OscillationValue:
    """inf over c of m_|f-c|(1-s, Q), solved by the shortest-window rule."""
    _check_lower_half(s)
    v = np.sort(as_samples(samples).values)
    omega, c, left = window_oscillation(v[None, :], s)
    i = int(left[0])
    return OscillationValue(float(omega[0]), float(c[0]), (i, i + window_size(s, v.size) - 1))


def oscillation_about_median(samples, s: float) -> float:
    """m_|f - m_f(1-s,Q)|(1-s, Q)."""
    _check_lower_half(s)
    ws = as_samples(samples)
    center = maximal_median(ws, 1.0 - s)
    return maximal_median(np.abs(ws.values - center), 1.0 - s)


def median_convergence_profile(f: SampledFunction, x: Sequence[int], s: float):
    """|m_f(s,Q) - f(x)| down the dyadic tower of cubes containing cell ``x``.

    Returns ``[(side_length, error), ...]`` from the whole cube to the cell.
    """
    _check_open_unit(s)
    x = tuple(int(i) for i in x)
    fx = float(f.values[x])
    out = []
    for q in dyadic_tower(f.frame, x):
        region = q.region
        m = maximal_median(f.restrict(region), s)
        out.append((region.length * f.frame.cell_width, abs(m - fx)))
    return out
