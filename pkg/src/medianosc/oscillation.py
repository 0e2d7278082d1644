"""Two-cube median oscillation, its supremal functional and the essential
modulus of continuity it is compared against.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, OverlappingPair
from .grid import CubeRegion, SampledFunction, cube_values
from .median import rank_floor

# number of (pair, candidate, cell) entries processed per batch
PAIR_CHUNK = 1 << 21
DIAM_SLACK = 1e-12


def _check_upper_half(s: float) -> None:
    if not (0.5 < s < 1.0):
        raise InvalidParameter(f"s must lie in (1/2, 1), got {s}")


@dataclass(frozen=True)
class CubePair:
    """Two grid cubes with disjoint interiors (shared faces are allowed)."""

    q1: CubeRegion
    q2: CubeRegion

    def __post_init__(self):
        if self.q1.frame != self.q2.frame:
            raise InvalidParameter("cubes of a pair must share a grid frame")
        separated = any(a.lo[i] + a.length <= b.lo[i] or b.lo[i] + b.length <= a.lo[i]
                        for a, b in [(self.q1, self.q2)] for i in range(self.q1.dim))
        if not separated:
            raise OverlappingPair(f"cubes {self.q1} and {self.q2} overlap")

    @property
    def diam(self) -> float:
        """Euclidean diameter of the bounding box of the union."""
        ext = [max(self.q1.hi[i], self.q2.hi[i]) - min(self.q1.lo[i], self.q2.lo[i])
               for i in range(self.q1.dim)]
        return math.sqrt(sum(e * e for e in ext)) * self.q1.frame.cell_width


def _kth_distance(rows: np.ndarray, c: np.ndarray, k: int) -> np.ndarray:
    """k-th smallest (0-based) |row - c| for every candidate; rows (P, M), c (P, C)."""
    d = np.abs(rows[:, None, :] - c[:, :, None])
    return np.partition(d, k, axis=2)[:, :, k]


def _window_midpoints(sorted_rows: np.ndarray, k: int) -> np.ndarray:
    m = sorted_rows.shape[1]
    return 0.5 * (sorted_rows[:, : m - k] + sorted_rows[:, k:])


def _pair_batch(rows1: np.ndarray, rows2: np.ndarray, s: float):
    """Exact inf over c of the pair functional for batches of equal-shaped pairs.

    Each single-cube term c -> m_{|f-c|}(s) is a minimum of V-shaped functions
    centred at window midpoints, so the weighted sum attains its minimum at a
    midpoint of one of the two cubes.
    """
    m1, m2 = rows1.shape[1], rows2.shape[1]
    k1, k2 = rank_floor(s, m1), rank_floor(s, m2)
    w1 = m1 / (m1 + m2)
    s1, s2 = np.sort(rows1, axis=1), np.sort(rows2, axis=1)
    cand = np.concatenate([_window_midpoints(s1, k1), _window_midpoints(s2, k2)], axis=1)
    cand.sort(axis=1)
    value = w1 * _kth_distance(s1, cand, k1) + (1 - w1) * _kth_distance(s2, cand, k2)
    best = np.argmin(value, axis=1)
    idx = np.arange(len(best))
    return value[idx, best], cand[idx, best]


def psi_s(f: SampledFunction, pair: CubePair, s: float, c: float) -> float:
    """Measure-weighted average of m_{|f-c|}(s) over the two cubes."""
    _check_upper_half(s)
    v1, v2 = f.restrict(pair.q1), f.restrict(pair.q2)
    w1 = v1.size / (v1.size + v2.size)
    a = np.sort(np.abs(v1 - c))[rank_floor(s, v1.size)]
    b = np.sort(np.abs(v2 - c))[rank_floor(s, v2.size)]
    return float(w1 * a + (1 - w1) * b)


def best_constant_pair(f: SampledFunction, pair: CubePair, s: float) -> tuple[float, float]:
    """(c*, inf_c psi_s(|f - c|)), leftmost minimizer."""
    _check_upper_half(s)
    value, c = _pair_batch(f.restrict(pair.q1)[None, :], f.restrict(pair.q2)[None, :], s)
    return float(c[0]), float(value[0])


def _shift_vectors(dim: int, max_abs: int):
    """Integer vectors with first nonzero coordinate positive (one of each +-h)."""
    rng = range(-max_abs, max_abs + 1)
    for h in itertools.product(rng, repeat=dim):
        nz = [x for x in h if x]
        if nz and nz[0] > 0:
            yield h


def _pairs_max(values: np.ndarray, len1: int, lows1: np.ndarray, len2: int,
               lows2: np.ndarray, s: float) -> float:
    if len(lows1) == 0:
        return 0.0
    m1, m2 = len1**values.ndim, len2**values.ndim
    per_pair = (m1 + m2) * (m1 + m2)
    step = max(1, PAIR_CHUNK // per_pair)
    best = 0.0
    for start in range(0, len(lows1), step):
        r1 = cube_values(values, len1, lows1[start:start + step])
        r2 = cube_values(values, len2, lows2[start:start + step])
        best = max(best, float(_pair_batch(r1, r2, s)[0].max()))
    return best


def _equal_pairs(n: int, dim: int, side: int, h: tuple[int, ...]):
    """Lows of all cube pairs (x, x+h) of a given side that fit on the grid."""
    ranges = [np.arange(max(0, -hi), n - side + 1 - max(0, hi)) for hi in h]
    if any(len(r) == 0 for r in ranges):
        return None
    grids = np.meshgrid(*ranges, indexing="ij")
    lows1 = np.stack([g.ravel() for g in grids], axis=1)
    return lows1, lows1 + np.asarray(h)


DEFAULT_SIDES = (1, 2, 4)


def omega_estimate(f: SampledFunction, s: float, delta: float,
                   sides: tuple[int, ...] = DEFAULT_SIDES, mode: str = "equal") -> float:
    """Max of the best-constant pair functional over a finite pair family.

    ``mode="equal"`` uses equal cubes of the given sides (in cells) at every
    grid offset whose union has bounding-box diameter <= delta. ``mode="all"``
    (1D only) takes every pair of nonoverlapping intervals.
    """
    _check_upper_half(s)
    if not delta > 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    n, dim, w = f.cells_per_side, f.dim, f.frame.cell_width
    limit = delta / w * (1 + DIAM_SLACK)
    best = 0.0
    if mode == "all":
        if dim != 1:
            raise InvalidParameter("all-pairs mode is only available in 1D")
        if n > 64:
            raise InvalidParameter("all-pairs mode is limited to 64 cells")
        for l1 in range(1, n + 1):
            for l2 in range(1, n + 1):
                # q2 starts at q1.lo + d with d >= l1; bounding extent d + l2
                for d in range(l1, n - l2 + 1):
                    if d + l2 > limit:
                        break
                    lows1 = np.arange(0, n - d - l2 + 1)[:, None]
                    best = max(best, _pairs_max(f.values, l1, lows1, l2, lows1 + d, s))
        return best
    if mode != "equal":
        raise InvalidParameter(f"unknown pair mode {mode!r}")
    for side in sides:
        if side < 1 or 2 * side > n:
            continue
        for h in _shift_vectors(dim, int(limit)):
            if not any(abs(x) >= side for x in h):
                continue
            if math.sqrt(sum((abs(x) + side) ** 2 for x in h)) > limit:
                continue
            lows = _equal_pairs(n, dim, side, h)
            if lows is None:
                continue
            best = max(best, _pairs_max(f.values, side, lows[0], side, lows[1], s))
    return best


def essential_modulus(f: SampledFunction, delta: float) -> float:
    """max |f(x+h) - f(x)| over integer cell shifts with |h| * width <= delta."""
    if not delta > 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    v, n = f.values, f.cells_per_side
    limit = delta / f.frame.cell_width * (1 + DIAM_SLACK)
    best = 0.0
    for h in _shift_vectors(f.dim, min(int(limit), n - 1)):
        if math.sqrt(sum(x * x for x in h)) > limit:
            continue
        a = tuple(slice(max(0, -x), n - max(0, x)) for x in h)
        b = tuple(slice(max(0, x), n - max(0, -x)) for x in h)
        best = max(best, float(np.max(np.abs(v[b] - v[a]))))
    return best


def lipschitz_scale(f: SampledFunction) -> float:
    """Median absolute forward difference per cell width, pooled over axes."""
    diffs = [np.abs(np.diff(f.values, axis=i)).ravel() for i in range(f.dim)]
    pooled = np.concatenate(diffs) if diffs and f.cells_per_side > 1 else np.zeros(1)
    return float(np.median(pooled)) / f.frame.cell_width


CONTINUOUS = "CONTINUOUS-CONSISTENT"
DISCONTINUOUS = "DISCONTINUOUS-CONSISTENT"


@dataclass
class OscillationReport:
    s: float
    deltas: list[float]
    omega_big: list[float]
    modulus: list[float]
    ratio: list[float]
    verdict: str
    threshold: float
    threshold_source: str
    pair_family: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "verdict": self.verdict,
            "threshold": self.threshold,
            "threshold_source": self.threshold_source,
            "pair_family": self.pair_family,
            "profile": [
                {"delta": d, "omega_estimate": o, "modulus": m, "ratio": r}
                for d, o, m, r in zip(self.deltas, self.omega_big, self.modulus, self.ratio)
            ],
        }

    def csv_rows(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.deltas, self.omega_big, self.modulus, self.ratio))


def default_delta_grid(f: SampledFunction, count: int = 6) -> list[float]:
    """Decreasing geometric grid from side/4 down to two cell widths."""
    w = f.frame.cell_width
    top = max(f.side / 4, 2 * w)
    return sorted(np.geomspace(top, 2 * w, count).tolist(), reverse=True)


def continuity_verdict(f: SampledFunction, s: float = 0.75, delta_grid=None,
                       threshold: float | None = None,
                       sides: tuple[int, ...] = DEFAULT_SIDES) -> OscillationReport:
    """Classify f by how the pair-oscillation estimate behaves as delta shrinks.

    The verdict reads the estimate at the smallest delta: at or below the
    threshold means continuity is consistent with the data.
    """
    _check_upper_half(s)
    deltas = default_delta_grid(f) if delta_grid is None else [float(d) for d in delta_grid]
    if any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise InvalidParameter("delta_grid must be strictly decreasing")
    if threshold is None:
        w = f.frame.cell_width
        threshold = 3 * w * lipschitz_scale(f)
        source = "3 cell widths x median forward-difference slope"
    else:
        source = "caller"
    est = [omega_estimate(f, s, d, sides) for d in deltas]
    mod = [essential_modulus(f, d) for d in deltas]
    ratio = [1.0 if m == 0 and e == 0 else (e / (m / 2) if m > 0 else math.inf)
             for e, m in zip(est, mod)]
    verdict = CONTINUOUS if est[-1] <= threshold else DISCONTINUOUS
    return OscillationReport(s, deltas, est, mod, ratio, verdict, float(threshold), source,
                             {"mode": "equal", "sides": list(sides)})
