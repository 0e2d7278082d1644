"""Slow reference implementations used to cross-check the fast paths.

Each oracle evaluates a definition literally (threshold scans, candidate
searches, loops over cubes) and shares nothing with the production code
except the cell-count comparison ``within_measure``.
"""
from __future__ import annotations

import itertools

import numpy as np

from .grid import CubeFamily, SampledFunction, enumerate_cubes
from .median import within_measure


def median_by_scan(values, s: float) -> float:
    """sup{m : #{v < m} <= s*M}, scanning the data values as candidate thresholds."""
    v = np.asarray(values, dtype=float).ravel()
    u = np.unique(v)
    below = np.count_nonzero(v[None, :] < u[:, None], axis=1)
    ok = [within_measure(int(b), s, v.size) for b in below]
    return float(u[ok].max())


def rearrangement_by_scan(values, cell_volume: float, lam: float) -> float:
    """inf{a >= 0 : |{|f| > a}| <= lam} scanning a over {0} and the data values."""
    a = np.abs(np.asarray(values, dtype=float).ravel())
    for alpha in np.concatenate([[0.0], np.unique(a)]):
        if within_measure(int(np.count_nonzero(a > alpha)), lam / cell_volume, 1):
            return float(alpha)
    raise AssertionError("unreachable: alpha = max|f| always qualifies")


def constant_candidates(values) -> np.ndarray:
    v = np.unique(np.asarray(values, dtype=float).ravel())
    mids = 0.5 * (v[:, None] + v[None, :])
    return np.unique(np.concatenate([v, mids.ravel()]))


def _allowed_below(p: float, count: int) -> int:
    return max(n for n in range(count + 1) if within_measure(n, p, count))


def deviation_medians(values, cands, p: float) -> np.ndarray:
    """m_|f-c|(p) for every candidate c, each by a threshold scan.

    For each c and each threshold |v_j - c| the count of smaller deviations is
    compared with the allowed cell count; the largest admissible threshold wins.
    """
    v = np.asarray(values, dtype=float).ravel()
    dev = np.abs(v[None, :] - np.asarray(cands, dtype=float)[:, None])
    below = np.count_nonzero(dev[:, None, :] < dev[:, :, None], axis=2)
    ok = below <= _allowed_below(p, v.size)
    return np.where(ok, dev, -np.inf).max(axis=1)


def omega_brute(values, s: float) -> tuple[float, float]:
    """min over candidate constants c of m_|f-c|(1-s)."""
    cands = constant_candidates(values)
    med = deviation_medians(values, cands, 1.0 - s)
    i = int(np.argmin(med))
    return float(med[i]), float(cands[i])


def pair_objective(v1, v2, s: float, cands) -> np.ndarray:
    v1, v2 = np.asarray(v1, float).ravel(), np.asarray(v2, float).ravel()
    w1 = v1.size / (v1.size + v2.size)
    return w1 * deviation_medians(v1, cands, s) + (1 - w1) * deviation_medians(v2, cands, s)


def pair_brute(v1, v2, s: float) -> float:
    """min over the full candidate set built from the union of both cubes."""
    cands = constant_candidates(np.concatenate([np.ravel(v1), np.ravel(v2)]))
    return float(pair_objective(v1, v2, s, cands).min())


def pair_dense_grid(v1, v2, s: float, points: int = 4001) -> float:
    """Dense grid search over c, topped up with the data values and midpoints."""
    allv = np.concatenate([np.ravel(v1), np.ravel(v2)])
    grid = np.linspace(allv.min(), allv.max(), points)
    grid = np.concatenate([grid, constant_candidates(allv)])
    return float(pair_objective(v1, v2, s, grid).min())


def sharp_brute(f: SampledFunction, s: float, family=CubeFamily.ALL) -> np.ndarray:
    """Per-cell max of omega_brute over every cube of ``family`` containing the cell."""
    out = np.zeros(f.frame.shape)
    for q in enumerate_cubes(f, family):
        w, _ = omega_brute(f.restrict(q), s)
        out[q.slices] = np.maximum(out[q.slices], w)
    return out


def essential_modulus_brute(f: SampledFunction, delta: float) -> float:
    """max |f(x) - f(y)| over cell pairs whose center distance is <= delta."""
    w = f.frame.cell_width
    cells = list(itertools.product(range(f.cells_per_side), repeat=f.dim))
    best = 0.0
    for x in cells:
        for y in cells:
            dist = w * np.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
            if dist <= delta * (1 + 1e-12):
                best = max(best, abs(float(f.values[x]) - float(f.values[y])))
    return best
