"""Local sharp maximal function restricted to a cube.

The value at a cell is the largest best-constant oscillation over all cubes
of the chosen family that contain the cell and lie inside the region.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import FamilyTooLarge
from .grid import (DEFAULT_FAMILY_CAP, CubeFamily, CubeRegion, SampledFunction,
                   cube_values, family_lows, family_size, is_power_of_two)
from .median import _check_lower_half, window_oscillation

# max number of gathered values sorted in one batch
CHUNK_ELEMENTS = 1 << 22


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MEDIANOSC_THREADS", "1")))
    except ValueError:
        return 1


def default_family(region: CubeRegion) -> CubeFamily:
    n, d = region.length, region.dim
    if (d == 1 and n <= 64) or (d == 2 and n <= 32) or not is_power_of_two(n):
        return CubeFamily.ALL
    return CubeFamily.DYADIC_SHIFTED


def _omega_for_length(values: np.ndarray, length: int, lows: np.ndarray, s: float) -> np.ndarray:
    per_cube = length**values.ndim
    step = max(1, CHUNK_ELEMENTS // per_cube)
    out = np.empty(len(lows))
    for start in range(0, len(lows), step):
        rows = np.sort(cube_values(values, length, lows[start:start + step]), axis=1)
        out[start:start + step] = window_oscillation(rows, s)[0]
    return out


def oscillations_by_length(f: SampledFunction, s: float, family: CubeFamily | None = None,
                           region: CubeRegion | None = None, cap: int = DEFAULT_FAMILY_CAP):
    """Best-constant oscillation of every cube in the family, grouped by length.

    Returns ``[(length, lows, omega), ...]``.
    """
    _check_lower_half(s)
    region = f.frame.whole() if region is None else region
    family = default_family(region) if family is None else CubeFamily(family)
    count = family_size(region, family)
    if count > cap:
        raise FamilyTooLarge(f"{family.value} family has {count} cubes (cap {cap})")
    plan = family_lows(region, family)

    def work(item):
        length, lows = item
        return length, lows, _omega_for_length(f.values, length, lows, s)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(work, plan))
    return [work(item) for item in plan]


@dataclass(frozen=True, eq=False)
class SharpField:
    values: np.ndarray
    family: CubeFamily
    s: float
    region: CubeRegion

    @property
    def sup(self) -> float:
        return float(self.values.max())

    @property
    def inf(self) -> float:
        return float(self.values.min())

    def on(self, sub: CubeRegion) -> np.ndarray:
        """Values on a subcube of the region."""
        rel = tuple(slice(a - b, a - b + sub.length) for a, b in zip(sub.lo, self.region.lo))
        return self.values[rel]

    def as_function(self) -> SampledFunction:
        """The field as a sampled function on the region's own grid."""
        fr = self.region.frame
        w = fr.cell_width
        origin = tuple(o + l * w for o, l in zip(fr.origin, self.region.lo))
        return SampledFunction.from_values(self.values, origin, self.region.length * w)


def local_sharp_maximal(f: SampledFunction, region: CubeRegion | None = None, s: float = 0.5,
                        family: CubeFamily | None = None,
                        cap: int = DEFAULT_FAMILY_CAP) -> SharpField:
    region = f.frame.whole() if region is None else region
    family = default_family(region) if family is None else CubeFamily(family)
    n, d = region.length, region.dim
    field = np.zeros((n,) * d)
    base = np.asarray(region.lo)
    for length, lows, omega in oscillations_by_length(f, s, family, region, cap):
        # scatter each cube's value at its low corner, then take the max over
        # all corners whose cube covers the cell
        corner = np.full((n,) * d, -np.inf)
        rel = lows - base
        corner[tuple(rel[:, i] for i in range(d))] = omega
        spread = ndimage.maximum_filter(corner, size=length, mode="constant",
                                        cval=-np.inf, origin=(length - 1) // 2)
        np.maximum(field, spread, out=field)
    field.setflags(write=False)
    return SharpField(field, family, s, region)


def sharp_infimum(f: SampledFunction, region: CubeRegion | None = None, s: float = 0.5,
                  family: CubeFamily | None = None) -> float:
    return local_sharp_maximal(f, region, s, family).inf
