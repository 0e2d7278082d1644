"""Sampled functions on uniform grids, grid-aligned cubes and dyadic bookkeeping.

A function is stored as one value per cell and treated as constant on each
cell, so measures are always (integer cell count) x (cell volume).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import FamilyTooLarge, IndivisibleCube, InvalidParameter

DEFAULT_FAMILY_CAP = 2_000_000


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridFrame:
    dim: int
    origin: tuple[float, ...]
    side: float
    cells_per_side: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameter(f"dim must be positive, got {self.dim}")
        if self.cells_per_side < 1:
            raise InvalidParameter("cells_per_side must be positive")
        if not (self.side > 0 and math.isfinite(self.side)):
            raise InvalidParameter(f"side must be a positive finite number, got {self.side}")
        if len(self.origin) != self.dim:
            raise InvalidParameter("origin length must equal dim")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells_per_side,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.cells_per_side**self.dim

    @property
    def cell_width(self) -> float:
        return self.side / self.cells_per_side

    @property
    def cell_volume(self) -> float:
        return self.cell_width**self.dim

    @property
    def volume(self) -> float:
        return self.n_cells * self.cell_volume

    def cell_centers(self) -> list[np.ndarray]:
        """Per-axis coordinates of cell centers."""
        w = self.cell_width
        return [o + (np.arange(self.cells_per_side) + 0.5) * w for o in self.origin]

    def whole(self) -> "CubeRegion":
        return CubeRegion(self, (0,) * self.dim, self.cells_per_side)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real values on the cells of a uniform grid over a cube Q0.

    ``values`` has shape ``(N,) * dim``; ``values.ravel()`` is the row-major
    flat layout used by the field file format.
    """

    frame: GridFrame
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.size != self.frame.n_cells:
            raise InvalidParameter(
                f"expected {self.frame.n_cells} values, got {arr.size}"
            )
        arr = arr.reshape(self.frame.shape)
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_values(cls, values, origin: Sequence[float] | None = None, side: float = 1.0):
        arr = np.asarray(values, dtype=np.float64)
        dim = arr.ndim
        if dim == 0 or len(set(arr.shape)) != 1:
            raise InvalidParameter(f"values must be a cube-shaped array, got shape {arr.shape}")
        if origin is None:
            origin = (0.0,) * dim
        frame = GridFrame(dim, tuple(float(o) for o in origin), float(side), arr.shape[0])
        return cls(frame, arr)

    @classmethod
    def from_callable(cls, func: Callable, dim: int, n: int,
                      origin: Sequence[float] | None = None, side: float = 1.0):
        """Sample ``func`` at cell centers. ``func`` receives one array per axis."""
        if origin is None:
            origin = (0.0,) * dim
        frame = GridFrame(dim, tuple(float(o) for o in origin), float(side), n)
        axes = np.meshgrid(*frame.cell_centers(), indexing="ij")
        vals = np.broadcast_to(np.asarray(func(*axes), dtype=np.float64), frame.shape)
        return cls(frame, vals)

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.frame, values)

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def cells_per_side(self) -> int:
        return self.frame.cells_per_side

    @property
    def side(self) -> float:
        return self.frame.side

    @property
    def origin(self) -> tuple[float, ...]:
        return self.frame.origin

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def restrict(self, region: "CubeRegion") -> np.ndarray:
        """Flat copy of the values on ``region``."""
        return np.ascontiguousarray(self.values[region.slices]).ravel()


@dataclass(frozen=True)
class CubeRegion:
    """A grid-aligned cube: ``length`` cells per axis starting at cell ``lo``."""

    frame: GridFrame = field(repr=False)
    lo: tuple[int, ...]
    length: int

    def __post_init__(self):
        lo = tuple(int(i) for i in self.lo)
        object.__setattr__(self, "lo", lo)
        if len(lo) != self.frame.dim:
            raise InvalidParameter("lo must have one entry per axis")
        if self.length < 1:
            raise InvalidParameter("cube length must be positive")
        n = self.frame.cells_per_side
        for i in lo:
            if i < 0 or i + self.length > n:
                raise InvalidParameter(f"cube lo={lo} len={self.length} exceeds grid of {n}")

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(i + self.length for i in self.lo)

    @property
    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(i, i + self.length) for i in self.lo)

    @property
    def n_cells(self) -> int:
        return self.length**self.dim

    @property
    def measure(self) -> float:
        return self.n_cells * self.frame.cell_volume

    @property
    def diam(self) -> float:
        return self.length * self.frame.cell_width * math.sqrt(self.dim)

    def contains_cell(self, cell: Sequence[int]) -> bool:
        return all(l <= c < l + self.length for l, c in zip(self.lo, cell))

    def contains(self, other: "CubeRegion") -> bool:
        return all(a <= b and b + other.length <= a + self.length
                   for a, b in zip(self.lo, other.lo))

    def mask(self) -> np.ndarray:
        m = np.zeros(self.frame.shape, dtype=bool)
        m[self.slices] = True
        return m


def measure(q: CubeRegion) -> float:
    return q.measure


@dataclass(frozen=True)
class DyadicCube:
    """Cube ``index`` at dyadic ``level`` of the frame (level 0 is the whole grid)."""

    frame: GridFrame = field(repr=False)
    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))
        n = self.frame.cells_per_side
        if self.level < 0 or n % (1 << self.level):
            raise InvalidParameter(f"level {self.level} not aligned with {n} cells per side")
        if len(self.index) != self.frame.dim or not all(0 <= i < (1 << self.level) for i in self.index):
            raise InvalidParameter(f"bad dyadic index {self.index} at level {self.level}")

    @property
    def length(self) -> int:
        return self.frame.cells_per_side >> self.level

    @property
    def region(self) -> CubeRegion:
        return CubeRegion(self.frame, tuple(i * self.length for i in self.index), self.length)

    @property
    def measure(self) -> float:
        return self.region.measure

    @classmethod
    def root(cls, frame: GridFrame) -> "DyadicCube":
        return cls(frame, 0, (0,) * frame.dim)


def subdivide(q: DyadicCube) -> list[DyadicCube]:
    """The 2^n dyadic children of ``q`` in lexicographic index order."""
    if q.length < 2 or q.length % 2:
        raise IndivisibleCube(f"cannot halve a cube of length {q.length}")
    return [
        DyadicCube(q.frame, q.level + 1, tuple(2 * i + b for i, b in zip(q.index, bits)))
        for bits in itertools.product((0, 1), repeat=q.frame.dim)
    ]


def dyadic_tower(frame: GridFrame, cell: Sequence[int]) -> list[DyadicCube]:
    """Nested dyadic cubes containing ``cell``, from the whole grid down to the cell."""
    n = frame.cells_per_side
    if not is_power_of_two(n):
        raise InvalidParameter("dyadic towers need a power-of-two grid")
    depth = n.bit_length() - 1
    return [
        DyadicCube(frame, k, tuple(c // (n >> k) for c in cell)) for k in range(depth + 1)
    ]


class CubeFamily(enum.Enum):
    ALL = "all"
    DYADIC = "dyadic"
    DYADIC_SHIFTED = "dyadic-shifted"


def family_lows(region: CubeRegion, family: CubeFamily) -> list[tuple[int, np.ndarray]]:
    """Cube lows of ``family`` inside ``region`` grouped by length.

    Returns ``[(length, lows), ...]`` with lengths increasing and ``lows`` an
    integer array of shape ``(K, dim)`` in lexicographic order.
    """
    family = CubeFamily(family)
    n = region.length
    if family is CubeFamily.ALL:
        plan = [(length, 1) for length in range(1, n + 1)]
    else:
        if not is_power_of_two(n):
            raise InvalidParameter(f"{family.value} family needs a power-of-two region, got {n}")
        lengths = [1 << p for p in range(n.bit_length())]
        if family is CubeFamily.DYADIC:
            plan = [(length, length) for length in lengths]
        else:
            plan = [(length, max(length // 2, 1)) for length in lengths]
    out = []
    base = np.asarray(region.lo)
    for length, step in plan:
        starts = np.arange(0, n - length + 1, step)
        grids = np.meshgrid(*([starts] * region.dim), indexing="ij")
        lows = np.stack([g.ravel() for g in grids], axis=1) + base
        out.append((length, lows))
    return out


def family_size(region: CubeRegion, family: CubeFamily) -> int:
    family = CubeFamily(family)
    n, d = region.length, region.dim
    if family is CubeFamily.ALL:
        return sum((n - length + 1) ** d for length in range(1, n + 1))
    return sum(len(lows) for _, lows in family_lows(region, family))


def enumerate_cubes(f: SampledFunction | GridFrame, family: CubeFamily,
                    region: CubeRegion | None = None,
                    cap: int = DEFAULT_FAMILY_CAP) -> Iterator[CubeRegion]:
    """Yield every cube of ``family`` inside ``region`` ordered by (length, lo)."""
    frame = f.frame if isinstance(f, SampledFunction) else f
    region = frame.whole() if region is None else region
    count = family_size(region, family)
    if count > cap:
        raise FamilyTooLarge(f"{CubeFamily(family).value} family has {count} cubes (cap {cap})")
    for length, lows in family_lows(region, family):
        for lo in lows:
            yield CubeRegion(frame, tuple(lo), length)


def cube_values(values: np.ndarray, length: int, lows: np.ndarray) -> np.ndarray:
    """Gather the cells of many equal cubes into a ``(K, length**dim)`` array."""
    dim = values.ndim
    windows = sliding_window_view(values, (length,) * dim)
    picked = windows[tuple(lows[:, i] for i in range(dim))]
    return picked.reshape(len(lows), length**dim)
