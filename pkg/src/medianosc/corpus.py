"""Deterministic test fields on the unit cube."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .grid import SampledFunction
from .median import rank_floor

NAMES = ("constant", "step", "two-level-step", "linear", "lipschitz", "spike", "spike-block",
         "log-singularity", "piecewise", "checkerboard")
# alternative spellings accepted on input
ALIASES = {"paper-step": "two-level-step"}


@dataclass(frozen=True)
class CorpusSpec:
    name: str
    dim: int = 1
    n: int = 256
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "name", ALIASES.get(self.name, self.name))
        if self.name not in NAMES:
            raise InvalidParameter(f"unknown corpus member {self.name!r}; choose from {NAMES}")
        if self.dim < 1 or self.n < 1:
            raise InvalidParameter("dim and n must be positive")

    def param(self, key, default):
        return self.params.get(key, default)


def _centered_block(dim: int, n: int, width: int) -> np.ndarray:
    if not 1 <= width <= n:
        raise InvalidParameter(f"spike width must be in [1, {n}], got {width}")
    out = np.zeros((n,) * dim)
    lo = (n - width) // 2 if width > 1 else n // 2
    out[(slice(lo, lo + width),) * dim] = 1.0
    return out


def generate(spec: CorpusSpec) -> SampledFunction:
    d, n = spec.dim, spec.n
    name = spec.name
    if name == "constant":
        return SampledFunction.from_values(np.full((n,) * d, float(spec.param("value", 1.0))))
    if name == "step":
        return SampledFunction.from_callable(lambda *x: (x[0] >= 0.5) * 1.0, d, n)
    if name == "two-level-step":
        return SampledFunction.from_callable(lambda *x: np.where(x[0] < 0.5, -2.0, 1.0), d, n)
    if name == "linear":
        slope = float(spec.param("slope", 1.0))
        return SampledFunction.from_callable(lambda *x: slope * sum(x), d, n)
    if name == "lipschitz":
        lip = float(spec.param("L", 1.0))

        def smooth(*x):
            prod = np.ones_like(x[0])
            for xi in x:
                prod = prod * np.sin(2 * np.pi * xi)
            return lip / (2 * np.pi) * prod

        return SampledFunction.from_callable(smooth, d, n)
    if name in ("spike", "spike-block"):
        width = int(spec.param("width", 1 if name == "spike" else 2))
        return SampledFunction.from_values(_centered_block(d, n, width))
    if name == "log-singularity":
        center = float(spec.param("center", 0.5))
        return SampledFunction.from_callable(
            lambda *x: -np.log(np.sqrt(sum((xi - center) ** 2 for xi in x))), d, n)
    if name == "piecewise":
        levels = int(spec.param("K", 4))
        blocks = int(spec.param("blocks", min(8, n)))
        if n % blocks:
            raise InvalidParameter(f"blocks ({blocks}) must divide n ({n})")
        rng = np.random.default_rng(spec.seed)
        coarse = rng.integers(0, levels, (blocks,) * d).astype(float)
        return SampledFunction.from_values(np.kron(coarse, np.ones((n // blocks,) * d)))
    # checkerboard
    block = int(spec.param("block", max(1, n // 8)))
    idx = np.indices((n,) * d) // block
    return SampledFunction.from_values(np.where(idx.sum(axis=0) % 2, 1.0, -1.0))


@dataclass(frozen=True)
class PairCounterexample:
    f: SampledFunction
    g: SampledFunction
    s: float
    s1: float
    t_boundary: float


def pair_counterexample(s: float, s1: float, n: int = 256) -> PairCounterexample:
    """Indicator pair whose zero sets are strictly larger than s and s1.

    f is 1 on the first n - floor(s n) - 1 cells and g is 1 on the next
    n - floor(s1 n) - 1 cells, so m_f(s) = m_g(s1) = 0. The sum vanishes on
    z cells and ``t_boundary = z / n`` is the smallest t with m_{f+g}(t) = 1.
    """
    if not (0 < s < 1 and 0 < s1 < 1 and s + s1 > 1):
        raise InvalidParameter("need 0 < s, s1 < 1 with s + s1 > 1")
    a = n - rank_floor(s, n) - 1
    b = n - rank_floor(s1, n) - 1
    if a < 1 or b < 1 or a + b >= n:
        raise InvalidParameter(f"n = {n} too small for s = {s}, s1 = {s1}")
    f = np.zeros(n)
    g = np.zeros(n)
    f[:a] = 1.0
    g[a:a + b] = 1.0
    return PairCounterexample(SampledFunction.from_values(f), SampledFunction.from_values(g),
                              s, s1, (n - a - b) / n)
