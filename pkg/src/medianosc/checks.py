"""Randomized property suites shared by the CLI ``propcheck`` command and the tests.

Every suite returns a :class:`SuiteResult`; a violation records enough of the
instance to reproduce it.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .corpus import NAMES, CorpusSpec, generate
from .decompose import DecompositionParams, postconditions_hold, stromberg_decompose
from .decompose import two_threshold_decompose
from .grid import CubeFamily, CubeRegion, DyadicCube, SampledFunction, family_lows, subdivide
from .median import (at_least_measure, best_constant_oscillation, defining_counts,
                     is_integral_rank, maximal_median, median_rearrangement_identity,
                     oscillation_about_median)
from .oracles import omega_brute, pair_dense_grid
from .oscillation import CubePair, best_constant_pair
from .sharp import local_sharp_maximal

# s, t, s1 are drawn on this dyadic grid so that s*M is never within rounding of an integer
PARAM_DENOM = 1 << 16
S_GRID = (1 / 8, 1 / 4, 1 / 2)


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list = field(default_factory=list)
    skipped: int = 0
    seconds: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "violations": len(self.violations),
                "skipped": self.skipped,
                "ok": self.ok, "first_violations": self.violations[:5], "info": self.info}


def random_values(rng: np.random.Generator, m: int, nonneg: bool = False) -> np.ndarray:
    """Mixed atomic/continuous samples on a dyadic grid (all arithmetic stays exact)."""
    kind = rng.integers(0, 4)
    if kind == 0:
        v = rng.integers(-3, 4, m).astype(float)
    elif kind == 1:
        v = np.round(rng.normal(0, 4, m) * 1024) / 1024
    elif kind == 2:
        atoms = rng.integers(-8, 9, int(rng.integers(1, 4))).astype(float)
        v = np.where(rng.random(m) < 0.6, rng.choice(atoms, m),
                     np.round(rng.uniform(-8, 8, m) * 256) / 256)
    else:
        v = np.round(rng.exponential(2, m) * 512) / 512 * rng.choice([-1.0, 1.0], m)
    return np.abs(v) if nonneg else v


def random_param(rng, lo: float = 0.0, hi: float = 1.0) -> float:
    """Uniform on the open dyadic grid inside (lo, hi)."""
    a = int(np.floor(lo * PARAM_DENOM)) + 1
    b = int(np.ceil(hi * PARAM_DENOM)) - 1
    return int(rng.integers(a, b + 1)) / PARAM_DENOM


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rule_instance(prop: str, rng: np.random.Generator):
    """One random instance of one property; returns (holds, context)."""
    m = int(rng.integers(1, 257))
    v = random_values(rng, m)
    s = random_param(rng)
    if prop == "monotone_in_s":
        s, t = sorted((random_param(rng), random_param(rng)))
        if s == t:
            t = min(t + 1 / PARAM_DENOM, 1 - 1 / PARAM_DENOM)
        return maximal_median(v, s) <= maximal_median(v, t), {"v": v, "s": s, "t": t}
    if prop == "defining":
        return all(defining_counts(v, s)["holds"].values()), {"v": v, "s": s}
    if prop == "monotone_in_f":
        w = v + np.abs(random_values(rng, m))
        return maximal_median(v, s) <= maximal_median(w, s), {"v": v, "w": w, "s": s}
    if prop == "translation":
        c = float(rng.choice(v)) + random_param(rng) * float(rng.choice([-3.0, 3.0]))
        return maximal_median(v - c, s) == maximal_median(v, s) - c, {"v": v, "s": s, "c": c}
    if prop == "subadditive":
        f, g = random_values(rng, m, True), random_values(rng, m, True)
        s = random_param(rng, 0.5, 1.0)
        s1 = random_param(rng, 1.0 - s + 2 / PARAM_DENOM, 1.0)
        t = random_param(rng, 0.0, s + s1 - 1)
        holds = maximal_median(f + g, t) <= maximal_median(f, s) + maximal_median(g, s1)
        return holds, {"f": f, "g": g, "s": s, "s1": s1, "t": t}
    if prop == "sign_bound":
        # shift so the median is <= 0 (exact: dyadic values)
        v = v - maximal_median(v, s) - np.abs(float(rng.choice(v))) * float(rng.integers(0, 2))
        mf = maximal_median(v, s)
        return mf <= 0 and abs(mf) <= maximal_median(np.abs(v), 1 - s), {"v": v, "s": s}
    if prop == "abs_bound":
        s = random_param(rng, 0.5, 1.0) if rng.random() < 0.9 else 0.5
        return abs(maximal_median(v, s)) <= maximal_median(np.abs(v), s), {"v": v, "s": s}
    if prop == "mean_bound":
        a = np.abs(v)
        lhs = Fraction(maximal_median(a, s)) * (1 - Fraction(s)) * m
        return lhs <= sum(Fraction(x) for x in a.tolist()), {"v": a, "s": s}
    raise KeyError(prop)


MEDIAN_RULES = ("monotone_in_s", "monotone_in_f", "translation", "subadditive", "sign_bound", "abs_bound", "mean_bound", "defining")


@_timed
def suite_median_rules(cases: int = 1000, seed: int = 0) -> SuiteResult:
    """Monotonicity, translation, subadditivity, absolute-value and mean bounds,
    ``cases`` instances per property."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("median-rules")
    for prop in MEDIAN_RULES:
        for _ in range(cases):
            holds, ctx = _rule_instance(prop, rng)
            res.cases += 1
            if not holds:
                res.violations.append({"property": prop, **{k: (v.tolist() if isinstance(
                    v, np.ndarray) else v) for k, v in ctx.items()}})
    res.info = {"properties": list(MEDIAN_RULES), "per_property": cases}
    return res


@_timed
def suite_identity(cases: int = 1000, seed: int = 0) -> SuiteResult:
    """(1-s)-median of |f| against the rearrangement at s|Q|, off integral s*M."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("identity")
    boundary = []
    while res.cases < cases:
        m = int(rng.integers(1, 257))
        v = random_values(rng, m)
        # a fifth of the draws sit on the boundary on purpose so it gets logged
        s = int(rng.integers(1, m)) / m if m > 1 and rng.random() < 0.2 else random_param(rng)
        if is_integral_rank(s, m):
            left, right = median_rearrangement_identity(v, s)
            boundary.append({"M": m, "s": s, "equal": left == right})
            res.skipped += 1
            continue
        res.cases += 1
        left, right = median_rearrangement_identity(v, s)
        if left != right:
            res.violations.append({"v": v.tolist(), "s": s, "left": left, "right": right})
    res.info = {"boundary_cases": len(boundary),
                "boundary_equal": sum(b["equal"] for b in boundary),
                "boundary_log": boundary[:20]}
    return res


@_timed
def suite_window(cases: int = 500, seed: int = 0) -> SuiteResult:
    """Sliding-window oscillation against the candidate-constant oracle, plus the
    sandwich between the best constant and the (1-s)-median as centre."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("window")
    for _ in range(cases):
        m = int(rng.integers(1, 65))
        v = random_values(rng, m)
        s = random_param(rng, 0, 0.5) if rng.random() < 0.8 else 0.5
        got = best_constant_oscillation(v, s)
        ref, _ = omega_brute(v, s)
        about = oscillation_about_median(v, s)
        check_c = maximal_median(np.abs(v - got.best_c), 1 - s)
        if got.omega != ref or check_c != got.omega:
            res.violations.append({"kind": "oracle", "v": v.tolist(), "s": s,
                                   "window": got.omega, "oracle": ref})
        if not (got.omega <= about <= 2 * got.omega):
            res.violations.append({"kind": "sandwich", "v": v.tolist(), "s": s})
        res.cases += 1
    return res


@_timed
def suite_pair(cases: int = 200, seed: int = 0, tol: float = 1e-12) -> SuiteResult:
    """Exact pair minimization against a dense grid search over the constant."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("pair")
    for _ in range(cases):
        n = int(rng.integers(4, 33))
        f = SampledFunction.from_values(random_values(rng, n))
        l1, l2 = (int(rng.integers(1, n // 2 + 1)) for _ in range(2))
        a = int(rng.integers(0, n - l1 - l2 + 1))
        b = int(rng.integers(a + l1, n - l2 + 1))
        pair = CubePair(CubeRegion(f.frame, (a,), l1), CubeRegion(f.frame, (b,), l2))
        s = random_param(rng, 0.5, 1.0)
        _, value = best_constant_pair(f, pair, s)
        dense = pair_dense_grid(f.restrict(pair.q1), f.restrict(pair.q2), s, points=2001)
        if abs(value - dense) > tol:
            res.violations.append({"values": f.flat.tolist(), "pair": [a, l1, b, l2], "s": s,
                                   "exact": value, "dense": dense})
        res.cases += 1
    return res


def block_field(rng: np.random.Generator, dim: int, n: int) -> SampledFunction:
    """Random block field: 2..5 dyadic-rational levels on a coarse block grid."""
    blocks = int(rng.choice([b for b in (2, 4, 8, 16) if b <= n]))
    levels = int(rng.integers(2, 6))
    coarse = rng.integers(0, levels, (blocks,) * dim) * float(rng.choice([0.5, 1.0, 2.0]))
    return SampledFunction.from_values(np.kron(coarse, np.ones((n // blocks,) * dim)))


def _deviation_ok(f, region, sharp_inf, s, t, eta):
    """Count test for one cube: strict '< s|Q|' read as count below the cell mass s*M."""
    v = f.restrict(region)
    m = maximal_median(v, t)
    count = int(np.count_nonzero(np.abs(v - m) >= 2 * sharp_inf + eta))
    return not at_least_measure(count, s, v.size), count


@_timed
def suite_median_bounds(fields: int = 200, seed: int = 0, s_grid=S_GRID,
                 max_side: dict | None = None) -> SuiteResult:
    """Median deviation bound on a cube and the nested-median bound on dyadic pairs.

    Each field is a random block field (1D or 2D, 64 to 256 cells per side).
    For each s the sharp function is evaluated with the ALL family on a
    random dyadic cube Q1 (sides capped so ALL stays feasible); the deviation
    bound is checked on Q1 and on descendants Q0, and the nested bound on every
    (Q0, Q1) pair at depths 1..3.
    """
    rng = np.random.default_rng(seed)
    cap = {1: 256, 2: 64} if max_side is None else max_side
    res = SuiteResult("median-bounds")
    tally = {}
    for i in range(fields):
        dim = 1 if i % 2 == 0 else 2
        n = int(rng.choice([64, 128, 256]))
        f = block_field(rng, dim, n)
        depth = n.bit_length() - 1
        scale = 1.0 + float(np.max(np.abs(f.values)))
        eta = 1e-9 * scale
        for s in s_grid:
            min_level = max(0, depth - (cap[dim].bit_length() - 1))
            lev1 = int(rng.integers(min_level, depth - 1))
            q1 = DyadicCube(f.frame, lev1, tuple(rng.integers(0, 1 << lev1, dim)))
            sharp1 = local_sharp_maximal(f, q1.region, s, CubeFamily.ALL)
            ts = sorted({0.5, 1 - s, random_param(rng, 0.5, 1 - s) if s < 0.5 else 0.5})
            cube = q1
            for d in range(1, min(3, depth - lev1) + 1):
                cube = subdivide(cube)[int(rng.integers(0, 2**dim))]
                sharp0 = local_sharp_maximal(f, cube.region, s, CubeFamily.ALL)
                a01 = float(sharp1.on(cube.region).min())
                for t in ts:
                    key = (dim, s)
                    tally.setdefault(key, [0, 0])
                    for region, inf_ in ((q1.region, sharp1.inf), (cube.region, sharp0.inf)):
                        ok, count = _deviation_ok(f, region, inf_, s, t, eta)
                        res.cases += 1
                        tally[key][0] += 1
                        if not ok:
                            tally[key][1] += 1
                            res.violations.append({"bound": "deviation", "field": i, "dim": dim,
                                                   "n": n, "s": s, "t": t, "lo": region.lo,
                                                   "len": region.length, "count": count})
                    lhs = abs(maximal_median(f.restrict(cube.region), t)
                              - maximal_median(f.restrict(q1.region), t))
                    rhs = 10 * dim * d * a01
                    res.cases += 1
                    tally[key][0] += 1
                    if lhs > rhs:
                        tally[key][1] += 1
                        res.violations.append({"bound": "nested", "field": i, "dim": dim, "n": n,
                                               "s": s, "t": t, "q1": [q1.level, q1.index],
                                               "q0": [cube.level, cube.index],
                                               "lhs": lhs, "rhs": rhs})
    res.info = {"by_dim_s": {f"dim={k[0]} s={k[1]}": {"checks": v[0], "violations": v[1]}
                             for k, v in sorted(tally.items())}}
    return res


@_timed
def suite_deviation_all_cubes(fields: int = 20, seed: int = 0) -> SuiteResult:
    """Deviation bound on every ALL-family cube of small fields, using the cube's own
    best-constant oscillation as the (smaller, hence stricter) threshold."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("deviation-all-cubes")
    for i in range(fields):
        dim = 1 + i % 2
        n = 32 if dim == 1 else 8
        f = block_field(rng, dim, n)
        for s in S_GRID:
            for t in (0.5, 1 - s):
                for length, lows in family_lows(f.frame.whole(), CubeFamily.ALL):
                    for lo in lows:
                        region = CubeRegion(f.frame, tuple(lo), int(length))
                        om = best_constant_oscillation(f.restrict(region), s).omega
                        ok, count = _deviation_ok(f, region, om, s, t, 1e-9)
                        res.cases += 1
                        if not ok:
                            res.violations.append({"field": i, "s": s, "t": t,
                                                   "lo": region.lo, "len": region.length})
    return res


def corpus_fields(dims=((1, 256), (2, 64)), seed: int = 3):
    for name in NAMES:
        for dim, n in dims:
            if name == "checkerboard" and dim == 1:
                continue
            yield name, dim, generate(CorpusSpec(name, dim, n, seed=seed))


@_timed
def suite_decomposition(seed: int = 3, dims=((1, 256), (2, 64)),
                 decades=(1e-2, 1e-1, 1.0)) -> SuiteResult:
    """Decomposition postconditions on the corpus over s, delta and beta grids.

    Each field is first centred at its 1/2-median so the root hypothesis holds;
    delta and beta are fractions of max|f - m|.
    """
    res = SuiteResult("decomposition")
    floor_only = 0
    for name, dim, f0 in corpus_fields(dims, seed):
        q = DyadicCube.root(f0.frame)
        f = f0.with_values(f0.values - maximal_median(f0.flat, 0.5))
        scale = float(np.abs(f.values).max()) or 1.0
        for s in S_GRID:
            sharp = local_sharp_maximal(f, None, s, CubeFamily.ALL)
            for d, b in itertools.product(decades, decades):
                p = DecompositionParams(s, 0.5, d * scale, b * scale)
                forest = stromberg_decompose(f, q, p, sharp)
                res.cases += 1
                if not postconditions_hold(forest):
                    r = forest.report
                    if r["condition2_upper_violations"] == r["condition2_upper_floor_violations"] \
                            and all(r[k] for k in ("condition1", "condition2_lower",
                                                   "condition3", "nonoverlapping")):
                        floor_only += 1
                    res.violations.append({
                        "field": name, "dim": dim, "s": s, "delta": p.delta, "beta": p.beta,
                        "report": {k: v for k, v in r.items() if k.startswith("condition")
                                   or k == "nonoverlapping"}})
    res.info = {"floor_cell_only_violations": floor_only}
    return res


DESIGNATED = (("step", {}), ("piecewise", {"K": 4}), ("spike-block", {}))


@_timed
def suite_packing(dims=((1, 256), (2, 64)), seeds=(0, 1, 2)) -> SuiteResult:
    """Two-threshold runs at beta = sup of the sharp function on the designated corpus."""
    res = SuiteResult("packing")
    worst = 0.0
    for (name, params), (dim, n) in itertools.product(DESIGNATED, dims):
        for seed in (seeds if name == "piecewise" else seeds[:1]):
            f = generate(CorpusSpec(name, dim, n, seed=seed, params=params))
            for s in S_GRID:
                r = two_threshold_decompose(f, s=s, t=0.5, family=CubeFamily.ALL)
                res.cases += 1
                worst = max(worst, r.packing / s)
                failed = [k for k, v in r.checks.items() if not v]
                if failed:
                    res.violations.append({"field": name, "dim": dim, "seed": seed, "s": s,
                                           "packing": r.packing, "failed": failed})
    res.info = {"max_packing_over_s": worst}
    return res


SUITES = {
    "median-rules": lambda cases, seed: suite_median_rules(cases, seed),
    "identity": lambda cases, seed: suite_identity(cases, seed),
    "window": lambda cases, seed: suite_window(cases, seed),
    "pair": lambda cases, seed: suite_pair(cases, seed),
    "median-bounds": lambda cases, seed: suite_median_bounds(cases, seed),
    "decomposition": lambda cases, seed: suite_decomposition(),
    "packing": lambda cases, seed: suite_packing(),
}

# older short names accepted on the command line
ALIASES = {"prop11": "median-rules", "prop12": "identity", "lemmas": "median-bounds",
           "prop41": "decomposition"}


def run_suite(name: str, cases: int, seed: int) -> list[SuiteResult]:
    if name == "all":
        return [fn(cases, seed) for fn in SUITES.values()]
    return [SUITES[ALIASES.get(name, name)](cases, seed)]
