"""Stromberg-type dyadic decomposition by medians, the two-threshold packing
refinement, and the generational cascade behind the John-Nirenberg bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BetaTooSmall, HypothesisViolated, InvalidParameter
from .grid import CubeFamily, DyadicCube, SampledFunction, subdivide
from .median import maximal_median
from .sharp import SharpField, local_sharp_maximal


@dataclass(frozen=True)
class DecompositionParams:
    s: float
    t: float
    delta: float
    beta: float

    def __post_init__(self):
        if not (0 < self.s <= 0.5):
            raise InvalidParameter(f"s must lie in (0, 1/2], got {self.s}")
        if not (0.5 <= self.t <= 1 - self.s):
            raise InvalidParameter(f"t must lie in [1/2, 1-s], got {self.t}")
        if not (self.delta > 0 and self.beta > 0):
            raise InvalidParameter("delta and beta must be positive")


@dataclass
class DecompositionForest:
    root: DyadicCube
    params: DecompositionParams
    selected: list[tuple[DyadicCube, float]] = field(default_factory=list)
    discarded: list[DyadicCube] = field(default_factory=list)
    floor_cells: list[tuple[int, ...]] = field(default_factory=list)
    report: dict = field(default_factory=dict)

    @property
    def frame(self):
        return self.root.frame

    def selected_mask(self) -> np.ndarray:
        m = np.zeros(self.frame.shape, dtype=bool)
        for q, _ in self.selected:
            m[q.region.slices] = True
        return m

    def discarded_mask(self) -> np.ndarray:
        m = np.zeros(self.frame.shape, dtype=bool)
        for q in self.discarded:
            m[q.region.slices] = True
        return m

    def selected_measure(self) -> float:
        cells = sum(q.region.n_cells for q, _ in self.selected)
        return cells * self.frame.cell_volume

    def packing(self) -> float:
        return self.selected_measure() / self.root.measure

    def label_field(self) -> np.ndarray:
        """1 on selected cubes, 2 on discarded cubes, 0 elsewhere."""
        lab = np.zeros(self.frame.shape)
        lab[self.selected_mask()] = 1
        lab[self.discarded_mask()] = 2
        return lab

    def to_dict(self) -> dict:
        def cube(q):
            r = q.region
            return {"level": q.level, "index": list(q.index), "lo": list(r.lo), "length": r.length}

        return {
            "root": cube(self.root),
            "params": {"s": self.params.s, "t": self.params.t,
                       "delta": self.params.delta, "beta": self.params.beta},
            "selected": [dict(cube(q), median=m) for q, m in self.selected],
            "discarded": [cube(q) for q in self.discarded],
            "floor_cells": [list(c) for c in self.floor_cells],
            "report": self.report,
        }


def _check_sharp(sharp: SharpField, q: DyadicCube, s: float) -> None:
    if not sharp.region.contains(q.region):
        raise InvalidParameter("sharp field does not cover the cube")
    if sharp.s != s:
        raise InvalidParameter(f"sharp field computed with s={sharp.s}, params use s={s}")


def stromberg_decompose(f: SampledFunction, q: DyadicCube, p: DecompositionParams,
                        sharp: SharpField) -> DecompositionForest:
    """Dyadic selection of subcubes of ``q`` whose t-median leaves [-delta, delta].

    Children fully inside {sharp > beta} are discarded, children with
    |median| > delta are collected, the rest are halved again. A single cell
    that is neither discarded nor collected ends up in ``floor_cells``.
    """
    _check_sharp(sharp, q, p.s)
    root_median = maximal_median(f.restrict(q.region), p.t)
    if abs(root_median) > p.delta:
        raise HypothesisViolated(f"|m_f(t,Q)| = {abs(root_median)} exceeds delta = {p.delta}")
    forest = DecompositionForest(q, p)
    if np.all(sharp.on(q.region) > p.beta):
        forest.discarded.append(q)
    else:
        stack = list(reversed(subdivide(q))) if q.length > 1 else []
        if q.length == 1:
            forest.floor_cells.append(q.region.lo)
        while stack:
            child = stack.pop()
            region = child.region
            if np.all(sharp.on(region) > p.beta):
                forest.discarded.append(child)
                continue
            m = maximal_median(f.restrict(region), p.t)
            if abs(m) > p.delta:
                forest.selected.append((child, m))
            elif child.length == 1:
                forest.floor_cells.append(region.lo)
            else:
                stack.extend(reversed(subdivide(child)))
    forest.selected.sort(key=lambda item: (item[0].level, item[0].index))
    forest.discarded.sort(key=lambda c: (c.level, c.index))
    forest.report = _postconditions(f, forest, sharp, root_median)
    return forest


def _postconditions(f, forest: DecompositionForest, sharp: SharpField, root_median: float) -> dict:
    p = forest.params
    n = forest.frame.dim
    upper = p.delta + 10 * n * p.beta
    cond1 = all(np.any(sharp.on(q.region) <= p.beta) for q, _ in forest.selected)
    lower_ok = all(abs(m) > p.delta for _, m in forest.selected)
    upper_bad = [(q, m) for q, m in forest.selected if abs(m) > upper]
    sel, dis = forest.selected_mask(), forest.discarded_mask()
    coverage = np.zeros(forest.frame.shape, dtype=int)
    for q, _ in forest.selected:
        coverage[q.region.slices] += 1
    outside = forest.root.region.mask() & ~sel & ~dis
    cond3 = bool(np.all(np.abs(f.values[outside]) <= p.delta))
    depth = max([q.level for q, _ in forest.selected] + [q.level for q in forest.discarded]
                + [forest.root.level]) - forest.root.level
    return {
        "root_median": root_median,
        "condition1": bool(cond1),
        "condition2_lower": bool(lower_ok),
        "condition2_upper": not upper_bad,
        "condition2_upper_violations": len(upper_bad),
        "condition2_upper_floor_violations": sum(1 for q, _ in upper_bad if q.length == 1),
        "condition3": cond3,
        "nonoverlapping": bool(coverage.max(initial=0) <= 1),
        "packing": forest.packing(),
        "depth": depth,
        "n_selected": len(forest.selected),
        "n_discarded": len(forest.discarded),
        "n_floor_cells": len(forest.floor_cells),
    }


def postconditions_hold(forest: DecompositionForest) -> bool:
    r = forest.report
    return all(r[k] for k in ("condition1", "condition2_lower", "condition2_upper",
                              "condition3", "nonoverlapping"))


@dataclass
class TwoThresholdResult:
    generation_j: DecompositionForest
    generation_k: DecompositionForest
    packing: float
    checks: dict
    beta: float
    eta: float
    delta1: float
    delta2: float
    median: float


def two_threshold_decompose(f: SampledFunction, q: DyadicCube | None = None, s: float = 0.25,
                            t: float = 0.5, beta: float | None = None, eta: float | None = None,
                            family: CubeFamily | None = None,
                            sharp: SharpField | None = None) -> TwoThresholdResult:
    """Decompose f - m_f(t,q) at delta1 = 4 beta + 2 eta and delta2 = 2 delta1 + 10 n beta."""
    q = DyadicCube.root(f.frame) if q is None else q
    if sharp is None:
        sharp = local_sharp_maximal(f, q.region, s, family)
    _check_sharp(sharp, q, s)
    sup = float(sharp.on(q.region).max())
    if beta is None:
        beta = sup
    if beta < sup:
        raise BetaTooSmall(f"beta = {beta} is below sup of the sharp function {sup}")
    vals = f.restrict(q.region)
    if beta == 0:
        # constant on q: any positive thresholds give empty families
        beta = 1e-12 * (1.0 + float(np.max(np.abs(vals))))
    eta = beta / 10 if eta is None else eta
    if not eta > 0:
        raise InvalidParameter("eta must be positive")
    n = f.dim
    med = maximal_median(vals, t)
    g = f.with_values(f.values - med)
    d1 = 4 * beta + 2 * eta
    d2 = 2 * d1 + 10 * n * beta
    fj = stromberg_decompose(g, q, DecompositionParams(s, t, d1, beta), sharp)
    fk = stromberg_decompose(g, q, DecompositionParams(s, t, d2, beta), sharp)

    mj, mk = fj.selected_mask(), fk.selected_mask()
    level = 2 * beta + eta
    gv = g.values
    in_q = q.region.mask()
    near_root = in_q & (np.abs(gv) <= level)
    near_j = np.zeros_like(mj)
    for cube, m in fj.selected:
        sl = cube.region.slices
        near_j[sl] |= np.abs(gv[sl] - m) <= level
    near_k = np.zeros_like(mk)
    for cube, m in fk.selected:
        sl = cube.region.slices
        near_k[sl] |= np.abs(gv[sl] - m) <= level
    packing = fk.packing()
    checks = {
        "nested": bool(np.all(mj[mk])),
        "disjoint_root_j": not bool(np.any(near_root & near_j)),
        "disjoint_root_k": not bool(np.any(near_root & near_k)),
        "disjoint_j_k": not bool(np.any(near_j & near_k)),
        "packing_sharp": packing <= s / (2 * (1 - s)),
        "packing_le_s": packing <= s,
        "postconditions_j": postconditions_hold(fj),
        "postconditions_k": postconditions_hold(fk),
    }
    return TwoThresholdResult(fj, fk, packing, checks, beta, eta, d1, d2, med)


@dataclass
class CascadeReport:
    generations: list[dict]
    bound_curve: list[tuple[float, float]]
    phi: object
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "phi": str(self.phi),
            "notes": self.notes,
            "generations": [
                {k: v for k, v in g.items() if k != "cubes"} | {"n_cubes": len(g["cubes"])}
                for g in self.generations
            ],
            "bound_curve": [list(p) for p in self.bound_curve],
        }


def jn_cascade(f: SampledFunction, q: DyadicCube | None = None, s: float = 0.25,
               t: float = 0.5, phi=None, family: CubeFamily | None = None,
               max_generations: int = 64) -> CascadeReport:
    """Run generation after generation of decompositions with shrinking thresholds.

    ``f`` must already be normalized on ``q`` (norm <= 1, m_f(1-s,q) = 0);
    see :func:`medianosc.bmo.normalize`. Generation k uses
    beta_k = 2 phi(|q| / 2^(n k)) and delta_k = (10n + 9) beta_k.
    """
    from .bmo import Modulus  # bmo depends on sharp only; import here to keep layering flat

    phi = Modulus.constant(1.0) if phi is None else phi
    q = DyadicCube.root(f.frame) if q is None else q
    n = f.dim
    vals = f.restrict(q.region)
    scale = 1.0 + float(np.max(np.abs(vals)))
    if abs(maximal_median(vals, 1 - s)) > 1e-9 * scale:
        raise HypothesisViolated("f must satisfy m_f(1-s, q) = 0; normalize first")
    q_measure = q.measure
    report = CascadeReport([], [], phi)
    if np.all(vals == vals[0]):
        report.notes.append("medians constant; f a.e. constant")
        report.generations.append({"k": 0, "beta": 2 * float(phi(q_measure)), "delta": None,
                                   "cubes": [], "measure": 0.0, "within_s_power": True})
        return report

    generation = [q]
    betas: list[float] = []
    abs_f = np.abs(f.values)
    q_mask = q.region.mask()
    for k in range(max_generations + 1):
        measure = sum(c.measure for c in generation)
        lam = (20 * n + 9) * sum(betas)
        cover = np.zeros(f.frame.shape, dtype=bool)
        for c in generation:
            cover[c.region.slices] = True
        tail_inside = bool(np.all(cover[q_mask & (abs_f > lam)])) if k > 0 else True
        beta = 2 * float(phi(q_measure / 2 ** (n * k)))
        delta = (10 * n + 9) * beta
        entry = {"k": k, "beta": beta, "delta": delta, "cubes": generation,
                 "measure": measure,
                 "within_s_power": measure <= s**k * q_measure * (1 + 1e-12),
                 "tail_inside_generation": tail_inside,
                 "n_discarded": 0}
        report.generations.append(entry)
        if k > 0:
            report.bound_curve.append((lam, measure))
        if not generation:
            break
        betas.append(beta)
        nxt = []
        for cube in generation:
            if cube.length == 1:
                continue
            sub = f if k == 0 else f.with_values(f.values - maximal_median(f.restrict(cube.region), t))
            sharp = local_sharp_maximal(sub, cube.region, s, family)
            forest = stromberg_decompose(sub, cube, DecompositionParams(s, t, delta, beta), sharp)
            entry["n_discarded"] += len(forest.discarded)
            nxt.extend(c for c, _ in forest.selected)
        generation = sorted(nxt, key=lambda c: (c.level, c.index))
    measures = [g["measure"] for g in report.generations]
    report.notes.append("generation measures nonincreasing: "
                        + str(all(a >= b for a, b in zip(measures, measures[1:]))))
    return report
