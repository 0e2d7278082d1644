"""Median-oscillation norms and moduli, the integral transform that shapes the
exponential-type tail bound, and tail measurement with fitted constants.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

from .errors import (DegenerateModulus, DomainError, FamilyTooLarge, InvalidParameter,
                     NonInvertible)
from .grid import (DEFAULT_FAMILY_CAP, CubeFamily, CubeRegion, SampledFunction, cube_values,
                   family_lows, family_size)
from .median import _check_lower_half, maximal_median, rank_floor, window_oscillation
from .sharp import CHUNK_ELEMENTS, default_family

QUAD_EPSREL = 1e-10
INVERSE_RTOL = 1e-12
# smallest argument probed when inverting an unbounded transform
TINY = 1e-300


class ModulusKind(enum.Enum):
    CONSTANT = "const"
    POWER = "power"
    LOG = "log"
    TABLE = "table"


@dataclass(frozen=True)
class Modulus:
    """A nondecreasing modulus phi on (0, inf).

    CONSTANT: c.  POWER: c u^a.  LOG: c / (1 + ln+(1/u)).
    TABLE: linear interpolation through (0, 0) and the given points, held
    constant past the last one.
    """

    kind: ModulusKind
    c: float = 1.0
    a: float = 1.0
    table_u: tuple[float, ...] = ()
    table_v: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise InvalidParameter(f"modulus scale must be finite and >= 0, got {self.c}")
        if self.kind is ModulusKind.POWER and not self.a > 0:
            raise InvalidParameter(f"power exponent must be positive, got {self.a}")
        if self.kind is ModulusKind.TABLE:
            u, v = np.asarray(self.table_u, float), np.asarray(self.table_v, float)
            if u.size == 0 or u.size != v.size:
                raise InvalidParameter("table needs matching nonempty u and v lists")
            if np.any(u <= 0) or np.any(np.diff(u) <= 0):
                raise InvalidParameter("table u values must be positive and increasing")
            if np.any(v < 0) or np.any(np.diff(v) < 0):
                raise InvalidParameter("table v values must be nonnegative and nondecreasing")

    @classmethod
    def constant(cls, c: float = 1.0) -> "Modulus":
        return cls(ModulusKind.CONSTANT, c=c)

    @classmethod
    def power(cls, a: float, c: float = 1.0) -> "Modulus":
        return cls(ModulusKind.POWER, c=c, a=a)

    @classmethod
    def log(cls, c: float = 1.0) -> "Modulus":
        return cls(ModulusKind.LOG, c=c)

    @classmethod
    def table(cls, us, vs) -> "Modulus":
        return cls(ModulusKind.TABLE, table_u=tuple(map(float, us)), table_v=tuple(map(float, vs)))

    @classmethod
    def parse(cls, text: str) -> "Modulus":
        """``const[:c]``, ``power:a[:c]``, ``log[:c]`` or ``table:u=v,u=v,...``."""
        head, _, rest = text.partition(":")
        try:
            if head == "const":
                return cls.constant(float(rest) if rest else 1.0)
            if head == "power":
                parts = rest.split(":")
                return cls.power(float(parts[0]), float(parts[1]) if len(parts) > 1 else 1.0)
            if head == "log":
                return cls.log(float(rest) if rest else 1.0)
            if head == "table":
                pts = [p.split("=") for p in rest.split(",") if p]
                return cls.table([float(u) for u, _ in pts], [float(v) for _, v in pts])
        except (ValueError, IndexError) as exc:
            raise InvalidParameter(f"cannot parse modulus {text!r}: {exc}") from exc
        raise InvalidParameter(f"unknown modulus kind in {text!r}")

    def __str__(self) -> str:
        if self.kind is ModulusKind.CONSTANT:
            return f"const:{self.c!r}"
        if self.kind is ModulusKind.POWER:
            return f"power:{self.a!r}:{self.c!r}"
        if self.kind is ModulusKind.LOG:
            return f"log:{self.c!r}"
        return "table:" + ",".join(f"{u!r}={v!r}" for u, v in zip(self.table_u, self.table_v))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is ModulusKind.CONSTANT:
            out = np.full_like(u, self.c)
        elif self.kind is ModulusKind.POWER:
            out = self.c * np.power(u, self.a)
        elif self.kind is ModulusKind.LOG:
            with np.errstate(divide="ignore"):
                out = self.c / (1.0 + np.maximum(0.0, -np.log(u)))
        else:
            out = np.interp(u, (0.0,) + self.table_u, (0.0,) + self.table_v)
        return out if out.ndim else float(out)

    def vanishes_near_zero(self) -> bool:
        """True when phi is identically 0 on some interval (0, e)."""
        if self.c == 0 and self.kind is not ModulusKind.TABLE:
            return True
        return self.kind is ModulusKind.TABLE and self.table_v[0] == 0


def _psi_upper(q0_measure: float, dim: int) -> float:
    return 2.0**dim * q0_measure


def psi_integral(phi: Modulus, q0_measure: float, u: float, dim: int = 1) -> float:
    """Integral of phi(v)/v from u to 2^dim |Q0|."""
    top = _psi_upper(q0_measure, dim)
    if not (0 < u <= top * (1 + 1e-15)):
        raise DomainError(f"u must lie in (0, {top}], got {u}")
    u = min(u, top)
    if phi.kind is ModulusKind.CONSTANT:
        return phi.c * math.log(top / u)
    if phi.kind is ModulusKind.POWER:
        return phi.c / phi.a * (top**phi.a - u**phi.a)
    # substitute v = e^x so the integrand is phi(e^x) on [ln u, ln top]
    lo, hi = math.log(u), math.log(top)
    points = None
    if phi.kind is ModulusKind.TABLE:
        points = [math.log(p) for p in phi.table_u if u < p < top] or None
    elif lo < 0 < hi:
        points = [0.0]
    val, _ = integrate.quad(lambda x: float(phi(math.exp(x))), lo, hi, points=points,
                            epsabs=0.0, epsrel=QUAD_EPSREL, limit=500)
    return float(val)


def psi_bound(phi: Modulus, q0_measure: float, dim: int = 1) -> float:
    """lim of the transform as u -> 0+ (math.inf when unbounded)."""
    top = _psi_upper(q0_measure, dim)
    if phi.kind is ModulusKind.CONSTANT:
        return math.inf if phi.c > 0 else 0.0
    if phi.kind is ModulusKind.POWER:
        return phi.c / phi.a * top**phi.a
    if phi.kind is ModulusKind.LOG:
        return math.inf if phi.c > 0 else 0.0
    first = phi.table_u[0]
    if first >= top:
        return phi.table_v[0] / first * top
    return phi.table_v[0] + psi_integral(phi, q0_measure, first, dim)


@dataclass(frozen=True)
class InverseResult:
    u: float
    clamped: bool


def psi_inverse(phi: Modulus, q0_measure: float, y: float, dim: int = 1,
                full_output: bool = False):
    """The u in (0, 2^dim |Q0|] with psi_integral(u) = y.

    When the transform is bounded and y exceeds its limit at 0+, the answer
    is clamped to 0 and ``clamped`` is set (only visible with full_output).
    """
    if not y >= 0:
        raise DomainError(f"y must be nonnegative, got {y}")
    if phi.vanishes_near_zero():
        raise NonInvertible("phi vanishes on an interval; the transform is not strictly monotone")
    top = _psi_upper(q0_measure, dim)
    bound = psi_bound(phi, q0_measure, dim)
    clamped = False
    if y == 0:
        u = top
    elif y >= bound:
        u, clamped = 0.0, True
    elif phi.kind is ModulusKind.CONSTANT:
        u = top * math.exp(-y / phi.c)
    elif phi.kind is ModulusKind.POWER:
        u = (top**phi.a - phi.a * y / phi.c) ** (1.0 / phi.a)
    else:
        lo = math.log(TINY)
        if psi_integral(phi, q0_measure, TINY, dim) < y:
            u, clamped = 0.0, True
        else:
            x = optimize.brentq(lambda x: psi_integral(phi, q0_measure, math.exp(x), dim) - y,
                                lo, math.log(top), xtol=1e-14, rtol=INVERSE_RTOL, maxiter=500)
            u = math.exp(x)
    return InverseResult(u, clamped) if full_output else u


def _region_and_family(f: SampledFunction, q0: CubeRegion | None, family):
    region = f.frame.whole() if q0 is None else q0
    fam = default_family(region) if family is None else CubeFamily(family)
    count = family_size(region, fam)
    if count > DEFAULT_FAMILY_CAP:
        raise FamilyTooLarge(f"{fam.value} family has {count} cubes (cap {DEFAULT_FAMILY_CAP})")
    return region, fam


def cube_statistics(f: SampledFunction, region: CubeRegion, s: float, family: CubeFamily):
    """Per cube length: (length, measure, omega, about_median, mean_osc) arrays.

    ``omega`` is the best-constant oscillation, ``about_median`` is
    m_{|f - m_f(1-s)|}(1-s) and ``mean_osc`` the average of |f - f_Q|.
    """
    vol = f.frame.cell_volume
    out = []
    for length, lows in family_lows(region, family):
        m = length**f.dim
        k = rank_floor(1.0 - s, m)
        step = max(1, CHUNK_ELEMENTS // m)
        om, ab, mo = (np.empty(len(lows)) for _ in range(3))
        for start in range(0, len(lows), step):
            sl = slice(start, start + step)
            rows = np.sort(cube_values(f.values, length, lows[sl]), axis=1)
            om[sl] = window_oscillation(rows, s)[0]
            dev = np.abs(rows - rows[:, k:k + 1])
            ab[sl] = np.partition(dev, k, axis=1)[:, k]
            mo[sl] = np.mean(np.abs(rows - rows.mean(axis=1, keepdims=True)), axis=1)
        out.append((length, m * vol, om, ab, mo))
    return out


def _cumulative_max(per_length, u_grid, pick) -> np.ndarray:
    u_grid = np.asarray(u_grid, float)
    vals = np.zeros(len(u_grid))
    for item in per_length:
        meas, v = item[1], float(pick(item).max())
        vals = np.where(u_grid >= meas * (1 - 1e-12), np.maximum(vals, v), vals)
    return vals


@dataclass
class ModulusCurve:
    u: np.ndarray
    values: np.ndarray
    family: CubeFamily
    s: float

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.u.tolist(), self.values.tolist()))


def default_u_grid(f: SampledFunction, region: CubeRegion | None = None) -> np.ndarray:
    """Cube measures of side 1, 2, 4, ... cells up to the region."""
    region = f.frame.whole() if region is None else region
    lengths = [1 << p for p in range(region.length.bit_length()) if (1 << p) <= region.length]
    return np.array([(l**f.dim) * f.frame.cell_volume for l in lengths])


def vmo_modulus(f: SampledFunction, q0: CubeRegion | None = None, s: float = 0.25,
                u_grid=None, family: CubeFamily | None = None) -> ModulusCurve:
    """phi_s(u): largest best-constant oscillation over cubes of measure <= u."""
    _check_lower_half(s)
    region, fam = _region_and_family(f, q0, family)
    u = default_u_grid(f, region) if u_grid is None else np.asarray(u_grid, float)
    if np.any(np.diff(u) <= 0):
        raise InvalidParameter("u_grid must be increasing")
    stats_ = cube_statistics(f, region, s, fam)
    return ModulusCurve(u, _cumulative_max(stats_, u, lambda it: it[2]), fam, s)


@dataclass
class NormResult:
    norm: float
    about_median: float
    family: CubeFamily
    s: float
    phi: Modulus
    argmax: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {"norm": self.norm, "about_median_norm": self.about_median,
                "family": self.family.value, "s": self.s, "phi": str(self.phi),
                "argmax_length": self.argmax[0] if self.argmax else None}


def bmo_phi_norm_detail(f: SampledFunction, q0: CubeRegion | None = None, s: float = 0.25,
                        phi: Modulus | None = None,
                        family: CubeFamily | None = None) -> NormResult:
    """Both norm expressions: best constant and centred at m_f(1-s, Q)."""
    _check_lower_half(s)
    phi = Modulus.constant(1.0) if phi is None else phi
    region, fam = _region_and_family(f, q0, family)
    best, about, arg = 0.0, 0.0, None
    for length, meas, om, ab, _ in cube_statistics(f, region, s, fam):
        scale = float(phi(meas))
        if not scale > 0:
            raise DegenerateModulus(f"phi vanishes at cube measure {meas}")
        if om.max() / scale > best:
            best, arg = float(om.max()) / scale, (length,)
        about = max(about, float(ab.max()) / scale)
    return NormResult(best, about, fam, s, phi, arg)


def bmo_phi_norm(f: SampledFunction, q0: CubeRegion | None = None, s: float = 0.25,
                 phi: Modulus | None = None, family: CubeFamily | None = None) -> float:
    return bmo_phi_norm_detail(f, q0, s, phi, family).norm


def normalize(f: SampledFunction, q0: CubeRegion | None = None, s: float = 0.25,
              phi: Modulus | None = None, family: CubeFamily | None = None):
    """(g, norm, median) with g = (f - m_f(1-s,q0)) / norm.

    A function of zero norm is only recentred.
    """
    region = f.frame.whole() if q0 is None else q0
    norm = bmo_phi_norm(f, region, s, phi, family)
    med = maximal_median(f.restrict(region), 1.0 - s)
    shifted = f.values - med
    return f.with_values(shifted / norm if norm > 0 else shifted), norm, med


@dataclass
class TailFit:
    slope: float
    intercept: float
    r2: float
    c1: float
    c2: float
    c2_reference: float
    points: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TailCurve:
    lambdas: np.ndarray
    measures: np.ndarray
    normalizer: float
    median: float
    q_measure: float
    s: float
    phi: Modulus
    dim: int
    family: CubeFamily
    fit: TailFit | None = None
    notes: list[str] = field(default_factory=list)

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.lambdas.tolist(), self.measures.tolist()))


def reference_c2(dim: int) -> float:
    return dim * math.log(2) / (2 * (4 + 10 * dim))


def _inverse_table(phi: Modulus, q0_measure: float, dim: int, lo_u: float, points: int = 401):
    """Interpolating inverse of the transform on [lo_u, 2^dim |Q0|], built from
    piecewise quadrature on a log grid (used where many inversions are needed)."""
    top = _psi_upper(q0_measure, dim)
    xs = np.linspace(math.log(lo_u), math.log(top), points)
    pieces = [integrate.quad(lambda x: float(phi(math.exp(x))), a, b, epsrel=QUAD_EPSREL)[0]
              for a, b in zip(xs[:-1], xs[1:])]
    ys = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])

    def inverse(y):
        # ys decreases along xs; beyond the table the answer is clamped to lo_u
        return np.exp(np.interp(y, ys[::-1], xs[::-1]))

    return inverse


def fit_tail(curve: TailCurve, lo: float = 1e-3, hi: float = 1e-1) -> TailFit | None:
    """Least-squares line through ln(measure) vs lambda on lo|Q| <= measure <= hi|Q|,
    plus the (c1, c2) that put c1 Psi^{-1}(c2 lambda / norm) through the same points.
    """
    q = curve.q_measure
    keep = (curve.measures >= lo * q) & (curve.measures <= hi * q) & (curve.measures > 0)
    lam, meas = curve.lambdas[keep], curve.measures[keep]
    if lam.size < 3 or np.ptp(lam) == 0:
        return None
    reg = stats.linregress(lam, np.log(meas))
    norm = curve.normalizer
    phi, dim = curve.phi, curve.dim
    top = _psi_upper(q, dim)
    if phi.kind is ModulusKind.CONSTANT and norm > 0:
        # ln(c1 top) - c2 lambda / (c norm) is exactly linear
        c2 = -reg.slope * phi.c * norm
        c1 = math.exp(reg.intercept) / top
    elif norm > 0:
        inverse = _inverse_table(phi, q, dim, lo_u=1e-12 * q)

        def resid(p):
            c1, c2 = math.exp(p[0]), math.exp(p[1])
            return np.log(c1 * inverse(c2 * lam / norm)) - np.log(meas)
        sol = optimize.least_squares(resid, x0=[0.0, math.log(reference_c2(dim))])
        c1, c2 = (math.exp(v) for v in sol.x)
    else:
        c1 = c2 = math.nan
    return TailFit(float(reg.slope), float(reg.intercept), float(reg.rvalue**2),
                   float(c1), float(c2), reference_c2(dim), int(lam.size))


def jn_tail(f: SampledFunction, q: CubeRegion | None = None, s: float = 0.25, lambda_grid=None,
            phi: Modulus | None = None, family: CubeFamily | None = None,
            fit_range: tuple[float, float] = (1e-3, 1e-1)) -> TailCurve:
    """Measures of {|f - m_f(1-s,q)| > lambda}, exact cell counts, with a fitted tail."""
    _check_lower_half(s)
    phi = Modulus.constant(1.0) if phi is None else phi
    region, fam = _region_and_family(f, q, family)
    vals = f.restrict(region)
    med = maximal_median(vals, 1.0 - s)
    dev = np.sort(np.abs(vals - med))
    if lambda_grid is None:
        lam = np.linspace(0.0, float(dev[-1]), 257)
    else:
        lam = np.asarray(lambda_grid, float)
        if np.any(np.diff(lam) <= 0):
            raise InvalidParameter("lambda_grid must be increasing")
    counts = dev.size - np.searchsorted(dev, lam, side="right")
    measures = counts * f.frame.cell_volume
    norm = bmo_phi_norm(f, region, s, phi, fam)
    curve = TailCurve(lam, measures, norm, med, region.measure, s, phi, f.dim, fam)
    if s > 2.0**-f.dim:
        curve.notes.append("s above 2^-n: vmo identification regime not asserted")
    curve.fit = fit_tail(curve, *fit_range)
    if curve.fit is None:
        curve.notes.append("too few tail points in the fit range")
    return curve


@dataclass
class EmbeddingReport:
    u: np.ndarray
    mean_oscillation: np.ndarray
    phi_scaled: np.ndarray
    ratio: np.ndarray
    norm: float
    constant: float
    family: CubeFamily

    def to_dict(self) -> dict:
        return {
            "norm": self.norm,
            "empirical_constant": self.constant,
            "family": self.family.value,
            "rows": [
                {"u": u, "mean_oscillation": m, "phi_2n_u": p, "ratio": r}
                for u, m, p, r in zip(self.u.tolist(), self.mean_oscillation.tolist(),
                                      self.phi_scaled.tolist(), self.ratio.tolist())
            ],
        }


def vmo_embeds_in_VMO_check(f: SampledFunction, q0: CubeRegion | None = None,
                            s: float = 0.25, phi: Modulus | None = None, u_grid=None,
                            family: CubeFamily | None = None) -> EmbeddingReport:
    """Mean-oscillation modulus against phi(2^n u); the max ratio is the empirical constant."""
    _check_lower_half(s)
    phi = Modulus.constant(1.0) if phi is None else phi
    region, fam = _region_and_family(f, q0, family)
    u = default_u_grid(f, region) if u_grid is None else np.asarray(u_grid, float)
    st = cube_statistics(f, region, s, fam)
    mean_mod = _cumulative_max(st, u, lambda it: it[4])
    scaled = np.asarray(phi(2.0**f.dim * u), float)
    if np.any(scaled <= 0):
        raise DegenerateModulus("phi(2^n u) vanishes on the u grid")
    ratio = mean_mod / scaled
    norm = max((float(om.max()) / float(phi(meas)) for _, meas, om, _, _ in st), default=0.0)
    return EmbeddingReport(u, mean_mod, scaled, ratio, norm, float(ratio.max()), fam)
