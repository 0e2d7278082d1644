"""Command-line entry point: ``medianosc <command> ...`` (or ``python -m medianosc``).

JSON goes to stdout, bulk arrays to field or CSV files. Exit codes: 0 ok,
1 property violation, 2 I/O problem, 3 bad parameters.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bmo, checks, corpus, decompose, fieldio, median, oscillation, sharp
from .errors import MedianOscError
from .grid import CubeFamily, CubeRegion, DyadicCube, SampledFunction

EXIT_OK, EXIT_VIOLATION, EXIT_IO, EXIT_PARAM = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    """'a,b,c' or 'start:stop:count' (inclusive linear grid)."""
    try:
        if text.count(":") == 2:
            a, b, k = text.split(":")
            return np.linspace(float(a), float(b), int(k)).tolist()
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _region(f: SampledFunction, text: str | None) -> CubeRegion:
    """'i,j:len' selects the cube with low corner (i, j) and side len cells."""
    if text is None:
        return f.frame.whole()
    try:
        lo, length = text.split(":")
        return CubeRegion(f.frame, tuple(int(x) for x in lo.split(",")), int(length))
    except ValueError as exc:
        raise UsageError(f"bad region {text!r}: {exc}") from exc


def _dyadic_for(region: CubeRegion) -> DyadicCube:
    n = region.frame.cells_per_side
    level = (n // region.length).bit_length() - 1
    if region.length << level != n or any(lo % region.length for lo in region.lo):
        raise UsageError("region must be a dyadic cube of the grid")
    return DyadicCube(region.frame, level, tuple(lo // region.length for lo in region.lo))


def _family(text: str | None):
    return None if text is None else CubeFamily(text)


def _emit(obj) -> None:
    sys.stdout.write(fieldio.dumps(obj) + "\n")


def cmd_median(args) -> int:
    f = fieldio.load_field(args.input)
    region = _region(f, args.region)
    samples = median.WeightedSamples.from_region(f, region)
    counts = median.defining_counts(samples, args.s)
    vol = counts["cell_volume"]
    _emit({
        "s": args.s,
        "region": {"lo": list(region.lo), "length": region.length, "measure": region.measure},
        "median": counts["median"],
        "defining_counts": {k: counts[k] for k in
                            ("cells", "below", "above", "at_or_below", "at_or_above")},
        "defining_measures": {k: counts[k] * vol for k in
                              ("below", "above", "at_or_below", "at_or_above")},
        "holds": counts["holds"],
    })
    return EXIT_OK


def cmd_sharp(args) -> int:
    f = fieldio.load_field(args.input)
    region = _region(f, args.region)
    field = sharp.local_sharp_maximal(f, region, args.s, _family(args.family))
    if args.out:
        fieldio.save_field(field.as_function(), args.out)
    _emit({"s": args.s, "family": field.family.value, "sup": field.sup, "inf": field.inf,
           "region": {"lo": list(region.lo), "length": region.length}, "out": args.out})
    return EXIT_OK


def cmd_decompose(args) -> int:
    f = fieldio.load_field(args.input)
    q = _dyadic_for(_region(f, args.region))
    fam = _family(args.family)
    if args.two_threshold:
        res = decompose.two_threshold_decompose(f, q, args.s, args.t, args.beta, args.eta, fam)
        out = {"mode": "two-threshold", "beta": res.beta, "eta": res.eta,
               "delta1": res.delta1, "delta2": res.delta2, "median": res.median,
               "packing": res.packing, "packing_bound": args.s / (2 * (1 - args.s)),
               "checks": res.checks, "family": fam.value if fam else None,
               "generation_j": res.generation_j.to_dict(),
               "generation_k": res.generation_k.to_dict()}
        ok = all(res.checks.values())
        forest = res.generation_k
    else:
        if args.delta is None or args.beta is None:
            raise UsageError("--delta and --beta are required without --two-threshold")
        g = f
        if args.center:
            g = f.with_values(f.values - median.maximal_median(f.restrict(q.region), args.t))
        field = sharp.local_sharp_maximal(g, q.region, args.s, fam)
        forest = decompose.stromberg_decompose(
            g, q, decompose.DecompositionParams(args.s, args.t, args.delta, args.beta), field)
        out = {"mode": "single", "family": field.family.value, **forest.to_dict()}
        ok = decompose.postconditions_hold(forest)
    if args.mask:
        fieldio.save_field(f.with_values(forest.label_field()), args.mask)
    out["ok"] = ok
    _emit(out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_oscillation(args) -> int:
    f = fieldio.load_field(args.input)
    grid = _floats(args.delta_grid) if args.delta_grid else None
    sides = tuple(int(x) for x in _floats(args.sides))
    rep = oscillation.continuity_verdict(f, args.s, grid, args.threshold, sides)
    if args.csv:
        fieldio.write_csv(args.csv, ["delta", "omega_estimate", "modulus", "ratio"],
                          rep.csv_rows())
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_jn(args) -> int:
    f = fieldio.load_field(args.input)
    phi = bmo.Modulus.parse(args.phi)
    grid = _floats(args.lambda_grid) if args.lambda_grid else None
    curve = bmo.jn_tail(f, _region(f, args.region), args.s, grid, phi, _family(args.family))
    if args.csv:
        fieldio.write_csv(args.csv, ["lambda", "measure"], curve.rows())
    _emit({"s": args.s, "phi": str(phi), "family": curve.family.value,
           "median": curve.median, "norm": curve.normalizer, "q_measure": curve.q_measure,
           "fit": curve.fit.to_dict() if curve.fit else None, "notes": curve.notes,
           "points": len(curve.lambdas)})
    return EXIT_OK


def cmd_vmo(args) -> int:
    f = fieldio.load_field(args.input)
    region = _region(f, args.region)
    grid = _floats(args.u_grid) if args.u_grid else None
    curve = bmo.vmo_modulus(f, region, args.s, grid, _family(args.family))
    if args.csv:
        fieldio.write_csv(args.csv, ["u", "phi_s"], curve.rows())
    out = {"s": args.s, "family": curve.family.value,
           "modulus": [{"u": u, "phi_s": v} for u, v in curve.rows()]}
    if args.phi:
        phi = bmo.Modulus.parse(args.phi)
        out["norm"] = bmo.bmo_phi_norm_detail(f, region, args.s, phi, curve.family).to_dict()
        out["embedding"] = bmo.vmo_embeds_in_VMO_check(f, region, args.s, phi, grid,
                                                       curve.family).to_dict()
    _emit(out)
    return EXIT_OK


def _params(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = int(val)
        except ValueError:
            try:
                out[key] = float(val)
            except ValueError as exc:
                raise UsageError(f"non-numeric parameter {item!r}") from exc
    return out


def cmd_gen(args) -> int:
    out = Path(args.out)
    if args.name == "pair-counterexample":
        pc = corpus.pair_counterexample(args.s, args.s1, args.n)
        paths = [out.with_name(out.stem + "_f" + out.suffix),
                 out.with_name(out.stem + "_g" + out.suffix)]
        fieldio.save_field(pc.f, paths[0])
        fieldio.save_field(pc.g, paths[1])
        _emit({"name": args.name, "s": args.s, "s1": args.s1, "n": args.n,
               "t_boundary": pc.t_boundary, "files": [str(p) for p in paths]})
        return EXIT_OK
    spec = corpus.CorpusSpec(args.name, args.dim, args.n, args.seed, _params(args.param))
    f = corpus.generate(spec)
    fieldio.save_field(f, out)
    _emit({"name": spec.name, "dim": spec.dim, "n": spec.n, "params": spec.params,
           "rng": "PCG64", "seed": spec.seed, "file": str(out)})
    return EXIT_OK


def cmd_propcheck(args) -> int:
    results = checks.run_suite(args.suite, args.cases, args.seed)
    _emit({"rng": "PCG64", "seed": args.seed, "suites": [r.to_dict() for r in results],
           "ok": all(r.ok for r in results)})
    return EXIT_OK if all(r.ok for r in results) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="medianosc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def field_cmd(name, fn, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("input", help="field file (.csv for 1D CSV)")
        c.add_argument("--region", help="cube as 'lo0[,lo1]:len' in cells (default: whole grid)")
        c.set_defaults(func=fn)
        return c

    c = field_cmd("median", cmd_median, "maximal median with its defining counts")
    c.add_argument("--s", type=float, default=0.5)

    c = field_cmd("sharp", cmd_sharp, "local sharp maximal function")
    c.add_argument("--s", type=float, default=0.5)
    c.add_argument("--family", choices=[x.value for x in CubeFamily])
    c.add_argument("--out", help="write the sharp field to this file")

    c = field_cmd("decompose", cmd_decompose, "dyadic decomposition by medians")
    c.add_argument("--s", type=float, default=0.25)
    c.add_argument("--t", type=float, default=0.5)
    c.add_argument("--delta", type=float)
    c.add_argument("--beta", type=float)
    c.add_argument("--eta", type=float)
    c.add_argument("--two-threshold", action="store_true")
    c.add_argument("--center", action="store_true", help="subtract m_f(t, Q) first")
    c.add_argument("--family", choices=[x.value for x in CubeFamily])
    c.add_argument("--mask", help="write a label field (1 selected, 2 discarded)")

    c = field_cmd("oscillation", cmd_oscillation, "two-cube oscillation and continuity verdict")
    c.add_argument("--s", type=float, default=0.75)
    c.add_argument("--delta-grid", help="decreasing deltas, 'a,b,c' or 'start:stop:count'")
    c.add_argument("--sides", default="1,2,4", help="cube sides (cells) of the pair family")
    c.add_argument("--threshold", type=float)
    c.add_argument("--csv")

    c = field_cmd("jn", cmd_jn, "tail measure of |f - m_f(1-s)| with fitted decay")
    c.add_argument("--s", type=float, default=0.25)
    c.add_argument("--phi", default="const")
    c.add_argument("--lambda-grid")
    c.add_argument("--family", choices=[x.value for x in CubeFamily])
    c.add_argument("--csv")

    c = field_cmd("vmo", cmd_vmo, "vanishing median oscillation modulus")
    c.add_argument("--s", type=float, default=0.25)
    c.add_argument("--u-grid")
    c.add_argument("--phi")
    c.add_argument("--family", choices=[x.value for x in CubeFamily])
    c.add_argument("--csv")

    c = sub.add_parser("gen", help="write a corpus field")
    c.add_argument("name", choices=[*corpus.NAMES, *corpus.ALIASES, "pair-counterexample"])
    c.add_argument("--dim", type=int, default=1)
    c.add_argument("--n", type=int, default=256)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--param", action="append", help="key=value generator parameter")
    c.add_argument("--s", type=float, default=0.25, help="pair-counterexample only")
    c.add_argument("--s1", type=float, default=0.875, help="pair-counterexample only")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_gen)

    c = sub.add_parser("propcheck", help="run randomized property suites")
    c.add_argument("--suite", default="all", choices=["all", *checks.SUITES, *checks.ALIASES])
    c.add_argument("--cases", type=int, default=200)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_propcheck)
    return p


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(fieldio.dumps({"error": type(exc).__name__, "message": str(exc),
                                    "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_PARAM, exc)
    except (OSError, fieldio.FieldFormatError) as exc:
        return _fail(EXIT_IO, exc)
    except (MedianOscError, ValueError) as exc:
        return _fail(EXIT_PARAM, exc)


if __name__ == "__main__":
    sys.exit(main())
