"""Command-line front end.

Exit codes: 0 success / trivial, 1 verified nontrivial, 2 invalid input set,
3 I/O or usage error, 4 inconclusive (modular certificate or prover could
not settle the question).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bipartition import ALL_CUTS, Bipartition, CollisionError, cube_coordinates, plane_structure
from .prover import TRIVIAL_PROVEN, prove
from .states import (
    DimensionError,
    NonOrthogonalError,
    StateSet,
    build_set,
    classify_state,
    stateset_from_json,
    stateset_to_json,
)
from .verifier import build_system, lower_bound, nullity_exact, nullity_modp, verify_strongest

EXIT_OK, EXIT_NONTRIVIAL, EXIT_INVALID, EXIT_IO, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def canonical_json(s: StateSet) -> str:
    return json.dumps(stateset_to_json(s), indent=1) + "\n"


def digest(text: str) -> dict:
    return {"algorithm": "sha256", "value": hashlib.sha256(text.encode()).hexdigest()}


def _load(args) -> StateSet:
    if getattr(args, "set", None):
        try:
            obj = json.loads(Path(args.set).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise OSError(f"cannot read {args.set}: {exc}") from exc
        try:
            return stateset_from_json(obj)
        except ValueError as exc:
            raise OSError(str(exc)) from exc
    if not getattr(args, "dims", None):
        raise UsageError("give --dims d1 d2 d3 or --set FILE")
    dims = args.dims
    if len(dims) == 1:
        dims = dims * 3
    if len(dims) != 3:
        raise UsageError("--dims takes one value (d d d) or three values")
    return build_set(*dims)


def _cuts(text: str):
    if text == "all":
        return list(ALL_CUTS)
    return [Bipartition.parse(t) for t in text.split(",")]


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _base_report(args, s: StateSet, command: str) -> dict:
    return {
        "tool": "trinonlocal",
        "version": __version__,
        "command": command,
        "argv": list(args._argv),
        "dims": list(s.dims),
        "size": len(s),
        "input_digest": digest(canonical_json(s)),
    }


# subcommands ----------------------------------------------------------

def cmd_gen(args) -> int:
    s = _load(args)
    text = canonical_json(s)
    bound = lower_bound(*s.dims)
    meets = "meets" if len(s) == bound else "does not meet"
    summary = f"{len(s)} states in C^{s.dims.d1} x C^{s.dims.d2} x C^{s.dims.d3}; {meets} lower bound {bound}\n"
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    s = _load(args)
    primes = [int(p) for p in args.primes.split(",")] if args.primes else None
    t0 = time.perf_counter()
    res = verify_strongest(s, mode=args.mode, cuts=_cuts(args.bipartition), primes=primes,
                           tol=args.tol, method=args.method, emit_kernel=args.emit_kernel,
                           workers=args.workers)
    timings = not args.no_timings
    report = _base_report(args, s, "verify")
    report["mode"] = args.mode
    report["reports"] = [r.to_json(timings) for r in res.reports.values()]
    report["overall"] = res.overall
    report["meets_lower_bound"] = len(s) == lower_bound(*s.dims)
    if timings:
        report["elapsed_ms"] = round(1e3 * (time.perf_counter() - t0), 3)
    if args.format == "json":
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        lines = [f"{r['bipartition']:<5} {r['mode']:<5} nullity={r['nullity']:<4} "
                 f"identity_in_kernel={str(r['identity_in_kernel']).lower():<5} {r['verdict']}"
                 for r in report["reports"]]
        lines.append(f"overall: {res.overall}")
        _emit("\n".join(lines) + "\n", args.out)
    if res.overall == "strongest":
        return EXIT_OK
    if res.overall == "not_strongest":
        return EXIT_NONTRIVIAL
    return EXIT_INCONCLUSIVE


def cmd_prove(args) -> int:
    s = _load(args)
    traces = [prove(s, b) for b in _cuts(args.bipartition)]
    if args.format == "json":
        report = _base_report(args, s, "prove")
        report["traces"] = [t.to_json() for t in traces]
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        _emit("".join(t.text() for t in traces), args.out)
    return EXIT_OK if all(t.verdict == TRIVIAL_PROVEN for t in traces) else EXIT_INCONCLUSIVE


def cmd_classify(args) -> int:
    s = _load(args)
    rows = []
    for n, (lab, ket) in enumerate(s.states):
        sc = classify_state(ket)
        rows.append({"label": lab, "stopper": n == s.stopper, "family": s.families.get(lab, ""),
                     **{cut: r for cut, r in sc.ranks.items()}, "category": sc.category})
    if args.format == "json":
        report = _base_report(args, s, "classify")
        report["states"] = rows
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "family", "A|BC", "B|CA", "C|AB", "category"])
        for r in rows:
            w.writerow([r["label"], r["family"], r["A|BC"], r["B|CA"], r["C|AB"], r["category"]])
        non_stop = [r for r in rows if not r["stopper"]]
        ge = sum(r["category"] == "genuinely_entangled" for r in non_stop)
        buf.write(f"# {ge} of {len(non_stop)} non-stopper states genuinely_entangled\n")
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    dims = args.dims * 3 if len(args.dims) == 1 else args.dims
    if len(dims) != 3:
        raise UsageError("--dims takes one value (d d d) or three values")
    sys.stdout.write(f"{lower_bound(*dims)}\n")
    return EXIT_OK


def cmd_plane(args) -> int:
    s = _load(args)
    out = []
    for b in _cuts(args.bipartition):
        ps = plane_structure(s, b)
        if args.format == "json":
            out.append(json.dumps(ps.to_json(), indent=1))
        elif args.format == "csv":
            out.append(ps.to_csv().rstrip("\n"))
        else:
            out.append(ps.ascii())
        if args.figure:
            from .plotting import plot_plane

            path = Path(args.figure)
            if len(_cuts(args.bipartition)) > 1:
                path = path.with_name(f"{path.stem}_{b.flag}{path.suffix}")
            plot_plane(ps, path, s.families)
            sys.stderr.write(f"wrote {path}\n")
    if args.cubes:
        out.append(json.dumps(cube_coordinates(s), indent=1))
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = []
    for d in range(args.d_min, args.d_max + 1):
        s = build_set(d, d, d)
        for b in _cuts(args.bipartition):
            t0 = time.perf_counter()
            cs = build_system(s, b)
            t_build = 1e3 * (time.perf_counter() - t0)
            for mode in args.modes:
                if mode == "exact" and d > args.exact_max:
                    continue
                t0 = time.perf_counter()
                rep = nullity_exact(cs) if mode == "exact" else nullity_modp(cs)
                rows.append({"d": d, "bipartition": b.tag, "mode": mode, "unknowns": cs.ncols,
                             "equations": len(cs.rows), "nullity": rep.nullity,
                             "build_ms": round(t_build, 3),
                             "elapsed_ms": round(1e3 * (time.perf_counter() - t0), 3)})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["d"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    if args.figure and rows:
        from .plotting import plot_bench

        plot_bench(rows, args.figure)
        sys.stderr.write(f"wrote {args.figure}\n")
    return EXIT_OK


# parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trinonlocal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"trinonlocal {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def source(sp, required_dims=False):
        sp.add_argument("--dims", type=int, nargs="+", metavar="D", required=required_dims,
                        help="local dimensions d1 d2 d3 (or a single d)")
        if not required_dims:
            sp.add_argument("--set", metavar="FILE", help="state-set JSON file")
        sp.add_argument("--out", metavar="FILE", help="write output here instead of stdout")

    sp = sub.add_parser("gen", help="write a constructed set as canonical JSON")
    source(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="exact/modular/float OPLM kernel dimension per cut")
    source(sp)
    sp.add_argument("--bipartition", default="all", help="A-BC, B-CA, C-AB, comma list, or all")
    sp.add_argument("--mode", choices=["exact", "modp", "float"], default="exact")
    sp.add_argument("--method", choices=["sparse", "bareiss"], default="sparse",
                    help="elimination used by --mode exact")
    sp.add_argument("--primes", help="comma-separated primes for --mode modp")
    sp.add_argument("--tol", type=float, default=1e-8, help="relative SVD cutoff for --mode float")
    sp.add_argument("--emit-kernel", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    sp.add_argument("--no-timings", action="store_true", help="omit elapsed_ms fields")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("prove", help="replay the observation rules as a trace")
    source(sp)
    sp.add_argument("--bipartition", default="A-BC")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("classify", help="per-state Schmidt ranks and entanglement class")
    source(sp)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("bound", help="print max_i(prod d / d_i) + 1")
    sp.add_argument("--dims", type=int, nargs="+", required=True)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("plane", help="plane-structure grid per cut")
    source(sp)
    sp.add_argument("--bipartition", default="A-BC")
    sp.add_argument("--format", choices=["ascii", "json", "csv"], default="ascii")
    sp.add_argument("--figure", metavar="PNG", help="also render the grid with matplotlib")
    sp.add_argument("--cubes", action="store_true", help="append occupied cube coordinates")
    sp.set_defaults(func=cmd_plane)

    sp = sub.add_parser("bench", help="time exact vs modular elimination over d")
    sp.add_argument("--d-min", type=int, default=3)
    sp.add_argument("--d-max", type=int, default=6)
    sp.add_argument("--exact-max", type=int, default=8, help="skip exact mode above this d")
    sp.add_argument("--modes", nargs="+", choices=["exact", "modp"], default=["exact", "modp"])
    sp.add_argument("--bipartition", default="A-BC")
    sp.add_argument("--out", metavar="CSV")
    sp.add_argument("--figure", metavar="PNG")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except NonOrthogonalError as exc:
        sys.stderr.write(f"invalid input set: {exc}\n")
        return EXIT_INVALID
    except DimensionError as exc:
        sys.stderr.write(f"invalid dimensions: {exc}\n")
        return EXIT_IO
    except CollisionError as exc:
        sys.stderr.write(f"invalid input set: {exc}\n")
        return EXIT_INVALID
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
