"""Command-line interface.

Subcommands: sieve, density, holes, patterns, oracle, entropy, euclid,
verify.  Flags may be preloaded from a JSON config file (--config); flags
given on the command line override the file.  Exit codes: 0 success,
1 verify failure, 2 invalid usage, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from . import adic, euclid, patterns, sieve, verify
from .adic import SchemeParams
from .errors import InvalidArgumentError, ResourceLimitError, UnsupportedWindowError
from .sieve import Box


@contextmanager
def _out_stream(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as f:
            yield f


def _parse_box(args, n: int) -> Box:
    if args.lo is not None or args.hi is not None:
        if args.lo is None or args.hi is None or len(args.lo) != n or len(args.hi) != n:
            raise InvalidArgumentError(f"--lo and --hi each need {n} integers")
        return Box(tuple(args.lo), tuple(args.hi))
    if args.N is None:
        raise InvalidArgumentError("give either --N or --lo/--hi")
    return Box.one_sided(n, args.N) if n == 1 else Box.centered(n, args.N)


def _shape_from_args(args) -> patterns.Shape:
    if args.L is not None:
        if args.n == 1:
            return patterns.Shape.interval(args.L)
        return patterns.Shape.cube(args.L, args.n)
    raise InvalidArgumentError("give a shape via --L")


def _add_scheme_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=1, help="lattice dimension")
    p.add_argument("--k", type=int, default=2, help="prime power exponent")


def _add_region_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, help="cube bound ([1,N] for n=1, [-N,N]^n otherwise)")
    p.add_argument("--lo", type=int, nargs="+", help="box lower corner")
    p.add_argument("--hi", type=int, nargs="+", help="box upper corner")


def _cmd_sieve(args) -> int:
    params = SchemeParams(args.n, args.k)
    box = _parse_box(args, params.n)
    if args.family == "kfree":
        pts = sieve.kfree_points(box, params)
    elif args.family == "truncated":
        if args.P is None:
            raise InvalidArgumentError("--family truncated needs --P")
        pts = sieve.truncated_points(box, params, args.P)
    else:
        raise InvalidArgumentError(f"unknown family {args.family!r}")
    with _out_stream(args.output) as f:
        sieve.write_points(pts, f)
    return 0


def _cmd_density(args) -> int:
    params = SchemeParams(args.n, args.k)
    if args.N_max is None:
        raise InvalidArgumentError("density needs --N-max")
    boxes = list(sieve.iter_cube_schedule(params.n, args.N_max, args.steps))
    table = sieve.density_scan(
        params, boxes, family=args.family, P=args.P,
        zeta_tol=args.zeta_tol, workers=args.workers,
    )
    with _out_stream(args.output) as f:
        table.write_csv(f)
    return 0


def _cmd_holes(args) -> int:
    params = SchemeParams(args.n, args.k)
    if args.m is None:
        raise InvalidArgumentError("holes needs --m")
    if args.scan:
        t = sieve.scan_hole(params, args.m, args.limit)
        doc = {
            "schema": "kfree.hole-scan.v1",
            "n": params.n, "k": params.k, "side": args.m, "limit": args.limit,
            "t": [str(v) for v in t] if t is not None else None,
        }
        print("hole scan t =", " ".join(str(v) for v in t) if t else "absent")
        with _out_stream(args.output) as f:
            f.write(json.dumps(doc, indent=2) + "\n")
        return 0
    cert = sieve.crt_hole(params, args.m)
    print(f"certificate t = {' '.join(str(v) for v in cert.t)} (mod {cert.modulus})")
    with _out_stream(args.output) as f:
        f.write(cert.to_json() + "\n")
    return 0


def _cmd_patterns(args) -> int:
    params = SchemeParams(args.n, args.k)
    box = _parse_box(args, params.n)
    shape = _shape_from_args(args)
    if args.family == "kfree":
        mask = sieve.kfree_mask(box, params)
    elif args.family == "truncated":
        if args.P is None:
            raise InvalidArgumentError("--family truncated needs --P")
        mask = sieve.truncated_mask(box, params, args.P)
    else:
        raise InvalidArgumentError(f"unknown family {args.family!r}")
    if args.complement_check:
        res = patterns.complement_census(mask, box, shape, workers=args.workers)
        doc = {
            "schema": "kfree.complement-check.v1",
            "count": res.census.count,
            "complement_count": res.complement.count,
            "equal": res.equal,
        }
        print(f"complement counts {res.census.count}/{res.complement.count} equal={res.equal}")
        with _out_stream(args.output) as f:
            f.write(json.dumps(doc, indent=2) + "\n")
        return 0
    c = patterns.census(mask, box, shape, mode=args.mode, workers=args.workers)
    print(f"census count = {c.count}")
    with _out_stream(args.output) as f:
        f.write(c.to_json(include_patterns=args.list_patterns) + "\n")
    return 0


def _cmd_oracle(args) -> int:
    params = SchemeParams(args.n, args.k)
    shape = _shape_from_args(args)
    count = patterns.admissible_count(shape, params, cap=args.cap)
    print(count)
    if args.output:
        doc = {
            "schema": "kfree.oracle.v1",
            "shape": [list(o) for o in shape.offsets],
            "count": count,
        }
        if args.list_patterns:
            doc["patterns"] = [
                patterns.Pattern(shape, c).to_hex()
                for c in patterns.admissible_patterns(shape, params, cap=args.cap)
            ]
        with _out_stream(args.output) as f:
            f.write(json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_entropy(args) -> int:
    params = SchemeParams(args.n, args.k)
    entries = []
    for L in args.L_list:
        shape = patterns.Shape.interval(L) if params.n == 1 else patterns.Shape.cube(L, params.n)
        entries.append((shape, patterns.admissible_count(shape, params, cap=args.cap)))
    scan_box = Box.one_sided(1, args.scan_N) if params.n == 1 else Box.centered(params.n, args.scan_N)
    report = patterns.entropy_table(params, entries, P_U=args.P_U, scan_box=scan_box)
    with _out_stream(args.output) as f:
        report.write_csv(f)
    return 0


def _parse_endpoint(s: str):
    if "," in s:
        u, v, w = (int(t) for t in s.split(","))
        return (u, v, w)
    try:
        return int(s)
    except ValueError:
        return float(s)


def _cmd_euclid(args) -> int:
    scheme = euclid.QuadraticScheme(
        d=args.d, window=(_parse_endpoint(args.window[0]), _parse_endpoint(args.window[1]))
    )
    if args.mode == "points":
        seg = euclid.generate(scheme, args.T)
        with _out_stream(args.output) as f:
            seg.write_csv(f)
    elif args.mode == "density":
        Ts = args.T_list or [args.T]
        table = euclid.regular_density_check(scheme, Ts)
        with _out_stream(args.output) as f:
            table.write_csv(f)
    elif args.mode == "entropy":
        report = euclid.regular_entropy_check(scheme, args.L_list, T=args.T)
        with _out_stream(args.output) as f:
            report.write_csv(f)
    else:
        raise InvalidArgumentError(f"unknown euclid mode {args.mode!r}")
    return 0


def _cmd_verify(args) -> int:
    results = verify.run_checks(workers=args.workers)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kfree",
        description="k-free lattice points as cut-and-project sets: densities, "
        "pattern censuses, entropy bounds, and hole certificates.",
    )
    parser.add_argument("--config", help="JSON file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="dump points of a box")
    _add_scheme_args(p)
    _add_region_args(p)
    p.add_argument("--family", default="kfree", choices=["kfree", "truncated"])
    p.add_argument("--P", type=int, help="prime bound for the truncated family")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("density", help="frequency table along a cube schedule")
    _add_scheme_args(p)
    p.add_argument("--N-max", type=int)
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--family", default="kfree", choices=["kfree", "truncated", "full"])
    p.add_argument("--P", type=int)
    p.add_argument("--zeta-tol", type=float, default=1e-9)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("holes", help="CRT hole certificate or exhaustive scan")
    _add_scheme_args(p)
    p.add_argument("--m", type=int, help="cube side length")
    p.add_argument("--scan", action="store_true", help="scan for the smallest hole")
    p.add_argument("--limit", type=int, default=10**4)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_holes)

    p = sub.add_parser("patterns", help="pattern census over a region")
    _add_scheme_args(p)
    _add_region_args(p)
    p.add_argument("--L", type=int, help="interval length (n=1) or cube side")
    p.add_argument("--mode", default="coloured", choices=["coloured", "centered"])
    p.add_argument("--family", default="kfree", choices=["kfree", "truncated"])
    p.add_argument("--P", type=int)
    p.add_argument("--complement-check", action="store_true")
    p.add_argument("--list-patterns", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_patterns)

    p = sub.add_parser("oracle", help="exact admissible pattern count")
    _add_scheme_args(p)
    p.add_argument("--L", type=int)
    p.add_argument("--cap", type=int, default=patterns.ORACLE_CAP_DEFAULT)
    p.add_argument("--list-patterns", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("entropy", help="entropy report with the analytic sandwich")
    _add_scheme_args(p)
    p.add_argument("--L-list", type=int, nargs="+", default=[4, 8, 12, 16, 20])
    p.add_argument("--P-U", type=int, default=100)
    p.add_argument("--scan-N", type=int, default=10**6)
    p.add_argument("--cap", type=int, default=patterns.ORACLE_CAP_DEFAULT)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("euclid", help="regular quadratic-scheme contrast reports")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--window", nargs=2, default=["0", "1"],
                   help="endpoints, numeric or exact u,v,w triples")
    p.add_argument("--T", type=float, default=10**4)
    p.add_argument("--T-list", type=float, nargs="+")
    p.add_argument("--L-list", type=int, nargs="+", default=[50, 100, 200])
    p.add_argument("--mode", default="density", choices=["density", "entropy", "points"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_euclid)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_verify)

    parser.subcommand_parsers = {name: sp for name, sp in sub.choices.items()}
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as f:
            defaults = json.load(f)
        # subparsers re-apply their own defaults, so register there as well
        parser.set_defaults(**defaults)
        for sp in parser.subcommand_parsers.values():
            sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgumentError, UnsupportedWindowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
