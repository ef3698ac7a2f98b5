"""Command-line entry point.

Exit codes: 0 success or condition holds, 1 checked condition is false,
2 parse or usage error, 3 closure inconclusive within budget. Machine output
goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import formats
from .automorphism import make_stably_tame, pushforward
from .linearizer import Budget, Stabilized, check_lift_symbolic, divergence_profile, scalar_closure
from .numerics import IntegrationOverflow, verify_lift_numeric
from .parsing import (
    ParseError,
    parse_automorphism_named,
    parse_polymap_named,
    parse_system_named,
    render_system,
)
from .transport import stably_tame_transport, tame_transport
from .wdg import check_wdg, to_dot, wdg_stabilize

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_DIVERGING = 0, 1, 2, 3

DEMOS = {
    "example2": ["example2.sys"],
    "counterexample": ["linear.sys", "phi.map", "counterexample.sys"],
    "stabilized3": ["stabilized3.sys", "linear.sys", "phi.map"],
    "sinh6": ["sinh6.sys"],
    "intro-lift": ["intro.sys", "intro.lift.json"],
}


class UsageError(Exception):
    pass


def fixture_text(demo: str, filename: str) -> str:
    return resources.files("superlin").joinpath("fixtures", demo, filename).read_text("utf-8")


def _read(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None = None):
    if out:
        Path(out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str):
    print(msg, file=sys.stderr)


def _load_system(path: str):
    try:
        return parse_system_named(_read(path))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _load_lift(path: str, names):
    lift, lift_names = formats.lift_from_json(_read(path))
    if lift_names != names:
        raise UsageError(f"lift is over ({', '.join(lift_names)}), system over ({', '.join(names)})")
    return lift


def _load_map(path: str, n: int | None = None):
    phi, names = parse_automorphism_named(_read(path))
    if n is not None and phi.n != n:
        raise UsageError(f"map acts on {phi.n} variables, expected {n}")
    return phi, names


# commands


def cmd_check_wdg(args) -> int:
    f, names = _load_system(args.system)
    report = check_wdg(f)
    if args.dot:
        Path(args.dot).write_text(to_dot(report, names), "utf-8")
    if args.json:
        sys.stdout.write(formats.dumps(formats.wdg_report_to_dict(report, names)))
    if report.satisfied:
        _note(f"WDG condition holds ({len(report.cycles)} cycles, all constant)")
        return EXIT_OK
    bad = report.offending
    _note("WDG condition fails: cycle " + " -> ".join(names[i] for i in bad.nodes)
          + f" has product {bad.product.render(names)}")
    return EXIT_FALSE


def _budget(args) -> Budget:
    return Budget(args.max_generators, args.max_degree, args.max_iterations)


def cmd_lift(args) -> int:
    f, names = _load_system(args.system)
    out = scalar_closure(f, _budget(args))
    if isinstance(out, Stabilized):
        _emit(formats.lift_to_json(out.lift, names), args.out)
        _note(f"stabilized: n={out.lift.n}, k={out.lift.k}, dims {list(out.dims)}")
        return EXIT_OK
    sys.stdout.write(formats.dumps(formats.diverging_to_dict(out, names)))
    _note(f"inconclusive (budget exhausted: {out.reason}); dims {list(out.dims)}")
    return EXIT_DIVERGING


def cmd_check_lift(args) -> int:
    f, names = _load_system(args.system)
    lift = _load_lift(args.lift, names)
    if lift.n != f.n:
        raise UsageError("lift and system dimensions differ")
    ok = check_lift_symbolic(f, lift)
    _note("lift identity holds" if ok else "lift identity fails")
    return EXIT_OK if ok else EXIT_FALSE


def _rename(names, spec):
    if not spec:
        return names
    new = [s.strip() for s in spec.split(",")]
    if len(new) != len(names):
        raise UsageError(f"--names needs {len(names)} names")
    return new


def cmd_pushforward(args) -> int:
    f, names = _load_system(args.system)
    phi, _ = _load_map(args.map, f.n)
    h = pushforward(f, phi)
    _emit(render_system(h, _rename(names, args.names)), args.out)
    return EXIT_OK


def cmd_transport(args) -> int:
    f, names = _load_system(args.system)
    lift = _load_lift(args.lift, names)
    if args.stabilizer:
        stab, _, _ = parse_polymap_named(_read(args.stabilizer), names)
        phi, _ = _load_map(args.map, f.n + stab.n_out)
        psi_inv = None
        if args.psi_inverse:
            psi_inv, _, _ = parse_polymap_named(_read(args.psi_inverse), names)
        w = make_stably_tame(phi, stab, psi_inv)
        new = stably_tame_transport(lift, w)
    else:
        phi, _ = _load_map(args.map, f.n)
        new = tame_transport(lift, phi)
    _emit(formats.lift_to_json(new, _rename(names, args.names)), args.out)
    _note(f"transported lift: n={new.n}, k={new.k}")
    return EXIT_OK


def _linear_matrix(f, names):
    A = []
    for i, c in enumerate(f.components):
        if c.degree > 1 or c.constant_term() != 0:
            raise UsageError(f"{names[i]}' is not linear; stabilize needs x' = Ax")
        A.append([c.coeff([int(j == k) for k in range(f.n)]) for j in range(f.n)])
    return A


def cmd_stabilize(args) -> int:
    f, names = _load_system(args.system)
    A = _linear_matrix(f, names)
    phi, _ = _load_map(args.map, f.n)
    if len(phi.generators) != 1 or not hasattr(phi.generators[0], "g"):
        raise UsageError("stabilize needs a map with exactly one 'elem' statement")
    gen = phi.generators[0]
    if gen.target != f.n - 1:
        raise UsageError(f"the elementary map must perturb the last variable {names[-1]}")
    observable, lifted, report = wdg_stabilize(A, gen)
    lifted_names = names[:-1] + ["w", names[-1]]
    doc = {
        "format": formats.FORMAT_VERSION,
        "observable": observable.render(names),
        "lifted_system": render_system(lifted, lifted_names),
        "wdg": formats.wdg_report_to_dict(report, lifted_names),
    }
    sys.stdout.write(formats.dumps(doc))
    return EXIT_OK if report.satisfied else EXIT_FALSE


def _read_points(path: str, n: int) -> list[tuple]:
    rows = [r for r in csv.reader(io.StringIO(_read(path))) if r and any(c.strip() for c in r)]
    pts = []
    for lineno, row in enumerate(rows, start=1):
        try:
            vals = tuple(float(Fraction(c.strip())) for c in row)
        except (ValueError, ZeroDivisionError):
            if lineno == 1:
                continue  # header
            raise ParseError(f"bad number in initial-condition row {row}", lineno, 1) from None
        if len(vals) != n:
            raise ParseError(f"initial condition has {len(vals)} entries, expected {n}", lineno, 1)
        pts.append(vals)
    if not pts:
        raise UsageError("no initial conditions given")
    return pts


def cmd_verify(args) -> int:
    f, names = _load_system(args.system)
    lift = _load_lift(args.lift, names)
    pts = _read_points(args.x0, f.n)
    if not check_lift_symbolic(f, lift):
        _note("lift fails the symbolic check")
        return EXIT_FALSE
    try:
        rep = verify_lift_numeric(f, lift, pts, args.t_end, args.steps, args.tol,
                                  keep_traces=bool(args.trace))
    except IntegrationOverflow as exc:
        _note(f"integration overflow: {exc}")
        return EXIT_FALSE
    if args.trace:
        d = Path(args.trace)
        d.mkdir(parents=True, exist_ok=True)
        lift_names = names + [f"p{j + 1}" for j in range(lift.k)]
        for idx, (base, big) in enumerate(rep.traces):
            (d / f"x0_{idx}_system.csv").write_text(base.to_csv(names), "utf-8")
            (d / f"x0_{idx}_lift.csv").write_text(big.to_csv(lift_names), "utf-8")
    doc = {
        "format": formats.FORMAT_VERSION,
        "max_abs_error": rep.max_abs_error,
        "max_rel_error": rep.max_rel_error,
        "tol": rep.tol, "t_end": rep.t_end, "steps": rep.steps,
        "passed": rep.passed,
        "points": [{"x0": list(p.x0), "max_abs_error": p.max_abs_error,
                    "max_rel_error": p.max_rel_error} for p in rep.points],
    }
    sys.stdout.write(formats.dumps(doc))
    return EXIT_OK if rep.passed else EXIT_FALSE


def cmd_closure_profile(args) -> int:
    f, names = _load_system(args.system)
    for flag, name in (("--watch", args.watch), ("--component", args.component)):
        if name not in names:
            raise UsageError(f"{flag} {name!r} is not a system variable")
    prof = divergence_profile(f, args.k, names.index(args.watch), names.index(args.component))
    doc = {
        "format": formats.FORMAT_VERSION,
        "watch": args.watch,
        "component": args.component,
        "profile": [{"k": k, "dim": d, "leading_degree": deg} for k, (d, deg) in enumerate(prof)],
    }
    sys.stdout.write(formats.dumps(doc))
    return EXIT_OK


def cmd_demo(args) -> int:
    d = Path(args.dir)
    d.mkdir(parents=True, exist_ok=True)
    for fname in DEMOS[args.name]:
        path = d / fname
        path.write_text(fixture_text(args.name, fname), "utf-8")
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superlin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-wdg", help="test the constant-cycle condition")
    s.add_argument("system")
    s.add_argument("--dot", help="write the dependency graph as DOT")
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    s.set_defaults(func=cmd_check_wdg)

    s = sub.add_parser("lift", help="search for a linear lift by Lie closure")
    s.add_argument("system")
    s.add_argument("--out")
    s.add_argument("--max-generators", type=int, default=Budget.max_generators)
    s.add_argument("--max-degree", type=int, default=Budget.max_degree)
    s.add_argument("--max-iterations", type=int, default=Budget.max_iterations)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("check-lift", help="exact check of a lift against a system")
    s.add_argument("system")
    s.add_argument("lift")
    s.set_defaults(func=cmd_check_lift)

    s = sub.add_parser("pushforward", help="rewrite a system in transformed coordinates")
    s.add_argument("system")
    s.add_argument("map")
    s.add_argument("--names", help="comma-separated names for the new coordinates")
    s.add_argument("--out")
    s.set_defaults(func=cmd_pushforward)

    s = sub.add_parser("transport", help="carry a lift through a tame or stably tame map")
    s.add_argument("system")
    s.add_argument("lift")
    s.add_argument("map")
    s.add_argument("--stabilizer", help="polynomial map y(x) for a stably tame witness")
    s.add_argument("--psi-inverse", help="inverse of the induced map, if not derivable")
    s.add_argument("--names", help="comma-separated names for the new coordinates")
    s.add_argument("--out")
    s.set_defaults(func=cmd_transport)

    s = sub.add_parser("stabilize", help="stabilizing observable for a transformed linear system")
    s.add_argument("system")
    s.add_argument("map")
    s.set_defaults(func=cmd_stabilize)

    s = sub.add_parser("verify", help="numerically compare a system with its lift")
    s.add_argument("system")
    s.add_argument("lift")
    s.add_argument("--x0", required=True, help="CSV file, one initial condition per row")
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--trace", help="directory for trajectory CSVs")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("closure-profile", help="span dimension and degree growth of L^k f")
    s.add_argument("system")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--watch", required=True)
    s.add_argument("--component", help="component to watch (default: the second variable)")
    s.set_defaults(func=cmd_closure_profile)

    s = sub.add_parser("demo", help="write a bundled example to disk")
    s.add_argument("name", choices=sorted(DEMOS))
    s.add_argument("--dir", default=".")
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "closure-profile" and args.component is None:
            names = _load_system(args.system)[1]
            args.component = names[1] if len(names) > 1 else names[0]
        return args.func(args)
    except (UsageError, ValueError) as exc:
        # ParseError, DimensionError, PremiseError and friends are ValueErrors
        _note(f"error: {exc}")
        return EXIT_USAGE


def run():
    sys.exit(main())
