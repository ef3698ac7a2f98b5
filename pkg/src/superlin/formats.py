"""JSON encodings for lifts, WDG reports and closure outcomes.

Rationals are written as ``"p/q"`` strings and polynomials in the expression
grammar, so a lift written and read back is structurally identical.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .linalg import format_fraction
from .linearizer import Diverging, Lift
from .parsing import ParseError, parse_expr
from .poly import PolyMap, default_names
from .wdg import WdgReport

FORMAT_VERSION = 1


def _q(s: str) -> Fraction:
    if not isinstance(s, str) or "." in s:
        raise ParseError(f"matrix entries must be 'p/q' strings, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {s!r}") from None


def lift_to_dict(lift: Lift, names: Sequence[str] | None = None) -> dict:
    names = list(names) if names is not None else default_names(lift.n)
    d = {
        "format": FORMAT_VERSION,
        "n": lift.n,
        "k": lift.k,
        "vars": names,
        "A": [[format_fraction(v) for v in row] for row in lift.A],
        "observables": [p.render(names) for p in lift.observables.components],
        "generators": [p.render(names) for p in lift.generator_functions],
    }
    if lift.provenance:
        d["provenance"] = list(lift.provenance)
    return d


def lift_to_json(lift: Lift, names: Sequence[str] | None = None) -> str:
    return json.dumps(lift_to_dict(lift, names), indent=2) + "\n"


def lift_from_dict(d: dict) -> tuple[Lift, list[str]]:
    try:
        if d.get("format") != FORMAT_VERSION:
            raise ParseError(f"unsupported lift format {d.get('format')!r}")
        n, k = int(d["n"]), int(d["k"])
        names = list(d.get("vars") or default_names(n))
        if len(names) != n:
            raise ParseError("'vars' must list n names")
        obs = [parse_expr(s, names) for s in d["observables"]]
        if len(obs) != k:
            raise ParseError("'observables' must have k entries")
        A = [[_q(v) for v in row] for row in d["A"]]
        if len(A) != n + k or any(len(r) != n + k for r in A):
            raise ParseError(f"'A' must be {n + k}x{n + k}")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed lift JSON: {exc}") from None
    lift = Lift(n, A, PolyMap(n, obs), tuple(d.get("provenance", ())))
    return lift, names


def lift_from_json(text: str) -> tuple[Lift, list[str]]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(d, dict):
        raise ParseError("lift JSON must be an object")
    return lift_from_dict(d)


def wdg_report_to_dict(report: WdgReport, names: Sequence[str] | None = None) -> dict:
    g = report.graph
    names = list(names) if names is not None else default_names(g.n)
    cyc = [
        {"nodes": [names[i] for i in c.nodes], "product": c.product.render(names),
         "constant": c.constant}
        for c in report.cycles
    ]
    return {
        "format": FORMAT_VERSION,
        "vars": names,
        "edges": [
            {"from": names[j], "to": names[i], "weight": w.render(names)}
            for (j, i), w in sorted(g.edges.items())
        ],
        "cycles": cyc,
        "satisfied": report.satisfied,
        "offending": None if report.offending is None else
        {"nodes": [names[i] for i in report.offending.nodes],
         "product": report.offending.product.render(names)},
    }


def diverging_to_dict(out: Diverging, names: Sequence[str]) -> dict:
    return {
        "format": FORMAT_VERSION,
        "status": "diverging",
        "verdict": "inconclusive (budget exhausted)",
        "reason": out.reason,
        "dims": list(out.dims),
        "max_degree_seen": out.max_degree_seen,
        "leading_degrees": dict(zip(names, out.leading_degrees)),
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"

