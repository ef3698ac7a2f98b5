"""Text formats for systems (.sys), automorphisms (.map) and polynomial maps.

Expressions are sums of signed terms; a term is a product of rational
literals and powers ``name^k`` joined by explicit ``*``. Decimals are
rejected so every coefficient stays exact.

    vars x1 x2
    x1' = x1
    x2' = x2 + x1^2      # comment

    vars x1 x2
    affine [[1,1],[0,1]] ; [1,-1]
    elem x2 : -1*x1^2
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .automorphism import (
    ElementaryError,
    NotInvertibleError,
    TameAutomorphism,
    make_affine,
    make_elementary,
)
from .linalg import format_fraction
from .poly import DimensionError, PolyMap, Polynomial, VectorField


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)
        self.msg = msg
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<decimal>\d+\.\d*|\.\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>'|=|\+|-|\*|\^|/|:|;|,|\[|\])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(line: str, lineno: int) -> list[Token]:
    code = line.split("#", 1)[0]
    out, pos = [], 0
    while pos < len(code):
        m = _TOKEN.match(code, pos)
        if not m:
            raise ParseError(f"unexpected character {code[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "decimal":
            raise ParseError(f"decimal literal {m.group()!r} is not exact; write it as p/q",
                             lineno, pos + 1)
        if kind != "ws":
            out.append(Token(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    out.append(Token("end", "", lineno, len(code) + 1))
    return out


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        if t.kind != "end":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not (self.tok.kind == "op" and self.tok.text == text):
            shown = self.tok.text or "end of line"
            self.fail(f"expected {text!r}, found {shown!r}")
        return self.next()

    def expect_end(self):
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")


def _rational(cur: _Cursor) -> Fraction:
    t = cur.tok
    if t.kind != "int":
        cur.fail(f"expected a number, found {t.text or 'end of line'!r}")
    cur.next()
    num = int(t.text)
    if cur.accept("/"):
        d = cur.tok
        if d.kind != "int":
            cur.fail("expected a denominator")
        cur.next()
        if int(d.text) == 0:
            raise ParseError("zero denominator", d.line, d.col)
        return Fraction(num, int(d.text))
    return Fraction(num)


def _sign(cur: _Cursor) -> int:
    if cur.accept("-"):
        return -1
    cur.accept("+")
    return 1


def _signed_rational(cur: _Cursor) -> Fraction:
    sign = _sign(cur)
    return sign * _rational(cur)


def _factor(cur: _Cursor, index: dict, nvars: int) -> Polynomial:
    t = cur.tok
    if t.kind == "int":
        return Polynomial.constant(nvars, _rational(cur))
    if t.kind == "id":
        cur.next()
        if t.text not in index:
            raise ParseError(f"undeclared variable {t.text!r}", t.line, t.col)
        exp = 1
        if cur.accept("^"):
            e = cur.tok
            if e.kind != "int":
                cur.fail("exponent must be a non-negative integer")
            cur.next()
            exp = int(e.text)
        mono = [0] * nvars
        mono[index[t.text]] = exp
        return Polynomial.monomial(mono)
    cur.fail(f"expected a number or variable, found {t.text or 'end of line'!r}")


def _term(cur: _Cursor, index: dict, nvars: int) -> Polynomial:
    p = _factor(cur, index, nvars)
    while cur.accept("*"):
        p = p * _factor(cur, index, nvars)
    return p


def parse_expression(cur: _Cursor, names: Sequence[str]) -> Polynomial:
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    sign = _sign(cur)
    acc = _term(cur, index, n).scale(sign)
    while True:
        if cur.accept("+"):
            acc = acc + _term(cur, index, n)
        elif cur.accept("-"):
            acc = acc - _term(cur, index, n)
        else:
            return acc


def parse_expr(text: str, names: Sequence[str]) -> Polynomial:
    """Parse a single expression over the given variable names."""
    cur = _Cursor(tokenize(text, 1))
    p = parse_expression(cur, names)
    cur.expect_end()
    return p


def _lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = tokenize(line, lineno)
        if toks[0].kind != "end":
            yield lineno, toks


def _vars_header(lines) -> tuple[list[str], int]:
    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise ParseError("empty input; expected a 'vars' line") from None
    if toks[0].kind != "id" or toks[0].text != "vars":
        raise ParseError("first statement must be 'vars <name> ...'", lineno, toks[0].col)
    names = []
    for t in toks[1:-1]:
        if t.kind != "id":
            raise ParseError(f"bad variable name {t.text!r}", t.line, t.col)
        if t.text in names:
            raise ParseError(f"variable {t.text!r} declared twice", t.line, t.col)
        if t.text in ("vars", "affine", "elem"):
            raise ParseError(f"{t.text!r} is a reserved word", t.line, t.col)
        names.append(t.text)
    if not names:
        raise ParseError("'vars' needs at least one name", lineno, toks[-1].col)
    return names, lineno


def parse_system_named(text: str) -> tuple[VectorField, list[str]]:
    lines = _lines(text)
    names, header_line = _vars_header(lines)
    eqs: dict[str, Polynomial] = {}
    for lineno, toks in lines:
        cur = _Cursor(toks)
        t = cur.next()
        if t.kind != "id":
            cur.fail("expected '<name>' = <expr>'", t)
        if t.text not in names:
            raise ParseError(f"equation for undeclared variable {t.text!r}", t.line, t.col)
        if t.text in eqs:
            raise ParseError(f"duplicate equation for {t.text!r}", t.line, t.col)
        cur.expect("'")
        cur.expect("=")
        eqs[t.text] = parse_expression(cur, names)
        cur.expect_end()
    missing = [v for v in names if v not in eqs]
    if missing:
        raise ParseError(f"no equation for {', '.join(missing)}", header_line, 1)
    return VectorField(len(names), [eqs[v] for v in names]), names


def parse_system(text: str) -> VectorField:
    return parse_system_named(text)[0]


def render_system(f: PolyMap, names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(f.n_in)]
    out = ["vars " + " ".join(names)]
    for name, c in zip(names, f.components):
        out.append(f"{name}' = {c.render(names)}")
    return "\n".join(out) + "\n"


def _bracket_list(cur: _Cursor) -> list[Fraction]:
    cur.expect("[")
    vals = []
    if not cur.accept("]"):
        vals.append(_signed_rational(cur))
        while cur.accept(","):
            vals.append(_signed_rational(cur))
        cur.expect("]")
    return vals


def _matrix(cur: _Cursor) -> list[list[Fraction]]:
    cur.expect("[")
    rows = [_bracket_list(cur)]
    while cur.accept(","):
        rows.append(_bracket_list(cur))
    cur.expect("]")
    return rows


def parse_automorphism_named(text: str) -> tuple[TameAutomorphism, list[str]]:
    lines = _lines(text)
    names, _ = _vars_header(lines)
    n = len(names)
    gens = []
    for lineno, toks in lines:
        cur = _Cursor(toks)
        head = cur.next()
        if head.kind == "id" and head.text == "affine":
            start = cur.tok
            A = _matrix(cur)
            b = _bracket_list(cur) if cur.accept(";") else [Fraction(0)] * n
            cur.expect_end()
            if len(A) != n or any(len(r) != n for r in A) or len(b) != n:
                raise ParseError(f"affine statement must be {n}x{n} with offset of length {n}",
                                 start.line, start.col)
            try:
                gens.append(make_affine(A, b))
            except NotInvertibleError as exc:
                raise ParseError(str(exc), start.line, start.col) from None
        elif head.kind == "id" and head.text == "elem":
            t = cur.next()
            if t.kind != "id" or t.text not in names:
                raise ParseError(f"elementary target must be a declared variable, got {t.text!r}",
                                 t.line, t.col)
            cur.expect(":")
            g = parse_expression(cur, names)
            cur.expect_end()
            try:
                gens.append(make_elementary(n, names.index(t.text), g))
            except ElementaryError as exc:
                raise ParseError(str(exc), t.line, t.col) from None
        else:
            raise ParseError("expected an 'affine' or 'elem' statement", head.line, head.col)
    return TameAutomorphism(n, gens), names


def parse_automorphism(text: str) -> TameAutomorphism:
    return parse_automorphism_named(text)[0]


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else format_fraction(q)


def render_automorphism(phi: TameAutomorphism, names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(phi.n)]
    out = ["vars " + " ".join(names)]
    for gen in phi.generators:
        if hasattr(gen, "A"):
            rows = ",".join("[" + ",".join(_fmt(v) for v in row) + "]" for row in gen.A)
            out.append(f"affine [{rows}] ; [{','.join(_fmt(v) for v in gen.b)}]")
        else:
            out.append(f"elem {names[gen.target]} : {gen.g.render(names)}")
    return "\n".join(out) + "\n"


def parse_polymap_named(text: str, names: Sequence[str] | None = None
                        ) -> tuple[PolyMap, list[str], list[str]]:
    """``vars`` line then ``<out> = <expr>`` lines, one per output component.

    When ``names`` is given the declared variables must match it.
    """
    lines = _lines(text)
    declared, header_line = _vars_header(lines)
    if names is not None and list(names) != declared:
        raise ParseError(f"map is over ({', '.join(declared)}), expected ({', '.join(names)})",
                         header_line, 1)
    outs, comps = [], []
    for lineno, toks in lines:
        cur = _Cursor(toks)
        t = cur.next()
        if t.kind != "id":
            cur.fail("expected '<name> = <expr>'", t)
        if t.text in outs:
            raise ParseError(f"duplicate component {t.text!r}", t.line, t.col)
        cur.expect("=")
        comps.append(parse_expression(cur, declared))
        cur.expect_end()
        outs.append(t.text)
    if not comps:
        raise ParseError("polynomial map has no components", header_line, 1)
    return PolyMap(len(declared), comps), declared, outs


def parse_polymap(text: str) -> PolyMap:
    return parse_polymap_named(text)[0]


def render_polymap(m: PolyMap, names: Sequence[str] | None = None,
                   outputs: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(m.n_in)]
    outputs = list(outputs) if outputs is not None else [f"y{i + 1}" for i in range(m.n_out)]
    if len(outputs) != m.n_out:
        raise DimensionError("one output name per component")
    out = ["vars " + " ".join(names)]
    out += [f"{o} = {c.render(names)}" for o, c in zip(outputs, m.components)]
    return "\n".join(out) + "\n"
