"""Exact sparse multivariate polynomials over the rationals.

A polynomial lives in a fixed ambient space of ``nvars`` variables. Terms are
kept in a dict ``packed monomial -> mpq`` with zero coefficients never
stored, so two polynomials are equal exactly when their dicts are equal.

A packed monomial is one integer: the total degree sits in the top field and
the exponent of x1, x2, ... follow in decreasing significance. Comparing
packed keys as integers is therefore graded-lexicographic order, and
multiplying monomials is adding their keys.

Variable indices are 0-based throughout the library.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import flint
from gmpy2 import mpq

__all__ = [
    "DimensionError",
    "Polynomial",
    "PolyMap",
    "VectorField",
    "grlex_key",
    "as_fraction",
    "jacobian",
    "lie_derivative_scalar",
    "lie_derivative_field",
    "identity_map",
    "linear_combination",
    "is_linear_combination",
    "default_names",
]

BITS = 24
MASK = (1 << BITS) - 1
MAX_EXP = MASK
# products with more term pairs than this go through flint
FLINT_THRESHOLD = 4000


class DimensionError(ValueError):
    """Ambient dimensions of two operands do not agree."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if type(value) is _MPQ:
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"inexact coefficient {value!r}; use int, Fraction or 'p/q'")


def _as_mpq(value):
    if type(value) is _MPQ:
        return value
    q = as_fraction(value)
    return mpq(int(q.numerator), int(q.denominator))


_MPQ = type(mpq(1))
_ONE = mpq(1)


def grlex_key(mono: Sequence[int]):
    """Sort key for graded-lexicographic order with x1 > x2 > ... > xn."""
    return (sum(mono), tuple(mono))


def default_names(n: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


@lru_cache(maxsize=None)
def _shifts(n: int) -> tuple:
    # shift of variable i; the degree field sits above all of them
    return tuple(BITS * (n - 1 - i) for i in range(n))


def _pack(mono: Sequence[int], n: int) -> int:
    key = sum(mono) << (BITS * n)
    for e, s in zip(mono, _shifts(n)):
        key |= e << s
    return key


def _unpack(key: int, n: int) -> tuple:
    return tuple((key >> s) & MASK for s in _shifts(n))


@lru_cache(maxsize=None)
def _flint_ctx(n: int):
    return flint.fmpq_mpoly_ctx.get(("x", n), "deglex")


def _to_flint(p: "Polynomial"):
    # cached on the instance; polynomials are immutable
    if p._flint is None:
        n = p.nvars
        p._flint = _flint_ctx(n).from_dict(
            {_unpack(k, n): flint.fmpq(int(c.numerator), int(c.denominator))
             for k, c in p._terms.items()}
        )
    return p._flint


def _from_flint(q, n: int) -> "Polynomial":
    # the term dict is built on first use; chains of flint work never need it
    p = Polynomial._raw(n, None)
    p._flint = q
    return p


def _terms_of_flint(q, n: int) -> dict:
    return {_pack(tuple(map(int, e)), n): mpq(int(c.p), int(c.q)) for e, c in q.to_dict().items()}


class Polynomial:
    __slots__ = ("nvars", "_t", "_hash", "_deg", "_flint")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        clean: dict = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(mono)
                if len(mono) != nvars or any(e < 0 for e in mono):
                    raise ValueError(f"bad exponent vector {mono} for {nvars} variables")
                if any(e > MAX_EXP for e in mono):
                    raise OverflowError("exponent too large")
                c = _as_mpq(c)
                if c:
                    key = _pack(mono, nvars)
                    v = clean.get(key, 0) + c
                    if v:
                        clean[key] = v
                    else:
                        del clean[key]
        self._t = clean
        self._hash = None
        self._deg = None
        self._flint = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        # terms already clean (packed keys, nonzero mpq values), or None when
        # the caller sets _flint and the dict is derived on demand
        p = object.__new__(cls)
        p.nvars = nvars
        p._t = terms
        p._hash = None
        p._deg = None
        p._flint = None
        return p

    @property
    def _terms(self) -> dict:
        if self._t is None:
            self._t = _terms_of_flint(self._flint, self.nvars)
        return self._t

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        c = _as_mpq(c)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        key = (1 << (BITS * nvars)) | (1 << _shifts(nvars)[i])
        return cls._raw(nvars, {key: _ONE})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): coeff})

    # inspection

    def terms(self) -> list[tuple[tuple, Fraction]]:
        """Terms in ascending graded-lex order (constant first)."""
        n = self.nvars
        return [(_unpack(k, n), as_fraction(self._terms[k])) for k in sorted(self._terms)]

    def as_dict(self) -> dict[tuple, Fraction]:
        return dict(self.terms())

    def coeff(self, mono: Sequence[int]) -> Fraction:
        return as_fraction(self._terms.get(_pack(tuple(mono), self.nvars), 0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        if self._t is None:
            return not self._flint.is_zero()
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            if self._t is None:
                self._deg = -1 if self._flint.is_zero() else int(self._flint.total_degree())
            else:
                self._deg = (max(self._t) >> (BITS * self.nvars)) if self._t else -1
        return self._deg

    def is_constant(self) -> bool:
        return self.degree <= 0

    def constant_term(self) -> Fraction:
        return as_fraction(self._terms.get(0, 0))

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        s = _shifts(self.nvars)[i]
        return max((k >> s) & MASK for k in self._terms)

    def depends_on(self, i: int) -> bool:
        s = _shifts(self.nvars)[i]
        return any((k >> s) & MASK for k in self._terms)

    def leading_monomial(self) -> tuple:
        return _unpack(max(self._terms), self.nvars)

    def leading_coeff(self):
        return self._terms[max(self._terms)]

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"{self.nvars} vs {other.nvars} variables")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v -= c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.nvars, out)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = _as_mpq(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return Polynomial.zero(self.nvars)
        if self.degree + other.degree > MAX_EXP:
            raise OverflowError("polynomial degree exceeds the packed exponent range")
        if self.nvars and len(self._terms) * len(other._terms) > FLINT_THRESHOLD:
            return _from_flint(_to_flint(self) * _to_flint(other), self.nvars)
        out: dict = {}
        get = out.get
        b = other._terms.items()
        for m1, c1 in self._terms.items():
            for m2, c2 in b:
                m = m1 + m2
                out[m] = get(m, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if self.nvars != other.nvars:
                return False
            if self._flint is not None and other._flint is not None:
                return self._flint == other._flint
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(self.nvars, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # calculus and composition

    def diff(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        s = _shifts(self.nvars)[i]
        step = (1 << (BITS * self.nvars)) + (1 << s)
        out = {}
        for m, c in self._terms.items():
            e = (m >> s) & MASK
            if e:
                out[m - step] = c * e
        return Polynomial._raw(self.nvars, out)

    def substitute(self, images: "PolyMap | Sequence[Polynomial]") -> "Polynomial":
        """Compose: replace variable i by ``images[i]``."""
        comps = images.components if isinstance(images, PolyMap) else tuple(images)
        if len(comps) != self.nvars:
            raise DimensionError(f"need {self.nvars} images, got {len(comps)}")
        if isinstance(images, PolyMap):
            n_out = images.n_in
        elif comps:
            n_out = comps[0].nvars
        else:
            raise DimensionError("cannot infer target space of an empty substitution")
        if any(c.nvars != n_out for c in comps):
            raise DimensionError("substitution images live in different spaces")
        flint_backed = self._t is None
        if self.nvars and n_out and (flint_backed or (len(self._t) > 1 and self.degree > 1)):
            return _from_flint(_to_flint(self).compose(*map(_to_flint, comps),
                                                       ctx=_flint_ctx(n_out)), n_out)
        one = Polynomial.constant(n_out, 1)
        powers = [{0: one, 1: c} for c in comps]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e // 2) * power(i, e - e // 2)
            return cache[e]

        n = self.nvars
        acc: dict = {}
        get = acc.get
        for m, c in self._terms.items():
            term = None
            for i, e in enumerate(_unpack(m, n)):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            if term is None:
                acc[0] = get(0, 0) + c
            else:
                for mm, cc in term._terms.items():
                    acc[mm] = get(mm, 0) + c * cc
        return Polynomial._raw(n_out, {m: c for m, c in acc.items() if c})

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact for Fraction/int input, float otherwise."""
        if len(point) != self.nvars:
            raise DimensionError(f"need {self.nvars} coordinates, got {len(point)}")
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0.0
        for m, c in self._terms.items():
            t = as_fraction(c) if exact else float(c)
            for x, e in zip(point, _unpack(m, self.nvars)):
                if e:
                    t = t * x**e
            total = total + t
        return total

    def extend(self, nvars: int, offset: int = 0) -> "Polynomial":
        """Re-embed into a bigger space, shifting variable i to ``i + offset``."""
        if offset < 0 or offset + self.nvars > nvars:
            raise DimensionError("embedding does not fit")
        pad_r = nvars - offset - self.nvars
        n = self.nvars
        return Polynomial._raw(
            nvars,
            {_pack((0,) * offset + _unpack(m, n) + (0,) * pad_r, nvars): c
             for m, c in self._terms.items()},
        )

    def permute(self, perm: Sequence[int]) -> "Polynomial":
        """Rename variable i to ``perm[i]``."""
        n = self.nvars
        out = {}
        for m, c in self._terms.items():
            mm = [0] * n
            for i, e in enumerate(_unpack(m, n)):
                mm[perm[i]] = e
            out[_pack(mm, n)] = c
        return Polynomial._raw(n, out)

    # rendering

    def render(self, names: Sequence[str] | None = None) -> str:
        """Text in the expression grammar, terms in ascending graded-lex order."""
        names = list(names) if names is not None else default_names(self.nvars)
        if not self._terms:
            return "0"
        parts = []
        for k, (m, c) in enumerate(self.terms()):
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e
            ]
            mag = abs(c)
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.render()!r})"


class PolyMap:
    """A polynomial map R^n_in -> R^n_out given by its components."""

    __slots__ = ("n_in", "components")

    def __init__(self, n_in: int, components: Iterable[Polynomial]):
        comps = tuple(components)
        for c in comps:
            if not isinstance(c, Polynomial):
                raise TypeError("components must be Polynomial")
            if c.nvars != n_in:
                raise DimensionError(f"component in {c.nvars} variables, map has n_in={n_in}")
        self.n_in = n_in
        self.components = comps

    @property
    def n_out(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.n_in == other.n_in and self.components == other.components

    def __hash__(self):
        return hash((self.n_in, self.components))

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.components), default=-1)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """Return ``self o inner``."""
        if inner.n_out != self.n_in:
            raise DimensionError(f"inner map has {inner.n_out} outputs, need {self.n_in}")
        return type(self)._build(inner.n_in, [c.substitute(inner) for c in self.components])

    def evaluate(self, point):
        return [c.evaluate(point) for c in self.components]

    def render(self, names=None) -> list[str]:
        return [c.render(names) for c in self.components]

    @classmethod
    def _build(cls, n_in, comps):
        if cls is VectorField and len(comps) != n_in:
            return PolyMap(n_in, comps)
        return cls(n_in, comps)

    def __repr__(self):
        return f"{type(self).__name__}({self.n_in}, {self.render()})"


class VectorField(PolyMap):
    """Square polynomial map, read as the right-hand side of x' = f(x)."""

    __slots__ = ()

    def __init__(self, n_in: int, components: Iterable[Polynomial]):
        super().__init__(n_in, components)
        if self.n_out != n_in:
            raise DimensionError(f"vector field must be square, got {n_in} -> {self.n_out}")

    @property
    def n(self) -> int:
        return self.n_in

    @classmethod
    def from_map(cls, m: PolyMap) -> "VectorField":
        return cls(m.n_in, m.components)

    @classmethod
    def linear(cls, A) -> "VectorField":
        n = len(A)
        xs = [Polynomial.var(n, j) for j in range(n)]
        comps = []
        for row in A:
            p = Polynomial.zero(n)
            for a, x in zip(row, xs):
                if a:
                    p = p + x.scale(a)
            comps.append(p)
        return cls(n, comps)


def linear_combination(coeffs: Sequence, polys: Sequence[Polynomial], nvars: int) -> Polynomial:
    """sum_i coeffs[i] * polys[i]."""
    pairs = [(a, p) for a, p in zip(coeffs, polys) if a]
    for _, p in pairs:
        if p.nvars != nvars:
            raise DimensionError(f"term in {p.nvars} variables, expected {nvars}")
    if sum(len(p._terms) for _, p in pairs) > FLINT_THRESHOLD:
        return _from_flint(_combination_flint(pairs, nvars), nvars)
    acc: dict = {}
    get = acc.get
    for a, p in zip(coeffs, polys):
        if not a:
            continue
        if p.nvars != nvars:
            raise DimensionError(f"term in {p.nvars} variables, expected {nvars}")
        a = _as_mpq(a)
        for m, c in p._terms.items():
            acc[m] = get(m, 0) + a * c
    return Polynomial._raw(nvars, {m: c for m, c in acc.items() if c})


def _combination_flint(pairs, nvars: int):
    acc = _flint_ctx(nvars).from_dict({})
    for a, p in pairs:
        q = as_fraction(a)
        acc += flint.fmpq(q.numerator, q.denominator) * _to_flint(p)
    return acc


def is_linear_combination(target: Polynomial, coeffs: Sequence, polys: Sequence[Polynomial]) -> bool:
    """Exact test of ``target == sum_i coeffs[i] * polys[i]``."""
    pairs = [(a, p) for a, p in zip(coeffs, polys) if a]
    if sum(len(p._terms) for _, p in pairs) > FLINT_THRESHOLD:
        return _to_flint(target) == _combination_flint(pairs, target.nvars)
    return target == linear_combination(coeffs, polys, target.nvars)


def identity_map(n: int) -> PolyMap:
    return PolyMap(n, [Polynomial.var(n, i) for i in range(n)])


def jacobian(m: PolyMap) -> list[list[Polynomial]]:
    """Matrix of partials, entry (i, j) = d m_i / d x_j."""
    return [[c.diff(j) for j in range(m.n_in)] for c in m.components]


def lie_derivative_scalar(f: PolyMap, p: Polynomial) -> Polynomial:
    """Derivative of p along x' = f(x): sum_i (dp/dx_i) f_i."""
    if p.nvars != f.n_in or f.n_out != f.n_in:
        raise DimensionError("observable and field live in different spaces")
    work = len(p._terms) * sum(len(fi._terms) for fi in f.components)
    if work > FLINT_THRESHOLD:
        return _lie_flint(f, p)
    return _lie_python(f, p)


def _lie_flint(f: PolyMap, p: Polynomial) -> Polynomial:
    fp = _to_flint(p)
    acc = _flint_ctx(p.nvars).from_dict({})
    for i, fi in enumerate(f.components):
        if fi and p.depends_on(i):
            acc += fp.derivative(i) * _to_flint(fi)
    return _from_flint(acc, p.nvars)


def _lie_python(f: PolyMap, p: Polynomial) -> Polynomial:
    acc: dict = {}
    get = acc.get
    for i, fi in enumerate(f.components):
        if fi and p.depends_on(i):
            b = fi._terms.items()
            for m1, c1 in p.diff(i)._terms.items():
                for m2, c2 in b:
                    m = m1 + m2
                    acc[m] = get(m, 0) + c1 * c2
    return Polynomial._raw(p.nvars, {m: c for m, c in acc.items() if c})


def lie_derivative_field(f: PolyMap, g: PolyMap) -> PolyMap:
    if g.n_in != f.n_in:
        raise DimensionError("fields live in different spaces")
    return VectorField._build(f.n_in, [lie_derivative_scalar(f, c) for c in g.components])
