"""Affine, elementary, tame and stably tame polynomial automorphisms.

Automorphisms are only ever built from generators, so their inverses are
exact by construction. Generators are listed in application order:
``phi = gen_k o ... o gen_1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from . import linalg
from .poly import (
    DimensionError,
    PolyMap,
    Polynomial,
    VectorField,
    identity_map,
    jacobian,
)


class NotInvertibleError(ValueError):
    pass


class ElementaryError(ValueError):
    pass


@dataclass(frozen=True)
class AffineGen:
    A: tuple
    b: tuple
    A_inv: tuple

    @property
    def n(self) -> int:
        return len(self.A)

    def forward_map(self) -> PolyMap:
        return _affine_map(self.A, self.b)

    def inverse_map(self) -> PolyMap:
        return _affine_map(self.A_inv, [-v for v in linalg.matvec(self.A_inv, self.b)])

    def inverse(self) -> "AffineGen":
        c = tuple(-v for v in linalg.matvec(self.A_inv, self.b))
        return AffineGen(self.A_inv, c, self.A)

    def apply_to(self, m: PolyMap) -> PolyMap:
        """``self o m``."""
        comps = []
        for row, bi in zip(self.A, self.b):
            p = Polynomial.constant(m.n_in, bi)
            for a, c in zip(row, m.components):
                if a:
                    p = p + c.scale(a)
            comps.append(p)
        return PolyMap(m.n_in, comps)


@dataclass(frozen=True)
class ElementaryGen:
    n: int
    target: int
    g: Polynomial

    def forward_map(self) -> PolyMap:
        return self.apply_to(identity_map(self.n))

    def inverse_map(self) -> PolyMap:
        return self.inverse().forward_map()

    def inverse(self) -> "ElementaryGen":
        return ElementaryGen(self.n, self.target, -self.g)

    def apply_to(self, m: PolyMap) -> PolyMap:
        comps = list(m.components)
        comps[self.target] = comps[self.target] + self.g.substitute(m)
        return PolyMap(m.n_in, comps)


Generator = Union[AffineGen, ElementaryGen]


def _affine_map(A, b) -> PolyMap:
    n = len(A)
    xs = [Polynomial.var(n, j) for j in range(n)]
    comps = []
    for row, bi in zip(A, b):
        p = Polynomial.constant(n, bi)
        for a, x in zip(row, xs):
            if a:
                p = p + x.scale(a)
        comps.append(p)
    return PolyMap(n, comps)


def make_affine(A, b=None) -> AffineGen:
    A = linalg.to_matrix(A)
    n = len(A)
    if not linalg.is_square(A):
        raise DimensionError("affine matrix must be square")
    b = linalg.to_vector(b if b is not None else [0] * n)
    if len(b) != n:
        raise DimensionError(f"offset has length {len(b)}, matrix is {n}x{n}")
    try:
        inv = linalg.inverse(A)
    except linalg.SingularMatrixError:
        raise NotInvertibleError("affine matrix is singular") from None
    return AffineGen(tuple(map(tuple, A)), tuple(b), tuple(map(tuple, inv)))


def make_elementary(n: int, target: int, g: Polynomial) -> ElementaryGen:
    if g.nvars != n:
        raise DimensionError(f"perturbation lives in {g.nvars} variables, expected {n}")
    if not 0 <= target < n:
        raise IndexError(f"target {target} out of range")
    if g.depends_on(target):
        raise ElementaryError(f"perturbation depends on its own target variable x{target + 1}")
    if g.degree < 2:
        raise ElementaryError("perturbation must have degree >= 2; use an affine generator")
    return ElementaryGen(n, target, g)


def permutation_gen(perm: Sequence[int]) -> AffineGen:
    return make_affine(linalg.permutation_matrix(perm))


class TameAutomorphism:
    """Composition of generators, first listed applied first."""

    def __init__(self, n: int, generators: Sequence[Generator] = ()):
        gens = tuple(generators)
        for gen in gens:
            if gen.n != n:
                raise DimensionError(f"generator on R^{gen.n} inside automorphism of R^{n}")
        self.n = n
        self.generators = gens
        fwd = identity_map(n)
        for gen in gens:
            fwd = gen.apply_to(fwd)
        inv = identity_map(n)
        for gen in reversed(gens):
            inv = gen.inverse().apply_to(inv)
        self.forward = fwd
        self.inverse_map = inv
        self._verify()

    def _verify(self):
        ident = identity_map(self.n)
        m = self.inverse_map
        for gen in self.generators:
            m = gen.apply_to(m)
        if m != ident:
            raise AssertionError("forward o inverse is not the identity")
        m = self.forward
        for gen in reversed(self.generators):
            m = gen.inverse().apply_to(m)
        if m != ident:
            raise AssertionError("inverse o forward is not the identity")

    @classmethod
    def identity(cls, n: int) -> "TameAutomorphism":
        return cls(n, ())

    @classmethod
    def of(cls, *gens: Generator) -> "TameAutomorphism":
        if not gens:
            raise ValueError("need at least one generator; use identity(n)")
        return cls(gens[0].n, gens)

    def inverse(self) -> "TameAutomorphism":
        return TameAutomorphism(self.n, [g.inverse() for g in reversed(self.generators)])

    def __call__(self, point):
        return self.forward.evaluate(point)

    def __repr__(self):
        return f"TameAutomorphism(n={self.n}, generators={len(self.generators)})"


def compose(outer: TameAutomorphism, inner: TameAutomorphism) -> TameAutomorphism:
    """``outer o inner``."""
    if outer.n != inner.n:
        raise DimensionError(f"cannot compose automorphisms of R^{outer.n} and R^{inner.n}")
    return TameAutomorphism(outer.n, inner.generators + outer.generators)


def retarget(gen: ElementaryGen, target: int) -> tuple[AffineGen, ElementaryGen]:
    """Write ``gen`` as ``P o e o P`` with ``e`` perturbing slot ``target``."""
    perm = linalg.swap_permutation(gen.n, gen.target, target)
    return permutation_gen(perm), ElementaryGen(gen.n, target, gen.g.permute(perm))


# pushforward


def pushforward_maps(f: PolyMap, forward: PolyMap, inverse: PolyMap) -> VectorField:
    """h(y) = D(forward)(x) f(x) with x = inverse(y)."""
    if not (f.n_in == f.n_out == forward.n_in == forward.n_out == inverse.n_in == inverse.n_out):
        raise DimensionError("field and maps have different dimensions")
    n = f.n_in
    f_y = [c.substitute(inverse) for c in f.components]
    comps = []
    for row in jacobian(forward):
        acc = Polynomial.zero(n)
        for d, fj in zip(row, f_y):
            if d and fj:
                acc = acc + (d.substitute(inverse) if not d.is_constant() else
                             Polynomial.constant(n, d.constant_term())) * fj
        comps.append(acc)
    return VectorField(n, comps)


def elementary_closed_form(f: PolyMap, gen: ElementaryGen) -> VectorField:
    """Pushforward through an elementary map written out componentwise."""
    inv = gen.inverse_map()
    f_y = [c.substitute(inv) for c in f.components]
    t = gen.target
    last = f_y[t]
    for i in range(gen.n):
        if i != t and gen.g.depends_on(i):
            last = last + gen.g.diff(i) * f_y[i]
    f_y[t] = last
    return VectorField(gen.n, f_y)


def pushforward_generator(f: PolyMap, gen: Generator) -> VectorField:
    h = pushforward_maps(f, gen.forward_map(), gen.inverse_map())
    if isinstance(gen, ElementaryGen) and h != elementary_closed_form(f, gen):
        raise AssertionError("Jacobian pushforward disagrees with the elementary closed form")
    return h


def pushforward(f: PolyMap, phi: TameAutomorphism) -> VectorField:
    """Dynamics of y = phi(x) when x' = f(x), folded generator by generator."""
    if f.n_in != phi.n or f.n_out != phi.n:
        raise DimensionError(f"field on R^{f.n_in}, automorphism on R^{phi.n}")
    h = VectorField.from_map(f)
    for gen in phi.generators:
        h = pushforward_generator(h, gen)
    return h


def pushforward_direct(f: PolyMap, phi: TameAutomorphism) -> VectorField:
    """Same as :func:`pushforward` but through the flattened maps."""
    return pushforward_maps(f, phi.forward, phi.inverse_map)


# stably tame


@dataclass(frozen=True)
class StablyTameWitness:
    n: int
    m: int
    phi: TameAutomorphism
    stabilizer: PolyMap
    psi: PolyMap
    psi_inverse: PolyMap | None = None
    stabilizer_image: PolyMap = field(default=None, repr=False)

    def tail_in_y(self) -> PolyMap:
        """Last m coordinates of phi(x, y(x)) written as functions of psi(x)."""
        if self.psi_inverse is None:
            raise ValueError("witness carries no inverse of psi")
        return self.stabilizer_image.compose(self.psi_inverse)


def make_stably_tame(phi: TameAutomorphism, stabilizer: PolyMap,
                     psi_inverse: PolyMap | None = None) -> StablyTameWitness:
    n = stabilizer.n_in
    m = stabilizer.n_out
    if m < 1:
        raise DimensionError("need at least one stabilizing variable")
    if phi.n != n + m:
        raise DimensionError(f"phi acts on R^{phi.n}, expected R^{n + m}")
    graph = PolyMap(n, list(identity_map(n).components) + list(stabilizer.components))
    image = phi.forward.compose(graph)
    psi = PolyMap(n, image.components[:n])
    tail = PolyMap(n, image.components[n:])
    ident = identity_map(n)
    if psi_inverse is not None:
        if psi_inverse.n_in != n or psi_inverse.n_out != n:
            raise DimensionError("psi inverse has the wrong shape")
        if psi.compose(psi_inverse) != ident or psi_inverse.compose(psi) != ident:
            raise ValueError("supplied map is not an inverse of psi")
    else:
        # works whenever the stabilizing tail vanishes on the image
        zero_tail = PolyMap(n, list(ident.components) + [Polynomial.zero(n)] * m)
        cand = PolyMap(n, phi.inverse_map.compose(zero_tail).components[:n])
        if psi.compose(cand) == ident and cand.compose(psi) == ident:
            psi_inverse = cand
    return StablyTameWitness(n, m, phi, stabilizer, psi, psi_inverse, tail)
