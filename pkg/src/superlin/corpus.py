"""Seeded random instances for property tests and experiment scripts.

Every sampler takes a ``random.Random`` so a seed pins the whole instance.
Coefficients are small integers and polynomials are sparse; dense random
perturbations make lifts grow faster than a desk-scale suite can afford.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .automorphism import (
    StablyTameWitness,
    TameAutomorphism,
    make_affine,
    make_elementary,
    make_stably_tame,
)
from .poly import PolyMap, Polynomial, VectorField


@dataclass(frozen=True)
class FamilyConfig:
    max_n: int = 4
    max_degree: int = 3
    max_generators: int = 3
    max_terms: int = 2
    coeff_range: int = 2


def _coeff(rng: random.Random, r: int) -> int:
    return rng.choice([c for c in range(-r, r + 1) if c])


def random_monomial(rng: random.Random, nvars: int, degree: int,
                    allowed: Sequence[int]) -> tuple:
    mono = [0] * nvars
    for _ in range(degree):
        mono[rng.choice(list(allowed))] += 1
    return tuple(mono)


def random_poly(rng: random.Random, nvars: int, allowed: Sequence[int], min_deg: int,
                max_deg: int, max_terms: int, coeff_range: int = 2) -> Polynomial:
    """Sparse polynomial in the ``allowed`` variables with a top-degree term."""
    if not allowed:
        return Polynomial.zero(nvars)
    terms = {}
    top = rng.randint(min_deg, max_deg)
    terms[random_monomial(rng, nvars, top, allowed)] = _coeff(rng, coeff_range)
    for _ in range(rng.randint(0, max_terms - 1)):
        d = rng.randint(min_deg, top)
        terms[random_monomial(rng, nvars, d, allowed)] = _coeff(rng, coeff_range)
    return Polynomial(nvars, terms)


def random_linear(rng: random.Random, n: int, coeff_range: int = 2, density: float = 0.5):
    return [[rng.randint(-coeff_range, coeff_range) if rng.random() < density else 0
             for _ in range(n)] for _ in range(n)]


def random_wdg_field(rng: random.Random, cfg: FamilyConfig = FamilyConfig()) -> VectorField:
    """Linear core on the first c variables, then polynomial feeds in DAG order.

    Every cycle lies inside the linear core or is a constant self-loop on a
    fed variable, so all cycle products are constant.
    """
    n = rng.randint(2, cfg.max_n)
    c = rng.randint(1, n - 1)
    comps = []
    core = random_linear(rng, c, cfg.coeff_range)
    for i in range(c):
        p = Polynomial.zero(n)
        for j, a in enumerate(core[i]):
            if a:
                p = p + Polynomial.var(n, j).scale(a)
        comps.append(p)
    for i in range(c, n):
        feed = random_poly(rng, n, range(i), 2, cfg.max_degree, cfg.max_terms, cfg.coeff_range)
        diag = rng.randint(-1, 1)
        comps.append(feed + Polynomial.var(n, i).scale(diag))
    return VectorField(n, comps)


def random_unimodular(rng: random.Random, n: int) -> list:
    """Permutation composed with a unit triangular shear: integer inverse."""
    perm = list(range(n))
    rng.shuffle(perm)
    P = linalg.permutation_matrix(perm)
    L = linalg.identity(n)
    if n == 1:
        L[0][0] = Fraction(rng.choice([-1, 1]))
    else:
        i, j = rng.sample(range(n), 2)
        L[i][j] = Fraction(rng.choice([-1, 1]))
    return linalg.matmul(L, P)


def random_generator(rng: random.Random, n: int, max_degree: int = 3, max_terms: int = 1,
                     coeff_range: int = 2, p_affine: float = 0.35):
    if rng.random() < p_affine or n == 1:
        b = [rng.randint(-1, 1) for _ in range(n)]
        return make_affine(random_unimodular(rng, n), b)
    target = rng.randrange(n)
    others = [j for j in range(n) if j != target]
    g = random_poly(rng, n, others, 2, max_degree, max_terms, coeff_range)
    return make_elementary(n, target, g)


def random_tame(rng: random.Random, n: int, cfg: FamilyConfig = FamilyConfig(),
                min_generators: int = 1) -> TameAutomorphism:
    """Tame map whose forward and inverse both have degree <= cfg.max_degree.

    Generators are redrawn until the composition stays within the degree cap.
    """
    k = rng.randint(min_generators, cfg.max_generators)
    gens = []
    while len(gens) < k:
        cand = gens + [random_generator(rng, n, cfg.max_degree)]
        phi = TameAutomorphism(n, cand)
        if max(phi.forward.degree, phi.inverse_map.degree) <= cfg.max_degree:
            gens = cand
    return TameAutomorphism(n, gens)


def random_stably_tame(rng: random.Random, f_n: int, max_degree: int = 2) -> StablyTameWitness:
    """Witness on R^(n+1): clear the stabilizer slot, mix it into a base slot.

    ``phi = tau o eps o sigma`` with ``sigma: w -> w - s(x)``, ``eps`` adding
    ``c w x_j + q(x)`` to slot i and an optional ``tau: w -> w + h(x)``. On
    the graph of ``s`` this gives ``psi(x) = x + q(x) e_i``, whose inverse is
    known. Without ``tau`` the inverse is also derivable from ``phi``.
    """
    n, m = f_n, f_n + 1
    s = random_poly(rng, n, range(n), 2, max_degree, 2)
    gens = [make_elementary(m, n, -s.extend(m))]
    i = rng.randrange(n)
    others = [j for j in range(n) if j != i]
    mix = Polynomial.var(m, n) * Polynomial.var(m, rng.choice(others)) if others \
        else Polynomial.var(m, n) ** 2
    mix = mix.scale(_coeff(rng, 2))
    q = random_poly(rng, n, others, 2, max_degree, 1) if others and rng.random() < 0.7 \
        else Polynomial.zero(n)
    gens.append(make_elementary(m, i, mix + q.extend(m)))
    with_tau = rng.random() < 0.5
    if with_tau:
        gens.append(make_elementary(m, n, random_poly(rng, m, range(n), 2, max_degree, 1)))
    phi = TameAutomorphism(m, gens)
    psi_inv = None
    if with_tau:
        comps = [Polynomial.var(n, j) for j in range(n)]
        comps[i] = comps[i] - q
        psi_inv = PolyMap(n, comps)
    w = make_stably_tame(phi, PolyMap(n, [s]), psi_inv)
    if w.psi_inverse is None:
        raise AssertionError("sampler produced a witness without a usable inverse")
    return w


def random_field(rng: random.Random, n: int, max_degree: int = 2, max_terms: int = 2,
                 coeff_range: int = 2) -> VectorField:
    """Unstructured polynomial field; components may be zero."""
    return VectorField(n, [
        random_poly(rng, n, range(n), 0, max_degree, max_terms, coeff_range)
        if rng.random() < 0.9 else Polynomial.zero(n)
        for _ in range(n)
    ])


def random_invertible(rng: random.Random, n: int, coeff_range: int = 2) -> list:
    while True:
        M = [[Fraction(rng.randint(-coeff_range, coeff_range)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M) == n:
            return M
