"""Constructive lift transformations.

Each function takes a valid lift of some field and returns a valid lift of
a transformed field without rerunning the closure search on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .automorphism import (
    AffineGen,
    ElementaryGen,
    StablyTameWitness,
    TameAutomorphism,
    pushforward_maps,
    retarget,
)
from .linearizer import Lift, _fraction, _PolySpan, check_lift_symbolic
from .poly import (
    DimensionError,
    PolyMap,
    Polynomial,
    VectorField,
    _flint_ctx,
    _from_flint,
    _to_flint,
    identity_map,
    jacobian,
    lie_derivative_field,
    lie_derivative_scalar,
)


class PremiseError(ValueError):
    """A witness does not satisfy the identities the construction relies on."""


def _linear_map(M, nvars=None) -> PolyMap:
    n = len(M[0]) if nvars is None else nvars
    xs = [Polynomial.var(n, j) for j in range(n)]
    comps = []
    for row in M:
        p = Polynomial.zero(n)
        for a, x in zip(row, xs):
            if a:
                p = p + x.scale(a)
        comps.append(p)
    return PolyMap(n, comps)


@dataclass(frozen=True)
class ProjectionWitness:
    """``h`` on R^m restricted to the graph of ``p`` reproduces ``f`` on R^n."""

    h: VectorField
    f: VectorField
    p: PolyMap

    def __post_init__(self):
        n, m = self.f.n_in, self.h.n_in
        if not 0 < n <= m:
            raise DimensionError("need 0 < n <= m")
        if self.p.n_in != n or self.p.n_out != m - n:
            raise DimensionError(f"p must map R^{n} -> R^{m - n}")
        graph = PolyMap(n, list(identity_map(n).components) + list(self.p.components))
        h_on_graph = self.h.compose(graph)
        if list(h_on_graph.components[:n]) != list(self.f.components):
            raise PremiseError("h restricted to the graph of p does not reproduce f")
        for pj, hj in zip(self.p.components, h_on_graph.components[n:]):
            if lie_derivative_scalar(self.f, pj) != hj:
                raise PremiseError("graph of p is not invariant under h")

    @property
    def m(self) -> int:
        return self.h.n_in

    @property
    def n(self) -> int:
        return self.f.n_in


def project_lift(w: ProjectionWitness, lift_h: Lift) -> Lift:
    if lift_h.n != w.m:
        raise DimensionError(f"lift is over R^{lift_h.n}, witness needs R^{w.m}")
    n = w.n
    graph = PolyMap(n, list(identity_map(n).components) + list(w.p.components))
    q = [c.substitute(graph) for c in lift_h.observables.components]
    obs = PolyMap(n, list(w.p.components) + q)
    return Lift(n, lift_h.A, obs, lift_h.provenance + ("project",))


def _state_closure(f: PolyMap, stack, seeds):
    """Close ``seeds`` under ``L_f`` modulo the span of ``stack``.

    Returns (new generators, expressions of each seed, derivative rows of the
    new generators); expressions map state indices (stack first, then new
    generators) to coefficients.
    """
    n = f.n_in
    N = len(stack)
    span = _PolySpan(n)
    field = [(i, _to_flint(c)) for i, c in enumerate(f.components) if c]
    basis_of = []  # span row -> {state index: coeff}
    new_gens: list[Polynomial] = []
    pending: list[int] = []

    def to_state(q):
        residual, coeffs = span.reduce(q)
        expr: dict = {}
        for r, c in coeffs.items():
            for s, t in basis_of[r].items():
                expr[s] = expr.get(s, 0) + c * t
        return residual, expr

    def push(residual, combo):
        idx, lead = span.add(residual)
        basis_of.append({s: c / lead for s, c in combo.items() if c})
        return idx, lead

    for s, w in enumerate(stack):
        residual, expr = to_state(_to_flint(w))
        if not residual.is_zero():
            combo = {j: -c for j, c in expr.items()}
            combo[s] = combo.get(s, 0) + 1
            push(residual, combo)

    def express(q):
        residual, expr = to_state(q)
        if not residual.is_zero():
            s = N + len(new_gens)
            idx, lead = push(residual, {s: residual.leading_coefficient()})
            new_gens.append(span.rows[idx])
            pending.append(s)
            expr[s] = expr.get(s, 0) + lead
        return {j: _fraction(c) for j, c in expr.items() if c}

    def lie(q):
        acc = _flint_ctx(n).from_dict({})
        for i, fi in field:
            d = q.derivative(i)
            if not d.is_zero():
                acc += d * fi
        return acc

    exprs = [express(_to_flint(q)) for q in seeds]
    rows = {}
    while pending:
        s = pending.pop(0)
        rows[s] = express(lie(new_gens[s - N]))
    return [_from_flint(g, n) for g in new_gens], exprs, rows


def extend_lift(lift_f: Lift, g: PolyMap) -> Lift:
    """Lift of (x, v)' = (f(x), g(x)) from a lift of f.

    Each g_j is closed under ``L_f`` modulo the existing lift functions. The
    closure is finite: every g_j is a polynomial of degree deg g_j in the lift
    state, and along the linear lift field such polynomials stay of that degree.
    """
    n, k0, N = lift_f.n, lift_f.k, lift_f.dim
    if g.n_in != n:
        raise DimensionError(f"g must be a function of the {n} base variables")
    f = lift_f.base_field()
    if not check_lift_symbolic(f, lift_f):
        raise ValueError("extend_lift needs a valid lift")
    k = g.n_out
    new_gens, exprs, rows = _state_closure(f, lift_f.generator_functions, g.components)
    r = len(new_gens)
    D = n + k + k0 + r

    def slot(idx):
        # state order: x, v, old observables, new closure generators
        return idx if idx < n else idx + k

    A = [[Fraction(0)] * D for _ in range(D)]
    for i in range(N):
        for j, c in enumerate(lift_f.A[i]):
            A[slot(i)][slot(j)] = c
    for j, e in enumerate(exprs):
        for idx, c in e.items():
            A[n + j][slot(idx)] = c
    for idx, e in rows.items():
        for j, c in e.items():
            A[slot(idx)][slot(j)] = c

    nn = n + k
    obs = [p.extend(nn) for p in lift_f.observables.components]
    obs += [c.extend(nn) for c in new_gens]
    return Lift(nn, A, PolyMap(nn, obs), lift_f.provenance + (f"extend(k={k})",))


def conjugate_lift(lift_f: Lift, P) -> Lift:
    """Lift of z' = P f(P^-1 z)."""
    P = linalg.to_matrix(P)
    n, k = lift_f.n, lift_f.k
    if len(P) != n or not linalg.is_square(P):
        raise DimensionError(f"P must be {n}x{n}")
    Pinv = linalg.inverse(P)
    big = linalg.blockdiag(P, linalg.identity(k))
    big_inv = linalg.blockdiag(Pinv, linalg.identity(k))
    A = linalg.matmul(linalg.matmul(big, [list(r) for r in lift_f.A]), big_inv)
    back = _linear_map(Pinv)
    obs = PolyMap(n, [p.substitute(back) for p in lift_f.observables.components])
    return Lift(n, A, obs, lift_f.provenance + ("conjugate",))


def translate_lift(lift_f: Lift, c) -> Lift:
    """Lift of h(z) = f(z + c); drift is carried by a constant observable."""
    c = linalg.to_vector(c)
    n, k = lift_f.n, lift_f.k
    if len(c) != n:
        raise DimensionError(f"shift has length {len(c)}, expected {n}")
    if not any(c):
        return lift_f
    shift = PolyMap(n, [Polynomial.var(n, i) + ci for i, ci in enumerate(c)])
    obs = [p.substitute(shift) for p in lift_f.observables.components]
    A = [list(r) for r in lift_f.A]
    # d/dt (w(z + c) - (c, 0)) = A (w - (c, 0)) + A (c, 0)
    drift = [sum((row[i] * c[i] for i in range(n)), Fraction(0)) for row in A]
    const = next((j for j, p in enumerate(obs) if p and p.is_constant()), None)
    if const is None:
        obs.append(Polynomial.constant(n, 1))
        for row in A:
            row.append(Fraction(0))
        A.append([Fraction(0)] * (n + k + 1))
        col, scale = n + k, Fraction(1)
    else:
        col, scale = n + const, obs[const].constant_term()
    for row, d in zip(A, drift):
        row[col] += d / scale
    return Lift(n, A, PolyMap(n, obs), lift_f.provenance + ("translate",))


def affine_transport(lift_f: Lift, gen: AffineGen) -> Lift:
    lift = conjugate_lift(lift_f, gen.A)
    return translate_lift(lift, [-v for v in gen.b])


def elementary_transport(lift_f: Lift, gen: ElementaryGen) -> Lift:
    """Lift of the pushforward through an elementary map perturbing the last slot."""
    n = lift_f.n
    if gen.n != n:
        raise DimensionError(f"generator on R^{gen.n}, lift over R^{n}")
    if gen.target != n - 1:
        raise ValueError("elementary_transport needs the perturbation in the last slot; "
                         "retarget first")
    f = lift_f.base_field()
    g = gen.g
    # derivative of x_n + g(x) along f
    g_tilde = f.components[n - 1]
    for i in range(n - 1):
        if g.depends_on(i):
            g_tilde = g_tilde + g.diff(i) * f.components[i]
    ext = extend_lift(lift_f, PolyMap(n, [g_tilde]))
    swap = linalg.permutation_matrix(linalg.swap_permutation(n + 1, n - 1, n))
    reordered = conjugate_lift(ext, swap)
    h_big = reordered.base_field()
    witness_p = PolyMap(n, [Polynomial.var(n, n - 1) - g])
    target = pushforward_maps(f, gen.forward_map(), gen.inverse_map())
    witness = ProjectionWitness(h_big, target, witness_p)
    return project_lift(witness, reordered).with_provenance("elementary")


def _transport_generator(lift: Lift, gen) -> Lift:
    if isinstance(gen, AffineGen):
        return affine_transport(lift, gen)
    if gen.target == lift.n - 1:
        return elementary_transport(lift, gen)
    perm_gen, last = retarget(gen, lift.n - 1)
    lift = conjugate_lift(lift, perm_gen.A)
    lift = elementary_transport(lift, last)
    return conjugate_lift(lift, perm_gen.A)


def tame_transport(lift_f: Lift, phi: TameAutomorphism) -> Lift:
    if phi.n != lift_f.n:
        raise DimensionError(f"automorphism on R^{phi.n}, lift over R^{lift_f.n}")
    lift = lift_f
    for gen in phi.generators:
        lift = _transport_generator(lift, gen)
    return lift


def stably_tame_transport(lift_f: Lift, w: StablyTameWitness) -> Lift:
    """Lift of the pushforward of f through psi, via the tame map on R^(n+m)."""
    if w.n != lift_f.n:
        raise DimensionError(f"witness over R^{w.n}, lift over R^{lift_f.n}")
    if w.psi_inverse is None:
        raise PremiseError("stably tame transport needs the inverse of psi")
    f = lift_f.base_field()
    stab_rate = lie_derivative_field(f, w.stabilizer)
    ext = extend_lift(lift_f, stab_rate)
    moved = tame_transport(ext, w.phi)
    target = pushforward_maps(f, w.psi, w.psi_inverse)
    witness = ProjectionWitness(moved.base_field(), target, w.tail_in_y())
    return project_lift(witness, moved).with_provenance("stably_tame")


def appendix_a_identity(f: PolyMap, P, kmax: int) -> bool:
    """Check L^k of P f(P^-1 z) equals P (L^k f)(P^-1 z) for k <= kmax."""
    P = linalg.to_matrix(P)
    n = f.n_in
    Pinv = linalg.inverse(P)
    back = _linear_map(Pinv)

    def transform(v: PolyMap) -> VectorField:
        vz = [c.substitute(back) for c in v.components]
        comps = []
        for row in P:
            acc = Polynomial.zero(n)
            for a, c in zip(row, vz):
                if a:
                    acc = acc + c.scale(a)
            comps.append(acc)
        return VectorField(n, comps)

    ft = transform(f)
    lf, lft = VectorField.from_map(f), ft
    for k in range(kmax + 1):
        if lft != transform(lf):
            return False
        if k < kmax:
            lf = lie_derivative_field(f, lf)
            lft = lie_derivative_field(ft, lft)
    return True
