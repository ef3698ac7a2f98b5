"""Weighted dependency graphs and the constant-cycle sufficient condition.

Node ``j`` feeds node ``i`` when ``f_i`` depends on ``x_j``; the edge weight
is the partial derivative ``df_i/dx_j``. A field whose every simple cycle has
a constant weight product is super-linearizable.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Sequence

import networkx as nx

from . import linalg
from .automorphism import ElementaryGen
from .poly import DimensionError, PolyMap, Polynomial, VectorField, default_names

DEFAULT_CYCLE_CAP = 10**6


class CycleLimitError(RuntimeError):
    """More simple cycles than the configured cap."""


@dataclass(frozen=True)
class DepGraph:
    n: int
    edges: dict  # (source j, target i) -> nonzero weight

    def weight(self, src: int, dst: int) -> Polynomial | None:
        return self.edges.get((src, dst))

    def successors(self, node: int) -> list[int]:
        return sorted(i for (j, i) in self.edges if j == node)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class Cycle:
    nodes: tuple  # canonical rotation, smallest node first, closure implied
    product: Polynomial

    @property
    def constant(self) -> bool:
        return self.product.degree <= 0

    def edges(self) -> list[tuple[int, int]]:
        k = len(self.nodes)
        return [(self.nodes[i], self.nodes[(i + 1) % k]) for i in range(k)]


@dataclass(frozen=True)
class WdgReport:
    graph: DepGraph
    cycles: tuple
    satisfied: bool
    offending: Cycle | None = None


def build_graph(f: PolyMap) -> DepGraph:
    if f.n_in != f.n_out:
        raise DimensionError("dependency graphs need a square field")
    edges = {}
    for i, fi in enumerate(f.components):
        for j in range(f.n_in):
            if fi.depends_on(j):
                edges[(j, i)] = fi.diff(j)
    return DepGraph(f.n_in, edges)


def _canonical(nodes: Sequence[int]) -> tuple:
    k = nodes.index(min(nodes))
    return tuple(nodes[k:]) + tuple(nodes[:k])


def enumerate_simple_cycles(g: DepGraph, cap: int = DEFAULT_CYCLE_CAP) -> list[Cycle]:
    """All simple directed cycles, self-loops included, in canonical order."""
    raw = list(islice(nx.simple_cycles(g.to_networkx()), cap + 1))
    if len(raw) > cap:
        raise CycleLimitError(f"more than {cap} simple cycles")
    out = []
    for nodes in sorted({_canonical(c) for c in raw}, key=lambda c: (len(c), c)):
        prod = Polynomial.constant(g.n, 1)
        k = len(nodes)
        for idx in range(k):
            prod = prod * g.edges[(nodes[idx], nodes[(idx + 1) % k])]
        out.append(Cycle(nodes, prod))
    return out


def check_wdg(f: PolyMap, cap: int = DEFAULT_CYCLE_CAP) -> WdgReport:
    g = build_graph(f)
    cycles = tuple(enumerate_simple_cycles(g, cap))
    bad = next((c for c in cycles if not c.constant), None)
    return WdgReport(g, cycles, bad is None, bad)


def stabilized_field(A, gen: ElementaryGen) -> VectorField:
    """The lifted system in state ``z = (y_1..y_{n-1}, w, y_n)``.

    The first n coordinates equal the original linear state, so they evolve
    by ``A``; the last is ``y_n`` whose rate follows from the chain rule.
    """
    A = linalg.to_matrix(A)
    n = len(A)
    m = n + 1
    z = [Polynomial.var(m, j) for j in range(n)]
    rates = []
    for row in A:
        acc = Polynomial.zero(m)
        for a, zj in zip(row, z):
            if a:
                acc = acc + zj.scale(a)
        rates.append(acc)
    g = gen.g.extend(m)
    last = rates[n - 1]
    for i in range(n - 1):
        if g.depends_on(i):
            last = last + g.diff(i) * rates[i]
    return VectorField(m, rates + [last])


def wdg_stabilize(A, gen: ElementaryGen) -> tuple[Polynomial, VectorField, WdgReport]:
    """Stabilizing observable for the pushforward of ``Ax`` through ``gen``."""
    A = linalg.to_matrix(A)
    n = len(A)
    if not linalg.is_square(A):
        raise DimensionError("A must be square")
    if gen.n != n:
        raise DimensionError(f"generator on R^{gen.n}, matrix is {n}x{n}")
    if gen.target != n - 1:
        raise ValueError("wdg_stabilize needs the perturbation in the last slot")
    observable = Polynomial.var(n, n - 1) - gen.g
    lifted = stabilized_field(A, gen)
    report = check_wdg(lifted)
    if not report.satisfied:
        raise AssertionError("stabilized system violates the WDG condition")
    return observable, lifted, report


def check_prop1_item2(A, reading: str = "statement") -> bool:
    """Whether column n of A vanishes.

    ``reading="statement"`` skips the diagonal entry ``a_nn``; ``"all"``
    requires the whole column to be zero.
    """
    A = linalg.to_matrix(A)
    if not linalg.is_square(A):
        raise DimensionError("A must be square")
    n = len(A)
    if reading == "statement":
        rows = range(n - 1)
    elif reading == "all":
        rows = range(n)
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return all(A[i][n - 1] == 0 for i in rows)


def to_dot(report: WdgReport, names: Sequence[str] | None = None) -> str:
    g = report.graph
    names = list(names) if names is not None else default_names(g.n)
    on_cycle = {}
    for c in report.cycles:
        for e in c.edges():
            on_cycle[e] = on_cycle.get(e, True) and c.constant
    lines = ["digraph wdg {"]
    for i in range(g.n):
        lines.append(f'  {names[i]} [label="{names[i]}"];')
    for (j, i), w in sorted(g.edges.items()):
        attrs = [f'label="{w.render(names)}"']
        if (j, i) in on_cycle:
            attrs.append(f"constant={str(on_cycle[(j, i)]).lower()}")
        lines.append(f"  {names[j]} -> {names[i]} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
