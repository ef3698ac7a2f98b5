"""Fixed-step RK4 integration and numerical cross-checks of symbolic lifts."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linearizer import Lift, check_lift_symbolic
from .poly import DimensionError, PolyMap, default_names


class IntegrationOverflow(ArithmeticError):
    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite state at step {step} (t={t:g})")
        self.step = step
        self.t = t


class _CompiledMap:
    """Float evaluator for a polynomial map over a batch of points.

    All terms of all components share one exponent table; a 0/1 scatter
    matrix sums term values into their components.
    """

    def __init__(self, m: PolyMap):
        self.n = m.n_in
        exps, coefs, owner = [], [], []
        for i, c in enumerate(m.components):
            for mono, q in c.terms():
                exps.append(mono)
                coefs.append(float(q))
                owner.append(i)
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), self.n)
        scatter = np.zeros((len(exps), m.n_out))
        scatter[np.arange(len(exps)), owner] = coefs
        self.scatter = scatter

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # x has shape (..., n); the result has shape (..., n_out)
        mons = np.prod(x[..., None, :] ** self.exps, axis=-1)
        return mons @ self.scatter


def as_rhs(field_or_matrix) -> tuple[Callable[[np.ndarray], np.ndarray], int]:
    if isinstance(field_or_matrix, PolyMap):
        if field_or_matrix.n_in != field_or_matrix.n_out:
            raise DimensionError("integrate needs a square field")
        return _CompiledMap(field_or_matrix), field_or_matrix.n_in
    A = np.array([[float(v) for v in row] for row in field_or_matrix], dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("linear system matrix must be square")
    At = A.T
    return (lambda x: x @ At), A.shape[0]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if len(self.times) and (self.times[0] != 0 or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else default_names(self.states.shape[1])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *names])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][0] != "t":
            raise ValueError("trajectory CSV must start with a 't,...' header")
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        data = data.reshape(len(rows) - 1, len(rows[0]))
        return cls(data[:, 0], data[:, 1:])


def _rk4(rhs, x: np.ndarray, t_end: float, steps: int) -> np.ndarray:
    """States at every step, shape (steps + 1, *x.shape)."""
    h = t_end / steps
    states = np.empty((steps + 1, *x.shape))
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(steps):
            k1 = rhs(x)
            k2 = rhs(x + h / 2 * k1)
            k3 = rhs(x + h / 2 * k2)
            k4 = rhs(x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise IntegrationOverflow(s + 1, (s + 1) * h)
            states[s + 1] = x
    return states


def _check_args(t_end: float, steps: int):
    if steps < 1:
        raise ValueError("steps must be positive")
    if not t_end > 0:
        raise ValueError("t_end must be positive")


def integrate(field_or_matrix, x0, t_end: float, steps: int) -> Trajectory:
    """Classical fixed-step fourth-order Runge-Kutta."""
    _check_args(t_end, steps)
    rhs, n = as_rhs(field_or_matrix)
    x = np.array([float(v) for v in x0], dtype=float)
    if x.shape != (n,):
        raise DimensionError(f"initial state has {x.size} entries, system has {n}")
    return Trajectory(np.linspace(0.0, t_end, steps + 1), _rk4(rhs, x, t_end, steps))


def integrate_many(field_or_matrix, x0s, t_end: float, steps: int) -> list[Trajectory]:
    """Integrate several initial states together with the same fixed-step scheme."""
    _check_args(t_end, steps)
    rhs, n = as_rhs(field_or_matrix)
    X = np.array([[float(v) for v in x0] for x0 in x0s], dtype=float).reshape(-1, n)
    if X.shape[1] != n:
        raise DimensionError(f"initial states need {n} entries")
    states = _rk4(rhs, X, t_end, steps)
    times = np.linspace(0.0, t_end, steps + 1)
    return [Trajectory(times, states[:, b, :]) for b in range(X.shape[0])]


@dataclass(frozen=True)
class PointResult:
    x0: tuple
    max_abs_error: float
    max_rel_error: float


@dataclass(frozen=True)
class VerificationReport:
    max_abs_error: float
    max_rel_error: float
    points: tuple
    t_end: float
    steps: int
    tol: float
    seed: int | None = None
    traces: tuple = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol


def verify_lift_numeric(f: PolyMap, lift: Lift, x0_set, t_end: float = 1.0,
                        steps: int = 1000, tol: float = 1e-6, seed: int | None = None,
                        keep_traces: bool = False) -> VerificationReport:
    """Integrate f and the linear lift side by side and compare the projection.

    The relative error divides by ``max(1, |x(t)|_inf)`` so it stays finite
    near zero crossings.
    """
    if not check_lift_symbolic(f, lift):
        raise ValueError("lift fails the symbolic check; numeric verification is meaningless")
    n = lift.n
    x0s = [list(x0) for x0 in x0_set]
    points, traces = [], []
    if x0s:
        try:
            bases = integrate_many(f, x0s, t_end, steps)
            z0s = [[float(v) for v in lift.initial_state(x0)] for x0 in x0s]
            bigs = integrate_many(lift.A, z0s, t_end, steps)
        except IntegrationOverflow as exc:
            raise IntegrationOverflow(exc.step, exc.t) from exc
    for i, x0 in enumerate(x0s):
        base, big = bases[i], bigs[i]
        diff = np.abs(big.states[:, :n] - base.states)
        scale = np.maximum(1.0, np.max(np.abs(base.states), axis=1))
        points.append(PointResult(tuple(float(v) for v in x0),
                                  float(diff.max()), float((diff.max(axis=1) / scale).max())))
        if keep_traces:
            traces.append((base, big))
    return VerificationReport(
        max_abs_error=max((p.max_abs_error for p in points), default=0.0),
        max_rel_error=max((p.max_rel_error for p in points), default=0.0),
        points=tuple(points), t_end=t_end, steps=steps, tol=tol, seed=seed,
        traces=tuple(traces),
    )


def random_initial_conditions(n: int, count: int, seed: int, radius: float = 1.0) -> list:
    rng = np.random.default_rng(seed)
    return [tuple(row) for row in rng.uniform(-radius, radius, size=(count, n))]
