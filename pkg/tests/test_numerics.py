import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import var
from superlin import (
    Lift,
    PolyMap,
    Polynomial,
    TameAutomorphism,
    VectorField,
    integrate,
    make_elementary,
    scalar_closure,
    tame_transport,
    verify_lift_numeric,
)
from superlin import corpus
from superlin.numerics import IntegrationOverflow, Trajectory, integrate_many, random_initial_conditions
from superlin.poly import DimensionError

E = math.e


def intro_exact(t):
    # x1 = e^t, x2' = x2 + e^(2t), x2(0) = 0
    return np.array([math.exp(t), math.exp(2 * t) - math.exp(t)])


class TestIntegrate:
    def test_zero_field(self):
        tr = integrate(VectorField(2, [Polynomial.zero(2)] * 2), [0.3, -1.0], 1.0, 10)
        assert np.all(tr.states == np.array([0.3, -1.0]))
        assert len(tr.times) == 11

    def test_exponential(self):
        tr = integrate(VectorField(1, [var(1, 0)]), [1.0], 1.0, 1000)
        assert abs(tr.final[0] - E) < 1e-10

    def test_matrix_input(self):
        tr = integrate([[1]], [1.0], 1.0, 1000)
        assert abs(tr.final[0] - E) < 1e-10

    def test_intro_field(self, intro_field):
        tr = integrate(intro_field, [1.0, 0.0], 1.0, 1000)
        assert np.allclose(tr.final, [E, E**2 - E], rtol=0, atol=1e-10)

    def test_fourth_order(self, intro_field):
        errs = []
        for steps in (50, 100):
            tr = integrate(intro_field, [1.0, 0.0], 1.0, steps)
            exact = np.array([intro_exact(t) for t in tr.times])
            errs.append(np.abs(tr.states - exact).max())
        assert 8 <= errs[0] / errs[1] <= 32

    def test_overflow_names_step(self):
        x = var(1, 0)
        with pytest.raises(IntegrationOverflow) as exc:
            integrate(VectorField(1, [x**2]), [1.0], 2.0, 2000)
        assert 900 < exc.value.step <= 2000
        assert "step" in str(exc.value)

    def test_bad_arguments(self, intro_field):
        with pytest.raises(ValueError):
            integrate(intro_field, [1.0, 0.0], 1.0, 0)
        with pytest.raises(ValueError):
            integrate(intro_field, [1.0, 0.0], 0.0, 10)
        with pytest.raises(DimensionError):
            integrate(intro_field, [1.0], 1.0, 10)


    def test_batch_matches_single(self, sinh6_field):
        pts = random_initial_conditions(6, 4, 3)
        many = integrate_many(sinh6_field, pts, 0.5, 200)
        for p, tr in zip(pts, many):
            one = integrate(sinh6_field, p, 0.5, 200)
            assert np.allclose(tr.states, one.states, rtol=1e-13, atol=1e-13)


class TestTrajectory:
    def test_csv_round_trip(self, intro_field):
        tr = integrate(intro_field, [0.5, -0.25], 0.5, 20)
        text = tr.to_csv()
        assert text.splitlines()[0] == "t,x1,x2"
        back = Trajectory.from_csv(text)
        assert np.array_equal(back.times, tr.times)
        assert np.array_equal(back.states, tr.states)

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 1.0]), np.zeros((3, 1)))

    def test_header_required(self):
        with pytest.raises(ValueError):
            Trajectory.from_csv("0,1\n")


class TestVerify:
    def test_intro_lift(self, intro_field):
        lift = Lift(2, [[1, 0, 0], [0, 1, 1], [0, 0, 2]], PolyMap(2, [var(2, 0) ** 2]))
        rep = verify_lift_numeric(intro_field, lift, [(1.0, 0.0)], t_end=1.0, steps=1000)
        assert rep.max_rel_error < 1e-8
        assert rep.passed
        assert (rep.t_end, rep.steps, rep.tol) == (1.0, 1000, 1e-6)

    def test_linear_identical(self):
        f = VectorField.linear([[0, 1], [-1, 0]])
        rep = verify_lift_numeric(f, scalar_closure(f).lift, [(1.0, 0.0), (0.2, 0.3)])
        assert rep.max_abs_error < 1e-14
        assert len(rep.points) == 2

    def test_transported_counterexample(self, counterexample_field):
        base = scalar_closure(VectorField.linear([[0, 1], [0, 0]])).lift
        phi = TameAutomorphism.of(make_elementary(2, 1, -(var(2, 0) ** 2)))
        lift = tame_transport(base, phi)
        rep = verify_lift_numeric(counterexample_field, lift, [(0.5, 0.5)])
        assert rep.max_rel_error < 1e-6

    def test_rejects_invalid_lift(self, intro_field):
        bad = Lift(2, [[1, 0, 0], [0, 1, 1], [0, 0, 3]], PolyMap(2, [var(2, 0) ** 2]))
        with pytest.raises(ValueError):
            verify_lift_numeric(intro_field, bad, [(1.0, 0.0)])

    def test_traces_kept(self, intro_field):
        lift = scalar_closure(intro_field).lift
        rep = verify_lift_numeric(intro_field, lift, [(0.1, 0.2)], steps=10, keep_traces=True)
        base, big = rep.traces[0]
        assert big.states.shape == (11, 3)

    @settings(max_examples=15)
    @given(st.integers(0, 10**6))
    def test_symbolic_implies_numeric(self, seed):
        f = corpus.random_wdg_field(random.Random(seed))
        lift = scalar_closure(f).lift
        pts = random_initial_conditions(f.n, 5, seed)
        try:
            rep = verify_lift_numeric(f, lift, pts)
        except IntegrationOverflow:
            return  # finite-time blow-up inside the horizon is reported, not compared
        assert rep.passed, rep


def test_initial_conditions_are_seeded():
    a = random_initial_conditions(3, 5, 42)
    assert a == random_initial_conditions(3, 5, 42)
    assert all(abs(v) <= 1 for p in a for v in p)
