import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from superlin import Polynomial, VectorField, linalg

settings.register_profile(
    "default",
    deadline=None,
    max_examples=int(os.environ.get("SUPERLIN_EXAMPLES", "40")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def var(n, i):
    return Polynomial.var(n, i)


def poly(n, terms):
    """Polynomial from {exponent tuple: coefficient}."""
    return Polynomial(n, terms)


def field(n, comps):
    return VectorField(n, comps)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def intro_field():
    x1, x2 = var(2, 0), var(2, 1)
    return VectorField(2, [x1, x2 + x1**2])


@pytest.fixture
def counterexample_field():
    y1, y2 = var(2, 0), var(2, 1)
    return VectorField(2, [y2 + y1**2, (y2 + y1**2) * y1.scale(-2)])


@pytest.fixture
def example2_field():
    x1, x2, x3, x4 = (var(4, i) for i in range(4))
    return VectorField(4, [-x1 + x3, x1.scale(2) + x3, x2.scale(2), x1**2 + x3**2])


@pytest.fixture
def sinh6_field():
    z1, z2, q1, q2, r1, r2 = (var(6, i) for i in range(6))
    return VectorField(6, [r1 * q2, r2 * q1, q2, q1, z1 * q2, z2 * q1])


coefficients = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def polynomials(draw, n, max_degree=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        d = draw(st.integers(0, max_degree))
        mono = [0] * n
        for _ in range(d):
            mono[draw(st.integers(0, n - 1))] += 1
        terms[tuple(mono)] = draw(coefficients)
    return Polynomial(n, terms)


@st.composite
def vector_fields(draw, n=None, max_degree=3, max_terms=3):
    n = n if n is not None else draw(st.integers(1, 3))
    return VectorField(n, [draw(polynomials(n, max_degree, max_terms)) for _ in range(n)])


@st.composite
def invertible_matrices(draw, n):
    rows = [[Fraction(draw(st.integers(-2, 2))) for _ in range(n)] for _ in range(n)]
    assume(linalg.rank(rows) == n)
    return rows


# acceptance lines, printed once at the end of the run
ACCEPTANCE: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
