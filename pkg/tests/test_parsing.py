import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import var, vector_fields
from superlin import (
    Lift,
    ParseError,
    PolyMap,
    Polynomial,
    TameAutomorphism,
    VectorField,
    check_wdg,
    compose,
    make_affine,
    make_elementary,
    parse_automorphism,
    parse_expr,
    parse_system,
    render_system,
    scalar_closure,
)
from superlin import corpus, formats
from superlin.cli import DEMOS, fixture_text
from superlin.parsing import (
    parse_automorphism_named,
    parse_polymap_named,
    parse_system_named,
    render_automorphism,
    render_polymap,
)

EXAMPLE2 = """\
vars x1 x2 x3 x4
x1' = -1*x1 + x3
x2' = 2*x1 + x3
x3' = 2*x2
x4' = x1^2 + x3^2
"""


class TestExpressions:
    def test_terms_and_powers(self):
        p = parse_expr("3/2*x1^2*x2 - x2 + 1", ["x1", "x2"])
        assert p == Polynomial(2, {(2, 1): Fraction(3, 2), (0, 1): -1, (0, 0): 1})

    def test_coefficient_after_factor(self):
        assert parse_expr("x1*2", ["x1"]) == var(1, 0).scale(2)

    def test_multi_character_names(self):
        assert parse_expr("x12*x1", ["x1", "x12"]) == var(2, 0) * var(2, 1)

    def test_whitespace_insignificant(self):
        assert parse_expr("  -  x1 ^ 2 ", ["x1"]) == -(var(1, 0) ** 2)

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("0.5*x1", "p/q"),
            ("x1 x2", "column"),
            ("x3", "x3"),
            ("1/0", "zero"),
            ("x1^", "column"),
            ("", "column"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError) as exc:
            parse_expr(text, ["x1", "x2"])
        assert fragment in str(exc.value)


class TestSystems:
    def test_example2(self, example2_field):
        f = parse_system(EXAMPLE2)
        assert f == example2_field
        assert f[3] == var(4, 0) ** 2 + var(4, 2) ** 2

    def test_zero_field(self):
        assert parse_system("vars x\nx' = 0\n") == VectorField(1, [Polynomial.zero(1)])

    def test_sinh6_fixture(self, sinh6_field):
        f, names = parse_system_named(fixture_text("sinh6", "sinh6.sys"))
        assert names == ["z1", "z2", "q1", "q2", "r1", "r2"]
        assert f == sinh6_field
        assert f[2] == var(6, 3)
        assert f[4] == var(6, 0) * var(6, 3)

    def test_comments_and_blank_lines(self):
        text = "# header\n\nvars a b  # names\na' = b\n\nb' = -1*a # spring\n"
        assert parse_system(text) == VectorField.linear([[0, 1], [-1, 0]])

    @pytest.mark.parametrize(
        "text, line, fragment",
        [
            ("vars x\nx' = x +\n", 2, "expected"),
            ("vars x\ny' = x\n", 2, "undeclared"),
            ("vars x\nx' = x\nx' = 1\n", 3, "duplicate"),
            ("vars x y\nx' = y\n", 1, "no equation for y"),
            ("vars x\nx' = 1.5\n", 2, "p/q"),
            ("x' = 1\n", 1, "vars"),
            ("vars x\nx' = y\n", 2, "y"),
        ],
    )
    def test_errors_carry_location(self, text, line, fragment):
        with pytest.raises(ParseError) as exc:
            parse_system(text)
        assert exc.value.line == line
        assert fragment in str(exc.value)

    @given(vector_fields())
    def test_round_trip(self, f):
        assert parse_system(render_system(f)) == f

    @pytest.mark.parametrize("demo, name", [(d, n) for d, files in DEMOS.items() for n in files if n.endswith(".sys")])
    def test_fixture_round_trip(self, demo, name):
        f, names = parse_system_named(fixture_text(demo, name))
        assert parse_system_named(render_system(f, names)) == (f, names)


class TestAutomorphisms:
    def test_counterexample_map(self):
        phi = parse_automorphism("vars x1 x2\nelem x2 : -1*x1^2\n")
        x1, x2 = var(2, 0), var(2, 1)
        assert phi.forward == PolyMap(2, [x1, x2 - x1**2])

    def test_empty_is_identity(self):
        phi = parse_automorphism("vars x1 x2\n")
        assert phi.generators == ()

    def test_two_statements_compose_in_order(self):
        text = "vars x1 x2\naffine [[1,1],[0,1]] ; [1,-1]\nelem x2 : x1^2\n"
        phi = parse_automorphism(text)
        a = TameAutomorphism.of(make_affine([[1, 1], [0, 1]], [1, -1]))
        e = TameAutomorphism.of(make_elementary(2, 1, var(2, 0) ** 2))
        assert phi.forward == compose(e, a).forward

    def test_offset_optional(self):
        phi = parse_automorphism("vars a b\naffine [[0,1],[1,0]]\n")
        assert phi.forward == PolyMap(2, [var(2, 1), var(2, 0)])

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("vars x1 x2\naffine [[1,1],[1,1]]\n", "singular"),
            ("vars x1 x2\nelem x2 : x2^2\n", "own target"),
            ("vars x1 x2\nelem x2 : 3*x1\n", "degree"),
            ("vars x1 x2\nelem x3 : x1^2\n", "declared"),
            ("vars x1 x2\naffine [[1,0]]\n", "2x2"),
            ("vars x1 x2\nrotate x1\n", "affine"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError) as exc:
            parse_automorphism(text)
        assert fragment in str(exc.value)
        assert exc.value.line == 2

    @given(st.integers(0, 10**6))
    def test_round_trip(self, seed):
        phi = corpus.random_tame(random.Random(seed), 3)
        back, _ = parse_automorphism_named(render_automorphism(phi))
        assert back.generators == phi.generators

    @pytest.mark.parametrize("demo", ["counterexample", "stabilized3"])
    def test_fixture_round_trip(self, demo):
        phi, names = parse_automorphism_named(fixture_text(demo, "phi.map"))
        assert parse_automorphism_named(render_automorphism(phi, names))[0].generators == phi.generators


class TestPolyMaps:
    def test_parse(self):
        m, names, outs = parse_polymap_named("vars x1 x2\ns = x1^2\nt = x1*x2\n")
        assert m == PolyMap(2, [var(2, 0) ** 2, var(2, 0) * var(2, 1)])
        assert outs == ["s", "t"]

    def test_declared_names_must_match(self):
        with pytest.raises(ParseError):
            parse_polymap_named("vars a b\ns = a\n", ["x1", "x2"])

    def test_round_trip(self):
        m = PolyMap(2, [var(2, 0) ** 2 - Fraction(1, 3)])
        assert parse_polymap_named(render_polymap(m))[0] == m


class TestLiftJson:
    def test_round_trip_bit_exact(self, counterexample_field):
        lift = scalar_closure(counterexample_field).lift
        text = formats.lift_to_json(lift, ["y1", "y2"])
        back, names = formats.lift_from_json(text)
        assert back == lift and names == ["y1", "y2"]
        assert formats.lift_to_json(back, names) == text

    def test_rational_strings(self):
        lift = Lift(1, [[Fraction(-1, 3), 2], [0, 0]], PolyMap(1, [Polynomial.constant(1, 1)]))
        d = formats.lift_to_dict(lift)
        assert d["A"] == [["-1/3", "2/1"], ["0/1", "0/1"]]
        assert d["format"] == 1
        assert d["generators"] == ["x1", "1"]

    def test_bundled_intro_lift(self):
        lift, names = formats.lift_from_json(fixture_text("intro-lift", "intro.lift.json"))
        assert names == ["x1", "x2"]
        assert lift.k == 1 and lift.observables[0] == var(2, 0) ** 2

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.update(format=2),
            lambda d: d.update(A=[["1/1"]]),
            lambda d: d["A"][0].__setitem__(0, "0.5"),
            lambda d: d.pop("observables"),
            lambda d: d.update(observables=["x9"]),
        ],
    )
    def test_malformed(self, mutate):
        d = json.loads(fixture_text("intro-lift", "intro.lift.json"))
        mutate(d)
        with pytest.raises(ParseError):
            formats.lift_from_dict(d)

    def test_not_json(self):
        with pytest.raises(ParseError):
            formats.lift_from_json("{not json")


def test_wdg_report_json(counterexample_field):
    d = formats.wdg_report_to_dict(check_wdg(counterexample_field), ["y1", "y2"])
    assert d["satisfied"] is False
    assert d["offending"] == {"nodes": ["y1"], "product": "2*y1"}
    assert {"from": "y2", "to": "y1", "weight": "1"} in d["edges"]
