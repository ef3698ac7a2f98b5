import json

import pytest

from conftest import var
from superlin import Polynomial, VectorField, formats, parse_system
from superlin.cli import DEMOS, fixture_text, main

GOLDEN = {
    ("example2", "example2.sys"): (
        "# four-variable system whose dependency graph has only constant cycles\n"
        "vars x1 x2 x3 x4\n"
        "x1' = -1*x1 + x3\n"
        "x2' = 2*x1 + x3\n"
        "x3' = 2*x2\n"
        "x4' = x1^2 + x3^2\n"
    ),
    ("counterexample", "counterexample.sys"): (
        "# double integrator seen through (x1, x2 - x1^2); fails the WDG condition\n"
        "vars y1 y2\n"
        "y1' = y2 + y1^2\n"
        "y2' = -2*y1*y2 - 2*y1^3\n"
    ),
    ("counterexample", "linear.sys"): "# double integrator\nvars x1 x2\nx1' = x2\nx2' = 0\n",
    ("counterexample", "phi.map"): "# (x1, x2) -> (x1, x2 - x1^2)\nvars x1 x2\nelem x2 : -1*x1^2\n",
    ("stabilized3", "stabilized3.sys"): (
        "# counterexample with the stabilizing observable y2 + y1^2 adjoined as y3\n"
        "vars y1 y2 y3\n"
        "y1' = y3\n"
        "y2' = -2*y1*y3\n"
        "y3' = 0\n"
    ),
    ("sinh6", "sinh6.sys"): (
        "# polynomial encoding of z' = (sqrt(1+z1^2) asinh z2, sqrt(1+z2^2) asinh z1)\n"
        "# with q = asinh z and r = sqrt(1 + z^2)\n"
        "vars z1 z2 q1 q2 r1 r2\n"
        "z1' = r1*q2\n"
        "z2' = r2*q1\n"
        "q1' = q2\n"
        "q2' = q1\n"
        "r1' = z1*q2\n"
        "r2' = z2*q1\n"
    ),
    ("intro-lift", "intro.sys"): "# lifts with the single observable x1^2\nvars x1 x2\nx1' = x1\nx2' = x2 + x1^2\n",
}


@pytest.fixture
def demo(tmp_path, capsys):
    def materialize(name):
        assert main(["demo", name, "--dir", str(tmp_path)]) == 0
        capsys.readouterr()
        return {f: str(tmp_path / f) for f in DEMOS[name]}
    return materialize


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestGolden:
    @pytest.mark.parametrize("key", sorted(GOLDEN))
    def test_fixture_bytes(self, key):
        assert fixture_text(*key) == GOLDEN[key]

    def test_shared_files_identical(self):
        for f in ("linear.sys", "phi.map"):
            assert fixture_text("counterexample", f) == fixture_text("stabilized3", f)

    def test_intro_lift_bytes(self):
        from superlin import scalar_closure

        f = parse_system(GOLDEN[("intro-lift", "intro.sys")])
        assert fixture_text("intro-lift", "intro.lift.json") == formats.lift_to_json(
            scalar_closure(f).lift, ["x1", "x2"]
        )

    @pytest.mark.parametrize("name", sorted(DEMOS))
    def test_demo_writes_bundled_bytes(self, name, demo):
        paths = demo(name)
        for f, p in paths.items():
            with open(p, encoding="utf-8") as fh:
                assert fh.read() == fixture_text(name, f)


class TestCheckWdg:
    @pytest.mark.parametrize(
        "name, file, code",
        [("example2", "example2.sys", 0), ("counterexample", "counterexample.sys", 1),
         ("stabilized3", "stabilized3.sys", 0), ("counterexample", "linear.sys", 0)],
    )
    def test_exit_codes(self, demo, capsys, name, file, code):
        paths = demo(name)
        got, out, err = run(capsys, "check-wdg", paths[file])
        assert got == code
        assert out == ""
        assert ("holds" if code == 0 else "fails") in err

    def test_json_and_dot(self, demo, capsys, tmp_path):
        paths = demo("counterexample")
        dot = tmp_path / "g.dot"
        code, out, _ = run(capsys, "check-wdg", paths["counterexample.sys"], "--json", "--dot", dot)
        assert code == 1
        doc = json.loads(out)
        assert doc["format"] == 1 and doc["satisfied"] is False
        assert doc["offending"]["nodes"] == ["y1"]
        assert "y1 -> y1" in dot.read_text()


class TestLift:
    def test_intro(self, demo, capsys):
        paths = demo("intro-lift")
        code, out, _ = run(capsys, "lift", paths["intro.sys"])
        assert code == 0
        doc = json.loads(out)
        assert (doc["n"], doc["k"], doc["observables"]) == (2, 1, ["x1^2"])

    def test_to_file_then_check(self, demo, capsys, tmp_path):
        paths = demo("counterexample")
        out = tmp_path / "l.json"
        assert run(capsys, "lift", paths["counterexample.sys"], "--out", out)[:2] == (0, "")
        assert run(capsys, "check-lift", paths["counterexample.sys"], out)[0] == 0

    def test_sinh6_inconclusive(self, demo, capsys):
        paths = demo("sinh6")
        code, out, err = run(capsys, "lift", paths["sinh6.sys"])
        assert code == 3
        doc = json.loads(out)
        assert doc["reason"] == "max_generators"
        assert "inconclusive" in err

    def test_small_budget(self, demo, capsys):
        paths = demo("counterexample")
        code, out, _ = run(capsys, "lift", paths["counterexample.sys"], "--max-generators", 3)
        assert code == 3


class TestCheckLift:
    def test_wrong_system(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        other = tmp_path / "other.sys"
        other.write_text("vars x1 x2\nx1' = x1\nx2' = x2 + 2*x1^2\n")
        assert run(capsys, "check-lift", other, paths["intro.lift.json"])[0] == 1
        assert run(capsys, "check-lift", paths["intro.sys"], paths["intro.lift.json"])[0] == 0

    def test_dimension_mismatch(self, demo, capsys):
        paths = demo("intro-lift")
        s = demo("example2")["example2.sys"]
        assert run(capsys, "check-lift", s, paths["intro.lift.json"])[0] == 2


class TestPushforward:
    def test_counterexample(self, demo, capsys):
        paths = demo("counterexample")
        code, out, _ = run(capsys, "pushforward", paths["linear.sys"], paths["phi.map"], "--names", "y1,y2")
        assert code == 0
        assert parse_system(out) == parse_system(fixture_text("counterexample", "counterexample.sys"))
        assert out.splitlines()[0] == "vars y1 y2"

    def test_bad_names(self, demo, capsys):
        paths = demo("counterexample")
        code, out, err = run(capsys, "pushforward", paths["linear.sys"], paths["phi.map"], "--names", "a")
        assert code == 2 and out == "" and "error" in err


class TestTransport:
    def test_tame(self, demo, capsys, tmp_path):
        paths = demo("counterexample")
        base = tmp_path / "base.json"
        run(capsys, "lift", paths["linear.sys"], "--out", base)
        code, out, _ = run(capsys, "transport", paths["linear.sys"], base, paths["phi.map"], "--names", "y1,y2")
        assert code == 0
        moved = tmp_path / "moved.json"
        moved.write_text(out)
        assert run(capsys, "check-lift", paths["counterexample.sys"], moved)[0] == 0

    def test_stably_tame(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        (tmp_path / "y.map").write_text("vars x1 x2\ns = x1^2\n")
        # clear s, mix s into x1, restore s: psi = (x1 + x2^2, x2)
        (tmp_path / "phi.map").write_text(
            "vars x1 x2 s\nelem s : -1*x1^2\nelem x1 : s*x2 + x2^2\nelem s : x1^2\n"
        )
        (tmp_path / "inv.map").write_text("vars x1 x2\na = x1 - x2^2\nb = x2\n")
        code, out, err = run(capsys, "transport", paths["intro.sys"], paths["intro.lift.json"],
                             tmp_path / "phi.map", "--stabilizer", tmp_path / "y.map",
                             "--psi-inverse", tmp_path / "inv.map")
        assert code == 0, err
        moved = tmp_path / "moved.json"
        moved.write_text(out)
        # psi is itself elementary, so the target system comes from pushforward
        (tmp_path / "psi.map").write_text("vars x1 x2\nelem x1 : x2^2\n")
        target = tmp_path / "target.sys"
        assert run(capsys, "pushforward", paths["intro.sys"], tmp_path / "psi.map", "--out", target)[0] == 0
        assert run(capsys, "check-lift", target, moved)[0] == 0

    def test_map_dimension_mismatch(self, demo, capsys, tmp_path):
        paths = demo("counterexample")
        base = tmp_path / "base.json"
        run(capsys, "lift", paths["linear.sys"], "--out", base)
        (tmp_path / "bad.map").write_text("vars a b c\nelem c : a^2\n")
        assert run(capsys, "transport", paths["linear.sys"], base, tmp_path / "bad.map")[0] == 2


class TestStabilize:
    def test_worked_example(self, demo, capsys):
        paths = demo("stabilized3")
        code, out, _ = run(capsys, "stabilize", paths["linear.sys"], paths["phi.map"])
        assert code == 0
        doc = json.loads(out)
        assert doc["observable"] == "x2 + x1^2"
        assert doc["wdg"]["satisfied"] is True
        y = [var(3, i) for i in range(3)]
        assert parse_system(doc["lifted_system"]) == VectorField(
            3, [y[1], Polynomial.zero(3), (y[0] * y[1]).scale(-2)]
        )

    def test_nonlinear_rejected(self, demo, capsys):
        paths = demo("counterexample")
        assert run(capsys, "stabilize", paths["counterexample.sys"], paths["phi.map"])[0] == 2


class TestVerify:
    def test_pass_with_traces(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        x0 = tmp_path / "x0.csv"
        x0.write_text("x1,x2\n1,0\n0.5,-1/2\n")
        traces = tmp_path / "tr"
        code, out, _ = run(capsys, "verify", paths["intro.sys"], paths["intro.lift.json"],
                           "--x0", x0, "--trace", traces)
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] and doc["max_rel_error"] < 1e-8 and len(doc["points"]) == 2
        assert sorted(p.name for p in traces.iterdir()) == [
            "x0_0_lift.csv", "x0_0_system.csv", "x0_1_lift.csv", "x0_1_system.csv",
        ]
        assert (traces / "x0_0_lift.csv").read_text().splitlines()[0] == "t,x1,x2,p1"

    def test_invalid_lift_fails(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        doc = json.loads(fixture_text("intro-lift", "intro.lift.json"))
        doc["A"][2][2] = "3/1"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        x0 = tmp_path / "x0.csv"
        x0.write_text("1,0\n")
        assert run(capsys, "verify", paths["intro.sys"], bad, "--x0", x0)[0] == 1

    def test_bad_row(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        x0 = tmp_path / "x0.csv"
        x0.write_text("1,0,3\n")
        assert run(capsys, "verify", paths["intro.sys"], paths["intro.lift.json"], "--x0", x0)[0] == 2


class TestClosureProfile:
    def test_sinh6(self, demo, capsys):
        paths = demo("sinh6")
        code, out, _ = run(capsys, "closure-profile", paths["sinh6.sys"], "--k", 6, "--watch", "q1")
        assert code == 0
        doc = json.loads(out)
        assert doc["component"] == "z2"
        assert [r["leading_degree"] for r in doc["profile"]] == [1, 2, 3, 4, 5, 6, 7]
        assert [r["dim"] for r in doc["profile"]] == [1, 2, 3, 4, 5, 6, 7]

    def test_unknown_watch(self, demo, capsys):
        paths = demo("sinh6")
        assert run(capsys, "closure-profile", paths["sinh6.sys"], "--k", 2, "--watch", "w")[0] == 2


class TestErrors:
    @pytest.mark.parametrize(
        "text",
        ["", "vars x\nx' = 0.5\n", "vars x\nx' = y\n", "vars x\nx' = x\nx' = 1\n", "\x00\xff", "vars\n"],
    )
    def test_malformed_system_exit_2(self, capsys, tmp_path, text):
        p = tmp_path / "bad.sys"
        p.write_text(text)
        code, out, err = run(capsys, "check-wdg", p)
        assert code == 2 and out == ""
        assert err.startswith("error:")

    def test_location_reported(self, capsys, tmp_path):
        p = tmp_path / "bad.sys"
        p.write_text("vars x\nx' = 0.5\n")
        _, _, err = run(capsys, "lift", p)
        assert "line 2" in err and "p/q" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check-wdg", tmp_path / "nope.sys")[0] == 2

    def test_malformed_lift_json(self, demo, capsys, tmp_path):
        paths = demo("intro-lift")
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2]")
        assert run(capsys, "check-lift", paths["intro.sys"], bad)[0] == 2

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2
