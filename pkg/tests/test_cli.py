import sys
from pathlib import Path

import msgspec
import numpy as np
import pytest

from flexlab import corpus
from flexlab.__main__ import main
from flexlab.cli import parse_cli_args
from flexlab.errors import FlexlabCurveError, FlexlabFlexError
from flexlab.io import FlexFieldFile, FrameworkFile, dump_document, validate_report
from flexlab.model import FlexField
from flexlab.numerics import TolerancePolicy


class Result(msgspec.Struct):
    code: int
    out: str
    err: str


@pytest.fixture
def flexlab(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]):
    def run(*argv: str) -> Result:
        monkeypatch.setattr(sys, "argv", ["flexlab", *argv])
        try:
            main()
        except SystemExit as e:
            code = e.code if isinstance(e.code, int) else 1
        else:
            code = 0
        captured = capsys.readouterr()
        return Result(code, captured.out, captured.err)

    return run


class TestParsing:
    def test_defaults(self) -> None:
        invocation, opts = parse_cli_args(["extend", "builtin:hinge"])
        assert invocation.order == 2
        assert invocation.flex is None
        assert opts.policy == TolerancePolicy.default()
        assert not opts.as_json

    def test_tolerance(self) -> None:
        _, opts = parse_cli_args(["analyze", "builtin:hinge", "--tol", "1e-8:1e-12"])
        assert (opts.policy.rel_tol, opts.policy.abs_tol) == (1e-8, 1e-12)

    def test_flex_choices_are_exclusive(self) -> None:
        with pytest.raises(SystemExit):
            parse_cli_args(["extend", "builtin:hinge", "--flex", "0", "--flex-field", "f.json"])

    def test_batch_csv_paths(self) -> None:
        _, opts = parse_cli_args(["analyze", "--batch", "dir", "--csv", "out/values.csv"])
        assert opts.for_batch_item("hinge").csv_path == Path("out/values-hinge.csv")

    def test_batch_output_paths(self) -> None:
        invocation, _ = parse_cli_args(["make-curve", "--batch", "dir", "--output", "out/curve.json"])
        assert invocation.for_batch_item("left").output == Path("out/curve-left.json")
        assert invocation.for_batch_item("right").output == Path("out/curve-right.json")

    def test_batch_without_output(self) -> None:
        invocation, _ = parse_cli_args(["make-curve", "--batch", "dir"])
        assert invocation.for_batch_item("left").output is None


class TestAnalyze:
    def test_text(self, flexlab) -> None:
        result = flexlab("analyze", "builtin:subdivided-tetrahedron")
        assert result.code == 0
        assert "first-order nonrigid, nontrivial flex dim 1, stress dim 1" in result.out

    def test_json(self, flexlab) -> None:
        result = flexlab("analyze", "builtin:tetrahedron", "--json")
        assert result.code == 0
        validate_report(result.out.encode())
        report = msgspec.json.decode(result.out)
        assert report["flex_space"]["classification"] == "first-order rigid"
        assert report["flex_space"]["trivial_dim"] == 6
        assert report["stresses"] == []
        assert report["input_digest"].startswith("sha256:")

    def test_exact_cross_check(self, flexlab) -> None:
        result = flexlab("analyze", "builtin:subdivided-tetrahedron", "--exact", "--json")
        assert result.code == 0
        assert msgspec.json.decode(result.out)["warnings"] == []

    def test_csv(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "singular.csv"
        assert flexlab("analyze", "builtin:subdivided-tetrahedron", "--csv", str(path)).code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "index,singular_value"
        assert len(lines) == 1 + 9

    def test_missing_file(self, flexlab, tmp_path: Path) -> None:
        result = flexlab("analyze", str(tmp_path / "nothing.json"))
        assert result.code == 2
        assert "cannot read" in result.err

    def test_wrong_kind(self, flexlab) -> None:
        assert flexlab("analyze", "builtin:hinge-fold-curve").code == 2

    def test_bad_tolerance(self, flexlab) -> None:
        assert flexlab("analyze", "builtin:hinge", "--tol", "tight").code == 2

    def test_missing_source(self, flexlab) -> None:
        assert flexlab("analyze").code == 2


class TestExtend:
    def test_obstruction_is_a_result(self, flexlab) -> None:
        result = flexlab("extend", "builtin:subdivided-tetrahedron")
        assert result.code == 0
        assert "OBSTRUCTED at order 2" in result.out

    def test_obstruction_json(self, flexlab) -> None:
        result = flexlab("extend", "builtin:subdivided-tetrahedron", "--json")
        validate_report(result.out.encode())
        payload = msgspec.json.decode(result.out)["payload"]
        assert payload["type"] == "extend"
        assert payload["status"] == "obstructed"
        assert payload["reached_order"] == 1
        support = payload["obstruction"]["certificate"]["support"]
        assert support == [[0, 1], [0, 2], [0, 4], [1, 2], [1, 4], [2, 4]]

    def test_hinge(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "norms.csv"
        result = flexlab("extend", "builtin:hinge", "--order", "4", "--csv", str(path))
        assert result.code == 0
        assert "extended to order 4" in result.out
        assert len(path.read_text().splitlines()) == 5

    def test_rigid_input_has_nothing_to_follow(self, flexlab) -> None:
        result = flexlab("extend", "builtin:tetrahedron")
        assert result.code == 3
        assert "no nontrivial flex to follow" in result.err

    def test_flex_index_out_of_range(self, flexlab) -> None:
        assert flexlab("extend", "builtin:hinge", "--flex", "3").code == 3

    def test_flex_field_gate(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "field.json"
        dump_document(FlexFieldFile(vectors=[(1.0, 0.0, 0.0)] + [(0.0, 0.0, 0.0)] * 3), path)
        result = flexlab("extend", "builtin:hinge", "--flex-field", str(path))
        assert result.code == 3
        assert "not a flex to order 1" in result.err

    def test_flex_attached_to_the_file(self, flexlab, tmp_path: Path) -> None:
        configuration = corpus.tetrahedron()
        translation = FlexField.create(np.tile([0.0, 0.0, 1.0], (4, 1)))
        path = tmp_path / "tetra.yaml"
        dump_document(FrameworkFile.from_configuration(configuration, translation), path)
        result = flexlab("extend", str(path), "--order", "3")
        assert result.code == 0
        assert "extended to order 3" in result.out

    def test_python_errors(self, flexlab) -> None:
        with pytest.raises(FlexlabFlexError):
            flexlab("extend", "builtin:tetrahedron", "-pyers")


class TestTangentExtend:
    def test_hinge_fold(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "table.csv"
        result = flexlab("tangent-extend", "builtin:hinge-fold-curve", "--csv", str(path))
        assert result.code == 0
        assert "curve valid" in result.out
        assert "log-log slope" in result.out
        lines = path.read_text().splitlines()
        assert lines[0] == "h,residual"
        assert len(lines) == 1 + len(corpus.FOLD_WIDTHS)

    def test_json(self, flexlab) -> None:
        result = flexlab("tangent-extend", "builtin:hinge-fold-curve", "--json")
        validate_report(result.out.encode())
        payload = msgspec.json.decode(result.out)["payload"]
        assert payload["verdict"] == "valid"
        assert payload["extension"]["stencil"] == "richardson"

    def test_invalid_curve(self, flexlab) -> None:
        result = flexlab("tangent-extend", "builtin:fig1-green-curve")
        assert result.code == 4
        assert "(ii) velocity match Eq. (2.6)" in result.err
        assert "(i) nonrigidity" not in result.err
        assert "(ii) flex family" not in result.err

    def test_invalid_curve_conditions(self, flexlab) -> None:
        with pytest.raises(FlexlabCurveError) as info:
            flexlab("tangent-extend", "builtin:fig1-green-curve", "-pyers")
        assert info.value.conditions == ["(ii) velocity match Eq. (2.6)"]


class TestSurface:
    def test_normal_bump(self, flexlab) -> None:
        result = flexlab("surface", "builtin:plane-normal-bump", "--json")
        assert result.code == 0
        validate_report(result.out.encode())
        orders = msgspec.json.decode(result.out)["payload"]["orders"]
        assert [row["order"] for row in orders] == [1, 2]
        assert orders[0]["max_abs"] < 1e-12
        assert orders[1]["max_uu"] == pytest.approx(4 * 0.9**2)

    def test_csv(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "residuals.csv"
        assert flexlab("surface", "builtin:plane-tilt-jet", "--csv", str(path)).code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "order,i,j,uu,uv,vv"
        assert len(lines) == 1 + 2 * 19 * 19
        assert lines[1].startswith("1,1,1,")

    def test_degenerate_grid(self, flexlab) -> None:
        result = flexlab("surface", "builtin:degenerate-grid")
        assert result.code == 5
        assert "offending nodes" in result.err

    def test_order_too_high(self, flexlab) -> None:
        assert flexlab("surface", "builtin:plane-tilt-jet", "--order", "3").code == 5


class TestMakeCurve:
    def test_hinge_round_trip(self, flexlab, tmp_path: Path) -> None:
        path = tmp_path / "hinge-curve.json"
        result = flexlab("make-curve", "builtin:hinge", "--steps", "4", "--output", str(path))
        assert result.code == 0
        assert "curve with 9 samples" in result.out
        assert path.exists()

        result = flexlab("tangent-extend", str(path))
        assert result.code == 0
        assert "curve valid" in result.out

    def test_default_output(self, flexlab, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        assert flexlab("make-curve", "builtin:hinge", "--steps", "2").code == 0
        assert (tmp_path / "hinge-flex0-curve.json").exists()

    def test_no_finite_motion(self, flexlab, tmp_path: Path) -> None:
        result = flexlab(
            "make-curve",
            "builtin:subdivided-tetrahedron",
            "--steps", "3",
            "--h", "0.01",
            "--output", str(tmp_path / "never.json"),
        )
        assert result.code == 6
        assert "no finite motion found along flex 0" in result.err
        assert not (tmp_path / "never.json").exists()

    def test_rigid_input(self, flexlab, tmp_path: Path) -> None:
        result = flexlab("make-curve", "builtin:tetrahedron", "--output", str(tmp_path / "t.json"))
        assert result.code == 3


def test_batch(flexlab, tmp_path: Path) -> None:
    inputs = tmp_path / "inputs"
    inputs.mkdir()
    dump_document(FrameworkFile.from_configuration(corpus.hinge()), inputs / "a-hinge.json")
    dump_document(FrameworkFile.from_configuration(corpus.tetrahedron()), inputs / "b-tetra.yaml")
    (inputs / "c-broken.json").write_text("{")

    csv_path = tmp_path / "values.csv"
    result = flexlab("analyze", "--batch", str(inputs), "--csv", str(csv_path))
    assert result.code == 2
    assert result.out.index("a-hinge.json") < result.out.index("b-tetra.yaml")
    assert "first-order nonrigid" in result.out
    assert "first-order rigid" in result.out
    assert "c-broken.json" in result.err
    assert (tmp_path / "values-a-hinge.csv").exists()
    assert (tmp_path / "values-b-tetra.csv").exists()


def test_list_builtins(flexlab) -> None:
    result = flexlab("list-builtins")
    assert result.code == 0
    lines = result.out.splitlines()
    assert len(lines) == len(corpus.BUILTINS)
    assert any(line.startswith("builtin:hinge ") for line in lines)


def test_batch_make_curve_writes_one_curve_per_input(flexlab, tmp_path: Path) -> None:
    inputs = tmp_path / "in"
    inputs.mkdir()
    for stem in ("left", "right"):
        dump_document(FrameworkFile.from_configuration(corpus.hinge()), inputs / f"{stem}.json")

    out = tmp_path / "out"
    out.mkdir()
    result = flexlab(
        "make-curve", "--batch", str(inputs), "--steps", "4", "--output", str(out / "curve.json")
    )
    assert result.code == 0
    assert sorted(path.name for path in out.iterdir()) == ["curve-left.json", "curve-right.json"]
    for path in out.iterdir():
        assert flexlab("tangent-extend", str(path)).code == 0
