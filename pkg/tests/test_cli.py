import json
import pathlib
from importlib import resources

import jsonschema
import pytest

from pseudoshift.cli import main

PROBLEMS = pathlib.Path(__file__).parent.parent / "problems"
SCHEMA = json.loads(resources.files("pseudoshift").joinpath("report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("mode,code", [("super", 0), ("hyper", 1), ("ows", 0), ("ows-powers", 0)])
def test_gallery_example_exit_codes(capsys, mode, code):
    got, out, _ = run(capsys, "--check", "gallery", "example-4-3", "--mode", mode)
    assert got == code
    jsonschema.validate(json.loads(out), SCHEMA)


def test_hyper_witness_in_report(capsys):
    _, out, _ = run(capsys, "--check", "gallery", "example-4-3", "--mode", "hyper")
    report = json.loads(out)
    assert report["verdict"] == "FAIL"
    assert report["witness"]["condition"] == "(H1)-backward, l=2"


def test_malformed_spec_is_a_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("version: 1\nindex: {kind: grid\n")
    code, out, err = run(capsys, "--spec", str(bad))
    assert code == 4 and code > 2
    assert "line 3" in err and not out


def test_validation_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text((PROBLEMS / "tree-path.yaml").read_text().replace("version: 1", "version: 7"))
    code, _, err = run(capsys, "--spec", str(bad))
    assert code == 3 and "version" in err


def test_missing_file_is_an_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "--spec", str(tmp_path / "nope.yaml"))
    assert code == 5 and "cannot read" in err


def test_unknown_flag_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--bogus"])
    assert exc.value.code == 3


def test_unknown_gallery_entry(capsys):
    code, _, err = run(capsys, "--check", "gallery", "nowhere")
    assert code == 3 and "known" in err


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_problem_files_pass(capsys, path):
    code, out, _ = run(capsys, "--spec", str(path))
    assert code == 0
    jsonschema.validate(json.loads(out), SCHEMA)


def test_report_file_and_text_format(capsys, tmp_path):
    target = tmp_path / "r.txt"
    code, out, _ = run(capsys, "--check", "gallery", "tree-path", "--format", "text", "--report", str(target))
    assert code == 0 and not out
    text = target.read_text()
    assert "PASS" in text and not text.lstrip().startswith("{")


def test_unwritable_report_is_an_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "--check", "gallery", "tree-path", "--report", str(tmp_path / "no" / "r.json"))
    assert code == 5 and "cannot write" in err


def test_check_kind_overrides_the_file(capsys):
    code, out, _ = run(capsys, "--spec", str(PROBLEMS / "example-4-3.yaml"), "--check", "super")
    assert code == 0
    assert json.loads(out)["checker"] == "check_dsc"


def test_unit_schedule_override_is_inconclusive(capsys, tmp_path):
    # both l = 1 terms sit at 2^(-k/2), on the wrong side of 1/k for k = 2, 3, 4
    spec = tmp_path / "t.yaml"
    spec.write_text((PROBLEMS / "tree-path.yaml").read_text().replace("2*k", "k"))
    code, out, _ = run(capsys, "--spec", str(spec))
    assert code == 2 and json.loads(out)["verdict"] == "INCONCLUSIVE"


def test_failed_search_reports_not_found(capsys, tmp_path):
    spec = tmp_path / "s.yaml"
    spec.write_text(
        "version: 1\n"
        "index: {kind: integers}\n"
        "space: {kind: weighted-lp}\n"
        "shifts:\n"
        "  - {name: T, map: {kind: translation}, weights: \"1\", power: 1}\n"
        "  - {name: U, reuse: T, power: 2}\n"
        "schedule: {search: {K: 2, n_max: 20}}\n"
        "check: super\n")
    code, out, _ = run(capsys, "--spec", str(spec))
    report = json.loads(out)
    assert code == 2
    assert report["search"]["status"] == "NOT-FOUND" and report["search"]["best_margin"] >= 1
    jsonschema.validate(report, SCHEMA)


def test_runs_are_byte_identical(capsys):
    args = ("--spec", str(PROBLEMS / "unilateral-backward.yaml"), "--K", "4")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_float_formatting(capsys):
    _, out, _ = run(capsys, "--check", "gallery", "example-4-3", "--mode", "ows-powers")
    report = json.loads(out)
    logs = [e["log_magnitude"] for e in report["grid"]]
    assert logs
    for v in logs:
        assert v is None or v == "inf" or float("%.15g" % v) == v
