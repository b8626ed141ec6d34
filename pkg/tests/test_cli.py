"""Tests for the command-line entry point"""
import json

import pytest

from app.cli import EXIT_INVALID, EXIT_OK, build_parser, main


@pytest.mark.parametrize("argv", [
    ["--prime", "9", "cohomology"],
    ["--prime", "2", "cohomology"],
    ["--format", "xml", "cohomology"],
    ["--may-bound", "0", "gamma"],
    ["gamma", "0"],
    ["product", "--n", "1", "--s", "2"],
    ["product", "--n", "3", "--s", "0"],
])
def test_invalid_configuration_exits_2(argv):
    """Bad primes, formats, bounds and indices never start a computation"""
    assert main(argv) == EXIT_INVALID


def test_parser_requires_command():
    """A command is mandatory"""
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--prime", "7"])


def test_gamma_defaults():
    """gamma without indices runs s = 2, 3, 4, 5"""
    args = build_parser().parse_args(["gamma"])
    assert args.s == [2, 3, 4, 5]


def test_algebra_only_banner(capsys):
    """Primes below 7 print a warning before anything runs"""
    assert main(["--prime", "5", "product", "--n", "1", "--s", "2"]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "algebra-only mode" in err


def test_cohomology_json_report(tmp_path):
    """The cohomology suite passes and writes a JSON report"""
    out = tmp_path / "report.json"
    assert main(["--out", str(out), "cohomology"]) == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["suite"] == "cohomology"
    assert report["prime"] == 7
    assert report["status"] == "pass"
    ids = [check["check_id"] for check in report["checks"]]
    assert ids[:3] == ["betti_f1", "betti_f2", "betti_f3"]
    assert "may_collapse" in ids
    assert "t1_subalgebra_p3" in ids


def test_cohomology_text_report(capsys):
    """The text format prints one line per check"""
    assert main(["--format", "text", "cohomology"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("cohomology at p = 7: pass")
    assert "betti_f3" in out
