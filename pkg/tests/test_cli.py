import subprocess
import sys

import pytest

from cvplan.cli import main
from cvplan.dsl import parse_problem

SUITE_CFG = """
seeds = 0
time_limit = 10
expansion_limit = 4000
instance = counters n=2 m=10 u=1
algo = sg-log algo=sg rectifier=log sampler=uniform
algo = sa-log algo=sa rectifier=log sampler=uniform
"""


@pytest.fixture
def counters_file(tmp_path):
    path = tmp_path / "c2.plan"
    assert main(["gen", "counters", "-p", "n=2", "-o", str(path)]) == 0
    return str(path)


@pytest.fixture
def suite_dir(tmp_path):
    cfg = tmp_path / "suite.cfg"
    cfg.write_text(SUITE_CFG)
    out = tmp_path / "out"
    assert main(["suite", str(cfg), "-o", str(out)]) == 0
    return str(out)


class TestGen:
    def test_stdout_roundtrips(self, capsys):
        assert main(["gen", "sailing", "-p", "b=1", "-p", "p=1"]) == 0
        problem, diags = parse_problem(capsys.readouterr().out)
        assert problem is not None
        assert problem.name == "sailing-1-1"

    def test_seed_changes_layout(self, capsys):
        main(["gen", "drone", "-p", "grid=4", "-p", "p=2", "--seed", "0"])
        first = capsys.readouterr().out
        main(["gen", "drone", "-p", "grid=4", "-p", "p=2", "--seed", "1"])
        assert capsys.readouterr().out != first

    def test_missing_param(self, capsys):
        assert main(["gen", "counters"]) == 2
        assert "missing parameter" in capsys.readouterr().err

    def test_bad_param_syntax(self, capsys):
        assert main(["gen", "counters", "-p", "n2"]) == 2
        assert "key=value" in capsys.readouterr().err

    def test_non_integer_param(self, capsys):
        assert main(["gen", "counters", "-p", "n=two"]) == 2
        assert "integer" in capsys.readouterr().err

    def test_unknown_domain_rejected_by_parser(self):
        with pytest.raises(SystemExit):
            main(["gen", "towers"])

    def test_generator_value_error_reported(self, capsys):
        assert main(["gen", "counters", "-p", "n=0"]) == 2
        assert "error" in capsys.readouterr().err


class TestSolve:
    def test_solved_prints_plan(self, counters_file, capsys):
        code = main(["solve", counters_file, "--algo", "sg",
                     "--sampler", "uniform", "--seed", "0"])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out.startswith("plan length=")
        assert "outcome=solved" in captured.err

    def test_budget_exit_code(self, counters_file, capsys):
        code = main(["solve", counters_file, "--expansion-limit", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert captured.out == ""
        assert "outcome=budget" in captured.err

    def test_mcts(self, counters_file, capsys):
        code = main(["solve", counters_file, "--algo", "mcts",
                     "--expansion-limit", "2000"])
        assert code == 0
        assert capsys.readouterr().out.startswith("plan length=")

    def test_assertions_flag(self, counters_file):
        assert main(["solve", counters_file, "--assert", "on"]) == 0

    def test_systematic_without_grid(self, counters_file):
        assert main(["solve", counters_file, "--sampler", "systematic",
                     "--grid-digits", "0"]) == 0

    def test_missing_file(self, capsys):
        assert main(["solve", "/nonexistent.plan"]) == 2
        assert "error" in capsys.readouterr().err

    def test_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.plan"
        bad.write_text("(problem")
        assert main(["solve", str(bad)]) == 2
        assert "error" in capsys.readouterr().err

    def test_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.plan"
        bad.write_text(
            "(problem p (bools) (nums (x 0)) (controls (u 5 1)) "
            "(action a (pre (> x 0)) (eff)) (goal (> x 0)))")
        assert main(["solve", str(bad)]) == 2
        assert "lower bound" in capsys.readouterr().err


class TestSuite:
    def test_outputs_exist(self, suite_dir, tmp_path):
        assert (tmp_path / "out" / "runs.csv").exists()
        assert (tmp_path / "out" / "meta.txt").exists()

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "suite.cfg"
        cfg.write_text("nonsense\n")
        assert main(["suite", str(cfg), "-o", str(tmp_path / "o")]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        assert main(["suite", str(tmp_path / "nope.cfg"),
                     "-o", str(tmp_path / "o")]) == 2

    def test_workers_flag(self, tmp_path, capsys):
        cfg = tmp_path / "suite.cfg"
        cfg.write_text(SUITE_CFG)
        out = tmp_path / "out2"
        assert main(["suite", str(cfg), "-o", str(out),
                     "--workers", "2"]) == 0
        assert (out / "runs.csv").exists()


class TestReport:
    def test_table(self, suite_dir, capsys):
        assert main(["report", suite_dir, "--table"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "domain,sa-log,sg-log"
        assert lines[1].startswith("counters,")

    def test_table_instance_rows(self, suite_dir, capsys):
        assert main(["report", suite_dir, "--table", "--row",
                     "instance"]) == 0
        assert capsys.readouterr().out.splitlines()[1].startswith(
            "counters/n2-m10-u1,")

    def test_survival(self, suite_dir, capsys):
        assert main(["report", suite_dir, "--survival"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "algorithm,time_s,solved"
        assert len(lines) >= 3

    def test_compare(self, suite_dir, capsys):
        assert main(["report", suite_dir, "--compare", "sg-log", "sa-log",
                     "--metric", "expansions"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "instance,seed,sg-log,sa-log"
        assert len(lines) == 2

    def test_best_of(self, suite_dir, capsys):
        assert main(["report", suite_dir, "--table",
                     "--best-of", "sg-log,sa-log"]) == 0
        assert "best:sg-log,sa-log" in capsys.readouterr().out

    def test_missing_dir(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "void"), "--table"]) == 2

    def test_requires_exactly_one_view(self, suite_dir):
        with pytest.raises(SystemExit):
            main(["report", suite_dir])

    def test_compare_unknown_algorithm_gives_empty_body(self, suite_dir,
                                                        capsys):
        assert main(["report", suite_dir, "--compare", "sg-log", "zzz"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 1


class TestEntryPoints:
    def test_module_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "cvplan.cli", "--help"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "solve" in proc.stdout
        assert "suite" in proc.stdout

    def test_no_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit):
            main([])
