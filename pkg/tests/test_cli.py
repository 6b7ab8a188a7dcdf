"""Command line behavior: output formats, exit codes, config handling."""

import pytest

from otlab.cli import (
    EXIT_INVARIANT,
    EXIT_NUMERICAL,
    EXIT_PASS,
    EXIT_USAGE,
    _campaign_exit,
    entry,
    parse_config,
)
from otlab.errors import ParseError
from otlab.campaign import CampaignReport, TrialRecord


def run(capsys, *argv):
    code = entry(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


@pytest.fixture
def interval_files(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("space interval\n1 0\n")
    b.write_text("space interval\n1 1\n")
    return str(a), str(b)


@pytest.fixture
def product_file(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("space product\n1 1/5 1/2\n")
    return str(f)


class TestDist:
    def test_endpoint_diracs(self, capsys, interval_files):
        a, b = interval_files
        code, out = run(capsys, "dist", a, b)
        assert code == EXIT_PASS
        lines = out.splitlines()
        assert "distance = 1" in lines
        assert "certified = True" in lines
        assert "  1 : 0 -> 1" in lines
        assert "dual_value = 1" in lines

    def test_rational_mode_prints_fractions(self, capsys, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("space interval\n1/2 0\n1/2 1\n")
        b.write_text("space interval\n1 1/2\n")
        code, out = run(capsys, "dist", str(a), str(b), "--mode", "rational")
        assert code == EXIT_PASS
        assert "distance = 1/2" in out.splitlines()

    def test_product_space_flag(self, capsys, tmp_path, product_file):
        other = tmp_path / "q.txt"
        other.write_text("space product\n1 4/5 1/2\n")
        code, out = run(
            capsys,
            "dist", product_file, str(other),
            "--space", "product", "--base", "interval",
            "--alpha", "1", "--q", "1", "--mode", "rational",
        )
        assert code == EXIT_PASS
        assert "distance = 3/5" in out.splitlines()

    def test_missing_file_is_a_usage_error(self, capsys, tmp_path):
        ghost = str(tmp_path / "ghost.txt")
        code, _ = run(capsys, "dist", ghost, ghost)
        assert code == EXIT_USAGE


class TestTransform:
    def test_flip_splits_an_interior_atom(self, capsys, tmp_path):
        f = tmp_path / "c.txt"
        f.write_text("space interval\n1 0.3\n")
        code, out = run(capsys, "transform", "flip", str(f))
        assert code == EXIT_PASS
        assert out.splitlines() == ["space interval", "0.3 0", "0.7 1"]
        code, out = run(capsys, "transform", "flip", str(f), "--mode", "rational")
        assert code == EXIT_PASS
        assert out.splitlines() == ["space interval", "3/10 0", "7/10 1"]

    def test_fiber_flip_needs_a_product_space(self, capsys, tmp_path, product_file):
        code, out = run(
            capsys,
            "transform", "fiber-flip", product_file,
            "--space", "product", "--base", "interval", "--mode", "rational",
        )
        assert code == EXIT_PASS
        assert out.splitlines() == ["space product", "1/5 0 1/2", "4/5 1 1/2"]
        f = tmp_path / "c.txt"
        f.write_text("space interval\n1 0.3\n")
        code, _ = run(capsys, "transform", "fiber-flip", str(f))
        assert code == EXIT_USAGE

    def test_interval_transform_rejects_product_input(self, capsys, product_file):
        code, _ = run(
            capsys,
            "transform", "flip", product_file,
            "--space", "product", "--base", "interval",
        )
        assert code == EXIT_USAGE

    def test_unknown_transform_is_a_usage_error(self, capsys, product_file):
        code, _ = run(capsys, "transform", "swirl", product_file)
        assert code == EXIT_USAGE


class TestVerify:
    def test_passing_suite_writes_report_and_csv(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out = run(capsys, "verify", "duality-gap", "--trials", "3", "--seed", "2")
        assert code == EXIT_PASS
        report = (tmp_path / "duality-gap-report.txt").read_text()
        csv = (tmp_path / "duality-gap-residuals.csv").read_text()
        assert report in out  # the report body is echoed to stdout
        assert "aggregate = pass" in report
        assert csv.splitlines()[0] == "trial,seed,residual,pass"
        assert len(csv.splitlines()) == 4

    def test_contraction_suite_exits_nonzero(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, _ = run(capsys, "verify", "fiber-flip-isometry", "--trials", "5")
        assert code == EXIT_INVARIANT
        assert "aggregate = FAIL" in (tmp_path / "fiber-flip-isometry-report.txt").read_text()

    def test_reports_are_deterministic_up_to_wall_time(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        run(capsys, "verify", "flip-isometry", "--trials", "4", "--seed", "11",
            "--report", "r1.txt", "--csv", "c1.csv")
        run(capsys, "verify", "flip-isometry", "--trials", "4", "--seed", "11",
            "--report", "r2.txt", "--csv", "c2.csv")

        def body(name):
            lines = (tmp_path / name).read_text().splitlines()
            return [l for l in lines if not l.startswith("wall_time_s")]

        assert body("r1.txt") == body("r2.txt")
        assert (tmp_path / "c1.csv").read_bytes() == (tmp_path / "c2.csv").read_bytes()

    def test_unknown_suite_is_a_usage_error(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, _ = run(capsys, "verify", "no-such-suite")
        assert code == EXIT_USAGE


class TestScenario:
    def test_known_contraction_scenario(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, _ = run(capsys, "scenario", "example-3-2", "--trials", "2")
        assert code == EXIT_INVARIANT
        report = (tmp_path / "example-3-2-report.txt").read_text()
        assert "suite = example-3-2" in report
        assert "note=pi-hat-cost" in report

    def test_unknown_scenario(self, capsys):
        code, _ = run(capsys, "scenario", "example-0-0")
        assert code == EXIT_USAGE


class TestConfigFile:
    def test_cli_flags_override_file_values(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("# campaign defaults\ntrials = 4\nseed = 9\nmode = rational\n")
        code, _ = run(capsys, "verify", "flip-isometry", "--config", str(cfg), "--trials", "2")
        assert code == EXIT_PASS
        report = (tmp_path / "flip-isometry-report.txt").read_text()
        assert "trials = 2" in report
        assert "seed = 9" in report
        assert "mode = rational" in report

    def test_parse_error_positions(self, tmp_path):
        cfg = tmp_path / "bad.txt"
        cfg.write_text("trials = 3\nwibble = 1\n")
        with pytest.raises(ParseError) as info:
            parse_config(str(cfg))
        assert info.value.line == 2
        cfg.write_text("trials =\n")
        with pytest.raises(ParseError) as info:
            parse_config(str(cfg))
        assert info.value.line == 1

    def test_bad_config_is_a_usage_error(self, capsys, tmp_path):
        cfg = tmp_path / "bad.txt"
        cfg.write_text("mode = symbolic\n")
        code, _ = run(capsys, "verify", "flip-isometry", "--config", str(cfg))
        assert code == EXIT_USAGE
        code, _ = run(capsys, "verify", "flip-isometry", "--config", str(tmp_path / "none.txt"))
        assert code == EXIT_USAGE


class TestExitCodes:
    def test_no_arguments(self, capsys):
        code, _ = run(capsys)
        assert code == EXIT_USAGE

    def test_unknown_subcommand(self, capsys):
        code, _ = run(capsys, "frobnicate")
        assert code == EXIT_USAGE

    def make_report(self, note):
        trial = TrialRecord(index=0, seed_label="0:0", residual=1.0, passed=False, note=note)
        return CampaignReport(
            suite="s", space_label="x", mode="float", seed=0, tol=1e-8,
            trials=(trial,), wall_time_s=0.0,
        )

    def test_campaign_exit_classification(self):
        ok = CampaignReport(
            suite="s", space_label="x", mode="float", seed=0, tol=1e-8,
            trials=(TrialRecord(index=0, seed_label="0:0", residual=0.0, passed=True),),
            wall_time_s=0.0,
        )
        assert _campaign_exit(ok) == EXIT_PASS
        assert _campaign_exit(self.make_report("residual beyond tol")) == EXIT_INVARIANT
        stalled = self.make_report("SolverStallError: pivot budget exhausted")
        assert _campaign_exit(stalled) == EXIT_NUMERICAL
