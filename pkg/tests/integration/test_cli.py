"""
Integration tests for the sphere-cr command line.

Each test drives ``main(argv)`` end to end and inspects stdout, stderr and
the returned exit code.
"""

import json
import math

import pytest

from src.cli.main import main
from src.core.config import get_settings

PI = repr(math.pi)
HALF_PI = repr(math.pi / 2)
SMALL_VERIFY = ["verify", "--family", "cr", "--n-theta", "3", "--n-phi", "3"]


def run_json(capsys: pytest.CaptureFixture[str], argv: list[str]) -> tuple[int, object]:
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


class TestEval:
    """Tests for the eval subcommand."""

    def test_text_output(self, capsys):
        """Text output lists the canonical expression and the jet."""
        code = main(["eval", "W", "--theta", PI, "--phi", HALF_PI])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("expression = W\n")
        assert "value = -1" in out

    def test_json_with_d(self, capsys):
        """D conj(W) = 2i conj(W) = -2i at theta = pi, phi = pi/2."""
        code, payload = run_json(
            capsys, ["eval", "conj(W)", "--theta", PI, "--phi", HALF_PI, "--show-D", "--json"]
        )
        assert code == 0
        assert payload["holomorphic"] is False
        assert payload["value"] == pytest.approx([-1.0, 0.0], abs=1e-12)
        assert payload["D"] == pytest.approx([0.0, -2.0], abs=1e-12)
        assert payload["Dbar"] == pytest.approx([0.0, 0.0], abs=1e-12)

    def test_degrees(self, capsys):
        """--degrees converts before evaluation."""
        _, in_degrees = run_json(
            capsys, ["eval", "zeta", "--theta", "90", "--phi", "90", "--degrees", "--json"]
        )
        assert in_degrees["theta"] == pytest.approx(math.pi / 2)
        assert in_degrees["value"] == pytest.approx([math.pi / 2, 0.0], abs=1e-12)

    def test_csv_output(self, capsys):
        """CSV has one row per quantity."""
        main(["eval", "h(1/2)", "--theta", "1", "--phi", "1", "--format", "csv"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "quantity,re,im"
        assert [line.split(",")[0] for line in lines[1:]] == [
            "value",
            "d_theta",
            "d_phi",
            "d_theta_theta",
            "d_theta_phi",
            "d_phi_phi",
        ]


class TestErrors:
    """Tests for exit codes on bad input."""

    def test_parse_error(self, capsys):
        """A truncated expression exits 2 with a message on stderr."""
        code = main(["eval", "W*", "--theta", "1", "--phi", "1"])
        captured = capsys.readouterr()
        assert code == 2
        assert captured.out == ""
        assert "sphere-cr: error [" in captured.err

    def test_invalid_family_index(self, capsys):
        """h(3/2) violates |k| < m."""
        assert main(["eval", "h(3/2)", "--theta", "1", "--phi", "1"]) == 2

    def test_missing_angles(self, capsys):
        """eval needs both angles."""
        assert main(["eval", "W", "--theta", "1"]) == 2
        assert "--theta and --phi" in capsys.readouterr().err

    def test_point_outside_domain(self, capsys):
        """phi = 0 is a pole."""
        assert main(["eval", "W", "--theta", "1", "--phi", "0"]) == 2

    def test_singular_value(self, capsys):
        """exp overflow is a numerical failure."""
        assert main(["eval", "exp(1000*W)", "--theta", "0.001", "--phi", "1.5"]) == 3

    def test_unknown_subcommand(self, capsys):
        """argparse errors exit 2."""
        assert main(["integrate"]) == 2

    def test_help(self, capsys):
        """--help exits 0."""
        assert main(["--help"]) == 0
        assert "sphere-cr" in capsys.readouterr().out

    def test_mismatched_index_lists(self, capsys):
        """--k and --m must pair up."""
        assert main(SMALL_VERIFY + ["--k", "1", "2", "--m", "3"]) == 2


class TestVerify:
    """Tests for the verify subcommand."""

    def test_cr_family_passes(self, capsys):
        """A small CR run passes and reports JSON."""
        code, payload = run_json(capsys, SMALL_VERIFY + ["--json"])
        assert code == 0
        assert payload["status"] == "pass"
        assert payload["version"] == "1.0"
        assert all(c["name"].startswith("cr:") for c in payload["checks"])

    def test_deterministic(self, capsys):
        """Same flags, same report apart from wall time."""
        argv = SMALL_VERIFY + ["--family", "margin_monotonicity", "--seed", "0x2A", "--json"]
        _, first = run_json(capsys, argv)
        _, second = run_json(capsys, argv)
        first.pop("wall_time_ms")
        second.pop("wall_time_ms")
        assert first == second

    @pytest.mark.slow
    def test_random_holomorphy_deterministic(self, capsys):
        """The default-size random family reproduces for a fixed seed."""
        argv = ["verify", "--family", "random_holomorphy", "--seed", "0x2A", "--json"]
        _, first = run_json(capsys, argv)
        _, second = run_json(capsys, argv)
        first.pop("wall_time_ms")
        second.pop("wall_time_ms")
        assert first == second

    def test_zero_tolerance_fails(self, capsys):
        """tol = 0 turns rounding residuals into failures."""
        assert main(SMALL_VERIFY + ["--tol", "0"]) == 1
        assert capsys.readouterr().out.rstrip().splitlines()[-1].startswith("fail:")

    def test_csv_report(self, capsys):
        """CSV has the fixed suite columns."""
        main(SMALL_VERIFY + ["--format", "csv"])
        header = capsys.readouterr().out.splitlines()[0]
        assert header == "name,status,metric,tolerance,points_tested,details"

    def test_seed_from_environment(self, capsys, monkeypatch):
        """SPHERE_CR_SEED applies when --seed is absent."""
        monkeypatch.setenv("SPHERE_CR_SEED", "0x2A")
        get_settings.cache_clear()
        _, payload = run_json(capsys, SMALL_VERIFY + ["--json"])
        assert payload["config"]["seed"] == 42

    def test_seed_flag_overrides_environment(self, capsys, monkeypatch):
        """--seed wins over SPHERE_CR_SEED."""
        monkeypatch.setenv("SPHERE_CR_SEED", "42")
        get_settings.cache_clear()
        _, payload = run_json(capsys, SMALL_VERIFY + ["--seed", "7", "--json"])
        assert payload["config"]["seed"] == 7

    def test_json_to_file(self, capsys, tmp_path):
        """--json PATH writes the report there and nothing to stdout."""
        target = tmp_path / "report.json"
        assert main(SMALL_VERIFY + ["--json", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["status"] == "pass"


class TestTable:
    """Tests for the table subcommand."""

    def test_first_row_is_pi(self, capsys):
        """k/m = 1/2 integrates to pi."""
        assert main(["table", "--m-max", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,m,closed_form,quadrature,abs_diff"
        assert lines[1].startswith("1,2,3.14159265,3.14159265,")
        assert len(lines) == 2

    def test_row_count(self, capsys):
        """m_max = 5 gives 1 + 2 + 3 + 4 rows."""
        main(["table", "--m-max", "5"])
        assert len(capsys.readouterr().out.splitlines()) == 1 + 10

    def test_output_file(self, capsys, tmp_path):
        """--output writes the CSV to disk."""
        target = tmp_path / "phi.csv"
        assert main(["table", "--m-max", "3", "--output", str(target)]) == 0
        assert target.read_text(encoding="utf-8").count("\n") == 1 + 3

    def test_m_max_out_of_range(self, capsys):
        """m_max below 2 is a usage error."""
        assert main(["table", "--m-max", "1"]) == 2


class TestResidual:
    """Tests for the residual subcommand."""

    def test_family_member_residuals_are_small(self, capsys):
        """g_{1/2} leaves O(h^2) residuals at every radius."""
        code, rows = run_json(capsys, ["residual", "--k", "1", "--m", "2", "--json"])
        assert code == 0
        assert [row["r"] for row in rows] == [0.5, 1.0, 2.0]
        assert all(row["relative"] < 1e-4 for row in rows)

    def test_non_holomorphic_factor(self, capsys):
        """|W|^2 is not annihilated."""
        _, rows = run_json(
            capsys, ["residual", "W*conj(W)", "--theta", "1", "--phi", "1", "--json"]
        )
        assert max(row["relative"] for row in rows) > 1e-2

    def test_zero_field(self, capsys):
        """W - W vanishes identically; the ratio is reported, not divided by zero."""
        code, rows = run_json(
            capsys, ["residual", "W-W", "--theta", "1", "--phi", "1", "--json"]
        )
        assert code == 0
        assert all(row["field"] == 0.0 for row in rows)
        assert all(row["relative"] == 0.0 for row in rows)

    def test_zero_field_text(self, capsys):
        """The text table renders the same rows."""
        assert main(["residual", "W-W", "--radii", "1", "2"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 3


class TestNorm:
    """Tests for the norm subcommand."""

    @pytest.mark.slow
    def test_unit_norm(self, capsys):
        """g_{1/2} with n = 1 has unit norm."""
        code, payload = run_json(capsys, ["norm", "--k", "1", "--m", "2", "--json"])
        assert code == 0
        assert payload["norm_sq"] == pytest.approx(1.0, abs=1e-6)

    def test_invalid_rate(self, capsys):
        """n must be positive."""
        assert main(["norm", "--n", "-1"]) == 2
