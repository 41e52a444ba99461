import json

import pytest
from click.testing import CliRunner

from app.main import cli
from app.schemas.report import VerificationReport
from app.services.verification import CHECK_IDS

runner = CliRunner()


@pytest.fixture(scope="module")
def json_report():
    """Full JSON report for the example preset, run once"""
    result = runner.invoke(cli, ["verify", "--preset", "example", "--format", "json"])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


class TestVerify:
    """Test the verify command"""

    def test_example_passes(self, json_report):
        """verify --preset example should pass every check"""
        assert json_report["verdict"] == "pass"
        assert [c["id"] for c in json_report["checks"]] == list(CHECK_IDS)
        assert all(c["status"] == "passed" for c in json_report["checks"])

    def test_report_fields(self, json_report):
        """The JSON report should carry tool, version, params, checks and verdict"""
        assert set(json_report) == {"tool", "version", "params", "checks", "verdict"}
        assert json_report["params"]["c"] == "1/(1+t)"
        for record in json_report["checks"]:
            assert set(record) == {"id", "claim", "reference", "status", "witness", "elapsed_seconds"}
            assert record["reference"]
        checks = {c["id"]: c for c in json_report["checks"]}
        assert checks["params"]["reference"] == "x pi(x) + a = (x+w)(x+c)(x+d)"
        assert checks["eta"]["reference"] == "eta(x) = x pi(x) + x + a"

    def test_witnesses(self, json_report):
        """Key witnesses of the example run"""
        checks = {c["id"]: c for c in json_report["checks"]}
        assert checks["modulus"]["witness"]["modulus_at_zero"] == [1, 0, 0, 0, 1]
        assert checks["idempotents"]["witness"]["ranks"] == [2, 1, 1]
        assert checks["idempotents"]["witness"]["e1_min_valuation"] == "-1"
        assert checks["group_table"]["witness"]["matched"] == 64
        assert checks["blocks"]["witness"]["dimensions"] == [4, 2, 2]
        assert checks["separability"]["witness"]["group_algebra_separable"] is False
        assert checks["dimension_vector"]["witness"]["vector"] == [1, 1, 1, 1, 2]

    def test_text_format(self):
        """Text output lists each check and the verdict"""
        result = runner.invoke(cli, ["verify", "--preset", "example", "--check", "group_table"])
        assert result.exit_code == 0
        assert "[PASS] group_table" in result.stdout
        assert "σ^4 = 1, τ^2 = σ^2, τσ = σ^3 τ" in result.stdout
        assert "verdict: PASS" in result.stdout

    def test_check_filter(self):
        """--check reports only the selected checks"""
        result = runner.invoke(
            cli, ["verify", "--check", "etale", "--check", "qt", "--format", "json"]
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert [c["id"] for c in report["checks"]] == ["qt", "etale"]

    def test_deterministic(self):
        """Two runs agree apart from timings"""
        args = ["verify", "--check", "cocycle", "--format", "json"]
        first, second = (
            VerificationReport.model_validate_json(runner.invoke(cli, args).stdout) for _ in range(2)
        )
        assert first.deterministic_dump() == second.deterministic_dump()
        assert "elapsed_seconds" not in first.deterministic_dump()["checks"][0]
        assert first.check("cocycle").passed
        assert first.check("flatness") is None

    def test_output_file(self, tmp_path):
        """--output writes the report to a file"""
        path = tmp_path / "report.json"
        result = runner.invoke(
            cli, ["verify", "--check", "modulus", "--format", "json", "--output", str(path)]
        )
        assert result.exit_code == 0
        assert json.loads(path.read_text())["verdict"] == "pass"

    def test_failing_params_file(self, tmp_path):
        """A tuple with c = d fails with exit code 1 and skips dependent checks"""
        path = tmp_path / "bad.params"
        path.write_text("a=t\nb=1+t^2\nc=1+t\nd=1+t\nw=t\nz=t\n")
        result = runner.invoke(
            cli, ["verify", "--params-file", str(path), "--check", "idempotents", "--format", "json"]
        )
        assert result.exit_code == 1
        report = json.loads(result.stdout)
        assert report["verdict"] == "fail"
        assert report["checks"][0]["status"] == "skipped"

    def test_z_override(self):
        """--z 0 makes q_t invalid"""
        result = runner.invoke(cli, ["verify", "--z", "0", "--check", "qt", "--format", "json"])
        assert result.exit_code == 1

    @pytest.mark.parametrize(
        "args",
        [
            ["verify", "--format", "xml"],
            ["verify", "--precision", "0"],
            ["verify", "--check", "nonsense"],
            ["verify", "--z", "2t"],
            ["verify", "--z", "t^100000000000", "--check", "params"],
            ["verify", "--z", "1/t^5000", "--check", "params"],
            ["verify", "--params-file", "/nonexistent/file.params"],
        ],
    )
    def test_bad_input(self, args):
        """Input errors exit with code 2"""
        assert runner.invoke(cli, args).exit_code == 2

    def test_garbage_params_file(self, tmp_path):
        path = tmp_path / "garbage.params"
        path.write_text("not a params file\n")
        assert runner.invoke(cli, ["verify", "--params-file", str(path)]).exit_code == 2


class TestParamsCommands:
    """Test params validate and params search"""

    def test_validate_example(self):
        result = runner.invoke(cli, ["params", "validate", "--preset", "example"])
        assert result.exit_code == 0
        assert result.stdout.strip().splitlines()[-1] == "valid"
        assert "[FAIL]" not in result.stdout

    def test_validate_lists_failures(self, tmp_path):
        """Each violated hypothesis is listed and the exit code is 1"""
        path = tmp_path / "bad.params"
        path.write_text("w=0\nc=1/(1+t)\nd=1+t+t^2\n")
        result = runner.invoke(cli, ["params", "validate", "--params-file", str(path)])
        assert result.exit_code == 1
        assert "[FAIL] sum_equals_product" in result.stdout

    def test_search_degree_zero(self):
        """Degree bound 0 yields no tuples"""
        result = runner.invoke(cli, ["params", "search", "--degree-bound", "0"])
        assert result.exit_code == 0
        assert "no tuples found" in result.stdout

    def test_search_finds_example(self):
        result = runner.invoke(cli, ["params", "search", "--degree-bound", "1", "--format", "json"])
        assert result.exit_code == 0
        found = json.loads(result.stdout)
        expected = {"w": "t", "c": "1/(1+t)", "d": "1+t+t^2"}.items()
        swapped = [{**p, "c": p["d"], "d": p["c"]} for p in found]
        assert any(expected <= p.items() for p in found + swapped)

    def test_search_bound_out_of_range(self):
        assert runner.invoke(cli, ["params", "search", "--degree-bound", "99"]).exit_code == 2


class TestReportCommand:
    """Test rendering saved reports"""

    def test_render_saved_report(self, tmp_path, json_report):
        path = tmp_path / "saved.json"
        path.write_text(json.dumps(json_report))
        result = runner.invoke(cli, ["report", "--input", str(path), "--format", "text"])
        assert result.exit_code == 0
        assert "[PASS] dimension_vector" in result.stdout

    def test_unreadable_report(self, tmp_path):
        path = tmp_path / "saved.json"
        path.write_text("{}")
        assert runner.invoke(cli, ["report", "--input", str(path)]).exit_code == 2

    def test_version(self):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "kq8-deform" in result.stdout
