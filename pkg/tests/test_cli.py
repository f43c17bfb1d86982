"""
tests/test_cli.py — Tests for main.py
Commands end to end through click's CliRunner: JSON on stdout, exit codes.
"""
import json
import os
import sys
import pytest
from click.testing import CliRunner

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from main import cli


def _payload(result) -> dict:
    text = result.output
    start = 0 if text.startswith("{") else text.index("\n{") + 1
    return json.loads(text[start:])


@pytest.fixture
def runner():
    return CliRunner()


class TestRootCommands:

    def test_roots_g2(self, runner):
        result = runner.invoke(cli, ["roots", "--type", "G2"])
        assert result.exit_code == 0
        assert _payload(result)["count"] == 12

    def test_relative_d12(self, runner):
        result = runner.invoke(cli, ["relative", "--type", "D", "--rank", "12", "--J", "4,8"])
        assert result.exit_code == 0
        assert _payload(result)["type"] == "BC2"

    def test_bad_type(self, runner):
        result = runner.invoke(cli, ["roots", "--type", "H3"])
        assert result.exit_code in (1, 2)
        assert "error" in _payload(result)

    def test_bad_J_is_parse_error(self, runner):
        result = runner.invoke(cli, ["relative", "--type", "A3", "--J", "one"])
        assert result.exit_code == 1


class TestCertificates:

    WEYL = '[["0","1"],["-1","0"]]'

    def test_gauss_and_verify(self, runner, tmp_path):
        result = runner.invoke(cli, ["gauss", "--type", "A1", "--rep", "natural", "--matrix", self.WEYL])
        assert result.exit_code == 0
        cert = _payload(result)
        assert [p["name"] for p in cert["parts"]] == ["u1", "u2", "l", "u3"]
        path = tmp_path / "cert.json"
        path.write_text(json.dumps(cert))
        checked = runner.invoke(cli, ["verify", str(path)])
        assert checked.exit_code == 0
        assert _payload(checked)["ok"]

    def test_tampered_certificate_exits_2(self, runner, tmp_path):
        result = runner.invoke(cli, ["gauss", "--type", "A1", "--rep", "natural", "--matrix", self.WEYL])
        cert = _payload(result)
        cert["input"]["matrix"] = [["1", "0"], ["0", "1"]]
        path = tmp_path / "cert.json"
        path.write_text(json.dumps(cert))
        assert runner.invoke(cli, ["verify", str(path)]).exit_code == 2

    def test_determinant_rejected(self, runner):
        result = runner.invoke(cli, ["gauss", "--type", "A1", "--rep", "natural",
                                     "--matrix", '[["2","0"],["0","1"]]'])
        assert result.exit_code == 2

    def test_malformed_word(self, runner):
        result = runner.invoke(cli, ["laurent", "--type", "A2", "--rep", "natural", "--vars", "X",
                                     "--laurent", "X", "--word", "x[1,0](X"])
        assert result.exit_code == 1


class TestJobFile:

    def test_run_job(self, runner, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"command": "roots", "group": {"type": "B", "rank": 2}}))
        result = runner.invoke(cli, ["run", "--job", str(path)])
        assert result.exit_code == 0
        assert _payload(result)["count"] == 8

    def test_bad_job_document(self, runner, tmp_path):
        path = tmp_path / "job.json"
        path.write_text('{"command": "nothing"}')
        assert runner.invoke(cli, ["run", "--job", str(path)]).exit_code == 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
