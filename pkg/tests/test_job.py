"""
tests/test_job.py — Tests for models/job.py and modules/runner.py
JobSpec parsing, gamma notation, ring construction and job dispatch.
"""
import json
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import config
from models.job import GroupSpec, JobSpec, RingSpec, parse_gamma
from modules.errors import ParseError
from modules.runner import run


class TestJobSpec:

    def test_from_dict_defaults(self):
        job = JobSpec.from_dict({"command": "roots", "group": {"type": "G2"}})
        assert job.group.label == "G2"
        assert job.ring.field_name == "Q"
        assert job.seed is None

    def test_unknown_command(self):
        with pytest.raises(ParseError):
            JobSpec.from_dict({"command": "factorise"})

    def test_missing_command(self):
        with pytest.raises(ParseError):
            JobSpec.from_dict({"group": {"type": "A2"}})

    def test_not_json(self):
        with pytest.raises(ParseError):
            JobSpec.from_json("{command: roots")

    def test_bad_seed(self):
        with pytest.raises(ParseError):
            JobSpec.from_dict({"command": "roots", "seed": "abc"})

    def test_round_trip(self):
        doc = {
            "command": "laurent",
            "group": {"type": "A", "rank": 2, "rep": "natural"},
            "ring": {"field": "Q", "variables": ["X"], "laurent": ["X"]},
            "input": {"word": "x[1,0](X^-1)"},
            "options": {"var": "X"},
            "budget_scale": 0.5,
            "seed": 9,
        }
        job = JobSpec.from_json(json.dumps(doc))
        assert JobSpec.from_dict(job.to_dict()) == job


class TestGroupSpec:

    def test_label_joins_rank(self):
        assert GroupSpec.from_dict({"type": "d", "rank": 12}).label == "D12"

    def test_J_from_string(self):
        assert GroupSpec.from_dict({"type": "D", "rank": 12, "J": "4,8"}).J == [4, 8]

    def test_gamma_string(self):
        g = GroupSpec.from_dict({"type": "A", "rank": 3, "gamma": "1:3,3:1"})
        assert g.gamma == [[3, 2, 1]]

    def test_gamma_needs_rank(self):
        with pytest.raises(ParseError):
            GroupSpec.from_dict({"type": "A3", "gamma": "1:3,3:1"})

    def test_parse_gamma_two_groups(self):
        assert parse_gamma("1:2,2:1;3:4,4:3", 4) == [[2, 1, 3, 4], [1, 2, 4, 3]]

    def test_parse_gamma_out_of_range(self):
        with pytest.raises(ParseError):
            parse_gamma("1:5", 4)


class TestRingSpec:

    def test_dual_adds_t(self):
        ring = RingSpec.from_dict({"variables": "X", "laurent": "X", "dual": True}).build()
        t = ring.gen("t")
        assert (t * t).is_zero

    def test_fp_default_prime(self):
        ring = RingSpec.from_dict({"field": "Fp"}).build()
        assert ring.prime == config.DEFAULT_PRIME

    def test_unknown_field(self):
        with pytest.raises(ParseError):
            RingSpec.from_dict({"field": "R"})


class TestRunner:

    def test_roots(self):
        code, payload, transcript = run(JobSpec.from_dict({"command": "roots", "group": {"type": "G2"}}))
        assert code == 0
        assert len(payload["roots"]) == 12
        assert transcript.steps() == ["roots"]

    def test_relative_bc2(self):
        job = JobSpec.from_dict({"command": "relative", "group": {"type": "D", "rank": 12, "J": [4, 8]}})
        code, payload, _ = run(job)
        assert code == 0
        assert payload["type"] == "BC2"

    def test_missing_word_is_parse_error(self):
        job = JobSpec.from_dict({"command": "shrink", "group": {"type": "A2", "rep": "natural"},
                                 "options": {"s": "Y"}})
        code, payload, _ = run(job)
        assert code == ParseError.exit_code
        assert payload["error"] == "ParseError"

    def test_rejected_input_exit_code(self):
        job = JobSpec.from_dict({
            "command": "gauss",
            "group": {"type": "A1", "rep": "natural"},
            "input": {"matrix": [["2", "0"], ["0", "1"]]},
        })
        code, payload, _ = run(job)
        assert code == 2
        assert payload["error"] == "RejectedInput"

    def test_gauss_then_verify(self):
        job = JobSpec.from_dict({
            "command": "gauss",
            "group": {"type": "A1", "rep": "natural"},
            "input": {"matrix": [["0", "1"], ["-1", "0"]]},
            "seed": 1,
        })
        code, cert, _ = run(job)
        assert code == 0
        code, report, _ = run(JobSpec.from_dict({"command": "verify", "input": {"certificate": cert}}))
        assert code == 0
        assert report["ok"]

    def test_failed_verification_exits_2(self):
        job = JobSpec.from_dict({
            "command": "gauss",
            "group": {"type": "A1", "rep": "natural"},
            "input": {"matrix": [["0", "1"], ["-1", "0"]]},
        })
        _, cert, _ = run(job)
        cert["input"]["matrix"] = [["1", "0"], ["0", "1"]]
        code, report, _ = run(JobSpec.from_dict({"command": "verify", "input": {"certificate": cert}}))
        assert code == 2
        assert not report["ok"]

    def test_budget_override_is_restored(self):
        before = config.BUDGET_SCALE
        job = JobSpec.from_dict({"command": "roots", "group": {"type": "A2"}, "budget_scale": 0.25})
        run(job)
        assert config.BUDGET_SCALE == before

    def test_set_budget_scale_rejects_zero(self):
        with pytest.raises(ValueError):
            config.set_budget_scale(0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
