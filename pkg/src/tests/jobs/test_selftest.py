"""Tests for the self-test job."""

import logging

from src.jobs import JobConfig, SelfTestJob, run_job
from src.jobs.selftest import modules


class TestSelfTestJob:
    def test_registered_modules(self):
        assert modules() == sorted(
            ["cli", "eklattice", "galois", "hecke", "lvalues", "periods", "quadarith", "verify"]
        )

    def test_cli_checks_pass(self):
        summary = run_job(SelfTestJob, JobConfig(module_filter="cli"))
        assert summary.ok
        assert summary.passed == len(summary.checks) == 2
        assert [c.name for c in summary.checks] == ["spec_round_trip", "golden_files"]

    def test_galois_checks_pass(self):
        summary = run_job(SelfTestJob, JobConfig(module_filter="galois"))
        assert summary.ok
        assert {c.module for c in summary.checks} == {"galois"}
        assert all(c.duration_seconds >= 0 for c in summary.checks)

    def test_unknown_filter_runs_nothing(self, caplog):
        with caplog.at_level(logging.WARNING, logger="jobs.selftest"):
            summary = SelfTestJob(JobConfig(module_filter="nothing")).run()
        assert summary.checks == []
        assert summary.ok
        assert "No checks" in caplog.text

    def test_failures_are_reported_not_raised(self, monkeypatch):
        job = SelfTestJob(JobConfig(module_filter="cli"))

        def broken(_job):
            raise AssertionError("forced")

        monkeypatch.setattr(job, "selected", lambda: [("cli", "forced", broken)])
        summary = job.run()
        assert summary.failed == 1
        assert summary.checks[0].detail == "AssertionError: forced"
