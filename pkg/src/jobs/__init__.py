"""Jobs package: batch computations run outside a single CLI command."""

from .base_job import BaseJob, run_job
from .models import CheckResult, JobConfig, SelfTestSummary
from .selftest import SelfTestJob

__all__ = [
    "BaseJob",
    "run_job",
    "SelfTestJob",
    "CheckResult",
    "JobConfig",
    "SelfTestSummary",
]
