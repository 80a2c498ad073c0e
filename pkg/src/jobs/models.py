"""Data models for job outputs and configurations."""

from typing import List, Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """Outcome of one named self-test check."""
    module: str = Field(..., description="Module the check belongs to")
    name: str = Field(..., description="Check name, unique within its module")
    passed: bool = Field(..., description="Whether the check passed")
    duration_seconds: float = Field(..., ge=0, description="Wall time of the check")
    detail: str = Field(default="", description="Failure diagnostics or a short summary")


class SelfTestSummary(BaseModel):
    """
    Machine-readable result of a self-test run.

    ``checks`` keeps the registration order, so identical runs produce
    identical reports apart from the timings.
    """
    precision: int = Field(..., description="Working precision in bits")
    module_filter: Optional[str] = Field(None, description="Module the run was restricted to")
    passed: int = Field(..., ge=0)
    failed: int = Field(..., ge=0)
    duration_seconds: float = Field(..., ge=0)
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


class JobConfig(BaseModel):
    """Configuration for job execution."""
    module_filter: Optional[str] = Field(None, description="Run only the checks of this module")
    precision: int = Field(default=192, ge=64, le=4096, description="Working precision in bits")
    verify_precision: int = Field(default=256, ge=64, le=4096, description="Precision of the Deligne-ratio checks")
    dirichlet_nmax: int = Field(default=10_000, ge=10, description="Norm bound of the Dirichlet oracle")
    seed: int = Field(default=20240501, description="Seed of the randomized checks")
