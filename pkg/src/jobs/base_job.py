"""Base job class for batch computations."""

import logging
from abc import ABC, abstractmethod
from datetime import datetime
from typing import Optional

from mpmath import mp

from src.config.logging_config import setup_logging
from src.config.settings import settings
from src.core.precision import precision_manager


class BaseJob(ABC):
    """
    Abstract base class for all jobs.

    Provides common functionality:
    - Logging setup
    - Precision validation and restoration of the global mpmath state
    - Execution time tracking
    """

    def __init__(self, job_name: str, precision: Optional[int] = None):
        """Initialize base job with name and working precision in bits."""
        self.job_name = job_name
        self.precision = precision or settings.precision.default_bits
        self.logger = logging.getLogger(f"jobs.{job_name}")
        self.start_time: Optional[datetime] = None
        self.end_time: Optional[datetime] = None
        self._saved_prec: Optional[int] = None

    def setup(self) -> None:
        """Validate the precision and remember the mpmath state."""
        setup_logging()
        precision_manager.validate(self.precision)
        self._saved_prec = mp.prec
        self.logger.info(f"Setting up job: {self.job_name} at {self.precision} bits")

    def cleanup(self) -> None:
        """Restore the mpmath precision in case a computation left it changed."""
        if self._saved_prec is not None:
            mp.prec = self._saved_prec
        self.logger.info(f"Cleaning up job: {self.job_name}")

    @abstractmethod
    def execute(self):
        """Main job execution logic. Must be implemented by subclasses."""

    @property
    def duration(self) -> float:
        if self.start_time is None or self.end_time is None:
            return 0.0
        return (self.end_time - self.start_time).total_seconds()

    def run(self):
        """
        Run the complete job lifecycle:
        1. Setup logging and precision
        2. Execute job logic
        3. Cleanup

        Returns:
            Whatever ``execute`` returns

        Raises:
            PrecisionUnachievable: If the job precision is outside the configured range
        """
        self.start_time = datetime.now()

        try:
            self.setup()
            return self.execute()

        except Exception as e:
            self.logger.error(f"Job {self.job_name} failed: {e}", exc_info=True)
            raise
        finally:
            self.cleanup()
            self.end_time = datetime.now()
            self.logger.info(f"Job {self.job_name} completed in {self.duration:.2f} seconds")


def run_job(job_class, *args, **kwargs):
    """Instantiate a job class and run it."""
    return job_class(*args, **kwargs).run()
