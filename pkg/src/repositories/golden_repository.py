"""Golden value files under ``golden/``."""

import json
import logging
from pathlib import Path
from typing import List, Optional

import mpmath
import sympy
from pydantic import ValidationError

from src.config.settings import settings
from src.core.exceptions import GoldenDataError
from src.core.precision import precision_manager
from src.models.golden import GoldenEntry, GoldenFile

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[2]


class GoldenRepository:
    """Reads and writes golden files; every failure surfaces as GoldenDataError."""

    def __init__(self, directory: Optional[Path] = None):
        self._directory = directory

    @property
    def directory(self) -> Path:
        if self._directory is not None:
            return self._directory
        path = Path(settings.output.golden_dir)
        return path if path.is_absolute() else PROJECT_ROOT / path

    def list_files(self) -> List[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def load(self, name: str) -> GoldenFile:
        """
        Load and validate one golden file.

        Raises:
            GoldenDataError: If the file is missing, not JSON or off-schema
        """
        path = self.directory / f"{name}.json"
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            return GoldenFile.model_validate(raw)
        except FileNotFoundError as e:
            raise GoldenDataError(f"golden file {path} not found") from e
        except json.JSONDecodeError as e:
            raise GoldenDataError(f"golden file {path} is not valid JSON: {e}") from e
        except ValidationError as e:
            raise GoldenDataError(f"golden file {path} does not match the schema: {e}") from e

    def entry(self, file: str, name: str) -> GoldenEntry:
        for entry in self.load(file).entries:
            if entry.name == name:
                return entry
        raise GoldenDataError(f"golden file '{file}' has no entry '{name}'")

    def value(self, file: str, name: str, prec: int):
        """The entry's value as an mpmath number at the given precision."""
        entry = self.entry(file, name)
        with precision_manager.working(prec):
            try:
                if entry.closed_form is not None:
                    digits = int(prec * 0.30103) + 10
                    exact = sympy.sympify(entry.closed_form)
                    return mpmath.mpmathify(str(sympy.N(exact, digits)).replace("*I", "j"))
                return mpmath.mpmathify(entry.value)
            except (sympy.SympifyError, TypeError, ValueError) as e:
                raise GoldenDataError(f"golden entry '{file}:{name}' is not a number: {e}") from e

    def tolerance(self, file: str, name: str):
        try:
            return mpmath.mpf(self.entry(file, name).tolerance)
        except ValueError as e:
            raise GoldenDataError(f"golden entry '{file}:{name}' has a malformed tolerance") from e

    def save(self, name: str, golden: GoldenFile) -> Path:
        path = self.directory / f"{name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(golden.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Golden file written: {path}")
        return path


# Global repository instance
golden_repository = GoldenRepository()
