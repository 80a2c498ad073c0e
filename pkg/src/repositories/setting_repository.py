"""Built-in Galois settings and the plain-text setting file format.

A setting file reads::

    # comment
    order=4 conj=2
    0 1 2 3
    1 2 3 0
    2 3 0 1
    3 0 1 2
    names 1 s s2 s3
    labels e1 e2 e4 e3
    field Q(sqrt5) = 0,2
    field Q = 0,1,2,3

``names`` and ``labels`` are optional. Blank lines and ``#`` comments are skipped.
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple

from src.core.exceptions import CMPeriodsError, SpecParseError
from src.services.galois import BUILTIN_SETTINGS, CMSetting, make_setting

logger = logging.getLogger(__name__)

PROJECT_SETTINGS = Path(__file__).resolve().parents[2] / "settings"

_HEADER = re.compile(r"order\s*=\s*(\d+)\s+conj\s*=\s*(\d+)\s*$")
_FIELD = re.compile(r"field\s+(\S+)\s*=\s*(.*)$")


class SettingRepository:
    """Loads settings by built-in name or from a setting file."""

    def names(self) -> List[str]:
        return sorted(BUILTIN_SETTINGS)

    def get(self, name_or_path: str) -> CMSetting:
        """
        Resolve a built-in name first, then a file path.

        Raises:
            SpecParseError: If neither a built-in name nor a readable file
        """
        if name_or_path in BUILTIN_SETTINGS:
            return BUILTIN_SETTINGS[name_or_path]()
        path = Path(name_or_path)
        if not path.is_file():
            raise SpecParseError(
                f"unknown setting '{name_or_path}' (built-ins: {', '.join(self.names())})", 1, 1, name_or_path
            )
        return self.load(path)

    def load(self, path: Path) -> CMSetting:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise SpecParseError(f"cannot read setting file {path}: {e}", 1, 1) from e
        logger.info(f"Loading setting file {path}")
        return self.parse(text, name=path.stem)

    def parse(self, text: str, name: str = "custom") -> CMSetting:
        """
        Parse the setting file format.

        Raises:
            SpecParseError: With the line and column of the first malformed token
            NotAGroup, ConjNotInvolution, SubgroupNotClosed: From validation
        """
        lines = [
            (number, raw.split("#", 1)[0].rstrip())
            for number, raw in enumerate(text.splitlines(), start=1)
        ]
        lines = [(number, line) for number, line in lines if line.strip()]
        if not lines:
            raise SpecParseError("empty setting file", 1, 1, text)

        number, header = lines[0]
        match = _HEADER.match(header.strip())
        if not match:
            raise SpecParseError("expected 'order=<n> conj=<i>'", number, _indent(header) + 1, header)
        order, conj = int(match.group(1)), int(match.group(2))
        if len(lines) < order + 1:
            raise SpecParseError(f"expected {order} table rows", lines[-1][0] + 1, 1, text)

        table = [self._table_row(number, line, order) for number, line in lines[1:order + 1]]
        subgroups: Dict[str, List[int]] = {}
        element_names: List[str] = []
        labels: List[str] = []
        for number, line in lines[order + 1:]:
            stripped = line.strip()
            col = _indent(line) + 1
            if stripped.startswith("field"):
                fname, members = self._field_line(number, line)
                subgroups[fname] = members
            elif stripped.startswith("names "):
                element_names = stripped.split()[1:]
            elif stripped.startswith("labels "):
                labels = stripped.split()[1:]
            else:
                raise SpecParseError(f"unexpected line '{stripped}'", number, col, line)

        try:
            return make_setting(table, conj, subgroups, name=name,
                                element_names=element_names or None,
                                embedding_labels=labels or None)
        except CMPeriodsError:
            logger.warning(f"Setting '{name}' failed validation")
            raise

    @staticmethod
    def _table_row(number: int, line: str, order: int) -> List[int]:
        row = []
        for token in re.finditer(r"\S+", line):
            if not token.group().isdigit():
                raise SpecParseError(f"'{token.group()}' is not an element index", number, token.start() + 1, line)
            row.append(int(token.group()))
        if len(row) != order:
            raise SpecParseError(f"table row has {len(row)} entries, expected {order}", number, 1, line)
        return row

    @staticmethod
    def _field_line(number: int, line: str) -> Tuple[str, List[int]]:
        start = _indent(line)
        match = _FIELD.match(line.strip())
        if not match:
            raise SpecParseError("expected 'field <name> = <i1>,<i2>,...'", number, start + 1, line)
        members = []
        offset = start + match.start(2)
        for token in re.finditer(r"[^,\s]+", match.group(2)):
            if not token.group().isdigit():
                raise SpecParseError(
                    f"'{token.group()}' is not an element index", number, offset + token.start() + 1, line
                )
            members.append(int(token.group()))
        return match.group(1), members


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip())


# Global repository instance
setting_repository = SettingRepository()
