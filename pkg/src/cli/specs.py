"""Parsing of the command-line spec strings and the per-run configuration."""

import re
from typing import Optional, Tuple

import mpmath
from pydantic import BaseModel, Field, field_validator

from src.config.settings import settings
from src.core.exceptions import CMPeriodsError, SpecParseError
from src.core.precision import BigComplex, precision_manager
from src.services.eklattice import Lattice2, lattice_from_ideal
from src.services.galois import CMSetting, CMType, Embedding, InfinityType, coset_rep
from src.services.hecke import HeckeChar, make_character
from src.services.quadarith import ImagQuadField, QuadElem, parse_element, parse_ideal, unit_ideal

_CHAR_PREFIX = re.compile(r"\s*hecke\b")
_KEY_VALUE = re.compile(r"(\w+)=(\S+)")
_CHAR_KEYS = ("field", "f", "a", "b", "twist")
_MU_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z][\w]*)?\s*")


def _shift(e: SpecParseError, offset: int, text: str) -> SpecParseError:
    return SpecParseError(e.message.rsplit(" (line", 1)[0], 1, e.column + offset, text)


def parse_character(text: str) -> HeckeChar:
    """
    Parse ``hecke field=<F> f=<ideal-expr> a=<int> b=<int> [twist=<int>]``.

    Raises:
        SpecParseError: With the column of the offending token
        NotHeckeCharacterType: If no such character exists
    """
    m = _CHAR_PREFIX.match(text)
    if not m:
        raise SpecParseError("character spec must start with 'hecke'", 1, 1, text)
    values = {}
    pos = m.end()
    for item in _KEY_VALUE.finditer(text, pos):
        gap = text[pos:item.start()]
        if gap.strip():
            raise SpecParseError(f"unexpected '{gap.strip()}'", 1, pos + len(gap) - len(gap.lstrip()) + 1, text)
        key = item.group(1)
        if key not in _CHAR_KEYS:
            raise SpecParseError(f"unknown key '{key}'", 1, item.start() + 1, text)
        if key in values:
            raise SpecParseError(f"duplicate key '{key}'", 1, item.start() + 1, text)
        values[key] = (item.group(2), item.start(2))
        pos = item.end()
    if text[pos:].strip():
        raise SpecParseError(f"unexpected '{text[pos:].strip()}'", 1, pos + 1 + len(text[pos:]) - len(text[pos:].lstrip()), text)
    for key in ("field", "f", "a", "b"):
        if key not in values:
            raise SpecParseError(f"missing '{key}='", 1, len(text) + 1, text)

    field_text, field_pos = values["field"]
    try:
        field = ImagQuadField.from_name(field_text)
    except SpecParseError as e:
        raise SpecParseError(e.message.rsplit(" (line", 1)[0], 1, field_pos + 1, text) from e
    ideal_text, ideal_pos = values["f"]
    try:
        modulus = parse_ideal(field, ideal_text)
    except SpecParseError as e:
        raise _shift(e, ideal_pos, text) from e

    ints = {}
    for key in ("a", "b", "twist"):
        if key not in values:
            continue
        raw, at = values[key]
        if not re.fullmatch(r"-?\d+", raw):
            raise SpecParseError(f"'{key}' must be an integer", 1, at + 1, text)
        ints[key] = int(raw)
    return make_character(field, modulus, ints["a"], ints["b"], ints.get("twist", 0))


def format_character(chi: HeckeChar) -> str:
    return chi.spec_string()


def parse_type(setting: CMSetting, field_ref: Optional[str], text: str) -> InfinityType:
    """
    Parse an infinity type such as ``2c-3`` or ``e1+2*e2``.

    Names are group elements or top-field labels; a bare integer sits on
    the identity embedding.
    """
    fld = setting.field(field_ref) if field_ref else setting.top
    coeffs = {}
    pos = 0
    stripped = text.strip()
    if not stripped:
        raise SpecParseError("empty infinity type", 1, 1, text)
    while pos < len(text) and text[pos:].strip():
        m = _MU_TERM.match(text, pos)
        sign, count, name = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (count is None and name is None) or (pos > 0 and sign is None):
            raise SpecParseError("malformed term", 1, pos + 1, text)
        value = int(count) if count else 1
        if sign == "-":
            value = -value
        try:
            g = setting.element(name) if name else setting.group.identity
        except CMPeriodsError as e:
            raise SpecParseError(f"unknown element '{name}'", 1, m.start(3) + 1, text) from e
        rep = coset_rep(setting, fld, g)
        coeffs[rep] = coeffs.get(rep, 0) + value
        pos = m.end()
    return InfinityType.from_mapping(fld, coeffs)


def parse_cm_type(setting: CMSetting, field_ref: Optional[str], text: str) -> CMType:
    """A comma-separated list of embeddings, e.g. ``e1,e2``."""
    fld = setting.field(field_ref) if field_ref else setting.top
    members = set()
    pos = 0
    for token in text.split(","):
        name = token.strip()
        try:
            members.add(coset_rep(setting, fld, setting.element(name)))
        except CMPeriodsError as e:
            raise SpecParseError(f"unknown embedding '{name}'", 1, pos + 1, text) from e
        pos += len(token) + 1
    return CMType(fld, frozenset(members))


def parse_embedding(setting: CMSetting, fld, text: str) -> Embedding:
    try:
        return Embedding(coset_rep(setting, fld, setting.element(text)), fld)
    except CMPeriodsError as e:
        raise SpecParseError(f"unknown embedding '{text}'", 1, 1, text) from e


def parse_lattice(text: str, field_name: Optional[str], prec: int) -> Tuple[Lattice2, Optional[ImagQuadField]]:
    """
    ``Z[i]``, ``O`` (the maximal order of --field), an ideal expression of
    --field, or ``basis:<w1>,<w2>`` with complex literals.
    """
    text = text.strip()
    if text.startswith("basis:"):
        parts = text[len("basis:"):].split(",")
        if len(parts) != 2:
            raise SpecParseError("expected 'basis:<w1>,<w2>'", 1, 7, text)
        with precision_manager.working(prec):
            try:
                w1, w2 = (mpmath.mpmathify(p.strip().replace("i", "j")) for p in parts)
            except (ValueError, TypeError) as e:
                raise SpecParseError(f"bad complex literal: {e}", 1, 7, text) from e
        return Lattice2(BigComplex(w1, prec), BigComplex(w2, prec)), None
    if text == "Z[i]":
        field = ImagQuadField(1)
        return lattice_from_ideal(unit_ideal(field), prec), field
    field = ImagQuadField.from_name(field_name or "Q(i)")
    ideal = unit_ideal(field) if text in ("O", "O_K") else parse_ideal(field, text)
    return lattice_from_ideal(ideal, prec), field


def parse_translate(text: str, field: Optional[ImagQuadField], prec: int) -> Tuple[object, Optional[QuadElem]]:
    """A field element when the lattice comes from a field, else a complex literal."""
    if field is not None:
        elem = parse_element(field, text)
        with precision_manager.working(prec):
            return elem.to_complex(), elem
    with precision_manager.working(prec):
        try:
            return mpmath.mpmathify(text.replace("i", "j")), None
        except (ValueError, TypeError) as e:
            raise SpecParseError(f"bad complex literal: {e}", 1, 1, text) from e


def parse_complex(text: str, prec: int):
    """Integers stay exact; anything else becomes an mpmath number."""
    if re.fullmatch(r"\s*-?\d+\s*", text):
        return int(text)
    with precision_manager.working(prec):
        try:
            return mpmath.mpmathify(text.replace("i", "j"))
        except (ValueError, TypeError) as e:
            raise SpecParseError(f"bad number '{text}'", 1, 1, text) from e


class RunConfig(BaseModel):
    """Per-invocation configuration assembled from the command line."""
    precision: int = Field(default_factory=lambda: settings.precision.default_bits, description="Bits")
    field: Optional[str] = Field(None, description="Field name such as Q(i)")
    character: Optional[str] = Field(None, description="Character spec string")
    setting: Optional[str] = Field(None, description="Built-in setting name or setting file")
    output: Optional[str] = Field(None, description="Path of the JSON report")

    @field_validator("precision")
    @classmethod
    def _precision_in_range(cls, v: int) -> int:
        lo, hi = settings.precision.min_bits, settings.precision.max_bits
        if not lo <= v <= hi:
            raise ValueError(f"precision must lie in [{lo}, {hi}]")
        return v

    @field_validator("field")
    @classmethod
    def _field_parses(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            try:
                ImagQuadField.from_name(v)
            except SpecParseError as e:
                raise ValueError(e.message) from e
        return v

    @field_validator("character")
    @classmethod
    def _character_prefix(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not _CHAR_PREFIX.match(v):
            raise ValueError("character spec must start with 'hecke'")
        return v
