"""Tests for spec-string parsing, run configuration and the galois command."""

from argparse import Namespace

import mpmath
import pytest
from pydantic import ValidationError

from src.cli.commands import cmd_galois, format_type
from src.cli.specs import RunConfig, parse_character, parse_cm_type, parse_lattice, parse_type
from src.core.exceptions import SpecParseError
from src.core.precision import precision_manager
from src.services import galois

SPEC = "hecke field=Q(i) f=(1+i)^3 a=4 b=0"


def galois_args(command, **kwargs):
    defaults = {"setting": "zeta5", "field": None, "type": None, "tau": None, "eta": "1", "mu": None}
    defaults.update(kwargs)
    return Namespace(galois_command=command, **defaults)


class TestCharacterSpecs:
    def test_round_trip(self):
        chi = parse_character(SPEC)
        again = parse_character(chi.spec_string())
        assert again.spec_string() == chi.spec_string()
        assert (again.a, again.b) == (4, 0)

    @pytest.mark.parametrize("text,column", [
        ("field=Q(i) f=(1+i)^3 a=4 b=0", 1),
        (SPEC + " foo=1", 36),
        ("hecke field=Q(i) f=(1+i)^3 a=4 a=5 b=0", 32),
        ("hecke field=Q(i) f=(1+i)^3 a=x b=0", 30),
        ("hecke field=R f=(1+i)^3 a=4 b=0", 13),
    ])
    def test_errors_carry_columns(self, text, column):
        with pytest.raises(SpecParseError) as info:
            parse_character(text)
        assert info.value.column == column
        assert info.value.line == 1

    def test_missing_key(self):
        with pytest.raises(SpecParseError, match="missing 'b='"):
            parse_character("hecke field=Q(i) f=(1+i)^3 a=4")


class TestTypeSpecs:
    def test_infinity_type(self):
        c2 = galois.setting_c2()
        mu = parse_type(c2, None, "2c-3")
        assert mu.as_dict() == {0: -3, 1: 2}
        assert format_type(c2, mu) == "-3+2*c"
        assert parse_type(c2, None, format_type(c2, mu)) == mu

    def test_malformed_type(self, zeta5):
        with pytest.raises(SpecParseError):
            parse_type(zeta5, None, "")
        with pytest.raises(SpecParseError) as info:
            parse_type(zeta5, None, "e1+2*e9")
        assert info.value.column == 6

    def test_cm_type(self, zeta5):
        phi = parse_cm_type(zeta5, None, "e1,e2")
        assert phi.members == frozenset({zeta5.element("e1"), zeta5.element("e2")})
        with pytest.raises(SpecParseError) as info:
            parse_cm_type(zeta5, None, "e1,x")
        assert info.value.column == 4


class TestLatticeSpecs:
    def test_gaussian_integers(self, prec):
        lattice, field = parse_lattice("Z[i]", None, prec)
        assert field.d == 1
        with precision_manager.working(prec):
            assert abs(lattice.covolume - 1) < mpmath.mpf(10) ** -40

    def test_explicit_basis(self, prec):
        lattice, field = parse_lattice("basis:1,0.5+2i", None, prec)
        assert field is None
        with precision_manager.working(prec):
            assert abs(lattice.w2.value - mpmath.mpc(0.5, 2)) < mpmath.mpf(10) ** -40

    def test_malformed_basis(self, prec):
        with pytest.raises(SpecParseError):
            parse_lattice("basis:1", None, prec)


class TestRunConfig:
    def test_defaults(self):
        assert RunConfig().precision == 192

    @pytest.mark.parametrize("kwargs", [
        {"precision": 16},
        {"precision": 10 ** 6},
        {"field": "R"},
        {"character": "field=Q(i) f=(2) a=1 b=0"},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            RunConfig(**kwargs)


class TestGaloisCommand:
    def test_reflex(self):
        report = cmd_galois(galois_args("reflex", type="e1,e2"))
        assert report.data["reflex_type"] == ["e1", "e3"]
        assert report.data["reflex_field"] == "Q(zeta5)"

    def test_sign(self):
        report = cmd_galois(galois_args("sign", type="e1,e2", tau="s"))
        assert report.data["sign"] == -1

    def test_critical(self):
        report = cmd_galois(galois_args("critical", setting="C2", mu="2c-3"))
        data = report.data
        assert data["critical"] is True
        assert (data["alpha"], data["beta"], data["weight"], data["xi"]) == ("3", "2*c", -1, "5")

    def test_demo(self):
        report = cmd_galois(galois_args("demo", setting="C2"))
        assert report.data["order"] == 2
        assert report.data["fields"]["K"]["cm"] is True
