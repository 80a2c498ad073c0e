"""Tests for Hecke characters of imaginary quadratic fields."""

import mpmath
import pytest

from src.core.exceptions import NotHeckeCharacterType, TrivialModulus
from src.core.precision import precision_manager
from src.services.hecke import (
    char_eval,
    char_value,
    enumerate_characters,
    infinity_part,
    make_character,
    norm_twist,
    unit_compatible,
)
from src.services.lvalues import dirichlet_L
from src.services.quadarith import ideal_mul, parse_element, parse_ideal, principal, unit_ideal


def close(x, y, bits=150):
    with precision_manager.working(200):
        return abs(x.value - y.value) <= mpmath.ldexp(max(abs(x.value), abs(y.value), 1), -bits)


class TestEnumeration:
    def test_unit_obstruction(self, qi):
        assert not unit_compatible(qi, parse_ideal(qi, "(1+i)"), 1, 0)
        assert enumerate_characters(qi, parse_ideal(qi, "(1+i)"), (1, 0)) == []

    def test_counts(self, qi, q3, f8):
        assert len(enumerate_characters(qi, parse_ideal(qi, "(3)"), (4, 0))) == 2
        assert len(enumerate_characters(qi, f8, (1, 0))) == 1
        assert len(enumerate_characters(q3, parse_ideal(q3, "(sqrt-3)"), (6, 0))) == 1

    def test_trivial_modulus_rejected(self, qi):
        with pytest.raises(TrivialModulus):
            enumerate_characters(qi, unit_ideal(qi), (4, 0))

    def test_make_character_errors(self, qi, f8):
        with pytest.raises(NotHeckeCharacterType):
            make_character(qi, parse_ideal(qi, "(1+i)"), 1, 0)
        with pytest.raises(NotHeckeCharacterType):
            make_character(qi, f8, 4, 0, twist=1)

    def test_spec_string(self, qi, f8):
        chi = make_character(qi, f8, 4, 0)
        assert chi.spec_string() == "hecke field=Q(i) f=2*[2,1+w] a=4 b=0 twist=0"
        assert chi.weight == -4


class TestValues:
    @pytest.mark.parametrize("a,b", [(1, 0), (4, 0), (3, 1)])
    def test_principal_ideals_follow_the_infinity_type(self, qi, f8, prec, a, b):
        chi = make_character(qi, f8, a, b)
        alpha = parse_element(qi, "3+2*i")
        value = char_eval(chi, principal(qi, alpha), prec)
        with precision_manager.working(prec):
            expected = mpmath.conj(alpha.to_complex()) ** b / alpha.to_complex() ** a
            assert abs(value.value - expected) <= mpmath.ldexp(abs(expected), -prec + 10)

    def test_bookkeeping(self, qi, f8, prec):
        chi = make_character(qi, f8, 3, 1)
        result = char_value(chi, parse_ideal(qi, "(2+i)"), prec)
        assert result.infinity == infinity_part(result.alpha, 3, 1)

    def test_multiplicative(self, qi, prec):
        P, Q = parse_ideal(qi, "(2+i)"), parse_ideal(qi, "(3+2*i)")
        for chi in enumerate_characters(qi, parse_ideal(qi, "(3)"), (4, 0)):
            product = char_eval(chi, P, prec) * char_eval(chi, Q, prec)
            assert close(char_eval(chi, ideal_mul(P, Q), prec), product)

    def test_twists_differ(self, qi, prec):
        chis = enumerate_characters(qi, parse_ideal(qi, "(3)"), (4, 0))
        P = parse_ideal(qi, "(2+i)")
        assert not close(char_eval(chis[0], P, prec), char_eval(chis[1], P, prec))

    def test_norm_twist_shifts_the_dirichlet_series(self, qi, f8, prec):
        chi = make_character(qi, f8, 4, 0)
        twisted = norm_twist(chi, 1)
        assert (twisted.a, twisted.b) == (3, 1)
        plain, _, n1 = dirichlet_L(chi, 3, 200, prec)
        shifted, _, n2 = dirichlet_L(twisted, 4, 200, prec)
        assert n1 == n2
        assert close(plain, shifted, bits=120)
