"""Tests for partial and total Hecke L-values."""

import mpmath
import pytest

from src.core.exceptions import NotCoprime, OutsideConvergenceRegion, TrivialModulus
from src.core.precision import BigComplex, precision_manager
from src.repositories.golden_repository import golden_repository
from src.services.eklattice import ek_smoothed
from src.services.hecke import char_eval, enumerate_characters, make_character
from src.services.lvalues import (
    L_value,
    class_lattice,
    class_representatives,
    dirichlet_L,
    partial_L,
    smoothed_partial_difference,
)
from src.services.quadarith import parse_ideal, unit_ideal, units_mod


class TestPartialValues:
    def test_class_representatives(self, qi, f8):
        assert len(class_representatives(make_character(qi, f8, 4, 0))) == 1
        reps = class_representatives(make_character(qi, parse_ideal(qi, "(3)"), 4, 0))
        assert len(reps) == 2
        assert reps[0][1] == unit_ideal(qi)

    def test_trivial_modulus(self, qi, prec):
        chi = make_character(qi, unit_ideal(qi), 4, 0, allow_trivial_modulus=True)
        with pytest.raises(TrivialModulus):
            partial_L(chi, unit_ideal(qi), 0, prec)

    def test_class_must_be_coprime(self, qi, prec):
        chi = make_character(qi, parse_ideal(qi, "(3)"), 4, 0)
        with pytest.raises(NotCoprime):
            partial_L(chi, parse_ideal(qi, "(3)"), 0, prec)

    def test_golden_value(self, qi, f8, prec):
        report = L_value(make_character(qi, f8, 4, 0), 0, prec)
        golden = golden_repository.value("verify", "lvalue_qi_f8_4_0", prec)
        with precision_manager.working(prec):
            total = mpmath.mpmathify(report.total)
            assert abs(total - golden) / abs(golden) < golden_repository.tolerance("verify", "lvalue_qi_f8_4_0")
        assert report.method == "eseries"
        assert list(report.partials) == ["()"]


class TestDirichletRoute:
    def test_outside_convergence(self, qi, f8, prec):
        with pytest.raises(OutsideConvergenceRegion):
            dirichlet_L(make_character(qi, f8, 4, 0), -2, 100, prec)

    @pytest.mark.parametrize("modulus", ["(1+i)^3", "(3)"])
    def test_agrees_with_lattice_sums(self, qi, prec, modulus):
        for chi in enumerate_characters(qi, parse_ideal(qi, modulus), (4, 0)):
            direct, tail, terms = dirichlet_L(chi, 3, 2000, prec)
            total = BigComplex(0, prec)
            for _, rep in class_representatives(chi):
                total = total + partial_L(chi, rep, 3, prec)
            assert terms > 0
            with precision_manager.working(prec):
                assert abs(total.value - direct.value) <= tail + mpmath.mpf(10) ** -30

    def test_report(self, qi, f8, prec):
        report = L_value(make_character(qi, f8, 4, 0), 3, prec, method="dirichlet", nmax=500)
        assert report.method == "dirichlet"
        assert report.terms is not None and report.terms > 0


class TestSmoothedPartials:
    def test_class_sum_shape(self, qi, prec):
        c = parse_ideal(qi, "(1+i)")
        for chi in enumerate_characters(qi, parse_ideal(qi, "(3)"), (4, 0)):
            gamma = len(units_mod(qi, chi.modulus))
            for _, b in class_representatives(chi):
                lhs = smoothed_partial_difference(chi, b, c, prec)
                rhs = char_eval(chi, b, prec) * ek_smoothed(chi.b, chi.a, 1, c, class_lattice(chi, b, prec), prec,
                                                            gamma)
                with precision_manager.working(prec):
                    assert abs(lhs.value - rhs.value) <= mpmath.ldexp(abs(lhs.value), -prec + 12)
