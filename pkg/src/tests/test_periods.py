"""Tests for lattice invariants and CM periods."""

import mpmath
import pytest

from src.core.exceptions import ClassNumberTooLarge, NonIntegralJ
from src.core.precision import precision_manager
from src.repositories.golden_repository import golden_repository
from src.services.eklattice import lattice_from_ideal
from src.services.periods import (
    cm_period,
    dual_period,
    eisenstein_sum,
    lattice_invariants,
    real_period_integral,
)
from src.services.quadarith import ImagQuadField, unit_ideal


def rel(x, y):
    with precision_manager.working(200):
        x = getattr(x, "value", x)
        y = getattr(y, "value", y)
        return abs(x - y) / max(abs(x), abs(y), 1)


class TestInvariants:
    def test_g2_of_gaussian_integers(self, qi, prec):
        inv = lattice_invariants(lattice_from_ideal(unit_ideal(qi), prec), prec)
        golden = golden_repository.value("eklattice", "g2_zi", prec)
        assert rel(inv.g2, golden) < mpmath.mpf(10) ** -40
        assert abs(inv.g3.value) < mpmath.mpf(10) ** -40

    def test_q_series_against_direct_sum(self, qi, prec):
        lattice = lattice_from_ideal(unit_ideal(qi), prec)
        g4, tail = eisenstein_sum(lattice, 4, 60, prec)
        inv = lattice_invariants(lattice, prec)
        with precision_manager.working(prec):
            assert abs(60 * g4.value - inv.g2.value) <= 60 * tail

    def test_homogeneity(self, prec):
        lattice = lattice_from_ideal(unit_ideal(ImagQuadField(7)), prec)
        with precision_manager.working(prec):
            mu = mpmath.mpc("0.8", "-1.1")
        base = lattice_invariants(lattice, prec)
        scaled = lattice_invariants(lattice.scaled(mu), prec)
        with precision_manager.working(prec):
            assert rel(scaled.g2.value, base.g2.value / mu ** 4) < mpmath.mpf(10) ** -40
            assert rel(scaled.g3.value, base.g3.value / mu ** 6) < mpmath.mpf(10) ** -40
            assert rel(scaled.j.value, base.j.value) < mpmath.mpf(10) ** -40


class TestCMPeriod:
    @pytest.mark.parametrize("d", [1, 2, 3, 7, 11, 19, 43, 67, 163])
    def test_j_invariants(self, d, prec):
        golden = golden_repository.value("periods", f"j_{d}", prec)
        assert cm_period(ImagQuadField(d), prec).j == int(golden.real)

    @pytest.mark.parametrize("d,branch", [(1, "j1728"), (3, "j0"), (7, "generic"), (163, "generic")])
    def test_branches_give_rational_models(self, d, branch, prec):
        period = cm_period(ImagQuadField(d), prec)
        assert period.normalization == branch
        rescaled = lattice_invariants(period.lattice, prec)
        g2, g3 = period.model
        with precision_manager.working(prec):
            assert abs(rescaled.g2.value - mpmath.mpf(g2.numerator) / g2.denominator) < mpmath.mpf(10) ** -30
            assert abs(rescaled.g3.value - mpmath.mpf(g3.numerator) / g3.denominator) < mpmath.mpf(10) ** -30

    def test_lemniscate_period(self, qi, prec):
        period = cm_period(qi, prec)
        golden = golden_repository.value("periods", "omega_qi", prec)
        assert rel(period.omega, golden) < golden_repository.tolerance("periods", "omega_qi")
        assert rel(real_period_integral(4, 0, prec), golden) < golden_repository.tolerance("periods", "omega_qi")

    def test_dual_period_pairing(self, qi, prec):
        period = cm_period(qi, prec)
        dual = dual_period(period)
        with precision_manager.working(prec):
            pairing = dual.value * mpmath.conj(period.omega.value) / (2j * mpmath.pi)
            assert rel(pairing, period.lattice.covolume / mpmath.pi) < mpmath.mpf(10) ** -40

    def test_class_number_limits(self, prec):
        with pytest.raises(NonIntegralJ):
            cm_period(ImagQuadField(5), prec)
        with pytest.raises(ClassNumberTooLarge):
            cm_period(ImagQuadField(14), prec)
