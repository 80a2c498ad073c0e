"""Tests for Eisenstein-Kronecker lattice sums and their continuation."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings as hypothesis_settings, strategies as st

from src.core.exceptions import OutsideConvergenceRegion, TranslateNotTorsion
from src.core.precision import BigComplex, precision_manager
from src.repositories.golden_repository import golden_repository
from src.services.eklattice import (
    EKParams,
    distribution_sum,
    ek,
    ek_direct,
    ek_orbit_sum,
    ek_smoothed,
    lattice_from_ideal,
    lattice_points,
    reduce_basis,
    torsion_translates,
)
from src.services.quadarith import ImagQuadField, parse_ideal, unit_ideal, units_mod


@pytest.fixture
def zi(qi, prec):
    return lattice_from_ideal(unit_ideal(qi), prec)


@pytest.fixture
def l8(f8, prec):
    return lattice_from_ideal(f8, prec)


def rel(x, y):
    with precision_manager.working(200):
        x = getattr(x, "value", x)
        y = getattr(y, "value", y)
        return abs(x - y) / max(abs(x), abs(y), 1)


class TestParams:
    def test_exponent_ranges(self):
        with pytest.raises(OutsideConvergenceRegion):
            EKParams(0, 0)
        with pytest.raises(OutsideConvergenceRegion):
            EKParams(-1, 4)

    def test_direct_sum_region(self, zi, prec):
        with pytest.raises(OutsideConvergenceRegion):
            ek_direct(EKParams(0, 2, 0, 0), zi, 20, prec)

    def test_continuation_region(self, zi, prec):
        with pytest.raises(OutsideConvergenceRegion):
            ek(EKParams(0, 1, 0, -2), zi, prec)

    def test_translate_must_be_torsion(self, qi, f8, l8, prec):
        params = EKParams(0, 4, mpmath.mpf(1) / 3, 0, 1, t_exact=qi.elem(Fraction(1, 3)), modulus=f8)
        with pytest.raises(TranslateNotTorsion):
            ek(params, l8, prec)


class TestLattice:
    def test_points_sorted_without_zero(self, zi, prec):
        with precision_manager.working(prec):
            u, v = reduce_basis(zi.w1.value, zi.w2.value)
            points = lattice_points(u, v, 0, mpmath.mpf(2))
            norms = [abs(z) ** 2 for z in points]
        # 4 of norm 1, 4 of norm 2, 4 of norm 4
        assert len(points) == 12
        assert norms == sorted(norms)

    def test_scaled_lattice_keeps_covolume_ratio(self, zi):
        with precision_manager.working(192):
            mu = mpmath.mpc(2, 1)
            assert rel(zi.scaled(mu).covolume, zi.covolume * abs(mu) ** 2) < mpmath.mpf(10) ** -40

    def test_scaling_keeps_working_precision(self, zi, prec):
        with precision_manager.working(prec):
            mu = mpmath.sqrt(2) + 1j
            expected = (zi.w1.value * mu, zi.w2.value * mu)
        # called at mpmath's default precision
        scaled = zi.scaled(BigComplex(mu, prec))
        raw = zi.scaled(mu)
        with precision_manager.working(prec):
            for lattice in (scaled, raw):
                assert {lattice.w1.prec, lattice.w2.prec} == {prec}
                got = sorted((lattice.w1.value, lattice.w2.value), key=lambda z: abs(z - expected[0]))
                assert abs(got[0] - expected[0]) < mpmath.mpf(10) ** -50
                assert abs(got[1] - expected[1]) < mpmath.mpf(10) ** -50
            assert rel(scaled.covolume, zi.covolume * abs(mu) ** 2) < mpmath.mpf(10) ** -50
            assert rel(scaled.provenance.scale, mu) < mpmath.mpf(10) ** -50

    def test_conjugate_lattice(self, l8, prec):
        conj = l8.conjugate()
        assert conj.covolume > 0
        with precision_manager.working(prec):
            assert rel(conj.covolume, l8.covolume) < mpmath.mpf(10) ** -50

    def test_torsion_translates(self, qi, l8):
        assert len(torsion_translates(parse_ideal(qi, "(1+i)"), l8)) == 2
        assert len(torsion_translates(parse_ideal(qi, "(3)"), l8)) == 9


class TestDirectSum:
    def test_golden_value(self, zi, prec):
        value, tail = ek_direct(EKParams(0, 4, 0, 0, 4), zi, 60, prec)
        golden = golden_repository.value("eklattice", "ek_zi_0_4_gamma4_s0", prec)
        with precision_manager.working(prec):
            assert abs(value.value - golden) <= tail

    @pytest.mark.parametrize("b,a", [(0, 4), (1, 4), (0, 5)])
    @pytest.mark.parametrize("s", [3, 4])
    def test_agrees_with_continuation_within_tail(self, l8, prec, b, a, s):
        params = EKParams(b, a, 1, s, 1)
        direct, tail = ek_direct(params, l8, 40, prec)
        continued = ek(params, l8, prec)
        with precision_manager.working(prec):
            assert abs(direct.value - continued.value) <= tail + mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("b,a", [(0, 4), (1, 4), (0, 5)])
    def test_agrees_with_continuation_to_fixed_tolerance(self, l8, prec, b, a):
        # s = 9 puts the tail bound at radius 40 below 1e-29
        params = EKParams(b, a, 1, 9, 1)
        near, near_tail = ek_direct(params, l8, 40, prec)
        far, _ = ek_direct(params, l8, 60, prec)
        continued = ek(params, l8, prec)
        with precision_manager.working(prec):
            assert near_tail < mpmath.mpf(10) ** -25
            assert abs(near.value - far.value) < mpmath.mpf(10) ** -25
        assert rel(near, continued) < mpmath.mpf(10) ** -25
        assert rel(far, continued) < mpmath.mpf(10) ** -25

    @pytest.mark.slow
    def test_fixed_tolerance_at_s4(self, zi, prec):
        params = EKParams(0, 4, 0, 4, 4)
        direct, tail = ek_direct(params, zi, 400, prec)
        continued = ek(params, zi, prec)
        with precision_manager.working(prec):
            assert tail < mpmath.mpf(10) ** -25
        assert rel(direct, continued) < mpmath.mpf(10) ** -25

    def test_orbit_representatives(self, zi, prec):
        params = EKParams(0, 4, 0, 3, 4)
        direct, _ = ek_direct(params, zi, 12, prec)
        orbits = ek_orbit_sum(params, zi, 12, [1, 1j, -1, -1j], prec)
        assert rel(direct, orbits) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("a,s", [(3, 2), (6, 0), (6, 1)])
    def test_orbit_representatives_with_translate(self, q3, prec, a, s):
        f = parse_ideal(q3, "(sqrt-3)")
        units = units_mod(q3, f).units
        assert len(units) == 3
        lattice = lattice_from_ideal(unit_ideal(q3), prec)
        t = q3.sqrt_neg() ** -1
        with precision_manager.working(prec):
            t_value = t.to_complex()
            unit_values = [u.to_complex() for u in units]
        params = EKParams(0, a, t_value, s, 3, t_exact=t, modulus=f)
        # radius^2 avoids (1/3)Z, so no orbit straddles the boundary
        direct, _ = ek_direct(params, lattice, 12.1, prec)
        orbits = ek_orbit_sum(params, lattice, 12.1, unit_values, prec)
        assert rel(direct, orbits) < mpmath.mpf(10) ** -40


class TestContinuation:
    def test_golden_value(self, zi, prec):
        value = ek(EKParams(0, 4, 0, 0, 4), zi, prec)
        golden = golden_repository.value("eklattice", "ek_zi_0_4_gamma4_s0", prec)
        assert rel(value, golden) < golden_repository.tolerance("eklattice", "ek_zi_0_4_gamma4_s0")

    @pytest.mark.parametrize("b,a", [(1, 4), (0, 5)])
    def test_symmetric_types_vanish(self, zi, prec, b, a):
        value = ek(EKParams(b, a, 0, 3, 4), zi, prec)
        assert abs(value.value) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("b,a", [(0, 4), (1, 3), (2, 3)])
    def test_split_point_independence(self, l8, prec, b, a):
        params = EKParams(b, a, 1, 0, 1)
        assert rel(ek(params, l8, prec, 1.0), ek(params, l8, prec, 1.37)) < mpmath.ldexp(1, -prec + 10)

    def test_scaling(self, l8, prec):
        with precision_manager.working(prec):
            mu = mpmath.mpc("1.3", "0.4")
        base = ek(EKParams(1, 3, 1, 0, 1), l8, prec)
        scaled = ek(EKParams(1, 3, mu, 0, 1), l8.scaled(mu), prec)
        with precision_manager.working(prec):
            expected = base.value * mpmath.conj(mu) / mu ** 3
        assert rel(scaled, expected) < mpmath.mpf(10) ** -40

    @hypothesis_settings(max_examples=20, deadline=None)
    @given(x=st.floats(-2, 2), y=st.floats(-2, 2), s=st.sampled_from([0, 1]))
    def test_scaling_over_multipliers(self, x, y, s):
        assume(x * x + y * y >= 0.25)
        prec = 192
        lattice = lattice_from_ideal(parse_ideal(ImagQuadField(1), "(1+i)^3"), prec)
        with precision_manager.working(prec):
            mu = mpmath.mpc(x, y)
        base = ek(EKParams(1, 3, 1, s, 1), lattice, prec)
        scaled = ek(EKParams(1, 3, mu, s, 1), lattice.scaled(mu), prec)
        with precision_manager.working(prec):
            expected = base.value * mpmath.conj(mu) / mu ** 3 * abs(mu) ** (-2 * s)
        assert rel(scaled, expected) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("b,a,s", [(0, 4, 0), (1, 3, 0), (2, 3, 1), (0, 5, 2)])
    def test_conjugation_symmetry(self, l8, prec, b, a, s):
        with precision_manager.working(prec):
            t = mpmath.mpc(1, "0.5")
        value = ek(EKParams(b, a, t, s, 1), l8, prec)
        mirrored = ek(EKParams(b, a, mpmath.conj(t), s, 1), l8.conjugate(), prec)
        assert rel(mirrored, value.conjugate()) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("c", ["(1+i)", "(3)"])
    def test_distribution_relation(self, qi, l8, prec, c):
        ideal = parse_ideal(qi, c)
        smoothed = ek_smoothed(0, 4, 1, ideal, l8, prec)
        summed = distribution_sum(0, 4, 1, ideal, l8, prec)
        assert rel(smoothed, summed) < mpmath.mpf(10) ** -40
