"""
CM periods of normalized Weierstrass models.

The lattice O_K (under the embedding with Im(w) > 0) is rescaled by a
period Omega so that the rescaled lattice has rational invariants; Omega
is thereby fixed up to an algebraic factor.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import mpmath
from mpmath import mp

from src.core.exceptions import InternalInconsistency, NonIntegralJ
from src.core.precision import BigComplex, precision_manager
from src.services.eklattice import EKParams, Lattice2, ek_direct, lattice_from_ideal, reduce_basis
from src.services.quadarith import ImagQuadField, class_group, unit_ideal

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("j0", "j1728", "generic")


@dataclass(frozen=True)
class LatticeInvariants:
    """g2 = 60 G4, g3 = 140 G6 and the j-invariant of one lattice."""

    g2: BigComplex
    g3: BigComplex
    j: BigComplex
    lattice: Lattice2

    @property
    def discriminant(self) -> BigComplex:
        return self.g2 ** 3 - self.g3 ** 2 * 27


@dataclass(frozen=True)
class CMPeriod:
    """
    Omega with the rescaled lattice Omega * O_K.

    ``model`` holds the exact invariants (g2', g3') of the rescaled lattice.
    """

    field: ImagQuadField
    omega: BigComplex
    normalization: str
    lattice: Lattice2
    model: Tuple[Fraction, Fraction]
    j: int
    invariants: LatticeInvariants


def _eisenstein_q_series(q, power: int, prec: int):
    """sum_{n >= 1} n^power q^n / (1 - q^n), truncated below 2^-prec."""
    total = mpmath.mpc(0)
    eps = mpmath.ldexp(1, -prec - precision_manager.guard_bits)
    qn = mpmath.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        term = mpmath.mpf(n) ** power * qn / (1 - qn)
        total += term
        if abs(term) < eps * max(1, abs(total)):
            return total


def lattice_invariants(lattice: Lattice2, prec: int) -> LatticeInvariants:
    """
    g2 and g3 from the q-expansions of E4 and E6 after Lagrange reduction.

    The reduced basis gives |q| <= exp(-pi sqrt(3)), so a few dozen terms
    reach 1000 bits.

    Raises:
        InternalInconsistency: If the discriminant vanishes
    """
    with precision_manager.working(prec):
        u, v = reduce_basis(lattice.w1.value, lattice.w2.value)
        tau = v / u
        q = mpmath.expjpi(2 * tau)
        e4 = 1 + 240 * _eisenstein_q_series(q, 3, prec)
        e6 = 1 - 504 * _eisenstein_q_series(q, 5, prec)
        scale = 2 * mp.pi / u
        g2 = scale ** 4 * e4 / 12
        g3 = scale ** 6 * e6 / 216
        disc = g2 ** 3 - 27 * g3 ** 2
        if abs(disc) <= mpmath.ldexp(abs(g2) ** 3 + abs(g3) ** 2, -prec):
            raise InternalInconsistency("lattice invariants have vanishing discriminant")
        j = 1728 * g2 ** 3 / disc
        return LatticeInvariants(BigComplex(g2, prec), BigComplex(g3, prec), BigComplex(j, prec), lattice)


def eisenstein_sum(lattice: Lattice2, k: int, radius: float, prec: int) -> Tuple[BigComplex, "mpmath.mpf"]:
    """Direct G_k = sum' l^-k over the disc of the given radius, with its tail bound."""
    return ek_direct(EKParams(0, k, 0, 0, 1), lattice, radius, prec)


def _integral_j(j: BigComplex, prec: int) -> int:
    with precision_manager.working(prec):
        rounded = int(mpmath.nint(j.real))
        residual = abs(j.value - rounded)
        if residual > mpmath.ldexp(max(1, abs(j.value)), -prec // 2):
            raise NonIntegralJ(f"j = {j.to_decimal_string(20)} is not a rational integer")
        return rounded


def cm_period(field: ImagQuadField, prec: int) -> CMPeriod:
    """
    Omega for the maximal order, with the three-branch normalization.

    g3 = 0: Omega^4 = g2/4, model y^2 = 4x^3 - 4x.
    g2 = 0: Omega^6 = g3/4, model y^2 = 4x^3 - 4.
    otherwise: Omega^2 = g3/g2, both rescaled invariants equal 27j/(j - 1728).

    Raises:
        ClassNumberTooLarge: If the class number exceeds the configured maximum
        NonIntegralJ: If j(O_K) is not a rational integer
    """
    class_group(field)
    base = lattice_from_ideal(unit_ideal(field), prec)
    inv = lattice_invariants(base, prec)
    j = _integral_j(inv.j, prec)

    with precision_manager.working(prec):
        g2, g3 = inv.g2.value, inv.g3.value
        zero_tol = mpmath.ldexp(max(abs(g2), abs(g3)), -prec // 2)
        if abs(g3) <= zero_tol:
            normalization, model = "j1728", (Fraction(4), Fraction(0))
            omega = mpmath.root(g2 / 4, 4)
        elif abs(g2) <= zero_tol:
            normalization, model = "j0", (Fraction(0), Fraction(4))
            omega = mpmath.root(g3 / 4, 6)
        else:
            r = Fraction(27 * j, j - 1728)
            normalization, model = "generic", (r, r)
            omega = mpmath.sqrt(g3 / g2)
        omega = BigComplex(omega, prec)

    logger.info(f"CM period of {field.name}: branch {normalization}, j = {j}")
    return CMPeriod(field, omega, normalization, base.scaled(omega), model, j, inv)


def dual_period(period: CMPeriod) -> BigComplex:
    """Omega_dual = 2 pi i <.,.> / conj(Omega) with the pairing covol(Omega O_K) / pi."""
    prec = period.omega.prec
    with precision_manager.working(prec):
        value = mpmath.mpc(0, 2) * period.lattice.covolume / mpmath.conj(period.omega.value)
        return BigComplex(value, prec)


def real_period_integral(g2, g3, prec: int) -> BigComplex:
    """
    2 * int_{e1}^{inf} dx / sqrt(4x^3 - g2 x - g3) for real g2, g3.

    With x = e1 + t^2 the integrand becomes 1 / sqrt((t^2 + e1 - e2)(t^2 + e1 - e3)),
    which is smooth on the whole line.
    """
    with precision_manager.working(prec):
        roots = mpmath.polyroots([4, 0, -mpmath.mpf(g2), -mpmath.mpf(g3)],
                                 maxsteps=200, extraprec=2 * prec)
        real_roots = [r for r in roots if abs(mpmath.im(r)) <= mpmath.ldexp(1, -prec // 2)]
        e1 = max(mpmath.re(r) for r in real_roots)
        others = sorted(roots, key=lambda z: abs(z - e1))[1:]
        a, b = e1 - others[0], e1 - others[1]

        def integrand(t):
            return 1 / mpmath.sqrt((t * t + a) * (t * t + b))

        value = mpmath.quad(integrand, [-mpmath.inf, 0, mpmath.inf])
        return BigComplex(mpmath.re(value), prec)
