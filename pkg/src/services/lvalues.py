"""
Partial and full Hecke L-values.

For a ray class [b] the partial L-function is
chi(b) N(b)^-s E^{b,a}(1, s; f b^-1, O_f^x): the ideals of [b] are y*b with
y in 1 + f b^-1, taken modulo the units congruent to 1 mod f.
"""

import logging
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mp

from src.config.settings import settings
from src.core.exceptions import NotCoprime, OutsideConvergenceRegion, TrivialModulus
from src.core.precision import BigComplex, decimal_string, precision_manager
from src.models.reports import LValueReport
from src.services.eklattice import EKParams, Lattice2, ek, lattice_from_ideal
from src.services.hecke import HeckeChar, char_eval, infinity_part
from src.services.quadarith import (
    QuadIdeal,
    coprime,
    format_ideal,
    ideal_inv,
    ideal_mul,
    ideal_pow,
    ideals_with_generators,
    unit_ideal,
    units_mod,
)

logger = logging.getLogger(__name__)


def class_lattice(chi: HeckeChar, b_ideal: QuadIdeal, prec: int) -> Lattice2:
    """The lattice f * b^-1 under the fixed embedding."""
    return lattice_from_ideal(ideal_mul(chi.modulus, ideal_inv(b_ideal)), prec)


def partial_L(chi: HeckeChar, b_ideal: QuadIdeal, s, prec: int,
              split_scale: Optional[float] = None) -> BigComplex:
    """
    Partial L-value of the ray class of an integral ideal b coprime to f.

    Raises:
        TrivialModulus: If the character has modulus (1)
        NotCoprime: If b is not integral or not coprime to f
    """
    f = chi.modulus
    if f.is_unit():
        raise TrivialModulus("partial L-values through lattice sums need f != (1)")
    if not b_ideal.is_integral() or not coprime(b_ideal, f):
        raise NotCoprime(f"{format_ideal(b_ideal)} must be integral and coprime to {format_ideal(f)}")

    gamma = len(units_mod(chi.field, f))
    params = EKParams(chi.b, chi.a, 1, s, gamma, t_exact=chi.field.one(), modulus=f)
    series = ek(params, class_lattice(chi, b_ideal, prec), prec, split_scale)
    prefactor = char_eval(chi, b_ideal, prec)
    with precision_manager.working(prec):
        norm_factor = mpmath.power(mpmath.mpf(int(b_ideal.norm())), -mpmath.mpc(s))
        return BigComplex(prefactor.value * norm_factor * series.value, prec)


def class_representatives(chi: HeckeChar) -> List[Tuple[Tuple[int, ...], QuadIdeal]]:
    """One integral ideal per ray class: the product of generator powers, by exponent vector."""
    rcg = chi.rcg
    reps = []
    for exps in sorted(rcg.dlog.values()):
        I = unit_ideal(chi.field)
        for g, e in zip(rcg.generators, exps):
            if e:
                I = ideal_mul(I, ideal_pow(g, e))
        reps.append((exps, I))
    return reps


def _class_label(exps: Tuple[int, ...]) -> str:
    return "(" + ",".join(str(e) for e in exps) + ")"


def L_value(chi: HeckeChar, s, prec: int, method: str = "eseries",
            nmax: Optional[int] = None) -> LValueReport:
    """Full L-value as a report, through the lattice sums or the Dirichlet series."""
    if method == "dirichlet":
        value, tail, terms = dirichlet_L(chi, s, nmax or settings.lvalue.dirichlet_nmax, prec)
        return LValueReport(
            character=chi.spec_string(), s=str(s), method="dirichlet", precision=prec,
            total=value.to_decimal_string(), error_bound=decimal_string(tail, 32), terms=terms,
        )

    partials: Dict[str, str] = {}
    reps: Dict[str, str] = {}
    total = BigComplex(0, prec)
    for exps, rep in class_representatives(chi):
        value = partial_L(chi, rep, s, prec)
        label = _class_label(exps)
        partials[label] = value.to_decimal_string()
        reps[label] = format_ideal(rep)
        total = total + value
    logger.info(f"L-value of {chi.spec_string()} at s = {s}: {len(partials)} classes")
    with precision_manager.working(prec):
        bound = mpmath.ldexp(max(abs(total.value), 1), -prec + 4)
    return LValueReport(
        character=chi.spec_string(), s=str(s), method="eseries", precision=prec,
        class_representatives=reps, partials=partials, total=total.to_decimal_string(),
        error_bound=decimal_string(bound, 32),
    )


def _tail_bound(k, nmax: int, reps: List[QuadIdeal], w_K: int):
    """Bound on the sum of N(I)^-k over ideals of norm > nmax, class by class."""
    total = mpmath.mpf(0)
    X = mpmath.mpf(nmax)
    for R in reps:
        lattice = lattice_from_ideal(R, mp.prec)
        area = lattice.covolume
        delta = lattice.diameter()
        nR = mpmath.mpf(int(R.norm()))
        total += k * mp.pi / (w_K * area) * (
            nR * X ** (1 - k) / (k - 1)
            + 2 * delta * mpmath.sqrt(nR) * X ** (mpmath.mpf(1) / 2 - k) / (k - mpmath.mpf(1) / 2)
            + delta ** 2 * X ** (-k) / k
        )
    return total


def dirichlet_L(chi: HeckeChar, s, nmax: int, prec: int) -> Tuple[BigComplex, "mpmath.mpf", int]:
    """
    Sum of chi(I) N(I)^-s over integral ideals coprime to f with N(I) <= nmax.

    Character values are computed once per (class, residue of the generator)
    and moved along by the infinity type within that residue class.

    Raises:
        OutsideConvergenceRegion: If Re(s) <= w/2 + 1
    """
    with precision_manager.working(prec):
        s_val = mpmath.mpc(s)
        k = s_val.real - mpmath.mpf(chi.weight) / 2
        if k <= 1:
            raise OutsideConvergenceRegion(f"Dirichlet series diverges at s = {s} for weight {chi.weight}")

    f = chi.modulus
    reps = list(chi.rcg.class_reps)
    ideals = ideals_with_generators(chi.field, nmax, reps, coprime_to=f)
    ring = chi.rcg.ring
    anchors: Dict[Tuple[int, Tuple[int, int]], Tuple] = {}

    with precision_manager.working(prec):
        total = mpmath.mpc(0)
        for item in ideals:
            key = (item.class_index, ring.reduce(item.generator))
            if key not in anchors:
                anchors[key] = (item.generator, char_eval(chi, item.ideal(), prec).value)
            gamma0, value0 = anchors[key]
            ratio = item.generator / gamma0
            value = value0 * infinity_part(ratio, chi.a, chi.b).to_complex()
            total += value * mpmath.power(item.norm, -s_val)
        tail = _tail_bound(k, nmax, reps, chi.field.unit_count)
    logger.info(f"Dirichlet sum of {chi.spec_string()}: {len(ideals)} ideals up to norm {nmax}")
    return BigComplex(total, prec), tail, len(ideals)


def smoothed_partial_difference(chi: HeckeChar, b_ideal: QuadIdeal, c_ideal: QuadIdeal,
                                prec: int) -> BigComplex:
    """N(c) L(chi, 0, [b]) - chi(c)^-1 L(chi, 0, [bc])."""
    left = partial_L(chi, b_ideal, 0, prec)
    right = partial_L(chi, ideal_mul(b_ideal, c_ideal), 0, prec)
    chi_c = char_eval(chi, c_ideal, prec)
    return left * int(c_ideal.norm()) - right / chi_c
