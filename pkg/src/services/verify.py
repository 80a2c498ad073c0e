"""
The Deligne-ratio pipeline.

For a critical character chi of type (a, b) the ratio
R = L_f(chi, 0) * conj(Omega)^b / Omega^a and the normalized ratio
L_f(chi, 0) / c+(chi) with c+ = Omega^a (Omega_dual)^b / (2 pi i)^b are
computed, and the latter is tested for algebraicity by integer-relation
detection at two precisions.
"""

import logging
import math
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import mpmath
import sympy
from mpmath import mp
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from src.config.settings import settings
from src.core.exceptions import NotCritical, NotHeckeCharacterType
from src.core.precision import BigComplex, decimal_string, precision_manager
from src.models.reports import RecognitionResult, VerifyReport
from src.services.galois import InfinityType, critical_decompose, setting_c2
from src.services.hecke import HeckeChar
from src.services.lvalues import class_representatives, partial_L
from src.services.periods import CMPeriod, cm_period
from src.services.quadarith import ImagQuadField

logger = logging.getLogger(__name__)


def is_critical(chi: HeckeChar) -> bool:
    """chi((alpha)) = conj(alpha)^b alpha^-a is critical iff -a*1 + b*c splits with alpha >= 1."""
    setting = setting_c2()
    mu = InfinityType.from_mapping(setting.top, {0: -chi.a, 1: chi.b})
    try:
        return critical_decompose(setting, mu) is not None
    except NotHeckeCharacterType:
        return False


def total_L(chi: HeckeChar, prec: int) -> BigComplex:
    """L_f(chi, 0) as the sum of the partial values over the ray classes."""
    total = BigComplex(0, prec)
    for _, rep in class_representatives(chi):
        total = total + partial_L(chi, rep, 0, prec)
    return total


def deligne_ratio(chi: HeckeChar, omega: BigComplex, prec: int,
                  l_value: Optional[BigComplex] = None) -> BigComplex:
    """
    R = L_f(chi, 0) * conj(Omega)^b / Omega^a.

    Raises:
        NotCritical: If chi is not critical
    """
    if not is_critical(chi):
        raise NotCritical(f"type (a, b) = ({chi.a}, {chi.b}) is not critical")
    L = total_L(chi, prec) if l_value is None else l_value
    with precision_manager.working(prec):
        value = L.value * mpmath.conj(omega.value) ** chi.b / omega.value ** chi.a
        return BigComplex(value, prec)


def normalized_ratio(ratio: BigComplex, omega: BigComplex, field: ImagQuadField, b: int) -> BigComplex:
    """R * (pi / covol(Omega O_K))^b, which is L / c+."""
    prec = ratio.prec
    with precision_manager.working(prec):
        area = abs(omega.value) ** 2 * mpmath.sqrt(-field.D) / 2
        return BigComplex(ratio.value * (mp.pi / area) ** b, prec)


# --- recognition -----------------------------------------------------------

def _residual(coeffs: List[int], z) -> "mpmath.mpf":
    """|P(z)| relative to the size of its terms."""
    scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(reversed(coeffs)))
    if scale == 0:
        return mpmath.mpf(0)
    return abs(mpmath.polyval(coeffs, z)) / scale


def _normalize(coeffs: List[int], z) -> List[int]:
    """The primitive irreducible factor vanishing at z, with positive leading coefficient."""
    x = sympy.Symbol("x")
    poly = sympy.Poly([int(c) for c in coeffs], x)
    _, factors = poly.factor_list()
    candidates = [f for f, _ in factors if f.degree() > 0]
    best = min(candidates, key=lambda f: _residual([int(c) for c in f.all_coeffs()], z))
    _, prim = best.primitive()
    if prim.LC() < 0:
        prim = -prim
    return [int(c) for c in prim.all_coeffs()]


def _rational(v, tol, max_height: int) -> Optional[Fraction]:
    if abs(v) <= tol:
        return Fraction(0)
    rel = mpmath.findpoly(v, 1, tol=tol, maxcoeff=max_height, maxsteps=10_000)
    if rel is None or rel[0] == 0:
        return None
    return Fraction(-int(rel[1]), int(rel[0]))


def _quadratic_poly(z, field: ImagQuadField, tol, max_height: int) -> Optional[List[int]]:
    """Minimal polynomial of z = p + q*w with p, q rational, if z has that shape."""
    w = field.omega_complex()
    q = _rational(z.imag / w.imag, tol, max_height)
    if q is None:
        return None
    p = _rational(z.real - mpmath.mpf(q.numerator) / q.denominator * w.real, tol, max_height)
    if p is None:
        return None
    elem = field.elem(p, q)
    if q == 0:
        coeffs = [Fraction(1), -p]
    else:
        coeffs = [Fraction(1), -elem.trace(), elem.norm()]
    denom = math.lcm(*(c.denominator for c in coeffs))
    return [int(c * denom) for c in coeffs]


def _relation_lattice(powers: List, bits: int) -> DomainMatrix:
    """Identity rows with Re and Im of each power appended, both weighted by 2^bits."""
    scale = mpmath.ldexp(1, bits)
    n = len(powers)
    rows = []
    for k, p in enumerate(powers):
        row = [ZZ(int(k == j)) for j in range(n)]
        row.append(ZZ(int(mpmath.nint(scale * p.real))))
        row.append(ZZ(int(mpmath.nint(scale * p.imag))))
        rows.append(row)
    return DomainMatrix(rows, (n, n + 2), ZZ)


def _stacked_relation(z, n: int, bits: int, max_height: int) -> Optional[List[int]]:
    """Shortest reduced relation among 1, z, ..., z^n holding for both parts; highest degree first."""
    powers = [z ** k for k in range(n + 1)]
    reduced = _relation_lattice(powers, bits).lll().to_Matrix().tolist()
    for row in reduced:
        coeffs = [int(c) for c in row[:n + 1]]
        if any(coeffs[1:]) and max(abs(c) for c in coeffs) <= max_height:
            return list(reversed(coeffs))
    return None


def _candidates(z, field: Optional[ImagQuadField], max_degree: int, tol, max_height: int,
                bits: int) -> Iterator[Tuple[str, List[int]]]:
    """Candidate polynomials in the order rational, quadratic, then powers by degree."""
    is_real = abs(z.imag) <= tol * abs(z)
    if is_real:
        value = _rational(z.real, tol, max_height)
        if value is not None:
            yield "rational", [value.denominator, -value.numerator]
    if field is not None:
        coeffs = _quadratic_poly(z, field, tol, max_height)
        if coeffs is not None:
            yield "quadratic", coeffs
    for n in range(1 if is_real else 2, max_degree + 1):
        coeffs = _stacked_relation(z, n, bits, max_height)
        if coeffs is not None:
            yield "power", coeffs


def _search(z, max_degree: int, max_height: int, prec: int,
            field: Optional[ImagQuadField]) -> RecognitionResult:
    """First candidate passing the height and residual gate; runs at the caller's precision."""
    tol = mpmath.ldexp(1, -prec // 2)
    if z == 0:
        return RecognitionResult(status="recognized", polynomial=[1, 0], degree=1, height=1,
                                 residual="0", basis="rational")

    best: Optional[Tuple] = None
    for basis, coeffs in _candidates(z, field, max_degree, tol, max_height, max(prec - 10, 16)):
        coeffs = _normalize(coeffs, z)
        height = max(abs(c) for c in coeffs)
        residual = _residual(coeffs, z)
        fields = dict(polynomial=coeffs, degree=len(coeffs) - 1, height=height,
                      residual=decimal_string(residual, 32), basis=basis)
        if height <= max_height and residual <= tol and len(coeffs) - 1 <= max_degree:
            return RecognitionResult(status="recognized", **fields)
        logger.debug(f"Rejected {basis} candidate {coeffs}: residual {mpmath.nstr(residual, 5)}")
        if best is None or residual < best[0]:
            best = (residual, fields)

    logger.info(f"No relation of degree <= {max_degree} and height <= {max_height}")
    if best is None:
        return RecognitionResult(status="undetermined")
    return RecognitionResult(status="undetermined", **best[1])


def recognize_algebraic(
    z,
    max_degree: Optional[int] = None,
    max_height: Optional[int] = None,
    prec: int = 192,
    field: Optional[ImagQuadField] = None,
) -> RecognitionResult:
    """
    Search for a small integer polynomial vanishing at z.

    Tries a rational value, then (when a field is given) p + q*w with p, q
    rational, then, degree by degree, an integer relation among the powers
    of z that holds for the real and imaginary parts together. A candidate
    is accepted when its height is at most max_height and its relative
    residual at most 2^-(prec/2); a rejected candidate moves the search on
    to the next degree.

    Below the configured minimum precision the search still runs, but the
    status is ``insufficient_precision`` and the residual of the best
    candidate (or the rounding bound 2^-prec) is reported.
    """
    max_degree = max_degree or settings.recognition.max_degree
    max_height = max_height or settings.recognition.max_height

    with precision_manager.working(prec):
        z = BigComplex(z, prec).value
        result = _search(z, max_degree, max_height, prec, field)
        rounding = decimal_string(mpmath.ldexp(1, -prec), 32)

    if prec < settings.precision.min_bits:
        logger.warning(f"Recognition at {prec} bits is below the minimum of {settings.precision.min_bits}")
        return result.model_copy(update={"status": "insufficient_precision",
                                         "residual": result.residual or rounding})
    return result


# --- pipeline --------------------------------------------------------------

def _normalized_at(chi: HeckeChar, prec: int, omega_scale) -> Tuple[BigComplex, BigComplex, BigComplex, CMPeriod]:
    period = cm_period(chi.field, prec)
    with precision_manager.working(prec):
        omega = BigComplex(period.omega.value * mpmath.mpc(omega_scale), prec)
    L = total_L(chi, prec)
    ratio = deligne_ratio(chi, omega, prec, l_value=L)
    return L, ratio, normalized_ratio(ratio, omega, chi.field, chi.b), period


def verify(chi: HeckeChar, prec: int, max_degree: Optional[int] = None, omega_scale=1) -> VerifyReport:
    """
    Full report for one critical character.

    ``omega_scale`` replaces Omega by u * Omega; algebraicity of the
    normalized ratio must not depend on an algebraic u.

    Raises:
        NotCritical: If chi is not critical
    """
    if not is_critical(chi):
        raise NotCritical(f"type (a, b) = ({chi.a}, {chi.b}) is not critical")
    logger.info(f"Verifying {chi.spec_string()} at {prec} bits")

    L, ratio, normalized, period = _normalized_at(chi, prec, omega_scale)
    recognition = recognize_algebraic(normalized, max_degree, prec=prec, field=chi.field)

    if recognition.status == "recognized":
        high = math.ceil(prec * settings.recognition.stability_factor)
        _, _, normalized_high, _ = _normalized_at(chi, high, omega_scale)
        again = recognize_algebraic(normalized_high, max_degree, prec=high, field=chi.field)
        recognition = recognition.model_copy(update={"stable": again.polynomial == recognition.polynomial})
        logger.info(f"Stability rerun at {high} bits: {'same' if recognition.stable else 'different'} polynomial")

    with precision_manager.working(prec):
        bound = mpmath.ldexp(max(abs(normalized.value), 1), -prec + 8)
        omega = BigComplex(period.omega.value * mpmath.mpc(omega_scale), prec)

    return VerifyReport(
        character=chi.spec_string(),
        precision=prec,
        critical=True,
        l_value=L.to_decimal_string(),
        omega=omega.to_decimal_string(),
        normalization=period.normalization,
        ratio=ratio.to_decimal_string(),
        normalized_ratio=normalized.to_decimal_string(),
        recognition=recognition,
        recognized=recognition.status == "recognized" and recognition.stable,
        error_bound=decimal_string(bound, 32),
    )
