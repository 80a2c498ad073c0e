"""
Eisenstein-Kronecker series of rank-2 lattices.

E^{b,a}(t, s; L, G) = (1/|G|) * sum over nonzero l in L + t of
conj(l)^b * l^-a * |l|^-2s. The direct sum is the oracle inside the region of
absolute convergence; ``ek`` continues the series by splitting its Mellin
integral and moving the near part to the dual lattice (an Ewald-type split).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from src.config.settings import settings
from src.core.exceptions import (
    InternalInconsistency,
    OutsideConvergenceRegion,
    PrecisionUnachievable,
    TranslateNotTorsion,
)
from src.core.precision import BigComplex, precision_manager
from src.services.quadarith import (
    QuadElem,
    QuadIdeal,
    hermite_basis,
    contains,
    ideal_inv,
    ideal_mul,
    units_mod,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdealProvenance:
    """The lattice is scale * (image of ideal under sqrt(-d) -> +i*sqrt(d))."""

    ideal: QuadIdeal
    scale: BigComplex


@dataclass(frozen=True)
class Lattice2:
    """Rank-2 lattice with Im(conj(w1) w2) > 0."""

    w1: BigComplex
    w2: BigComplex
    provenance: Optional[IdealProvenance] = None

    def __post_init__(self):
        cov = self.covolume
        if cov == 0:
            raise InternalInconsistency("degenerate lattice basis")
        if cov < 0:
            w1, w2 = self.w1, self.w2
            object.__setattr__(self, "w1", w2)
            object.__setattr__(self, "w2", w1)

    @property
    def prec(self) -> int:
        return min(self.w1.prec, self.w2.prec)

    @property
    def covolume(self):
        with precision_manager.working(self.prec):
            return (mpmath.conj(self.w1.value) * self.w2.value).imag

    def scaled(self, mu) -> "Lattice2":
        """mu * L, computed at the lattice's own precision."""
        prec = self.prec
        with precision_manager.working(prec):
            mu = mu.value if isinstance(mu, BigComplex) else mpmath.mpc(mu)
            prov = None
            if self.provenance is not None:
                prov = IdealProvenance(self.provenance.ideal,
                                       BigComplex(self.provenance.scale.value * mu, prec))
            return Lattice2(BigComplex(self.w1.value * mu, prec),
                            BigComplex(self.w2.value * mu, prec), prov)

    def conjugate(self) -> "Lattice2":
        return Lattice2(self.w1.conjugate(), self.w2.conjugate())

    def diameter(self):
        """Diameter of the fundamental parallelogram of the reduced basis."""
        with precision_manager.working(self.prec):
            u, v = reduce_basis(self.w1.value, self.w2.value)
            return max(abs(u + v), abs(u - v))


def lattice_from_ideal(ideal: QuadIdeal, prec: int, scale=1) -> Lattice2:
    """The lattice scale * ideal under the embedding with Im(w) > 0."""
    with precision_manager.working(prec):
        mu = scale.value if isinstance(scale, BigComplex) else mpmath.mpc(scale)
        u, v = ideal.basis()
        return Lattice2(
            BigComplex(u.to_complex() * mu, prec),
            BigComplex(v.to_complex() * mu, prec),
            IdealProvenance(ideal, BigComplex(mu, prec)),
        )


def as_mpc(x):
    return x.value if isinstance(x, BigComplex) else mpmath.mpc(x)


def reduce_basis(w1, w2) -> Tuple:
    """Lagrange reduction: |w1| <= |w2|, |Re(w2/w1)| <= 1/2, Im(w2/w1) > 0."""
    u, v = mpmath.mpc(w1), mpmath.mpc(w2)
    if abs(v) < abs(u):
        u, v = v, u
    while True:
        k = mpmath.nint((v / u).real)
        v = v - k * u
        if abs(v) < abs(u):
            u, v = v, u
            continue
        break
    if (v / u).imag < 0:
        v = -v
    return u, v


@dataclass(frozen=True)
class EKParams:
    """
    Exponents, translate and evaluation point of one series.

    ``t_exact`` and ``modulus`` are set by callers whose lattice comes from an
    ideal; they allow the translate to be checked against f^-1 L.
    """

    b_exp: int
    a_exp: int
    t: complex = 0
    s: complex = 0
    gamma_order: int = 1
    t_exact: Optional[QuadElem] = None
    modulus: Optional[QuadIdeal] = None

    def __post_init__(self):
        if self.a_exp < 1 or self.b_exp < 0:
            raise OutsideConvergenceRegion(f"exponents (b, a) = ({self.b_exp}, {self.a_exp}) need a >= 1, b >= 0")
        if self.gamma_order < 1:
            raise InternalInconsistency("gamma_order must be positive")


def _check_translate(params: EKParams, lattice: Lattice2) -> None:
    """t must lie in f^-1 L and the type must be invariant under O_f^x."""
    if params.modulus is None or params.t_exact is None or lattice.provenance is None:
        return
    f = params.modulus
    ideal = lattice.provenance.ideal
    if not contains(ideal_mul(ideal_inv(f), ideal), params.t_exact):
        raise TranslateNotTorsion(f"translate {params.t_exact} is not in f^-1 L")
    units = units_mod(f.field, f).units
    if len(units) != params.gamma_order:
        raise InternalInconsistency(f"|O_f^x| = {len(units)} but gamma_order = {params.gamma_order}")
    one = f.field.one()
    for u in units:
        if u.conj() ** params.b_exp * u ** (-params.a_exp) != one:
            raise InternalInconsistency("infinity type is not invariant under O_f^x")


def _coords(z, u, v, area):
    """Real coordinates (x, y) with z = x*u + y*v."""
    x = (mpmath.conj(z) * v).imag / area
    y = (mpmath.conj(u) * z).imag / area
    return x, y


def lattice_points(u, v, t, radius, skip_zero: bool = True) -> List:
    """Points of (Zu + Zv) + t in the closed disc of the given radius, by (|l|^2, arg)."""
    area = (mpmath.conj(u) * v).imag
    tx, ty = _coords(as_mpc(t), u, v, area)
    nx = radius * abs(v) / area
    ny = radius * abs(u) / area
    count = (2 * nx + 3) * (2 * ny + 3)
    if count > settings.lattice.max_points:
        raise PrecisionUnachievable(f"lattice enumeration needs about {int(count)} points")
    r2 = radius * radius
    tol = mpmath.ldexp(1, -mp.prec // 2)
    points = []
    for n in range(int(mpmath.floor(-nx - tx)) - 1, int(mpmath.ceil(nx - tx)) + 2):
        for m in range(int(mpmath.floor(-ny - ty)) - 1, int(mpmath.ceil(ny - ty)) + 2):
            z = n * u + m * v + t
            n2 = z.real * z.real + z.imag * z.imag
            if n2 > r2:
                continue
            if skip_zero and n2 <= tol * tol * area:
                continue
            points.append((n2, mpmath.arg(z), z))
    points.sort(key=lambda p: (p[0], p[1]))
    return [p[2] for p in points]


def _summand(z, b: int, a: int, s):
    n2 = z.real * z.real + z.imag * z.imag
    return mpmath.conj(z) ** (a + b) * mpmath.power(n2, -(s + a))


def _direct_tail(b: int, a: int, s, lattice: Lattice2, radius, gamma_order: int):
    k = 2 * mpmath.re(s) + a - b
    delta = lattice.diameter()
    R = mpmath.mpf(radius)
    c = 1 - delta / (R - delta)
    return c ** (-k) * 2 * mp.pi * (R - delta) ** (2 - k) / ((k - 2) * lattice.covolume) / gamma_order


def ek_direct(params: EKParams, lattice: Lattice2, radius: float, prec: int) -> Tuple[BigComplex, "mpmath.mpf"]:
    """
    Truncated defining sum and a rigorous bound for the omitted tail.

    Raises:
        OutsideConvergenceRegion: If Re(s) + (a - b)/2 <= 1
        PrecisionUnachievable: If the radius is too small for the tail estimate
    """
    b, a, s = params.b_exp, params.a_exp, as_mpc(params.s)
    if mpmath.re(s) + mpmath.mpf(a - b) / 2 <= 1:
        raise OutsideConvergenceRegion(f"direct sum diverges for (b, a) = ({b}, {a}), s = {params.s}")
    _check_translate(params, lattice)
    with precision_manager.working(prec):
        u, v = reduce_basis(lattice.w1.value, lattice.w2.value)
        if radius < 10 or radius <= 2 * lattice.diameter():
            raise PrecisionUnachievable(f"radius {radius} too small for this lattice")
        total = mpmath.mpc(0)
        points = lattice_points(u, v, as_mpc(params.t), mpmath.mpf(radius))
        for z in points:
            total += _summand(z, b, a, s)
        value = total / params.gamma_order
        tail = _direct_tail(b, a, s, lattice, radius, params.gamma_order)
        logger.debug(f"ek_direct: {len(points)} points, radius {radius}, tail {mpmath.nstr(tail, 5)}")
        return BigComplex(value, prec), +tail


def _cutoff(prec: int, k: float) -> "mpmath.mpf":
    """Smallest y (approximately) with y - k*log(y) >= prec*log(2)."""
    target = (prec + precision_manager.guard_bits) * mpmath.log(2)
    y = target
    for _ in range(8):
        y = target + k * mpmath.log(max(y, 2))
    return y


def ek(params: EKParams, lattice: Lattice2, prec: int, split_scale: Optional[float] = None) -> BigComplex:
    """
    Analytically continued series, valid for Re(s + a) > 0.

    With m = a + b and w = s + a the series is Z(w) = sum' conj(l)^m |l|^-2w
    and, for a split point x0 = split_scale / covolume,

        pi^-w Gamma(w) Z = sum'_{l in L+t} conj(l)^m (pi|l|^2)^-w Gamma(w, pi x0 |l|^2)
            + (-i)^m / A * sum'_{xi in L*} conj(xi)^m e^{2 pi i Re(conj(xi) t)}
              (pi|xi|^2)^-(m+1-w) Gamma(m+1-w, pi|xi|^2 / x0).

    Both omitted zero terms vanish because conj(z)^m does at z = 0.

    Raises:
        OutsideConvergenceRegion: If Re(s + a) <= 0
        PrecisionUnachievable: If the point count exceeds the configured maximum
    """
    b, a = params.b_exp, params.a_exp
    m = a + b
    _check_translate(params, lattice)
    split = settings.lattice.split_scale if split_scale is None else split_scale

    with precision_manager.working(prec):
        s = as_mpc(params.s)
        w = s + a
        if mpmath.re(w) <= 0:
            raise OutsideConvergenceRegion(f"continuation validated for Re(s + a) > 0, got s = {params.s}")
        t = as_mpc(params.t)
        u, v = reduce_basis(lattice.w1.value, lattice.w2.value)
        area = (mpmath.conj(u) * v).imag
        x0 = mpmath.mpf(split) / area
        pi = mp.pi

        y = _cutoff(prec, m / 2.0 + abs(float(mpmath.re(w))) + 2)
        r_far = mpmath.sqrt(y / (pi * x0))
        r_dual = mpmath.sqrt(y * x0 / pi)

        far = mpmath.mpc(0)
        far_points = lattice_points(u, v, t, r_far)
        for z in far_points:
            n2 = z.real * z.real + z.imag * z.imag
            far += mpmath.conj(z) ** m * mpmath.power(pi * n2, -w) * mpmath.gammainc(w, pi * x0 * n2)

        xi1 = -1j * v / area
        xi2 = 1j * u / area
        dual_area = (mpmath.conj(xi1) * xi2).imag
        if dual_area < 0:
            xi1, xi2 = xi2, xi1
        near = mpmath.mpc(0)
        dual_points = lattice_points(xi1, xi2, 0, r_dual)
        for xi in dual_points:
            n2 = xi.real * xi.real + xi.imag * xi.imag
            phase = mpmath.expjpi(2 * (mpmath.conj(xi) * t).real)
            near += (mpmath.conj(xi) ** m * phase * mpmath.power(pi * n2, -(m + 1 - w))
                     * mpmath.gammainc(m + 1 - w, pi * n2 / x0))
        near *= mpmath.mpc(0, -1) ** m / area

        value = mpmath.power(pi, w) / mpmath.gamma(w) * (far + near) / params.gamma_order
        logger.debug(
            f"ek: (b, a) = ({b}, {a}), {len(far_points)} direct and {len(dual_points)} dual points"
        )
        return BigComplex(value, prec)


# --- distribution relation -------------------------------------------------

def _require_provenance(lattice: Lattice2) -> IdealProvenance:
    if lattice.provenance is None:
        raise InternalInconsistency("operation needs a lattice built from an ideal")
    return lattice.provenance


def torsion_translates(c_ideal: QuadIdeal, lattice: Lattice2) -> List[QuadElem]:
    """Representatives of c^-1 L / L as field elements (L = ideal of the lattice)."""
    ideal = _require_provenance(lattice).ideal
    bigger = ideal_mul(ideal_inv(c_ideal), ideal)
    u1, u2 = bigger.basis()

    def coords(z: QuadElem) -> Tuple[int, int]:
        y = z.y / bigger.scale
        x = (z.x - y * bigger.scale * bigger.b) / (bigger.scale * bigger.a)
        return int(x), int(y)

    p, q, r = hermite_basis(coords(z) for z in ideal.basis())
    return [u1 * x + u2 * y for y in range(r) for x in range(p)]


def ek_smoothed(b: int, a: int, x, c_ideal: QuadIdeal, lattice: Lattice2, prec: int,
                gamma_order: int = 1) -> BigComplex:
    """N(c) * E(x; L) - E(x; c^-1 L) at s = 0."""
    prov = _require_provenance(lattice)
    smaller = lattice_from_ideal(ideal_mul(ideal_inv(c_ideal), prov.ideal), prec, prov.scale)
    params = EKParams(b, a, x, 0, gamma_order)
    nc = int(c_ideal.norm())
    return ek(params, lattice, prec) * nc - ek(params, smaller, prec)


def distribution_sum(b: int, a: int, x, c_ideal: QuadIdeal, lattice: Lattice2, prec: int,
                     gamma_order: int = 1) -> BigComplex:
    """Term-by-term sum over t in c^-1 L / L of f_c(-t) E(t + x; L), f_c = N(c) 1_0 - 1_ker."""
    prov = _require_provenance(lattice)
    nc = int(c_ideal.norm())
    x = as_mpc(x)
    total = ek(EKParams(b, a, x, 0, gamma_order), lattice, prec) * nc
    for t in torsion_translates(c_ideal, lattice):
        with precision_manager.working(prec):
            shift = t.to_complex() * prov.scale.value + x
        total = total - ek(EKParams(b, a, shift, 0, gamma_order), lattice, prec)
    return total


def ek_orbit_sum(params: EKParams, lattice: Lattice2, radius: float, units: Sequence, prec: int) -> BigComplex:
    """
    Direct sum over one representative per unit orbit of L + t (no 1/|G| factor).

    Equals ek_direct at the same radius when the units preserve L + t and
    the type; used to validate the coset reduction.
    """
    b, a = params.b_exp, params.a_exp
    with precision_manager.working(prec):
        u, v = reduce_basis(lattice.w1.value, lattice.w2.value)
        area = (mpmath.conj(u) * v).imag
        t = as_mpc(params.t)
        s = as_mpc(params.s)
        unit_values = [as_mpc(z) for z in units]
        seen = set()
        total = mpmath.mpc(0)
        for z in lattice_points(u, v, t, mpmath.mpf(radius)):
            key = _integer_key(z - t, u, v, area)
            if key in seen:
                continue
            for g in unit_values:
                seen.add(_integer_key(g * z - t, u, v, area))
            total += _summand(z, b, a, s)
        return BigComplex(total, prec)


def _integer_key(z, u, v, area) -> Tuple[int, int]:
    x, y = _coords(z, u, v, area)
    kx, ky = int(mpmath.nint(x)), int(mpmath.nint(y))
    if abs(x - kx) > 1e-6 or abs(y - ky) > 1e-6:
        raise TranslateNotTorsion("units do not preserve the translated lattice")
    return kx, ky
