"""
Exact arithmetic in an imaginary quadratic field Q(sqrt-d).

Elements are x + y*w with rational x, y and w = (D + sqrt D)/2; ideals are
kept in the normal form scale*[a, b+w] (the Z-module scale*(aZ + (b+w)Z)),
which makes equality and hashing exact.
"""

import logging
import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import mpmath
from sympy import factorint
from sympy.ntheory import sqrt_mod

from src.config.settings import settings
from src.core.exceptions import (
    ClassNumberTooLarge,
    InternalInconsistency,
    ModulusTooLarge,
    NotCoprime,
    SpecParseError,
    ZeroIdeal,
)

logger = logging.getLogger(__name__)

Rational = int | Fraction


@dataclass(frozen=True)
class ImagQuadField:
    """The field Q(sqrt-d) with its maximal order Z[w]."""

    d: int

    def __post_init__(self):
        if self.d < 1 or any(e > 1 for e in factorint(self.d).values()):
            raise ValueError(f"d = {self.d} is not a squarefree positive integer")

    @classmethod
    def from_name(cls, name: str) -> "ImagQuadField":
        """Parse ``Q(i)``, ``Q(sqrt-3)`` or ``Q(sqrt(-7))``."""
        m = re.fullmatch(r"\s*Q\(\s*(?:i|sqrt\(?-(\d+)\)?)\s*\)\s*", name)
        if not m:
            raise SpecParseError(f"unrecognized field name '{name}'", 1, 1, name)
        d = int(m.group(1)) if m.group(1) else 1
        try:
            return cls(d)
        except ValueError as e:
            raise SpecParseError(str(e), 1, 1, name) from e

    @property
    def D(self) -> int:
        return -self.d if self.d % 4 == 3 else -4 * self.d

    @property
    def n0(self) -> int:
        """Norm of w, so that w^2 = D*w - n0."""
        return (self.D * self.D - self.D) // 4

    @property
    def name(self) -> str:
        return "Q(i)" if self.d == 1 else f"Q(sqrt-{self.d})"

    @property
    def sqrt_name(self) -> str:
        return "i" if self.d == 1 else f"sqrt-{self.d}"

    @property
    def unit_count(self) -> int:
        return {1: 4, 3: 6}.get(self.d, 2)

    def __str__(self) -> str:
        return self.name

    # element constructors
    def elem(self, x: Rational = 0, y: Rational = 0) -> "QuadElem":
        return QuadElem(self, Fraction(x), Fraction(y))

    def one(self) -> "QuadElem":
        return self.elem(1, 0)

    def omega(self) -> "QuadElem":
        return self.elem(0, 1)

    def sqrt_neg(self) -> "QuadElem":
        """sqrt(-d) as x + y*w."""
        if self.D == -4 * self.d:
            return self.elem(Fraction(-self.D, 2), 1)
        return self.elem(-self.D, 2)

    def from_sqrt_coords(self, u: Rational, v: Rational) -> "QuadElem":
        """u + v*sqrt(-d)."""
        return self.elem(u) + self.sqrt_neg() * self.elem(v)

    def roots_of_unity(self) -> List["QuadElem"]:
        """All roots of unity, as powers of a primitive one."""
        if self.d in (1, 3):
            zeta = self.elem(2, 1)  # i for d = 1, (1+sqrt-3)/2 for d = 3
        else:
            zeta = self.elem(-1, 0)
        roots, cur = [], self.one()
        for _ in range(self.unit_count):
            roots.append(cur)
            cur = cur * zeta
        return roots

    def omega_complex(self):
        return mpmath.mpc(mpmath.mpf(self.D) / 2, mpmath.sqrt(-self.D) / 2)


@dataclass(frozen=True)
class QuadElem:
    """Field element x + y*w with exact rational coordinates."""

    field: ImagQuadField = dc_field(repr=False)
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def _lift(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            return other
        return self.field.elem(other, 0)

    def __add__(self, other) -> "QuadElem":
        o = self._lift(other)
        return QuadElem(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self) -> "QuadElem":
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, other) -> "QuadElem":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "QuadElem":
        return self._lift(other) - self

    def __mul__(self, other) -> "QuadElem":
        o = self._lift(other)
        D, n0 = self.field.D, self.field.n0
        return QuadElem(
            self.field,
            self.x * o.x - n0 * self.y * o.y,
            self.x * o.y + o.x * self.y + D * self.y * o.y,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElem(self.field, c.x / n, c.y / n)

    def __truediv__(self, other) -> "QuadElem":
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other) -> "QuadElem":
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int) -> "QuadElem":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "QuadElem":
        return QuadElem(self.field, self.x + self.y * self.field.D, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x + self.x * self.y * self.field.D + self.y * self.y * self.field.n0

    def trace(self) -> Fraction:
        return 2 * self.x + self.y * self.field.D

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def sqrt_coords(self) -> Tuple[Fraction, Fraction]:
        """(u, v) with self = u + v*sqrt(-d)."""
        D = self.field.D
        u = self.x + self.y * Fraction(D, 2)
        v = self.y if D == -4 * self.field.d else self.y / 2
        return u, v

    def to_complex(self):
        """Value under the embedding with Im(w) > 0, at the current mpmath precision."""
        return mpmath.mpf(self.x.numerator) / self.x.denominator + (
            mpmath.mpf(self.y.numerator) / self.y.denominator
        ) * self.field.omega_complex()

    def __str__(self) -> str:
        return format_element(self)


def format_element(z: QuadElem) -> str:
    u, v = z.sqrt_coords()
    s = z.field.sqrt_name
    if v == 0:
        return str(u)
    if v == 1:
        im = s
    elif v == -1:
        im = f"-{s}"
    else:
        im = f"{v}*{s}"
    if u == 0:
        return im
    return f"{u}{im}" if im.startswith("-") else f"{u}+{im}"


# --- ideals ----------------------------------------------------------------

@dataclass(frozen=True)
class QuadIdeal:
    """The fractional ideal scale*(aZ + (b+w)Z) in normal form."""

    field: ImagQuadField = dc_field(repr=False)
    a: int = 1
    b: int = 0
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        f = self.field
        if self.a < 1 or not 0 <= self.b < self.a or self.scale <= 0:
            raise InternalInconsistency(f"ideal data ({self.a}, {self.b}, {self.scale}) not normalized")
        if (self.b * self.b + self.b * f.D + f.n0) % self.a:
            raise InternalInconsistency(f"[{self.a}, {self.b}+w] is not an ideal of {f.name}")

    def basis(self) -> Tuple[QuadElem, QuadElem]:
        f = self.field
        return (f.elem(self.scale * self.a, 0), f.elem(self.scale * self.b, self.scale))

    def norm(self) -> Fraction:
        return self.scale * self.scale * self.a

    def is_integral(self) -> bool:
        return self.scale.denominator == 1

    def is_unit(self) -> bool:
        return self.a == 1 and self.scale == 1

    def __mul__(self, other: "QuadIdeal") -> "QuadIdeal":
        return ideal_mul(self, other)

    def __str__(self) -> str:
        return format_ideal(self)


def hermite_basis(vectors: Iterable[Tuple[int, int]]) -> Tuple[int, int, int]:
    """Hermite form (p, q, r) of a full-rank sublattice of Z^2: basis (p, 0), (q, r)."""
    pivot = None
    rest: List[int] = []
    for x, y in vectors:
        if y == 0:
            rest.append(x)
            continue
        if pivot is None:
            pivot = (x, y)
            continue
        px, py = pivot
        while y != 0:
            k = py // y
            px, py, x, y = x, y, px - k * x, py - k * y
        pivot = (px, py)
        rest.append(x)
    if pivot is None:
        raise ZeroIdeal("generators span no lattice of rank two")
    q, r = pivot
    if r < 0:
        q, r = -q, -r
    p = 0
    for x in rest:
        p = math.gcd(p, x)
    if p == 0:
        raise ZeroIdeal("generators span no lattice of rank two")
    return p, q, r


def ideal_from_gens(field: ImagQuadField, elems: Sequence[QuadElem]) -> QuadIdeal:
    """
    Smallest ideal containing the given elements.

    Raises:
        ZeroIdeal: If every generator is zero
    """
    gens = [field.elem(g, 0) if not isinstance(g, QuadElem) else g for g in elems]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ZeroIdeal("ideal generated by zero")
    w = field.omega()
    module = gens + [g * w for g in gens]
    denom = 1
    for g in module:
        denom = math.lcm(denom, g.x.denominator, g.y.denominator)
    vectors = [(int(g.x * denom), int(g.y * denom)) for g in module]
    p, q, r = hermite_basis(vectors)
    if p % r or q % r:
        raise InternalInconsistency("module generated by ideal elements is not an ideal")
    a = p // r
    return QuadIdeal(field, a, (q // r) % a, Fraction(r, denom))


def unit_ideal(field: ImagQuadField) -> QuadIdeal:
    return QuadIdeal(field, 1, 0, Fraction(1))


def principal(field: ImagQuadField, x: QuadElem | Rational) -> QuadIdeal:
    return ideal_from_gens(field, [x])


def ideal_mul(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    return ideal_from_gens(I.field, [u * v for u in I.basis() for v in J.basis()])


def ideal_scale(I: QuadIdeal, x: QuadElem | Rational) -> QuadIdeal:
    """The ideal x*I."""
    if isinstance(x, QuadElem):
        return ideal_from_gens(I.field, [x * u for u in I.basis()])
    x = Fraction(x)
    if x > 0:
        return QuadIdeal(I.field, I.a, I.b, I.scale * x)
    return ideal_from_gens(I.field, [u * x for u in I.basis()])


def ideal_add(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    return ideal_from_gens(I.field, list(I.basis()) + list(J.basis()))


def ideal_norm(I: QuadIdeal) -> Fraction:
    return I.norm()


def ideal_conj(I: QuadIdeal) -> QuadIdeal:
    return ideal_from_gens(I.field, [u.conj() for u in I.basis()])


def ideal_inv(I: QuadIdeal) -> QuadIdeal:
    return ideal_scale(ideal_conj(I), 1 / I.norm())


def ideal_pow(I: QuadIdeal, n: int) -> QuadIdeal:
    if n < 0:
        return ideal_pow(ideal_inv(I), -n)
    result, base = unit_ideal(I.field), I
    while n:
        if n & 1:
            result = ideal_mul(result, base)
        base = ideal_mul(base, base)
        n >>= 1
    return result


def contains(I: QuadIdeal, x: QuadElem) -> bool:
    Y = x.y / I.scale
    if Y.denominator != 1:
        return False
    X = (x.x - Y * I.scale * I.b) / (I.scale * I.a)
    return X.denominator == 1


def divides(I: QuadIdeal, J: QuadIdeal) -> bool:
    """True when J is contained in I."""
    return all(contains(I, u) for u in J.basis())


def coprime(I: QuadIdeal, J: QuadIdeal) -> bool:
    """Integral ideals with I + J = (1)."""
    if math.gcd(int(I.norm()), int(J.norm())) == 1:
        return True
    return ideal_add(I, J).is_unit()


def congruent_one(x: QuadElem, f: QuadIdeal) -> bool:
    """Multiplicative congruence x = 1 mod* f for x in K^x."""
    if x.is_zero():
        return False
    diff = x - 1
    if diff.is_zero():
        return True
    generated = principal(x.field, diff)
    denominator = ideal_inv(ideal_add(generated, unit_ideal(x.field)))
    numerator = ideal_mul(generated, denominator)
    return coprime(denominator, f) and divides(f, numerator)


def _form_values(I: QuadIdeal) -> Tuple[int, int, int]:
    """Coefficients of N(scale*(a m + (b+w) n)) / N(I) as a form in (m, n)."""
    f = I.field
    c = (I.b * I.b + I.b * f.D + f.n0) // I.a
    return I.a, 2 * I.b + f.D, c


def lattice_points(I: QuadIdeal, max_norm: Rational) -> Iterator[Tuple[QuadElem, Fraction]]:
    """Nonzero elements of I with norm at most max_norm, with their norms."""
    A, B, C = _form_values(I)
    bound = Fraction(max_norm) / I.norm()
    if bound < 1:
        return
    D = -I.field.D
    n_max = math.isqrt(int(4 * A * bound / D)) + 1
    basis = I.basis()
    for n in range(-n_max, n_max + 1):
        disc = 4 * A * bound - D * n * n
        if disc < 0:
            continue
        root = math.isqrt(int(disc)) + 1
        lo = (-B * n - root) // (2 * A) - 1
        hi = (-B * n + root) // (2 * A) + 1
        for m in range(lo, hi + 1):
            value = A * m * m + B * m * n + C * n * n
            if 0 < value <= bound:
                yield basis[0] * m + basis[1] * n, value * I.norm()


def is_principal(I: QuadIdeal) -> Optional[QuadElem]:
    """A generator of I if it is principal, found among elements of norm N(I)."""
    target = I.norm()
    for z, n in lattice_points(I, target):
        if n == target:
            return z
    return None


# --- enumeration -----------------------------------------------------------

def _primitive_bs(field: ImagQuadField, a: int) -> List[int]:
    """All b in [0, a) with a | N(b + w)."""
    if a == 1:
        return [0]
    roots = sqrt_mod(field.D % (4 * a), 4 * a, all_roots=True) or []
    return sorted({((t - field.D) // 2) % a for t in roots})


def ideals_up_to_norm(
    field: ImagQuadField, X: int, coprime_to: Optional[QuadIdeal] = None
) -> List[QuadIdeal]:
    """Integral ideals of norm <= X coprime to a modulus, ordered by norm."""
    found = []
    for a in range(1, int(X) + 1):
        bs = _primitive_bs(field, a)
        for k in range(1, math.isqrt(int(X) // a) + 1):
            for b in bs:
                I = QuadIdeal(field, a, b, Fraction(k))
                if coprime_to is None or coprime(I, coprime_to):
                    found.append(I)
    found.sort(key=lambda I: (I.norm(), I.a, I.b, I.scale))
    return found


def prime_factors(f: QuadIdeal) -> List[Tuple[QuadIdeal, int]]:
    """Prime ideal factorization of an integral ideal by trial division over rational primes."""
    field = f.field
    n = int(f.norm())
    factors = []
    for p in sorted(factorint(n)):
        above = [QuadIdeal(field, p, b, Fraction(1)) for b in _primitive_bs(field, p)]
        if not above:
            above = [QuadIdeal(field, 1, 0, Fraction(p))]
        for P in above:
            e, rest, inv = 0, f, ideal_inv(P)
            while True:
                quotient = ideal_mul(rest, inv)
                if not quotient.is_integral():
                    break
                rest, e = quotient, e + 1
            if e:
                factors.append((P, e))
    return factors


# --- residues modulo f ----------------------------------------------------

class ResidueRing:
    """O/f for an integral ideal f, residues as (x, y) with 0 <= x < s*a, 0 <= y < s."""

    def __init__(self, modulus: QuadIdeal):
        if not modulus.is_integral():
            raise InternalInconsistency("modulus must be integral")
        self.modulus = modulus
        self.field = modulus.field
        self.s = int(modulus.scale)
        self.primes = prime_factors(modulus)

    def reduce(self, z: QuadElem) -> Tuple[int, int]:
        """Residue of an element that is integral at every prime of f."""
        if not z.is_integral():
            num, den = self._split_denominator(z)
            return self.mul(self.reduce(num), self.inverse(self.reduce(self.field.elem(den))))
        s, a, b = self.s, self.modulus.a, self.modulus.b
        X, Y = int(z.x), int(z.y)
        y = Y % s
        k = (Y - y) // s
        return (X - k * s * b) % (s * a), y

    def _split_denominator(self, z: QuadElem) -> Tuple[QuadElem, int]:
        den = math.lcm(z.x.denominator, z.y.denominator)
        if math.gcd(den, int(self.modulus.norm())) != 1:
            raise NotCoprime(f"{z} is not integral at the primes of the modulus")
        return z * den, den

    def element(self, r: Tuple[int, int]) -> QuadElem:
        return self.field.elem(r[0], r[1])

    def mul(self, r1: Tuple[int, int], r2: Tuple[int, int]) -> Tuple[int, int]:
        return self.reduce(self.element(r1) * self.element(r2))

    def power(self, r: Tuple[int, int], n: int) -> Tuple[int, int]:
        result, base = self.reduce(self.field.one()), r
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def is_unit(self, r: Tuple[int, int]) -> bool:
        z = self.element(r)
        return not any(contains(P, z) for P, _ in self.primes)

    @cached_property
    def unit_count(self) -> int:
        n = Fraction(self.modulus.norm())
        for P, _ in self.primes:
            n *= 1 - 1 / P.norm()
        return int(n)

    def inverse(self, r: Tuple[int, int]) -> Tuple[int, int]:
        if not self.is_unit(r):
            raise NotCoprime("residue is not a unit modulo the modulus")
        return self.power(r, self.unit_count - 1)

    def units(self) -> List[Tuple[int, int]]:
        if self.unit_count > settings.arithmetic.max_unit_residues:
            raise ModulusTooLarge(
                f"|(O/f)^x| = {self.unit_count} exceeds {settings.arithmetic.max_unit_residues}"
            )
        s, a = self.s, self.modulus.a
        return [(x, y) for y in range(s) for x in range(s * a) if self.is_unit((x, y))]


@dataclass(frozen=True)
class UnitsMod:
    """Roots of unity congruent to 1 modulo f."""

    modulus: QuadIdeal
    units: Tuple[QuadElem, ...]

    def __len__(self) -> int:
        return len(self.units)


def units_mod(field: ImagQuadField, f: QuadIdeal) -> UnitsMod:
    one = field.one()
    kept = tuple(z for z in field.roots_of_unity() if z == one or contains(f, z - one))
    return UnitsMod(f, kept)


# --- class group -----------------------------------------------------------

def reduced_forms(D: int) -> List[Tuple[int, int, int]]:
    """Reduced positive definite forms (a, b, c) of discriminant D."""
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_group(field: ImagQuadField) -> List[QuadIdeal]:
    """
    One integral ideal per ideal class, from the reduced forms; (1) first.

    Raises:
        ClassNumberTooLarge: If h exceeds the configured maximum
    """
    reps = []
    for a, b, _ in reduced_forms(field.D):
        reps.append(QuadIdeal(field, a, (-(b + field.D) // 2) % a, Fraction(1)))
    if len(reps) > settings.arithmetic.max_class_number:
        raise ClassNumberTooLarge(f"{field.name} has class number {len(reps)}")
    return reps


def class_index(I: QuadIdeal, reps: Sequence[QuadIdeal]) -> Tuple[int, QuadElem]:
    """Index j with I ~ reps[j], and a generator of I * conj(reps[j])."""
    for j, R in enumerate(reps):
        gamma = is_principal(ideal_mul(I, ideal_conj(R)))
        if gamma is not None:
            return j, gamma
    raise InternalInconsistency(f"{I} lies in no listed ideal class")


@dataclass(frozen=True)
class GeneratedIdeal:
    """Integral ideal I in class j, given by a generator of I * conj(R_j)."""

    class_index: int
    generator: QuadElem
    norm: int
    rep: QuadIdeal = dc_field(repr=False, compare=False)

    def ideal(self) -> QuadIdeal:
        return ideal_scale(ideal_scale(self.rep, self.generator), Fraction(1) / self.rep.norm())


def ideals_with_generators(
    field: ImagQuadField,
    X: int,
    reps: Sequence[QuadIdeal],
    coprime_to: Optional[QuadIdeal] = None,
) -> List[GeneratedIdeal]:
    """
    Each integral ideal of norm <= X coprime to a modulus, once, with a
    generator of I * conj(R_j).

    The class representatives must have norm coprime to the modulus.
    """
    roots = field.roots_of_unity()
    ring = ResidueRing(coprime_to) if coprime_to is not None else None
    found = []
    for j, R in enumerate(reps):
        Rbar = ideal_conj(R)
        nR = int(R.norm())
        if ring is not None and math.gcd(nR, int(coprime_to.norm())) != 1:
            raise NotCoprime(f"class representative {R} meets the modulus")
        for gamma, n in lattice_points(Rbar, X * nR):
            key = (gamma.x, gamma.y)
            if any((u * gamma).x < key[0] or ((u * gamma).x == key[0] and (u * gamma).y < key[1])
                   for u in roots[1:]):
                continue
            if ring is not None and not ring.is_unit(ring.reduce(gamma)):
                continue
            found.append(GeneratedIdeal(j, gamma, int(n) // nR, R))
    found.sort(key=lambda g: (g.norm, g.class_index, g.generator.x, g.generator.y))
    return found


# --- ray class groups ------------------------------------------------------

RayKey = Tuple[int, Tuple[int, int]]


@dataclass(frozen=True, eq=False)
class RayClassGroup:
    """
    I^f / P^f as a polycyclic series of generator ideals.

    Every class is uniquely g_1^e_1 ... g_k^e_k with 0 <= e_i < n_i;
    ``relations[i]`` holds the exponents of g_i^n_i over the earlier generators
    together with alpha_i = 1 mod* f generating g_i^n_i * prod g_j^-e_j.
    """

    field: ImagQuadField
    modulus: QuadIdeal
    generators: Tuple[QuadIdeal, ...]
    orders: Tuple[int, ...]
    relations: Tuple[Tuple[Tuple[int, ...], QuadElem], ...]
    class_reps: Tuple[QuadIdeal, ...]
    dlog: Dict[RayKey, Tuple[int, ...]] = dc_field(repr=False)
    ring: ResidueRing = dc_field(repr=False)
    unit_image: frozenset = dc_field(repr=False)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    def key(self, I: QuadIdeal) -> RayKey:
        j, gamma = class_index(I, self.class_reps)
        return j, _orbit_rep(self.ring, self.unit_image, self.ring.reduce(gamma))

    def exponents(self, I: QuadIdeal) -> Tuple[int, ...]:
        if not coprime(I, self.modulus):
            raise NotCoprime(f"{I} is not coprime to the modulus {self.modulus}")
        return self.dlog[self.key(I)]


def _orbit_rep(ring: ResidueRing, unit_image: Iterable[Tuple[int, int]], r: Tuple[int, int]):
    return min(ring.mul(r, u) for u in unit_image)


def _ray_class_reps(field: ImagQuadField, f: QuadIdeal) -> List[QuadIdeal]:
    """Class representatives of smallest norm with norm coprime to N(f)."""
    plain = class_group(field)
    nf = int(f.norm())
    chosen: List[Optional[QuadIdeal]] = [None] * len(plain)
    chosen[0] = unit_ideal(field)
    X = 16
    while any(c is None for c in chosen):
        for I in ideals_up_to_norm(field, X):
            if math.gcd(int(I.norm()), nf) != 1:
                continue
            j, _ = class_index(I, plain)
            if chosen[j] is None:
                chosen[j] = I
        X *= 2
    return chosen


def generator_congruent_one(J: QuadIdeal, f: QuadIdeal) -> QuadElem:
    """Generator alpha = 1 mod* f of an ideal in the trivial ray class."""
    beta = is_principal(J)
    if beta is None:
        raise InternalInconsistency(f"{J} should be principal")
    for zeta in J.field.roots_of_unity():
        if congruent_one(zeta * beta, f):
            return zeta * beta
    raise InternalInconsistency(f"{J} has no generator congruent to 1 mod {f}")


def ray_class_group(field: ImagQuadField, f: QuadIdeal) -> RayClassGroup:
    """
    Structure of I^f/P^f by brute force over (O/f)^x and the class group.

    Raises:
        ModulusTooLarge: If |(O/f)^x| exceeds the configured limit
        ZeroIdeal: If f is zero
    """
    if not f.is_integral():
        raise NotCoprime(f"modulus {f} is not integral")
    ring = ResidueRing(f)
    units = ring.units()
    unit_image = frozenset(ring.reduce(z) for z in field.roots_of_unity())
    reps = _ray_class_reps(field, f)
    h = len(reps)
    order = h * len(units) // len(unit_image)
    logger.debug(f"Ray class group of {field.name} mod {format_ideal(f)}: order {order}")

    # (j1, j2) -> (j3, residue factor) from conj(R1) conj(R2) R3 = (eps)
    product_table: Dict[Tuple[int, int], Tuple[int, Tuple[int, int]]] = {}
    for j1 in range(h):
        for j2 in range(h):
            base = ideal_mul(ideal_conj(reps[j1]), ideal_conj(reps[j2]))
            for j3 in range(h):
                eps = is_principal(ideal_mul(base, reps[j3]))
                if eps is not None:
                    factor = ring.mul(ring.reduce(field.elem(int(reps[j3].norm()))),
                                      ring.inverse(ring.reduce(eps)))
                    product_table[(j1, j2)] = (j3, factor)
                    break

    def mul(k1: RayKey, k2: RayKey) -> RayKey:
        j3, factor = product_table[(k1[0], k2[0])]
        return j3, _orbit_rep(ring, unit_image, ring.mul(ring.mul(k1[1], k2[1]), factor))

    def key_of(I: QuadIdeal) -> RayKey:
        j, gamma = class_index(I, reps)
        return j, _orbit_rep(ring, unit_image, ring.reduce(gamma))

    identity = key_of(unit_ideal(field))
    members: Dict[RayKey, Tuple[int, ...]] = {identity: ()}
    gens: List[QuadIdeal] = []
    orders: List[int] = []
    relations = []
    X = 8
    while len(members) < order:
        for I in ideals_up_to_norm(field, X, coprime_to=f):
            if len(members) >= order:
                break
            k = key_of(I)
            if k in members:
                continue
            powers = [identity]
            cur = k
            while cur not in members:
                powers.append(cur)
                cur = mul(cur, k)
            n = len(powers)
            rel = members[cur]
            J = ideal_pow(I, n)
            for g, e in zip(gens, rel):
                J = ideal_mul(J, ideal_pow(g, -e))
            relations.append((rel, generator_congruent_one(J, f)))
            members = {
                mul(pk, mk): exps + (e,)
                for e, pk in enumerate(powers)
                for mk, exps in members.items()
            }
            gens.append(I)
            orders.append(n)
        X *= 2
        if X > 64 * order * int(f.norm()) * max(-field.D, 4):
            raise InternalInconsistency("ray class generators not found")

    logger.info(
        f"Ray class group of {field.name} mod {format_ideal(f)}: orders {tuple(orders)}"
    )
    return RayClassGroup(
        field=field, modulus=f, generators=tuple(gens), orders=tuple(orders),
        relations=tuple(relations), class_reps=tuple(reps), dlog=members,
        ring=ring, unit_image=unit_image,
    )


def principalize(rcg: RayClassGroup, I: QuadIdeal) -> Tuple[Tuple[int, ...], QuadElem]:
    """
    Write I = prod g_i^e_i * (alpha) with alpha = 1 mod* f.

    Raises:
        NotCoprime: If I is not coprime to the modulus
    """
    exps = rcg.exponents(I)
    J = I
    for g, e in zip(rcg.generators, exps):
        if e:
            J = ideal_mul(J, ideal_pow(g, -e))
    return exps, generator_congruent_one(J, rcg.modulus)


# --- parsing and printing --------------------------------------------------

def format_ideal(I: QuadIdeal) -> str:
    """``scale*[a,b+w]`` without spaces, so it survives inside a character spec."""
    return f"{I.scale}*[{I.a},{I.b}+w]"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>sqrt(?:\(-\d+\)|-\d+)|zeta\d+|omega|w|i)|(?P<op>[-+*/^(),\[\]]))"
)


class _ExprParser:
    """Recursive-descent parser for element and ideal expressions."""

    def __init__(self, field: ImagQuadField, text: str):
        self.field = field
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while text[pos:].strip():
            m = _TOKEN.match(text, pos)
            if not m:
                stripped = len(text[pos:]) - len(text[pos:].lstrip())
                self._fail("unexpected character", pos + stripped)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def _fail(self, message: str, pos: Optional[int] = None):
        if pos is None:
            pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise SpecParseError(message, 1, pos + 1, self.text)

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> Tuple[str, str, int]:
        if self.i >= len(self.tokens):
            self._fail(f"expected '{expected}'" if expected else "unexpected end of input")
        tok = self.tokens[self.i]
        if expected is not None and tok[1] != expected:
            self._fail(f"expected '{expected}'")
        self.i += 1
        return tok

    def done(self):
        if self.i != len(self.tokens):
            self._fail("trailing input")

    # elements
    def expr(self) -> QuadElem:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> QuadElem:
        value = self.unary()
        while True:
            nxt = self.peek()
            if nxt in ("*", "/"):
                self.take()
                rhs = self.unary()
                if nxt == "/":
                    if rhs.is_zero():
                        self._fail("division by zero")
                    value = value / rhs
                else:
                    value = value * rhs
            elif nxt == "(" or (nxt is not None and self.tokens[self.i][0] == "name"):
                value = value * self.unary()
            else:
                return value

    def unary(self) -> QuadElem:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        base = self.atom()
        if self.peek() == "^":
            self.take()
            base = base ** self.exponent()
        return base

    def exponent(self) -> int:
        negative = self.peek() == "-"
        if negative:
            self.take()
        kind, text, pos = self.take()
        if kind != "num":
            self._fail("expected an integer exponent", pos)
        return -int(text) if negative else int(text)

    def atom(self) -> QuadElem:
        kind, text, pos = self.take()
        if kind == "num":
            return self.field.elem(int(text))
        if kind == "name":
            return self._name(text, pos)
        if text == "(":
            value = self.expr()
            self.take(")")
            return value
        self._fail(f"unexpected '{text}'", pos)

    def _name(self, text: str, pos: int) -> QuadElem:
        f = self.field
        if text in ("w", "omega"):
            return f.omega()
        if text == "i" and f.d == 1:
            return f.sqrt_neg()
        m = re.fullmatch(r"sqrt(?:\(-(\d+)\)|-(\d+))", text)
        if m and int(m.group(1) or m.group(2)) == f.d:
            return f.sqrt_neg()
        if text == "zeta3" and f.d == 3:
            return f.elem(1, 1)
        if text == "zeta6" and f.d == 3:
            return f.elem(2, 1)
        if text == "zeta4" and f.d == 1:
            return f.sqrt_neg()
        self._fail(f"'{text}' is not an element of {f.name}", pos)

    # ideals
    def ideal(self) -> QuadIdeal:
        value = self.ideal_factor()
        while self.peek() == "*":
            self.take()
            value = ideal_mul(value, self.ideal_factor())
        return value

    def ideal_factor(self) -> QuadIdeal:
        nxt = self.peek()
        if nxt == "[":
            value = self.normal_form(Fraction(1))
        elif nxt == "(":
            start = self.tokens[self.i][2]
            self.take("(")
            gens = [self.expr()]
            while self.peek() == ",":
                self.take()
                gens.append(self.expr())
            self.take(")")
            try:
                value = ideal_from_gens(self.field, gens)
            except ZeroIdeal as e:
                raise SpecParseError(str(e), 1, start + 1, self.text) from e
        elif nxt is not None and self.tokens[self.i][0] == "num":
            scale = Fraction(int(self.take()[1]))
            if self.peek() == "/":
                self.take()
                scale /= int(self.take()[1])
            self.take("*")
            value = self.normal_form(scale)
        else:
            self._fail("expected an ideal")
        if self.peek() == "^":
            self.take()
            value = ideal_pow(value, self.exponent())
        return value

    def normal_form(self, scale: Fraction) -> QuadIdeal:
        start = self.tokens[self.i][2]
        self.take("[")
        a = int(self.take()[1])
        self.take(",")
        b = self.expr()
        self.take("]")
        if b.y != 1 or b.x.denominator != 1 or a < 1:
            self._fail("normal form must read [a, b+w]", start)
        try:
            return QuadIdeal(self.field, a, int(b.x) % a, scale)
        except InternalInconsistency as e:
            raise SpecParseError(str(e), 1, start + 1, self.text) from e


def parse_element(field: ImagQuadField, text: str) -> QuadElem:
    parser = _ExprParser(field, text)
    value = parser.expr()
    parser.done()
    return value


def parse_ideal(field: ImagQuadField, text: str) -> QuadIdeal:
    """Parse ``(1+i)^3``, ``(2, 1+sqrt-5)``, ``1/2*[5, 2+w]`` and products of these."""
    parser = _ExprParser(field, text)
    value = parser.ideal()
    parser.done()
    return value
