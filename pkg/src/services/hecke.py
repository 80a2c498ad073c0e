"""Algebraic Hecke characters of an imaginary quadratic field in ideal form."""

import logging
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

import mpmath

from src.core.exceptions import NotHeckeCharacterType, TrivialModulus
from src.core.precision import BigComplex, precision_manager
from src.services.quadarith import (
    ImagQuadField,
    QuadElem,
    QuadIdeal,
    RayClassGroup,
    format_ideal,
    principalize,
    ray_class_group,
    units_mod,
)

logger = logging.getLogger(__name__)


def infinity_part(alpha: QuadElem, a: int, b: int) -> QuadElem:
    """conj(alpha)^b * alpha^-a, exactly."""
    return alpha.conj() ** b * alpha ** (-a)


def unit_compatible(field: ImagQuadField, f: QuadIdeal, a: int, b: int) -> bool:
    """Every root of unity that is 1 mod f must be killed by the infinity type."""
    one = field.one()
    return all(infinity_part(u, a, b) == one for u in units_mod(field, f).units)


@dataclass(frozen=True)
class CharValue:
    """
    Exact bookkeeping of one character value.

    chi(I) = prod chi(g_i)^e_i * conj(alpha)^b * alpha^-a, where each chi(g_i)
    is the principal n_i-th root of its target times zeta_{n_i}^{k_i}.
    """

    exponents: Tuple[int, ...]
    root_indices: Tuple[int, ...]
    alpha: QuadElem
    infinity: QuadElem
    value: BigComplex


@dataclass(frozen=True, eq=False)
class HeckeChar:
    """
    A Hecke character of conductor dividing ``modulus`` with
    chi((alpha)) = conj(alpha)^b alpha^-a for alpha = 1 mod* f.

    ``twist`` is a mixed-radix index into the torsor of ray class
    characters; twist 0 takes the principal root at every generator.
    """

    field: ImagQuadField
    modulus: QuadIdeal
    a: int
    b: int
    twist: int
    rcg: RayClassGroup = dc_field(repr=False)
    _cache: Dict[int, Tuple[BigComplex, ...]] = dc_field(default_factory=dict, repr=False)

    @property
    def weight(self) -> int:
        return self.b - self.a

    @property
    def root_indices(self) -> Tuple[int, ...]:
        digits, rest = [], self.twist
        for n in self.rcg.orders:
            digits.append(rest % n)
            rest //= n
        return tuple(digits)

    def spec_string(self) -> str:
        return (
            f"hecke field={self.field.name} f={format_ideal(self.modulus)} "
            f"a={self.a} b={self.b} twist={self.twist}"
        )

    def generator_values(self, prec: int) -> Tuple[BigComplex, ...]:
        """chi(g_i), solved generator by generator from the relation data."""
        if prec in self._cache:
            return self._cache[prec]
        values: List = []
        with precision_manager.working(prec):
            for i, ((rel, alpha), n, k) in enumerate(
                zip(self.rcg.relations, self.rcg.orders, self.root_indices)
            ):
                target = infinity_part(alpha, self.a, self.b).to_complex()
                for v, e in zip(values, rel):
                    target *= v ** e
                root = mpmath.root(_snap_branch(target), n)
                values.append(root * mpmath.expjpi(mpmath.mpf(2 * k) / n))
            result = tuple(BigComplex(v, prec) for v in values)
        self._cache[prec] = result
        return result

    def __str__(self) -> str:
        return self.spec_string()


def _snap_branch(z):
    """Put numerically real negative targets on the principal side of the cut."""
    if z.real < 0 and abs(z.imag) <= abs(z) * mpmath.ldexp(1, -mpmath.mp.prec // 2):
        return mpmath.mpc(z.real, 0)
    return z


def enumerate_characters(
    field: ImagQuadField,
    f: QuadIdeal,
    infinity_type: Tuple[int, int],
    allow_trivial_modulus: bool = False,
    rcg: Optional[RayClassGroup] = None,
) -> List[HeckeChar]:
    """
    All Hecke characters of modulus f with infinity pair (a, b).

    Returns an empty list when a unit congruent to 1 mod f violates the
    infinity type, otherwise one character per ray class character.

    Raises:
        TrivialModulus: If f = (1) and the caller did not allow it
    """
    a, b = infinity_type
    if f.is_unit() and not allow_trivial_modulus:
        raise TrivialModulus("Hecke characters are taken with a nontrivial modulus")
    if not unit_compatible(field, f, a, b):
        logger.info(f"No characters of type ({a}, {b}) mod {format_ideal(f)}: unit obstruction")
        return []
    group = rcg or ray_class_group(field, f)
    chars = [HeckeChar(field, f, a, b, t, group) for t in range(group.order)]
    logger.debug(f"{len(chars)} characters of type ({a}, {b}) mod {format_ideal(f)}")
    return chars


def make_character(
    field: ImagQuadField,
    f: QuadIdeal,
    a: int,
    b: int,
    twist: int = 0,
    allow_trivial_modulus: bool = False,
) -> HeckeChar:
    """
    The character with the given twist index.

    Raises:
        NotHeckeCharacterType: If no character of this type exists for f
    """
    chars = enumerate_characters(field, f, (a, b), allow_trivial_modulus)
    if not chars:
        raise NotHeckeCharacterType(
            f"no character of type ({a}, {b}) on {field.name} mod {format_ideal(f)}"
        )
    if not 0 <= twist < len(chars):
        raise NotHeckeCharacterType(f"twist {twist} outside [0, {len(chars)})")
    return chars[twist]


def char_value(chi: HeckeChar, I: QuadIdeal, prec: int) -> CharValue:
    """
    Evaluate chi on an ideal coprime to its modulus with full bookkeeping.

    Raises:
        NotCoprime: If I is not coprime to the modulus
    """
    exps, alpha = principalize(chi.rcg, I)
    inf = infinity_part(alpha, chi.a, chi.b)
    gens = chi.generator_values(prec)
    with precision_manager.working(prec):
        value = inf.to_complex()
        for v, e in zip(gens, exps):
            value *= v.value ** e
    return CharValue(exps, chi.root_indices, alpha, inf, BigComplex(value, prec))


def char_eval(chi: HeckeChar, I: QuadIdeal, prec: int) -> BigComplex:
    return char_value(chi, I, prec).value


def weight(chi: HeckeChar) -> int:
    return chi.weight


def norm_twist(chi: HeckeChar, k: int) -> HeckeChar:
    """chi * N^k, of infinity pair (a - k, b + k); generator arguments are unchanged."""
    return HeckeChar(chi.field, chi.modulus, chi.a - k, chi.b + k, chi.twist, chi.rcg)
