"""
Galois-side combinatorics of CM fields.

Fields are subgroups of one finite Galois group G with a distinguished
complex conjugation c; embeddings of the fixed field of H are the left
cosets gH, recorded by their smallest element. Everything here is exact
and exhaustive, which is practical for the group orders we accept (<= 64).
"""

import logging
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.config.settings import settings
from src.core.exceptions import (
    ConjNotInvolution,
    InternalInconsistency,
    NoCMSubfield,
    NotACMType,
    NotAGroup,
    NotASubfield,
    NotHeckeCharacterType,
    SubgroupNotClosed,
    UnknownField,
)

logger = logging.getLogger(__name__)

TOP_FIELD = "top"


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group given by its composition table over indices 0..order-1."""

    order: int
    table: Tuple[Tuple[int, ...], ...]
    identity: int
    inverses: Tuple[int, ...]

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]]) -> "FiniteGroup":
        """
        Validate a composition table and build the group.

        Raises:
            NotAGroup: If the table is not square, not closed, not associative,
                has no identity or lacks inverses
        """
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise NotAGroup("composition table must be a non-empty square")
        if n > settings.arithmetic.max_group_order:
            raise NotAGroup(f"group order {n} exceeds {settings.arithmetic.max_group_order}")
        rows = tuple(tuple(int(x) for x in row) for row in table)
        if any(not 0 <= x < n for row in rows for x in row):
            raise NotAGroup("table entries must be element indices")

        identity = next(
            (e for e in range(n) if all(rows[e][x] == x and rows[x][e] == x for x in range(n))),
            None,
        )
        if identity is None:
            raise NotAGroup("no identity element")

        for x in range(n):
            for y in range(n):
                xy = rows[x][y]
                for z in range(n):
                    if rows[xy][z] != rows[x][rows[y][z]]:
                        raise NotAGroup(f"associativity fails at ({x}, {y}, {z})")

        inverses = []
        for x in range(n):
            inv = next((y for y in range(n) if rows[x][y] == identity), None)
            if inv is None or rows[inv][x] != identity:
                raise NotAGroup(f"element {x} has no inverse")
            inverses.append(inv)

        return cls(order=n, table=rows, identity=identity, inverses=tuple(inverses))

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inv(self, g: int) -> int:
        return self.inverses[g]

    @property
    def elements(self) -> range:
        return range(self.order)

    def is_closed(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        return self.identity in s and all(self.mul(x, y) in s for x in s for y in s)

    def closure(self, generators: Iterable[int]) -> frozenset:
        """Smallest subgroup containing the generators."""
        members = {self.identity} | set(generators)
        frontier = list(members)
        while frontier:
            x = frontier.pop()
            for y in list(members):
                for z in (self.mul(x, y), self.mul(y, x)):
                    if z not in members:
                        members.add(z)
                        frontier.append(z)
        return frozenset(members)

    def subgroups(self) -> List[frozenset]:
        """All subgroups, smallest first."""
        found = {frozenset({self.identity})}
        frontier = list(found)
        while frontier:
            h = frontier.pop()
            for g in self.elements:
                if g not in h:
                    k = self.closure(h | {g})
                    if k not in found:
                        found.add(k)
                        frontier.append(k)
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def normalizer(self, subgroup: frozenset) -> frozenset:
        return frozenset(
            n for n in self.elements
            if {self.mul(self.mul(n, h), self.inv(n)) for h in subgroup} == set(subgroup)
        )


@dataclass(frozen=True)
class Field:
    """A subfield of the Galois closure, named, given by its fixing subgroup."""

    name: str
    subgroup: frozenset


@dataclass(frozen=True, order=True)
class Embedding:
    """Embedding gH of a field, stored as the smallest element of the coset."""

    rep: int
    field: Field = dc_field(compare=False)


@dataclass(frozen=True)
class InfinityType:
    """Integer combination of the embeddings of one field (zero entries dropped)."""

    field: Field
    coeffs: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, fld: Field, mapping: Mapping[int, int]) -> "InfinityType":
        return cls(fld, tuple(sorted((int(r), int(v)) for r, v in mapping.items() if v)))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.coeffs)

    def coeff(self, rep: int) -> int:
        return self.as_dict().get(rep, 0)

    @property
    def degree(self) -> int:
        return sum(v for _, v in self.coeffs)

    @property
    def support(self) -> frozenset:
        return frozenset(r for r, _ in self.coeffs)

    def _combine(self, other: "InfinityType", sign: int) -> "InfinityType":
        if other.field.subgroup != self.field.subgroup:
            raise UnknownField("infinity types live on different fields")
        merged = self.as_dict()
        for r, v in other.coeffs:
            merged[r] = merged.get(r, 0) + sign * v
        return InfinityType.from_mapping(self.field, merged)

    def __add__(self, other: "InfinityType") -> "InfinityType":
        return self._combine(other, 1)

    def __sub__(self, other: "InfinityType") -> "InfinityType":
        return self._combine(other, -1)

    def __neg__(self) -> "InfinityType":
        return InfinityType.from_mapping(self.field, {r: -v for r, v in self.coeffs})

    def scaled(self, k: int) -> "InfinityType":
        return InfinityType.from_mapping(self.field, {r: k * v for r, v in self.coeffs})


@dataclass(frozen=True)
class CMType:
    """Set of embeddings of one field; validity is checked by ``is_cm_type``."""

    field: Field
    members: frozenset

    def as_type(self) -> InfinityType:
        return InfinityType.from_mapping(self.field, {r: 1 for r in self.members})


@dataclass(frozen=True)
class CriticalDecomposition:
    cm_type: CMType
    alpha: InfinityType
    beta: InfinityType
    weight: int

    @property
    def mu(self) -> InfinityType:
        return self.beta - self.alpha


@dataclass(frozen=True)
class CMSetting:
    """
    Galois group, complex conjugation and the registered subfields.

    ``element_names`` label group elements for parsing and printing;
    ``embedding_labels`` optionally relabel the embeddings of the top field
    (for example e1..e4 for Q(zeta5)).
    """

    name: str
    group: FiniteGroup
    conj: int
    fields: Tuple[Field, ...]
    element_names: Tuple[str, ...]
    embedding_labels: Tuple[str, ...] = ()

    def field(self, ref: Union[str, Field]) -> Field:
        if isinstance(ref, Field):
            return ref
        for f in self.fields:
            if f.name == ref:
                return f
        raise UnknownField(f"field '{ref}' is not registered in setting '{self.name}'")

    @property
    def top(self) -> Field:
        return self.field_for(frozenset({self.group.identity}))

    def field_for(self, subgroup: Iterable[int]) -> Field:
        """Registered field with this subgroup, or an unregistered one named after it."""
        sub = frozenset(subgroup)
        for f in self.fields:
            if f.subgroup == sub:
                return f
        names = ",".join(self.element_names[g] for g in sorted(sub))
        return Field(f"Fix{{{names}}}", sub)

    def with_field(self, name: str, subgroup: Iterable[int]) -> "CMSetting":
        sub = frozenset(subgroup)
        if not self.group.is_closed(sub):
            raise SubgroupNotClosed(f"subset {sorted(sub)} is not a subgroup")
        kept = tuple(f for f in self.fields if f.name != name)
        return CMSetting(self.name, self.group, self.conj, kept + (Field(name, sub),),
                         self.element_names, self.embedding_labels)

    def element(self, token: Union[str, int]) -> int:
        """Resolve an element from its name, a top-field embedding label or an index."""
        if isinstance(token, int):
            if 0 <= token < self.group.order:
                return token
            raise UnknownField(f"no element with index {token}")
        token = token.strip()
        if token in self.embedding_labels:
            return self.embedding_labels.index(token)
        if token in self.element_names:
            return self.element_names.index(token)
        if token.isdigit() and int(token) < self.group.order:
            return int(token)
        raise UnknownField(f"unknown element or embedding '{token}'")

    def label(self, emb_field: Field, rep: int) -> str:
        if self.embedding_labels and emb_field.subgroup == frozenset({self.group.identity}):
            return self.embedding_labels[rep]
        return self.element_names[rep]


def make_setting(
    table: Sequence[Sequence[int]],
    conj: int,
    subgroups: Mapping[str, Iterable[int]],
    name: str = "custom",
    element_names: Optional[Sequence[str]] = None,
    embedding_labels: Optional[Sequence[str]] = None,
) -> CMSetting:
    """
    Validate group data and build a CMSetting.

    The trivial subgroup is registered as the top field when the caller did
    not name it.

    Raises:
        NotAGroup: If the table does not define a group
        ConjNotInvolution: If conj is the identity or not of order two
        SubgroupNotClosed: If a registered subset is not a subgroup
    """
    group = FiniteGroup.from_table(table)
    if not 0 <= conj < group.order or conj == group.identity or group.mul(conj, conj) != group.identity:
        raise ConjNotInvolution(f"element {conj} is not an involution")

    fields = []
    for fname, members in subgroups.items():
        sub = frozenset(int(m) for m in members)
        if not sub or any(not 0 <= m < group.order for m in sub) or not group.is_closed(sub):
            raise SubgroupNotClosed(f"field '{fname}': {sorted(sub)} is not a subgroup")
        fields.append(Field(fname, sub))
    trivial = frozenset({group.identity})
    if not any(f.subgroup == trivial for f in fields):
        fields.insert(0, Field(TOP_FIELD, trivial))

    names = tuple(element_names) if element_names else tuple(str(g) for g in group.elements)
    if len(names) != group.order or len(set(names)) != group.order:
        raise NotAGroup("element names must be distinct, one per element")
    labels = tuple(embedding_labels) if embedding_labels else ()
    if labels and len(labels) != group.order:
        raise NotAGroup("top-field embedding labels must cover every element")

    logger.debug(f"Setting '{name}' built: order {group.order}, {len(fields)} fields")
    return CMSetting(name, group, conj, tuple(fields), names, labels)


# --- cosets and embeddings -------------------------------------------------

def coset_rep(setting: CMSetting, fld: Field, g: int) -> int:
    return min(setting.group.mul(g, h) for h in fld.subgroup)


def embeddings(setting: CMSetting, fld: Union[str, Field]) -> List[Embedding]:
    """One embedding per left coset of the field's subgroup, in index order."""
    f = setting.field(fld)
    reps = sorted({coset_rep(setting, f, g) for g in setting.group.elements})
    return [Embedding(r, f) for r in reps]


def _reps(setting: CMSetting, fld: Field) -> List[int]:
    return [e.rep for e in embeddings(setting, fld)]


def _conj_rep(setting: CMSetting, fld: Field, rep: int) -> int:
    return coset_rep(setting, fld, setting.group.mul(setting.conj, rep))


def act(setting: CMSetting, tau: int, mu: InfinityType) -> InfinityType:
    """Left translation (tau mu)(sigma) = mu(tau^-1 sigma)."""
    moved = {coset_rep(setting, mu.field, setting.group.mul(tau, r)): v for r, v in mu.coeffs}
    return InfinityType.from_mapping(mu.field, moved)


def conj_type(setting: CMSetting, mu: InfinityType) -> InfinityType:
    """mu composed with complex conjugation."""
    return InfinityType.from_mapping(
        mu.field, {r: mu.coeff(_conj_rep(setting, mu.field, r)) for r in _reps(setting, mu.field)}
    )


def lift_type(setting: CMSetting, mu: InfinityType, target: Union[str, Field]) -> InfinityType:
    """
    Pull an infinity type back along restriction J_L -> J_K.

    Raises:
        NotASubfield: If the source field is not contained in the target
    """
    L = setting.field(target)
    K = mu.field
    if not L.subgroup <= K.subgroup:
        raise NotASubfield(f"{K.name} is not a subfield of {L.name}")
    return InfinityType.from_mapping(
        L, {r: mu.coeff(coset_rep(setting, K, r)) for r in _reps(setting, L)}
    )


# --- field predicates ------------------------------------------------------

def is_real_embedding(setting: CMSetting, fld: Field, g: int) -> bool:
    grp = setting.group
    return grp.mul(grp.mul(grp.inv(g), setting.conj), g) in fld.subgroup


def is_totally_imaginary(setting: CMSetting, fld: Union[str, Field]) -> bool:
    f = setting.field(fld)
    return not any(is_real_embedding(setting, f, g) for g in setting.group.elements)


def is_totally_real(setting: CMSetting, fld: Union[str, Field]) -> bool:
    f = setting.field(fld)
    return all(is_real_embedding(setting, f, g) for g in setting.group.elements)


def is_cm_field(setting: CMSetting, fld: Union[str, Field]) -> bool:
    """Totally imaginary, and c acts on cosets as right multiplication by one n in N_G(H)."""
    f = setting.field(fld)
    if not is_totally_imaginary(setting, f):
        return False
    grp = setting.group
    for n in sorted(grp.normalizer(f.subgroup)):
        if all(
            coset_rep(setting, f, grp.mul(setting.conj, g)) == coset_rep(setting, f, grp.mul(g, n))
            for g in grp.elements
        ):
            return True
    return False


def maximal_cm_subfield(setting: CMSetting, fld: Union[str, Field]) -> Field:
    """
    Largest CM subfield of a totally imaginary field.

    Raises:
        NoCMSubfield: If the field is not totally imaginary or has no CM subfield
        InternalInconsistency: If two incomparable maximal CM subfields exist
    """
    L = setting.field(fld)
    if not is_totally_imaginary(setting, L):
        raise NoCMSubfield(f"{L.name} has a real embedding")
    candidates = [
        h for h in setting.group.subgroups()
        if L.subgroup <= h and is_cm_field(setting, setting.field_for(h))
    ]
    minimal = [h for h in candidates if not any(k < h for k in candidates)]
    if not minimal:
        raise NoCMSubfield(f"{L.name} contains no CM subfield")
    if len(minimal) > 1:
        raise InternalInconsistency(f"{L.name} has {len(minimal)} maximal CM subfields")
    return setting.field_for(minimal[0])


def _conjugation_pairs(setting: CMSetting, fld: Field) -> List[Tuple[int, int]]:
    pairs = {}
    for r in _reps(setting, fld):
        pair = tuple(sorted((r, _conj_rep(setting, fld, r))))
        pairs[pair] = None
    return sorted(pairs, key=lambda p: p[0])


def is_cm_type(setting: CMSetting, phi: CMType) -> bool:
    L = phi.field
    reps = set(_reps(setting, L))
    if not phi.members <= reps:
        return False
    conj_members = {_conj_rep(setting, L, r) for r in phi.members}
    if phi.members & conj_members or phi.members | conj_members != reps:
        return False
    if is_cm_field(setting, L):
        return True
    try:
        K = maximal_cm_subfield(setting, L)
    except NoCMSubfield:
        return False
    fibers: Dict[int, set] = {}
    for r in reps:
        fibers.setdefault(coset_rep(setting, K, r), set()).add(r in phi.members)
    return all(len(flags) == 1 for flags in fibers.values())


def _require_cm_type(setting: CMSetting, phi: CMType) -> None:
    if not is_cm_type(setting, phi):
        labels = ",".join(setting.label(phi.field, r) for r in sorted(phi.members))
        raise NotACMType(f"{{{labels}}} is not a CM-type of {phi.field.name}")


def cm_types(setting: CMSetting, fld: Union[str, Field]) -> List[CMType]:
    """All CM-types of a field: transversals for CM fields, lifted types otherwise."""
    L = setting.field(fld)
    if is_cm_field(setting, L):
        pairs = _conjugation_pairs(setting, L)
        return [CMType(L, frozenset(choice)) for choice in product(*pairs)]
    try:
        K = maximal_cm_subfield(setting, L)
    except NoCMSubfield:
        return []
    lifted = []
    for phi_k in cm_types(setting, K):
        members = frozenset(r for r in _reps(setting, L) if coset_rep(setting, K, r) in phi_k.members)
        lifted.append(CMType(L, members))
    return lifted


# --- reflex ----------------------------------------------------------------

def stabilizer_field(setting: CMSetting, mu: Union[InfinityType, CMType]) -> Field:
    """Fixed field of {tau : tau mu = mu}; registered name when one exists."""
    t = mu.as_type() if isinstance(mu, CMType) else mu
    stab = frozenset(tau for tau in setting.group.elements if act(setting, tau, t) == t)
    return setting.field_for(stab)


def register_field(setting: CMSetting, name: str, fld: Field) -> CMSetting:
    return setting.with_field(name, fld.subgroup)


def reflex(setting: CMSetting, L: Union[str, Field], phi: CMType) -> Tuple[Field, CMType]:
    """
    Reflex field E and reflex type of a CM-type.

    Raises:
        NotACMType: If phi is not a CM-type
        InternalInconsistency: If the inverted lift is not constant on cosets of H_E
    """
    fld = setting.field(L)
    if phi.field.subgroup != fld.subgroup:
        raise NotACMType(f"CM-type lives on {phi.field.name}, not {fld.name}")
    _require_cm_type(setting, phi)

    grp = setting.group
    E = stabilizer_field(setting, phi)
    lifted = {g for g in grp.elements if coset_rep(setting, fld, g) in phi.members}
    inverted = {g for g in grp.elements if grp.inv(g) in lifted}
    if any(grp.mul(g, h) not in inverted for g in inverted for h in E.subgroup):
        raise InternalInconsistency("inverted lift is not constant on cosets of the reflex field")

    phi_star = CMType(E, frozenset(coset_rep(setting, E, g) for g in inverted))
    if not is_cm_type(setting, phi_star):
        raise InternalInconsistency("reflex type is not a CM-type")
    return E, phi_star


# --- Hecke character types and criticality ---------------------------------

def is_hecke_character_type(setting: CMSetting, mu: InfinityType) -> Optional[int]:
    """Weight w if mu is induced from a totally real or CM subfield with constant pair sums."""
    L = mu.field
    sums = {mu.coeff(r) + mu.coeff(_conj_rep(setting, L, r)) for r in _reps(setting, L)}
    if len(sums) != 1:
        return None
    w = sums.pop()

    reps = _reps(setting, L)
    for h in setting.group.subgroups():
        if not L.subgroup <= h:
            continue
        F = setting.field_for(h)
        if not (is_totally_real(setting, F) or is_cm_field(setting, F)):
            continue
        values: Dict[int, set] = {}
        for r in reps:
            values.setdefault(coset_rep(setting, F, r), set()).add(mu.coeff(r))
        if all(len(v) == 1 for v in values.values()):
            return w
    return None


def critical_decompose(setting: CMSetting, mu: InfinityType) -> Optional[CriticalDecomposition]:
    """
    Split mu = beta - alpha with alpha >= 1 on a CM-type and beta >= 0 on its conjugate.

    Such a CM-type can only be the set where mu is negative, so it is
    unique when it exists.

    Raises:
        NotHeckeCharacterType: If mu is not the infinity type of a Hecke character
    """
    w = is_hecke_character_type(setting, mu)
    if w is None:
        raise NotHeckeCharacterType("infinity type fails Weil's criterion")

    L = mu.field
    phi = CMType(L, frozenset(r for r in _reps(setting, L) if mu.coeff(r) < 0))
    if not is_cm_type(setting, phi):
        return None
    alpha = InfinityType.from_mapping(L, {r: -mu.coeff(r) for r in phi.members})
    beta = InfinityType.from_mapping(
        L, {r: mu.coeff(r) for r in _reps(setting, L) if r not in phi.members}
    )
    decomposition = CriticalDecomposition(phi, alpha, beta, w)
    if decomposition.mu != mu:
        raise InternalInconsistency("critical decomposition does not reconstruct its input")
    return decomposition


def critical_types(setting: CMSetting, fld: Union[str, Field], bound: int) -> List[CriticalDecomposition]:
    """Critical types of Hecke character type with coefficients bounded by ``bound``."""
    L = setting.field(fld)
    found = []
    for phi in cm_types(setting, L):
        members = sorted(phi.members)
        for w in range(-bound, bound):
            ranges = [range(1, bound + 1)] * len(members)
            for alphas in product(*ranges):
                betas = [w + a for a in alphas]
                if any(not 0 <= b <= bound for b in betas):
                    continue
                mapping = {r: -a for r, a in zip(members, alphas)}
                for r, b in zip(members, betas):
                    mapping[_conj_rep(setting, L, r)] = b
                mu = InfinityType.from_mapping(L, mapping)
                if is_hecke_character_type(setting, mu) is None:
                    continue
                found.append(critical_decompose(setting, mu))
    return found


# --- the sign and the reflex character -------------------------------------

def _permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for i in range(len(perm)):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return -1 if (len(perm) - cycles) % 2 else 1


def epsilon_sign(setting: CMSetting, phi: CMType, eta: Embedding, tau: int) -> int:
    """
    Sign of pairs -> eta.phi -> tau.eta.phi -> pairs on the conjugation pairs of L.

    Raises:
        NotACMType: If phi is not a CM-type
        NotASubfield: If eta is not an embedding of a field inside the reflex field
    """
    _require_cm_type(setting, phi)
    L = phi.field
    E = stabilizer_field(setting, phi)
    if not eta.field.subgroup <= E.subgroup:
        raise NotASubfield(f"{eta.field.name} is not contained in the reflex field {E.name}")

    grp = setting.group
    eta_phi = {coset_rep(setting, L, grp.mul(eta.rep, r)) for r in phi.members}
    pairs = _conjugation_pairs(setting, L)
    index = {r: i for i, pair in enumerate(pairs) for r in pair}

    perm = []
    for pair in pairs:
        chosen = [r for r in pair if r in eta_phi]
        if len(chosen) != 1:
            raise InternalInconsistency("translated CM-type meets a conjugation pair twice")
        perm.append(index[coset_rep(setting, L, grp.mul(tau, chosen[0]))])
    return _permutation_sign(perm)


def _lift_to_group(setting: CMSetting, fld: Field, values: Mapping[int, int]) -> List[int]:
    return [values.get(coset_rep(setting, fld, g), 0) for g in setting.group.elements]


def _invert(setting: CMSetting, f: Sequence[int]) -> List[int]:
    return [f[setting.group.inv(g)] for g in setting.group.elements]


def _correlate(setting: CMSetting, f1: Sequence[int], f2: Sequence[int]) -> List[int]:
    """g -> sum_h f1(h) f2(g^-1 h); with f2 inverted this is the group-ring product."""
    grp = setting.group
    return [
        sum(f1[h] * f2[grp.mul(grp.inv(g), h)] for h in grp.elements if f1[h])
        for g in grp.elements
    ]


def xi_infinity_type(setting: CMSetting, decomposition: CriticalDecomposition) -> InfinityType:
    """
    Infinity type on the reflex field of the character built from a critical type.

    Raises:
        InternalInconsistency: If the convolution is not constant on cosets of H_E
            or breaks the weight identity
    """
    phi = decomposition.cm_type
    L = phi.field
    E, phi_star = reflex(setting, L, phi)
    grp = setting.group

    alpha = _lift_to_group(setting, L, decomposition.alpha.as_dict())
    beta = _lift_to_group(setting, L, decomposition.beta.as_dict())
    star = _lift_to_group(setting, E, {r: 1 for r in phi_star.members})
    conj_star_members = {coset_rep(setting, E, grp.mul(setting.conj, r)) for r in phi_star.members}
    conj_star = _lift_to_group(setting, E, {r: 1 for r in conj_star_members})

    total = [
        x + y for x, y in zip(
            _correlate(setting, alpha, _invert(setting, star)),
            _correlate(setting, beta, _invert(setting, conj_star)),
        )
    ]

    scale = len(L.subgroup)
    pushed: Dict[int, int] = {}
    for g in grp.elements:
        if total[g] % scale:
            raise InternalInconsistency("convolution is not divisible by [L':L]")
        rep = coset_rep(setting, E, g)
        value = total[g] // scale
        if pushed.setdefault(rep, value) != value:
            raise InternalInconsistency("convolution is not constant on cosets of the reflex field")

    xi = InfinityType.from_mapping(E, pushed)
    expected = decomposition.alpha.degree + decomposition.beta.degree
    for rep in _reps(setting, E):
        if xi.coeff(rep) + xi.coeff(_conj_rep(setting, E, rep)) != expected:
            raise InternalInconsistency("reflex character fails the weight identity")
    return xi


def alpha_field_check(setting: CMSetting, decomposition: CriticalDecomposition) -> Tuple[Field, Field]:
    """
    Stabilizer fields of alpha and beta; the first is CM, contains the reflex
    field, and contains the second.
    """
    E = stabilizer_field(setting, decomposition.cm_type)
    f_alpha = stabilizer_field(setting, decomposition.alpha)
    f_beta = stabilizer_field(setting, decomposition.beta)
    if not f_alpha.subgroup <= E.subgroup:
        raise InternalInconsistency("field of alpha does not contain the reflex field")
    if not f_alpha.subgroup <= f_beta.subgroup:
        raise InternalInconsistency("field of beta is not inside the field of alpha")
    if not is_cm_field(setting, f_alpha):
        raise InternalInconsistency("field of alpha is not CM")
    return f_alpha, f_beta


# --- built-in settings -----------------------------------------------------

def _cyclic_table(n: int) -> List[List[int]]:
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def setting_c2() -> CMSetting:
    """Imaginary quadratic field: G = C2, c the nontrivial element."""
    return make_setting(_cyclic_table(2), 1, {"K": [0], "Q": [0, 1]}, name="C2",
                        element_names=["1", "c"])


def setting_zeta5() -> CMSetting:
    """Q(zeta5): G = C4 generated by s: zeta -> zeta^2, c = s^2."""
    return make_setting(
        _cyclic_table(4), 2,
        {"Q(zeta5)": [0], "Q(sqrt5)": [0, 2], "Q": [0, 1, 2, 3]},
        name="zeta5",
        element_names=["1", "s", "s2", "s3"],
        embedding_labels=["e1", "e2", "e4", "e3"],
    )


def setting_biquadratic() -> CMSetting:
    """Q(zeta8) = Q(i, sqrt2): G = C2 x C2 with c fixing sqrt2 and s fixing i."""
    table = [[i ^ j for j in range(4)] for i in range(4)]
    return make_setting(
        table, 1,
        {"Q(zeta8)": [0], "Q(i)": [0, 2], "Q(sqrt2)": [0, 1], "Q(sqrt-2)": [0, 3], "Q": [0, 1, 2, 3]},
        name="C2xC2",
        element_names=["1", "c", "s", "cs"],
    )


def setting_s3() -> CMSetting:
    """
    Q(zeta3, cbrt2): G = S3 acting on the three cube roots, root 0 real.

    c swaps the two complex roots; A3 fixes Q(sqrt-3) and <c> fixes Q(cbrt2).
    """
    from itertools import permutations

    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    return make_setting(
        table, index[(0, 2, 1)],
        {
            "Q(zeta3,cbrt2)": [0],
            "Q(sqrt-3)": [index[(0, 1, 2)], index[(1, 2, 0)], index[(2, 0, 1)]],
            "Q(cbrt2)": [index[(0, 1, 2)], index[(0, 2, 1)]],
            "Q": list(range(6)),
        },
        name="S3",
        element_names=["1", "c", "rc", "r", "r2", "cr"],
    )


BUILTIN_SETTINGS = {
    "C2": setting_c2,
    "zeta5": setting_zeta5,
    "C4": setting_zeta5,
    "C2xC2": setting_biquadratic,
    "biquadratic": setting_biquadratic,
    "S3": setting_s3,
}
