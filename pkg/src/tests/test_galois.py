"""Tests for the finite Galois model: fields, CM-types, reflexes, signs and critical types."""

import pytest
from hypothesis import given, strategies as st

from src.core.exceptions import ConjNotInvolution, NotACMType, NotAGroup, NotHeckeCharacterType, SubgroupNotClosed
from src.services import galois
from src.services.galois import CMType, Embedding, InfinityType


def _all_cm_types(setting):
    for fld in setting.fields:
        for phi in galois.cm_types(setting, fld):
            yield fld, phi


class TestSettings:
    def test_rejects_non_group_table(self):
        with pytest.raises(NotAGroup):
            galois.make_setting([[0, 1], [0, 1]], 1, {})

    def test_rejects_identity_as_conjugation(self):
        with pytest.raises(ConjNotInvolution):
            galois.make_setting([[0, 1], [1, 0]], 0, {})

    def test_rejects_subset_that_is_not_a_subgroup(self):
        table = [[(i + j) % 4 for j in range(4)] for i in range(4)]
        with pytest.raises(SubgroupNotClosed):
            galois.make_setting(table, 2, {"bad": [0, 1]})

    def test_top_field_registered_when_missing(self):
        setting = galois.make_setting([[0, 1], [1, 0]], 1, {"Q": [0, 1]})
        assert setting.top.subgroup == frozenset({0})

    def test_zeta5_labels(self, zeta5):
        assert [zeta5.label(zeta5.top, r) for r in range(4)] == ["e1", "e2", "e4", "e3"]
        assert zeta5.element("s") == 1
        assert zeta5.element("e3") == 3


class TestFields:
    def test_cm_predicates(self):
        s3 = galois.setting_s3()
        assert galois.is_cm_field(s3, "Q(sqrt-3)")
        assert galois.is_totally_imaginary(s3, s3.top)
        assert not galois.is_cm_field(s3, s3.top)
        assert not galois.is_totally_imaginary(s3, "Q(cbrt2)")
        assert galois.maximal_cm_subfield(s3, s3.top).name == "Q(sqrt-3)"

    def test_biquadratic_subfields(self):
        setting = galois.setting_biquadratic()
        assert galois.is_cm_field(setting, "Q(i)")
        assert galois.is_cm_field(setting, "Q(sqrt-2)")
        assert galois.is_totally_real(setting, "Q(sqrt2)")

    def test_cm_type_counts(self, zeta5):
        assert len(galois.cm_types(zeta5, zeta5.top)) == 4
        assert galois.cm_types(zeta5, "Q(sqrt5)") == []
        assert len(galois.cm_types(galois.setting_s3(), "Q(zeta3,cbrt2)")) == 2

    def test_lift_then_degree(self):
        s3 = galois.setting_s3()
        mu = InfinityType.from_mapping(s3.field("Q(sqrt-3)"), {0: 2})
        lifted = galois.lift_type(s3, mu, s3.top)
        assert lifted.degree == 6


class TestReflex:
    def test_zeta5_reflex(self, zeta5):
        phi = CMType(zeta5.top, frozenset({zeta5.element("e1"), zeta5.element("e2")}))
        E, phi_star = galois.reflex(zeta5, zeta5.top, phi)
        assert E.subgroup == zeta5.top.subgroup
        assert {zeta5.label(E, r) for r in phi_star.members} == {"e1", "e3"}

    def test_double_reflex_is_identity_on_c4(self, zeta5):
        for phi in galois.cm_types(zeta5, zeta5.top):
            E, phi_star = galois.reflex(zeta5, zeta5.top, phi)
            E2, phi_2 = galois.reflex(zeta5, E, phi_star)
            assert E2.subgroup == zeta5.top.subgroup
            assert phi_2.members == phi.members

    def test_double_reflex_field_is_a_subfield(self, any_setting):
        for fld, phi in _all_cm_types(any_setting):
            E, phi_star = galois.reflex(any_setting, fld, phi)
            E2, _ = galois.reflex(any_setting, E, phi_star)
            assert fld.subgroup <= E2.subgroup

    def test_s3_lifted_type(self):
        s3 = galois.setting_s3()
        a3 = s3.field("Q(sqrt-3)")
        E, phi_star = galois.reflex(s3, s3.top, CMType(s3.top, a3.subgroup))
        assert E.subgroup == a3.subgroup
        assert phi_star.members == frozenset({galois.coset_rep(s3, E, s3.group.identity)})

    def test_rejects_non_cm_type(self, zeta5):
        phi = CMType(zeta5.top, frozenset({zeta5.element("e1"), zeta5.element("e4")}))
        with pytest.raises(NotACMType):
            galois.reflex(zeta5, zeta5.top, phi)


class TestEpsilonSign:
    def test_c4_example(self, zeta5):
        phi = CMType(zeta5.top, frozenset({zeta5.element("e1"), zeta5.element("e2")}))
        eta = Embedding(0, zeta5.top)
        assert galois.epsilon_sign(zeta5, phi, eta, zeta5.element("s")) == -1

    def test_identity_gives_plus_one(self, any_setting):
        for _, phi in _all_cm_types(any_setting):
            E, _ = galois.reflex(any_setting, phi.field, phi)
            for eta in galois.embeddings(any_setting, E):
                assert galois.epsilon_sign(any_setting, phi, eta, any_setting.group.identity) == 1

    def test_cocycle_law(self, any_setting):
        grp = any_setting.group
        for _, phi in _all_cm_types(any_setting):
            E, _ = galois.reflex(any_setting, phi.field, phi)
            for eta in galois.embeddings(any_setting, E):
                for t1 in grp.elements:
                    for t2 in grp.elements:
                        moved = Embedding(galois.coset_rep(any_setting, E, grp.mul(t2, eta.rep)), E)
                        assert galois.epsilon_sign(any_setting, phi, eta, grp.mul(t1, t2)) == (
                            galois.epsilon_sign(any_setting, phi, moved, t1)
                            * galois.epsilon_sign(any_setting, phi, eta, t2)
                        )


class TestCriticalTypes:
    def test_c2_decomposition(self):
        c2 = galois.setting_c2()
        mu = InfinityType.from_mapping(c2.top, {0: -3, 1: 2})
        decomposition = galois.critical_decompose(c2, mu)
        assert decomposition.alpha.as_dict() == {0: 3}
        assert decomposition.beta.as_dict() == {1: 2}
        assert decomposition.weight == -1

    def test_no_sign_pattern(self):
        c2 = galois.setting_c2()
        mu = InfinityType.from_mapping(c2.top, {0: -1, 1: -1})
        assert galois.critical_decompose(c2, mu) is None

    def test_not_hecke_type(self, zeta5):
        mu = InfinityType.from_mapping(zeta5.top, {zeta5.element("e1"): 1})
        with pytest.raises(NotHeckeCharacterType):
            galois.critical_decompose(zeta5, mu)

    def test_xi_goldens(self, zeta5):
        c2 = galois.setting_c2()
        mu = InfinityType.from_mapping(c2.top, {0: -3, 1: 2})
        assert galois.xi_infinity_type(c2, galois.critical_decompose(c2, mu)).as_dict() == {0: 5}

        e1, e2, e3 = (zeta5.element(x) for x in ("e1", "e2", "e3"))
        mu = InfinityType.from_mapping(zeta5.top, {e1: -1, e2: -1})
        xi = galois.xi_infinity_type(zeta5, galois.critical_decompose(zeta5, mu))
        assert xi.as_dict() == {e1: 2, e2: 1, e3: 1}

    def test_enumerated_types_satisfy_weight_identity(self, any_setting):
        for fld in any_setting.fields:
            if not galois.is_totally_imaginary(any_setting, fld):
                continue
            for decomposition in galois.critical_types(any_setting, fld, 2):
                xi = galois.xi_infinity_type(any_setting, decomposition)
                assert xi.degree * 2 == (decomposition.alpha.degree + decomposition.beta.degree) * len(
                    galois.embeddings(any_setting, xi.field)
                )
                galois.alpha_field_check(any_setting, decomposition)

    @given(
        name=st.sampled_from(["C2", "C4", "C2xC2", "S3"]),
        data=st.data(),
    )
    def test_decompose_round_trip(self, name, data):
        setting = galois.BUILTIN_SETTINGS[name]()
        K = galois.maximal_cm_subfield(setting, setting.top)
        phi = data.draw(st.sampled_from(galois.cm_types(setting, K)))
        w = data.draw(st.integers(-3, 3))
        mapping = {}
        for r in sorted(phi.members):
            alpha = data.draw(st.integers(max(1, -w), 5))
            mapping[r] = -alpha
            mapping[galois.coset_rep(setting, K, setting.group.mul(setting.conj, r))] = w + alpha
        mu = galois.lift_type(setting, InfinityType.from_mapping(K, mapping), setting.top)
        decomposition = galois.critical_decompose(setting, mu)
        assert decomposition is not None
        assert decomposition.mu == mu
        assert decomposition.weight == w
