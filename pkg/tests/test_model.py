from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congrue.arith import squarefree_part, valuation
from congrue.model import (
    ModelParseError,
    NonIntegralModelError,
    SingularModelError,
    Transformation,
    TwistAmbiguity,
    WeierstrassModel,
    invariants,
    is_quadratic_twist,
    minimal_model,
    parse_model,
    quadratic_twist,
    transform,
)

E = parse_model("[1,0,0,-8,27]")
E2 = parse_model("[1,0,0,8124402,-11887136703]")

CORPUS = [
    E,
    E2,
    parse_model("[0,-1,1,-10,-20]"),
    parse_model("[0,0,1,-1,0]"),
    parse_model("[0,1,1,-2,0]"),
    parse_model("[1,0,1,4,-6]"),
    parse_model("[0,0,1,0,-7]"),
    parse_model("[0,0,0,-1,0]"),
    parse_model("[0,0,0,0,1]"),
]


class TestParse:
    def test_paper_curves(self):
        assert E.ainvs == (1, 0, 0, -8, 27)
        assert E2.ainvs == (1, 0, 0, 8124402, -11887136703)

    def test_whitespace_tolerated(self):
        assert parse_model(" [ 1, 0 ,0, -8,  27 ] ") == E

    def test_singular_rejected(self):
        with pytest.raises(SingularModelError):
            parse_model("[0,0,0,0,0]")

    @pytest.mark.parametrize(
        "text,pos",
        [
            ("1,0,0,-8,27]", 0),
            ("[1,0,0,-8", 9),
            ("[1,0,0,-8,27", 12),
            ("[1;0,0,-8,27]", 2),
            ("[1,0,0,-8,27]x", 13),
            ("[1,0,0,-8,27,5]", 12),
            ("[a,0,0,-8,27]", 1),
        ],
    )
    def test_errors_carry_position(self, text, pos):
        with pytest.raises(ModelParseError) as err:
            parse_model(text)
        assert err.value.position == pos

    def test_str_roundtrip(self):
        for m in CORPUS:
            assert parse_model(str(m)) == m


class TestInvariants:
    def test_discriminant_of_e(self):
        assert invariants(E).disc == -297675
        assert -297675 == -(3**5) * 5**2 * 7**2

    def test_discriminant_of_e2(self):
        # Exact value for the stated coefficients; 13-part has exponent 17.
        d = invariants(E2).disc
        assert d == -(3**2) * 5**2 * 7**2 * 13**17
        assert valuation(d, 13)[0] == 17

    def test_c_invariants_of_e(self):
        inv = invariants(E)
        assert (inv.c4, inv.c6) == (385, -23905)
        assert inv.c4**3 - inv.c6**2 == 1728 * -297675

    def test_j_exact(self):
        assert invariants(E).j == Fraction(-46585, 243)

    def test_identities_on_corpus(self):
        for m in CORPUS:
            inv = invariants(m)
            assert inv.c4**3 - inv.c6**2 == 1728 * inv.disc
            assert 4 * inv.b8 == inv.b2 * inv.b6 - inv.b4**2
            assert inv.j == Fraction(inv.c4**3, inv.disc)


class TestTransformation:
    def test_identity(self):
        assert transform(E, Transformation.identity()) == E

    def test_half_scaling(self):
        t = Transformation.scale(Fraction(1, 2))
        assert transform(E, t) == parse_model("[2,0,0,-128,1728]")
        assert invariants(transform(E, t)).disc == 2**12 * -297675

    def test_roundtrip(self):
        t = Transformation(Fraction(1, 2), Fraction(3), Fraction(-1), Fraction(4))
        assert transform(transform(E, t), t.inverse()) == E

    def test_composition_matches_sequencing(self):
        t1 = Transformation(Fraction(1), Fraction(2), Fraction(-1), Fraction(3))
        t2 = Transformation(Fraction(1, 2), Fraction(-4), Fraction(2), Fraction(1))
        assert transform(transform(E, t1), t2) == transform(E, t1.then(t2))

    def test_non_integral_rejected(self):
        with pytest.raises(NonIntegralModelError):
            transform(E, Transformation.scale(2))

    @given(
        r=st.integers(-5, 5),
        s=st.integers(-5, 5),
        t=st.integers(-5, 5),
    )
    @settings(max_examples=60)
    def test_translations_preserve_disc_and_c4(self, r, s, t):
        tr = Transformation.shift(r=r, s=s, t=t)
        inv0, inv1 = invariants(E2), invariants(transform(E2, tr))
        assert (inv0.disc, inv0.c4, inv0.c6) == (inv1.disc, inv1.c4, inv1.c6)


class TestMinimalModel:
    def test_already_minimal(self):
        mm, t = minimal_model(E)
        assert mm == E and t.is_identity

    def test_scaled_model_reduces(self):
        mm, t = minimal_model(parse_model("[2,0,0,-128,1728]"))
        assert mm == E
        assert t.u == 2

    def test_e2_minimal_despite_large_13_valuation(self):
        # v_13(disc) = 17 >= 12 but v_13(c4) = 0, so no reduction exists.
        mm, t = minimal_model(E2)
        assert mm == E2 and t.is_identity

    def test_transformation_connects_input_and_output(self):
        raw = parse_model("[0,-36,216,-12960,-933120]")  # 11a1 scaled by 6
        mm, t = minimal_model(raw)
        assert mm == parse_model("[0,-1,1,-10,-20]")
        assert transform(raw, t) == mm

    def test_wild_prime_reduction(self):
        mm, _ = minimal_model(parse_model("[0,0,0,0,-432]"))
        assert mm == parse_model("[0,0,1,0,-7]")

    def test_idempotent_on_corpus(self):
        for m in CORPUS:
            mm, _ = minimal_model(m)
            again, t = minimal_model(mm)
            assert again == mm and t.is_identity

    def test_kraus_minimality_condition(self):
        for m in CORPUS:
            mm, _ = minimal_model(m)
            inv = invariants(mm)
            for q in (2, 3, 5, 7, 11, 13):
                v_disc = valuation(inv.disc, q)[0]
                v_c4 = valuation(inv.c4, q)[0] if inv.c4 else 99
                assert v_disc < 12 or v_c4 < 4


class TestQuadraticTwist:
    def test_trivial_twist(self):
        assert quadratic_twist(E, 1) == E

    def test_minus_one_twist_invariants(self):
        tw = quadratic_twist(E, -1)
        inv = invariants(tw)
        # c4 stays and c6 flips sign up to the 12th-power ambiguity; here the
        # pair (385, 23905) fails the 2-adic integrality conditions, so the
        # minimal model carries the u = 1/2 scaling of it.
        assert (inv.c4, inv.c6) == (385 * 2**4, 23905 * 2**6)
        assert minimal_model(tw)[0] == tw
        assert invariants(tw).j == invariants(E).j

    def test_involution(self):
        assert quadratic_twist(quadratic_twist(E, 5), 5) == E
        assert quadratic_twist(quadratic_twist(E2, -7), -7) == E2

    def test_rejects_bad_d(self):
        with pytest.raises(ValueError):
            quadratic_twist(E, 0)
        with pytest.raises(ValueError):
            quadratic_twist(E, 12)

    def test_invariant_scaling_up_to_twelfth_powers(self):
        for d in (-1, 5, -7, 11):
            tw = quadratic_twist(E, d)
            inv, inv0 = invariants(tw), invariants(E)
            # c4_d / (d^2 c4) = u^4 and disc_d / (d^6 disc) = u^12 for one u
            ratio = Fraction(inv.c4, d * d * inv0.c4)
            assert ratio > 0
            u4_num, u4_den = ratio.numerator, ratio.denominator
            disc_ratio = Fraction(inv.disc, d**6 * inv0.disc)
            assert disc_ratio == Fraction(u4_num**3, u4_den**3)


class TestIsQuadraticTwist:
    def test_self(self):
        assert is_quadratic_twist(E, E) == 1

    def test_recovers_d_small(self):
        for d in (-1, 2, 3, 5, -7, 11, -30, 29):
            assert is_quadratic_twist(E, quadratic_twist(E, d)) == d

    @pytest.mark.parametrize("d", [d for d in range(-30, 31) if d and squarefree_part(d) == d])
    def test_recovers_d_exhaustive(self, d):
        assert is_quadratic_twist(E, quadratic_twist(E, d)) == d

    def test_paper_pair_not_twists(self):
        assert is_quadratic_twist(E, E2) is None

    def test_special_j_flagged(self):
        a = parse_model("[0,0,0,0,1]")  # j = 0
        b = parse_model("[0,0,0,0,2]")
        assert is_quadratic_twist(a, b) is TwistAmbiguity.HIGHER_TWIST
        c = parse_model("[0,0,0,-1,0]")  # j = 1728
        d = parse_model("[0,0,0,-4,0]")
        assert is_quadratic_twist(c, d) is TwistAmbiguity.HIGHER_TWIST

    def test_distinct_generic_j(self):
        assert is_quadratic_twist(E, parse_model("[0,-1,1,-10,-20]")) is None
