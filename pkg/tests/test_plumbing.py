import math
from fractions import Fraction

import pytest

from exotic7.errors import InputError
from exotic7.exact import ExactMatrix, determinant
from exotic7.plumbing import (
    LensSpace,
    SurgeryPresentation,
    build_cp,
    chain_boundary,
    chain_gram,
    element_order,
    h1,
    hj_evaluate,
    hj_expand,
)

C7_FRAMINGS = (-9, -2, -2, -2, -2, -2)
C6_FRAMINGS = (-8, -2, -2, -2, -2)


class TestH1:
    def test_c7(self):
        g = h1(SurgeryPresentation.chain(C7_FRAMINGS))
        assert g.describe() == "Z_49"
        assert g.order() == 49

    def test_zero_surgery(self):
        g = h1(SurgeryPresentation.chain([0]))
        assert g.describe() == "Z" and g.order() is None

    def test_seven_surgery(self):
        assert h1(SurgeryPresentation.chain([7])).describe() == "Z_7"

    def test_rational_coefficient(self):
        # p/q surgery on the unknot gives Z_p
        pres = SurgeryPresentation((Fraction(5, 2),), ExactMatrix([[0]]))
        assert h1(pres).describe() == "Z_5"

    def test_bad_linking(self):
        with pytest.raises(InputError):
            SurgeryPresentation((1, 1), ExactMatrix([[0, 1], [2, 0]]))
        with pytest.raises(InputError):
            SurgeryPresentation((1,), ExactMatrix([[1]]))

    def test_order_matches_determinant(self):
        for framings in ([-2, -3], [-5, -2, -7], [3, 1, -4, 2]):
            g = h1(SurgeryPresentation.chain(framings))
            d = abs(int(determinant(g.relation_matrix)))
            if d:
                assert g.order() == d


class TestElementOrder:
    def test_every_c7_meridian_generates(self):
        g = h1(SurgeryPresentation.chain(C7_FRAMINGS))
        for name in g.generators:
            assert element_order(g, name) == 49

    def test_c6_middle_meridian(self):
        g = h1(SurgeryPresentation.chain(C6_FRAMINGS))
        assert g.describe() == "Z_36"
        orders = [element_order(g, name) for name in g.generators]
        assert orders == [36, 9, 12, 18, 36]
        assert element_order(g, "a3") == 18

    def test_infinite(self):
        assert element_order(h1(SurgeryPresentation.chain([0])), "a0") is None

    def test_unknown_generator(self):
        with pytest.raises(InputError):
            element_order(h1(SurgeryPresentation.chain([3])), "b0")

    def test_divides_exponent(self):
        for framings in ([-8, -2, -2], [-6, -3, -2, -4], [4, 6]):
            g = h1(SurgeryPresentation.chain(framings))
            exponent = g.torsion[-1]
            for name in g.generators:
                assert exponent % element_order(g, name) == 0


class TestContinuedFractions:
    def test_c7(self):
        assert hj_expand(49, 6) == [9, 2, 2, 2, 2, 2]

    def test_single(self):
        assert hj_expand(4, 1) == [4]

    def test_25_4(self):
        assert hj_expand(25, 4) == [7, 2, 2, 2]

    @pytest.mark.parametrize("p,q", [(4, 2), (3, 3), (3, 0), (2, 5)])
    def test_invalid(self, p, q):
        with pytest.raises(InputError):
            hj_expand(p, q)

    def test_roundtrip_all(self):
        for p in range(2, 61):
            for q in range(1, p):
                if math.gcd(p, q) == 1:
                    coeffs = hj_expand(p, q)
                    assert all(a >= 2 for a in coeffs)
                    assert hj_evaluate(coeffs) == Fraction(p, q)


class TestLens:
    def test_c7_boundary(self):
        assert chain_boundary(C7_FRAMINGS) == LensSpace(49, 6)

    def test_single(self):
        assert chain_boundary([-4]) == LensSpace(4, 1)

    def test_two_twos(self):
        assert chain_boundary([-2, -2]) == LensSpace(3, 2)

    def test_framing_out_of_range(self):
        with pytest.raises(InputError):
            chain_boundary([-3, -1])

    def test_mirror(self):
        m = LensSpace.of(49, -6)
        assert m.mirror and m.q == 6
        assert m.oriented_q() == 43
        assert m.homeomorphic(LensSpace(49, 6))

    def test_classification(self):
        assert LensSpace(7, 2).homeomorphic(LensSpace(7, 4))  # 2 * 4 = 1 mod 7
        assert not LensSpace(7, 1).homeomorphic(LensSpace(7, 2))


class TestCp:
    def test_p7(self, c7_matrix):
        cp = build_cp(7)
        assert cp.configuration_gram == c7_matrix
        assert cp.det == 49

    def test_p2(self):
        cp = build_cp(2)
        assert cp.framings == (-4,)
        assert cp.boundary == LensSpace(4, 1)

    def test_p3(self):
        cp = build_cp(3)
        assert cp.framings == (-5, -2) and cp.det == 9

    def test_range(self):
        for p in range(2, 21):
            cp = build_cp(p)
            assert abs(cp.det) == p * p
            assert cp.boundary == LensSpace(p * p, p - 1)
            assert hj_expand(p * p, p - 1) == [p + 2] + [2] * (p - 2)

    def test_small_p_rejected(self):
        with pytest.raises(InputError):
            build_cp(1)

    def test_chain_gram_tridiagonal(self):
        g = chain_gram([-3, -4, -5])
        assert g.rows == ((-3, 1, 0), (1, -4, 1), (0, 1, -5))
