import random
from dataclasses import replace
from fractions import Fraction

import pytest

from exotic7.errors import InputError
from exotic7.exact import ExactMatrix, invert
from exotic7.forms import FormInvariants, blown_up_plane, freedman_homeomorphic, invariants
from exotic7.homology2 import H2Class, canonical_class, gram, pair, parse_class
from exotic7.parkpipeline import (
    SYMBOLS,
    LinearForm,
    PositivityCertificate,
    blowdown_bookkeeping,
    blowdown_pairing,
    build_c7_embedding,
    chain_matches_cp,
    find_certificate,
    omega_class,
    pair_in_config,
    park_report,
    restrict,
    shipped_certificate,
    verify_certificate,
    x7_invariants,
)

A = LinearForm.symbol("a")
B = {i: LinearForm.symbol(f"b{i}") for i in range(1, 14)}


def form(a, bs):
    total = A * a
    for i, c in enumerate(bs, 1):
        total = total + B[i] * c
    return total


PARK_FUNCTIONAL = form(54, [-18, -16, -20, -18, -16, -17, -18, -17, -16, -5, -5, -5, -5]) * Fraction(1, 7)


@pytest.fixture(scope="module")
def emb():
    return build_c7_embedding()


class TestLinearForm:
    def test_arith(self):
        f = A * 3 - B[1] + B[2] * Fraction(1, 2)
        assert f.coefficient("a") == 3 and f.coefficient("b2") == Fraction(1, 2)
        assert f - f == 0

    def test_evaluate(self):
        f = A * 2 - B[13]
        assert f.evaluate({"a": 1, "b13": Fraction(1, 3)}) == Fraction(5, 3)

    def test_product_of_forms_rejected(self):
        with pytest.raises(TypeError):
            A * B[1]


class TestEmbedding:
    def test_gram_is_chain(self, emb, c7_matrix):
        assert gram(emb.classes) == c7_matrix == emb.P
        assert chain_matches_cp(emb)

    def test_double_point_sphere(self, emb):
        u6 = emb.classes[5]
        assert u6 == parse_class("12h + e9 - 4(e1..e9) - 2(e10..e13)")
        assert pair(u6, u6) == -9
        assert pair(emb.classes[4], u6) == 1

    def test_inverse(self, emb):
        assert emb.T == invert(emb.P)
        assert emb.T @ emb.P == ExactMatrix.identity(6)
        assert emb.T.row(5) == tuple(Fraction(-k, 49) for k in range(1, 7))

    def test_components_come_from_ledger(self, emb):
        expected = ["e4 - e7", "e1 - e4", "h - e1 - e2 - e3", "e2 - e5", "e5 - e9"]
        for u, text in zip(emb.classes, expected):
            assert u == parse_class(text, 13)


class TestRestrict:
    def test_canonical(self, emb):
        assert restrict(canonical_class(13), emb) == (0, 0, 0, 0, 0, 7)

    def test_omega(self, emb):
        b = B
        got = restrict(omega_class(13), emb)
        expected = (
            b[4] - b[7],
            b[1] - b[4],
            A - b[1] - b[2] - b[3],
            b[2] - b[5],
            b[5] - b[9],
            A * 12 + b[9] - sum((b[i] * 4 for i in range(1, 10)), LinearForm.zero())
            - sum((b[i] * 2 for i in range(10, 14)), LinearForm.zero()),
        )
        assert got == expected

    def test_u1(self, emb):
        assert restrict(emb.classes[0], emb) == emb.P.row(0)

    def test_linear(self, emb):
        rng = random.Random(5)
        for _ in range(50):
            x = H2Class(13, rng.randint(-9, 9), [rng.randint(-9, 9) for _ in range(13)])
            y = H2Class(13, rng.randint(-9, 9), [rng.randint(-9, 9) for _ in range(13)])
            lhs = restrict(x + y, emb)
            rhs = tuple(p + q for p, q in zip(restrict(x, emb), restrict(y, emb)))
            assert lhs == rhs

    def test_ambient_mismatch(self, emb):
        with pytest.raises(InputError):
            restrict(canonical_class(12), emb)


class TestPairings:
    def test_gamma6_squared(self, emb):
        g6 = (0, 0, 0, 0, 0, 1)
        assert pair_in_config(g6, g6, emb) == Fraction(-6, 49)

    def test_gamma6_gamma1(self, emb):
        assert pair_in_config((0, 0, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0), emb) == Fraction(-1, 49)

    def test_config_pairing(self, emb):
        kr = restrict(canonical_class(13), emb)
        wr = restrict(omega_class(13), emb)
        expected = form(75, [-25, -23, -27, -25, -23, -24, -25, -24, -23, -12, -12, -12, -12]) * Fraction(-1, 7)
        assert pair_in_config(kr, wr, emb) == expected

    def test_blowdown_functional(self, emb):
        assert blowdown_pairing(canonical_class(13), omega_class(13), emb) == PARK_FUNCTIONAL

    def test_zero_omega(self, emb):
        assert blowdown_pairing(canonical_class(13), H2Class.zero(13), emb) == 0

    def test_k_dot_omega(self):
        total = A * -3
        for i in range(1, 14):
            total = total + B[i]
        assert pair(canonical_class(13), omega_class(13)) == total

    def test_pairing_splits_into_complement_and_chain(self, emb):
        k, w = canonical_class(13), omega_class(13)
        lhs = blowdown_pairing(k, w, emb) + pair_in_config(restrict(k, emb), restrict(w, emb), emb)
        assert lhs == pair(k, w)


class TestCertificate:
    def test_shipped(self):
        assert verify_certificate(PARK_FUNCTIONAL, shipped_certificate())

    def test_a_alone(self):
        cert = PositivityCertificate(Fraction(1, 3), [0] * 13, [Fraction(1, 3)] * 13)
        assert verify_certificate(A, cert)

    def test_minus_a(self):
        for cert in (shipped_certificate(), PositivityCertificate(Fraction(1, 3), [0] * 13, [Fraction(1, 3)] * 13)):
            assert not verify_certificate(-A, cert)

    def test_negative_weight_rejected(self):
        cert = PositivityCertificate(1, [0] * 13, [-1] + [0] * 12)
        assert not verify_certificate(A * 3 - B[1] * 2 + B[2] * 0, cert)

    def test_zero_lambda_rejected(self):
        cert = PositivityCertificate(0, [1] + [0] * 12, [0] * 13)
        assert not verify_certificate(A - B[1], cert)

    def test_symbol_mismatch(self):
        with pytest.raises(InputError):
            verify_certificate(LinearForm.symbol("x", ("x", "y")), shipped_certificate())

    def test_perturbations_rejected(self):
        cert = shipped_certificate()
        bump = Fraction(1, 7)
        perturbed = [replace(cert, lambda0=cert.lambda0 + bump)]
        for field_name in ("chain_weights", "tail_weights"):
            weights = getattr(cert, field_name)
            for i in range(len(weights)):
                for delta in (bump, -bump):
                    w = list(weights)
                    w[i] += delta
                    perturbed.append(replace(cert, **{field_name: tuple(w)}))
        assert len(perturbed) == 1 + 4 * 13
        assert not any(verify_certificate(PARK_FUNCTIONAL, c) for c in perturbed)

    def test_found_certificate(self):
        cert = find_certificate(PARK_FUNCTIONAL)
        assert cert is not None and verify_certificate(PARK_FUNCTIONAL, cert)
        assert find_certificate(-A) is None

    def test_sampled_points_positive(self):
        rng = random.Random(2024)
        for _ in range(1000):
            a = Fraction(rng.randint(1, 1000), rng.randint(1, 50))
            bs = sorted((a * Fraction(rng.randint(0, 1000), 1000) for _ in range(13)), reverse=True)
            total = sum(bs)
            limit = 3 * a - Fraction(1, 1000)
            if total > limit:
                bs = [b * limit / total for b in bs]
            values = {"a": a, **{f"b{i}": b for i, b in enumerate(bs, 1)}}
            assert 3 * a - sum(bs) >= Fraction(1, 1000)
            assert PARK_FUNCTIONAL.evaluate(values) > 0


class TestBookkeeping:
    def test_c7(self):
        before = FormInvariants.from_counts(1, 13, "odd")
        after = blowdown_bookkeeping(before, 7)
        assert (after.b2_plus, after.b2_minus, after.rank, after.signature) == (1, 7, 8, -6)
        assert after.parity == "odd"

    def test_too_small(self):
        with pytest.raises(InputError):
            blowdown_bookkeeping(FormInvariants.from_counts(1, 6, "odd"), 7)

    def test_p2(self):
        after = blowdown_bookkeeping(FormInvariants.from_counts(1, 13, "odd"), 2)
        assert (after.b2_plus, after.b2_minus) == (1, 12)

    def test_x7_vs_plane(self):
        x7 = x7_invariants()
        assert x7.triple == invariants(blown_up_plane(7)).triple
        assert freedman_homeomorphic(x7, blown_up_plane(7), both_smooth=True)


def test_report(c7_matrix):
    rep = park_report()
    assert rep.embedding.P == c7_matrix
    assert rep.functional == PARK_FUNCTIONAL
    assert rep.certificate_ok
    assert rep.after.triple == (8, -6, "odd")
    assert SYMBOLS[0] == "a" and len(SYMBOLS) == 14
