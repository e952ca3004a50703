import json

import pytest

from exotic7.errors import InputError
from exotic7.fibers import (
    GEN_A,
    GEN_B,
    MONODROMY_TABLE,
    Factor,
    Factorization,
    FiberType,
    SL2Mat,
    WordSyntaxError,
    conjugates,
    euler_budget,
    evaluate,
    free_reduce,
    load_factorization,
    parse_config,
    parse_word,
    search_conjugator,
    verify_factorization,
)

IDENTITY = SL2Mat.identity()


class TestWords:
    def test_power_group(self):
        assert str(parse_word("(ab)^6")) == " ".join(["a b"] * 6)

    def test_inverse_syntax(self):
        w = parse_word("a^-1 b a")
        assert str(w) == "a^-1 b a"
        assert parse_word("Aba") == w

    def test_empty(self):
        assert len(parse_word("")) == 0
        assert evaluate(parse_word("")) == IDENTITY

    def test_roundtrip(self):
        for text in ["a^3 b^-2 a", "(ab)^4 a^2", "b^-1 a^-3 b a^3"]:
            w = parse_word(text)
            assert parse_word(str(w)) == w

    @pytest.mark.parametrize("text,pos", [("a c", 2), ("(ab", 0), ("a^", 1), ("a^x", 1), ("ab)", 2)])
    def test_syntax_error_position(self, text, pos):
        with pytest.raises(WordSyntaxError) as err:
            parse_word(text)
        assert err.value.position == pos

    def test_word_inverse(self):
        w = parse_word("a^2 b^-1 a")
        assert evaluate(w * w.inverse()) == IDENTITY


class TestEvaluate:
    def test_generators(self):
        assert evaluate(parse_word("a")).rows() == [[1, 1], [0, 1]]
        assert evaluate(parse_word("b")).rows() == [[1, 0], [-1, 1]]

    def test_relations(self):
        assert evaluate(parse_word("(ab)^6")) == IDENTITY
        assert evaluate(parse_word("(a^3 b)^3")) == IDENTITY

    def test_braid(self):
        assert evaluate(parse_word("aba")) == evaluate(parse_word("bab"))
        assert evaluate(parse_word("aba")).rows() == [[0, 1], [-1, 0]]

    def test_det_one_enforced(self):
        with pytest.raises(InputError):
            SL2Mat(1, 1, 1, 1)


class TestFreeReduce:
    def test_first_factorization(self):
        assert free_reduce(parse_word("a^2 (a^-1 b a) b")) == parse_word("abab")

    def test_cancel(self):
        assert len(free_reduce(parse_word("a a^-1"))) == 0

    def test_second_factorization(self):
        w = parse_word("a^6 (a^-3 b a^3) (b a b^-1)^2 b^2 (b^-1 a b)")
        assert free_reduce(w) == parse_word("a^3 b a^3 b a^3 b")

    def test_value_preserved(self):
        w = parse_word("b a a^-1 b^-1 a^2 B b a^-2 b^3")
        assert evaluate(free_reduce(w)) == evaluate(w)


class TestCatalogue:
    def test_table_matches_words(self):
        for name, rows in MONODROMY_TABLE.items():
            assert FiberType.parse(name).monodromy.rows() == rows

    def test_e6_entry(self):
        assert FiberType.parse("E6~").monodromy.rows() == [[-1, -1], [1, 0]]

    @pytest.mark.parametrize("name,euler", [
        ("I1", 1), ("I6", 6), ("II", 2), ("III", 3), ("IV", 4), ("I*0", 6), ("I*2", 8),
        ("E8~", 10), ("E7~", 9), ("E6~", 8), ("I0", 0),
    ])
    def test_euler(self, name, euler):
        assert FiberType.parse(name).euler == euler

    def test_duality(self):
        for a, b in (("II", "II*"), ("III", "III*"), ("IV", "IV*")):
            assert FiberType.parse(a).euler + FiberType.parse(b).euler == 12

    def test_aliases(self):
        assert FiberType.parse("II*") == FiberType.parse("E8~")
        assert FiberType.parse("I_6") == FiberType("I", 6)

    def test_unknown(self):
        with pytest.raises(InputError):
            FiberType.parse("V")


class TestBudget:
    def test_e6_four_fishtails(self):
        assert euler_budget(parse_config("E6~, I1x4")) == (12, True)

    def test_e6_cusp_rejected(self):
        assert euler_budget(parse_config("E6~, III, I1, I1")) == (13, False)

    def test_twelve_fishtails(self):
        assert euler_budget(parse_config("I1x12")) == (12, True)


class TestConjugacy:
    def test_search_finds_witness(self):
        m = evaluate(parse_word("a^-1 b a"))
        w = search_conjugator(m, GEN_A)
        assert w is not None
        assert conjugates(evaluate(w), m) == GEN_A

    def test_trace_mismatch_gives_none(self):
        assert search_conjugator(GEN_A, evaluate(parse_word("ba"))) is None

    def test_b_to_a(self):
        assert conjugates(evaluate(parse_word("ba")), GEN_B) == GEN_A


class TestVerify:
    @pytest.mark.parametrize("name", ["e6_fishtails", "i6_fishtails"])
    def test_shipped(self, name):
        rep = verify_factorization(load_factorization(name))
        assert rep.product_is_identity
        assert rep.conjugacy is True
        assert rep.euler_total == 12 and rep.euler_ok
        assert all(c.method == "witness" for c in rep.factor_checks)
        assert rep.passed
        assert "necessary" in rep.caveat

    def test_wrong_type(self):
        f = Factorization((Factor(parse_word("a"), FiberType.parse("II")),))
        rep = verify_factorization(f)
        assert rep.conjugacy is False
        assert rep.factor_checks[0].method == "trace"
        assert not rep.passed

    def test_bad_witness_falls_back_to_search(self):
        f = Factorization((Factor(parse_word("b"), FiberType.parse("I1"), parse_word("a")),))
        check = verify_factorization(f).factor_checks[0]
        assert check.status == "verified" and check.method == "search"

    def test_inconclusive_is_unknown(self):
        # a conjugate of the type II monodromy that the empty search cannot reach
        f = Factorization((Factor(parse_word("a^-2 b^-2 a b^3 a^2"), FiberType.parse("II")),))
        rep = verify_factorization(f, search_bound=0)
        assert rep.factor_checks[0].status == "unknown"
        assert rep.conjugacy is None
        assert not rep.passed
        found = verify_factorization(f, search_bound=6).factor_checks[0]
        assert found.status == "verified" and found.method == "search"

    def test_from_file(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"name": "x", "factors": [{"word": "(ab)^6", "type": "I0"}]}))
        rep = verify_factorization(load_factorization(str(path)))
        assert rep.product_is_identity and not rep.euler_ok

    def test_malformed(self):
        with pytest.raises(InputError):
            Factorization.from_json({"factors": [{"type": "I1"}]})
