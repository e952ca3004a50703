import json

import pytest

from exotic7.errors import InputError, LedgerError
from exotic7.exact import ExactMatrix
from exotic7.homology2 import (
    H2Class,
    LedgerStep,
    blow_up,
    canonical_class,
    exceptional_multiplicity,
    gram,
    load_ledger,
    pair,
    parse_class,
    proper_transform,
    replay_ledger,
    wu_check,
)


class TestPair:
    def test_cubic_with_line(self):
        assert pair(parse_class("3h - e1"), parse_class("h - e1")) == 2

    def test_double_point_sphere(self):
        s = parse_class("12h + e9 - 4(e1..e9) - 2(e10..e13)")
        assert s.ambient.n == 13
        assert pair(s, s) == -9

    def test_h_squared(self):
        assert pair(H2Class.h(0), H2Class.h(0)) == 1

    def test_ambient_mismatch(self):
        with pytest.raises(InputError):
            pair(H2Class.h(1), H2Class.h(2))


class TestParseClass:
    def test_print_roundtrip(self):
        x = parse_class("3h - e1 - 2e10")
        assert parse_class(str(x), x.ambient.n) == x

    def test_explicit_ambient(self):
        assert parse_class("h", 3).ambient.n == 3

    def test_too_small_ambient(self):
        with pytest.raises(InputError):
            parse_class("e5", 3)

    def test_bad_index(self):
        with pytest.raises(InputError):
            parse_class("e0")

    def test_rational_coefficient(self):
        x = parse_class("1/2h - 3/4e2")
        assert not x.is_integral()


class TestBlowUp:
    def test_h(self):
        x = blow_up(H2Class.h(0))
        assert x.ambient.n == 1 and pair(x, x) == 1

    def test_e1(self):
        e1 = blow_up(H2Class.e(1, 1))
        assert pair(e1, H2Class.e(2, 2)) == 0

    def test_canonical_class_update(self):
        for n in range(0, 12):
            assert blow_up(canonical_class(n)) + H2Class.e(n + 1, n + 1) == canonical_class(n + 1)


class TestProperTransform:
    def test_cubic(self):
        assert proper_transform(blow_up(parse_class("3h", 0)), 1) == parse_class("3h - e1")

    def test_line(self):
        assert proper_transform(blow_up(H2Class.h(0)), 1) == parse_class("h - e1")

    def test_fibre_through_double_point(self):
        f = parse_class("3h - (e1..e9)")
        assert proper_transform(blow_up(f), 2) == parse_class("3h - (e1..e9) - 2e10")

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            proper_transform(blow_up(H2Class.h(0)), -1)


class TestLedgerStep:
    def test_first_e8_step(self):
        fibre = parse_class("3h - e1")
        step = LedgerStep(fibre, ((parse_class("h - e1"), 3),), 1)
        assert exceptional_multiplicity(step) == 2

    def test_inconsistent(self):
        fibre = parse_class("3h - e1")
        step = LedgerStep(fibre, ((parse_class("h - e1"), 2),), 1)
        with pytest.raises(LedgerError):
            exceptional_multiplicity(step)

    def test_negative_solution(self):
        fibre = parse_class("3h - e1")
        step = LedgerStep(fibre, ((parse_class("3h", 1), 1),), 1)
        with pytest.raises(LedgerError):
            exceptional_multiplicity(step)


class TestShippedLedgers:
    def test_e8_multiplicities(self):
        res = replay_ledger(load_ledger("e8"))
        assert res.multiplicities == (2, 4, 6, 5, 4, 3, 2, 1, 0)
        assert res.fiber_class == parse_class("3h - (e1..e9)")
        assert res.fiber_class.square == 0

    def test_e8_diagram(self):
        res = replay_ledger(load_ledger("e8"))
        comps = [c for _, c, _ in res.fibre_components()]
        g = gram(comps)
        assert len(comps) == 9
        assert all(g[i, i] == -2 for i in range(9))
        edges = sorted(tuple(sorted((i, j))) for i in range(9) for j in range(9) if i < j and g[i, j])
        assert all(g[i, j] == 1 for i, j in edges)
        assert len(edges) == 8
        degrees = sorted(sum(1 for e in edges if k in e) for k in range(9))
        # affine E8: a tree with one trivalent vertex and arms of length 1, 2, 5
        assert degrees == [1, 1, 1, 2, 2, 2, 2, 2, 3]

    def test_e6_components(self):
        res = replay_ledger(load_ledger("e6"))
        expected = {
            "S1": "e4 - e7",
            "S2": "e1 - e4",
            "S3": "h - e1 - e2 - e3",
            "S4": "e2 - e5",
            "S5": "e5 - e9",
            "S6": "e3 - e6",
            "S7": "e6 - e8",
        }
        for label, text in expected.items():
            cls, _ = res.labelled(label)
            assert cls == parse_class(text, 9)
            assert cls.square == -2

    def test_e6_sections_have_multiplicity_zero(self):
        res = replay_ledger(load_ledger("e6"))
        assert res.multiplicities[6:] == (0, 0, 0)
        assert res.multiplicities == (2, 2, 2, 1, 1, 1, 0, 0, 0)

    def test_conservation(self):
        for name in ("e8", "e6"):
            res = replay_ledger(load_ledger(name))
            total = H2Class.zero(9)
            for _, cls, m in res.components:
                total = total + cls * m
            assert total == res.fiber_class

    def test_bad_expectation(self):
        data = load_ledger("e8")
        data["steps"][1]["expect"] = 5
        with pytest.raises(LedgerError):
            replay_ledger(data)

    def test_unknown_component(self):
        data = load_ledger("e8")
        data["steps"][0]["through"] = {"nope": 1}
        with pytest.raises(LedgerError):
            replay_ledger(data)

    def test_from_file(self, tmp_path):
        path = tmp_path / "ledger.json"
        path.write_text(json.dumps(load_ledger("e6")))
        assert replay_ledger(load_ledger(str(path))).multiplicities[0] == 2

    def test_missing_file(self):
        with pytest.raises(InputError):
            load_ledger("/nonexistent/ledger.json")


class TestGramAndWu:
    def test_single(self):
        assert gram([H2Class.h(0)]) == ExactMatrix([[1]])

    def test_mismatch(self):
        with pytest.raises(InputError):
            gram([H2Class.h(0), H2Class.h(1)])

    @pytest.mark.parametrize("n,sigma,chi", [(9, -8, 12), (0, 1, 3), (13, -12, 16)])
    def test_wu(self, n, sigma, chi):
        assert wu_check(canonical_class(n), sigma, chi)

    def test_wu_wrong(self):
        assert not wu_check(canonical_class(9), -8, 11)
