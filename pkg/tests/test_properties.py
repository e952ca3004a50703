"""Randomized invariants. Hypothesis runs derandomized, so every run sees the same cases."""
import math
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from exotic7.exact import ExactMatrix, determinant, invert, parse_poly, resultant, smith_normal_form
from exotic7.fibers import McgWord, evaluate, free_reduce, parse_word
from exotic7.forms import SymForm, diagonal_form, invariants, is_characteristic, smoothability_obstructions
from exotic7.homology2 import H2Class, blow_up, pair
from exotic7.pencil import ProjPoint
from exotic7.plumbing import SurgeryPresentation, element_order, h1, hj_evaluate, hj_expand

FIXED = settings(derandomize=True, max_examples=150, deadline=None)

small_int = st.integers(-20, 20)
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@st.composite
def int_matrices(draw, max_dim=5):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return ExactMatrix([[draw(small_int) for _ in range(c)] for _ in range(r)])


@st.composite
def unimodular(draw, n):
    """Product of random elementary integer operations."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, 3 * n))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i == j:
            continue
        k = draw(st.integers(-3, 3))
        for col in range(n):
            rows[i][col] += k * rows[j][col]
    if n > 1 and draw(st.booleans()):
        rows[0], rows[1] = rows[1], rows[0]
    return ExactMatrix(rows)


@st.composite
def unimodular_forms(draw, max_dim=4):
    n = draw(st.integers(1, max_dim))
    base = diagonal_form([draw(st.sampled_from([1, -1])) for _ in range(n)])
    if n >= 2 and draw(st.booleans()):
        base = SymForm.from_rows([[0, 1], [1, 0]]).direct_sum(diagonal_form([1, -1, 1][: n - 2]))
    return base.change_basis(draw(unimodular(n)))


words = st.lists(st.tuples(st.sampled_from("ab"), st.integers(-4, 4).filter(bool)), max_size=10).map(
    lambda syl: McgWord(tuple(syl))
)


@st.composite
def classes(draw, n):
    return H2Class(n, draw(rationals), [draw(rationals) for _ in range(n)])


@FIXED
@given(int_matrices())
def test_snf_reconstructs(m):
    d = smith_normal_form(m)
    assert d.left_transform @ m @ d.right_transform == d.diagonal(m.nrows, m.ncols)
    assert abs(determinant(d.left_transform)) == 1 and abs(determinant(d.right_transform)) == 1
    f = d.invariant_factors
    assert all(b % a == 0 for a, b in zip(f, f[1:]))
    assert all(x > 0 for x in f)
    if m.nrows == m.ncols and determinant(m) != 0:
        assert math.prod(f) == abs(determinant(m))


@FIXED
@given(int_matrices())
def test_inverse_is_exact(m):
    if m.nrows != m.ncols or determinant(m) == 0:
        return
    assert m @ invert(m) == ExactMatrix.identity(m.nrows)


@FIXED
@given(unimodular_forms(), st.data())
def test_form_invariants_basis_independent(q, data):
    b = data.draw(unimodular(q.dim))
    assert invariants(q.change_basis(b)) == invariants(q)


@FIXED
@given(unimodular_forms(), unimodular_forms())
def test_direct_sum_and_negation(q1, q2):
    i1, i2, s = invariants(q1), invariants(q2), invariants(q1.direct_sum(q2))
    assert s.rank == i1.rank + i2.rank
    assert s.signature == i1.signature + i2.signature
    assert (s.parity == "even") == (i1.parity == i2.parity == "even")
    n = invariants(-q1)
    assert n.signature == -i1.signature and n.parity == i1.parity


@FIXED
@given(unimodular_forms())
def test_characteristic_square_mod8(q):
    rep = smoothability_obstructions(q)
    for x, sq, ok in rep.characteristic_checks:
        assert is_characteristic(x, q)
        assert ok and (sq - rep.signature) % 8 == 0


@FIXED
@given(st.integers(0, 5).flatmap(lambda n: st.tuples(classes(n), classes(n), classes(n), rationals, rationals)))
def test_pairing_bilinear_and_blowup(args):
    x, y, z, s, t = args
    assert pair(x * s + y * t, z) == s * pair(x, z) + t * pair(y, z)
    assert pair(x, y) == pair(y, x)
    assert pair(blow_up(x), blow_up(y)) == pair(x, y)


@FIXED
@given(words, words)
def test_evaluate_homomorphism(u, v):
    assert evaluate(u * v) == evaluate(u) @ evaluate(v)
    assert evaluate(free_reduce(u * v)) == evaluate(u * v)
    assert parse_word(str(u)) == u


@FIXED
@given(st.integers(2, 400).flatmap(lambda p: st.tuples(st.just(p), st.integers(1, p - 1))))
def test_hj_roundtrip(pq):
    p, q = pq
    if math.gcd(p, q) != 1:
        return
    coeffs = hj_expand(p, q)
    assert all(a >= 2 for a in coeffs)
    assert hj_evaluate(coeffs) == Fraction(p, q)


@FIXED
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6))
def test_h1_order_matches_determinant(framings):
    g = h1(SurgeryPresentation.chain(framings))
    d = abs(int(determinant(g.relation_matrix)))
    assert g.order() == (d if d else None)
    if d:
        exponent = g.torsion[-1] if g.torsion else 1
        for name in g.generators:
            assert exponent % element_order(g, name) == 0


@FIXED
@given(st.tuples(rationals, rationals, rationals).filter(any), rationals.filter(bool))
def test_projective_points_scale_invariant(coords, k):
    assert ProjPoint(coords) == ProjPoint(tuple(k * c for c in coords))


@FIXED
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 6), st.integers(1, 6))
def test_resultant_detects_common_root(r, s, a, b):
    f = parse_poly(f"(x - {r}) * (x + {a})")
    g = parse_poly(f"(x - {s}) * (x^2 + {b})")
    shared = r == s or -a == s
    assert resultant(f, g, "x").is_zero() == shared
