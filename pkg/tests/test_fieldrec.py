from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cuspfield.errors import DependentRows, FieldDescriptionIncomplete, NoRelationFound, PrecisionTooLow
from cuspfield.fieldrec import (
    describe_field,
    is_lll_reduced,
    lll_reduce,
    membership,
    minimal_polynomial,
    precision_floor,
    same_field,
    stable_minimal_polynomial,
)

BITS = 512


def num(expr, bits=BITS):
    """``expr`` evaluated by sympy to ``bits`` bits, as an mpmath complex."""
    digits = int(bits * 0.302) + 20
    v = sympy.N(expr, digits)
    with mpmath.workprec(bits + 64):
        return mpmath.mpc(mpmath.mpf(str(sympy.re(v))), mpmath.mpf(str(sympy.im(v))))


# ---------------------------------------------------------------------------
# LLL


def test_identity_is_already_reduced():
    eye = [[int(i == j) for j in range(4)] for i in range(4)]
    red = lll_reduce(eye)
    assert red.rows == eye
    assert red.transform == eye


def test_two_dimensional_example():
    red = lll_reduce([[4, 1], [3, 1]])
    assert sorted(map(tuple, map(lambda r: [abs(x) for x in r], red.rows))) == [(0, 1), (1, 0)]
    assert is_lll_reduced(red.rows)


def test_dependent_rows():
    with pytest.raises(DependentRows):
        lll_reduce([[1, 2], [2, 4]])
    with pytest.raises(DependentRows):
        lll_reduce([[0, 0], [1, 0]])


def _gram_schmidt_norms(rows):
    bstar = []
    for r in rows:
        v = [Fraction(x) for x in r]
        for b in bstar:
            mu = sum(x * y for x, y in zip(r, b)) / sum(y * y for y in b)
            v = [x - mu * y for x, y in zip(v, b)]
        bstar.append(v)
    return [sum(x * x for x in v) for v in bstar]


def _det(m):
    return sympy.Matrix(m).det()


square = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-60, 60), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=80, deadline=None)
@given(square)
def test_lll_properties(rows):
    if _det(rows) == 0:
        with pytest.raises(DependentRows):
            lll_reduce(rows)
        return
    red = lll_reduce(rows)
    assert is_lll_reduced(red.rows)
    # the transform is unimodular and reproduces the reduced rows
    assert abs(_det(red.transform)) == 1
    assert (sympy.Matrix(red.transform) * sympy.Matrix(rows)).tolist() == red.rows
    # first vector within 2^((n-1)/2) of every Gram-Schmidt length of the input
    n = len(rows)
    first = sum(x * x for x in red.rows[0])
    assert first <= 2 ** (n - 1) * min(_gram_schmidt_norms(rows)) or first <= 2 ** (n - 1) * min(
        _gram_schmidt_norms(red.rows)
    )
    # volume is preserved
    assert abs(_det(red.rows)) == abs(_det(rows))


# ---------------------------------------------------------------------------
# minimal polynomials


@pytest.mark.parametrize(
    "expr,coeffs",
    [
        (sympy.I, (1, 0, 1)),
        ((1 + sympy.sqrt(5)) / 2, (-1, -1, 1)),
        (sympy.sqrt(-3), (3, 0, 1)),
        (sympy.Rational(-7, 3), (7, 3)),
        ((1 + sympy.sqrt(-3)) / 2, (1, -1, 1)),
    ],
)
def test_known_minimal_polynomials(expr, coeffs):
    p = minimal_polynomial(num(expr), bits=BITS)
    assert p.coeffs == coeffs
    assert p.residual < mpmath.mpf(2) ** -(BITS // 2)


@pytest.mark.parametrize(
    "expr",
    [
        sympy.sqrt(2) + sympy.sqrt(3),
        sympy.root(2, 3) + sympy.I,
        sympy.exp(2 * sympy.pi * sympy.I / 7),
        sympy.sqrt(-3 - 4 * sympy.cos(sympy.pi / 5) + 4 * sympy.cos(sympy.pi / 5) ** 2),
    ],
)
def test_agrees_with_exact_algebra(expr):
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.minimal_polynomial(expr, x), x)
    want = tuple(int(c) for c in reversed(ref.all_coeffs()))
    p = stable_minimal_polynomial(num(expr, 2 * BITS), bits=BITS)
    assert p.coeffs == want


def test_precision_floor():
    assert precision_floor(8, 64) == 384
    with pytest.raises(PrecisionTooLow):
        minimal_polynomial(mpmath.mpc(0, 1), bits=128)


def test_transcendental_has_no_relation():
    with pytest.raises(NoRelationFound):
        minimal_polynomial(num(sympy.pi), bits=BITS)
    with pytest.raises(NoRelationFound):
        stable_minimal_polynomial(num(sympy.E + sympy.I, 2 * BITS), bits=BITS)


def test_degree_beyond_sweep():
    # 2^(1/9) has degree 9, so a sweep to 8 finds nothing
    with pytest.raises(NoRelationFound):
        minimal_polynomial(num(sympy.root(2, 9)), bits=BITS)


@settings(max_examples=25, deadline=None)
@given(st.integers(-9, 9), st.integers(1, 9), st.integers(-9, 9).filter(bool), st.integers(1, 6))
def test_quadratic_minimality(a, b, c, d):
    """(a + c sqrt(-d)) / b has the minimal polynomial exact algebra gives."""
    expr = (a + c * sympy.sqrt(-d)) / b
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.minimal_polynomial(expr, x), x)
    want = tuple(int(k) for k in reversed(ref.all_coeffs()))
    assert minimal_polynomial(num(expr), bits=BITS).coeffs == want


def test_conjugate_has_same_polynomial():
    z = num(sympy.root(2, 3) + sympy.I)
    assert minimal_polynomial(z, bits=BITS).coeffs == minimal_polynomial(mpmath.conj(z), bits=BITS).coeffs


def test_format():
    p = minimal_polynomial(num((1 + sympy.sqrt(-3)) / 2), bits=BITS)
    assert p.format() == "x^2 - x + 1"
    assert p.to_json() == {"coeffs": [1, -1, 1], "degree": 2}


# ---------------------------------------------------------------------------
# membership and field equality


def test_same_field_examples():
    i = mpmath.mpc(0, 1)
    res = same_field(i, 2 * i, 2, bits=BITS)
    assert res.equal
    assert res.witness.coeffs == (0, 2)
    with mpmath.workprec(BITS):
        r2, r3 = mpmath.sqrt(2), mpmath.sqrt(3)
        assert not same_field(r2, r3, 2, bits=BITS).equal
        # Q(sqrt 2) sits inside Q(sqrt 2 + sqrt 3) but is smaller
        s = r2 + r3
        res = same_field(s, r2, 4, bits=BITS)
        assert not res.equal and res.witness is not None


def test_membership_witness():
    with mpmath.workprec(BITS + 32):
        g = num(sympy.sqrt(-3))
        z = (1 + g) / 2
        w = membership(g, z, 2, bits=BITS)
        assert w.coeffs == (Fraction(1, 2), Fraction(1, 2))
        assert abs(w(g) - z) < mpmath.mpf(2) ** -(BITS // 2)
        assert w.format() == "1/2 + 1/2*g"
    with pytest.raises(PrecisionTooLow):
        membership(g, z, 8, bits=64)


def test_cubic_membership():
    with mpmath.workprec(BITS + 32):
        a = num(sympy.root(2, 3))
        w = membership(a, a * a - 3 * a + mpmath.mpf(1) / 5, 3, bits=BITS)
        assert w.coeffs == (Fraction(1, 5), -3, 1)


# ---------------------------------------------------------------------------
# describe_field


def test_rational_labels_give_degree_one():
    labels = [("a", mpmath.mpf(1) / 3), ("b", mpmath.mpf(-2)), ("c", mpmath.mpf(0))]
    with mpmath.workprec(2 * BITS):
        desc = describe_field(labels, bits=BITS)
    assert desc.polynomial.degree == 1
    assert not desc.failures
    assert set(desc.members) == {"a", "b", "c"}


def test_describe_quadratic_field():
    with mpmath.workprec(2 * BITS + 32):
        g = num(sympy.sqrt(-3), 2 * BITS)
        labels = [("u", mpmath.mpc(1)), ("w", (1 + g) / 2), ("v", g / 3 - 2)]
        desc = describe_field(labels, bits=BITS)
    assert desc.generator == "w"
    assert desc.polynomial.coeffs == (1, -1, 1)
    assert desc.members["v"].coeffs == (Fraction(-7, 3), Fraction(2, 3))


def test_primitive_element_fallback():
    with mpmath.workprec(2 * BITS + 32):
        labels = [("a", num(sympy.sqrt(2), 2 * BITS)), ("b", num(sympy.sqrt(3), 2 * BITS))]
        desc = describe_field(labels, bits=BITS)
    assert desc.polynomial.degree == 4
    assert not desc.failures
    assert desc.generator.startswith("a + ")


def test_nothing_recognisable():
    with mpmath.workprec(2 * BITS):
        labels = [("p", +mpmath.pi), ("e", +mpmath.e)]
        with pytest.raises(FieldDescriptionIncomplete):
            describe_field(labels, bits=BITS)
