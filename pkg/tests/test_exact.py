"""Exact arithmetic kernel: polynomials, rational functions, pi-polynomials
and truncated Laurent series."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s1fc.errors import SingularLimit, ZeroDenominator
from s1fc.exact import (
    BigFloat,
    LaurentSeries,
    PiPoly,
    Poly,
    RationalFunction,
    decimal_str,
    parse_pipoly,
    pipoly_eval,
)

fractions = st.fractions(
    min_value=-6, max_value=6, max_denominator=5
)


@st.composite
def polys(draw, nvars=2, max_terms=4, max_exp=3):
    p = Poly(nvars)
    for _ in range(draw(st.integers(0, max_terms))):
        expo = tuple(draw(st.integers(0, max_exp)) for _ in range(nvars))
        c = draw(fractions)
        p = p + Poly(nvars, {expo: c})
    return p


# -- Poly ----------------------------------------------------------------------


@given(polys(), polys(), polys())
def test_poly_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == Poly(2)


@given(polys(), polys())
def test_poly_eval_is_homomorphism(a, b):
    pt = [Fraction(2, 3), Fraction(-1, 7)]
    assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
    assert (a - b).eval(pt) == a.eval(pt) - b.eval(pt)


@given(polys(), polys())
def test_poly_divide_exact_inverts_multiplication(a, b):
    if b.is_zero():
        return
    q = (a * b).divide_exact(b)
    assert q == a


def test_poly_divide_exact_rejects_nondivisor():
    x = Poly.variable(1, 0)
    assert (x * x + Poly.constant(1, 1)).divide_exact(x) is None


def test_poly_normalized_extracts_content():
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    p = (x - y) * Fraction(-6, 35)
    mon, content = p.normalized()
    assert mon * content == p
    assert mon.content() == 1


# -- RationalFunction ----------------------------------------------------------


@st.composite
def ratfuncs(draw):
    num = draw(polys())
    den = draw(polys())
    if den.is_zero():
        den = Poly.constant(2, 1)
    return RationalFunction(num, {den: 1})


@given(ratfuncs(), ratfuncs(), ratfuncs())
def test_ratfunc_field_axioms(a, b, c):
    zero = RationalFunction.constant(2, 0)
    assert a + (-a) == zero
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)
    if not b.is_zero():
        assert (a * b) / b == a
        assert b * b.invert() == RationalFunction.constant(2, 1)


def test_ratfunc_invert_zero_raises():
    with pytest.raises(ZeroDenominator):
        RationalFunction.constant(2, 0).invert()


@given(ratfuncs(), ratfuncs())
def test_ratfunc_eval_matches_fraction_arithmetic(a, b):
    pt = [Fraction(5, 4), Fraction(-3, 2)]
    try:
        va, vb = a.eval(pt), b.eval(pt)
    except ZeroDenominator:
        return
    assert (a * b).eval(pt) == va * vb
    assert (a + b).eval(pt) == va + vb


def test_ratfunc_scaled_series_of_simple_pole():
    # f = 1/(x0 - x1) along x = t*(a, b) is (a-b)^-1 * t^-1 exactly
    a, b = Fraction(1, 3), Fraction(-1, 5)
    d = Poly.variable(2, 0) - Poly.variable(2, 1)
    f = RationalFunction(Poly.constant(2, 1), {d: 1})
    s = f.scaled_series([a, b], 3)
    assert s.valuation() == -1
    assert s.coefficient(-1) == 1 / (a - b)
    assert s.coefficient(0) == 0
    assert s.coefficient(1) == 0


def test_ratfunc_scaled_series_polynomial_case():
    a, b = Fraction(2), Fraction(7)
    x0 = Poly.variable(2, 0)
    f = RationalFunction(x0 * x0 - Poly.constant(2, 4))
    s = f.scaled_series([a, b], 3)
    assert s.coefficient(0) == -4
    assert s.coefficient(2) == a * a


# -- LaurentSeries ---------------------------------------------------------------


@st.composite
def series(draw, prec=5):
    offset = draw(st.integers(-2, 1))
    coeffs = [draw(fractions) for _ in range(prec - offset)]
    return LaurentSeries.from_coeffs(offset, coeffs, prec)


@given(series(), series(), series())
def test_series_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    # truncation makes * associative only at matched precision
    assert (a * b).truncate(3) == (b * a).truncate(3)


@given(series())
def test_series_invert_round_trip(a):
    if a.is_zero():
        return
    one = LaurentSeries.monomial(Fraction(1), 0, 3)
    assert (a * a.invert()).truncate(3) == one.truncate(3)


def test_series_shift_and_valuation():
    s = LaurentSeries.monomial(Fraction(3), -2, 4)
    assert s.valuation() == -2
    assert s.shift(5).valuation() == 3
    assert s.coefficient(-2) == 3
    assert s.coefficient(0) == 0


def test_series_singular_part_and_regularity():
    s = LaurentSeries.from_coeffs(-1, [Fraction(2), Fraction(5)], 3)
    assert not s.singular_part().is_zero()
    with pytest.raises(SingularLimit):
        s.require_regular("test")
    assert s.constant_term() == 5
    reg = s - LaurentSeries.monomial(Fraction(2), -1, 3)
    reg.require_regular("test")


# -- PiPoly and numeric evaluation -----------------------------------------------


def test_pipoly_arithmetic_and_degree():
    p = PiPoly({0: Fraction(-34, 3), 2: Fraction(8, 9)})
    q = PiPoly.pi_power(2, Fraction(1, 9))
    assert p + q == PiPoly({0: Fraction(-34, 3), 2: Fraction(1)})
    assert (p * q).max_power() == 4
    assert p - p == PiPoly()
    assert p * Fraction(3) == PiPoly({0: Fraction(-34), 2: Fraction(8, 3)})


def test_pipoly_pretty_and_parse_round_trip():
    p = PiPoly({0: Fraction(-34, 3), 2: Fraction(8, 9)})
    assert p.pretty() == "-34/3 + 8/9*pi^2"
    assert parse_pipoly(p.pretty()) == p
    assert parse_pipoly("0") == PiPoly()


def test_pipoly_json_round_trip():
    p = PiPoly({0: Fraction(-478), 6: Fraction(4096, 2025)})
    assert PiPoly.from_json(p.to_json()) == p


def test_pipoly_eval_against_mpmath():
    p = PiPoly({0: Fraction(-34, 3), 2: Fraction(8, 9)})
    got = pipoly_eval(p, 50)
    with mpmath.workdps(60):
        want = -mpmath.mpf(34) / 3 + mpmath.mpf(8) / 9 * mpmath.pi ** 2
        assert abs(got.value - want) < mpmath.mpf(10) ** -48


def test_decimal_str_significant_digits():
    p = PiPoly({0: Fraction(-34, 3), 2: Fraction(8, 9)})
    bf = pipoly_eval(p, 50)
    assert decimal_str(bf) == "-2.560351643"
    assert decimal_str(bf, 15) == "-2.56035164347613"
    third = BigFloat(mpmath.mpf(1) / 3, 30)
    assert decimal_str(third, 10) == "0.3333333333"
