"""Normal-ordering rewrite engine for the five-generator current algebra."""

import itertools
import random
from fractions import Fraction

import pytest

from s1fc.currents import (
    KINDS,
    Letter,
    NormalForm,
    RULES,
    admissible,
    canonicalize,
    mode_extract,
    normal_order,
    pair_corrections,
    parse_word,
)
from s1fc.errors import NonTerminating, SingularExtraction
from s1fc.exact import Poly, RationalFunction


def diff(nvars, i, j):
    return Poly.variable(nvars, i) - Poly.variable(nvars, j)


def rf(nvars, value=1, den=None):
    num = Poly.constant(nvars, value)
    return RationalFunction(num, den or {})


# -- the OPE rule table, frozen -------------------------------------------------


def test_rule_table_frozen():
    # (pole order, emitted generator or None, rational coefficient)
    assert RULES == {
        ("j0", "j0"): [(2, None, Fraction(2))],
        ("j+", "j-"): [(1, "j0", Fraction(-1)), (2, None, Fraction(-1))],
        ("j+", "j0"): [(1, "j+", Fraction(-2))],
        ("j0", "j-"): [(1, "j-", Fraction(-2))],
        ("b*", "j-"): [(1, "c*", Fraction(1))],
        ("c*", "j+"): [(1, "b*", Fraction(-1))],
        ("b*", "j0"): [(1, "b*", Fraction(-1))],
        ("c*", "j0"): [(1, "c*", Fraction(1))],
    }


def test_pair_corrections_orientation():
    a, b = Letter("j+", 0), Letter("j-", 1)
    assert pair_corrections(a, b) == [
        (1, Letter("j0", 1), Fraction(-1), 0, 1),
        (2, None, Fraction(-1), 0, 1),
    ]
    # reversed operands give the same corrections: products at distinct
    # spectral points are symmetric, only the singular kernel matters
    assert pair_corrections(b, a) == pair_corrections(a, b)


def test_pair_corrections_fermion_current():
    assert pair_corrections(Letter("b*", 0), Letter("j-", 1)) == [
        (1, Letter("c*", 1), Fraction(1), 0, 1)
    ]
    assert pair_corrections(Letter("b*", 0), Letter("c*", 1)) == []


# -- canonical ordering ---------------------------------------------------------


def test_canonicalize_sorts_with_fermion_sign():
    w = (Letter("c*", 0), Letter("b*", 1))
    sign, sorted_word = canonicalize(w)
    assert sign == -1
    assert sorted_word == (Letter("b*", 1), Letter("c*", 0))


def test_canonicalize_repeated_fermion_is_none():
    assert canonicalize((Letter("b*", 0), Letter("b*", 0))) is None
    # bosonic repetition is fine
    assert canonicalize((Letter("j0", 0), Letter("j0", 0))) is not None


# -- normal ordering: worked examples -------------------------------------------


def test_single_letter_is_already_normal():
    for kind in KINDS:
        nf = normal_order([Letter(kind, 0)], 1)
        assert nf.terms == {(Letter(kind, 0),): rf(1)}


def test_j0_j0_product():
    # j0(l1) j0(l2) = :j0(l1) j0(l2): + 2/(l1-l2)^2
    nf = normal_order([Letter("j0", 0), Letter("j0", 1)], 2)
    d = diff(2, 0, 1)
    assert nf.terms == {
        (Letter("j0", 0), Letter("j0", 1)): rf(2),
        (): rf(2, 2, {d: 2}),
    }


def test_jplus_jminus_product():
    # j+(l1) j-(l2) = :j+(l1) j-(l2): - j0(l2)/(l1-l2) - 1/(l1-l2)^2
    nf = normal_order([Letter("j+", 0), Letter("j-", 1)], 2)
    d = diff(2, 0, 1)
    assert nf.terms == {
        (Letter("j+", 0), Letter("j-", 1)): rf(2),
        (Letter("j0", 1),): rf(2, -1, {d: 1}),
        (): rf(2, -1, {d: 2}),
    }


def test_bstar_jminus_product():
    # the emitted fermion sits at the current's spectral point
    nf = normal_order([Letter("b*", 0), Letter("j-", 1)], 2)
    d = diff(2, 0, 1)
    assert nf.terms == {
        (Letter("b*", 0), Letter("j-", 1)): rf(2),
        (Letter("c*", 1),): rf(2, 1, {d: 1}),
    }


def test_repeated_fermion_annihilates():
    nf = normal_order([Letter("b*", 0), Letter("b*", 0)], 1)
    assert nf == NormalForm(1)


def test_fermion_exchange_antisymmetry():
    ab = normal_order([Letter("b*", 0), Letter("c*", 1)], 2)
    ba = normal_order([Letter("c*", 1), Letter("b*", 0)], 2)
    assert ba == ab.scale(-1)


# -- order independence ----------------------------------------------------------


FERMIONS = {"b*", "c*"}


def fermion_perm_sign(word, perm):
    order = [i for i in perm if word[i].kind in FERMIONS]
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                sign = -sign
    return sign


@pytest.mark.parametrize("length", [2, 3, 4])
def test_normal_order_is_input_order_independent(length):
    rng = random.Random(length)
    for _ in range(12):
        word = tuple(Letter(rng.choice(KINDS), s) for s in range(length))
        base = normal_order(word, length)
        for perm in itertools.permutations(range(length)):
            pw = tuple(word[i] for i in perm)
            assert normal_order(pw, length) == base.scale(
                fermion_perm_sign(word, perm)
            )


def test_all_length_two_words_confluent():
    for k1, k2 in itertools.product(KINDS, repeat=2):
        w = (Letter(k1, 0), Letter(k2, 1))
        rev = (w[1], w[0])
        sign = -1 if k1 in FERMIONS and k2 in FERMIONS else 1
        assert normal_order(rev, 2) == normal_order(w, 2).scale(sign)


def test_denominators_are_difference_powers():
    rng = random.Random(11)
    for _ in range(20):
        word = tuple(Letter(rng.choice(KINDS), s) for s in range(3))
        nf = normal_order(word, 3)
        for coeff in nf.terms.values():
            for factor in coeff.den:
                assert any(
                    factor == diff(3, i, j)
                    for i in range(3)
                    for j in range(3)
                    if i != j
                ), repr(factor)


def test_word_length_guard():
    word = [Letter("j0", s) for s in range(25)]
    with pytest.raises(NonTerminating):
        normal_order(word, 25)


# -- admissibility counting -------------------------------------------------------


@pytest.mark.parametrize(
    "counts,n,ok",
    [
        ({"b*": 2, "j-": 1}, 3, True),
        ({"b*": 1, "c*": 1}, 2, True),
        ({"j+": 1, "j0": 1}, 2, False),
        ({"j+": 1, "j-": 1}, 2, True),
        ({"b*": 1, "c*": 1, "j0": 1}, 2, False),
        ({"j0": 1}, 1, True),
    ],
)
def test_admissible(counts, n, ok):
    assert admissible(counts, n) is ok


# -- parsing -----------------------------------------------------------------------


def test_parse_word_one_based_sites():
    assert parse_word("b*(1) c*(2)") == [Letter("b*", 0), Letter("c*", 1)]
    assert parse_word(":j+( 3 ), j0(1):") == [Letter("j+", 2), Letter("j0", 0)]


def test_parse_word_rejects_garbage():
    with pytest.raises(ValueError):
        parse_word("b*(1) q(2)")
    with pytest.raises(ValueError):
        parse_word("")


# -- mode extraction ----------------------------------------------------------------


def test_mode_extract_polynomial_coefficients():
    nf = NormalForm(2)
    x0 = Poly.variable(2, 0)
    nf.add(
        (Letter("j+", 0), Letter("j-", 1)),
        RationalFunction(x0 * x0 - Poly.constant(2, 4)),
    )
    out = mode_extract(nf, [3, 1])
    assert out == {
        (("j+", 1), ("j-", 1)): Fraction(1),
        (("j+", 3), ("j-", 1)): Fraction(-4),
    }


def test_mode_extract_pure_double_pole_is_singular():
    nf = NormalForm(2)
    nf.add((), rf(2, 1, {diff(2, 0, 1): 2}))
    with pytest.raises(SingularExtraction):
        mode_extract(nf, [1, 1])


def test_mode_extract_cancels_removable_pole():
    # (l1 - l2) * j0(l1) over (l1 - l2) is regular
    nf = NormalForm(2)
    nf.add((Letter("j0", 0),), RationalFunction(diff(2, 0, 1), {diff(2, 0, 1): 1}))
    assert mode_extract(nf, [1, 1]) == {(("j0", 1),): Fraction(1)}
