"""Correlator assembly: stored coefficient tables, zero-temperature
expectations, homogeneous limit, fitting, entropy utility."""

from fractions import Fraction

import mpmath
import pytest

from s1fc.currents import Letter
from s1fc.errors import (
    NotADensityMatrix,
    SingularSystem,
    UncalibratedSign,
)
from s1fc.exact import PiPoly, Poly, RationalFunction
from s1fc.omega import OmegaExpr
from s1fc.pipeline import (
    THREE_CURRENT_JET,
    Evaluator,
    correlator,
    entropy,
    fit_framework,
    load_table,
    plain_expectation,
    reference_value,
    reference_values,
    table_checksum,
    three_current_series,
)

F = Fraction


# -- stored tables ----------------------------------------------------------------


def test_table_checksums_frozen():
    assert table_checksum(2).startswith("8cbc7b12f2923672")
    assert table_checksum(3).startswith("4fbd8bfdbb2b76f9")


def test_n2_table_coefficients():
    table = dict(load_table(2))
    mu = F(3, 7)
    # the fermion pair coefficient is mu^2 - 4 in the difference variable
    fermion = table[(Letter("b*", 0), Letter("c*", 1))]
    assert fermion.eval([F(0), mu]) == mu * mu - 4
    # identity coefficient at coinciding points
    assert table[()].eval([F(0), F(0)]) == F(-34, 3)


def test_n3_table_last_entry_closed_form():
    word, coeff = load_table(3)[-1]
    assert word == (Letter("j+", 0), Letter("j-", 1), Letter("j0", 2))
    m1, m2 = F(1, 3), F(1, 7)
    want = (
        F(-4)
        * (m1 ** 2 - 4)
        * ((m1 - m2) ** 2 - 4)
        * (m2 ** 2 - 4)
        * (-12 + m1 ** 2 - m1 * m2 + m2 ** 2)
        / (45 * m1 * (m1 - m2) * m2)
    )
    assert coeff.eval([F(0), m1, m2]) == want


def test_table_words_only_use_known_generators():
    for n in (2, 3):
        for word, _ in load_table(n):
            for letter in word:
                assert 0 <= letter.site < n


# -- zero-temperature expectations ---------------------------------------------------


def p_atom(n=2, i=0, j=1):
    return OmegaExpr.atom(n, "p", i, j)


def test_empty_word_is_one():
    assert plain_expectation((), 2) == OmegaExpr.constant(2, 1)


def test_fermion_pair_vanishes():
    got = plain_expectation([Letter("b*", 0), Letter("c*", 1)], 2)
    assert got.is_zero()


def test_single_j0_vanishes():
    assert plain_expectation([Letter("j0", 0)], 1).is_zero()


def test_plain_current_pair_is_minus_four_p_squared():
    got = plain_expectation([Letter("j+", 0), Letter("j-", 1)], 2)
    assert got == p_atom() * p_atom() * (-4)


def test_multi_letter_j0_words_are_uncalibrated():
    with pytest.raises(UncalibratedSign):
        plain_expectation([Letter("j0", 0), Letter("j0", 1)], 2)


def test_normal_ordered_current_pair():
    # <:j+ j-:> = -4 p(x)^2 + 1/x^2: the OPE subtraction adds the double pole
    ev = Evaluator(2)
    got = ev.normal_expectation((Letter("j+", 0), Letter("j-", 1)))
    d = Poly.variable(2, 0) - Poly.variable(2, 1)
    want = p_atom() * p_atom() * (-4) + OmegaExpr.constant(2, 1) * RationalFunction(
        Poly.constant(2, 1), {d: 2}
    )
    assert got == want


def test_normal_ordered_fermion_pair_vanishes():
    ev = Evaluator(2)
    assert ev.normal_expectation((Letter("b*", 0), Letter("c*", 1))).is_zero()


# -- the three-current jet -------------------------------------------------------------


def test_three_current_jet_frozen():
    assert THREE_CURRENT_JET == {
        1: {(1, 0, 0): PiPoly({4: F(1, 5)})},
        3: {
            (1, 1, 1): PiPoly({2: F(-413, 48), 4: F(21, 16), 6: F(22, 945)}),
            (3, 0, 0): PiPoly({6: F(10, 189)}),
        },
    }


def test_three_current_series_assembly():
    a, b, c = F(0), F(1), F(3)
    s = three_current_series((a, b, c), 5)
    x12, x23, x13 = a - b, b - c, a - c
    assert s.coefficient(1) == PiPoly({4: x12 / 5})
    want3 = PiPoly(
        {2: F(-413, 48), 4: F(21, 16), 6: F(22, 945)}
    ) * (x12 * x23 * x13) + PiPoly({6: F(10, 189)}) * x12 ** 3
    assert s.coefficient(3) == want3
    assert s.coefficient(0) == Fraction(0)
    assert s.coefficient(2) == Fraction(0)


def test_three_current_series_antisymmetry():
    # odd under exchanging the j+ and j- directions
    a, b, c = F(1, 2), F(-1, 3), F(2)
    s = three_current_series((a, b, c), 4)
    t = three_current_series((b, a, c), 4)
    for k in (1, 3):
        assert s.coefficient(k) == t.coefficient(k) * F(-1)


# -- correlators ------------------------------------------------------------------------


def test_correlator_n2():
    res = correlator(2)
    assert res.exact == PiPoly({0: F(-34, 3), 2: F(8, 9)})
    assert res.exact == reference_value(2)
    assert res.decimal == "-2.560351643"
    assert res.exact.max_power() == 2  # pi-degree n(n-1)/2 = 1
    assert len(res.directions) == 3
    assert any("sha256 8cbc7b12f2923672" in line for line in res.log)


def test_correlator_n2_custom_directions():
    ds = (F(1, 3), F(-1, 7))
    res = correlator(2, directions=ds)
    assert res.directions[0] == ds
    assert res.exact == reference_value(2)


def test_correlator_rejects_coincident_directions():
    with pytest.raises(ValueError):
        correlator(2, directions=(F(1, 3), F(1, 3)))


def test_correlator_n3():
    res = correlator(3)
    assert res.exact == PiPoly(
        {0: F(-478), 2: F(13216, 45), 4: F(-224, 5), 6: F(4096, 2025)}
    )
    assert res.exact == reference_value(3)
    assert res.decimal == "1.283223553"
    assert res.exact.max_power() == 6  # pi-degree n(n-1)/2 = 3


def test_correlator_result_json_shape():
    res = correlator(2)
    data = res.to_json()
    assert data["n"] == 2
    assert data["decimal"] == "-2.560351643"
    assert data["pretty"] == "-34/3 + 8/9*pi^2"
    assert PiPoly.from_json(data["pipoly"]) == res.exact
    assert isinstance(data["log"], list)


def test_reference_regression_values():
    assert reference_values(4).decimal == "-1.083843468"
    assert reference_values(5).decimal == "0.8330261734"
    assert reference_value(4).max_power() == 12
    assert reference_value(5).max_power() == 20
    with pytest.raises(KeyError):
        reference_value(6)


# -- fitting framework --------------------------------------------------------------------


def oracle(basis_label, sample):
    table = {
        "m1": lambda s: F(s, 3) + 1,
        "m2": lambda s: F(s * s, 5) - F(1, 2),
    }
    return table[basis_label](sample)


def test_fit_plant_and_recover():
    planted = [F(7, 3), F(-2, 9)]
    samples = [1, 2, 3]
    targets = [
        planted[0] * oracle("m1", s) + planted[1] * oracle("m2", s)
        for s in samples
    ]
    fit = fit_framework(["m1", "m2"], oracle, samples, targets)
    assert fit.coefficients == planted
    assert fit.rank == 2
    assert fit.consistent


def test_fit_inconsistent_samples_raise():
    samples = [1, 2, 3]
    targets = [F(1), F(2), F(100)]
    with pytest.raises(SingularSystem):
        fit_framework(["m1", "m2"], oracle, samples, targets)


def test_fit_rank_deficient_system_raises():
    # m1 duplicated: the design matrix has rank 1 for two unknowns
    with pytest.raises(SingularSystem):
        fit_framework(
            ["m1", "m1"], oracle, [1, 2], [oracle("m1", 1), oracle("m1", 2)]
        )


def test_fit_empty_basis():
    fit = fit_framework([], oracle, [1, 2], [F(0), F(0)])
    assert fit.coefficients == []
    assert fit.consistent
    bad = fit_framework([], oracle, [1], [F(3)])
    assert not bad.consistent


def test_fit_sample_target_mismatch():
    with pytest.raises(ValueError):
        fit_framework(["m1"], oracle, [1, 2], [F(1)])


# -- entropy utility ---------------------------------------------------------------------


def test_entropy_maximally_mixed_qubit():
    got = entropy([[F(1, 2), F(0)], [F(0), F(1, 2)]], digits=50)
    with mpmath.workdps(60):
        assert abs(got.value - mpmath.log(2)) < mpmath.mpf(10) ** -45


def test_entropy_pure_state_is_zero():
    got = entropy([[1, 0], [0, 0]], digits=30)
    assert abs(got.value) < mpmath.mpf(10) ** -25


def test_entropy_accepts_fraction_strings():
    got = entropy([["1/3", "0"], ["0", "2/3"]], digits=30)
    with mpmath.workdps(40):
        want = -(
            mpmath.mpf(1) / 3 * mpmath.log(mpmath.mpf(1) / 3)
            + mpmath.mpf(2) / 3 * mpmath.log(mpmath.mpf(2) / 3)
        )
        assert abs(got.value - want) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize(
    "matrix",
    [
        [[1, 0]],  # not square
        [[F(1, 2), F(1, 4)], [F(0), F(1, 2)]],  # not symmetric
        [[F(3, 4), F(0)], [F(0), F(1, 2)]],  # trace != 1
        [[F(3, 2), F(0)], [F(0), F(-1, 2)]],  # negative eigenvalue
    ],
)
def test_entropy_rejects_non_density_matrices(matrix):
    with pytest.raises(NotADensityMatrix):
        entropy(matrix, digits=30)
