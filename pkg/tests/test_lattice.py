"""Exact lattice layer: R-matrix, Lax operators, fusion, transfer matrices,
quantum determinant."""

import json
import random
from fractions import Fraction

import pytest

from s1fc.errors import DimensionMismatch
from s1fc.lattice import (
    MatsubaraData,
    check_commutation,
    check_eigen_relation,
    check_fusion,
    check_yang_baxter,
    fused_monodromy,
    fused_transfer_matrix,
    fusion_projector,
    identity,
    lax,
    mat_eq,
    mat_mul,
    mat_scale,
    permutation_matrix,
    quantum_determinant,
    r_half,
    r_s1,
    spin_matrices,
    transfer_matrix,
)

F = Fraction


def md_of(spins, tau):
    return MatsubaraData(L=len(spins), spins=tuple(spins), tau=tuple(tau))


MD_HALF = md_of([F(1, 2), F(1, 2)], [F(0), F(1, 5)])
MD_MIXED = md_of([F(1, 2), F(1)], [F(0), F(1, 4)])
MD_SPIN1 = md_of([F(1)], [F(1, 4)])


# -- spin matrices ---------------------------------------------------------------


def test_spin_half_matrices_are_pauli():
    h, e, f = spin_matrices(1)
    assert h == [[F(1), F(0)], [F(0), F(-1)]]
    assert e == [[F(0), F(1)], [F(0), F(0)]]
    assert f == [[F(0), F(0)], [F(1), F(0)]]


def test_spin_one_matrices():
    h, e, f = spin_matrices(2)
    assert h == [[F(2), F(0), F(0)], [F(0), F(0), F(0)], [F(0), F(0), F(-2)]]
    assert e == [[F(0), F(2), F(0)], [F(0), F(0), F(1)], [F(0), F(0), F(0)]]
    assert f == [[F(0), F(0), F(0)], [F(1), F(0), F(0)], [F(0), F(2), F(0)]]


@pytest.mark.parametrize("two_s", [1, 2, 3, 4])
def test_spin_commutation_relations(two_s):
    h, e, f = spin_matrices(two_s)
    he = mat_mul(h, e)
    eh = mat_mul(e, h)
    assert mat_eq([[he[i][j] - eh[i][j] for j in range(two_s + 1)] for i in range(two_s + 1)], mat_scale(e, 2))
    ef = mat_mul(e, f)
    fe = mat_mul(f, e)
    assert mat_eq([[ef[i][j] - fe[i][j] for j in range(two_s + 1)] for i in range(two_s + 1)], h)


# -- R-matrices -------------------------------------------------------------------


def test_r_s1_spot_entries():
    assert r_s1(F(1))[0][0] == 6
    assert r_s1(F(2))[2][4] == 8


def test_r_s1_at_zero_is_twice_permutation():
    assert mat_eq(r_s1(F(0)), mat_scale(permutation_matrix(3), 2))


def test_r_half_is_shifted_permutation():
    z = F(3, 7)
    got = r_half(z)
    want = [
        [z + p for z, p in zip(zrow, prow)]
        for zrow, prow in zip(mat_scale(identity(4), z), permutation_matrix(2))
    ]
    assert mat_eq(got, want)


def test_yang_baxter_spec_point_and_origin():
    assert check_yang_baxter(r_s1, r_s1, r_s1, F(1, 3), F(2, 5))
    assert check_yang_baxter(r_s1, r_s1, r_s1, F(0), F(0))


def test_yang_baxter_random_rational_points():
    rng = random.Random(0)
    lax_s1 = lambda x: lax(x, 2)  # noqa: E731
    for _ in range(20):
        z = F(rng.randint(-40, 40), rng.randint(1, 12))
        e = F(rng.randint(-40, 40), rng.randint(1, 12))
        assert check_yang_baxter(r_s1, r_s1, r_s1, z, e)
        assert check_yang_baxter(lax_s1, lax_s1, r_s1, z, e, dims=(2, 3, 3))


def test_yang_baxter_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        check_yang_baxter(r_half, r_s1, r_s1, F(1, 3), F(2, 5))


# -- fusion -----------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fusion_projector_idempotent(n):
    p = fusion_projector(n)
    assert mat_eq(mat_mul(p, p), p)


def test_fused_single_site_is_r_s1():
    lam = F(1, 3)
    got = fused_monodromy(lam, MD_SPIN1)
    want = r_s1(lam - MD_SPIN1.tau[0])
    assert mat_eq(got, want)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("md", [MD_HALF, MD_MIXED], ids=["half-half", "mixed"])
def test_fusion_identity(n, md):
    assert check_fusion(F(2, 7), md, n=n)


def test_transfer_matrices_commute():
    for md in (MD_HALF, MD_MIXED):
        assert check_commutation(md, F(1, 3), F(2, 5), fused=False)
        assert check_commutation(md, F(1, 3), F(2, 5), fused=True)


def test_single_site_transfer_scalars():
    # spin-1/2 site: T(x) = 2x+1, fused T(x) = 3(x+1/2)^2
    md = md_of([F(1, 2)], [F(0)])
    for x in (F(1, 3), F(5, 7), F(-2, 9)):
        assert mat_eq(transfer_matrix(x, md), mat_scale(identity(2), 2 * x + 1))
        assert mat_eq(
            fused_transfer_matrix(x, md),
            mat_scale(identity(2), 3 * (x + F(1, 2)) ** 2),
        )
    # spin-1 site: fused T(x) = 3x^2+3x+2 on the 3-dim site space
    md1 = md_of([F(1)], [F(0)])
    for x in (F(1, 3), F(5, 7)):
        assert mat_eq(
            fused_transfer_matrix(x, md1),
            mat_scale(identity(3), 3 * x * x + 3 * x + 2),
        )


# -- quantum determinant ------------------------------------------------------------


@pytest.mark.parametrize(
    "lam,value",
    [
        (F(1, 3), F(5929, 32400)),
        (F(5, 7), F(13113, 960400)),
        (F(9, 2), F(13224, 25)),
    ],
)
def test_quantum_determinant_frozen_values(lam, value):
    assert quantum_determinant(lam, MD_HALF) == value


def test_quantum_determinant_mixed_chain():
    assert quantum_determinant(F(1, 3), MD_MIXED) == F(3025, 5184)


@pytest.mark.parametrize("spin", [F(1, 2), F(1), F(3, 2)])
def test_single_site_determinant_closed_form(spin):
    # delta_s(x) = (x + s + 1)(x - s)
    md = md_of([spin], [F(0)])
    for x in (F(1, 3), F(5, 7), F(-13, 4)):
        assert quantum_determinant(x, md) == (x + spin + 1) * (x - spin)


def test_determinant_factorizes_over_sites():
    lam = F(2, 7)
    total = quantum_determinant(lam, MD_MIXED)
    parts = [
        quantum_determinant(lam - t, md_of([s], [F(0)]))
        for s, t in zip(MD_MIXED.spins, MD_MIXED.tau)
    ]
    assert total == parts[0] * parts[1]


@pytest.mark.parametrize("md", [MD_HALF, MD_MIXED], ids=["half-half", "mixed"])
def test_eigen_relation(md):
    # fused T(lam) == T(lam-1/2) T(lam+1/2) - Delta(lam) as operators
    assert check_eigen_relation(md, [F(1, 3), F(5, 7), F(9, 2)])


# -- Matsubara data ------------------------------------------------------------------


def test_matsubara_data_validation():
    with pytest.raises(ValueError):
        md_of([], [])
    with pytest.raises(ValueError):
        md_of([F(1, 3)], [F(0)])  # not a half-integer
    with pytest.raises(ValueError):
        md_of([F(-1, 2)], [F(0)])
    with pytest.raises(ValueError):
        MatsubaraData(L=2, spins=(F(1, 2),), tau=(F(0), F(0)))


def test_matsubara_dim_and_site_dims():
    assert MD_MIXED.dim == 6
    assert MD_MIXED.site_dims == (2, 3)


def test_matsubara_dim_cap(monkeypatch):
    monkeypatch.setenv("S1FC_MAX_DIM", "5")
    with pytest.raises(ValueError):
        md_of([F(1), F(1)], [F(0), F(0)])
    monkeypatch.setenv("S1FC_MAX_DIM", "9")
    md_of([F(1), F(1)], [F(0), F(0)])


def test_matsubara_json_round_trip(tmp_path):
    data = MD_MIXED.to_json()
    assert MatsubaraData.from_json(data) == MD_MIXED
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(data))
    assert MatsubaraData.from_file(str(path)) == MD_MIXED


def test_matsubara_toml_load(tmp_path):
    path = tmp_path / "chain.toml"
    path.write_text('L = 2\nspins = ["1/2", "1"]\ntau = ["0", "1/4"]\n')
    assert MatsubaraData.from_file(str(path)) == MD_MIXED


# -- Lax calibration -----------------------------------------------------------------


def test_spin_half_lax_is_shifted_permutation():
    z = F(4, 9)
    assert mat_eq(lax(z, 1), r_half(z))


def test_lax_intertwines_like_r():
    # the defining RLL relation at a random rational point, via the mixed
    # Yang-Baxter checker with the spin-1 site
    assert check_yang_baxter(
        lambda x: lax(x, 2), lambda x: lax(x, 2), r_s1, F(5, 11), F(-3, 8),
        dims=(2, 3, 3),
    )
