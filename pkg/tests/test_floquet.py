import json

import numpy as np
import pytest

from bfspec.errors import ContourHitsSpectrum, DegenerateCoefficient, RankNotThree, TruncationTooSmall, WrongCount
from bfspec.floquet import (
    assemble,
    compare_asymptotics,
    default_radius,
    eigs_near_zero,
    near_zero_spectrum,
    oracle_wave,
    pair_eigenvalues,
    riesz_projector,
    spectral_gap,
)
from bfspec.modulation import compute_coefficients
from bfspec.asymptotics import mu_critical
from bfspec.stokes import solve_newton
from bfspec.symbols import make_catalog_symbol


def omega(sym, j, mu):
    return (j + mu) * (sym.value(1.0) - sym.value(j + mu))


def test_zero_amplitude_is_diagonal(whitham2):
    w0 = solve_newton(whitham2, 0.0, 8)
    mat = assemble(whitham2, w0, 0.1, 1)
    want = np.diag([1j * omega(whitham2, j, 0.1) for j in (-1, 0, 1)])
    assert np.allclose(mat.entries, want, atol=0, rtol=1e-15)


def test_zero_row_at_mu_zero(whitham2):
    mat = assemble(whitham2, oracle_wave(whitham2, 0.01, 24), 0.0, 24)
    assert not mat.entries[24].any()


def test_kernel_relation(whitham2):
    # L_{0,eps} applied to the constant mode is -2 u' in coefficient form
    wave = oracle_wave(whitham2, 0.01, 24)
    mat = assemble(whitham2, wave, 0.0, 24)
    e0 = np.zeros(49)
    e0[24] = 1.0
    k = np.arange(-24, 25)
    deriv = 1j * k * wave.two_sided(24)
    assert np.allclose(mat.entries @ e0, -2 * deriv, atol=1e-18)


def test_truncation_guard(whitham2):
    with pytest.raises(TruncationTooSmall):
        assemble(whitham2, solve_newton(whitham2, 0.02, 32), 0.1, 8)


def test_near_zero_at_zero_amplitude(whitham2):
    mat = assemble(whitham2, solve_newton(whitham2, 0.0, 8), 0.1, 16)
    got = eigs_near_zero(mat, default_radius(whitham2, 0.0, 0.1))
    want = np.sort([omega(whitham2, j, 0.1) for j in (-1, 0, 1)])
    assert np.allclose(np.sort(got.imag), want, atol=1e-15)
    assert np.all(got.real == 0)


def test_triple_zero(whitham2):
    mat = assemble(whitham2, oracle_wave(whitham2, 0.01, 32), 0.0, 32)
    got = eigs_near_zero(mat, default_radius(whitham2, 0.01, 0.0))
    # a defective eigenvalue only resolves to about sqrt(machine eps) * scale
    assert np.abs(got).max() <= 1e-8


def test_wrong_count(whitham2):
    mat = assemble(whitham2, solve_newton(whitham2, 0.0, 8), 0.1, 16)
    with pytest.raises(WrongCount):
        eigs_near_zero(mat, 1e-6)
    with pytest.raises(WrongCount):
        eigs_near_zero(mat, 5.0)


def test_unstable_pair_inside_band(whitham2):
    eps = 0.01
    mu = mu_critical(compute_coefficients(whitham2), eps) / 2
    lam = near_zero_spectrum(whitham2, oracle_wave(whitham2, eps, 32), mu, 32)
    re = np.sort(lam.real)
    assert re[0] < 0 < re[2] and re[0] == -re[2]
    assert re[1] == 0


def test_projector_zero_amplitude(whitham2):
    mat = assemble(whitham2, solve_newton(whitham2, 0.0, 8), 0.1, 16)
    r = default_radius(whitham2, 0.0, 0.1)
    assert np.abs([omega(whitham2, j, 0.1) for j in (-1, 0, 1)]).max() < r < spectral_gap(whitham2)
    proj = riesz_projector(mat, r)
    assert proj.rank == 3
    assert proj.idempotency_defect <= 1e-8 and proj.commutation_defect <= 1e-8
    want = np.sort([omega(whitham2, j, 0.1) for j in (-1, 0, 1)])
    assert np.allclose(np.sort(np.linalg.eigvals(proj.reduced).imag), want, atol=1e-12)


def test_projector_errors(whitham2):
    mat = assemble(whitham2, solve_newton(whitham2, 0.0, 8), 0.1, 16)
    hit = abs(omega(whitham2, 1, 0.1))
    with pytest.raises(ContourHitsSpectrum):
        riesz_projector(mat, hit * 1.01)
    with pytest.raises(RankNotThree):
        riesz_projector(mat, 1e-4)


def test_nilpotent_at_mu_zero(whitham2):
    mat = assemble(whitham2, oracle_wave(whitham2, 0.01, 32), 0.0, 32)
    R = riesz_projector(mat, default_radius(whitham2, 0.01, 0.0)).reduced
    assert np.linalg.norm(R @ R) <= 1e-8 * np.linalg.norm(R)
    assert np.linalg.norm(R) > 1e-6  # index exactly 2, not the zero matrix


def test_refinement_in_modes(whitham2):
    for mu in (0.01, 0.05):
        a = near_zero_spectrum(whitham2, oracle_wave(whitham2, 0.02, 32), mu, 32)
        b = near_zero_spectrum(whitham2, oracle_wave(whitham2, 0.02, 64), mu, 64)
        assert np.abs(a - b).max() < 1e-10


def test_pairing_is_bijective():
    pred = np.array([0.1j, -0.1j, 0.3j])
    num = np.array([0.29j, 0.11j, -0.09j])
    assert np.allclose(pair_eigenvalues(num, pred), [0.11j, -0.09j, 0.29j])


def test_compare_zero_amplitude_is_third_order(whitham2):
    # at eps = 0 the branches are Taylor polynomials of the exact omegas
    errs = [compare_asymptotics(whitham2, 0.0, [mu], 16).max_abs_err for mu in (0.01, 0.005)]
    assert errs[0] < 1e-5
    assert errs[0] / errs[1] == pytest.approx(8, rel=0.05)


def test_compare_epsilon_scaling(whitham2):
    c = compute_coefficients(whitham2)
    errs = []
    for eps in (0.01, 0.005):
        grid = mu_critical(c, eps) * np.array([0.25, 0.5, 0.75])
        errs.append(compare_asymptotics(whitham2, eps, grid, 32).max_abs_err)
    assert errs[1] / errs[0] <= 0.55


def test_compare_stable_kawahara():
    sym = make_catalog_symbol("kawahara", ta=1, tb=0.25)
    rep = compare_asymptotics(sym, 0.01, np.linspace(0.001, 0.05, 15), 32)
    assert rep.max_real <= 1e-10


def test_compare_refuses_degenerate():
    with pytest.raises(DegenerateCoefficient):
        compare_asymptotics(make_catalog_symbol("benjamin_ono"), 0.01, [0.01], 32)


def test_report_exports(whitham2):
    rep = compare_asymptotics(whitham2, 0.01, [0.005, 0.01], 32)
    data = json.loads(rep.to_json())
    assert [r["mu"] for r in data["records"]] == [0.005, 0.01]
    assert len(data["records"][0]["numerical"]) == 3
    lines = rep.to_csv().strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("mu,re_num0")


def test_negative_mu_flip_identity():
    sym = make_catalog_symbol("kawahara", ta=-4.0, tb=1.0)
    wave = oracle_wave(sym, 0.02, 24)
    for mu in (0.01, 0.3):
        pos, neg = assemble(sym, wave, mu, 24), assemble(sym, wave, -mu, 24)
        assert np.array_equal(neg.real_form, -pos.real_form[::-1, ::-1])
        direct = 1j * np.linalg.eigvals(neg.real_form)
        scale = np.abs(direct).max()
        assert np.abs(pair_eigenvalues(direct, neg.eigenvalues()) - neg.eigenvalues()).max() <= 1e-13 * scale
