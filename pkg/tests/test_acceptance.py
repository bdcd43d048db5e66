"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import time
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from bfspec.asymptotics import max_growth_rate, mu_critical
from bfspec.cli import main
from bfspec.dsl import symbol_from_expression
from bfspec.floquet import (
    assemble,
    compare_asymptotics,
    default_radius,
    eigs_near_zero,
    near_zero_spectrum,
    oracle_wave,
    pair_eigenvalues,
    riesz_projector,
)
from bfspec.modulation import compute_coefficients, exact_coefficients
from bfspec.stability_map import (
    DslFamily,
    catalog_family,
    kawahara_closed_forms,
    kawahara_critical_slopes,
    whitham_te_b,
    whitham_threshold,
)
from bfspec.stokes import second_order_expansion, solve_newton
from bfspec.symbols import DSL_TWINS, make_catalog_symbol

from .conftest import record

KAWAHARA_SIGN_CHANGES = [-25 / 3, -5.0, -10 / 3, -5 / 3]


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def twin(kind):
    return DslFamily(DSL_TWINS[kind])


# --------------------------------------------------------------------------
# 1-3 and their DSL twins (11)


def check_threshold(family):
    value, secs = timed(whitham_threshold, family=family)
    return abs(value - 1.146) <= 1e-3 and secs < 1.0, value, secs


def check_kawahara(family):
    slopes, secs = timed(kawahara_critical_slopes, family=family)
    changes = slopes.te_wb_sign_changes
    ok = (
        len(changes) == 4
        and np.allclose(changes, KAWAHARA_SIGN_CHANGES, rtol=0, atol=1e-6)
        and any(abs(p + 5) <= 1e-6 for p in slopes.te_wb_poles)
        and len(slopes.te12_zeros) == 1
        and abs(slopes.te12_zeros[0] + 2) <= 1e-6
        and secs < 1.0
    )
    return ok, changes, secs


def _close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(b))


def check_coefficient_grids(kawahara, whitham):
    worst = 0.0
    ok = True
    # 10 x 10 Kawahara grid, staying clear of the poles at ta = -5 tb, -5/3 tb
    for ta in np.linspace(-12, 4, 10):
        for tb in np.linspace(0.3, 3, 10):
            if min(abs(ta + 5 * tb), abs(3 * ta + 5 * tb)) < 1e-3:
                continue
            c = compute_coefficients(kawahara(ta=float(ta), tb=float(tb)))
            ref = kawahara_closed_forms(ta, tb)
            for key in ("te12", "te_d", "te_b", "te_w"):
                err = abs(getattr(c, key) - ref[key]) / max(1.0, abs(ref[key]))
                worst = max(worst, err)
                ok &= err <= 1e-10
    for tth in np.linspace(0.1, 5, 100):
        c = compute_coefficients(whitham(tth=float(tth)))
        ref = whitham_te_b(tth)
        err = abs(c.te_b - ref) / max(1.0, abs(ref))
        worst = max(worst, err)
        ok &= err <= 1e-10
    return ok, worst


def test_criterion_01_whitham_threshold(capsys):
    t0 = time.perf_counter()
    code = main(["threshold", "--symbol", "whitham"])
    secs = time.perf_counter() - t0
    value = json.loads(capsys.readouterr().out)["threshold"]
    ok = code == 0 and abs(value - 1.146) <= 1e-3 and secs < 1.0
    record(1, ok, f"threshold {value:.12f}, {secs:.3f} s")
    assert ok


def test_criterion_02_kawahara_boundaries():
    ok, changes, secs = check_kawahara(catalog_family("kawahara"))
    record(2, ok, f"sign changes {[round(x, 9) for x in changes]}, {secs:.3f} s")
    assert ok


def test_criterion_03_coefficient_oracles():
    ok, worst = check_coefficient_grids(catalog_family("kawahara"), catalog_family("whitham"))
    record(3, ok, f"worst relative error {worst:.2e}")
    assert ok


# --------------------------------------------------------------------------
# 4 dispersion exactness


def test_criterion_04_dispersion_exactness():
    sym = make_catalog_symbol("whitham", tth=2.0)
    flat = solve_newton(sym, 0.0, 8)
    m1 = sym.value(1.0)
    worst = 0.0
    for n in (4, 8, 16, 32, 64):
        for mu in (0.05, 0.1, 0.25):
            lam = assemble(sym, flat, mu, n).eigenvalues()
            want = np.array([1j * (j + mu) * (m1 - sym.value(j + mu)) for j in range(-n, n + 1)])
            worst = max(worst, np.abs(pair_eigenvalues(lam, want) - want).max())
    ok = worst <= 1e-12
    record(4, ok, f"max |lambda - i omega| = {worst:.2e}")
    assert ok


# --------------------------------------------------------------------------
# 5 Stokes consistency


def test_criterion_05_stokes_consistency():
    ok = True
    parts = []
    for sym in (make_catalog_symbol("whitham", tth=2.0), make_catalog_symbol("kawahara", ta=-4.0, tb=1.0)):
        scaled = []
        for eps in (0.02, 0.01, 0.005):
            wave, secs = timed(solve_newton, sym, eps, 64)
            approx = second_order_expansion(sym, eps)
            diff = wave.cos_coeffs.copy()
            diff[: len(approx.cos_coeffs)] -= approx.cos_coeffs
            diff = np.append(diff, wave.speed - approx.speed)
            scaled.append(np.linalg.norm(diff) / eps**3)
            ok &= wave.residual_norm <= 1e-12 and secs < 5.0
        spread = max(scaled) / min(scaled)
        ok &= spread <= 2.0
        parts.append(f"{sym.name}: diff/eps^3 spread {spread:.3f}")
    record(5, ok, "; ".join(parts))
    assert ok


# --------------------------------------------------------------------------
# 6 figure-8 reproduction


def _oracle_growth(sym, wave, mu):
    return float(near_zero_spectrum(sym, wave, mu, 48).real.max())


def _oracle_band(sym, eps):
    """Grid scan over (0, 0.05] then bisection of the upper end of the unstable set."""
    wave = oracle_wave(sym, eps, 48)
    grid = np.linspace(0.05 / 40, 0.05, 40)
    growth = np.array([_oracle_growth(sym, wave, m) for m in grid])
    unstable = growth > 1e-10
    k = int(np.argmin(unstable)) if not unstable.all() else len(grid)
    contiguous = k > 0 and unstable[:k].all() and not unstable[k:].any()
    lo, hi = grid[k - 1], grid[k]
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if _oracle_growth(sym, wave, mid) > 1e-10 else (lo, mid)
    peak = minimize_scalar(lambda m: -_oracle_growth(sym, wave, m), bounds=(0, lo), method="bounded", options={"xatol": 1e-7})
    return contiguous, 0.5 * (lo + hi), -peak.fun


def test_criterion_06_figure8_reproduction():
    sym = make_catalog_symbol("whitham", tth=2.0)
    coeffs = compute_coefficients(sym)
    t0 = time.perf_counter()
    contiguous, mu_star, rate = _oracle_band(sym, 0.01)
    secs = time.perf_counter() - t0
    _, _, rate_half = _oracle_band(sym, 0.005)
    mu_lower = mu_critical(coeffs, 0.01)
    band_err = abs(mu_star - mu_lower) / mu_lower
    pred, pred_half = max_growth_rate(coeffs, 0.01)["rate"], max_growth_rate(coeffs, 0.005)["rate"]
    mismatch, mismatch_half = abs(rate - pred) / pred, abs(rate_half - pred_half) / pred_half
    shrink = mismatch / mismatch_half
    ok = contiguous and band_err <= 0.15 and mismatch <= 0.15 and shrink >= 1.8 and secs < 60
    record(
        6,
        ok,
        f"mu* {mu_star:.5f} vs {mu_lower:.5f} ({band_err:.1%}), growth mismatch {mismatch:.2e} -> {mismatch_half:.2e} "
        f"(x{shrink:.1f}), {secs:.2f} s",
    )
    assert ok


# --------------------------------------------------------------------------
# 7 stability dichotomy

STABLE_CASES = [
    ("kdv", {}),
    ("fkdv", {"alpha": 3.0}),
    ("ilw", {"tth": 0.5}),
    ("ilw", {"tth": 1.0}),
    ("ilw", {"tth": 2.0}),
    ("kawahara", {"ta": -4.0, "tb": 1.0}),
]


def test_criterion_07_stability_dichotomy():
    from bfspec.modulation import classify

    ok = True
    worst = 0.0
    mu = np.linspace(0.05 / 40, 0.05, 40)
    for kind, params in STABLE_CASES:
        sym = make_catalog_symbol(kind, **params)
        ok &= classify(sym).is_stable
        report = compare_asymptotics(sym, 0.01, mu, n_modes=48)
        worst = max(worst, float(np.abs(report.numerical.real).max()))
    ok &= worst <= 1e-10
    record(7, ok, f"all stable; max |Re lambda| = {worst:.2e}")
    assert ok


# --------------------------------------------------------------------------
# 8 Benjamin-Ono criticality


def test_criterion_08_benjamin_ono():
    sym = make_catalog_symbol("benjamin_ono")
    exact = exact_coefficients(sym)
    dsl = exact_coefficients(symbol_from_expression(DSL_TWINS["benjamin_ono"], {}))
    ok = exact["te_wb"] == Fraction(0) and dsl["te_wb"] == Fraction(0) and compute_coefficients(sym).te_wb == 0.0
    record(8, ok, f"te_wb = {exact['te_wb']} (catalog), {dsl['te_wb']} (DSL)")
    assert ok


# --------------------------------------------------------------------------
# 9 projector suite


def test_criterion_09_projector_suite():
    sym = make_catalog_symbol("whitham", tth=2.0)
    wave = oracle_wave(sym, 0.01, 48)
    ok = True
    worst_def = worst_eig = 0.0
    for mu in (0.0, 0.005, 0.015, 0.03, 0.05):
        mat = assemble(sym, wave, mu, 48)
        radius = default_radius(sym, 0.01, mu)
        proj = riesz_projector(mat, radius)
        ok &= proj.rank == 3
        worst_def = max(worst_def, proj.idempotency_defect, proj.commutation_defect)
        if mu > 0:
            near = eigs_near_zero(mat, radius)
            reduced = np.linalg.eigvals(proj.reduced)
            worst_eig = max(worst_eig, np.abs(pair_eigenvalues(reduced, near) - near).max())
        else:
            R = proj.reduced
            nil = np.linalg.norm(R @ R) / np.linalg.norm(R)
            ok &= nil <= 1e-8 and np.linalg.norm(R) > 1e-6
    ok &= worst_def <= 1e-8 and worst_eig <= 1e-8
    record(9, ok, f"defects {worst_def:.1e}, eigenvalue match {worst_eig:.1e}, |R^2|/|R| at mu=0 {nil:.1e}")
    assert ok


# --------------------------------------------------------------------------
# 10 symmetry suite


def test_criterion_10_symmetry_suite():
    worst_h = worst_c = 0.0
    for sym, eps in ((make_catalog_symbol("whitham", tth=2.0), 0.01), (make_catalog_symbol("kawahara", ta=-4.0, tb=1.0), 0.02)):
        wave = oracle_wave(sym, eps, 48)
        for mu in (0.01, 0.1, 0.3):
            lam = assemble(sym, wave, mu, 48).eigenvalues()
            mirror = -np.conj(lam)
            worst_h = max(worst_h, np.abs(pair_eigenvalues(mirror, lam) - lam).max())
            neg = assemble(sym, wave, -mu, 48).eigenvalues()
            worst_c = max(worst_c, np.abs(pair_eigenvalues(neg, np.conj(lam)) - np.conj(lam)).max())
    ok = worst_h <= 1e-10 and worst_c <= 1e-10
    record(10, ok, f"reflection {worst_h:.1e}, mu -> -mu {worst_c:.1e}")
    assert ok


# --------------------------------------------------------------------------
# 11 DSL equivalence


def test_criterion_11_dsl_equivalence():
    ok1, value, t1 = check_threshold(twin("whitham"))
    ok2, _, t2 = check_kawahara(twin("kawahara"))
    ok3, worst = check_coefficient_grids(twin("kawahara"), twin("whitham"))
    ok = ok1 and ok2 and ok3
    record(11, ok, f"threshold {value:.12f} ({t1:.3f} s), slopes ({t2:.3f} s), grids {worst:.2e}")
    assert ok
