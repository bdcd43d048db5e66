"""Fourier-Floquet truncation of the linearized operator and its spectrum near 0.

In the basis e^{i(k+mu)x}, k = -N..N, the linearization about an even wave is

    L[k, j] = i (k+mu) [ (c - m(k+mu)) delta_kj - 2 u_{k-j} ]

so L = i A with A real.  Eigenvalues are taken as i * eig(A), which keeps
the Hamiltonian symmetry lambda -> -conj(lambda) exact in floating point.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .asymptotics import eigenvalue_branches
from .errors import (
    ContourHitsSpectrum,
    DegenerateCoefficient,
    EigensolverFailure,
    InvalidParameter,
    RankNotThree,
    TruncationTooSmall,
    WrongCount,
)
from .modulation import classify, compute_coefficients
from .output import dump_json, fmt
from .stokes import StokesWave, solve_newton
from .symbols import DispersionSymbol

WAVE_MARGIN = 8


@dataclass(frozen=True)
class FloquetMatrix:
    mu: float
    epsilon: float
    n_modes: int
    real_form: np.ndarray  # A with L = i A

    @property
    def modes(self):
        return np.arange(-self.n_modes, self.n_modes + 1)

    @property
    def entries(self):
        return 1j * self.real_form

    def eigenvalues(self):
        # A(-mu) = -P A(mu) P with P the flip k -> -k, so negative mu reuses the
        # mu > 0 solve and spectrum(-mu) = conj(spectrum(mu)) holds exactly
        sign = -1.0 if self.mu < 0 else 1.0
        a = -self.real_form[::-1, ::-1] if self.mu < 0 else self.real_form
        try:
            w = sign * scipy.linalg.eigvals(a, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigensolverFailure(str(exc)) from exc
        return 1j * w


def spectral_gap(sym: DispersionSymbol, n_max: int = 64) -> float:
    """c0 = min over n != 1 of |m(n) - m(1)|."""
    m1 = sym.value(1.0)
    return min(abs(sym.value(float(n)) - m1) for n in range(n_max + 1) if n != 1)


def assemble(sym: DispersionSymbol, wave: StokesWave, mu: float, n_modes: int) -> FloquetMatrix:
    if n_modes < 1:
        raise InvalidParameter("n_modes must be >= 1")
    if not -0.5 < mu <= 0.5:
        raise InvalidParameter(f"mu must lie in (-1/2, 1/2], got {mu}")
    if wave.epsilon != 0.0 and n_modes < wave.significant_modes() + WAVE_MARGIN:
        raise TruncationTooSmall(
            f"n_modes={n_modes} too small for a wave with {wave.significant_modes()} significant modes"
        )
    k = np.arange(-n_modes, n_modes + 1) + mu
    size = 2 * n_modes + 1
    u = wave.two_sided(2 * n_modes)  # index offset 2N
    diff = np.subtract.outer(np.arange(size), np.arange(size)) + 2 * n_modes
    conv = u[diff]
    mvals = np.array([sym.value(float(x)) for x in k])
    a = k[:, None] * (np.diag(wave.speed - mvals) - 2.0 * conv)
    return FloquetMatrix(float(mu), wave.epsilon, n_modes, a)


def default_radius(sym: DispersionSymbol, epsilon: float, mu: float) -> float:
    c0 = spectral_gap(sym)
    try:
        co = compute_coefficients(sym)
        scale = max(1.0, abs(co.te12), abs(co.te33), abs(co.te_b))
    except DegenerateCoefficient:
        scale = 1.0
    r = 10.0 * (abs(epsilon) + abs(mu)) * scale
    return min(c0 / 4, r) if r > 0 else c0 / 4


def eigs_near_zero(mat: FloquetMatrix, radius: float) -> np.ndarray:
    lam = mat.eigenvalues()
    inside = lam[np.abs(lam) < radius]
    if len(inside) != 3:
        raise WrongCount(f"{len(inside)} eigenvalues inside |lambda| < {radius:.3e}, expected 3")
    return inside[np.argsort(inside.imag)]


@dataclass(frozen=True)
class RieszProjector:
    radius: float
    n_quad: int
    projector: np.ndarray
    rank: int
    basis: np.ndarray
    reduced: np.ndarray
    idempotency_defect: float
    commutation_defect: float


def riesz_projector(mat: FloquetMatrix, radius: float, n_quad: int = 64) -> RieszProjector:
    """P = (1/2 pi i) \\oint (lambda - L)^{-1} dlambda by the trapezoid rule on a circle."""
    lmat = mat.entries
    lam = mat.eigenvalues()
    if np.any(np.abs(np.abs(lam) - radius) < 0.05 * radius):
        raise ContourHitsSpectrum(f"an eigenvalue lies within 5% of the contour |lambda|={radius:.3e}")
    size = lmat.shape[0]
    eye = np.eye(size)
    p = np.zeros((size, size), dtype=complex)
    for theta in 2 * np.pi * (np.arange(n_quad) + 0.5) / n_quad:
        z = radius * np.exp(1j * theta)
        p += z * np.linalg.solve(z * eye - lmat, eye)
    p /= n_quad
    u, s, _ = np.linalg.svd(p)
    rank = int(np.sum(s > 1e-6 * max(s[0], 1e-300))) if s[0] > 1e-6 else 0
    if rank != 3:
        raise RankNotThree(f"projector rank {rank}")
    q = u[:, :3]
    reduced = q.conj().T @ lmat @ q
    idem = float(np.linalg.norm(p @ p - p, 2))
    comm = float(np.linalg.norm(lmat @ p - p @ lmat, 2))
    return RieszProjector(radius, n_quad, p, rank, q, reduced, idem, comm)


@dataclass
class OracleReport:
    symbol: str
    epsilon: float
    n_modes: int
    mu: np.ndarray
    numerical: np.ndarray  # (len(mu), 3)
    asymptotic: np.ndarray
    abs_err: np.ndarray
    wave_residual: float
    meta: dict = field(default_factory=dict)

    @property
    def max_abs_err(self):
        return float(self.abs_err.max())

    @property
    def max_real(self):
        return float(self.numerical.real.max())

    def rel_err(self):
        scale = np.maximum(np.abs(self.asymptotic), 1e-300)
        return self.abs_err / scale

    def to_json(self):
        def pairs(z):
            return [[float(v.real), float(v.imag)] for v in z]

        return dump_json(
            {
                "symbol": self.symbol,
                "epsilon": self.epsilon,
                "n_modes": self.n_modes,
                "wave_residual": self.wave_residual,
                "max_abs_err": self.max_abs_err,
                "records": [
                    {
                        "mu": float(m),
                        "numerical": pairs(n),
                        "asymptotic": pairs(a),
                        "abs_err": [float(e) for e in err],
                    }
                    for m, n, a, err in zip(self.mu, self.numerical, self.asymptotic, self.abs_err)
                ],
                **self.meta,
            }
        )

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["mu"]
        for i in range(3):
            head += [f"re_num{i}", f"im_num{i}", f"re_asym{i}", f"im_asym{i}", f"abs_err{i}"]
        w.writerow(head)
        for m, n, a, err in zip(self.mu, self.numerical, self.asymptotic, self.abs_err):
            row = [fmt(m)]
            for i in range(3):
                row += [fmt(x) for x in (n[i].real, n[i].imag, a[i].real, a[i].imag, err[i])]
            w.writerow(row)
        return buf.getvalue()


def pair_eigenvalues(numerical, predicted):
    """Bijective minimum-distance matching; returns numerical reordered to match predicted."""
    numerical = np.asarray(numerical)
    predicted = np.asarray(predicted)
    cost = np.abs(numerical[:, None] - predicted[None, :])
    rows, cols = linear_sum_assignment(cost)
    if sorted(cols) != list(range(len(predicted))):
        raise EigensolverFailure("eigenvalue pairing is not a bijection")
    out = np.empty_like(predicted, dtype=complex)
    out[cols] = numerical[rows]
    return out


def near_zero_spectrum(sym, wave, mu, n_modes, radius=None):
    mat = assemble(sym, wave, mu, n_modes)
    r = radius if radius is not None else default_radius(sym, wave.epsilon, mu)
    return eigs_near_zero(mat, r)


def oracle_wave(sym, epsilon, n_modes):
    """Newton wave with enough margin for an n_modes Floquet truncation."""
    return solve_newton(sym, epsilon, max(8, n_modes - WAVE_MARGIN))


def compare_asymptotics(
    sym: DispersionSymbol, epsilon: float, mu_grid, n_modes: int = 48, wave: StokesWave | None = None
) -> OracleReport:
    verdict = classify(sym)
    if verdict.is_degenerate:
        raise DegenerateCoefficient(verdict.reason or "degenerate", float("nan"))
    coeffs = verdict.coefficients
    wave = wave if wave is not None else oracle_wave(sym, epsilon, n_modes)
    mu = np.asarray(mu_grid, dtype=float)
    pred = eigenvalue_branches(coeffs, epsilon, mu).eigenvalues()
    num = np.empty_like(pred)
    for i, m in enumerate(mu):
        num[i] = pair_eigenvalues(near_zero_spectrum(sym, wave, m, n_modes), pred[i])
    return OracleReport(sym.name, float(epsilon), n_modes, mu, num, pred, np.abs(num - pred), wave.residual_norm)
