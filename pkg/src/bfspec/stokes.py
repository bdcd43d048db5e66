"""Small-amplitude 2*pi-periodic traveling waves.

The wave solves the stationary equation ``c u - M(D) u - u^2 = 0`` in the
even (cosine) class, normalized by the first Fourier coefficient a_1 = eps.
Two routes are provided: the second order Stokes expansion, and a Newton
solve of the Galerkin-truncated equation started from that expansion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NewtonDiverged, ResonantDenominator, TruncationTooSmall
from .symbols import RESONANCE_TOL, DispersionSymbol

MAX_NEWTON_ITER = 50


@dataclass(frozen=True)
class StokesWave:
    epsilon: float
    cos_coeffs: np.ndarray  # a_n multiplies cos(n x)
    speed: float
    residual_norm: float
    source: str  # "expansion" | "newton"
    iterations: int = 0

    def __post_init__(self):
        a = np.array(self.cos_coeffs, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "cos_coeffs", a)

    @property
    def n_modes(self):
        return len(self.cos_coeffs) - 1

    def coeff(self, n):
        return self.cos_coeffs[n] if n < len(self.cos_coeffs) else 0.0

    def significant_modes(self, rtol=1e-15):
        """Highest n with |a_n| above rtol * max |a|; 0 for the trivial wave."""
        a = np.abs(self.cos_coeffs)
        if not a.any():
            return 0
        return int(np.nonzero(a > rtol * a.max())[0].max())

    def two_sided(self, n_max):
        """Exponential Fourier coefficients u_k, k = -n_max..n_max."""
        out = np.zeros(2 * n_max + 1)
        out[n_max] = self.coeff(0)
        for n in range(1, n_max + 1):
            out[n_max + n] = out[n_max - n] = 0.5 * self.coeff(n)
        return out

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        n = np.arange(len(self.cos_coeffs))
        return np.cos(np.multiply.outer(x, n)) @ self.cos_coeffs

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "speed": self.speed,
            "cos_coeffs": [float(a) for a in self.cos_coeffs],
            "residual_norm": self.residual_norm,
            "source": self.source,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            epsilon=float(data["epsilon"]),
            cos_coeffs=np.asarray(data["cos_coeffs"], dtype=float),
            speed=float(data["speed"]),
            residual_norm=float(data["residual_norm"]),
            source=data.get("source", "newton"),
        )


def multiplication_matrix(a):
    """Matrix T(a) with cos-coeffs of (u v) = T(a) @ v, truncated to len(a) modes.

    Uses cos(m x) cos(k x) = (cos((m+k) x) + cos((m-k) x)) / 2.
    """
    n = len(a)
    t = np.zeros((n, n))
    for m in range(n):
        if a[m] == 0.0:
            continue
        for k in range(n):
            if m + k < n:
                t[m + k, k] += 0.5 * a[m]
            t[abs(m - k), k] += 0.5 * a[m]
    return t


def square_coeffs(a):
    """Cosine coefficients of u^2 on the same modes (exact convolution, truncated)."""
    return multiplication_matrix(a) @ a


def stationary_residual(sym: DispersionSymbol, a, c):
    """(c - m(n)) a_n - (u^2)_n for n = 0..N."""
    a = np.asarray(a, dtype=float)
    mvals = np.array([sym.value(float(n)) for n in range(len(a))])
    return (c - mvals) * a - square_coeffs(a)


def _denominators(sym):
    m0, m1, m2 = sym.value(0.0), sym.value(1.0), sym.value(2.0)
    for n, mn in ((0, m0), (2, m2)):
        if abs(m1 - mn) < RESONANCE_TOL:
            raise ResonantDenominator(f"m(1) - m({n}) = {m1 - mn:.3e} for {sym.name}")
    return m0, m1, m2


def second_order_expansion(sym: DispersionSymbol, epsilon: float) -> StokesWave:
    """u = eps cos x + eps^2 (u2_0 + u2_2 cos 2x), c = m(1) + eps^2 c2."""
    if abs(epsilon) > 0.1:
        warnings.warn(f"epsilon={epsilon} is outside the small-amplitude regime", stacklevel=2)
    m0, m1, m2 = _denominators(sym)
    e2 = epsilon * epsilon
    a = np.array([0.5 * e2 / (m1 - m0), epsilon, 0.5 * e2 / (m1 - m2)])
    c = m1 + e2 * (1.0 / (m1 - m0) + 0.5 / (m1 - m2))
    padded = np.zeros(5)
    padded[:3] = a
    res = float(np.linalg.norm(stationary_residual(sym, padded, c)))
    return StokesWave(float(epsilon), a, float(c), res, "expansion", 0)


def solve_newton(sym: DispersionSymbol, epsilon: float, n_modes: int = 32, tol: float = 1e-12) -> StokesWave:
    """Newton-Galerkin solve for (a_0, a_2, ..., a_N, c) with a_1 = eps held fixed."""
    if n_modes < 8:
        raise InvalidParameter(f"n_modes must be >= 8, got {n_modes}")
    m0, m1, m2 = _denominators(sym)
    if epsilon == 0.0:
        return StokesWave(0.0, np.zeros(n_modes + 1), float(m1), 0.0, "newton", 1)

    guess = second_order_expansion(sym, epsilon) if abs(epsilon) <= 0.1 else None
    a = np.zeros(n_modes + 1)
    if guess is not None:
        a[:3] = guess.cos_coeffs
        c = guess.speed
    else:
        a[:3] = [0.5 * epsilon**2 / (m1 - m0), epsilon, 0.5 * epsilon**2 / (m1 - m2)]
        c = m1 + epsilon**2 * (1.0 / (m1 - m0) + 0.5 / (m1 - m2))
    mvals = np.array([sym.value(float(n)) for n in range(n_modes + 1)])
    free = np.array([n for n in range(n_modes + 1) if n != 1])

    for it in range(1, MAX_NEWTON_ITER + 1):
        t = multiplication_matrix(a)
        res = (c - mvals) * a - t @ a
        norm = float(np.linalg.norm(res))
        if not np.isfinite(norm):
            raise NewtonDiverged(f"non-finite residual at iteration {it}")
        if norm <= tol:
            break
        jac = np.diag(c - mvals) - 2.0 * t
        full = np.column_stack([jac[:, free], a])
        step = np.linalg.solve(full, -res)
        a[free] += step[:-1]
        c += step[-1]
    else:
        raise NewtonDiverged(f"no convergence in {MAX_NEWTON_ITER} iterations (residual {norm:.3e})")

    total = float(a @ a)
    if a[-1] ** 2 > 1e-3 * total:
        raise TruncationTooSmall(f"tail energy a_N^2/|a|^2 = {a[-1] ** 2 / total:.3e} with N={n_modes}")
    return StokesWave(float(epsilon), a, float(c), norm, "newton", it)
