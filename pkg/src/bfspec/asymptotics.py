"""Leading-order Benjamin-Feir eigenvalues near the origin.

With Delta(mu) = te_wb eps^2 - te_b^2 mu^2 the three eigenvalues are

    lambda_0   = i te33 mu
    lambda_1^+- = -i te12 mu +- mu sqrt(Delta)       (Delta >= 0)
                = -i te12 mu +- i mu sqrt(|Delta|)   (Delta < 0)

Higher order remainders are not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NotUnstable
from .modulation import ModulationCoefficients


def delta_bf(coeffs: ModulationCoefficients, mu, epsilon):
    """Benjamin-Feir discriminant at leading order."""
    return coeffs.te_wb * epsilon**2 - coeffs.te_b**2 * np.asarray(mu) ** 2


def mu_critical(coeffs: ModulationCoefficients, epsilon: float) -> float:
    if not coeffs.te_wb > 0:
        raise NotUnstable(f"te_wb = {coeffs.te_wb:.6g} <= 0: no unstable band")
    return abs(epsilon) * math.sqrt(coeffs.te_wb) / abs(coeffs.te_b)


@dataclass(frozen=True)
class BenjaminFeirBranch:
    mu_grid: np.ndarray
    lambda0: np.ndarray
    lambda1_plus: np.ndarray
    lambda1_minus: np.ndarray
    mu_crit: float
    epsilon: float

    def eigenvalues(self):
        """(len(mu), 3) array ordered (lambda0, lambda1+, lambda1-)."""
        return np.column_stack([self.lambda0, self.lambda1_plus, self.lambda1_minus])

    def rows(self):
        header = ["mu", "re_lambda0", "im_lambda0", "re_lambda1p", "im_lambda1p", "re_lambda1m", "im_lambda1m"]
        body = [
            [mu, l0.real, l0.imag, lp.real, lp.imag, lm.real, lm.imag]
            for mu, l0, lp, lm in zip(self.mu_grid, self.lambda0, self.lambda1_plus, self.lambda1_minus)
        ]
        return header, body

    def to_json(self):
        def pairs(z):
            return [[float(v.real), float(v.imag)] for v in z]

        return {
            "epsilon": self.epsilon,
            "mu_crit": self.mu_crit,
            "mu": [float(m) for m in self.mu_grid],
            "lambda0": pairs(self.lambda0),
            "lambda1_plus": pairs(self.lambda1_plus),
            "lambda1_minus": pairs(self.lambda1_minus),
        }


def _branches_nonneg(coeffs, epsilon, mu):
    d = delta_bf(coeffs, mu, epsilon)
    root = np.sqrt(np.abs(d))
    split = np.where(d >= 0, mu * root, 1j * mu * root)
    drift = -1j * coeffs.te12 * mu
    return 1j * coeffs.te33 * mu, drift + split, drift - split


def eigenvalue_branches(coeffs: ModulationCoefficients, epsilon: float, mu_grid) -> BenjaminFeirBranch:
    """Sample the three leading-order branches on an ascending mu grid.

    Negative mu values are served through sigma(L_{-mu}) = conj sigma(L_mu).
    """
    mu = np.asarray(mu_grid, dtype=float)
    if mu.ndim != 1 or np.any(np.diff(mu) < 0):
        raise InvalidParameter("mu_grid must be a 1-d ascending array")
    l0, lp, lm = _branches_nonneg(coeffs, epsilon, np.abs(mu))
    neg = mu < 0
    l0, lp, lm = (np.where(neg, np.conj(z), z) for z in (l0, lp, lm))
    mu_c = mu_critical(coeffs, epsilon) if coeffs.te_wb > 0 else 0.0
    return BenjaminFeirBranch(mu, l0, lp, lm, mu_c, float(epsilon))


def max_growth_rate(coeffs: ModulationCoefficients, epsilon: float):
    """Peak of Re lambda_1^+ over mu and where it sits."""
    if not coeffs.te_wb > 0:
        raise NotUnstable(f"te_wb = {coeffs.te_wb:.6g} <= 0: no growth")
    rate = coeffs.te_wb * epsilon**2 / (2 * abs(coeffs.te_b))
    mu_star = abs(epsilon) * math.sqrt(coeffs.te_wb) / (math.sqrt(2.0) * abs(coeffs.te_b))
    return {"rate": rate, "mu_star": mu_star}


def figure8_curve(coeffs: ModulationCoefficients, epsilon: float, n_samples: int = 200) -> np.ndarray:
    """Closed polyline (x, y) = (Re, Im) tracing the figure 8.

    Starts and ends at the origin; the lobe at y = -te12 mu is traversed first,
    then its mirror image across the real axis.
    """
    if n_samples < 16:
        raise InvalidParameter("n_samples must be >= 16")
    mu_c = mu_critical(coeffs, epsilon)
    mu = np.linspace(0.0, mu_c, n_samples)
    x = mu * np.sqrt(np.clip(delta_bf(coeffs, mu, epsilon), 0.0, None))
    y = -coeffs.te12 * mu
    up = np.column_stack([x, y])
    upper_lobe = np.vstack([up, np.column_stack([-x, y])[-2::-1]])
    lower_lobe = np.vstack([np.column_stack([-x, -y])[1:], np.column_stack([x, -y])[-2::-1]])
    return np.vstack([upper_lobe, lower_lobe])


def lobe_areas(curve: np.ndarray):
    """Absolute areas of the two lobes of a curve from ``figure8_curve``."""
    n = (len(curve) + 1) // 2
    first, second = curve[:n], curve[n - 1 :]

    def shoelace(p):
        x, y = p[:, 0], p[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    return shoelace(first), shoelace(second)
