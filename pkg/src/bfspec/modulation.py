"""Modulational coefficients and the stable / unstable / degenerate verdict.

Every coefficient is a rational expression in six numbers: m(0), m(1),
m(2), m'(1), m''(1) and m''(0).  The sign of the Whitham-Benjamin coefficient
te_wb = te_w * te_b decides between a figure-8 of unstable spectrum and a
purely imaginary spectrum near the origin.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateCoefficient
from .symbols import NEAR_RESONANCE_TOL, RESONANCE_TOL, DispersionSymbol, Jet2, check_assumption_a

DEGENERACY_TOL = 1e-9
NEAR_DEGENERACY_TOL = 1e-4


@dataclass(frozen=True)
class ModulationCoefficients:
    te12: float
    te_d: float
    te_b: float
    te_w: float
    te_wb: float
    fa: float
    te22: float
    te33: float
    tg33: float
    u2_0: float
    u2_2: float
    c2: float
    te_w_num: float
    provenance: dict = field(default_factory=dict)

    def to_json(self):
        out = {k: float(v) for k, v in asdict(self).items() if k != "provenance"}
        out["provenance"] = {k: float(v) for k, v in self.provenance.items()}
        return out


def _coefficients(m0, m1, m2, dm1, ddm1, ddm0, strict=False):
    """Works for floats and Fractions alike."""
    half = Fraction(1, 2) if isinstance(m1, Fraction) else 0.5
    te12 = dm1
    te_d = dm1 + m1 - m0
    te_b = -dm1 - half * ddm1
    num = dm1 + 3 * m1 - 2 * m2 - m0
    checks = {"m(1)-m(0)": m1 - m0, "m(1)-m(2)": m1 - m2, "te_d": te_d}
    if strict:
        checks.update({"te12": te12, "te_b": te_b, "te_w numerator": num})
    for name, val in checks.items():
        if abs(val) < DEGENERACY_TOL:
            raise DegenerateCoefficient(name, float(val))
    te_w = num / ((m1 - m2) * te_d)
    fa = 1 / (m1 - m2)
    return dict(
        te12=te12,
        te_d=te_d,
        te_b=te_b,
        te_w=te_w,
        te_wb=te_w * te_b,
        fa=fa,
        te22=-half * ddm1,
        te33=m1 - m0,
        tg33=-half * ddm0,
        u2_0=half / (m1 - m0),
        u2_2=half * fa,
        c2=1 / (m1 - m0) + half * fa,
        te_w_num=num,
    )


def coefficients_from_jets(j0: Jet2, j1: Jet2, j2: Jet2, strict: bool = False) -> ModulationCoefficients:
    prov = {
        "m0": j0.value,
        "m1": j1.value,
        "m2": j2.value,
        "dm1": j1.d1,
        "ddm1": j1.d2,
        "ddm0": j0.d2,
    }
    vals = _coefficients(j0.value, j1.value, j2.value, j1.d1, j1.d2, j0.d2, strict)
    return ModulationCoefficients(**{k: float(v) for k, v in vals.items()}, provenance=prov)


def compute_coefficients(sym: DispersionSymbol, strict: bool = False) -> ModulationCoefficients:
    """Coefficients from the jets of ``sym`` at 0, 1 and 2.

    Raises DegenerateCoefficient when a denominator vanishes; with
    ``strict`` also when any Assumption-B quantity vanishes.
    """
    return coefficients_from_jets(sym.jet(0.0), sym.jet(1.0), sym.jet(2.0), strict)


def raw_coefficients(sym: DispersionSymbol) -> dict:
    """Coefficients with no degeneracy guards; vanishing denominators give inf or nan."""
    j0, j1, j2 = sym.jet(0.0), sym.jet(1.0), sym.jet(2.0)
    m0, m1, m2, dm1, ddm1 = j0.value, j1.value, j2.value, j1.d1, j1.d2
    te_d = dm1 + m1 - m0
    te_b = -dm1 - 0.5 * ddm1
    num = dm1 + 3 * m1 - 2 * m2 - m0
    with np.errstate(divide="ignore", invalid="ignore"):
        te_w = float(np.divide(num, np.float64(m1 - m2) * te_d))
    return {
        "te12": dm1,
        "te_d": te_d,
        "te_b": te_b,
        "te_w_num": num,
        "m1-m2": m1 - m2,
        "m1-m0": m1 - m0,
        "te_w": te_w,
        "te_wb": te_w * te_b,
    }


def exact_coefficients(sym: DispersionSymbol) -> dict:
    """Same formulas in rational arithmetic on the (exactly representable) float jets."""
    j0, j1, j2 = sym.jet(0.0), sym.jet(1.0), sym.jet(2.0)
    args = [Fraction(x) for x in (j0.value, j1.value, j2.value, j1.d1, j1.d2, j0.d2)]
    return _coefficients(*args)


def whitham_benjamin_closed_form(c: ModulationCoefficients) -> float:
    """te_wb written as a single quotient of jet values."""
    p = c.provenance
    return ((p["dm1"] + 0.5 * p["ddm1"]) * (p["dm1"] + 3 * p["m1"] - 2 * p["m2"] - p["m0"])) / (
        (p["m2"] - p["m1"]) * (p["dm1"] + p["m1"] - p["m0"])
    )


@dataclass
class AssumptionBReport:
    failed: list
    near_degenerate: list
    values: dict

    @property
    def ok(self):
        return not self.failed


def check_assumption_b(coeffs: ModulationCoefficients, tol: float = DEGENERACY_TOL, warn_tol: float = NEAR_DEGENERACY_TOL):
    values = {
        "te12": coeffs.te12,
        "te_d": coeffs.te_d,
        "te_b": coeffs.te_b,
        "te_w numerator": coeffs.te_w_num,
    }
    failed = [k for k, v in values.items() if abs(v) < tol]
    near = [k for k, v in values.items() if tol <= abs(v) < warn_tol]
    return AssumptionBReport(failed, near, values)


@dataclass(frozen=True)
class Classification:
    verdict: str  # "unstable" | "stable" | "degenerate"
    te_wb: float | None = None
    reason: str | None = None
    coefficients: ModulationCoefficients | None = None
    warnings: tuple = ()
    resonant_n: int | None = None

    @property
    def is_unstable(self):
        return self.verdict == "unstable"

    @property
    def is_stable(self):
        return self.verdict == "stable"

    @property
    def is_degenerate(self):
        return self.verdict == "degenerate"

    def to_json(self):
        out = {"class": self.verdict, "te_wb": self.te_wb, "reason": self.reason, "warnings": list(self.warnings)}
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients.to_json()
        return out


def classify(sym: DispersionSymbol, n_max: int = 64, tol: float = DEGENERACY_TOL) -> Classification:
    """Unstable iff Assumptions A and B hold and te_wb > 0; stable iff te_wb < 0."""
    rep_a = check_assumption_a(sym, n_max=n_max)
    notes = list(rep_a.warnings)
    if rep_a.resonant_n is not None:
        return Classification("degenerate", reason=f"resonance n={rep_a.resonant_n}", warnings=tuple(notes), resonant_n=rep_a.resonant_n)
    if not rep_a.even_ok:
        return Classification("degenerate", reason="symbol is not even", warnings=tuple(notes))
    if not rep_a.growth_ok:
        return Classification("degenerate", reason="growth bound not satisfied", warnings=tuple(notes))
    try:
        coeffs = compute_coefficients(sym)
    except DegenerateCoefficient as exc:
        return Classification("degenerate", reason=f"{exc.quantity} vanishes", warnings=tuple(notes))
    rep_b = check_assumption_b(coeffs, tol=tol)
    notes += [f"{k} is near zero ({rep_b.values[k]:.3e})" for k in rep_b.near_degenerate]
    if rep_b.failed:
        return Classification(
            "degenerate", coeffs.te_wb, f"{', '.join(rep_b.failed)} vanishes", coeffs, tuple(notes)
        )
    verdict = "unstable" if coeffs.te_wb > 0 else "stable"
    return Classification(verdict, coeffs.te_wb, None, coeffs, tuple(notes))


__all__ = [
    "ModulationCoefficients",
    "compute_coefficients",
    "coefficients_from_jets",
    "exact_coefficients",
    "raw_coefficients",
    "check_assumption_b",
    "classify",
    "Classification",
    "whitham_benjamin_closed_form",
    "RESONANCE_TOL",
    "NEAR_RESONANCE_TOL",
]
