"""Parameter scans of the Benjamin-Feir sign and the critical curves of the catalog families."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import bisect, brentq

from .errors import BFSpecError, BracketInvalid, InvalidN, InvalidParameter
from .modulation import NEAR_DEGENERACY_TOL, check_assumption_b, classify, compute_coefficients, raw_coefficients
from .output import fmt
from .symbols import NEAR_RESONANCE_TOL, check_assumption_a, make_catalog_symbol

CSV_HEADER = ["p1", "p2", "te12", "te_d", "te_b", "te_w", "te_wb", "class"]


def catalog_family(kind: str, **fixed):
    """Picklable parameter -> symbol constructor for a catalog kind."""
    return partial(make_catalog_symbol, kind, **fixed)


@dataclass(frozen=True)
class DslFamily:
    """Parameter -> symbol constructor for a DSL expression."""

    text: str
    fixed: tuple = ()

    def __call__(self, **params):
        from .dsl import symbol_from_expression

        return symbol_from_expression(self.text, {**dict(self.fixed), **params})


# --------------------------------------------------------------------------
# cell classification


@dataclass(frozen=True)
class Cell:
    params: dict
    label: str  # unstable | stable | degenerate(reason) | resonant(n)
    coeffs: dict = field(default_factory=dict)

    @property
    def te_wb(self):
        return self.coeffs.get("te_wb", math.nan)


_COEFF_NAMES = ("te12", "te_d", "te_b", "te_w", "te_wb")


def classify_cell(family, params: dict) -> Cell:
    """Coefficient-sign verdict, painting anything within 1e-4 of a degeneracy as degenerate."""
    try:
        sym = family(**params)
    except BFSpecError as exc:
        return Cell(dict(params), f"degenerate(invalid: {exc})")
    verdict = classify(sym)
    coeffs = {}
    if verdict.coefficients is not None:
        coeffs = {k: getattr(verdict.coefficients, k) for k in _COEFF_NAMES}
    if verdict.resonant_n is not None:
        return Cell(dict(params), f"resonant({verdict.resonant_n})", coeffs)
    if verdict.is_degenerate:
        return Cell(dict(params), f"degenerate({verdict.reason})", coeffs)

    rep_a = check_assumption_a(sym)
    if rep_a.near_resonant:
        return Cell(dict(params), f"degenerate(near resonance n={rep_a.near_resonant[0]})", coeffs)
    co = verdict.coefficients
    near = check_assumption_b(co, warn_tol=NEAR_DEGENERACY_TOL).near_degenerate
    if near:
        return Cell(dict(params), f"degenerate(near zero {near[0]})", coeffs)
    for name, val in (("m(1)-m(0)", co.te33), ("m(1)-m(2)", 1 / co.fa), ("te_wb", co.te_wb)):
        if abs(val) < NEAR_RESONANCE_TOL:
            return Cell(dict(params), f"degenerate(near zero {name})", coeffs)
    return Cell(dict(params), verdict.verdict, coeffs)


def _cell_task(args):
    family, params = args
    return classify_cell(family, params)


def _run(family, param_list, workers):
    tasks = [(family, p) for p in param_list]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_cell_task(t) for t in tasks]


@dataclass
class SignMap:
    axes: list  # [(name, lo, hi, n), ...]
    cells: list  # row-major over axes

    def labels(self):
        return [c.label for c in self.cells]

    def grid_labels(self):
        if len(self.axes) == 1:
            return np.array(self.labels(), dtype=object)
        return np.array(self.labels(), dtype=object).reshape(self.axes[0][3], self.axes[1][3])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        names = [a[0] for a in self.axes]
        for c in self.cells:
            p1 = c.params[names[0]]
            p2 = c.params[names[1]] if len(names) > 1 else ""
            row = [fmt(p1), "" if p2 == "" else fmt(p2)]
            row += [fmt(c.coeffs[k]) if k in c.coeffs else "" for k in _COEFF_NAMES]
            row.append(c.label)
            w.writerow(row)
        return buf.getvalue()


def _axis(axis):
    name, lo, hi, n = axis
    if n < 2:
        raise InvalidParameter(f"axis {name} needs at least 2 points")
    return name, np.linspace(lo, hi, n)


def scan2d(family, p1, p2, workers: int | None = None) -> SignMap:
    """Classify every cell of a p1 x p2 grid; p1/p2 are (name, lo, hi, n)."""
    n1, v1 = _axis(p1)
    n2, v2 = _axis(p2)
    params = [{n1: float(a), n2: float(b)} for a in v1 for b in v2]
    return SignMap([tuple(p1), tuple(p2)], _run(family, params, workers))


def scan1d(family, param, workers: int | None = None) -> SignMap:
    name, vals = _axis(param)
    return SignMap([tuple(param)], _run(family, [{name: float(v)} for v in vals], workers))


# --------------------------------------------------------------------------
# Whitham threshold


def whitham_te_b(tth):
    """Closed form of te_b for the finite-depth Whitham symbol."""
    c = math.sqrt(math.tanh(tth))
    c2, c4 = c * c, c**4
    return ((tth * (1 - c4) - c2) ** 2 + 4 * tth * tth * c4 * (1 - c4)) / (8 * c**3)


def _te_wb(family, name, value):
    return compute_coefficients(family(**{name: value})).te_wb


def whitham_threshold(tol: float = 1e-10, family=None, bracket=(0.5, 2.0)) -> float:
    """Depth at which te_wb of the Whitham family changes sign."""
    if not tol > 0:
        raise InvalidParameter("tol must be > 0")
    family = family or catalog_family("whitham")
    lo, hi = bracket
    f = partial(_te_wb, family, "tth")
    flo, fhi = f(lo), f(hi)
    if not flo * fhi < 0:
        raise BracketInvalid(f"te_wb has the same sign at tth={lo} ({flo:.3g}) and tth={hi} ({fhi:.3g})")
    for t in np.linspace(lo, hi, 16):
        if not whitham_te_b(t) > 0:
            raise BracketInvalid(f"te_b is not positive at tth={t}")
    return float(bisect(f, lo, hi, xtol=tol))


# --------------------------------------------------------------------------
# Kawahara critical lines (tb = 1)


def kawahara_closed_forms(ta, tb=1.0):
    """te12, te_d, te_b, te_w for m = ta xi^2 + tb xi^4 written out as polynomials."""
    return {
        "te12": 2 * ta + 4 * tb,
        "te_d": 3 * ta + 5 * tb,
        "te_b": -3 * ta - 10 * tb,
        "te_w": (3 * ta + 25 * tb) / (3 * (ta + 5 * tb) * (3 * ta + 5 * tb)),
        "te_wb": -(3 * ta + 10 * tb) * (3 * ta + 25 * tb) / (3 * (ta + 5 * tb) * (3 * ta + 5 * tb)),
    }


@dataclass
class KawaharaSlopes:
    te_wb_zeros: list
    te_wb_poles: list
    te12_zeros: list
    te_b_zeros: list
    te_w_num_zeros: list
    te_d_zeros: list
    resonances: dict  # n -> slope

    @property
    def te_wb_sign_changes(self):
        return sorted(self.te_wb_zeros + self.te_wb_poles)


def kawahara_critical_slopes(family=None, lo: float = -12.0, hi: float = 0.0, n_res: int = 8) -> KawaharaSlopes:
    """Sign changes of the named coefficients along tb = 1.

    A sign change of te_wb is a pole when te_d * (m(1) - m(2)) changes sign in
    the same bracket, and a zero otherwise.
    """
    family = family or catalog_family("kawahara")
    xs = np.linspace(lo, hi, 1201) + math.pi * 1e-5  # keeps samples off rational critical points
    cache = {}

    def raw(t):
        if t not in cache:
            cache[t] = raw_coefficients(family(ta=float(t), tb=1.0))
        return cache[t]

    def brackets(fn):
        y = [fn(x) for x in xs]
        return [
            (float(a), float(b))
            for a, b, ya, yb in zip(xs[:-1], xs[1:], y[:-1], y[1:])
            if np.isfinite(ya) and np.isfinite(yb) and ya * yb < 0
        ]

    def roots(name):
        fn = lambda t: raw(t)[name]  # noqa: E731
        return [brentq(fn, a, b, xtol=1e-14) for a, b in brackets(fn)]

    pole_fn = lambda t: raw(t)["te_d"] * raw(t)["m1-m2"]  # noqa: E731
    wb_fn = lambda t: raw(t)["te_wb"]  # noqa: E731
    zeros, poles = [], []
    for a, b in brackets(wb_fn):
        if pole_fn(a) * pole_fn(b) < 0:
            poles.append(brentq(pole_fn, a, b, xtol=1e-14))
        else:
            zeros.append(brentq(wb_fn, a, b, xtol=1e-14))

    def gap(t, n):
        sym = family(ta=t, tb=1.0)
        return sym.value(float(n)) - sym.value(1.0)

    resonances = {}
    for n in range(2, n_res + 1):
        centre = -(n * n + 1.0)
        resonances[n] = brentq(gap, centre - 0.5, centre + 0.5, args=(n,), xtol=1e-14)
    return KawaharaSlopes(
        te_wb_zeros=zeros,
        te_wb_poles=poles,
        te12_zeros=roots("te12"),
        te_b_zeros=roots("te_b"),
        te_w_num_zeros=roots("te_w_num"),
        te_d_zeros=roots("te_d"),
        resonances=resonances,
    )


# --------------------------------------------------------------------------
# capillary-gravity resonance curves


def capillary_resonance_curve(n: int, tth: float) -> float:
    """Surface tension kappa at which m(n) = m(1) for depth tth."""
    if not (n == 0 or (isinstance(n, (int, np.integer)) and n >= 2)):
        raise InvalidN(f"n must be 0 or an integer >= 2, got {n}")
    if not tth > 0:
        raise InvalidParameter("tth must be > 0")
    if n == 0:
        return tth / math.tanh(tth) - 1.0
    t1, tn = math.tanh(tth), math.tanh(n * tth)
    return (n * t1 - tn) / (n * n * tn - n * t1)
