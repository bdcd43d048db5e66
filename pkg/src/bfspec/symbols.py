"""Dispersion symbols m(xi) for generalized KdV equations.

A symbol is an even, real function of the wavenumber.  Everything downstream
(Stokes waves, modulational coefficients, Floquet matrices) only ever asks a
symbol for its value and its first two derivatives at a point, so the object
exposed here is deliberately small: ``value(xi)`` and ``jet(xi)``.

Catalog symbols carry hand-derived derivative formulas.  Removable
singularities at xi = 0 (Whitham family, ILW) are evaluated from truncated
Taylor series of tanh(x)/x and x*coth(x).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidParameter

log = logging.getLogger(__name__)

RESONANCE_TOL = 1e-9
NEAR_RESONANCE_TOL = 1e-4

CATALOG_KINDS = (
    "whitham",
    "capillary_whitham",
    "vorticity_whitham",
    "kawahara",
    "ilw",
    "kdv",
    "fkdv",
    "benjamin_ono",
)


@dataclass(frozen=True)
class Jet2:
    """Value and first two derivatives of a symbol at one point."""

    value: float
    d1: float
    d2: float

    def as_tuple(self):
        return (self.value, self.d1, self.d2)


@dataclass(frozen=True)
class DispersionSymbol:
    name: str
    params: Mapping[str, float]
    growth_exponent: float
    jet_source: str = "closed-form"
    zero_behavior: str = "smooth"
    kind: str | None = None
    expression: str | None = None
    _jet: Callable[[float], Jet2] = field(repr=False, compare=False, default=None)
    _value: Callable[[float], float] | None = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def value(self, xi: float) -> float:
        if self._value is not None:
            return self._value(float(xi))
        return self._jet(float(xi)).value

    def jet(self, xi: float) -> Jet2:
        return self._jet(float(xi))

    def __call__(self, xi):
        if np.ndim(xi) == 0:
            return self.value(xi)
        return np.array([self.value(x) for x in np.ravel(xi)]).reshape(np.shape(xi))


def eval_symbol(sym: DispersionSymbol, xi: float) -> float:
    """m(xi), with removable singularities replaced by their limits."""
    if not math.isfinite(xi):
        raise InvalidParameter(f"xi must be finite, got {xi}")
    return sym.value(xi)


def jet2_at(sym: DispersionSymbol, xi: float) -> Jet2:
    """(m, m', m'') at xi.  At xi = 0 right derivatives are returned."""
    if not math.isfinite(xi):
        raise InvalidParameter(f"xi must be finite, got {xi}")
    return sym.jet(xi)


# --------------------------------------------------------------------------
# building blocks: jets of tanh(x)/x and x*coth(x) for x >= 0

_TANHC = (1.0, -1 / 3, 2 / 15, -17 / 315, 62 / 2835, -1382 / 155925, 21844 / 6081075)
_XCOTH = (1.0, 1 / 3, -1 / 45, 2 / 945, -1 / 4725, 2 / 93555, -1382 / 638512875)
_SERIES_CUTOFF = 0.05


def _even_series_jet(coeffs, x):
    v = d1 = d2 = 0.0
    for k, c in enumerate(coeffs):
        n = 2 * k
        v += c * x**n
        if n >= 1:
            d1 += n * c * x ** (n - 1)
        if n >= 2:
            d2 += n * (n - 1) * c * x ** (n - 2)
    return v, d1, d2


def _tanhc(x):
    """tanh(x)/x and its two derivatives, x >= 0."""
    if x < _SERIES_CUTOFF:
        return _even_series_jet(_TANHC, x)
    t = math.tanh(x)
    s = 1.0 - t * t
    return (
        t / x,
        (x * s - t) / x**2,
        (-2 * x * x * s * t - 2 * x * s + 2 * t) / x**3,
    )


def _xcoth(x):
    """x*coth(x) and its two derivatives, x >= 0."""
    if x < _SERIES_CUTOFF:
        return _even_series_jet(_XCOTH, x)
    coth = 1.0 / math.tanh(x)
    csch2 = 0.0 if x > 350 else 1.0 / math.sinh(x) ** 2
    c = x * coth
    return c, coth - x * csch2, 2 * csch2 * (c - 1.0)


def _depth_ratio_jet(h, xi):
    """T(xi) = tanh(h xi)/xi with derivatives, xi >= 0."""
    s, s1, s2 = _tanhc(h * xi)
    return h * s, h * h * s1, h**3 * s2


def _sqrt_jet(g, g1, g2):
    if g < 0:
        raise InvalidParameter(f"negative radicand {g} in symbol")
    f = math.sqrt(g)
    if f == 0.0:
        return 0.0, math.inf, math.inf
    return f, g1 / (2 * f), g2 / (2 * f) - g1 * g1 / (4 * f**3)


# --------------------------------------------------------------------------
# catalog


def _even(fn):
    """Extend a jet on xi >= 0 to the whole line by evenness."""

    def jet(xi):
        v, d1, d2 = fn(abs(xi))
        if xi < 0:
            d1 = -d1
        return Jet2(float(v), float(d1), float(d2))

    return jet


def _whitham(p):
    h = p["tth"]
    return _even(lambda x: _sqrt_jet(*_depth_ratio_jet(h, x)))


def _capillary(p):
    h, k = p["tth"], p["kappa"]

    def fn(x):
        t, t1, t2 = _depth_ratio_jet(h, x)
        q = 1 + k * x * x
        g = q * t
        g1 = 2 * k * x * t + q * t1
        g2 = 2 * k * t + 4 * k * x * t1 + q * t2
        return _sqrt_jet(g, g1, g2)

    return _even(fn)


def _vorticity(p):
    h, gam = p["tth"], p["gamma"]

    def fn(x):
        t, t1, t2 = _depth_ratio_jet(h, x)
        q = t + 0.25 * gam * gam * t * t
        q1 = t1 * (1 + 0.5 * gam * gam * t)
        q2 = t2 * (1 + 0.5 * gam * gam * t) + 0.5 * gam * gam * t1 * t1
        r, r1, r2 = _sqrt_jet(q, q1, q2)
        return 0.5 * gam * t + r, 0.5 * gam * t1 + r1, 0.5 * gam * t2 + r2

    return _even(fn)


def _ilw(p):
    h = p["tth"]

    def fn(x):
        c, c1, c2 = _xcoth(h * x)
        return (c - 1.0) / h, c1, h * c2

    return _even(fn)


def _kawahara(p):
    a, b = p["ta"], p["tb"]
    return _even(lambda x: (a * x**2 + b * x**4, 2 * a * x + 4 * b * x**3, 2 * a + 12 * b * x**2))


def _kdv(p):
    return _even(lambda x: (x * x, 2 * x, 2.0))


def _fkdv(p):
    al = p["alpha"]
    return _even(lambda x: (x**al, al * x ** (al - 1), al * (al - 1) * x ** (al - 2)))


def _benjamin_ono(p):
    return _even(lambda x: (x, 1.0, 0.0))


# kind -> (builder, required params, defaults, growth exponent(params), zero behavior)
_CATALOG = {
    "whitham": (_whitham, ("tth",), {"tth": 1.0}, lambda p: -0.5, "smooth"),
    "capillary_whitham": (_capillary, ("tth", "kappa"), {"tth": 1.0}, lambda p: 0.5, "smooth"),
    "vorticity_whitham": (_vorticity, ("tth", "gamma"), {"tth": 1.0, "gamma": 0.0}, lambda p: -0.5, "smooth"),
    "kawahara": (_kawahara, ("ta", "tb"), {"ta": 1.0}, lambda p: 4.0, "smooth"),
    "ilw": (_ilw, ("tth",), {"tth": 1.0}, lambda p: 1.0, "smooth"),
    "kdv": (_kdv, (), {}, lambda p: 2.0, "smooth"),
    "fkdv": (_fkdv, ("alpha",), {}, lambda p: p["alpha"], "right-limits-only"),
    "benjamin_ono": (_benjamin_ono, (), {}, lambda p: 1.0, "right-limits-only"),
}

# DSL twins of the catalog, used for cross-checks and by the CLI.
DSL_TWINS = {
    "whitham": "sqrt(tanh(tth*xi)/xi)",
    "capillary_whitham": "sqrt((1 + kappa*xi^2)*tanh(tth*xi)/xi)",
    "vorticity_whitham": "gamma/2*tanh(tth*xi)/xi + sqrt(tanh(tth*xi)/xi + gamma^2/4*(tanh(tth*xi)/xi)^2)",
    "kawahara": "ta*xi^2 + tb*xi^4",
    "ilw": "xi*coth(tth*xi) - 1/tth",
    "kdv": "xi^2",
    "fkdv": "abs(xi)^alpha",
    "benjamin_ono": "abs(xi)",
}


def _validate(kind, p):
    for name in ("tth", "kappa", "tb"):
        if name in p and not p[name] > 0:
            raise InvalidParameter(f"{kind}: {name} must be > 0, got {p[name]}")
    if kind == "fkdv" and not p["alpha"] >= 3:
        raise InvalidParameter(f"fkdv: alpha must be >= 3 for C^3 regularity, got {p['alpha']}")
    for name, v in p.items():
        if not math.isfinite(v):
            raise InvalidParameter(f"{kind}: {name} must be finite")


def make_catalog_symbol(kind: str, **params: float) -> DispersionSymbol:
    """Build one of the built-in symbols.

    >>> make_catalog_symbol("kdv").jet(1.0)
    Jet2(value=1.0, d1=2.0, d2=2.0)
    """
    try:
        builder, required, defaults, growth, zero = _CATALOG[kind]
    except KeyError:
        raise InvalidParameter(f"unknown symbol kind {kind!r}; choose from {', '.join(CATALOG_KINDS)}") from None
    unknown = set(params) - set(required)
    if unknown:
        raise InvalidParameter(f"{kind}: unknown parameter(s) {sorted(unknown)}")
    p = dict(defaults)
    p.update({k: float(v) for k, v in params.items()})
    missing = [r for r in required if r not in p]
    if missing:
        raise InvalidParameter(f"{kind}: missing parameter(s) {missing}")
    _validate(kind, p)
    return DispersionSymbol(
        name=kind,
        params=p,
        growth_exponent=float(growth(p)),
        jet_source="closed-form",
        zero_behavior=zero,
        kind=kind,
        _jet=builder(p),
    )


def rescale_symbol(sym: DispersionSymbol, kappa_wave: int) -> DispersionSymbol:
    """Symbol of kappa*M(kappa*D), i.e. xi -> kappa*m(kappa*xi).

    Used to study waves of period 2*pi/kappa as 2*pi-periodic ones.
    """
    k = int(kappa_wave)
    if k != kappa_wave or k < 1:
        raise InvalidParameter(f"kappa_wave must be a positive integer, got {kappa_wave}")
    if k == 1:
        return sym
    inner = sym._jet

    def jet(xi):
        j = inner(k * xi)
        return Jet2(k * j.value, k * k * j.d1, k**3 * j.d2)

    return DispersionSymbol(
        name=f"{sym.name}[k={k}]",
        params=sym.params,
        growth_exponent=sym.growth_exponent,
        jet_source=sym.jet_source,
        zero_behavior=sym.zero_behavior,
        kind=None,
        expression=None,
        _jet=jet,
    )


# --------------------------------------------------------------------------
# Assumption A


@dataclass
class AssumptionAReport:
    even_ok: bool
    growth_ok: bool
    gap_c0: float
    resonant_n: int | None
    near_resonant: list = field(default_factory=list)
    tail_certified: bool = False
    growth_bounds: tuple = (math.nan, math.nan)
    explicit_gap: float = math.nan
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return self.even_ok and self.growth_ok and self.resonant_n is None and self.gap_c0 > 0


def _bracket(x):
    return math.sqrt(1.0 + x * x)


def check_assumption_a(sym: DispersionSymbol, n_max: int = 64, grid=None) -> AssumptionAReport:
    """Evenness, growth and the non-resonance gap inf_{n != 1} |m(n) - m(1)|.

    The gap is the explicit minimum over n in {0, 2, ..., n_max}; the tail
    n > n_max is bounded using the growth envelope C1 <xi>^m <= m <= C2 <xi>^m
    fitted on ``grid`` (default: 200 log-spaced points in [10, 1e4]).
    """
    if n_max < 2:
        raise InvalidParameter("n_max must be >= 2")
    warnings = []

    sample = np.concatenate([np.linspace(0.1, 10.0, 100), np.geomspace(10.0, 1e4, 50)])
    even_ok = True
    for x in sample:
        a, b = sym.value(x), sym.value(-x)
        if not abs(a - b) <= 1e-12 * (1 + abs(a)):
            even_ok = False
            warnings.append(f"symbol not even at xi={x:g}")
            break

    growth_grid = np.geomspace(10.0, 1e4, 200) if grid is None else np.asarray(grid, float)
    m_exp = sym.growth_exponent
    ratios = np.array([sym.value(x) / _bracket(x) ** m_exp for x in growth_grid])
    c1, c2 = float(ratios.min()), float(ratios.max())
    growth_ok = bool(np.all(np.isfinite(ratios)) and c1 > 0 and c2 / c1 <= 1e2)
    if not growth_ok:
        warnings.append(f"growth envelope <xi>^{m_exp:g} not confirmed (C1={c1:.3g}, C2={c2:.3g})")

    m1 = sym.value(1.0)
    gaps = {n: abs(sym.value(float(n)) - m1) for n in [0, *range(2, n_max + 1)]}
    resonant = [n for n, g in gaps.items() if g < RESONANCE_TOL]
    near = [n for n, g in gaps.items() if RESONANCE_TOL <= g < NEAR_RESONANCE_TOL]
    for n in near:
        warnings.append(f"near resonance at n={n}: |m({n}) - m(1)| = {gaps[n]:.3e}")
        log.warning("near resonance at n=%d for %s", n, sym.name)
    explicit = min(gaps.values())

    tail = -math.inf
    if growth_ok:
        env = _bracket(n_max + 1.0) ** m_exp
        if m_exp > 0:
            tail = c1 * env - m1
        elif m_exp < 0 and m1 > 0:
            tail = m1 - c2 * env
    tail_certified = tail > 0
    gap = min(explicit, tail) if tail_certified else explicit
    if not tail_certified:
        warnings.append("tail n > n_max not certified by growth bound; gap is the sampled minimum")

    return AssumptionAReport(
        even_ok=even_ok,
        growth_ok=growth_ok,
        gap_c0=float(gap),
        resonant_n=resonant[0] if resonant else None,
        near_resonant=near,
        tail_certified=tail_certified,
        growth_bounds=(c1, c2),
        explicit_gap=float(explicit),
        warnings=warnings,
    )


# --------------------------------------------------------------------------
# TOML tables


def symbol_to_table(sym: DispersionSymbol) -> dict:
    if sym.kind is not None:
        return {"kind": sym.kind, "params": dict(sym.params)}
    if sym.expression is not None:
        return {"dsl": sym.expression, "params": dict(sym.params)}
    raise InvalidParameter(f"symbol {sym.name!r} has no serializable form")


def symbol_from_table(table: Mapping) -> DispersionSymbol:
    extra = set(table) - {"kind", "dsl", "params", "growth_exponent"}
    if extra:
        raise InvalidParameter(f"unknown symbol keys {sorted(extra)}")
    params = dict(table.get("params", {}))
    if "kind" in table and "dsl" in table:
        raise InvalidParameter("give either 'kind' or 'dsl', not both")
    if "kind" in table:
        return make_catalog_symbol(table["kind"], **params)
    if "dsl" in table:
        from .dsl import symbol_from_expression

        return symbol_from_expression(table["dsl"], params, growth_exponent=table.get("growth_exponent"))
    raise InvalidParameter("symbol table needs 'kind' or 'dsl'")


def symbol_to_toml(sym: DispersionSymbol) -> str:
    table = symbol_to_table(sym)
    lines = ["[symbol]"]
    for key in ("kind", "dsl"):
        if key in table:
            lines.append(f"{key} = {_toml_str(table[key])}")
    lines.append("")
    lines.append("[symbol.params]")
    for k, v in table["params"].items():
        lines.append(f"{k} = {v!r}")
    return "\n".join(lines) + "\n"


def _toml_str(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
