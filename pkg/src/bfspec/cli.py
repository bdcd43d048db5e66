"""bfspec command line.

Exit codes: 0 ok, 1 usage or input error, 2 degenerate or not unstable,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import errors as E
from .asymptotics import eigenvalue_branches, figure8_curve, max_growth_rate, mu_critical
from .config import RunConfig, load_config, parse_axis
from .floquet import assemble, compare_asymptotics, default_radius, eigs_near_zero, oracle_wave
from .modulation import check_assumption_b, classify
from .output import dump_csv, dump_json, svg_curve, svg_heatmap
from .stability_map import (
    DslFamily,
    catalog_family,
    kawahara_critical_slopes,
    scan1d,
    scan2d,
    whitham_threshold,
)
from .stokes import second_order_expansion, solve_newton
from .symbols import CATALOG_KINDS, check_assumption_a, symbol_to_table

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_NUMERIC = 0, 1, 2, 3

_INPUT_ERRORS = (E.InvalidParameter, E.DomainError, E.ParseError, E.UnknownParameter, E.InvalidN, E.BracketInvalid)
_MATH_ERRORS = (E.DegenerateCoefficient, E.NotUnstable, E.ResonantDenominator)
_SYMBOL_FLAGS = ("tth", "kappa", "gamma", "ta", "tb", "alpha")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class _Refusal(Exception):
    """Carries a payload to print before exiting with code 2."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


# --------------------------------------------------------------------------
# config assembly


def _param_pair(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def _symbol_table(args, base):
    params = {k: getattr(args, k) for k in _SYMBOL_FLAGS if getattr(args, k) is not None}
    params.update(dict(args.p or []))
    if args.symbol and args.dsl:
        raise E.InvalidParameter("give either --symbol or --dsl, not both")
    if args.symbol:
        return {"kind": args.symbol, "params": params}
    if args.dsl:
        return {"dsl": args.dsl, "params": params}
    if base is not None:
        merged = dict(base)
        merged["params"] = {**dict(base.get("params", {})), **params}
        return merged
    return None


def build_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        k: getattr(args, k, None)
        for k in ("epsilon", "mu", "mu_max", "n_mu", "n_modes", "stokes_modes", "method", "tol", "radius",
                  "n_quad", "samples", "workers", "out_dir", "format")
    }
    overrides["p1"] = parse_axis(args.p1) if getattr(args, "p1", None) else None
    overrides["p2"] = parse_axis(args.p2) if getattr(args, "p2", None) else None
    if getattr(args, "full", False):
        overrides["full"] = True
    cfg = cfg.merged(**overrides)
    cfg = cfg.merged(symbol=_symbol_table(args, cfg.symbol))
    if cfg.format is None:
        cfg = cfg.merged(format=_DEFAULT_FORMAT.get(args.command, "json"))
    return cfg.validate()


# --------------------------------------------------------------------------
# subcommands; each returns {format: text} plus an exit code


def _coeff_payload(sym, verdict):
    out = {"symbol": symbol_to_table(sym), **verdict.to_json()}
    return out


def cmd_check(cfg):
    sym = cfg.build_symbol()
    rep_a = check_assumption_a(sym)
    verdict = classify(sym)
    rep_b = check_assumption_b(verdict.coefficients) if verdict.coefficients is not None else None
    a = asdict(rep_a)
    a["ok"] = rep_a.ok
    b = None if rep_b is None else {"ok": rep_b.ok, "failed": rep_b.failed, "near_degenerate": rep_b.near_degenerate, "values": rep_b.values}
    payload = {"symbol": symbol_to_table(sym), "assumption_a": a, "assumption_b": b, "class": verdict.verdict, "reason": verdict.reason}
    rows = [["assumption_a", rep_a.ok], ["assumption_b", bool(rep_b and rep_b.ok)], ["class", verdict.verdict]]
    code = EXIT_OK if rep_a.ok and rep_b is not None and rep_b.ok else EXIT_MATH
    return {"json": dump_json(payload), "csv": dump_csv(["item", "value"], rows)}, code


def cmd_coeffs(cfg):
    sym = cfg.build_symbol()
    verdict = classify(sym)
    payload = _coeff_payload(sym, verdict)
    rows = []
    if verdict.coefficients is not None:
        rows = [[k, v] for k, v in verdict.coefficients.to_json().items() if k != "provenance"]
    rows.append(["class", verdict.verdict])
    code = EXIT_MATH if verdict.is_degenerate else EXIT_OK
    return {"json": dump_json(payload), "csv": dump_csv(["name", "value"], rows)}, code


def cmd_stokes(cfg):
    sym = cfg.build_symbol()
    if cfg.method == "expansion":
        wave = second_order_expansion(sym, cfg.epsilon)
    else:
        wave = solve_newton(sym, cfg.epsilon, cfg.stokes_modes)
    payload = {"symbol": symbol_to_table(sym), **wave.to_json(), "iterations": wave.iterations}
    rows = [[n, float(a)] for n, a in enumerate(wave.cos_coeffs)]
    return {"json": dump_json(payload), "csv": dump_csv(["n", "a_n"], rows)}, EXIT_OK


def cmd_spectrum(cfg):
    sym = cfg.build_symbol()
    wave = oracle_wave(sym, cfg.epsilon, cfg.n_modes)
    mat = assemble(sym, wave, cfg.mu, cfg.n_modes)
    radius = cfg.radius or default_radius(sym, cfg.epsilon, cfg.mu)
    near = eigs_near_zero(mat, radius)
    payload = {
        "symbol": symbol_to_table(sym),
        "epsilon": cfg.epsilon,
        "mu": cfg.mu,
        "n_modes": cfg.n_modes,
        "radius": radius,
        "near_zero": [[z.real, z.imag] for z in near],
    }
    verdict = classify(sym)
    if not verdict.is_degenerate:
        pred = eigenvalue_branches(verdict.coefficients, cfg.epsilon, [abs(cfg.mu)]).eigenvalues()[0]
        payload["asymptotic"] = [[z.real, z.imag] for z in pred]
    rows = [["near_zero", z.real, z.imag] for z in near]
    if cfg.full:
        full = mat.eigenvalues()
        full = full[np.lexsort((full.real, full.imag))]
        payload["full"] = [[z.real, z.imag] for z in full]
        rows += [["full", z.real, z.imag] for z in full]
    return {"json": dump_json(payload), "csv": dump_csv(["set", "re", "im"], rows)}, EXIT_OK


def _require_unstable(sym, epsilon):
    verdict = classify(sym)
    if not verdict.is_unstable:
        detail = verdict.reason or f"te_wb = {verdict.te_wb:.6g} <= 0"
        raise _Refusal(f"{sym.name}: not in the Benjamin-Feir unstable regime ({detail})", verdict.to_json())
    return verdict.coefficients


def cmd_figure8(cfg):
    sym = cfg.build_symbol()
    co = _require_unstable(sym, cfg.epsilon)
    curve = figure8_curve(co, cfg.epsilon, cfg.samples)
    mu_c = mu_critical(co, cfg.epsilon)
    branch = eigenvalue_branches(co, cfg.epsilon, np.linspace(0.0, mu_c, cfg.samples))
    header, rows = branch.rows()
    growth = max_growth_rate(co, cfg.epsilon)
    payload = {
        "symbol": symbol_to_table(sym),
        "epsilon": cfg.epsilon,
        "mu_crit": mu_c,
        "max_growth_rate": growth["rate"],
        "mu_star": growth["mu_star"],
        "curve": curve.tolist(),
    }
    title = f"{sym.name}, eps = {cfg.epsilon:g}"
    return {"svg": svg_curve(curve, title=title), "csv": dump_csv(header, rows), "json": dump_json(payload)}, EXIT_OK


def cmd_oracle(cfg):
    sym = cfg.build_symbol()
    verdict = classify(sym)
    if verdict.is_degenerate:
        raise _Refusal(f"{sym.name}: degenerate ({verdict.reason})", verdict.to_json())
    mu_max = cfg.mu_max
    if mu_max is None:
        mu_max = 1.5 * mu_critical(verdict.coefficients, cfg.epsilon) if verdict.is_unstable else 0.05
    grid = np.linspace(mu_max / cfg.n_mu, mu_max, cfg.n_mu)
    report = compare_asymptotics(sym, cfg.epsilon, grid, cfg.n_modes)
    report.meta["class"] = verdict.verdict
    report.meta["max_real_part"] = report.max_real
    return {"json": report.to_json(), "csv": report.to_csv()}, EXIT_OK


def _family(cfg):
    table = cfg.symbol
    axes = {a[0] for a in (cfg.p1, cfg.p2) if a is not None}
    fixed = {k: v for k, v in dict(table.get("params", {})).items() if k not in axes}
    if "kind" in table:
        return catalog_family(table["kind"], **fixed)
    return DslFamily(table["dsl"], tuple(sorted(fixed.items())))


def cmd_map(cfg):
    if cfg.p1 is None:
        raise E.InvalidParameter("map needs --p1 name:lo:hi:n")
    family = _family(cfg)
    smap = scan2d(family, cfg.p1, cfg.p2, cfg.workers) if cfg.p2 else scan1d(family, cfg.p1, cfg.workers)
    payload = {
        "axes": [list(a) for a in smap.axes],
        "cells": [{"params": c.params, "class": c.label, **c.coeffs} for c in smap.cells],
    }
    svg = svg_heatmap(smap.grid_labels(), cfg.p1, cfg.p2)
    return {"csv": smap.to_csv(), "json": dump_json(payload), "svg": svg}, EXIT_OK


def cmd_threshold(cfg):
    table = cfg.symbol
    params = set(dict(table.get("params", {})))
    kind = table.get("kind")
    if kind is None:
        from .dsl import parameters, parse

        names = parameters(parse(table["dsl"]))
        kind = "kawahara" if {"ta", "tb"} <= names else "whitham" if names == {"tth"} else None
        fam = DslFamily(table["dsl"])
    else:
        fam = catalog_family(kind)
    if kind == "whitham":
        value = whitham_threshold(cfg.tol, family=fam)
        payload = {"family": "whitham", "parameter": "tth", "threshold": value}
        return {"json": dump_json(payload), "csv": dump_csv(["parameter", "threshold"], [["tth", value]])}, EXIT_OK
    if kind == "kawahara":
        s = kawahara_critical_slopes(fam)
        payload = {"family": "kawahara", "along": "tb = 1", **asdict(s), "te_wb_sign_changes": s.te_wb_sign_changes}
        payload["resonances"] = {str(k): v for k, v in s.resonances.items()}
        rows = [["te_wb_zero", v] for v in s.te_wb_zeros] + [["te_wb_pole", v] for v in s.te_wb_poles]
        rows += [["te12_zero", v] for v in s.te12_zeros] + [[f"resonance_n{k}", v] for k, v in s.resonances.items()]
        return {"json": dump_json(payload), "csv": dump_csv(["kind", "ta_over_tb"], rows)}, EXIT_OK
    raise E.InvalidParameter(f"threshold is defined for the whitham and kawahara families, not {kind or params}")


COMMANDS = {
    "check": (cmd_check, "Assumption A/B report"),
    "coeffs": (cmd_coeffs, "modulational coefficients and classification"),
    "stokes": (cmd_stokes, "small-amplitude traveling wave"),
    "spectrum": (cmd_spectrum, "Floquet eigenvalues near the origin at one mu"),
    "figure8": (cmd_figure8, "leading-order figure-8 curve (SVG/CSV)"),
    "oracle": (cmd_oracle, "numerical spectrum vs asymptotic branches"),
    "map": (cmd_map, "1-d or 2-d stability map"),
    "threshold": (cmd_threshold, "Whitham depth threshold or Kawahara critical slopes"),
}

_DEFAULT_FORMAT = {"figure8": "svg", "map": "csv"}


def build_parser():
    parser = _Parser(prog="bfspec", description="Benjamin-Feir spectra of nonlocal dispersive equations")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("symbol")
    g.add_argument("--symbol", choices=CATALOG_KINDS)
    g.add_argument("--dsl", help="expression in xi, e.g. 'sqrt(tanh(h*xi)/xi)'")
    for name in _SYMBOL_FLAGS:
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--p", action="append", type=_param_pair, metavar="NAME=VALUE", help="DSL/catalog parameter")
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out-dir")
    common.add_argument("--format", choices=("csv", "json", "svg"))

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("stokes", "spectrum", "figure8", "oracle"):
            p.add_argument("--epsilon", type=float)
        if name in ("spectrum", "oracle"):
            p.add_argument("--n-modes", type=int)
        if name == "stokes":
            p.add_argument("--stokes-modes", "--modes", dest="stokes_modes", type=int)
            p.add_argument("--method", choices=("newton", "expansion"))
        if name == "spectrum":
            p.add_argument("--mu", type=float)
            p.add_argument("--radius", type=float)
            p.add_argument("--full", action="store_true")
        if name == "oracle":
            p.add_argument("--mu-max", type=float)
            p.add_argument("--n-mu", type=int)
        if name == "figure8":
            p.add_argument("--samples", type=int)
        if name == "map":
            p.add_argument("--p1", help="name:lo:hi:n")
            p.add_argument("--p2", help="name:lo:hi:n")
            p.add_argument("--workers", type=int)
        if name == "threshold":
            p.add_argument("--tol", type=float)
    return parser


def _write(cfg, command, outputs):
    fmt = cfg.format
    if fmt not in outputs:
        raise E.InvalidParameter(f"{command} does not produce {fmt} output; choose from {sorted(outputs)}")
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        targets = {fmt}
        if command == "figure8":
            targets |= {"svg", "csv"}
        for ext in sorted(targets):
            path = out / f"{command}.{ext}"
            path.write_text(outputs[ext], encoding="utf-8")
            print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(outputs[fmt])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    fn = COMMANDS[args.command][0]
    try:
        cfg = build_config(args)
        outputs, code = fn(cfg)
        _write(cfg, args.command, outputs)
        return code
    except _Refusal as exc:
        print(f"bfspec {args.command}: {exc}", file=sys.stderr)
        if exc.payload is not None:
            sys.stdout.write(dump_json(exc.payload))
        return EXIT_MATH
    except _INPUT_ERRORS as exc:
        print(f"bfspec {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _MATH_ERRORS as exc:
        print(f"bfspec {args.command}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except E.BFSpecError as exc:
        print(f"bfspec {args.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
