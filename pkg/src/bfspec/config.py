"""Run configuration: a TOML file merged with command-line overrides.

Layout::

    [symbol]
    kind = "whitham"          # or dsl = "sqrt(tanh(h*xi)/xi)"
    [symbol.params]
    tth = 2.0

    [run]
    epsilon = 0.01
    n_modes = 48
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import tomli

from .errors import InvalidParameter
from .symbols import DispersionSymbol, symbol_from_table


@dataclass(frozen=True)
class RunConfig:
    symbol: dict | None = None
    epsilon: float = 0.01
    mu: float = 0.05
    mu_max: float | None = None
    n_mu: int = 40
    n_modes: int = 48
    stokes_modes: int = 32
    method: str = "newton"
    tol: float = 1e-10
    radius: float | None = None
    n_quad: int = 64
    samples: int = 200
    full: bool = False
    p1: tuple | None = None
    p2: tuple | None = None
    workers: int | None = None
    out_dir: str | None = None
    format: str | None = None  # per-command default when unset

    def validate(self):
        if self.symbol is None:
            raise InvalidParameter("no symbol given; use --symbol, --dsl or a [symbol] table")
        if self.format not in ("csv", "json", "svg"):
            raise InvalidParameter(f"format must be csv, json or svg, got {self.format!r}")
        if self.method not in ("newton", "expansion"):
            raise InvalidParameter(f"method must be newton or expansion, got {self.method!r}")
        for name in ("n_mu", "n_modes", "stokes_modes", "n_quad", "samples"):
            if getattr(self, name) < 1:
                raise InvalidParameter(f"{name} must be positive")
        if not self.tol > 0:
            raise InvalidParameter("tol must be > 0")
        if self.mu_max is not None and not 0 < self.mu_max <= 0.5:
            raise InvalidParameter("mu_max must lie in (0, 1/2]")
        for axis in (self.p1, self.p2):
            if axis is not None and (len(axis) != 4 or int(axis[3]) < 2):
                raise InvalidParameter(f"grid axis must be name:lo:hi:n with n >= 2, got {axis}")
        return self

    def build_symbol(self) -> DispersionSymbol:
        return symbol_from_table(self.symbol)

    def merged(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_RUN_KEYS = {f.name for f in fields(RunConfig)} - {"symbol"}


def parse_axis(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 4:
        raise InvalidParameter(f"grid axis must be name:lo:hi:n, got {text!r}")
    name, lo, hi, n = parts
    try:
        return (name, float(lo), float(hi), int(n))
    except ValueError:
        raise InvalidParameter(f"grid axis must be name:lo:hi:n, got {text!r}") from None


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except (OSError, tomli.TOMLDecodeError) as exc:
        raise InvalidParameter(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - {"symbol", "run"}
    if unknown:
        raise InvalidParameter(f"unknown config sections {sorted(unknown)}")
    run = dict(data.get("run", {}))
    bad = set(run) - _RUN_KEYS
    if bad:
        raise InvalidParameter(f"unknown [run] keys {sorted(bad)}")
    for key in ("p1", "p2"):
        if isinstance(run.get(key), str):
            run[key] = parse_axis(run[key])
        elif key in run:
            run[key] = tuple(run[key])
    return RunConfig(symbol=data.get("symbol"), **run)
