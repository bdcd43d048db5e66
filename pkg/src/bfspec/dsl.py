"""A small expression language for dispersion symbols.

Grammar (loosest to tightest)::

    expr   := expr ('+' | '-') expr
            | expr ('*' | '/') expr
            | '-' expr
            | expr '^' expr            # right associative
            | NUMBER | 'xi' | PARAM | FUNC '(' expr ')' | '(' expr ')'

Jets are computed by truncated Taylor arithmetic in the local variable
t = xi - xi0.  Each series carries a valuation (lowest power present), so a
0/0 quotient such as tanh(h*xi)/xi at xi0 = 0 just shifts the series instead of
producing nan.  Poles are allowed in intermediate results (xi*coth(h*xi))
as long as the final expression is regular.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .errors import (
    DomainError,
    ExtrapolationDiverged,
    InvalidParameter,
    NonDifferentiable,
    ParseError,
    UnknownFunction,
    UnknownParameter,
)
from .symbols import DispersionSymbol, Jet2

FUNCTIONS = ("sqrt", "tanh", "cosh", "sinh", "coth", "exp", "abs")
VARIABLE = "xi"


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


def pretty(node) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return VARIABLE
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Neg):
        return f"-({pretty(node.operand)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if isinstance(node, Call):
        return f"{node.fn}({pretty(node.arg)})"
    raise TypeError(node)


def parameters(node) -> set:
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Neg):
        return parameters(node.operand)
    if isinstance(node, BinOp):
        return parameters(node.left) | parameters(node.right)
    if isinstance(node, Call):
        return parameters(node.arg)
    return set()


def _uses_abs(node) -> bool:
    if isinstance(node, Call):
        return node.fn == "abs" or _uses_abs(node.arg)
    if isinstance(node, Neg):
        return _uses_abs(node.operand)
    if isinstance(node, BinOp):
        return _uses_abs(node.left) or _uses_abs(node.right)
    return False


def _check_abs(node, outermost=True):
    if isinstance(node, Call):
        if node.fn == "abs" and not (outermost or isinstance(node.arg, Var)):
            raise NonDifferentiable("abs() is only allowed as the outermost call or directly on xi")
        _check_abs(node.arg, False)
    elif isinstance(node, Neg):
        _check_abs(node.operand, False)
    elif isinstance(node, BinOp):
        _check_abs(node.left, False)
        _check_abs(node.right, False)


# --------------------------------------------------------------------------
# tokenizer and Pratt parser

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[a-z_][a-z0-9_]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)

_NUD_EXPECT = {"number", "xi", "parameter", "function", "(", "-"}
_LED_EXPECT = {"+", "-", "*", "/", "^", ")", "end of input"}
_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_NEG_BP = 30


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), _NUD_EXPECT)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if tok == "**":
                tok = "^"
            out.append(_Tok(kind, tok, _byte_offset(text, pos)))
        pos = m.end()
    out.append(_Tok("end", "", _byte_offset(text, len(text))))
    return out


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "end":
            raise ParseError(f"expected {text!r}", self.tok.offset, {text})
        return self.advance()

    def expression(self, rbp=0):
        left = self.nud(self.advance())
        while rbp < self.lbp(self.tok):
            left = self.led(self.advance(), left)
        return left

    def lbp(self, tok):
        if tok.kind == "op" and tok.text in _LBP:
            return _LBP[tok.text]
        if tok.kind == "end" or tok.text == ")":
            return 0
        raise ParseError(f"unexpected {tok.text!r}", tok.offset, _LED_EXPECT)

    def nud(self, tok):
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            if self.tok.text == "(" and self.tok.kind == "op":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {tok.text!r}", tok.offset, FUNCTIONS)
                self.advance()
                arg = self.expression()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                raise ParseError(f"function {tok.text!r} needs an argument", self.tok.offset, {"("})
            return Var() if tok.text == VARIABLE else Param(tok.text)
        if tok.text == "-":
            return Neg(self.expression(_NEG_BP))
        if tok.text == "+":
            return self.expression(_NEG_BP)
        if tok.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.offset, _NUD_EXPECT)

    def led(self, tok, left):
        op = tok.text
        if op == "^":
            return BinOp("^", left, self.expression(_LBP["^"] - 1))
        return BinOp(op, left, self.expression(_LBP[op]))


@lru_cache(maxsize=256)
def parse(text: str):
    """Parse symbol text into an AST (nodes are immutable, so results are cached).

    >>> parse("xi^2 + b*xi^4")
    BinOp(op='+', left=BinOp(op='^', left=Var(), right=Num(value=2.0)), right=BinOp(op='*', left=Param(name='b'), right=BinOp(op='^', left=Var(), right=Num(value=4.0))))
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0, _NUD_EXPECT)
    p = _Parser(text)
    ast = p.expression()
    if p.tok.kind != "end":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.offset, _LED_EXPECT)
    return ast


def bind(ast, params: Mapping[str, float]):
    """Check that every parameter resolves and abs() is placed legally."""
    missing = sorted(parameters(ast) - set(params))
    if missing:
        raise UnknownParameter(f"unbound parameter(s): {', '.join(missing)}")
    _check_abs(ast)
    return ast


# --------------------------------------------------------------------------
# truncated Taylor series with valuation

ORDER = 8  # highest absolute power of t tracked
_EPS = 2.220446049250313e-16


class _NonAnalytic(Exception):
    """Expression is not a power series at the expansion point."""


class _Series:
    """sum_k c[k] t^(v+k), known through t^top (top = v + len(c) - 1)."""

    __slots__ = ("v", "c", "top")

    def __init__(self, v, c, top=None):
        self.v = v
        self.c = list(c)
        self.top = v + len(self.c) - 1 if top is None else top
        del self.c[self.top - self.v + 1 :]

    @classmethod
    def const(cls, a):
        return cls(0, [float(a)] + [0.0] * ORDER)._strip(0.0)

    @property
    def is_zero(self):
        return not self.c

    @property
    def is_const(self):
        return self.is_zero or (self.v == 0 and all(x == 0.0 for x in self.c[1:]))

    def coeff(self, power):
        k = power - self.v
        if power > self.top:
            raise DomainError("series truncated below the requested order")
        return self.c[k] if 0 <= k < len(self.c) else 0.0

    def _strip(self, rtol, ref=None):
        k = 0
        while k < len(self.c):
            bound = rtol * ref[k] if ref is not None else 0.0
            if abs(self.c[k]) > bound:
                break
            k += 1
        if k:
            self.v += k
            self.c = self.c[k:]
        return self

    def dense(self):
        """Coefficients of t^0..t^top (requires v >= 0)."""
        if self.v < 0:
            raise DomainError("pole inside a function argument")
        out = [0.0] * (self.top + 1)
        for k, x in enumerate(self.c):
            out[self.v + k] = x
        return out

    def __add__(self, other):
        v = min(self.v, other.v)
        top = min(self.top, other.top)
        n = top - v + 1
        c = [0.0] * max(n, 0)
        ref = [0.0] * max(n, 0)
        for s in (self, other):
            for k, x in enumerate(s.c):
                p = s.v + k - v
                if 0 <= p < n:
                    c[p] += x
                    ref[p] += abs(x)
        return _Series(v, c, top)._strip(16 * _EPS, ref)

    def __neg__(self):
        return _Series(self.v, [-x for x in self.c], self.top)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            top = min(self.top + other.v, other.top + self.v)
            return _Series(top + 1, [], top)
        for a, b in ((self, other), (other, self)):
            if a.v == 0 and len(a.c) >= len(b.c) and not any(a.c[1:]):
                return _Series(b.v, [a.c[0] * x for x in b.c])
        n = min(len(self.c), len(other.c))
        c = [sum(self.c[i] * other.c[k - i] for i in range(k + 1)) for k in range(n)]
        return _Series(self.v + other.v, c)

    def __truediv__(self, other):
        if other.is_zero:
            raise DomainError("division by zero")
        if self.is_zero:
            top = self.top - other.v
            return _Series(top + 1, [], top)
        n = min(len(self.c), len(other.c))
        a, b = self.c, other.c
        q = []
        for k in range(n):
            q.append((a[k] - sum(q[i] * b[k - i] for i in range(k))) / b[0])
        return _Series(self.v - other.v, q)


def _from_dense(d):
    return _Series(0, d)._strip(0.0)


def _exp_dense(d):
    y = [math.exp(d[0])]
    for n in range(1, len(d)):
        y.append(sum(k * d[k] * y[n - k] for k in range(1, n + 1)) / n)
    return y


def _sinh_cosh_dense(d):
    s, c = [math.sinh(d[0])], [math.cosh(d[0])]
    for n in range(1, len(d)):
        s.append(sum(k * d[k] * c[n - k] for k in range(1, n + 1)) / n)
        c.append(sum(k * d[k] * s[n - k] for k in range(1, n + 1)) / n)
    return s, c


def _tanh_dense(d):
    y = [math.tanh(d[0])]
    w = [1.0 - y[0] ** 2]
    for n in range(1, len(d)):
        y.append(sum(k * d[k] * w[n - k] for k in range(1, n + 1)) / n)
        w.append(-sum(y[i] * y[n - i] for i in range(n + 1)))
    return y


def _pow_dense(a, p):
    """(a0 + a1 t + ...)^p for a0 > 0 (or integer p), Miller's recurrence."""
    y = [a[0] ** p]
    for n in range(1, len(a)):
        y.append(sum((k * (p + 1) - n) * a[k] * y[n - k] for k in range(1, n + 1)) / (n * a[0]))
    return y


def _log_dense(a):
    y = [math.log(a[0])]
    for n in range(1, len(a)):
        y.append((a[n] - sum(k * y[k] * a[n - k] for k in range(1, n)) / n) / a[0])
    return y


def _sqrt(s):
    if s.is_zero:
        raise _NonAnalytic("sqrt of a vanishing series")
    if s.c[0] < 0:
        raise DomainError("sqrt of a negative number")
    if s.v % 2:
        raise _NonAnalytic("sqrt of an odd-order zero")
    return _Series(s.v // 2, _pow_dense(s.c, 0.5))


def _power(base, expo):
    if expo.is_const:
        p = expo.coeff(0) if not expo.is_zero else 0.0
        if p == 0.0:
            return _Series.const(1.0)
        if base.is_zero:
            if p > 0:
                raise _NonAnalytic("power of a vanishing series")
            raise DomainError("zero raised to a non-positive power")
        integer = float(p).is_integer()
        if base.c[0] < 0 and not integer:
            raise DomainError("negative base with non-integer exponent")
        vp = base.v * p
        if not float(vp).is_integer():
            raise _NonAnalytic("fractional power of a zero")
        if integer and abs(p) <= 64:
            out, factor, k = None, base if p > 0 else _Series.const(1.0) / base, int(abs(p))
            while k:  # square and multiply
                if k & 1:
                    out = factor if out is None else out * factor
                k >>= 1
                if k:
                    factor = factor * factor
            return out
        return _Series(int(vp), _pow_dense(base.c, p))
    if base.v != 0 or base.is_zero or base.c[0] <= 0:
        raise DomainError("variable exponent needs a positive base")
    return _from_dense(_exp_dense((expo * _from_dense(_log_dense(base.dense()))).dense()))


class _Evaluator:
    def __init__(self, params, xi0, right_limit):
        self.params = params
        self.xi0 = xi0
        self.right_limit = right_limit

    def __call__(self, node):
        if isinstance(node, Num):
            return _Series.const(node.value)
        if isinstance(node, Param):
            return _Series.const(self.params[node.name])
        if isinstance(node, Var):
            if self.xi0 == 0.0:
                return _Series(1, [1.0] + [0.0] * (ORDER - 1))
            return _Series(0, [self.xi0, 1.0] + [0.0] * (ORDER - 1))
        if isinstance(node, Neg):
            return -self(node.operand)
        if isinstance(node, BinOp):
            a, b = self(node.left), self(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return _power(a, b)
        if isinstance(node, Call):
            return self.call(node.fn, self(node.arg))
        raise TypeError(node)

    def call(self, fn, s):
        if fn == "sqrt":
            return _sqrt(s)
        if fn == "abs":
            if s.is_zero:
                raise _NonAnalytic("abs of a vanishing series")
            if s.v > 0 and not (self.xi0 == 0.0 and self.right_limit):
                raise NonDifferentiable(f"abs() argument vanishes at xi={self.xi0}")
            return -s if s.c[0] < 0 else s
        d = s.dense()
        if fn == "exp":
            return _from_dense(_exp_dense(d))
        if fn == "tanh":
            return _from_dense(_tanh_dense(d))
        sh, ch = _sinh_cosh_dense(d)
        if fn == "sinh":
            return _from_dense(sh)
        if fn == "cosh":
            return _from_dense(ch)
        if fn == "coth":
            return _Series.const(1.0) / _from_dense(_tanh_dense(d))
        raise UnknownFunction(f"unknown function {fn!r}", 0, FUNCTIONS)


def _series_jet(ast, params, xi, right_limit):
    s = _Evaluator(params, xi, right_limit)(ast)
    if not s.is_zero and s.v < 0:
        raise DomainError(f"expression has a pole at xi={xi}")
    if s.top < 2:
        raise DomainError("not enough series terms survived cancellation")
    return Jet2(s.coeff(0), s.coeff(1), 2.0 * s.coeff(2))


_RICHARDSON_STEPS = (1e-2, 5e-3, 2.5e-3)


def _richardson(ast, params):
    """Right limits at 0 from jets at three positive points (step ratio 2)."""
    jets = [_series_jet(ast, params, h, False).as_tuple() for h in _RICHARDSON_STEPS]
    out = []
    for comp in zip(*jets):
        r1 = [2 * comp[1] - comp[0], 2 * comp[2] - comp[1]]
        r2 = (4 * r1[1] - r1[0]) / 3
        if not math.isfinite(r2) or abs(r2 - r1[1]) > 1e-3 * (1 + abs(r2)):
            raise ExtrapolationDiverged(f"right limit at xi=0 does not settle (estimates {r1[1]:.6g}, {r2:.6g})")
        out.append(r2)
    return Jet2(*out)


def eval_jet(ast, params: Mapping[str, float], xi: float, limit: bool = True) -> Jet2:
    """(m, m', m'') of the expression at xi.

    At xi = 0 with ``limit`` enabled, right-sided derivatives are returned; if
    the expression is not a power series there, they are extrapolated from
    xi in {1e-2, 5e-3, 2.5e-3}.
    """
    bind(ast, params)
    return _eval_jet_bound(ast, params, xi, limit)


def _eval_jet_bound(ast, params, xi, limit=True):
    xi = float(xi)
    if not math.isfinite(xi):
        raise InvalidParameter(f"xi must be finite, got {xi}")
    try:
        return _series_jet(ast, params, xi, limit)
    except _NonAnalytic as exc:
        if xi == 0.0 and limit:
            return _richardson(ast, params)
        raise NonDifferentiable(f"{exc} at xi={xi}") from None


def _float_eval(node, params, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Param):
        return params[node.name]
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_float_eval(node.operand, params, x)
    if isinstance(node, BinOp):
        a = _float_eval(node.left, params, x)
        b = _float_eval(node.right, params, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        r = a**b
        if isinstance(r, complex):
            raise DomainError("negative base with non-integer exponent")
        return r
    a = _float_eval(node.arg, params, x)
    if node.fn == "sqrt":
        if a < 0:
            raise DomainError("sqrt of a negative number")
        return math.sqrt(a)
    if node.fn == "coth":
        return 1.0 / math.tanh(a)
    return {"tanh": math.tanh, "cosh": math.cosh, "sinh": math.sinh, "exp": math.exp, "abs": abs}[node.fn](a)


def eval_value(ast, params, xi: float) -> float:
    """Value only; plain floats where possible, series at removable points."""
    try:
        v = _float_eval(ast, params, float(xi))
        if math.isfinite(v):
            return float(v)
    except (ZeroDivisionError, OverflowError):
        pass
    return eval_jet(ast, params, xi).value


def _estimate_growth(ast, params):
    try:
        a = eval_value(ast, params, 1e3)
        b = eval_value(ast, params, 1e4)
        p = math.log(b / a) / math.log(10.0)
    except (ValueError, ZeroDivisionError, DomainError, OverflowError):
        return math.nan
    half = round(2 * p) / 2
    return half if abs(p - half) < 0.05 else p


def symbol_from_expression(text: str, params: Mapping[str, float] | None = None, *, name=None, growth_exponent=None) -> DispersionSymbol:
    """Wrap DSL text as a DispersionSymbol.

    ``growth_exponent`` defaults to the log-log slope of m between 1e3 and 1e4.
    """
    params = {k: float(v) for k, v in (params or {}).items()}
    ast = bind(parse(text), params)
    extra = set(params) - parameters(ast)
    if extra:
        raise InvalidParameter(f"parameter(s) not used by expression: {sorted(extra)}")

    def jet(xi):
        return _eval_jet_bound(ast, params, xi)

    if growth_exponent is None:
        growth_exponent = _estimate_growth(ast, params)
    return DispersionSymbol(
        name=name or text,
        params=params,
        growth_exponent=float(growth_exponent),
        jet_source="dsl-expression",
        zero_behavior="right-limits-only" if _uses_abs(ast) else "smooth",
        kind=None,
        expression=text,
        _jet=jet,
        _value=lambda xi: eval_value(ast, params, xi),
    )
