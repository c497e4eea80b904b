"""A small expression language for user-supplied PRFs ``g(phi, eps)``.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' factor)?          # right-associative, constant exponent
    atom   := number | 'phi' | 'eps' | 'pi'
            | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := sin | cos | tan | atan | sqrt | exp | log

Unary minus is an atom, so it binds tighter than ``^``: ``-phi^2`` is
``(-phi)^2``. There is no implicit multiplication (``2phi`` is an error).

Trees are immutable. :func:`diff_expr` differentiates symbolically, so a
parsed PRF gets exact partials for free; :func:`to_numpy_source` turns a
tree into a function that runs under numpy and numba alike.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationSingularity, NonConstantExponent, ParseError

FUNCS = ("sin", "cos", "tan", "atan", "sqrt", "exp", "log")
VARS = ("phi", "eps")


@dataclass(frozen=True)
class Const:
    value: float
    name: str = None


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of FUNCS
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # add, sub, mul, div, pow
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Unary, Binary]

ZERO = Const(0.0)
ONE = Const(1.0)
PHI = Var("phi")
EPS = Var("eps")

# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, ident, op, eof
    text: str
    pos: int

    def describe(self):
        return "end of input" if self.kind == "eof" else repr(self.text)


def _tokenize(src):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(_message(src, pos, "a token", repr(src[pos])), pos,
                             "a token", repr(src[pos]))
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


def _message(src, pos, expected, found):
    return f"expected {expected} at position {pos}, found {found}\n  {src}\n  {' ' * pos}^"


# ------------------------------------------------------------------- parser

class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected, tok=None, cls=ParseError):
        tok = tok or self.tok
        raise cls(_message(self.src, tok.pos, expected, tok.describe()), tok.pos, expected,
                  tok.describe())

    def expect(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        self.fail(repr(text))

    def parse(self):
        e = self.expr()
        if self.tok.kind != "eof":
            self.fail("an operator or end of input")
        return e

    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = "add" if self.advance().text == "+" else "sub"
            e = Binary(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = "mul" if self.advance().text == "*" else "div"
            e = Binary(op, e, self.factor())
        return e

    def factor(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            start = self.tok
            exponent = simplify(self.factor())
            if not isinstance(exponent, Const):
                self.fail("a constant exponent", start, NonConstantExponent)
            return Binary("pow", base, exponent)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(float(t.text))
        if t.kind == "ident":
            if t.text in VARS:
                self.advance()
                return Var(t.text)
            if t.text == "pi":
                self.advance()
                return Const(math.pi, "pi")
            if t.text in FUNCS:
                self.advance()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(t.text, arg)
            self.fail("an atom")
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "op" and t.text == "-":
            self.advance()
            return Unary("neg", self.atom())
        self.fail("an atom")


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(src).parse()


# --------------------------------------------------------------- evaluation

_MATH_UNARY = {
    "neg": lambda a: -a,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "atan": math.atan,
    "sqrt": math.sqrt,
    "exp": math.exp,
    "log": math.log,
}

_MATH_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": math.pow,
}


def _apply(op, *args):
    table = _MATH_UNARY if len(args) == 1 else _MATH_BINARY
    try:
        return table[op](*args)
    except (ValueError, OverflowError, ZeroDivisionError):
        return math.nan


def _eval(e, phi, eps, path):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return phi if e.name == "phi" else eps
    if isinstance(e, Unary):
        r = _apply(e.op, _eval(e.arg, phi, eps, path + ".arg"))
    else:
        r = _apply(e.op, _eval(e.left, phi, eps, path + ".left"),
                   _eval(e.right, phi, eps, path + ".right"))
    if not math.isfinite(r):
        raise EvaluationSingularity(
            f"non-finite value in '{to_string(e)}' (at {path}) for phi={phi!r}, eps={eps!r}",
            phi=phi, eps=eps, path=path)
    return r


def eval_expr(e: Expr, phi: float, eps: float) -> float:
    """Evaluate with real semantics; any real ``phi``/``eps`` is accepted here."""
    return _eval(e, float(phi), float(eps), "root")


# ---------------------------------------------------------- simplification

def _fold(op, *vals):
    r = _apply(op, *vals)
    return Const(r) if math.isfinite(r) else None


def _is(e, value):
    return isinstance(e, Const) and e.value == value


def simplify(e: Expr) -> Expr:
    """Constant folding plus x*0 -> 0, x*1 -> x, x+0 -> x, x^1 -> x."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Unary):
        arg = simplify(e.arg)
        if isinstance(arg, Const):
            folded = _fold(e.op, arg.value)
            if folded is not None:
                return folded
        return Unary(e.op, arg)
    left, right = simplify(e.left), simplify(e.right)
    if isinstance(left, Const) and isinstance(right, Const):
        folded = _fold(e.op, left.value, right.value)
        if folded is not None:
            return folded
    if e.op == "add":
        if _is(right, 0.0):
            return left
        if _is(left, 0.0):
            return right
    elif e.op == "sub":
        if _is(right, 0.0):
            return left
    elif e.op == "mul":
        if _is(left, 0.0) or _is(right, 0.0):
            return ZERO
        if _is(right, 1.0):
            return left
        if _is(left, 1.0):
            return right
    elif e.op == "pow":
        if _is(right, 1.0):
            return left
    return Binary(e.op, left, right)


# ----------------------------------------------------------- differentiation

def _d(e, var):
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Unary):
        u, du = e.arg, _d(e.arg, var)
        op = e.op
        if op == "neg":
            return Unary("neg", du)
        if op == "sin":
            outer = Unary("cos", u)
        elif op == "cos":
            outer = Unary("neg", Unary("sin", u))
        elif op == "tan":
            outer = Binary("add", ONE, Binary("pow", Unary("tan", u), Const(2.0)))
        elif op == "atan":
            return Binary("div", du, Binary("add", ONE, Binary("pow", u, Const(2.0))))
        elif op == "sqrt":
            return Binary("div", du, Binary("mul", Const(2.0), Unary("sqrt", u)))
        elif op == "exp":
            outer = Unary("exp", u)
        elif op == "log":
            return Binary("div", du, u)
        else:
            raise ValueError(f"unknown unary operator {op!r}")
        return Binary("mul", outer, du)
    u, v = e.left, e.right
    du, dv = _d(u, var), _d(v, var)
    if e.op in ("add", "sub"):
        return Binary(e.op, du, dv)
    if e.op == "mul":
        return Binary("add", Binary("mul", du, v), Binary("mul", u, dv))
    if e.op == "div":
        num = Binary("sub", Binary("mul", du, v), Binary("mul", u, dv))
        return Binary("div", num, Binary("pow", v, Const(2.0)))
    if e.op == "pow":
        c = v.value
        return Binary("mul", Binary("mul", Const(c), Binary("pow", u, Const(c - 1.0))), du)
    raise ValueError(f"unknown binary operator {e.op!r}")


def diff_expr(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative with respect to ``"phi"`` or ``"eps"``."""
    if var not in VARS:
        raise ValueError(f"can only differentiate with respect to phi or eps, not {var!r}")
    return simplify(_d(e, var))


def substitute(e: Expr, var: str, value: float) -> Expr:
    """Replace a variable by a constant (then simplify)."""

    def sub(n):
        if isinstance(n, Var):
            return Const(float(value)) if n.name == var else n
        if isinstance(n, Unary):
            return Unary(n.op, sub(n.arg))
        if isinstance(n, Binary):
            return Binary(n.op, sub(n.left), sub(n.right))
        return n

    return simplify(sub(e))


# ----------------------------------------------------------------- printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 3}
_SYM = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_ATOM = 4


def _prec(e):
    if isinstance(e, Binary):
        return _PREC[e.op]
    return _ATOM


def _const_str(c):
    if c.name is not None:
        return c.name
    text = repr(float(c.value))
    return f"({text})" if c.value < 0 or text.startswith("-") else text


def to_string(e: Expr) -> str:
    """Render in the DSL syntax; the output parses back to an equivalent tree."""
    if isinstance(e, Const):
        return _const_str(e)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = to_string(e.arg)
        if e.op == "neg":
            return "-" + (inner if _prec(e.arg) == _ATOM else f"({inner})")
        return f"{e.op}({inner})"
    p = _PREC[e.op]
    left, right = to_string(e.left), to_string(e.right)
    if e.op == "pow":
        if _prec(e.left) < _ATOM:
            left = f"({left})"
        if _prec(e.right) < p:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {_SYM[e.op]} {right}"


# ------------------------------------------------------------------ codegen

_NP_FUNC = {"sin": "np.sin", "cos": "np.cos", "tan": "np.tan", "atan": "np.arctan",
            "sqrt": "np.sqrt", "exp": "np.exp", "log": "np.log"}
_PY_OP = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def to_numpy_source(e: Expr) -> str:
    """A Python expression over ``phi``, ``eps`` and ``np`` computing ``e``."""
    if isinstance(e, Const):
        return "np.pi" if e.name == "pi" else f"({float(e.value)!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = to_numpy_source(e.arg)
        return f"(-{inner})" if e.op == "neg" else f"{_NP_FUNC[e.op]}({inner})"
    left, right = to_numpy_source(e.left), to_numpy_source(e.right)
    if e.op == "pow":
        return f"np.power({left}, {right})"
    return f"({left} {_PY_OP[e.op]} {right})"


def compile_numpy(e: Expr, name: str = "dsl_fn"):
    """Build ``fn(phi, eps)`` from a tree; works on floats and arrays."""
    src = f"def {name}(phi, eps):\n    return {to_numpy_source(e)}\n"
    ns = {"np": np}
    exec(compile(src, f"<pulsesync-dsl:{name}>", "exec"), ns)
    fn = ns[name]
    fn.source = src
    return fn


def prf_from_expr(e: Expr, name: str, provenance: str = "parsed-expression"):
    """Wrap a tree as a PhaseResponse with exact partials from :func:`diff_expr`.

    No axiom validation happens here; see :func:`prf_from_string`.
    """
    from .prf import PhaseResponse

    d_phi = diff_expr(e, "phi")
    d_eps = diff_expr(e, "eps")
    d_mixed = diff_expr(d_phi, "eps")
    return PhaseResponse(
        name=name,
        g=compile_numpy(e, "g"),
        dphi=compile_numpy(d_phi, "dphi"),
        deps=compile_numpy(d_eps, "deps"),
        dphi_deps=compile_numpy(d_mixed, "dphi_deps"),
        provenance=provenance,
        expr=e,
    )


def prf_from_string(src: str, validate_eps=None, name: str = None, **validate_kw):
    """Parse ``src`` into a PhaseResponse.

    When ``validate_eps`` is given, the axioms are checked at those
    strengths first and :class:`~pulsesync.errors.InvalidPRF` is raised on
    failure, so the stability machinery never runs on a non-PRF.
    """
    from .errors import InvalidPRF
    from .prf import AXIOM_LABELS, validate_prf

    prf = prf_from_expr(parse(src), name or f"expr:{src}")
    if validate_eps is not None:
        report = validate_prf(prf, validate_eps, **validate_kw)
        if not report.ok:
            failed = ", ".join(f"{a} ({AXIOM_LABELS[a]})" for a in report.failed())
            raise InvalidPRF(f"{prf.name!r} violates {failed} on the requested eps range",
                             report)
    return prf


__all__ = [
    "Const", "Var", "Unary", "Binary", "Expr", "parse", "eval_expr", "diff_expr",
    "simplify", "substitute", "to_string", "to_numpy_source", "compile_numpy",
    "prf_from_expr", "prf_from_string",
]
