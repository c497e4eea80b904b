import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pulsesync.builtins import EXPRESSIONS, get_builtin
from pulsesync.errors import EvaluationSingularity, InvalidPRF, NonConstantExponent, ParseError
from dsl_corpus import corpus, fd_derivative
from pulsesync.expr import (Binary, Const, Unary, Var, compile_numpy, diff_expr, eval_expr,
                            parse, prf_from_string, simplify, substitute, to_string)

THETA_SRC = "(1/pi)*atan(tan((phi-0.5)*pi)+eps) - (phi-0.5)"


# ------------------------------------------------------------------ parsing

def test_parse_product():
    e = parse("phi*(1-phi)*eps")
    assert eval_expr(e, 0.5, 0.2) == pytest.approx(0.05, abs=1e-15)


def test_parse_precedence_and_associativity():
    assert eval_expr(parse("1 - 2 - 3"), 0, 0) == -4.0
    assert eval_expr(parse("8 / 4 / 2"), 0, 0) == 1.0
    assert eval_expr(parse("2^3^2"), 0, 0) == 512.0
    assert eval_expr(parse("1 + 2*3^2"), 0, 0) == 19.0
    assert eval_expr(parse("-phi^2"), 3.0, 0) == 9.0  # unary minus is an atom
    assert eval_expr(parse("0-phi^2"), 3.0, 0) == -9.0


def test_parse_numbers_and_whitespace():
    assert eval_expr(parse("  1.5e-1 +\t.5 + 2. + 1E2 "), 0, 0) == pytest.approx(102.65)
    assert parse("phi*eps") == parse(" phi * eps ")
    assert parse("pi") == Const(math.pi, "pi")


def test_parse_tree_shape():
    assert parse("phi*eps") == Binary("mul", Var("phi"), Var("eps"))
    assert parse("-sin(phi)") == Unary("neg", Unary("sin", Var("phi")))


def test_theta_expression_is_theta():
    e = parse(THETA_SRC)
    theta = get_builtin("theta")
    for phi in np.linspace(0.01, 0.99, 50):
        for eps in (0.1, 1.0, 4.0):
            assert eval_expr(e, phi, eps) == pytest.approx(float(theta.g(phi, eps)), abs=1e-13)


@pytest.mark.parametrize("src, pos, expected", [
    ("phi + * eps", 6, "an atom"),
    ("phi +", 5, "an atom"),
    ("", 0, "an atom"),
    ("2phi", 1, "an operator or end of input"),
    ("(phi", 4, "')'"),
    ("sin phi", 4, "'('"),
    ("foo(phi)", 0, "an atom"),
    ("phi $ eps", 4, "a token"),
    ("phi)", 3, "an operator or end of input"),
])
def test_parse_errors(src, pos, expected):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.position == pos
    assert info.value.expected == expected
    assert f"position {pos}" in str(info.value)


def test_parse_error_found_token():
    with pytest.raises(ParseError) as info:
        parse("phi + * eps")
    assert info.value.found == "'*'"
    with pytest.raises(ParseError) as info:
        parse("phi +")
    assert info.value.found == "end of input"


@pytest.mark.parametrize("src, pos", [("phi^eps", 4), ("2^(phi+1)", 2), ("phi^sin(eps)", 4)])
def test_non_constant_exponent(src, pos):
    with pytest.raises(NonConstantExponent) as info:
        parse(src)
    assert info.value.position == pos


def test_constant_exponent_expressions_allowed():
    assert eval_expr(parse("phi^(2*3)"), 2.0, 0) == 64.0
    assert eval_expr(parse("phi^-1"), 4.0, 0) == 0.25
    assert eval_expr(parse("phi^(1/2)"), 4.0, 0) == 2.0


@given(st.text(alphabet="phieps0123456789.+-*/^() sincotalgqrx", max_size=30))
def test_error_position_within_input(src):
    try:
        parse(src)
    except ParseError as exc:
        assert 0 <= exc.position <= len(src)


# --------------------------------------------------------------- evaluation

def test_eval_examples():
    assert eval_expr(parse("3.5"), 0.123, 9.0) == 3.5
    assert eval_expr(parse("eps*phi^2"), 2.0, 3.0) == 12.0
    assert eval_expr(parse(THETA_SRC), 0.5, 1.0) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("src, phi, path", [
    ("log(phi)", 0.0, "root"),
    ("1 + 1/(phi-0.5)", 0.5, "root.right"),
    ("eps*sqrt(phi-1)", 0.5, "root.right"),
    ("exp(exp(eps))", 0.0, "root"),
])
def test_eval_singularity(src, phi, path):
    with pytest.raises(EvaluationSingularity) as info:
        eval_expr(parse(src), phi, 10.0)
    assert info.value.path == path


# ----------------------------------------------------------- differentiation

def test_diff_product_base_case():
    d = diff_expr(parse("phi*eps"), "phi")
    assert d == Var("eps")
    rng = np.random.default_rng(11)
    for phi, eps in rng.uniform(-5, 5, size=(100, 2)):
        assert abs(eval_expr(d, phi, eps) - eps) <= 1e-12


def test_diff_theta_expression_in_eps_at_zero():
    d = diff_expr(parse(THETA_SRC), "eps")
    for phi in np.linspace(0.01, 0.99, 37):
        t = math.tan((phi - 0.5) * math.pi)
        assert eval_expr(d, phi, 0.0) == pytest.approx((1 / math.pi) / (1 + t * t), rel=1e-12)
        # and it is the linearized theta kernel sin^2(pi phi) / pi
        assert eval_expr(d, phi, 0.0) == pytest.approx(math.sin(math.pi * phi) ** 2 / math.pi,
                                                       rel=1e-12, abs=1e-15)


def test_mixed_partial_of_quadratic_term_vanishes():
    e = parse("2*phi*(phi-1)^2*(2*phi-1)*eps^2")
    d = diff_expr(diff_expr(e, "phi"), "eps")
    assert eval_expr(d, 0.0, 0.0) == 0.0
    h = 1e-4
    f = lambda p, q: eval_expr(e, p, q)
    fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    assert abs(fd) < 1e-6


def test_mixed_partials_commute():
    e = parse("sin(phi*eps)^2 + exp(eps)*phi^3 - atan(phi/(1+eps^2))")
    a = diff_expr(diff_expr(e, "phi"), "eps")
    b = diff_expr(diff_expr(e, "eps"), "phi")
    for phi, eps in np.random.default_rng(1).uniform(0, 1, size=(20, 2)):
        assert eval_expr(a, phi, eps) == pytest.approx(eval_expr(b, phi, eps), rel=1e-12, abs=1e-14)


def test_diff_rejects_other_variables():
    with pytest.raises(ValueError):
        diff_expr(parse("phi"), "x")


# ------------------------------------------------------------ simplification

@pytest.mark.parametrize("src, out", [
    ("0*phi + 1*eps", "eps"),
    ("phi^1", "phi"),
    ("(2-1)*atan(eps)", "atan(eps)"),
    ("phi + 0", "phi"),
    ("phi*0*sin(eps)", "0.0"),
    ("2*3 + phi", "6.0 + phi"),
])
def test_simplify_examples(src, out):
    assert to_string(simplify(parse(src))) == out


def test_simplify_is_limited():
    # only the listed rules: x - x and x/1 stay as written
    assert to_string(simplify(parse("phi - phi"))) == "phi - phi"
    assert to_string(simplify(parse("phi/1"))) == "phi / 1.0"


def test_substitute():
    e = substitute(parse("phi*eps + eps"), "eps", 0.0)
    assert to_string(e) == "0.0"


# -------------------------------------------------------- random corpus

CORPUS = corpus()


def test_corpus_covers_grammar():
    text = " ".join(CORPUS)
    for token in ("+", "-", "*", "/", "^", "sin(", "cos(", "tan(", "atan(", "sqrt(", "exp(",
                  "log(", "pi", "phi", "eps"):
        assert token in text


@pytest.mark.parametrize("chunk", range(10))
def test_derivatives_match_finite_differences(chunk):
    rng = np.random.default_rng(chunk)
    for src in CORPUS[chunk::10]:
        e = parse(src)
        derivs = {v: diff_expr(e, v) for v in ("phi", "eps")}
        for phi, eps in rng.uniform(0.05, 0.95, size=(20, 2)):
            for v, d in derivs.items():
                exact = eval_expr(d, phi, eps)
                fd = fd_derivative(e, v, phi, eps)
                assert abs(exact - fd) <= 1e-5 * max(1.0, abs(exact)), (src, v)


def _roundtrip_sources():
    return list(EXPRESSIONS.values()) + [THETA_SRC] + CORPUS[:50]


@pytest.mark.parametrize("src", _roundtrip_sources())
def test_roundtrip(src):
    e = parse(src)
    e2 = parse(to_string(e))
    rng = np.random.default_rng(7)
    for phi, eps in rng.uniform(0.0, 1.0, size=(1000, 2)):
        a, b = eval_expr(e, phi, eps), eval_expr(e2, phi, eps)
        assert abs(a - b) <= 1e-15 * max(1.0, abs(a))


@pytest.mark.parametrize("src", CORPUS[::4])
def test_simplify_preserves_value(src):
    e = parse(src)
    s = simplify(e)
    for phi, eps in np.random.default_rng(3).uniform(0.0, 1.0, size=(50, 2)):
        a = eval_expr(e, phi, eps)
        assert abs(eval_expr(s, phi, eps) - a) <= 1e-15 * max(1.0, abs(a))


@pytest.mark.parametrize("src", CORPUS[::8])
def test_compiled_matches_eval(src):
    e = parse(src)
    fn = compile_numpy(e)
    pts = np.random.default_rng(5).uniform(0.0, 1.0, size=(40, 2))
    vec = fn(pts[:, 0], pts[:, 1])
    for (phi, eps), v in zip(pts, np.broadcast_to(vec, (40,))):
        a = eval_expr(e, phi, eps)
        assert v == pytest.approx(a, rel=1e-12, abs=1e-14)


# ------------------------------------------------------------- PRF wrapper

def test_builtin_expressions_match_closed_forms():
    phis = np.linspace(0.0, 1.0, 1001)
    for name, src in EXPRESSIONS.items():
        prf, ref = prf_from_string(src), get_builtin(name)
        for eps in (0.1, 1.0, 5.0):
            assert np.max(np.abs(prf.g(phis, eps) - ref.g(phis, eps))) <= 1e-13


def test_prf_from_string_validates():
    with pytest.raises(InvalidPRF) as info:
        prf_from_string("eps", validate_eps=[0.1, 0.5])
    assert "Eq4 (g(0, eps) = 0)" in str(info.value)
    prf = prf_from_string(EXPRESSIONS["example2"], validate_eps=[0.01, 0.1])
    assert prf.provenance == "parsed-expression"


def test_prf_from_string_exact_partials():
    prf = prf_from_string(EXPRESSIONS["example2"])
    ref = get_builtin("example2")
    phis = np.linspace(0, 1, 101)
    for attr in ("dphi", "deps", "dphi_deps"):
        assert np.allclose(getattr(prf, attr)(phis, 0.3), getattr(ref, attr)(phis, 0.3),
                           rtol=0, atol=1e-14)
