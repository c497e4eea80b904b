"""Numerical reproduction of the theorems and closed-form identities.

Each case is a list of named assertions; ``run_case`` evaluates them and
returns :class:`Check` records. The command line runs these through
``pulsesync reproduce --case <name>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .builtins import get_builtin
from .calculus import make_infinitesimal
from .classify import classify_lemma3, classify_strong, full_report
from .expr import prf_from_string
from .strobe import iterate, strobe_map, strobe_map_grid, sync_derivative

CASES = ("theorem1", "theorem2-ex1", "theorem2-ex2", "theorem3", "theta-identity",
         "cubic-expansion")

THEOREM1_EPS = (0.1, 0.5, 1.0)
THEOREM3_EPS = 1e-2


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def very_strong_family(n=20, seed=0, sign=-1):
    """DSL strings ``sign * eps * phi * (1 - phi) * q(phi)`` with ``q > 0``.

    ``q(phi) = sum_k c_k (1 - phi)^k`` with degree 1 to 4 and every
    ``c_k`` drawn from [0.1, 1], so ``q(0) > q(1) > 0``. For ``sign = -1``
    the corner mixed partials sum to ``q(1) - q(0) < 0``; ``sign = +1``
    mirrors the family to a positive sum.
    """
    rng = np.random.default_rng(seed)
    prefix = "-eps" if sign < 0 else "eps"
    out = []
    for _ in range(n):
        coeffs = [float(c) for c in rng.uniform(0.1, 1.0, size=int(rng.integers(2, 6)))]
        terms = [f"{coeffs[0]!r}"] + [f"{c!r}*(1-phi)^{k}" for k, c in enumerate(coeffs) if k]
        out.append(f"{prefix}*phi*(1-phi)*({' + '.join(terms)})")
    return out


def _theorem1():
    theta = get_builtin("theta")
    checks = []
    report = full_report(theta, THEOREM1_EPS)
    for g_rep, t_rep in zip(report.g_reports, report.tilde_reports):
        e = g_rep.eps
        checks.append(Check(f"theta empirical neutral at eps={e!r}",
                            g_rep.empirical_verdict == "neutral", g_rep.empirical_verdict))
        checks.append(Check(f"theta-tilde empirical attracting at eps={e!r}",
                            t_rep.empirical_verdict == "attracting", t_rep.empirical_verdict))
    checks.append(Check("disagreement flagged at every eps",
                        len(report.disagreements) == len(THEOREM1_EPS),
                        f"{len(report.disagreements)} of {len(THEOREM1_EPS)}"))
    tilde = get_builtin("theta-tilde")
    for e in THEOREM1_EPS:
        for phi0, target in ((0.1, "converged-to-0"), (0.9, "converged-to-1")):
            tr = iterate(tilde, phi0, e, max_iters=10**6, conv_tol=1e-12)
            checks.append(Check(
                f"theta-tilde from {phi0} at eps={e!r} converges within 1e6 steps",
                tr.verdict == target,
                f"{tr.verdict} after {tr.iters_used} steps, last phase {tr.final!r}"))
    return checks


def _theorem2_ex1():
    ex1 = get_builtin("example1")
    checks = []
    for e in (0.01, 0.1, 0.5, 1.0):
        d = sync_derivative(ex1, e)
        checks.append(Check(f"product = 1 + eps^2 at eps={e!r}",
                            abs(d - (1 + e * e)) <= 1e-10, f"{d!r}"))
        v = classify_strong(ex1, e).strong_verdict
        checks.append(Check(f"strongly repelling at eps={e!r}", v == "strongly-repelling", v))
    phis = np.linspace(0.0, 1.0, 1001)
    lin, lin_theta = make_infinitesimal(ex1), get_builtin("theta-tilde")
    gap = max(float(np.max(np.abs(lin.g(phis, e) - lin_theta.g(phis, e)))) for e in (0.1, 1.0))
    checks.append(Check("same linearization as theta", gap <= 1e-12, f"max gap {gap:.3g}"))
    return checks


def _theorem2_ex2():
    ex2 = get_builtin("example2")
    checks = []
    for e in (0.01, 0.1):
        d = sync_derivative(ex2, e)
        checks.append(Check(f"product = 1 + eps^2 - 2 eps^3 at eps={e!r}",
                            abs(d - (1 + e * e - 2 * e ** 3)) <= 1e-10, f"{d!r}"))
        v = classify_strong(ex2, e).strong_verdict
        checks.append(Check(f"strongly repelling at eps={e!r}", v == "strongly-repelling", v))
    t = classify_lemma3(ex2)
    checks.append(Check("m0 = 1", abs(t.m0 - 1.0) <= 1e-6, f"{t.m0!r}"))
    checks.append(Check("m1 = -1", abs(t.m1 + 1.0) <= 1e-6, f"{t.m1!r}"))
    checks.append(Check("linearization strongly attracting for small eps",
                        t.lemma3_verdict == "strongly-attracting-small-eps", t.lemma3_verdict))
    return checks


def _theorem3():
    checks = []
    for sign, want_lemma, want_strong in (
            (-1, "strongly-attracting-small-eps", "strongly-attracting"),
            (+1, "strongly-repelling-small-eps", "strongly-repelling")):
        bad = []
        for i, src in enumerate(very_strong_family(20, seed=3 if sign < 0 else 4, sign=sign)):
            prf = prf_from_string(src, validate_eps=[THEOREM3_EPS], name=f"family{sign:+d}[{i}]")
            lemma = classify_lemma3(prf)
            strong = classify_strong(prf, THEOREM3_EPS).strong_verdict
            if lemma.lemma3_verdict != want_lemma or strong != want_strong:
                bad.append(f"{src}: {lemma.lemma3_verdict}, {strong}")
            if sign < 0 and not lemma.very_strong:
                bad.append(f"{src}: not very strong")
        label = "attracting" if sign < 0 else "repelling"
        checks.append(Check(f"20 {label} family members are {want_strong} at eps=0.01",
                            not bad, "; ".join(bad) or "all agree"))
    return checks


def _theta_identity():
    theta = get_builtin("theta")
    phis = np.linspace(0.0, 1.0, 1001)
    checks = []
    for e in (0.1, 1.0, 5.0, 10.0):
        gap = max(abs(strobe_map(theta, p, e) - p) for p in phis)
        checks.append(Check(f"max |F - phi| <= 1e-9 at eps={e!r}", gap <= 1e-9, f"{gap:.3g}"))
    return checks


def _cubic_expansion():
    tilde = get_builtin("theta-tilde")
    e = 0.1
    target = 2 * e * e * math.pi ** 2
    phis = np.array([1e-2, 5e-3, 1e-3])
    coef = (phis - strobe_map_grid(tilde, phis, e)) / phis ** 3
    errs = np.abs(coef - target) / target
    return [
        Check("coefficient at phi=1e-3 within 1% of 2 eps^2 pi^2", errs[-1] <= 0.01,
              f"{float(coef[-1])!r} vs {target!r}"),
        Check("coefficient error shrinks as phi -> 0", bool(np.all(np.diff(errs) < 0)),
              ", ".join(f"{c:.6g}" for c in coef)),
    ]


_RUNNERS = {
    "theorem1": _theorem1,
    "theorem2-ex1": _theorem2_ex1,
    "theorem2-ex2": _theorem2_ex2,
    "theorem3": _theorem3,
    "theta-identity": _theta_identity,
    "cubic-expansion": _cubic_expansion,
}


def run_case(name: str) -> list[Check]:
    if name not in _RUNNERS:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    return _RUNNERS[name]()
