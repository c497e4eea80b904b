"""Partial derivatives of PRFs and the infinitesimal (linearized) PRF.

Exact evaluators carried by a :class:`PhaseResponse` are always preferred.
Otherwise derivatives come from fixed-step finite differences
(``h = 1e-6``), central in the interior and second-order one-sided at
``phi in {0, 1}`` and ``eps = 0``, where the model is undefined beyond
the boundary.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import replace

import numpy as np

from . import _accel
from .errors import EvaluationSingularity
from .prf import PhaseResponse, check_phase, check_strength, eval_grid, validate_prf

H_PHI = 1e-6
H_EPS = 1e-6

# strengths probed when reporting where a linearized PRF stays valid
TILDE_EPS_PROBES = (1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.5, 1.0)


class PartialKind(str, enum.Enum):
    DPHI = "dphi"
    DEPS = "deps"
    D2_PHI_EPS = "d2_phi_eps"

    @property
    def attr(self):
        return "dphi_deps" if self is PartialKind.D2_PHI_EPS else self.value


class OffCornerMixedPartial(UserWarning):
    """The mixed partial was requested away from ``eps = 0``."""


def _g(prf, phi, eps):
    with np.errstate(all="ignore"):
        try:
            v = float(prf.g(phi, eps))
        except (ArithmeticError, ValueError) as exc:
            raise EvaluationSingularity(f"{prf.name}: {exc}", phi=phi, eps=eps) from exc
    if not math.isfinite(v):
        raise EvaluationSingularity(f"{prf.name}: non-finite value at phi={phi!r}, eps={eps!r}",
                                    phi=phi, eps=eps)
    return v


def _fd_phi(f, phi, h=H_PHI):
    if phi < h:
        return (-3.0 * f(phi) + 4.0 * f(phi + h) - f(phi + 2 * h)) / (2 * h)
    if phi > 1.0 - h:
        return (3.0 * f(phi) - 4.0 * f(phi - h) + f(phi - 2 * h)) / (2 * h)
    return (f(phi + h) - f(phi - h)) / (2 * h)


def _fd_eps(f, eps, h=H_EPS):
    if eps < h:
        return (-3.0 * f(eps) + 4.0 * f(eps + h) - f(eps + 2 * h)) / (2 * h)
    return (f(eps + h) - f(eps - h)) / (2 * h)


def numeric_partial(prf: PhaseResponse, kind, phi: float, eps: float) -> float:
    """Finite-difference partial, ignoring any exact evaluator on ``prf``."""
    kind = PartialKind(kind)
    if kind is PartialKind.DPHI:
        return _fd_phi(lambda p: _g(prf, p, eps), phi)
    if kind is PartialKind.DEPS:
        return _fd_eps(lambda e: _g(prf, phi, e), eps)
    return _fd_eps(lambda e: _fd_phi(lambda p: _g(prf, p, e), phi), eps)


def partial(prf: PhaseResponse, kind, phi: float, eps: float) -> float:
    """dg/dphi, dg/deps or d2g/(dphi deps) at ``(phi, eps)``.

    The mixed partial is only meaningful to the theory at ``eps = 0``; other
    points are allowed but raise :class:`OffCornerMixedPartial` as a warning.
    """
    kind = PartialKind(kind)
    phi = check_phase(phi)
    eps = check_strength(eps)
    if kind is PartialKind.D2_PHI_EPS and eps != 0.0:
        warnings.warn(f"mixed partial of {prf.name} requested at eps={eps!r} != 0",
                      OffCornerMixedPartial, stacklevel=2)
    exact = getattr(prf, kind.attr)
    if exact is None:
        return numeric_partial(prf, kind, phi, eps)
    with np.errstate(all="ignore"):
        v = float(exact(phi, eps))
    if not math.isfinite(v):
        raise EvaluationSingularity(
            f"{prf.name}: non-finite {kind.value} at phi={phi!r}, eps={eps!r}", phi=phi, eps=eps)
    return v


# ------------------------------------------------------- infinitesimal PRF

def _linearize_exact(prf):
    """Linearization built from an exact dg/deps callable."""
    deps, mixed = prf.deps, prf.dphi_deps

    def g(phi, eps):
        return deps(phi, 0.0) * eps

    def d_eps(phi, eps):
        return deps(phi, 0.0) + eps * 0.0

    d_phi = d_mixed = None
    if mixed is not None:
        def d_phi(phi, eps):
            return mixed(phi, 0.0) * eps

        def d_mixed(phi, eps):
            return mixed(phi, 0.0) + eps * 0.0

    def compiler():
        deps_c = _accel.compile_scalar(deps)

        def g_c(phi, eps):
            return deps_c(phi, 0.0) * eps

        return _accel.compile_scalar(g_c)

    return dict(g=g, dphi=d_phi, deps=d_eps, dphi_deps=d_mixed, compiler=compiler)


def _linearize_spline(prf, n=2048):
    """Tabulate dg/deps(phi, 0) and interpolate with a cubic spline."""
    from scipy.interpolate import CubicSpline

    knots = np.linspace(0.0, 1.0, n)
    h = H_EPS
    rows = [eval_grid(prf.g, knots, e) for e in (0.0, h, 2 * h)]
    slope = (-3.0 * rows[0] + 4.0 * rows[1] - rows[2]) / (2 * h)
    if not np.all(np.isfinite(slope)):
        bad = float(knots[np.argmax(~np.isfinite(slope))])
        raise EvaluationSingularity(f"{prf.name}: cannot linearize, dg/deps singular near phi={bad}",
                                    phi=bad, eps=0.0)
    spline = CubicSpline(knots, slope)
    c3, c2, c1, c0 = (np.ascontiguousarray(spline.c[k]) for k in range(4))
    last = n - 2

    def table(phi):
        i = np.minimum(np.maximum(np.searchsorted(knots, phi) - 1, 0), last)
        t = phi - knots[i]
        return ((c3[i] * t + c2[i]) * t + c1[i]) * t + c0[i]

    def table_slope(phi):
        i = np.minimum(np.maximum(np.searchsorted(knots, phi) - 1, 0), last)
        t = phi - knots[i]
        return (3.0 * c3[i] * t + 2.0 * c2[i]) * t + c1[i]

    def g(phi, eps):
        return table(phi) * eps

    def d_phi(phi, eps):
        return table_slope(phi) * eps

    def d_eps(phi, eps):
        return table(phi) + eps * 0.0

    def d_mixed(phi, eps):
        return table_slope(phi) + eps * 0.0

    def compiler():
        table_c = _accel.helper(table)

        def g_c(phi, eps):
            return table_c(phi) * eps

        return _accel.compile_scalar(g_c)

    return dict(g=g, dphi=d_phi, deps=d_eps, dphi_deps=d_mixed, compiler=compiler)


def tilde_validity(prf: PhaseResponse, probes=TILDE_EPS_PROBES):
    """Largest probed strength up to which every axiom holds, and warnings."""
    largest = None
    notes = []
    for e in probes:
        report = validate_prf(prf, [e])
        if not report.ok:
            notes.append(f"axioms {', '.join(report.failed())} fail at eps={e!r}")
            break
        largest = e
    return largest, tuple(notes)


def make_infinitesimal(prf: PhaseResponse) -> PhaseResponse:
    """The linearization ``eps * dg/deps(phi, 0)`` as a PhaseResponse.

    Built-ins use closed forms, parsed expressions are differentiated
    symbolically, other PRFs with an exact dg/deps reuse it, and the rest go
    through a 2048-point cubic-spline table. The result is re-validated for
    strengths up to 1; ``valid_eps_max`` records the largest probed strength
    at which it is still a PRF and ``warnings`` says where it stops being one.
    """
    from .builtins import CLOSED_FORM_TILDE

    name = f"{prf.name}-tilde"
    provenance = f"infinitesimal-of({prf.name})"
    if prf.provenance == "builtin" and prf.name in CLOSED_FORM_TILDE:
        g, dphi, deps, mixed = CLOSED_FORM_TILDE[prf.name]
        out = PhaseResponse(name=name, g=g, dphi=dphi, deps=deps, dphi_deps=mixed,
                            provenance=provenance, cacheable=True)
    elif prf.expr is not None:
        from .expr import Binary, EPS, diff_expr, prf_from_expr, simplify, substitute

        slope = substitute(diff_expr(prf.expr, "eps"), "eps", 0.0)
        out = prf_from_expr(simplify(Binary("mul", slope, EPS)), name, provenance)
    elif prf.deps is not None:
        out = PhaseResponse(name=name, provenance=provenance, **_linearize_exact(prf))
    else:
        out = PhaseResponse(name=name, provenance=provenance, **_linearize_spline(prf))

    largest, notes = tilde_validity(out)
    return replace(out, valid_eps_max=largest, warnings=notes)
