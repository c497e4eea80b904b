"""Phase response functions and the axiom checks they must satisfy.

A phase response function (PRF) ``g(phi, eps)`` gives the instantaneous
phase shift ``phi -> phi + g(phi, eps)`` caused by a pulse of strength
``eps >= 0`` arriving at phase ``phi in [0, 1]``.

Every callable stored on a :class:`PhaseResponse` must accept numpy arrays
as well as floats and must be compilable by numba in nopython mode, i.e.
written with ``np.*`` ufuncs and arithmetic only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _accel
from .errors import EvaluationSingularity, InvalidParameter

PHASE_SLACK = 1e-12

AXIOMS = ("Eq1", "Eq2", "Eq3", "Eq4", "Eq5", "Eq6-smoothness")

# plain-language meaning of each axiom id
AXIOM_LABELS = {
    "Eq1": "no coupling at eps=0",
    "Eq2": "-phi <= g <= 1-phi",
    "Eq3": "-phi < g < 1-phi inside (0, 1)",
    "Eq4": "g(0, eps) = 0",
    "Eq5": "g(1, eps) = 0",
    "Eq6-smoothness": "bounded slope",
}

ScalarFn = Callable[[float, float], float]


def check_phase(phi: float) -> float:
    """Return ``phi`` as a float in [0, 1], clamping rounding-sized excursions."""
    phi = float(phi)
    if 0.0 <= phi <= 1.0:
        return phi
    if -PHASE_SLACK <= phi < 0.0:
        return 0.0
    if 1.0 < phi <= 1.0 + PHASE_SLACK:
        return 1.0
    raise InvalidParameter(f"phase {phi!r} outside [0, 1]")


def check_strength(eps: float) -> float:
    eps = float(eps)
    if not eps >= 0.0 or math.isinf(eps):
        raise InvalidParameter(f"pulse strength must be finite and >= 0, got {eps!r}")
    return eps


@dataclass(frozen=True)
class PhaseResponse:
    """A named PRF with optional exact partial derivatives.

    ``dphi``, ``deps`` and ``dphi_deps`` are the exact evaluators for
    dg/dphi, dg/deps and d2g/dphi deps; ``None`` means "differentiate
    numerically". ``provenance`` is ``"builtin"``, ``"parsed-expression"``
    or ``"infinitesimal-of(<name>)"``.
    """

    name: str
    g: ScalarFn
    dphi: Optional[ScalarFn] = None
    deps: Optional[ScalarFn] = None
    dphi_deps: Optional[ScalarFn] = None
    provenance: str = "builtin"
    expr: object = None
    warnings: tuple = ()
    valid_eps_max: Optional[float] = None
    # Returns the numba-compiled ``g``; default compiles ``g`` itself.
    compiler: Optional[Callable[[], ScalarFn]] = field(default=None, compare=False, repr=False)
    cacheable: bool = field(default=False, compare=False, repr=False)
    _memo: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def compiled(self) -> ScalarFn:
        """The kernel-ready version of ``g`` (compiled once, then memoized)."""
        fn = self._memo.get("g")
        if fn is None:
            if self.compiler is not None:
                fn = self.compiler()
            else:
                fn = _accel.compile_scalar(self.g, cache=self.cacheable)
            self._memo["g"] = fn
        return fn

    def has_exact(self, kind: str) -> bool:
        return getattr(self, kind) is not None


def eval_g(prf: PhaseResponse, phi: float, eps: float) -> float:
    """Evaluate ``g(phi, eps)``; the caller applies the shift ``phi + g``."""
    phi = check_phase(phi)
    eps = check_strength(eps)
    with np.errstate(all="ignore"):
        try:
            val = float(prf.g(phi, eps))
        except (ArithmeticError, ValueError) as exc:
            raise EvaluationSingularity(
                f"{prf.name}: evaluation failed at phi={phi!r}, eps={eps!r}: {exc}",
                phi=phi, eps=eps) from exc
    if not math.isfinite(val):
        raise EvaluationSingularity(
            f"{prf.name}: non-finite value at phi={phi!r}, eps={eps!r}", phi=phi, eps=eps)
    return val


def eval_grid(fn: ScalarFn, phis, eps: float) -> np.ndarray:
    """Evaluate a PRF-like callable on a phase array at fixed ``eps``.

    Non-finite results and evaluation errors come back as ``nan`` rather
    than raising, so callers can report their location.
    """
    phis = np.asarray(phis, dtype=float)
    with np.errstate(all="ignore"):
        try:
            vals = np.asarray(fn(phis, float(eps)), dtype=float)
            vals = np.array(np.broadcast_to(vals, phis.shape))
        except (ArithmeticError, ValueError, TypeError):
            vals = np.empty_like(phis)
            for i, p in enumerate(phis):
                try:
                    vals[i] = float(fn(float(p), float(eps)))
                except (ArithmeticError, ValueError):
                    vals[i] = np.nan
    vals[~np.isfinite(vals)] = np.nan
    return vals


@dataclass
class AxiomCheck:
    axiom: str
    passed: bool
    worst_violation: float
    phi: Optional[float] = None
    eps: Optional[float] = None
    heuristic: bool = False

    def to_dict(self):
        return {
            "axiom": self.axiom,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "phi": self.phi,
            "eps": self.eps,
            "heuristic": self.heuristic,
        }


@dataclass
class ValidationReport:
    prf_name: str
    checks: list
    phi_count: int
    eps_list: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c.axiom for c in self.checks if not c.passed]

    def check(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_dict(self):
        return {
            "prf": self.prf_name,
            "ok": self.ok,
            "grid": {"phi_count": self.phi_count, "eps_list": list(self.eps_list)},
            "checks": [c.to_dict() for c in self.checks],
        }


def _locate(values: np.ndarray, phis: np.ndarray, eps_row: np.ndarray):
    """Largest entry of a (eps x phi) array and where it sits; NaN counts as +inf."""
    if values.size == 0:
        return -math.inf, None, None
    bad = np.where(np.isnan(values), np.inf, values)
    i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return float(bad[i, j]), float(phis[j]), float(eps_row[i])


def validate_prf(prf: PhaseResponse, eps_list: Sequence[float], phi_count: int = 1001,
                 tol: float = 1e-9, slope_bound: float = 1e6) -> ValidationReport:
    """Check the PRF axioms on a uniform phase grid crossed with ``eps_list``.

    Equalities (Eq1, Eq4, Eq5) and the closed range bound (Eq2) allow
    ``tol``; the strict interior bound (Eq3) allows nothing. The smoothness
    check (Eq6) only bounds difference quotients between neighbouring grid
    points and is marked heuristic. Evaluation failures show up as failed
    checks with an infinite violation.
    """
    if phi_count < 3:
        raise InvalidParameter("phi_count must be >= 3")
    eps_vals = [check_strength(e) for e in eps_list]
    phis = np.linspace(0.0, 1.0, phi_count)
    eps_row = np.asarray([0.0] + eps_vals)
    G = np.vstack([eval_grid(prf.g, phis, e) for e in eps_row])
    checks = []

    worst, p, e = _locate(np.abs(G[:1]), phis, eps_row[:1])
    checks.append(AxiomCheck("Eq1", worst <= tol, worst, p, e))

    excess = np.maximum(-phis - G, G - (1.0 - phis))
    worst, p, e = _locate(excess, phis, eps_row)
    checks.append(AxiomCheck("Eq2", worst <= tol, max(worst, 0.0), p, e))

    pos = eps_row > 0.0
    inner = phis[1:-1]
    excess = np.maximum(-inner - G[pos, 1:-1], G[pos, 1:-1] - (1.0 - inner))
    worst, p, e = _locate(excess, inner, eps_row[pos])
    checks.append(AxiomCheck("Eq3", worst < 0.0, max(worst, 0.0), p, e))

    worst, p, e = _locate(np.abs(G[:, :1]), phis[:1], eps_row)
    checks.append(AxiomCheck("Eq4", worst <= tol, worst, p, e))
    worst, p, e = _locate(np.abs(G[:, -1:]), phis[-1:], eps_row)
    checks.append(AxiomCheck("Eq5", worst <= tol, worst, p, e))

    slopes = np.abs(np.diff(G, axis=1)) / np.diff(phis)
    worst, p, e = _locate(slopes, phis[:-1], eps_row)
    checks.append(AxiomCheck("Eq6-smoothness", worst <= slope_bound, worst, p, e, heuristic=True))

    return ValidationReport(prf.name, checks, phi_count, eps_vals)
