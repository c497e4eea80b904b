"""Stability of synchrony: strong (derivative) and empirical (iteration) verdicts.

Synchrony is strongly attracting when the slope of the strobe map at the
synchronous fixed points, ``|(1 + g_phi(0, eps)) (1 + g_phi(1, eps))|``, is
below 1 and strongly repelling when it is above 1. A slope of exactly 1
decides nothing; only iteration can tell neutral, weakly attracting and
weakly repelling apart.

For the linearized PRF the corner mixed partials ``m0 = g_phi_eps(0, 0)``
and ``m1 = g_phi_eps(1, 0)`` settle the small-eps question: ``m0 + m1 < 0``
or ``m0 = -m1 != 0`` means strongly attracting for small eps, and
``m0 + m1 > 0`` strongly repelling. ``m0 + m1 < 0`` (very strong attraction)
carries over from the linearization to the PRF itself.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .calculus import PartialKind, make_infinitesimal, partial
from .prf import PhaseResponse, check_strength
from .strobe import MAX_ITERS, iterate, sync_derivative

TOL_CLS = 1e-9
PROBE = 1e-3
EMPIRICAL_TOL = 1e-12
ESCAPE_WINDOW = 100


@dataclass(frozen=True)
class StabilityReport:
    prf_name: str
    eps: float
    derivative_product: float
    strong_verdict: str
    empirical_verdict: Optional[str] = None
    combined: Optional[str] = None
    probe: Optional[float] = None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class TildeReport:
    prf_name: str
    m0: float
    m1: float
    m_sum: float
    lemma3_verdict: str
    very_strong: bool

    def to_dict(self):
        return asdict(self)


def _strong(product, tol):
    if abs(product) < 1.0 - tol:
        return "strongly-attracting"
    if abs(product) > 1.0 + tol:
        return "strongly-repelling"
    return "inconclusive"


def combine(strong: str, empirical: Optional[str]) -> str:
    """Merge the two verdicts; the derivative test wins when it is decisive."""
    if strong != "inconclusive":
        return strong
    return {"attracting": "weakly-attracting", "repelling": "weakly-repelling",
            "neutral": "neutral"}.get(empirical, "undetermined")


def classify_strong(prf: PhaseResponse, eps: float, tol: float = TOL_CLS) -> StabilityReport:
    """Derivative-product verdict only (empirical fields left ``None``)."""
    eps = check_strength(eps)
    product = sync_derivative(prf, eps)
    return StabilityReport(prf.name, eps, product, _strong(product, tol))


def _side_verdict(trace, endpoint, tol):
    phases = trace.phases
    dist = np.abs(phases - endpoint)
    d0 = dist[0]
    if np.max(np.abs(phases - phases[0])) <= tol:
        return "neutral"
    target = "converged-to-0" if endpoint == 0.0 else "converged-to-1"
    if trace.verdict == target:
        return "attracting"
    steps = np.diff(dist)
    if trace.verdict == "max-iters" and np.all(steps <= 0.0) and dist[-1] < d0 - tol:
        return "attracting"
    window = steps[:ESCAPE_WINDOW]
    if window.size and np.all(window >= 0.0) and dist[min(ESCAPE_WINDOW, dist.size - 1)] > d0 + tol:
        return "repelling"
    return "undetermined"


def empirical_sides(prf, eps, probe=PROBE, max_iters=MAX_ITERS, tol=EMPIRICAL_TOL):
    """Per-side empirical verdicts ``(near 0, near 1)``."""
    if not 0.0 < probe <= 0.1:
        raise ValueError(f"probe must lie in (0, 0.1], got {probe!r}")
    low = iterate(prf, probe, eps, max_iters)
    high = iterate(prf, 1.0 - probe, eps, max_iters)
    return _side_verdict(low, 0.0, tol), _side_verdict(high, 1.0, tol)


def classify_empirical(prf: PhaseResponse, eps: float, probe: float = PROBE,
                       max_iters: int = MAX_ITERS, tol: float = EMPIRICAL_TOL) -> str:
    """Iterate from ``probe`` and ``1 - probe`` and judge each side.

    A side is attracting if it converges to its endpoint, or if the distance
    to the endpoint shrinks monotonically over the whole budget; repelling if
    the distance grows monotonically over the first 100 steps; neutral if the
    sequence stays within ``tol`` of its start. Sides that disagree give
    ``asymmetric``.
    """
    return combine_sides(*empirical_sides(prf, eps, probe, max_iters, tol))


def combine_sides(low: str, high: str) -> str:
    """Overall empirical verdict from the verdicts near 0 and near 1."""
    if low == high:
        return low
    if "undetermined" in (low, high):
        return "undetermined"
    return "asymmetric"


def classify(prf: PhaseResponse, eps: float, probe: float = PROBE,
             max_iters: int = MAX_ITERS, tol_cls: float = TOL_CLS) -> StabilityReport:
    """Strong and empirical verdicts at one strength, plus their combination."""
    strong = classify_strong(prf, eps, tol_cls)
    empirical = classify_empirical(prf, strong.eps, probe, max_iters)
    return StabilityReport(prf.name, strong.eps, strong.derivative_product, strong.strong_verdict,
                           empirical, combine(strong.strong_verdict, empirical), probe)


def classify_lemma3(prf: PhaseResponse, tol: float = TOL_CLS) -> TildeReport:
    """Small-eps verdict for the linearization from the corner mixed partials."""
    m0 = partial(prf, PartialKind.D2_PHI_EPS, 0.0, 0.0)
    m1 = partial(prf, PartialKind.D2_PHI_EPS, 1.0, 0.0)
    s = m0 + m1
    if s < -tol or (abs(s) <= tol and m0 * m1 < -tol * tol):
        verdict = "strongly-attracting-small-eps"
    elif s > tol:
        verdict = "strongly-repelling-small-eps"
    else:
        verdict = "inconclusive"
    return TildeReport(prf.name, m0, m1, s, verdict, bool(s < -tol))


def _attracts(verdict):
    return verdict in ("strongly-attracting", "weakly-attracting")


def _repels(verdict):
    return verdict in ("strongly-repelling", "weakly-repelling")


@dataclass(frozen=True)
class FullReport:
    prf_name: str
    tilde_name: str
    eps_list: tuple
    g_reports: tuple
    tilde_reports: tuple
    lemma3: TildeReport
    disagreements: tuple
    notes: tuple = field(default=())

    def to_dict(self):
        return {
            "prf": self.prf_name,
            "tilde_prf": self.tilde_name,
            "eps_list": list(self.eps_list),
            "g": [r.to_dict() for r in self.g_reports],
            "g_tilde": [r.to_dict() for r in self.tilde_reports],
            "lemma3": self.lemma3.to_dict(),
            "disagreements": list(self.disagreements),
            "notes": list(self.notes),
        }


def _disagree(g_verdict, tilde_verdict, lemma3_verdict):
    """True when the linearized prediction contradicts the exact verdict."""
    predicted = tilde_verdict
    if predicted in ("undetermined", None):
        predicted = {"strongly-attracting-small-eps": "strongly-attracting",
                     "strongly-repelling-small-eps": "strongly-repelling"}.get(lemma3_verdict)
    if predicted is None or g_verdict == "undetermined":
        return False
    if _attracts(predicted):
        return not _attracts(g_verdict)
    if _repels(predicted):
        return not _repels(g_verdict)
    return predicted != g_verdict


def full_report(prf: PhaseResponse, eps_list, probe: float = PROBE, max_iters: int = MAX_ITERS,
                workers: Optional[int] = None) -> FullReport:
    """Classify ``prf`` and its linearization on every strength in ``eps_list``.

    Strengths are processed concurrently; results keep the input order.
    """
    eps_list = tuple(check_strength(e) for e in eps_list)
    if not eps_list:
        raise ValueError("eps_list must not be empty")
    tilde = make_infinitesimal(prf)
    jobs = [(p, e) for p in (prf, tilde) for e in eps_list]
    with ThreadPoolExecutor(max_workers=workers or min(8, len(jobs))) as pool:
        reports = list(pool.map(lambda job: classify(job[0], job[1], probe, max_iters), jobs))
    n = len(eps_list)
    g_reports, tilde_reports = tuple(reports[:n]), tuple(reports[n:])
    lemma3 = classify_lemma3(prf)

    disagreements = []
    for g_rep, t_rep in zip(g_reports, tilde_reports):
        if _disagree(g_rep.combined, t_rep.combined, lemma3.lemma3_verdict):
            disagreements.append(
                f"eps={g_rep.eps!r}: {tilde.name} predicts {t_rep.combined}, "
                f"{prf.name} is {g_rep.combined}")

    notes = list(tilde.warnings)
    if lemma3.very_strong:
        smallest = g_reports[int(np.argmin(eps_list))]
        if smallest.strong_verdict == "strongly-attracting":
            notes.append(f"very strong attraction of {tilde.name} carries over: {prf.name} is "
                         f"strongly attracting at eps={smallest.eps!r}")
        else:
            notes.append(f"very strong attraction of {tilde.name} but {prf.name} is "
                         f"{smallest.strong_verdict} at eps={smallest.eps!r}; "
                         "try a smaller eps")
    return FullReport(prf.name, tilde.name, eps_list, g_reports, tilde_reports, lemma3,
                      tuple(disagreements), tuple(notes))
