"""Strobe map of two identical pulse-coupled oscillators.

Time is measured in periods throughout (T = 1). Oscillator A starts at
phase 0 and B at ``phi``; the strobe map ``F(phi, eps)`` is B's phase the
next time A fires, right after A's pulse has acted on B:

    F(phi, eps) = phi - g(1 - phi, eps) + g(phi - g(1 - phi, eps), eps)

Synchrony corresponds to the fixed points 0 and 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel, kernels
from .calculus import PartialKind, partial
from .errors import EvaluationSingularity, InvalidParameter, PhaseRangeError
from .prf import PhaseResponse, check_phase, check_strength

CONV_TOL = 1e-12
MAX_ITERS = 10**6
CYCLE_WINDOW = 64

VERDICTS = ("converged-to-0", "converged-to-1", "converged-to-interior", "max-iters",
            "cycle-detected")
FIRERS = ("A", "B", "AB")


def _raise_status(prf, status, phi, eps, where):
    if status == kernels.NONFINITE:
        raise EvaluationSingularity(
            f"{prf.name}: non-finite PRF value in {where} at phi={phi!r}, eps={eps!r}",
            phi=phi, eps=eps)
    raise PhaseRangeError(
        f"{prf.name}: phase left [0, 1] in {where} at phi={phi!r}, eps={eps!r}; "
        "the PRF violates the range axiom")


def strobe_map(prf: PhaseResponse, phi: float, eps: float) -> float:
    """``F(phi, eps)``; raises PhaseRangeError if an intermediate phase leaves [0, 1]."""
    phi = check_phase(phi)
    eps = check_strength(eps)
    step = getattr(kernels.strobe_step, "py_func", kernels.strobe_step)
    with np.errstate(all="ignore"):
        value, status = step(prf.g, phi, eps)
    if status != kernels.OK:
        _raise_status(prf, status, phi, eps, "strobe_map")
    return float(value)


def strobe_map_grid(prf: PhaseResponse, phis, eps: float) -> np.ndarray:
    """``F`` over an array of phases (compiled loop or vectorized numpy)."""
    phis = np.ascontiguousarray(phis, dtype=float)
    eps = check_strength(eps)
    if phis.size and (phis.min() < 0.0 or phis.max() > 1.0):
        raise InvalidParameter("phases must lie in [0, 1]")
    flat = phis.ravel()
    if _accel.USE_NUMBA:
        out, status, bad = kernels.strobe_grid_kernel(prf.compiled(), flat, eps)
    else:
        out, status, bad = kernels.strobe_grid_numpy(prf.g, flat, eps)
    if status != kernels.OK:
        _raise_status(prf, status, float(flat[bad]), eps, "strobe_map_grid")
    return out.reshape(phis.shape)


def sync_derivative(prf: PhaseResponse, eps: float) -> float:
    """``(1 + dg/dphi(0, eps)) (1 + dg/dphi(1, eps))``, the slope of F at 0 and 1."""
    eps = check_strength(eps)
    return ((1.0 + partial(prf, PartialKind.DPHI, 0.0, eps))
            * (1.0 + partial(prf, PartialKind.DPHI, 1.0, eps)))


@dataclass(frozen=True)
class IterationTrace:
    """Fixed-point iteration ``phi_{k+1} = F(phi_k, eps)``.

    ``limit`` is the extrapolated limit for the ``converged-to-*`` verdicts
    and ``None`` otherwise.
    """

    phases: np.ndarray = field(repr=False)
    eps: float
    verdict: str
    iters_used: int
    limit: float | None = None
    prf_name: str = ""

    @property
    def final(self) -> float:
        return float(self.phases[-1])

    def to_dict(self, include_phases=True):
        out = {"prf": self.prf_name, "eps": self.eps, "verdict": self.verdict,
               "iters_used": self.iters_used, "limit": self.limit, "final_phi": self.final}
        if include_phases:
            out["phases"] = [float(p) for p in self.phases]
        return out


def iterate(prf: PhaseResponse, phi0: float, eps: float, max_iters: int = MAX_ITERS,
            conv_tol: float = CONV_TOL) -> IterationTrace:
    """Iterate the strobe map from ``phi0``.

    Stops when a step is shorter than ``conv_tol`` (after the sequence has
    moved at all), when a phase comes within ``conv_tol`` of one of the last
    64 iterates, or after ``max_iters`` steps. A sequence that never moves,
    such as any start under the theta PRF, runs the full budget and gets
    ``max-iters``.
    """
    phi0 = check_phase(phi0)
    eps = check_strength(eps)
    max_iters = int(max_iters)
    if max_iters < 1:
        raise InvalidParameter(f"max_iters must be >= 1, got {max_iters}")
    if not conv_tol > 0:
        raise InvalidParameter(f"conv_tol must be > 0, got {conv_tol!r}")
    fn = prf.compiled() if _accel.USE_NUMBA else prf.g
    with np.errstate(all="ignore"):
        phases, steps, verdict, limit, status = kernels.iterate_kernel(
            fn, phi0, eps, max_iters, float(conv_tol), CYCLE_WINDOW)
    if status != kernels.OK:
        _raise_status(prf, status, float(phases[steps]), eps, "iterate")
    name = VERDICTS[verdict]
    # the extrapolated limit may overshoot an endpoint by rounding
    limit = min(max(float(limit), 0.0), 1.0) if name.startswith("converged") else None
    return IterationTrace(phases=phases[:steps + 1].copy(), eps=eps, verdict=name,
                          iters_used=int(steps), limit=limit, prf_name=prf.name)


@dataclass(frozen=True)
class FiringEvent:
    time: float
    firer: str
    phase_other_before: float
    phase_other_after: float


def simulate_events(prf: PhaseResponse, phi_a0: float, phi_b0: float, eps: float,
                    n_firings: int) -> list[FiringEvent]:
    """Event-driven run of the two oscillators for ``n_firings`` firings.

    Equal phases fire together: the run ends with one event whose firer is
    ``"AB"``.
    """
    phi_a0 = check_phase(phi_a0)
    phi_b0 = check_phase(phi_b0)
    eps = check_strength(eps)
    n_firings = int(n_firings)
    if n_firings < 1:
        raise InvalidParameter(f"n_firings must be >= 1, got {n_firings}")
    fn = prf.compiled() if _accel.USE_NUMBA else prf.g
    with np.errstate(all="ignore"):
        times, firer, before, after, count, status = kernels.simulate_kernel(
            fn, phi_a0, phi_b0, eps, n_firings)
    if status != kernels.OK:
        _raise_status(prf, status, float("nan"), eps, "simulate_events")
    return [FiringEvent(float(times[i]), FIRERS[firer[i]], float(before[i]), float(after[i]))
            for i in range(count)]


def strobe_samples(events) -> np.ndarray:
    """B's phase right after each firing of A."""
    return np.array([e.phase_other_after for e in events if e.firer == "A"], dtype=float)
