"""Loop kernels for the strobe map.

All kernels take the PRF as a scalar callable ``g(phi, eps)``. Under numba
that callable must be the output of ``PhaseResponse.compiled()``; the
kernel signatures use a first-class function type, so each kernel is
compiled (and disk-cached) once for every PRF. Without numba the same
source runs as plain Python.

Status codes: 0 ok, 1 non-finite PRF value, 2 phase left [0, 1] by more
than ``PHASE_SLACK``.
"""
import numpy as np

from . import _accel

PHASE_SLACK = 1e-12

OK, NONFINITE, OUT_OF_RANGE = 0, 1, 2

# iterate() verdict codes
TO_ZERO, TO_ONE, INTERIOR, MAX_ITERS, CYCLE = 0, 1, 2, 3, 4

FIRER_A, FIRER_B, FIRER_BOTH = 0, 1, 2

if _accel.USE_NUMBA:
    from numba import types as _t

    _F = _t.float64
    _I = _t.int64
    _FN = _accel.PRF_FN
    _SIG_STEP = _t.Tuple((_F, _I))(_FN, _F, _F)
    _SIG_ITER = _t.Tuple((_F[:], _I, _I, _F, _I))(_FN, _F, _F, _I, _F, _I)
    _SIG_SIM = _t.Tuple((_F[:], _I[:], _F[:], _F[:], _I, _I))(_FN, _F, _F, _F, _I)
    _SIG_GRID = _t.Tuple((_F[:], _I, _I))(_FN, _F[:], _F)
else:
    _SIG_STEP = _SIG_ITER = _SIG_SIM = _SIG_GRID = None


@_accel.kernel(_SIG_STEP)
def strobe_step(g, phi, eps):
    """One application of the strobe map, with the phase-range checks."""
    ga = g(1.0 - phi, eps)
    if not np.isfinite(ga):
        return phi, NONFINITE
    b = phi - ga
    if b < 0.0:
        if b < -PHASE_SLACK:
            return b, OUT_OF_RANGE
        b = 0.0
    elif b > 1.0:
        if b > 1.0 + PHASE_SLACK:
            return b, OUT_OF_RANGE
        b = 1.0
    gb = g(b, eps)
    if not np.isfinite(gb):
        return b, NONFINITE
    f = b + gb
    if f < 0.0:
        if f < -PHASE_SLACK:
            return f, OUT_OF_RANGE
        f = 0.0
    elif f > 1.0:
        if f > 1.0 + PHASE_SLACK:
            return f, OUT_OF_RANGE
        f = 1.0
    return f, OK


@_accel.kernel(_SIG_ITER)
def iterate_kernel(g, phi0, eps, max_iters, conv_tol, window):
    """Fixed-point iteration of the strobe map.

    Returns ``(phases, steps, verdict, limit, status)``; ``phases[:steps + 1]``
    is the trace. A step below ``conv_tol`` only counts as convergence once
    the sequence has moved (or if it sits on an endpoint), so a start on a
    neutral fixed point runs to ``max_iters``. The limit is extrapolated
    geometrically (Aitken) from the step ratio over the second half of the
    run, which keeps slow linear convergence to an endpoint from being
    labelled interior.
    """
    phases = np.empty(max_iters + 1)
    phases[0] = phi0
    phi = phi0
    moved = False
    near = 10.0 * conv_tol
    for k in range(max_iters):
        new, status = strobe_step(g, phi, eps)
        if status != OK:
            return phases, k, MAX_ITERS, phi, status
        phases[k + 1] = new
        d = new - phi
        if abs(d) < conv_tol:
            if moved or new <= near or new >= 1.0 - near:
                # Contraction rate measured over the second half of the run,
                # so rounding in tiny steps near phase 1 cannot swamp 1 - r.
                limit = new
                m = (k + 1) // 2
                if m > 0:
                    d_old = phases[k + 1 - m] - phases[k - m]
                    if d * d_old > 0.0 and abs(d) < abs(d_old):
                        r = (d / d_old) ** (1.0 / m)
                        limit = new + d * r / (1.0 - r)
                if abs(limit) <= near:
                    return phases, k + 1, TO_ZERO, limit, OK
                if abs(1.0 - limit) <= near:
                    return phases, k + 1, TO_ONE, limit, OK
                return phases, k + 1, INTERIOR, limit, OK
        else:
            moved = True
            lo = max(0, k - window)
            for j in range(k - 1, lo - 1, -1):
                if abs(phases[j] - new) < conv_tol:
                    return phases, k + 1, CYCLE, new, OK
        phi = new
    return phases, max_iters, MAX_ITERS, phi, OK


@_accel.kernel(_SIG_SIM)
def simulate_kernel(g, phi_a, phi_b, eps, n_firings):
    """Event-driven two-oscillator run in units of the period.

    Returns ``(time, firer, other_before, other_after, count, status)``.
    Equal phases end the run with one synchronous event.
    """
    times = np.empty(n_firings)
    firer = np.empty(n_firings, dtype=np.int64)
    before = np.empty(n_firings)
    after = np.empty(n_firings)
    t = 0.0
    a = phi_a
    b = phi_b
    for n in range(n_firings):
        if a == b:
            t += 1.0 - a
            times[n] = t
            firer[n] = FIRER_BOTH
            before[n] = 1.0
            after[n] = 1.0
            return times, firer, before, after, n + 1, OK
        if a > b:
            dt = 1.0 - a
            x = b + dt
            who = FIRER_A
        else:
            dt = 1.0 - b
            x = a + dt
            who = FIRER_B
        t += dt
        if x > 1.0:
            x = 1.0
        gx = g(x, eps)
        if not np.isfinite(gx):
            return times, firer, before, after, n, NONFINITE
        y = x + gx
        if y < 0.0 or y > 1.0:
            if y < -PHASE_SLACK or y > 1.0 + PHASE_SLACK:
                return times, firer, before, after, n, OUT_OF_RANGE
            y = min(max(y, 0.0), 1.0)
        times[n] = t
        firer[n] = who
        before[n] = x
        after[n] = y
        if who == FIRER_A:
            a = 0.0
            b = y
        else:
            b = 0.0
            a = y
    return times, firer, before, after, n_firings, OK


@_accel.kernel(_SIG_GRID)
def strobe_grid_kernel(g, phis, eps):
    """Strobe map over an array; returns ``(values, status, first_bad_index)``."""
    out = np.empty(phis.shape[0])
    for i in range(phis.shape[0]):
        f, status = strobe_step(g, phis[i], eps)
        if status != OK:
            return out, status, i
        out[i] = f
    return out, OK, -1


def strobe_grid_numpy(g, phis, eps):
    """Vectorized strobe map (the numpy backend for ``strobe_grid_kernel``)."""
    with np.errstate(all="ignore"):
        ga = np.asarray(g(1.0 - phis, eps), dtype=float) + 0.0 * phis
        b = phis - ga
        gb = np.asarray(g(np.clip(b, 0.0, 1.0), eps), dtype=float) + 0.0 * phis
        f = np.clip(b, 0.0, 1.0) + gb
    for stage in (ga, gb):
        bad = np.flatnonzero(~np.isfinite(stage))
        if bad.size:
            return f, NONFINITE, int(bad[0])
    for stage in (b, f):
        bad = np.flatnonzero((stage < -PHASE_SLACK) | (stage > 1.0 + PHASE_SLACK))
        if bad.size:
            return f, OUT_OF_RANGE, int(bad[0])
    return np.clip(f, 0.0, 1.0), OK, -1
