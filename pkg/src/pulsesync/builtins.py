"""Built-in PRFs: theta neuron, its linearization, two counterexamples, zero.

``example1`` is the theta PRF plus ``phi (1 - phi)^2 eps^2``: same
linearization in ``eps``, but the synchronous state is strongly repelling.
``example2`` is ``phi (1 - phi) eps - 2 phi (phi - 1)^2 (2 phi - 1) eps^2``,
strongly attracting when linearized and strongly repelling when not.

Partials below were differentiated by hand; tests compare them to finite
differences. With ``h(phi) = phi (phi - 1)^2 (2 phi - 1)`` one has
``h'(phi) = (phi - 1)(8 phi^2 - 7 phi + 1)``.
"""
from __future__ import annotations

import numpy as np

from .prf import PhaseResponse
from .theta import theta_prf

NAMES = ("theta", "theta-tilde", "example1", "example2", "zero")

_THETA_SRC = "(1/pi)*atan(tan((phi-0.5)*pi)+eps) - (phi-0.5)"

# the same PRFs in the expression language (``expr:`` on the command line)
EXPRESSIONS = {
    "theta": _THETA_SRC,
    "theta-tilde": "eps*sin(pi*phi)^2/pi",
    "example1": _THETA_SRC + " + phi*(1-phi)^2*eps^2",
    "example2": "phi*(1-phi)*eps - 2*phi*(phi-1)^2*(2*phi-1)*eps^2",
    "zero": "0",
}


# Each callable is self-contained: numba cannot call plain Python helpers.

def _ex1_g(phi, eps):
    s1 = np.sin(np.pi * phi)
    theta = np.arctan2(eps * s1 * s1, 1.0 - 0.5 * eps * np.sin(2.0 * np.pi * phi)) / np.pi
    return theta + phi * (1.0 - phi) ** 2 * eps * eps


def _ex1_dphi(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return (eps * s2 - eps * eps * s1 * s1) / d + (1.0 - phi) * (1.0 - 3.0 * phi) * eps * eps


def _ex1_deps(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return s1 * s1 / (np.pi * d) + 2.0 * eps * phi * (1.0 - phi) ** 2


def _ex1_dphi_deps(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return (s2 - 2.0 * eps * s1 * s1) / (d * d) + 2.0 * eps * (1.0 - phi) * (1.0 - 3.0 * phi)


def _ex2_g(phi, eps):
    h = phi * (phi - 1.0) ** 2 * (2.0 * phi - 1.0)
    return phi * (1.0 - phi) * eps - 2.0 * h * eps * eps


def _ex2_dphi(phi, eps):
    dh = (phi - 1.0) * (8.0 * phi * phi - 7.0 * phi + 1.0)
    return (1.0 - 2.0 * phi) * eps - 2.0 * dh * eps * eps


def _ex2_deps(phi, eps):
    h = phi * (phi - 1.0) ** 2 * (2.0 * phi - 1.0)
    return phi * (1.0 - phi) - 4.0 * h * eps


def _ex2_dphi_deps(phi, eps):
    dh = (phi - 1.0) * (8.0 * phi * phi - 7.0 * phi + 1.0)
    return (1.0 - 2.0 * phi) - 4.0 * dh * eps


def _zero(phi, eps):
    return phi * 0.0


# Linearizations eps * dg/deps(phi, 0), in closed form.

def _theta_tilde_g(phi, eps):
    s1 = np.sin(np.pi * phi)
    return eps * s1 * s1 / np.pi


def _theta_tilde_dphi(phi, eps):
    return eps * np.sin(2.0 * np.pi * phi)


def _theta_tilde_deps(phi, eps):
    s1 = np.sin(np.pi * phi)
    return s1 * s1 / np.pi + eps * 0.0


def _theta_tilde_dphi_deps(phi, eps):
    return np.sin(2.0 * np.pi * phi) + eps * 0.0


def _ex2_tilde_g(phi, eps):
    return eps * phi * (1.0 - phi)


def _ex2_tilde_dphi(phi, eps):
    return eps * (1.0 - 2.0 * phi)


def _ex2_tilde_deps(phi, eps):
    return phi * (1.0 - phi) + eps * 0.0


def _ex2_tilde_dphi_deps(phi, eps):
    return 1.0 - 2.0 * phi + eps * 0.0


_THETA_TILDE = (_theta_tilde_g, _theta_tilde_dphi, _theta_tilde_deps, _theta_tilde_dphi_deps)
_ZERO = (_zero, _zero, _zero, _zero)

# builtin name -> closed-form (g, dphi, deps, dphi_deps) of its linearization
CLOSED_FORM_TILDE = {
    "theta": _THETA_TILDE,
    "example1": _THETA_TILDE,
    "example2": (_ex2_tilde_g, _ex2_tilde_dphi, _ex2_tilde_deps, _ex2_tilde_dphi_deps),
    "zero": _ZERO,
}


def _builtin(name, fns):
    g, dphi, deps, mixed = fns
    return PhaseResponse(name=name, g=g, dphi=dphi, deps=deps, dphi_deps=mixed,
                         provenance="builtin", cacheable=True)


def example1_prf() -> PhaseResponse:
    return _builtin("example1", (_ex1_g, _ex1_dphi, _ex1_deps, _ex1_dphi_deps))


def example2_prf() -> PhaseResponse:
    return _builtin("example2", (_ex2_g, _ex2_dphi, _ex2_deps, _ex2_dphi_deps))


def zero_prf() -> PhaseResponse:
    return _builtin("zero", _ZERO)


def theta_tilde_prf() -> PhaseResponse:
    from dataclasses import replace

    from .calculus import make_infinitesimal

    return replace(make_infinitesimal(theta_prf()), name="theta-tilde")


_FACTORIES = {
    "theta": theta_prf,
    "theta-tilde": theta_tilde_prf,
    "example1": example1_prf,
    "example2": example2_prf,
    "zero": zero_prf,
}

_cache = {}


def get_builtin(name: str) -> PhaseResponse:
    """Look up a built-in PRF by name (instances are shared)."""
    if name not in _FACTORIES:
        raise KeyError(f"unknown builtin PRF {name!r}; choose from {', '.join(NAMES)}")
    if name not in _cache:
        _cache[name] = _FACTORIES[name]()
    return _cache[name]


def all_builtins():
    return [get_builtin(n) for n in NAMES]
