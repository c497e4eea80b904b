"""Synchrony of two identical pulse-coupled phase oscillators.

Phase response functions, the strobe map, stability classification of the
synchronous state for a PRF and its linearization in pulse strength, the
theta neuron, and a small expression language for user-defined PRFs.
"""
__version__ = "0.1.0"

from ._accel import BACKEND
from .builtins import NAMES as BUILTIN_NAMES, all_builtins, get_builtin
from .calculus import PartialKind, make_infinitesimal, numeric_partial, partial
from .classify import (FullReport, StabilityReport, TildeReport, classify, classify_empirical,
                       classify_lemma3, classify_strong, full_report)
from .errors import (EndpointSingularity, EvaluationSingularity, InfiniteVoltage, InvalidParameter,
                     InvalidPRF, NonConstantExponent, ParseError, PhaseRangeError, PulseSyncError)
from .expr import diff_expr, eval_expr, parse, prf_from_string, simplify, to_string
from .prf import AxiomCheck, PhaseResponse, ValidationReport, eval_g, validate_prf
from .strobe import (FiringEvent, IterationTrace, iterate, simulate_events, strobe_map,
                     strobe_map_grid, strobe_samples, sync_derivative)
from .theta import (ThetaParams, phase_to_theta, theta_charge_jump, theta_period, theta_prf,
                    theta_to_phase, theta_voltage)
