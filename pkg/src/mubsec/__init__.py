"""Numerical toolkit for information-versus-disturbance bounds with mutually unbiased bases."""
from .attack import (AttackKraus, EveAttack, build_purification, builtin_attack, disturbance,
                     eve_states, extract_kraus_vectors, footnote_error_spectrum)
from .bounds import ivd_bound, fm_bound, mi_trace_bound, mi_trace_bound_uniform
from .errors import InvariantError
from .fm import FunctionSpec, GroupLaw, check_theorem2, fm_mutual_info, function_entropy
from .info import QuantumSource, holevo_bound, measurement_mutual_info
from .linalg import Povm, partial_trace, trace_norm
from .mub import GeneralizedHadamard, certified_hadamards, fourier_matrix, prime_mub_set, sylvester_hadamard
from .optimizer import OptimizerConfig, optimize_povm, pretty_good_measurement, tightness_scan

__version__ = "0.1.0"
