"""Closed-form upper and lower bounds on entropies and informations.

Every function returns the value of its bound (in bits) so that callers can
compare it against an exactly computed quantity.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .info import QuantumSource, as_prob_vector, binary_entropy, shannon_entropy
from .linalg import DEFAULT_TOL, trace_norm

BOUNDARY_TOL = 1e-12


def inputs_digest(*inputs) -> str:
    """Stable SHA-256 over numeric inputs (arrays hashed by dtype, shape and bytes)."""
    h = hashlib.sha256()
    for x in inputs:
        a = np.ascontiguousarray(np.asarray(x))
        if a.dtype.kind in "iub":
            a = a.astype(np.int64)
        elif a.dtype.kind == "f":
            a = a.astype(np.float64)
        elif a.dtype.kind == "c":
            a = a.astype(np.complex128)
        h.update(f"{a.dtype.str}{a.shape}".encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    bound_value: float
    exact_value: Optional[float] = None
    slack: Optional[float] = None
    inputs_digest: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def bound_report(name: str, bound_value: float, exact_value: float | None = None,
                 inputs=(), tol: float = DEFAULT_TOL) -> BoundReport:
    """Package a bound evaluation; refuses a report whose slack is below ``-tol``."""
    slack = None
    if exact_value is not None:
        slack = bound_value - exact_value
        if slack < -tol:
            raise ValueError(f"{name}: bound {bound_value!r} below exact value {exact_value!r}")
    return BoundReport(name, float(bound_value),
                       None if exact_value is None else float(exact_value),
                       slack, inputs_digest(*inputs))


def _check_unit(x: float, what: str) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {x!r}")


def entropy_linear_lower(p: float, p_ref: float) -> float:
    """Linear lower bound on the binary entropy anchored at ``p_ref <= 1/2``.

    ``H(p_ref) - H(p_ref)/p_ref * |p - p_ref|``; equality at ``p = p_ref``.
    """
    _check_unit(p, "p")
    if not 0.0 < p_ref <= 0.5 + BOUNDARY_TOL:
        raise ValueError(f"reference probability must lie in (0, 1/2], got {p_ref!r}")
    h = binary_entropy(p_ref)
    return h - h / p_ref * abs(p - p_ref)


def gen_entropy_lower(p, p_ref) -> float:
    """Lower bound on ``H(p)`` from a reference distribution with every entry <= 1/2."""
    p = as_prob_vector(p)
    p_ref = as_prob_vector(p_ref)
    if p.shape != p_ref.shape:
        raise ValueError(f"length mismatch: {p.size} vs {p_ref.size}")
    for i, q in enumerate(p_ref):
        if not 0.0 < q <= 0.5 + BOUNDARY_TOL:
            raise ValueError(f"reference probability at index {i} is {q!r}; need 0 < p'_i <= 1/2")
    return shannon_entropy(p_ref) - float(np.sum(np.log2(1.0 / p_ref) * np.abs(p - p_ref)))


def _check_small_priors(priors: np.ndarray, hint: str = "") -> None:
    for s, q in enumerate(priors):
        if q > 0.5 + BOUNDARY_TOL:
            raise ValueError(f"prior of symbol {s} is {q!r} > 1/2{hint}")


def _as_cond(priors: np.ndarray, cond) -> np.ndarray:
    cond = np.asarray(cond, dtype=float)
    if cond.ndim != 2 or cond.shape[0] != priors.size:
        raise ValueError(f"conditional table shape {cond.shape} does not match {priors.size} symbols")
    for row in cond:
        as_prob_vector(row)
    return cond


def mi_variational_bound(priors, cond) -> float:
    """``sum_s p_s log(1/p_s) sum_e |p(e|s) - p(e)|`` for priors <= 1/2."""
    priors = as_prob_vector(priors)
    _check_small_priors(priors)
    cond = _as_cond(priors, cond)
    p_e = priors @ cond
    mask = priors > 0
    weights = priors[mask] * np.log2(1.0 / priors[mask])
    return float(np.sum(weights * np.abs(cond[mask] - p_e).sum(axis=1)))


def mi_trace_bound(src: QuantumSource) -> float:
    """``sum_s p_s log(1/p_s) Tr|rho_s - rho|``; valid for every measurement."""
    _check_small_priors(src.priors, "; use onebit_trace_bound for two-state sources")
    rho = src.average()
    total = 0.0
    for q, r in zip(src.priors, src.states):
        if q > 0:
            total += q * np.log2(1.0 / q) * trace_norm(r - rho, src.tol)
    return float(total)


def mi_trace_bound_uniform(src: QuantumSource) -> float:
    """``log n * (1/n) sum_s Tr|rho_s - rho|`` for a uniform n-state source."""
    n = len(src)
    if n < 2:
        raise ValueError("uniform trace bound needs at least two states")
    if np.max(np.abs(src.priors - 1.0 / n)) > BOUNDARY_TOL:
        raise ValueError("uniform trace bound requires uniform priors")
    rho = src.average()
    dist = sum(trace_norm(r - rho, src.tol) for r in src.states)
    return float(np.log2(n) * dist / n)


def onebit_mi_bound(priors, cond) -> float:
    """``H(S) p_0 sum_e |p(e|1) - p(e|0)|`` with labels ordered so ``p_0 >= p_1``."""
    priors = as_prob_vector(priors)
    if priors.size != 2:
        raise ValueError(f"one-bit bound needs exactly two symbols, got {priors.size}")
    cond = _as_cond(priors, cond)
    if priors[1] > priors[0]:
        raise ValueError("label the more likely symbol 0 (need p_0 >= p_1)")
    return shannon_entropy(priors) * priors[0] * float(np.abs(cond[1] - cond[0]).sum())


def onebit_trace_bound(src: QuantumSource) -> tuple[float, float]:
    """Trace-distance bounds for a two-state source.

    Returns
    -------
    labeled : float
        ``H(S) max(p_0, p_1) Tr|rho_0 - rho_1|`` (the larger prior plays ``p_0``).
    corollary : float
        ``H(S) Tr|rho_0 - rho_1|``.
    """
    if len(src) != 2:
        raise ValueError(f"one-bit bound needs exactly two states, got {len(src)}")
    h = shannon_entropy(src.priors)
    dist = trace_norm(src.states[0] - src.states[1], src.tol)
    return h * float(np.max(src.priors)) * dist, h * dist


def ivd_bound(dim: int, p_err_mub: float) -> float:
    """Information bound ``4 log2(D) sqrt(P_err)`` from the error rate in an unbiased basis."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    _check_unit(p_err_mub, "error probability")
    return float(4.0 * np.log2(dim) * np.sqrt(p_err_mub))


def fm_bound(h_fk: float, p_err_mub: float) -> float:
    """Bound ``H(f(K)) * 4 sqrt(P_err)`` on information about a function of the message."""
    if h_fk < 0:
        raise ValueError(f"function entropy must be non-negative, got {h_fk!r}")
    _check_unit(p_err_mub, "error probability")
    return float(h_fk * 4.0 * np.sqrt(p_err_mub))


def lo_chau_bound(delta: float, n_singlets: int) -> float:
    """Singlet-fidelity bound ``-(1-d)log(1-d) - d log(d / (2^(2R) - 1))``."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie strictly inside (0, 1), got {delta!r}")
    if n_singlets < 1:
        raise ValueError("number of singlets must be positive")
    return float(-(1 - delta) * np.log2(1 - delta)
                 - delta * (np.log2(delta) - np.log2(2.0 ** (2 * n_singlets) - 1)))
