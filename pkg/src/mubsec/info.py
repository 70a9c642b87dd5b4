"""Entropies and mutual informations, all in bits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, Povm, as_density_matrix, clipped_eigvalsh

ZERO_PROB = 1e-15


def as_prob_vector(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a probability vector; renormalize drift smaller than ``tol``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"probability vector must be one-dimensional, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("probability vector contains NaN or infinite entries")
    if np.any(p < -tol):
        raise ValueError(f"probability vector has negative entry {p.min()!r}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total!r}, expected 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _entropy(p: np.ndarray) -> float:
    p = p[p > ZERO_PROB]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def shannon_entropy(p, tol: float = DEFAULT_TOL) -> float:
    """Shannon entropy ``-sum p log2 p`` with ``0 log 0 = 0``."""
    return _entropy(as_prob_vector(p, tol))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p!r}")
    return _entropy(np.array([p, 1.0 - p]))


def von_neumann_entropy(rho, tol: float = DEFAULT_TOL) -> float:
    """Entropy of the eigenvalue distribution of ``rho``."""
    return _entropy(clipped_eigvalsh(as_density_matrix(rho, tol), tol))


def mutual_info_classical(joint, tol: float = DEFAULT_TOL) -> float:
    """``I(X;Y) = H(X) + H(Y) - H(X,Y)`` of a joint probability table."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise ValueError(f"joint distribution must be a matrix, got shape {joint.shape}")
    flat = as_prob_vector(joint.ravel(), tol)
    joint = flat.reshape(joint.shape)
    mi = _entropy(joint.sum(axis=1)) + _entropy(joint.sum(axis=0)) - _entropy(flat)
    return max(0.0, mi)


@dataclass(frozen=True)
class QuantumSource:
    """Ensemble of density matrices emitted with prior probabilities."""

    states: np.ndarray
    priors: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[0] == 0:
            raise ValueError(f"states must form an (n, d, d) stack, got {states.shape}")
        priors = as_prob_vector(self.priors, self.tol)
        if priors.size != states.shape[0]:
            raise ValueError(f"{states.shape[0]} states but {priors.size} priors")
        states = np.stack([as_density_matrix(s, self.tol) for s in states])
        states.setflags(write=False)
        priors.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def uniform(cls, states, tol: float = DEFAULT_TOL) -> "QuantumSource":
        n = len(states)
        return cls(states, np.full(n, 1.0 / n), tol=tol)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.states.shape[0]

    def average(self) -> np.ndarray:
        return np.einsum("s,sij->ij", self.priors, self.states)


def conditional_probs(src: QuantumSource, povm: Povm) -> np.ndarray:
    """Matrix ``p(e|s) = Tr(E_e rho_s)`` with rows indexed by source symbol."""
    if povm.dim != src.dim:
        raise ValueError(f"POVM acts on dimension {povm.dim}, source on {src.dim}")
    cond = np.real(np.einsum("eij,sji->se", povm.elements, src.states))
    cond = np.clip(cond, 0.0, None)
    return cond / cond.sum(axis=1, keepdims=True)


def measurement_mutual_info(src: QuantumSource, povm: Povm) -> float:
    """Mutual information between the source label and the POVM outcome."""
    joint = src.priors[:, None] * conditional_probs(src, povm)
    return mutual_info_classical(joint)


def holevo_bound(src: QuantumSource) -> float:
    """``S(rho) - sum_s p_s S(rho_s)``."""
    chi = von_neumann_entropy(src.average(), src.tol) - sum(
        p * von_neumann_entropy(r, src.tol) for p, r in zip(src.priors, src.states))
    return max(0.0, float(chi))
