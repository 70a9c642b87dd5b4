"""Lower bounds on accessible information by explicit measurements.

The exact accessible information is a maximum over all POVMs; here we report
the best of a few strong candidates refined by a monotone local ascent. The
result is always a valid measurement, so its information is a certified
lower bound that the closed-form upper bounds must dominate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .attack import EveAttack, builtin_attack, disturbance, eve_states, extract_kraus_vectors
from .bounds import ivd_bound, mi_trace_bound_uniform
from .errors import InvariantError
from .info import QuantumSource, holevo_bound, measurement_mutual_info
from .linalg import DEFAULT_TOL, Povm, hermitian_part, inv_sqrt_psd, normalize_povm
from .mub import GeneralizedHadamard

POVM_TOL = 1e-8
_TINY = 1e-300


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`optimize_povm`.

    ``restarts`` counts starting points in the order: pretty-good measurement,
    weighted eigenbasis projectors, then seeded random POVMs with
    ``n_outcomes`` elements. The ascent stops after ``patience`` consecutive
    iterations whose relative gain is below ``tol``, or after ``max_iters``.
    """

    n_outcomes: int = 4
    max_iters: int = 200
    step: float = 1.0
    tol: float = 1e-10
    seed: int = 0
    restarts: int = 4
    patience: int = 25

    def __post_init__(self):
        if self.n_outcomes < 2:
            raise ValueError("n_outcomes must be at least 2")
        if self.max_iters < 1 or self.restarts < 1 or self.patience < 1:
            raise ValueError("max_iters, restarts and patience must be positive")
        if not self.step > 0 or not self.tol > 0:
            raise ValueError("step and tol must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    povm: Povm
    info: float
    trace: tuple
    converged: bool
    restart: int


def derive_seed(master: int, *keys: int) -> int:
    """Independent per-item seed from a master seed and integer keys."""
    return int(np.random.SeedSequence([int(master), *map(int, keys)]).generate_state(1)[0])


def _support(src: QuantumSource, cutoff: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(src.average()))
    return v[:, w > cutoff * max(1.0, float(w[-1]))]


def _lift(elements: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Embed POVM elements on the support back into the full space."""
    full = basis @ elements @ basis.conj().T
    dim, r = basis.shape
    if r < dim:
        kernel = np.eye(dim) - basis @ basis.conj().T
        full = np.concatenate([full, hermitian_part(kernel)[None]], axis=0)
    return full


def pretty_good_measurement(src: QuantumSource) -> Povm:
    """Elements ``rho^-1/2 p_s rho_s rho^-1/2`` on the support of ``rho``.

    The projector onto the kernel of ``rho`` is appended as one extra outcome
    when the kernel is non-trivial.
    """
    basis = _support(src)
    r = inv_sqrt_psd(basis.conj().T @ src.average() @ basis)
    reduced = basis.conj().T @ src.states @ basis
    els = r @ (src.priors[:, None, None] * reduced) @ r
    return Povm(_lift(normalize_povm(els), basis), tol=POVM_TOL)


def eigenbasis_povm(src: QuantumSource) -> Povm:
    """Projective measurement in the eigenbasis of ``sum_s (s+1) p_s rho_s``.

    Distinct weights split degeneracies so that, e.g., orthogonal states are
    resolved by their own projectors.
    """
    weights = (np.arange(len(src)) + 1.0) * src.priors
    _, v = np.linalg.eigh(hermitian_part(np.einsum("s,sij->ij", weights, src.states)))
    return Povm.from_basis(v, tol=POVM_TOL)


def _probs(elements: np.ndarray, states: np.ndarray) -> np.ndarray:
    cond = np.einsum("eij,sji->se", elements, states).real
    return np.clip(cond, 0.0, None)


def _mi(priors: np.ndarray, cond: np.ndarray) -> float:
    joint = priors[:, None] * cond
    p_e = joint.sum(axis=0)
    mask = joint > 1e-15
    ratio = cond[mask] / np.broadcast_to(p_e, cond.shape)[mask]
    return max(0.0, float(np.sum(joint[mask] * np.log2(ratio))))


def _normalized_step(m: np.ndarray, max_cond: float = 1e8, psd_tol: float = 1e-11):
    """Normalize candidate elements; ``None`` if the result would be numerically unsafe."""
    w, v = np.linalg.eigh(hermitian_part(m.sum(axis=0)))
    if w[0] <= w[-1] / max_cond:
        return None
    r = (v / np.sqrt(w)) @ v.conj().T
    n = hermitian_part(r @ m @ r)
    if np.linalg.eigvalsh(n)[:, 0].min() < -psd_tol:
        return None
    return n


def _ascend(priors, states, elements, cfg: OptimizerConfig):
    """Monotone ascent ``N_e -> S^-1/2 B_e N_e B_e^dag S^-1/2`` with ``B_e = 1 + t G_e``.

    ``G_e = sum_s p_s log2(p(e|s)/p(e)) rho_s`` is the gradient of the
    information with respect to ``N_e``. Only improving steps are accepted;
    the step halves on failure and grows after success.
    """
    dim = states.shape[1]
    eye = np.eye(dim)
    cond = _probs(elements, states)
    info = _mi(priors, cond)
    trace = [info]
    t = cfg.step
    flat = 0
    for _ in range(cfg.max_iters):
        p_e = priors @ cond
        ratio = np.log2(np.maximum(cond, _TINY) / np.maximum(p_e, _TINY))
        grad = np.einsum("se,sij->eij", priors[:, None] * np.clip(ratio, -60.0, 60.0), states)
        improved = False
        while t > 1e-12:
            b = eye[None] + t * grad
            cand = _normalized_step(b @ elements @ np.conj(np.swapaxes(b, 1, 2)))
            if cand is not None:
                cand_cond = _probs(cand, states)
                cand_info = _mi(priors, cand_cond)
                if cand_info > info:
                    improved = True
                    break
            t *= 0.5
        if not improved:
            return elements, info, trace, True
        gain = cand_info - info
        elements, cond, info = cand, cand_cond, cand_info
        trace.append(info)
        t = min(4.0 * cfg.step, 2.0 * t)
        flat = flat + 1 if gain < cfg.tol * max(info, _TINY) else 0
        if flat >= cfg.patience:
            return elements, info, trace, True
    return elements, info, trace, False


def _random_start(dim: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))
    return normalize_povm(np.conj(np.swapaxes(a, 1, 2)) @ a)


def optimize_povm(src: QuantumSource, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Best measurement found over the configured restarts.

    The returned information is at least that of the pretty-good measurement
    and of the eigenbasis projectors whenever ``cfg.restarts >= 2``, since
    both are used as starting points and only improving steps are taken.
    Ties are broken by the lower restart index.
    """
    cfg = cfg or OptimizerConfig()
    basis = _support(src)
    states = hermitian_part(basis.conj().T @ src.states @ basis)
    r = basis.shape[1]
    reduced = QuantumSource(states, src.priors, tol=src.tol)

    starts = [pretty_good_measurement(reduced).elements, eigenbasis_povm(reduced).elements]
    for k in range(max(0, cfg.restarts - 2)):
        starts.append(_random_start(r, cfg.n_outcomes, derive_seed(cfg.seed, k)))
    starts = starts[:cfg.restarts]

    best = None
    for idx, start in enumerate(starts):
        els, info, trace, conv = _ascend(reduced.priors, reduced.states, np.array(start), cfg)
        if best is None or info > best[1]:
            best = (els, info, trace, conv, idx)
    els, info, trace, conv, idx = best
    povm = Povm(normalize_povm(_lift(els, basis)), tol=POVM_TOL)
    return OptimizationResult(povm, measurement_mutual_info(src, povm), tuple(trace), conv, idx)


SCAN_COLUMNS = ("dim", "probe_dim", "attack_kind", "theta", "hadamard_id", "p_err_mub",
                "corollary_bound_bits", "thm1_bound_bits", "povm_info_bits", "holevo_bits", "seed")


def evaluate_attack(attack: EveAttack, h: GeneralizedHadamard, cfg: OptimizerConfig | None = None,
                    seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    """One row of a tightness table, with all orderings checked.

    Raises
    ------
    InvariantError
        If ``optimized <= min(Holevo, trace bound) <= info-disturbance bound`` fails by
        more than ``tol``.
    """
    cfg = replace(cfg or OptimizerConfig(), seed=seed)
    kraus = extract_kraus_vectors(attack)
    src = eve_states(kraus)
    dist = disturbance(kraus, h, tol)
    corollary = mi_trace_bound_uniform(src)
    thm1 = ivd_bound(attack.sys_dim, dist.p_err_mub)
    holevo = holevo_bound(src)
    opt = optimize_povm(src, cfg).info
    if opt > min(holevo, corollary) + tol:
        raise InvariantError(f"optimized information {opt!r} exceeds Holevo {holevo!r} "
                             f"or trace-distance bound {corollary!r}")
    if corollary > thm1 + tol:
        raise InvariantError(f"trace-distance bound {corollary!r} exceeds info-disturbance bound {thm1!r}")
    return {
        "dim": attack.sys_dim, "probe_dim": attack.probe_dim, "attack_kind": attack.kind,
        "theta": attack.theta, "hadamard_id": h.name, "p_err_mub": dist.p_err_mub,
        "corollary_bound_bits": corollary, "thm1_bound_bits": thm1, "povm_info_bits": opt,
        "holevo_bits": holevo, "seed": seed,
    }


def tightness_scan(kind: str, dim: int, grid, h: GeneralizedHadamard,
                   cfg: OptimizerConfig | None = None, *, probe_dim: int | None = None,
                   basis=None, seed: int = 0, tol: float = DEFAULT_TOL) -> list[dict]:
    """Evaluate an attack family over a grid, rows sorted by ``theta``.

    ``grid`` holds theta values for ``partial_copy``; for other kinds each
    grid entry is one point whose attack seed is derived from ``seed`` and the
    point index (only ``random`` attacks consume it).
    """
    rows = []
    for idx, theta in enumerate(grid):
        point_seed = derive_seed(seed, idx)
        attack = builtin_attack(kind, dim, probe_dim,
                                theta=theta if kind == "partial_copy" else None,
                                basis=basis, seed=point_seed)
        rows.append(evaluate_attack(attack, h, cfg, point_seed, tol))
    return sorted(rows, key=lambda r: (math.inf if math.isnan(r["theta"]) else r["theta"]))
