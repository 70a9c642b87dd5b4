"""Named numerical invariant suites.

Every suite produces an array of *slacks*: non-negative when the checked
inequality holds, and ``-|deviation|`` for identities. A suite passes when its
worst slack is at least ``-threshold``, where the threshold is the smaller of
the suite's own tolerance and the caller's ``tol``.

Sample sizes scale with ``trials``; ``trials=200`` gives the reference sizes
(200 attacks per dimension, 500 random pairs, 10^4 entropy instances).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .attack import (_p0_quadruple_sum, bob_channel, build_purification, builtin_attack,
                     disturbance, eve_states, extract_kraus_vectors, hadamard_group)
from .bounds import (entropy_linear_lower, fm_bound, gen_entropy_lower, ivd_bound,
                     mi_trace_bound, mi_trace_bound_uniform, mi_variational_bound,
                     onebit_trace_bound)
from .fm import FunctionSpec, GroupLaw, check_theorem2, sigma_states
from .info import (QuantumSource, binary_entropy, conditional_probs, holevo_bound,
                   measurement_mutual_info, shannon_entropy, von_neumann_entropy)
from .linalg import (Povm, mixed_pure_bound, partial_trace, projector,
                     pure_trace_distance, random_density, random_haar_unitary,
                     random_pure_state, random_povm, trace_norm)
from .mub import (certified_hadamards, fourier_matrix, group_hadamard_deviation, group_ops,
                  is_mub_pair, prime_mub_set, sylvester_hadamard)
from .optimizer import OptimizerConfig, derive_seed, optimize_povm

DEFAULT_DIMS = (2, 3, 4, 5, 8)
REFERENCE_TRIALS = 200
SUITE_OPTIMIZER = OptimizerConfig(max_iters=15, restarts=2)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst_slack: float | None
    threshold: float
    n_checks: int
    error: str | None = None
    runtime: float = field(default=0.0, compare=False)

    def to_dict(self, timings: bool = False) -> dict:
        d = {"name": self.name, "passed": self.passed, "worst_slack": self.worst_slack,
             "threshold": self.threshold, "n_checks": self.n_checks, "error": self.error}
        if timings:
            d["runtime_s"] = self.runtime
        return d


class Context:
    """Shared random instances so that attack-based suites reuse one sample."""

    def __init__(self, dims, trials: int, seed: int):
        self.dims = tuple(int(d) for d in dims)
        self.trials = int(trials)
        self.seed = int(seed)
        self._attacks: dict = {}
        self._opt: dict = {}

    def count(self, reference: int) -> int:
        return max(1, math.ceil(reference * self.trials / REFERENCE_TRIALS))

    def rng(self, *keys: int) -> np.random.Generator:
        return np.random.default_rng(derive_seed(self.seed, *keys))

    def attacks(self, dim: int):
        if dim not in self._attacks:
            self._attacks[dim] = [
                extract_kraus_vectors(builtin_attack("random", dim, seed=derive_seed(self.seed, dim, t)))
                for t in range(self.trials)]
        return self._attacks[dim]

    def optimized(self, dim: int, t: int) -> float:
        if (dim, t) not in self._opt:
            cfg = OptimizerConfig(max_iters=SUITE_OPTIMIZER.max_iters, restarts=SUITE_OPTIMIZER.restarts,
                                  seed=derive_seed(self.seed, dim, t, 1))
            self._opt[(dim, t)] = optimize_povm(eve_states(self.attacks(dim)[t]), cfg).info
        return self._opt[(dim, t)]


def _rand_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


def _small_priors(rng, n):
    """Dirichlet sample with every entry at most 1/2 (uniform when n = 2)."""
    if n == 2:
        return np.array([0.5, 0.5])
    while True:
        p = rng.dirichlet(np.ones(n))
        if p.max() <= 0.5:
            return p


def _random_source(rng, dim, n, small_priors=False):
    ranks = rng.integers(1, dim + 1, n)
    states = [random_density(dim, int(r), seed=rng) for r in ranks]
    priors = _small_priors(rng, n) if small_priors else rng.dirichlet(np.ones(n))
    return QuantumSource(np.stack(states), priors)


# linear algebra

def _trace_norm_tests(ctx):
    rng = ctx.rng(1)
    out = []
    for _ in range(ctx.count(200)):
        dim = int(rng.integers(1, 5))
        a = _rand_hermitian(rng, dim)
        tn = trace_norm(a)
        w, v = np.linalg.eigh(a)
        p = v[:, w > 0] @ v[:, w > 0].conj().T
        best = abs(np.trace(p @ a).real) + abs(np.trace((np.eye(dim) - p) @ a).real)
        out.append(-abs(tn - best))
        u = random_haar_unitary(dim, rng)
        cut = int(rng.integers(0, dim + 1))
        q = u[:, :cut] @ u[:, :cut].conj().T
        other = abs(np.trace(q @ a).real) + abs(np.trace((np.eye(dim) - q) @ a).real)
        out.append(tn - other)
    return out


def _partial_trace_monotone(ctx):
    rng = ctx.rng(2)
    out = []
    for _ in range(ctx.count(500)):
        while True:
            d1, d2 = (int(x) for x in rng.integers(1, 9, 2))
            if d1 * d2 <= 16:
                break
        rho, sigma = random_density(d1 * d2, seed=rng), random_density(d1 * d2, seed=rng)
        keep = int(rng.integers(0, 2))
        diff = partial_trace(rho, (d1, d2), keep) - partial_trace(sigma, (d1, d2), keep)
        out.append(trace_norm(rho - sigma) - trace_norm(diff))
    return out


def _pure_distance(ctx):
    rng = ctx.rng(3)
    out = []
    for _ in range(ctx.count(500)):
        dim = int(rng.integers(2, 9))
        psi, phi = random_pure_state(dim, rng), random_pure_state(dim, rng)
        out.append(-abs(pure_trace_distance(psi, phi) - trace_norm(projector(psi) - projector(phi))))
    return out


def _mixed_pure(ctx):
    rng = ctx.rng(4)
    out = []
    for _ in range(ctx.count(500)):
        dim = int(rng.integers(2, 9))
        rho = random_density(dim, int(rng.integers(1, dim + 1)), seed=rng)
        psi = random_pure_state(dim, rng)
        out.append(mixed_pure_bound(rho, psi) - trace_norm(rho - projector(psi)))
    return out


# information measures

def _holevo_pairs(ctx, key):
    rng = ctx.rng(key)
    for _ in range(ctx.count(500)):
        dim = int(rng.integers(1, 5))
        src = _random_source(rng, dim, int(rng.integers(1, 5)))
        yield src, random_povm(dim, int(rng.integers(1, 9)), seed=rng)


def _holevo_dominance(ctx):
    return [holevo_bound(s) - measurement_mutual_info(s, m) for s, m in _holevo_pairs(ctx, 5)]


def _entropy_cap(ctx):
    return [shannon_entropy(s.priors) - measurement_mutual_info(s, m) for s, m in _holevo_pairs(ctx, 6)]


def _unitary_invariance(ctx):
    rng = ctx.rng(7)
    out = []
    for _ in range(ctx.count(500)):
        dim = int(rng.integers(1, 9))
        rho = random_density(dim, int(rng.integers(1, dim + 1)), seed=rng)
        u = random_haar_unitary(dim, rng)
        out.append(-abs(von_neumann_entropy(u @ rho @ u.conj().T) - von_neumann_entropy(rho)))
    return out


def _concavity(ctx):
    rng = ctx.rng(8)
    out = []
    for _ in range(ctx.count(500)):
        n = int(rng.integers(2, 9))
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        lam = rng.uniform()
        mix = shannon_entropy(lam * p + (1 - lam) * q)
        out.append(mix - lam * shannon_entropy(p) - (1 - lam) * shannon_entropy(q))
    return out


# bounds

def _entropy_linear(ctx):
    rng = ctx.rng(9)
    out = []
    for _ in range(ctx.count(10_000)):
        p, p_ref = rng.uniform(), rng.uniform(1e-6, 0.5)
        out.append(binary_entropy(p) - entropy_linear_lower(p, p_ref))
    return out


def _gen_entropy(ctx):
    rng = ctx.rng(10)
    out = []
    for _ in range(ctx.count(10_000)):
        n = int(rng.integers(2, 7))
        p_ref = _small_priors(rng, n)
        p = rng.dirichlet(np.ones(n))
        out.append(shannon_entropy(p) - gen_entropy_lower(p, p_ref))
    return out


def _reference_equality(ctx):
    rng = ctx.rng(11)
    out = []
    for _ in range(ctx.count(1000)):
        p_ref = rng.uniform(1e-6, 0.5)
        out.append(-abs(entropy_linear_lower(p_ref, p_ref) - binary_entropy(p_ref)))
        q = _small_priors(rng, int(rng.integers(2, 7)))
        out.append(-abs(gen_entropy_lower(q, q) - shannon_entropy(q)))
    return out


def _variational_chain(ctx):
    rng = ctx.rng(12)
    out = []
    for _ in range(ctx.count(500)):
        dim = int(rng.integers(2, 5))
        src = _random_source(rng, dim, int(rng.integers(2, 5)), small_priors=True)
        povm = random_povm(dim, int(rng.integers(2, 9)), seed=rng)
        cond = conditional_probs(src, povm)
        var = mi_variational_bound(src.priors, cond)
        out.append(var - measurement_mutual_info(src, povm))
        out.append(mi_trace_bound(src) - var)
    return out


def _tight_examples(ctx):
    orth = QuantumSource.uniform(np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    exact = measurement_mutual_info(orth, Povm.computational(2))
    labeled, _ = onebit_trace_bound(orth)
    out = [-abs(mi_trace_bound_uniform(orth) - exact), -abs(labeled - exact),
           -abs(mi_trace_bound(orth) - exact)]
    same = QuantumSource.uniform(np.stack([np.eye(2) / 2] * 3))
    out.append(-abs(mi_trace_bound_uniform(same)))
    out.append(-abs(ivd_bound(4, 0.0)))
    return out


# mutually unbiased bases

def _fourier_pairs(ctx):
    return [-is_mub_pair(np.eye(d), fourier_matrix(d).matrix)[1] for d in range(2, 17)]


def _prime_sets(ctx):
    out = []
    for p in (2, 3, 5, 7, 11):
        mubs = prime_mub_set(p)
        out.append(0.0 if len(mubs) == p + 1 else -math.inf)
        out.append(-mubs.max_deviation)
    return out


def _group_hadamards(ctx):
    out = [-group_hadamard_deviation(fourier_matrix(d), "cyclic") for d in range(2, 17)]
    out += [-group_hadamard_deviation(sylvester_hadamard(n), "xor") for n in range(1, 5)]
    return out


# attacks

def _attack_unitarity(ctx):
    out = []
    for d in ctx.dims:
        for k in ctx.attacks(d):
            out.append(-float(np.max(np.abs(bob_channel(k).sum(axis=1) - 1.0))))
    return out


def _p0_routes(ctx):
    out = []
    for d in ctx.dims:
        for k in ctx.attacks(d):
            for h in certified_hadamards(d):
                direct = float(np.mean(np.diag(bob_channel(k, h))))
                out.append(-abs(_p0_quadruple_sum(k, h.matrix) - direct))
    return out


def _purification(ctx):
    out = []
    for d in ctx.dims:
        for k in ctx.attacks(d):
            rhos = eve_states(k).states
            for h in certified_hadamards(d):
                b = build_purification(k, h, tol=math.inf)
                for i in range(d):
                    red = partial_trace(projector(b.phi[i]), (k.probe_dim, d), keep=0)
                    out.append(-float(np.max(np.abs(red - rhos[i]))))
                norm0 = float(np.real(np.vdot(b.phi_tilde[0], b.phi_tilde[0])))
                out.append(-abs(norm0 - d * _p0_quadruple_sum(k, h.matrix)))
    return out


def _error_spectrum(ctx):
    out = []
    for d in ctx.dims:
        for k in ctx.attacks(d):
            for h in certified_hadamards(d):
                group = hadamard_group(h)
                if group is None:
                    continue
                b = build_purification(k, h, tol=math.inf)
                spectrum = np.real(np.einsum("ea,ea->e", b.phi_tilde.conj(), b.phi_tilde)) / d
                add, _ = group_ops(group, d)
                chan = bob_channel(k, h)
                i = np.arange(d)
                direct = np.array([chan[i, add(i, e)].mean() for e in range(d)])
                out.append(-float(np.max(np.abs(spectrum - direct))))
    return out


def _info_disturbance_chain(ctx):
    out = []
    for d in ctx.dims:
        for t, k in enumerate(ctx.attacks(d)):
            src = eve_states(k)
            corollary = mi_trace_bound_uniform(src)
            out.append(corollary - ctx.optimized(d, t))
            for h in certified_hadamards(d):
                out.append(ivd_bound(d, disturbance(k, h, tol=math.inf).p_err_mub) - corollary)
    return out


# optimizer

def _optimizer_sources(ctx, key):
    rng = ctx.rng(key)
    for j in range(ctx.count(50)):
        dim = int(rng.integers(2, 5))
        yield j, _random_source(rng, dim, int(rng.integers(2, 5)))


def _optimizer_validity(ctx):
    out = []
    for j, src in _optimizer_sources(ctx, 13):
        res = optimize_povm(src, OptimizerConfig(max_iters=50, seed=j))
        els = res.povm.elements
        out.append(float(min(np.linalg.eigvalsh(e)[0] for e in els)))
        out.append(-float(np.max(np.abs(els.sum(axis=0) - np.eye(src.dim)))))
        out.append(-max(0.0, -float(np.min(np.diff(res.trace))) if len(res.trace) > 1 else 0.0))
    return out


def _optimizer_holevo(ctx):
    out = []
    for j, src in _optimizer_sources(ctx, 14):
        cfg = OptimizerConfig(max_iters=50, seed=j)
        res = optimize_povm(src, cfg)
        out.append(holevo_bound(src) - res.info)
        out.append(-abs(optimize_povm(src, cfg).info - res.info))
    return out


# function of the message

def _random_function(rng, dim):
    kinds = ["cyclic"] + (["xor"] if not dim & (dim - 1) else [])
    g = GroupLaw(kinds[int(rng.integers(len(kinds)))], dim)
    return FunctionSpec(tuple(int(v) for v in rng.integers(0, dim, dim))), g


def _fm_averaging(ctx):
    out = []
    for d in ctx.dims:
        rng = ctx.rng(15, d)
        for k in ctx.attacks(d)[:ctx.count(20)]:
            eve = eve_states(k)
            rho = eve.average()
            f, g = _random_function(rng, d)
            per_a = [sigma_states(eve, f, a, g) for a in range(d)]
            ref_q = [q for q, _ in per_a[0]]
            for pairs in per_a:
                out.append(0.0 if [q for q, _ in pairs] == ref_q else -math.inf)
                mix = sum(q * s for q, s in pairs)
                out.append(-float(np.max(np.abs(mix - rho))))
            for i in range(len(ref_q)):
                avg = sum(per_a[a][i][1] for a in range(d)) / d
                out.append(-float(np.max(np.abs(avg - rho))))
    return out


def _fm_dims(ctx):
    return [d for d in ctx.dims if d <= 4]


def _fm_function_bound(ctx):
    out = []
    for d in _fm_dims(ctx):
        rng = ctx.rng(16, d)
        h = certified_hadamards(d)[0]
        for t, k in enumerate(ctx.attacks(d)):
            f, g = _random_function(rng, d)
            cfg = OptimizerConfig(max_iters=SUITE_OPTIMIZER.max_iters,
                                  restarts=SUITE_OPTIMIZER.restarts, seed=derive_seed(ctx.seed, d, t, 2))
            rep = check_theorem2(k, h, f, g, cfg=cfg, tol=math.inf)
            out.append(rep.bound - rep.exact_cond_info)
    return out


def _fm_identity(ctx):
    out = []
    for d in ctx.dims:
        for k in ctx.attacks(d)[:ctx.count(20)]:
            for h in certified_hadamards(d):
                p = disturbance(k, h, tol=math.inf).p_err_mub
                out.append(-abs(fm_bound(math.log2(d), p) - ivd_bound(d, p)))
    return out


SUITES: dict[str, tuple[float, Callable]] = {
    "linalg.trace_norm_tests": (1e-8, _trace_norm_tests),
    "linalg.partial_trace_monotone": (1e-9, _partial_trace_monotone),
    "linalg.pure_distance": (1e-10, _pure_distance),
    "linalg.mixed_pure_bound": (1e-9, _mixed_pure),
    "info.holevo_dominance": (1e-9, _holevo_dominance),
    "info.entropy_cap": (1e-9, _entropy_cap),
    "info.unitary_invariance": (1e-9, _unitary_invariance),
    "info.concavity": (1e-9, _concavity),
    "bounds.entropy_linear_lower": (1e-12, _entropy_linear),
    "bounds.gen_entropy_lower": (1e-12, _gen_entropy),
    "bounds.reference_equality": (1e-12, _reference_equality),
    "bounds.variational_chain": (1e-9, _variational_chain),
    "bounds.tight_examples": (1e-9, _tight_examples),
    "mub.fourier_pairs": (1e-10, _fourier_pairs),
    "mub.prime_sets": (1e-10, _prime_sets),
    "mub.group_hadamards": (1e-10, _group_hadamards),
    "attack.unitarity": (1e-9, _attack_unitarity),
    "attack.p0_two_routes": (1e-9, _p0_routes),
    "attack.purification": (1e-9, _purification),
    "attack.error_spectrum": (1e-9, _error_spectrum),
    "attack.info_disturbance_chain": (1e-9, _info_disturbance_chain),
    "optimizer.validity": (1e-8, _optimizer_validity),
    "optimizer.holevo_and_determinism": (1e-6, _optimizer_holevo),
    "fm.averaging": (1e-9, _fm_averaging),
    "fm.function_bound": (1e-9, _fm_function_bound),
    "fm.identity_consistency": (1e-12, _fm_identity),
}


def run_suite(name: str, ctx: Context, tol: float | None = None) -> SuiteResult:
    """Run one suite; exceptions are reported as failures rather than raised.

    ``tol`` caps the suite's own threshold; ``None`` keeps it.
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    default, fn = SUITES[name]
    threshold = default if tol is None else min(default, tol)
    start = time.perf_counter()
    try:
        slacks = np.asarray(fn(ctx), dtype=float)
    except Exception as exc:  # noqa: BLE001 - any fault fails the suite
        return SuiteResult(name, False, None, threshold, 0, f"{type(exc).__name__}: {exc}",
                           time.perf_counter() - start)
    worst = float(slacks.min()) if slacks.size else 0.0
    passed = bool(slacks.size) and worst >= -threshold
    return SuiteResult(name, passed, worst, threshold, int(slacks.size), None,
                       time.perf_counter() - start)


def run_suites(names=None, dims=DEFAULT_DIMS, trials: int = REFERENCE_TRIALS, seed: int = 1,
               tol: float | None = None, progress: Callable | None = None) -> list[SuiteResult]:
    ctx = Context(dims, trials, seed)
    results = []
    for name in (names or list(SUITES)):
        res = run_suite(name, ctx, tol)
        if progress:
            progress(res)
        results.append(res)
    return results
