"""Acceptance criteria 1-10, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""
import math
import time

import numpy as np
import pytest

from mubsec.attack import build_purification, builtin_attack, disturbance, eve_states, extract_kraus_vectors
from mubsec.bounds import ivd_bound, lo_chau_bound, mi_trace_bound_uniform
from mubsec.cli import main
from mubsec.info import holevo_bound
from mubsec.linalg import Povm
from mubsec.mub import fourier_matrix, is_group_hadamard, prime_mub_set, sylvester_hadamard
from mubsec.optimizer import OptimizerConfig, optimize_povm
from mubsec.fm import FunctionSpec, indicator_info_profile, function_entropy
from mubsec.verify import Context, run_suite

DIMS = (2, 3, 4, 5, 8)
TRIALS = 200
SEED = 1


@pytest.fixture(scope="module")
def ctx():
    return Context(DIMS, TRIALS, SEED)


def _check(name, ctx, tol):
    res = run_suite(name, ctx, tol)
    assert res.error is None, res.error
    assert res.n_checks > 0
    assert res.worst_slack >= -tol, f"{name}: worst slack {res.worst_slack!r}"
    return res


@pytest.mark.criterion(1, "optimized info <= trace-distance bound <= 4 log2(D) sqrt(P_err), 200 attacks per D")
def test_c01_info_disturbance_chain(ctx):
    start = time.perf_counter()
    res = _check("attack.info_disturbance_chain", ctx, 1e-9)
    assert res.n_checks == TRIALS * sum(1 + (d if d in (2, 3, 5) else 2) for d in DIMS)
    assert time.perf_counter() - start < 600


@pytest.mark.criterion(2, "purification reduces to Eve's states, <~phi0|~phi0> = D P0, error spectrum")
def test_c02_purification(ctx):
    _check("attack.purification", ctx, 1e-9)
    _check("attack.error_spectrum", ctx, 1e-9)


@pytest.mark.criterion(3, "quadruple-sum P0 agrees with the channel-diagonal average")
def test_c03_two_route_p0(ctx):
    _check("attack.p0_two_routes", ctx, 1e-9)


@pytest.mark.criterion(4, "I(f(M);E|A) <= H(f(K)) 4 sqrt(P_err); identity-f bound equals the basic bound")
def test_c04_function_bound(ctx):
    res = _check("fm.function_bound", ctx, 1e-9)
    assert res.n_checks == TRIALS * 3
    _check("fm.identity_consistency", ctx, 1e-12)


@pytest.mark.criterion(5, "entropy lower bounds, partial-trace monotonicity, distance formulas")
def test_c05_inequality_suites(ctx):
    assert _check("bounds.entropy_linear_lower", ctx, 1e-12).n_checks == 10_000
    assert _check("bounds.gen_entropy_lower", ctx, 1e-12).n_checks == 10_000
    _check("bounds.reference_equality", ctx, 1e-12)
    assert _check("linalg.partial_trace_monotone", ctx, 1e-9).n_checks == 500
    assert _check("linalg.pure_distance", ctx, 1e-10).n_checks == 500
    assert _check("linalg.mixed_pure_bound", ctx, 1e-9).n_checks == 500


@pytest.mark.criterion(6, "measured info <= Holevo on 500 pairs; Lo-Chau value at (1/2, 1)")
def test_c06_holevo_and_lo_chau(ctx):
    assert _check("info.holevo_dominance", ctx, 1e-9).n_checks == 500
    assert lo_chau_bound(0.5, 1) == pytest.approx(1.79248, abs=1e-4)


@pytest.mark.criterion(7, "identity and basis-copy attacks give the hand-computed figures")
def test_c07_canonical_attacks():
    for d in (2, 3, 4):
        k = extract_kraus_vectors(builtin_attack("identity", d))
        src = eve_states(k)
        for h in [fourier_matrix(d)] + ([sylvester_hadamard(d.bit_length() - 1)] if d != 3 else []):
            p = disturbance(k, h).p_err_mub
            assert abs(p) <= 1e-9
            assert abs(ivd_bound(d, p)) <= 1e-9
        assert abs(mi_trace_bound_uniform(src)) <= 1e-9
        assert abs(holevo_bound(src)) <= 1e-9
        assert abs(optimize_povm(src).info) <= 1e-9

    k = extract_kraus_vectors(builtin_attack("basis_copy", 2))
    p = disturbance(k, fourier_matrix(2)).p_err_mub
    assert abs(mi_trace_bound_uniform(eve_states(k)) - 1.0) <= 1e-9
    assert abs(p - 0.5) <= 1e-12
    assert abs(ivd_bound(2, p) - 2.828427) <= 1e-6


@pytest.mark.criterion(8, "prime MUB sets certified; Fourier and Sylvester are group Hadamards")
def test_c08_mub_certification():
    for p in (2, 3, 5, 7, 11):
        mubs = prime_mub_set(p)
        assert len(mubs) == p + 1
        assert mubs.max_deviation < 1e-10
    for d in range(2, 17):
        assert is_group_hadamard(fourier_matrix(d), "cyclic")
    for n in range(1, 5):
        assert is_group_hadamard(sylvester_hadamard(n), "xor")


@pytest.mark.criterion(9, "indicator on D=4: H(f(M)) = 0.81128, I(f(M);M) = H(f(M))")
def test_c09_indicator_profile():
    _, h_f, info = indicator_info_profile(4)
    assert h_f == pytest.approx(0.81128, abs=1e-4)
    assert info == h_f
    assert function_entropy(FunctionSpec.indicator(4)) == pytest.approx(h_f, abs=1e-12)


@pytest.mark.criterion(10, "verify and scan outputs are byte-identical across runs")
def test_c10_determinism(tmp_path):
    outs = []
    for run in range(2):
        v = tmp_path / f"verify{run}.json"
        s = tmp_path / f"scan{run}.csv"
        assert main(["verify", "--trials", "2", "--seed", "5", "--out", str(v)]) == 0
        assert main(["scan", "--dim", "3", "--seed", "5", "--out", str(s)]) == 0
        outs.append((v.read_bytes(), s.read_bytes()))
    assert outs[0] == outs[1]
