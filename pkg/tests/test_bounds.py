import json

import numpy as np
import pytest

from mubsec.bounds import (bound_report, entropy_linear_lower, fm_bound, gen_entropy_lower,
                           inputs_digest, ivd_bound, lo_chau_bound, mi_trace_bound,
                           mi_trace_bound_uniform, mi_variational_bound, onebit_mi_bound,
                           onebit_trace_bound)
from mubsec.info import (QuantumSource, binary_entropy, holevo_bound, mutual_info_classical,
                         shannon_entropy)
from mubsec.linalg import projector, random_pure_state
from mubsec.optimizer import OptimizerConfig, optimize_povm

ORTHO = QuantumSource.uniform(np.stack([np.diag([1.0, 0]), np.diag([0, 1.0])]))
ZERO_PLUS = QuantumSource.uniform(np.stack([projector([1, 0]), projector(np.ones(2) / np.sqrt(2))]))


class TestEntropyLinear:
    def test_reference_point(self):
        assert entropy_linear_lower(0.5, 0.5) == pytest.approx(1.0)

    def test_endpoint(self):
        assert entropy_linear_lower(1.0, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_interior(self):
        v = entropy_linear_lower(0.7, 0.5)
        assert v == pytest.approx(0.6)
        assert v <= binary_entropy(0.7)

    def test_bad_reference(self):
        with pytest.raises(ValueError):
            entropy_linear_lower(0.3, 0.6)


class TestGenEntropy:
    def test_uniform_reference_tight(self):
        assert gen_entropy_lower(np.full(4, 0.25), np.full(4, 0.25)) == pytest.approx(2.0)

    def test_endpoint(self):
        assert gen_entropy_lower([1, 0], [0.5, 0.5]) == pytest.approx(0.0, abs=1e-12)

    def test_interior(self):
        p = [0.4, 0.3, 0.2, 0.1]
        v = gen_entropy_lower(p, np.full(4, 0.25))
        assert v == pytest.approx(1.2)
        assert shannon_entropy(p) == pytest.approx(1.84644, abs=1e-4)

    def test_large_reference_names_index(self):
        with pytest.raises(ValueError, match="index 0"):
            gen_entropy_lower([0.5, 0.5], [0.7, 0.3])


class TestVariational:
    def test_identical_rows(self):
        assert mi_variational_bound([0.5, 0.5], [[0.3, 0.7], [0.3, 0.7]]) == pytest.approx(0.0)

    def test_two_state_perfect(self):
        # each row deviates from the output marginal by 1 in total, weight 1/2 each
        assert mi_variational_bound([0.5, 0.5], np.eye(2)) == pytest.approx(1.0)

    def test_four_state_permutation(self):
        bound = mi_variational_bound(np.full(4, 0.25), np.eye(4))
        assert bound == pytest.approx(3.0)
        assert mutual_info_classical(np.eye(4) / 4) == pytest.approx(2.0)

    def test_large_prior_rejected(self):
        with pytest.raises(ValueError):
            mi_variational_bound([0.75, 0.25], np.eye(2))


class TestTraceBounds:
    def test_identical_states(self):
        src = QuantumSource.uniform(np.stack([np.eye(2) / 2] * 2))
        assert mi_trace_bound(src) == pytest.approx(0.0, abs=1e-12)
        assert mi_trace_bound_uniform(src) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_tight(self):
        assert mi_trace_bound(ORTHO) == pytest.approx(1.0)
        assert mi_trace_bound_uniform(ORTHO) == pytest.approx(1.0)

    def test_random_pure_dominates_optimizer(self):
        states = np.stack([projector(random_pure_state(3, s)) for s in range(4)])
        src = QuantumSource.uniform(states)
        best = optimize_povm(src, OptimizerConfig(max_iters=50)).info
        assert mi_trace_bound_uniform(src) >= best
        assert mi_trace_bound(src) == pytest.approx(mi_trace_bound_uniform(src))

    def test_uniform_requires_uniform(self):
        src = QuantumSource(ORTHO.states, [0.4, 0.6])
        with pytest.raises(ValueError):
            mi_trace_bound_uniform(src)

    def test_large_prior_hint(self):
        src = QuantumSource(ORTHO.states, [0.75, 0.25])
        with pytest.raises(ValueError, match="onebit"):
            mi_trace_bound(src)


class TestOneBit:
    def test_identical_rows(self):
        assert onebit_mi_bound([0.5, 0.5], [[1, 0], [1, 0]]) == 0.0

    def test_uniform_perfect(self):
        assert onebit_mi_bound([0.5, 0.5], np.eye(2)) == pytest.approx(1.0)

    def test_skewed(self):
        bound = onebit_mi_bound([0.75, 0.25], np.eye(2))
        assert bound == pytest.approx(1.21692, abs=1e-4)
        assert mutual_info_classical(np.diag([0.75, 0.25])) == pytest.approx(0.81128, abs=1e-4)

    def test_label_order(self):
        with pytest.raises(ValueError):
            onebit_mi_bound([0.25, 0.75], np.eye(2))

    def test_trace_forms(self):
        assert onebit_trace_bound(QuantumSource.uniform(np.stack([np.eye(2) / 2] * 2))) == (0.0, 0.0)
        labeled, _ = onebit_trace_bound(ORTHO)
        assert labeled == pytest.approx(1.0)
        _, corollary = onebit_trace_bound(ZERO_PLUS)
        assert corollary == pytest.approx(np.sqrt(2))
        assert corollary >= holevo_bound(ZERO_PLUS)


class TestClosedForms:
    def test_ivd(self):
        assert ivd_bound(3, 0.0) == 0.0
        assert ivd_bound(2, 0.5) == pytest.approx(2 * np.sqrt(2))
        assert ivd_bound(4, 0.01) == pytest.approx(0.8)

    def test_fm(self):
        assert fm_bound(0.0, 0.3) == 0.0
        assert fm_bound(1.0, 0.5) == pytest.approx(ivd_bound(2, 0.5))
        assert fm_bound(0.81128, 0.04) == pytest.approx(0.649024, abs=1e-4)

    def test_lo_chau(self):
        # -(1-d)log(1-d) - d log(d/3) at d = 1e-4
        assert lo_chau_bound(1e-4, 1) == pytest.approx(1.6315e-3, abs=1e-6)
        assert lo_chau_bound(1e-5, 1) < 1e-3
        vals = [lo_chau_bound(d, 1) for d in (1e-2, 1e-4, 1e-6, 1e-8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert lo_chau_bound(0.5, 1) == pytest.approx(1.79248, abs=1e-4)

    @pytest.mark.parametrize("bad", [-0.1, 1.5])
    def test_probability_domain(self, bad):
        with pytest.raises(ValueError):
            ivd_bound(2, bad)


class TestReport:
    def test_slack_and_json(self):
        rep = bound_report("ivd", 1.0, 0.25, inputs=(np.eye(2), 3))
        assert rep.slack == pytest.approx(0.75)
        assert json.loads(rep.to_json())["bound_name"] == "ivd"

    def test_violation_rejected(self):
        with pytest.raises(ValueError):
            bound_report("x", 0.1, 0.5)

    def test_digest_stable(self):
        assert inputs_digest(np.arange(3)) == inputs_digest([0, 1, 2])
        assert inputs_digest(np.arange(3)) != inputs_digest(np.arange(4))
