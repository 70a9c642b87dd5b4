import numpy as np
import pytest

from mubsec.info import (QuantumSource, as_prob_vector, binary_entropy, conditional_probs,
                         holevo_bound, measurement_mutual_info, mutual_info_classical,
                         shannon_entropy, von_neumann_entropy)
from mubsec.linalg import Povm, projector

KET0 = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
ZERO_PLUS = QuantumSource.uniform(np.stack([projector(KET0), projector(PLUS)]))
ORTHO = QuantumSource.uniform(np.stack([np.diag([1.0, 0]), np.diag([0, 1.0])]))


@pytest.mark.parametrize("p, expected", [((1, 0), 0.0), ((0.5, 0.5), 1.0), ((0.7, 0.3), 0.88129)])
def test_shannon(p, expected):
    assert shannon_entropy(p) == pytest.approx(expected, abs=1e-4)


def test_binary_entropy_matches_shannon():
    assert binary_entropy(0.25) == pytest.approx(shannon_entropy([0.25, 0.75]))
    assert binary_entropy(0.0) == 0.0


def test_prob_vector_errors():
    with pytest.raises(ValueError):
        as_prob_vector([0.5, 0.6])
    with pytest.raises(ValueError):
        as_prob_vector([1.2, -0.2])


class TestVonNeumann:
    def test_pure(self):
        assert von_neumann_entropy(projector(PLUS)) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)

    def test_zero_plus_mixture(self):
        assert von_neumann_entropy(ZERO_PLUS.average()) == pytest.approx(0.60088, abs=1e-4)


class TestMeasurementInfo:
    def test_orthogonal(self):
        assert measurement_mutual_info(ORTHO, Povm.computational(2)) == pytest.approx(1.0)

    def test_uninformative(self):
        povm = Povm(np.stack([np.eye(2) / 2, np.eye(2) / 2]))
        assert measurement_mutual_info(ZERO_PLUS, povm) == pytest.approx(0.0, abs=1e-12)

    def test_zero_plus_computational(self):
        # joint table [[1/2, 0], [1/4, 1/4]]: I = h(1/4) - 1/2
        assert measurement_mutual_info(ZERO_PLUS, Povm.computational(2)) == pytest.approx(0.31128, abs=1e-4)

    def test_conditional_rows(self):
        cond = conditional_probs(ZERO_PLUS, Povm.computational(2))
        assert np.allclose(cond, [[1, 0], [0.5, 0.5]])

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            measurement_mutual_info(ORTHO, Povm.computational(3))


class TestHolevo:
    def test_identical(self):
        src = QuantumSource.uniform(np.stack([np.eye(2) / 2] * 3))
        assert holevo_bound(src) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal(self):
        assert holevo_bound(ORTHO) == pytest.approx(1.0)

    def test_zero_plus(self):
        assert holevo_bound(ZERO_PLUS) == pytest.approx(0.60088, abs=1e-4)


class TestClassicalMI:
    def test_product(self):
        assert mutual_info_classical(np.outer([0.3, 0.7], [0.6, 0.4])) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal(self):
        assert mutual_info_classical(np.eye(2) / 2) == pytest.approx(1.0)

    def test_noisy(self):
        assert mutual_info_classical([[0.35, 0.15], [0.15, 0.35]]) == pytest.approx(0.11871, abs=1e-4)


class TestSource:
    def test_prior_mismatch(self):
        with pytest.raises(ValueError):
            QuantumSource(np.stack([np.eye(2) / 2]), [0.5, 0.5])

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            QuantumSource.uniform(np.stack([np.eye(2)]))
