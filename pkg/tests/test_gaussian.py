import math

import numpy as np
import pytest

from slicegauss import (CosLinear, GaussBump, OrthonormalFamily,
                        RankTooHighForQuadrature, SequenceVector,
                        UnsupportedClosedForm, covariance_from_family,
                        gaussian_expectation, gaussian_sample,
                        marginal_covariance)
from slicegauss.gaussian import GaussianSpec
from slicegauss.integrands import AffineCombination, Product, TanhPoly
from conftest import explicit_family, random_orthonormal_columns


def one_d_gaussian_oracle(h, mean=0.0, var=1.0, nodes=2_000_001, span=40.0):
    """Trapezoid integral of h against a 1-D normal density."""
    x = np.linspace(mean - span, mean + span, nodes)
    density = np.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    return float(np.trapezoid(h(x) * density, x))


class TestCovarianceFromFamily:
    def test_axis_vector(self):
        fam = explicit_family(np.eye(2)[:, :1])
        spec = covariance_from_family(fam, 2, [0.0])
        np.testing.assert_allclose(spec.mean, [0.0, 0.0])
        np.testing.assert_allclose(spec.covariance, np.diag([0.0, 1.0]), atol=1e-14)
        assert spec.rank == 1

    def test_unit_vector_full_truncation(self):
        fam = explicit_family(np.array([[0.6], [0.8]]))
        spec = covariance_from_family(fam, 2, [1.0])
        np.testing.assert_allclose(spec.mean, [0.6, 0.8])
        np.testing.assert_allclose(
            spec.covariance, [[0.64, -0.48], [-0.48, 0.36]], atol=1e-14)

    def test_zero_truncation_contributes_nothing(self):
        fam = OrthonormalFamily([SequenceVector.explicit([0.0, 1.0])])
        spec = covariance_from_family(fam, 1, [0.0])
        np.testing.assert_allclose(spec.covariance, [[1.0]])

    def test_psd_on_random_families(self):
        for trial in range(100):
            gamma = 1 + trial % 5
            m = gamma + 1 + trial % 6
            q = random_orthonormal_columns(m, gamma, 900 + trial)
            fam = explicit_family(q)
            k = 1 + trial % 10
            spec = covariance_from_family(fam, k, np.zeros(gamma))
            assert np.linalg.eigvalsh(spec.covariance).min() >= -1e-10


class TestMarginalCovariance:
    def test_projection_orthogonal_to_block(self):
        sigma = np.eye(3)
        sigma[2, 2] = 0.0
        np.testing.assert_allclose(marginal_covariance(sigma, 2), np.eye(2))

    def test_rank_one_entrywise_oracle(self):
        a, b = 0.6, 0.8
        sigma = np.eye(2) - np.outer([a, b], [a, b])
        np.testing.assert_allclose(marginal_covariance(sigma, 1),
                                   [[1 - a * a]], atol=1e-15)

    def test_full_marginal_is_identity_map(self):
        q = random_orthonormal_columns(5, 2, 17)
        sigma = np.eye(5) - q @ q.T
        np.testing.assert_array_equal(marginal_covariance(sigma, 5), sigma)

    def test_matches_family_construction(self):
        for trial in range(30):
            gamma = 1 + trial % 3
            m = gamma + 2 + trial % 5
            q = random_orthonormal_columns(m, gamma, 7000 + trial)
            fam = explicit_family(q)
            sigma = np.eye(m) - q @ q.T
            for k in (1, max(1, m // 2), m):
                block = marginal_covariance(sigma, k)
                direct = covariance_from_family(fam, k, np.zeros(gamma)).covariance
                assert np.max(np.abs(block - direct)) <= 1e-12


class TestGaussianSample:
    def test_rank_zero_is_point_mass(self):
        spec = GaussianSpec(mean=np.array([2.0, -1.0]), covariance=np.zeros((2, 2)))
        x = gaussian_sample(spec, 50, seed=3)
        assert np.all(x == np.array([2.0, -1.0]))

    def test_degenerate_direction_and_variance(self):
        spec = GaussianSpec(mean=np.zeros(2), covariance=np.diag([0.0, 1.0]))
        x = gaussian_sample(spec, 10 ** 5, seed=11)
        assert np.all(x[:, 0] == 0.0)
        assert np.var(x[:, 1]) == pytest.approx(1.0, abs=0.02)

    def test_seed_determinism(self):
        spec = GaussianSpec(mean=np.zeros(3), covariance=np.eye(3))
        a = gaussian_sample(spec, 100, seed=99)
        b = gaussian_sample(spec, 100, seed=99)
        np.testing.assert_array_equal(a, b)

    def test_stream_partitioning(self):
        spec = GaussianSpec(mean=np.zeros(3), covariance=np.eye(3))
        whole = gaussian_sample(spec, 100, seed=99)
        part = gaussian_sample(spec, 60, seed=99, start=40)
        np.testing.assert_array_equal(whole[40:], part)

    def test_samples_stay_in_affine_support(self):
        q = random_orthonormal_columns(4, 2, 23)
        fam = explicit_family(q)
        spec = covariance_from_family(fam, 4, [0.3, -0.2])
        x = gaussian_sample(spec, 500, seed=5)
        # residual against the mean + range(L) affine space
        r = spec.rank
        v = spec.eigenvectors[:, :r]
        centered = x - spec.mean
        residual = centered - (centered @ v) @ v.T
        assert np.max(np.abs(residual)) <= 1e-10


class TestGaussianExpectation:
    def test_standard_normal_cos_against_trapezoid_oracle(self):
        spec = GaussianSpec(mean=np.zeros(1), covariance=np.eye(1))
        got = gaussian_expectation(spec, CosLinear([1.0]), "closed_form")
        oracle = one_d_gaussian_oracle(np.cos)
        assert got == pytest.approx(oracle, abs=1e-10)
        assert got == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_point_mass(self):
        spec = GaussianSpec(mean=np.array([0.25, -1.0]), covariance=np.zeros((2, 2)))
        f = GaussBump(1.0, np.zeros(2))
        assert gaussian_expectation(spec, f, "quadrature") == pytest.approx(
            f(np.array([0.25, -1.0])))

    def test_degenerate_support_cos_against_line_oracle(self):
        fam = explicit_family(np.array([[0.6], [0.8]]))
        spec = covariance_from_family(fam, 2, [1.0])
        got = gaussian_expectation(spec, CosLinear([1.0, 0.0]), "closed_form")
        # support line: mean + t * v, t ~ N(0, lambda); x1 = 0.6 + t*v1
        lam = spec.eigenvalues[0]
        v1 = spec.eigenvectors[0, 0]
        oracle = one_d_gaussian_oracle(lambda t: np.cos(0.6 + t * v1), var=lam)
        assert got == pytest.approx(oracle, abs=1e-9)
        assert got == pytest.approx(math.cos(0.6) * math.exp(-0.32), abs=1e-12)

    def test_gauss_bump_closed_form_vs_quadrature(self):
        fam = explicit_family(np.array([[0.6], [0.8]]))
        spec = covariance_from_family(fam, 2, [0.5])
        f = GaussBump(0.7, np.array([0.1, -0.2]))
        cf = gaussian_expectation(spec, f, "closed_form")
        quad = gaussian_expectation(spec, f, "quadrature")
        assert cf == pytest.approx(quad, abs=1e-10)

    def test_product_and_affine_closed_forms(self):
        spec = GaussianSpec(mean=np.zeros(2), covariance=np.eye(2))
        f1 = CosLinear([1.0, 0.0])
        f2 = CosLinear([0.0, 2.0])
        prod = Product([f1, f2])
        cf = gaussian_expectation(spec, prod, "closed_form")
        # independent coordinates: expectation factorizes
        assert cf == pytest.approx(math.exp(-0.5) * math.exp(-2.0), abs=1e-12)
        aff = AffineCombination([2.0, -1.0], [f1, f2])
        cf2 = gaussian_expectation(spec, aff, "closed_form")
        assert cf2 == pytest.approx(2 * math.exp(-0.5) - math.exp(-2.0), abs=1e-12)

    def test_closed_form_unsupported_kind(self):
        spec = GaussianSpec(mean=np.zeros(1), covariance=np.eye(1))
        with pytest.raises(UnsupportedClosedForm):
            gaussian_expectation(spec, TanhPoly(0.0, [1.0]), "closed_form")

    def test_quadrature_rank_cap(self):
        spec = GaussianSpec(mean=np.zeros(4), covariance=np.eye(4))
        with pytest.raises(RankTooHighForQuadrature):
            gaussian_expectation(spec, GaussBump(1.0, np.zeros(4)), "quadrature")

    def test_monte_carlo_within_four_se_of_closed_form(self):
        fam = explicit_family(np.array([[0.6], [0.8]]))
        spec = covariance_from_family(fam, 2, [1.0])
        for f in (CosLinear([1.0, 0.5], 0.3), GaussBump(1.0, np.zeros(2))):
            cf = gaussian_expectation(spec, f, "closed_form")
            est, se = gaussian_expectation(spec, f, "monte_carlo",
                                           count=10 ** 5, seed=77)
            assert abs(est - cf) <= 4 * se


class TestCovarianceContinuity:
    def test_envelope_for_cos_linear(self):
        fam = explicit_family(np.array([[0.6], [0.8]]))
        spec = covariance_from_family(fam, 2, [0.0])
        f = CosLinear([1.0, -0.5], 0.2)
        base = gaussian_expectation(spec, f, "closed_form")
        diffs = []
        for eps in (1e-2, 1e-3, 1e-4):
            # ||L - L'||_op <= eps by construction
            cov = (1 - eps) * spec.covariance + eps * np.eye(2)
            other = GaussianSpec(mean=spec.mean, covariance=cov)
            diffs.append(abs(gaussian_expectation(other, f, "closed_form") - base))
        assert diffs[0] >= diffs[1] >= diffs[2]
        for eps, d in zip((1e-2, 1e-3, 1e-4), diffs):
            assert d <= 10.0 * math.sqrt(eps)
