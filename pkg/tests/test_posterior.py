import math

import numpy as np
import pytest
import scipy.stats as st

from linbandits.normal import norm_cdf, norm_ppf
from linbandits.posterior import (
    GaussianPosterior,
    certify_anti_concentration,
    certify_concentration_type1,
    certify_concentration_type2,
    certify_well_behaved,
    standard_normal_sampler,
)


def test_norm_ppf_matches_reference_within_1e9():
    grid = np.concatenate(
        [
            np.linspace(1e-10, 1e-3, 2000),
            np.linspace(1e-3, 1 - 1e-3, 20000),
            np.linspace(1 - 1e-3, 1 - 1e-10, 2000),
        ]
    )
    assert np.max(np.abs(norm_ppf(grid) - st.norm.ppf(grid))) < 1e-9
    with pytest.raises(ValueError):
        norm_ppf(0.0)
    with pytest.raises(ValueError):
        norm_ppf(1.0)


def test_norm_cdf_matches_reference():
    grid = np.linspace(-8, 8, 5001)
    assert np.max(np.abs(norm_cdf(grid) - st.norm.cdf(grid))) < 1e-14


def test_scale_zero_sample_is_mean():
    post = GaussianPosterior(np.array([1.0, -2.0]), 0.0, np.eye(2))
    rng = np.random.default_rng(0)
    assert np.array_equal(post.sample(rng), np.array([1.0, -2.0]))


def test_sample_moments_standard():
    post = GaussianPosterior(np.zeros(3), 1.0, np.eye(3))
    rng = np.random.default_rng(5)
    draws = post.sample(rng, size=100_000)
    assert np.max(np.abs(draws.mean(axis=0))) < 0.02
    cov = np.cov(draws.T)
    assert np.max(np.abs(cov - np.eye(3))) < 0.05


def test_sample_diagonal_scaling():
    post = GaussianPosterior(np.zeros(2), 2.0, np.array([0.25, 1.0]))
    rng = np.random.default_rng(6)
    draws = post.sample(rng, size=100_000)
    sds = draws.std(axis=0)
    assert sds[0] == pytest.approx(1.0, rel=0.02)
    assert sds[1] == pytest.approx(2.0, rel=0.02)


def test_sample_standardization_invariant():
    # scale^-1 V^(1/2) (draw - mean) should be standard normal
    rng = np.random.default_rng(7)
    base = rng.standard_normal((3, 3))
    v = base @ base.T + 3.0 * np.eye(3)
    post = GaussianPosterior(np.array([1.0, 2.0, 3.0]), 1.7, np.linalg.inv(v))
    draws = post.sample(rng, size=100_000)
    vals, vecs = np.linalg.eigh(v)
    v_half = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    eta = (draws - post.mean) @ v_half.T / post.scale
    assert np.max(np.abs(eta.mean(axis=0))) < 0.02
    assert np.max(np.abs(np.cov(eta.T) - np.eye(3))) < 0.05


def test_non_spd_covariance_fails_at_construction():
    with pytest.raises(ValueError):
        GaussianPosterior(np.zeros(2), 1.0, np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        GaussianPosterior(np.zeros(2), 1.0, np.array([1.0, 0.0]))


def test_arm_value_quantile_examples():
    post = GaussianPosterior(np.array([1.0, 0.0]), 1.0, np.eye(2))
    assert post.arm_value_quantile([1.0, 0.0], 0.5) == pytest.approx(1.0)
    # oracle: inverse normal CDF at 0.9
    assert post.arm_value_quantile([1.0, 0.0], 0.9) == pytest.approx(
        1.0 + st.norm.ppf(0.9), abs=1e-9
    )
    assert post.arm_value_quantile([0.0, 0.0], 0.37) == 0.0
    with pytest.raises(ValueError):
        post.arm_value_quantile([1.0, 0.0], 1.0)


def test_arm_value_quantile_increasing_in_gamma():
    post = GaussianPosterior(np.array([0.3, -0.4]), 0.8, np.array([[2.0, 0.3], [0.3, 1.0]]))
    arm = np.array([0.6, -0.2])
    values = [post.arm_value_quantile(arm, g) for g in np.linspace(0.01, 0.99, 33)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_quantile_matches_empirical_quantile():
    post = GaussianPosterior(np.array([0.5, 1.0, -0.3]), 1.2, np.array([0.8, 0.4, 1.5]))
    arm = np.array([0.5, -0.7, 0.2])
    rng = np.random.default_rng(8)
    draws = post.sample(rng, size=1_000_000) @ arm
    for gamma in (0.2, 0.5, 0.9):
        exact = post.arm_value_quantile(arm, gamma)
        empirical = float(np.quantile(draws, gamma))
        # quantile standard error from the exact normal density at the quantile
        spread = post.scale * post.arm_norm(arm)
        dens = st.norm.pdf((exact - draws.mean() * 0) * 0 + st.norm.ppf(gamma)) / spread
        se = math.sqrt(gamma * (1 - gamma) / draws.size) / dens
        assert abs(empirical - exact) < 3 * se


def test_anti_concentration_links_to_quantile():
    # the (1 - kappa1)-quantile of the arm value sits at or above
    # mean + scale * weighted norm, with kappa1 the unit normal tail mass
    post = GaussianPosterior(np.array([0.2, -0.1]), 1.5, np.array([[1.0, 0.2], [0.2, 0.5]]))
    arm = np.array([0.7, 0.3])
    kappa1 = 1.0 - st.norm.cdf(1.0)
    exact = post.arm_value_quantile(arm, 1.0 - kappa1)
    floor = float(arm @ post.mean) + post.scale * post.arm_norm(arm)
    assert exact >= floor - 1e-12
    rng = np.random.default_rng(9)
    draws = post.sample(rng, size=200_000) @ arm
    empirical = float(np.quantile(draws, 1.0 - kappa1))
    spread = post.scale * post.arm_norm(arm)
    se = math.sqrt(kappa1 * (1 - kappa1) / draws.size) / (st.norm.pdf(1.0) / spread)
    assert empirical >= floor - 3 * se


def test_certify_anti_concentration_standard_normal():
    rng = np.random.default_rng(10)
    cert = certify_anti_concentration(standard_normal_sampler(4), 32, 100_000, rng)
    truth = 1.0 - st.norm.cdf(1.0)
    assert abs(cert.kappa1_hat - truth) <= cert.ci_halfwidth
    assert cert.samples == 100_000


def test_certify_anti_concentration_degenerate_cases():
    rng = np.random.default_rng(11)
    direction = np.array([1.0, 0.0, 0.0])

    def shifted(n, r):
        return r.standard_normal((n, 3)) + 10.0 * direction

    # along the shift direction essentially all mass clears the threshold
    draws = shifted(20_000, rng)
    assert float(np.mean(draws @ direction >= 1.0)) == pytest.approx(1.0, abs=1e-3)
    # but the direction minimum collapses (the mirrored direction is empty)
    cert = certify_anti_concentration(shifted, 16, 20_000, rng)
    assert cert.kappa1_hat < 0.01

    def concentrated(n, r):
        return 0.01 * r.standard_normal((n, 3))

    cert = certify_anti_concentration(concentrated, 8, 20_000, rng)
    assert cert.kappa1_hat == pytest.approx(0.0, abs=1e-4)


def test_certification_requires_budget():
    rng = np.random.default_rng(12)
    with pytest.raises(ValueError):
        certify_anti_concentration(standard_normal_sampler(2), 8, 999, rng)
    with pytest.raises(ValueError):
        certify_concentration_type2(standard_normal_sampler(2), 0.05, 8, 10, rng)


def test_certify_type2_quantiles():
    rng = np.random.default_rng(13)
    est = certify_concentration_type2(standard_normal_sampler(3), 0.5, 16, 50_000, rng)
    assert abs(est) < 0.03
    est = certify_concentration_type2(standard_normal_sampler(3), 0.1587, 16, 200_000, rng)
    assert est == pytest.approx(1.0, abs=0.03)


def test_certify_type2_dimension_free():
    rng = np.random.default_rng(14)
    estimates = [
        certify_concentration_type2(standard_normal_sampler(d), 0.05, 64, 200_000, rng)
        for d in (2, 20, 200)
    ]
    target = st.norm.ppf(0.95)
    se = math.sqrt(0.05 * 0.95 / 200_000) / st.norm.pdf(target)
    for est in estimates:
        assert abs(est - target) < 4 * se  # max over 64 directions biases slightly up
    assert max(estimates) - min(estimates) < 3 * math.sqrt(2) * se


def test_certify_type1_feasibility():
    rng = np.random.default_rng(15)
    feas = certify_concentration_type1(
        standard_normal_sampler(2), [0.1], 100_000, rng, c1_candidates=(4.0,), c1p_candidates=(8.0,)
    )
    assert feas.feasible and (feas.c1, feas.c1p) == (4.0, 8.0)
    # oracle: chi(2) quantile at 0.9 is sqrt(-2 ln 0.1) ~ 2.146, bound ~ 6.37
    assert feas.quantiles[0] == pytest.approx(math.sqrt(-2 * math.log(0.1)), abs=0.03)

    infeasible = certify_concentration_type1(
        standard_normal_sampler(2), [0.01], 100_000, rng, c1_candidates=(0.01,), c1p_candidates=(1.0,)
    )
    assert not infeasible.feasible

    # delta near one: the bound degenerates gracefully and stays defined
    near_one = certify_concentration_type1(
        standard_normal_sampler(2), [0.999], 10_000, rng
    )
    assert near_one.feasible


def test_ci_halfwidth_shrinks_with_root_n():
    rng = np.random.default_rng(17)
    small = certify_anti_concentration(standard_normal_sampler(2), 8, 10_000, rng)
    large = certify_anti_concentration(standard_normal_sampler(2), 8, 160_000, rng)
    shrink = small.ci_halfwidth / large.ci_halfwidth
    assert shrink == pytest.approx(4.0, rel=0.15)


def test_certify_well_behaved_bundle():
    rng = np.random.default_rng(16)
    cert = certify_well_behaved(
        standard_normal_sampler(2), delta_grid=(0.1, 0.5), directions=16, samples=20_000, rng=rng
    )
    assert cert.concentration1 is not None
    assert set(cert.c_hat1) == {0.1, 0.5}
    assert cert.ci_halfwidth < 0.02
