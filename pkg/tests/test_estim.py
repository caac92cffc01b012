"""Tests for maximum-likelihood machinery in gkw.estim.

The analytic score and observed information are certified against the
finite-difference oracles; the optimizer is exercised on simulated data
with known truths, against an independently coded beta MLE, and on its
contract corners (boundaries, degenerate data, non-nested LR pairs).
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkw import core, estim, oracle, specfun
from gkw.core import Params, SUBMODELS
from gkw.estim import (
    Dataset,
    EstimationError,
    FitOptions,
    FitResult,
    LrTestResult,
    default_init,
    fit,
    fit_family,
    log_likelihood,
    lr_test,
    observed_info,
    score,
    start_grid,
    std_errors,
)

from gridpoints import (
    BATHTUB,
    BETA52,
    INCREASING_J,
    KW22,
    KWKW,
    MOUND,
    SPIKE,
    UNIFORM,
    WORKHORSE,
)

PARAM_NAMES = ("alpha", "beta", "gamma", "delta", "lam")


def _dataset(seed=7, n=40, lo=0.02, hi=0.98):
    rng = np.random.default_rng(seed)
    return Dataset(rng.uniform(lo, hi, n))


def _random_instance(rng):
    """A random (theta, dataset) pair with delta kept off the boundary
    so the centred finite-difference stencils stay inside the domain."""
    theta = Params(
        alpha=rng.uniform(0.4, 3.0),
        beta=rng.uniform(0.4, 3.0),
        gamma=rng.uniform(0.3, 3.0),
        delta=rng.uniform(0.05, 3.0),
        lam=rng.uniform(0.4, 3.0),
    )
    n = int(rng.integers(20, 80))
    data = Dataset(rng.uniform(0.01, 0.99, n))
    return theta, data


class TestDataset:
    def test_basic_fields(self):
        d = Dataset([0.2, 0.5, 0.9], source="toy")
        assert d.n == 3
        assert d.source == "toy"
        assert d.values.dtype == float

    def test_values_are_read_only(self):
        d = Dataset([0.2, 0.5])
        with pytest.raises(ValueError):
            d.values[0] = 0.3

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, math.nan, math.inf])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError, match="index 1"):
            Dataset([0.5, bad, 0.7])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Dataset([])


class TestLogLikelihood:
    def test_uniform_parameters_give_zero(self):
        data = _dataset()
        assert log_likelihood(UNIFORM, data) == 0.0

    def test_single_observation_is_log_pdf(self):
        data = Dataset([0.37])
        assert log_likelihood(WORKHORSE, data) == pytest.approx(
            core.log_pdf(WORKHORSE, 0.37), rel=1e-14
        )

    def test_matches_sum_of_log_densities(self):
        data = _dataset(seed=3, n=200)
        direct = math.fsum(core.log_pdf(WORKHORSE, x) for x in data.values)
        assert log_likelihood(WORKHORSE, data) == pytest.approx(
            direct, abs=1e-9 * data.n
        )


class TestScore:
    @pytest.mark.parametrize(
        "theta",
        [WORKHORSE, KWKW, MOUND, BETA52, BATHTUB, SPIKE, INCREASING_J],
        ids=lambda p: f"a{p.alpha}b{p.beta}",
    )
    def test_matches_finite_differences(self, theta):
        # delta = 0 shifts slightly inside so the centred stencil is legal
        if theta.delta == 0.0:
            theta = theta.replace(delta=5e-4)
        data = _dataset()
        f = lambda v: log_likelihood(Params(*v), data)
        g_fd = oracle.fd_grad(f, np.array(theta.as_tuple(), dtype=float))
        g = score(theta, data)
        for i in range(5):
            if abs(g_fd[i]) < 1e-6:
                assert g[i] == pytest.approx(g_fd[i], abs=1e-8)
            else:
                assert g[i] == pytest.approx(g_fd[i], rel=1e-5)

    def test_extreme_tail_data(self):
        rng = np.random.default_rng(5)
        x = np.concatenate(
            [
                rng.uniform(1e-6, 1e-3, 5),
                rng.uniform(0.999, 0.999999, 5),
                rng.uniform(0.1, 0.9, 30),
            ]
        )
        data = Dataset(x)
        f = lambda v: log_likelihood(Params(*v), data)
        g_fd = oracle.fd_grad(f, np.array(WORKHORSE.as_tuple(), dtype=float))
        assert np.allclose(score(WORKHORSE, data), g_fd, rtol=1e-5, atol=1e-8)

    def test_fifty_random_instances(self):
        rng = np.random.default_rng(20240501)
        for _ in range(50):
            theta, data = _random_instance(rng)
            f = lambda v: log_likelihood(Params(*v), data)
            g_fd = oracle.fd_grad(f, np.array(theta.as_tuple(), dtype=float))
            g = score(theta, data)
            for i in range(5):
                if abs(g_fd[i]) < 1e-6:
                    assert g[i] == pytest.approx(g_fd[i], abs=1e-8)
                else:
                    assert g[i] == pytest.approx(g_fd[i], rel=1e-5)

    def test_gamma_component_closed_form(self):
        data = _dataset(seed=11)
        a, b, g, d, l = WORKHORSE.as_tuple()
        s = a * np.log(data.values)
        ly = specfun.log1mexp(b * specfun.log1mexp(s))
        expected = -data.n * (
            specfun.digamma(g) - specfun.digamma(g + d + 1.0)
        ) + l * float(np.sum(ly))
        assert score(WORKHORSE, data)[2] == pytest.approx(expected, rel=1e-13)

    def test_delta_component_at_zero_boundary(self):
        # one-sided second-order difference, since delta cannot go negative
        theta = Params(2.0, 3.0, 1.5, 0.0, 2.0)
        data = _dataset(seed=13)
        h = 1e-7
        f0 = log_likelihood(theta, data)
        f1 = log_likelihood(theta.replace(delta=h), data)
        f2 = log_likelihood(theta.replace(delta=2 * h), data)
        fd = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
        assert score(theta, data)[3] == pytest.approx(fd, rel=1e-5)


class TestObservedInfo:
    @pytest.mark.parametrize(
        "theta",
        [WORKHORSE, KWKW, MOUND, BETA52, BATHTUB, SPIKE],
        ids=lambda p: f"a{p.alpha}b{p.beta}",
    )
    def test_matches_fd_hessian(self, theta):
        if theta.delta == 0.0:
            theta = theta.replace(delta=5e-4)
        data = _dataset()
        f = lambda v: log_likelihood(Params(*v), data)
        H_fd = oracle.fd_hess(f, np.array(theta.as_tuple(), dtype=float))
        J = observed_info(theta, data)
        scale = np.maximum(np.abs(H_fd), 1.0)
        assert np.max(np.abs(-H_fd - J) / scale) < 1e-4

    def test_exactly_symmetric(self):
        J = observed_info(WORKHORSE, _dataset())
        assert np.array_equal(J, J.T)

    def test_trigamma_entries_are_data_free(self):
        a, b, g, d, l = KWKW.as_tuple()
        for seed in (1, 2):
            J = observed_info(KWKW, _dataset(seed=seed))
            n = 40
            assert J[2, 2] == pytest.approx(
                n * (specfun.trigamma(g) - specfun.trigamma(g + d + 1.0)), rel=1e-12
            )
            assert J[2, 3] == pytest.approx(
                -n * specfun.trigamma(g + d + 1.0), rel=1e-12
            )

    def test_positive_definite_at_truth_on_large_sample(self):
        x = core.sample(KW22, 4000, seed=2)
        J = observed_info(KW22, Dataset(x))
        block = J[np.ix_([0, 1], [0, 1])]
        np.linalg.cholesky(block)  # raises if not PD


class TestDefaultInit:
    def test_uniform_like_data(self):
        n = 500
        data = Dataset(np.linspace(0.5 / n, 1.0 - 0.5 / n, n))
        start = default_init(data, SUBMODELS["GKw"])
        assert start.alpha == 1.0 and start.beta == 1.0 and start.lam == 1.0
        assert start.gamma == pytest.approx(1.0, abs=0.1)
        assert start.delta == pytest.approx(0.0, abs=0.1)

    def test_projection_onto_kw(self):
        start = default_init(_dataset(), SUBMODELS["Kw"])
        assert (start.gamma, start.delta, start.lam) == (1.0, 0.0, 1.0)

    def test_zero_variance_raises(self):
        with pytest.raises(EstimationError):
            default_init(Dataset([0.4] * 10), SUBMODELS["Kw"])

    def test_start_grid_is_deterministic(self):
        data = _dataset()
        g1 = start_grid(data, SUBMODELS["GKw"])
        g2 = start_grid(data, SUBMODELS["GKw"])
        assert all(p.as_tuple() == q.as_tuple() for p, q in zip(g1, g2))

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(1e-3, 1.0 - 1e-3, allow_nan=False), min_size=2, max_size=40),
        st.sampled_from(sorted(SUBMODELS)),
    )
    def test_start_points_always_valid(self, xs, name):
        if float(np.ptp(xs)) == 0.0:
            return
        sub = SUBMODELS[name]
        for p in start_grid(Dataset(xs), sub):
            for k, v in sub.fixed_dict.items():
                assert getattr(p, k) == v


def _beta_mle_oracle(x):
    """Newton iteration on the beta score, all special functions from
    mpmath -- independent of the package's own machinery."""
    s1 = float(np.mean(np.log(x)))
    s2 = float(np.mean(np.log1p(-x)))
    m, v = float(np.mean(x)), float(np.var(x))
    c = m * (1.0 - m) / v - 1.0
    a, b = m * c, (1.0 - m) * c
    for _ in range(80):
        t = float(mp.polygamma(1, a + b))
        ga = float(mp.digamma(a) - mp.digamma(a + b)) - s1
        gb = float(mp.digamma(b) - mp.digamma(a + b)) - s2
        ha = float(mp.polygamma(1, a)) - t
        hb = float(mp.polygamma(1, b)) - t
        det = ha * hb - t * t
        da = (hb * ga + t * gb) / det
        db = (t * ga + ha * gb) / det
        a, b = a - da, b - db
        if abs(da) + abs(db) < 1e-13:
            break
    n = len(x)
    info = n * np.array([[ha, -t], [-t, hb]])
    ses = np.sqrt(np.diag(np.linalg.inv(info)))
    return a, b, ses


class TestFit:
    def test_kw_recovery_within_three_se(self):
        truth = Params(2.0, 3.0, 1.0, 0.0, 1.0)
        data = Dataset(core.sample(truth, 5000, seed=11))
        r = fit(data, "Kw")
        assert r.converged and r.std_errors is not None
        assert abs(r.theta_hat.alpha - 2.0) < 3.0 * r.std_errors[0]
        assert abs(r.theta_hat.beta - 3.0) < 3.0 * r.std_errors[1]

    def test_beta_fit_matches_independent_oracle(self):
        data = Dataset(core.sample(Params(1.0, 1.0, 2.0, 2.0, 1.0), 3000, seed=5))
        r = fit(data, "Beta")
        a_hat, b_hat, ses = _beta_mle_oracle(data.values)
        assert r.theta_hat.gamma == pytest.approx(a_hat, abs=1e-4)
        assert r.theta_hat.delta == pytest.approx(b_hat - 1.0, abs=1e-4)
        assert r.std_errors == pytest.approx(ses, rel=0.05)

    def test_loglik_and_gradient_invariants(self):
        data = Dataset(core.sample(KW22, 1500, seed=8))
        r = fit(data, "EKw")
        assert r.loglik == pytest.approx(log_likelihood(r.theta_hat, data), abs=1e-8)
        if r.converged:
            assert r.grad_norm < 1e-5 * max(1.0, abs(r.loglik))

    def test_refit_is_deterministic(self):
        data = Dataset(core.sample(KW22, 800, seed=4))
        r1, r2 = fit(data, "Kw"), fit(data, "Kw")
        assert r1.theta_hat.as_tuple() == r2.theta_hat.as_tuple()
        assert r1.iterations == r2.iterations

    def test_explicit_init_is_honoured(self):
        truth = Params(2.0, 3.0, 1.0, 0.0, 1.0)
        data = Dataset(core.sample(truth, 2000, seed=9))
        r = fit(data, "Kw", init=truth)
        assert r.converged
        assert r.theta_hat.alpha == pytest.approx(2.0, abs=0.3)

    def test_coordinate_scaling_does_not_move_estimate(self):
        data = Dataset(core.sample(Params(2.0, 3.0, 1.0, 0.0, 1.0), 2000, seed=14))
        r1 = fit(data, "Kw", opts=FitOptions(coord_scale=1.0))
        r3 = fit(data, "Kw", opts=FitOptions(coord_scale=3.0))
        for v1, v3 in zip(r1.theta_hat.as_tuple(), r3.theta_hat.as_tuple()):
            assert v3 == pytest.approx(v1, abs=1e-5)

    def test_delta_wall_reported_as_exact_zero(self):
        truth = Params(2.0, 3.0, 1.0, 0.0, 2.0)       # delta truly on the boundary
        data = Dataset(core.sample(truth, 2000, seed=21))
        r = fit(data, "KwKw", init=truth)
        assert r.theta_hat.delta == 0.0
        assert "delta" in r.boundary

    def test_degenerate_data_raises(self):
        with pytest.raises(EstimationError):
            fit(Dataset([0.3] * 50), "Kw")

    def test_too_few_observations_raises(self):
        with pytest.raises(ValueError):
            fit(Dataset([0.2, 0.4, 0.6]), "GKw")

    def test_fit_family_respects_nesting(self):
        data = Dataset(core.sample(WORKHORSE, 600, seed=17))
        fam = fit_family(data)
        assert set(fam) == set(SUBMODELS)
        ll = {nm: fam[nm].loglik for nm in fam}
        slack = 1e-6
        assert ll["Kw"] <= ll["EKw"] + slack <= ll["GKw"] + 2 * slack
        assert ll["Kw"] <= ll["BKw"] + slack <= ll["GKw"] + 2 * slack
        assert ll["Beta"] <= ll["Mc"] + slack <= ll["GKw"] + 2 * slack
        assert ll["Beta"] <= ll["BKw"] + slack
        assert ll["BP"] <= ll["Mc"] + slack
        assert ll["KwKw"] <= ll["GKw"] + slack


class TestStdErrors:
    def test_shrink_like_root_n(self):
        truth = Params(2.0, 3.0, 1.0, 0.0, 1.0)
        x = core.sample(truth, 5000, seed=11)
        r_full = fit(Dataset(x), "Kw")
        r_quarter = fit(Dataset(x[:1250]), "Kw")
        ratio = r_quarter.std_errors / r_full.std_errors
        assert np.all(ratio > 1.6) and np.all(ratio < 2.4)

    def test_zero_row_information_is_flagged(self):
        info = np.eye(5)
        info[1] = 0.0
        info[:, 1] = 0.0
        assert estim._se_from_info(info, [0, 1]) is None

    def test_non_finite_information_is_flagged(self):
        info = np.full((5, 5), np.inf)
        assert estim._se_from_info(info, [0, 1]) is None

    def test_requires_converged_fit(self):
        bogus = FitResult(
            submodel=SUBMODELS["Kw"], theta_hat=KW22, loglik=-1.0,
            std_errors=None, converged=False, iterations=0, grad_norm=math.inf,
        )
        with pytest.raises(ValueError):
            std_errors(bogus, _dataset())

    def test_matches_fit_attached_errors(self):
        data = Dataset(core.sample(KW22, 1000, seed=3))
        r = fit(data, "Kw")
        assert std_errors(r, data) == pytest.approx(r.std_errors, rel=1e-12)


def _fake_fit(name, loglik):
    sub = SUBMODELS[name]
    return FitResult(
        submodel=sub, theta_hat=UNIFORM, loglik=loglik, std_errors=None,
        converged=True, iterations=1, grad_norm=0.0,
    )


class TestLrTest:
    def test_equal_logliks_give_w_zero_p_one(self):
        r = lr_test(_fake_fit("Kw", -10.0), _fake_fit("EKw", -10.0))
        assert r.statistic_w == 0.0
        assert r.p_value == 1.0
        assert r.df == 1

    def test_chi_square_95_point(self):
        r = lr_test(_fake_fit("Kw", 0.0), _fake_fit("EKw", 3.841 / 2.0))
        assert r.p_value == pytest.approx(0.05, abs=5e-4)

    def test_beta_versus_gkw_has_df_three(self):
        r = lr_test(_fake_fit("Beta", -5.0), _fake_fit("GKw", -4.0))
        assert r.df == 3

    def test_tiny_negative_w_clamped(self):
        r = lr_test(_fake_fit("Kw", -10.0), _fake_fit("EKw", -10.0 - 1e-9))
        assert r.statistic_w == 0.0
        assert r.p_value == 1.0

    @pytest.mark.parametrize("null,alt", [("Mc", "Kw"), ("BP", "Mc"), ("GKw", "Kw")])
    def test_non_nested_pairs_rejected(self, null, alt):
        with pytest.raises(ValueError):
            lr_test(_fake_fit(null, -1.0), _fake_fit(alt, -1.0))

    def test_on_real_fits(self):
        data = Dataset(core.sample(KW22, 1200, seed=19))
        fam = fit_family(data, ("Kw", "EKw", "GKw"))
        r = lr_test(fam["Kw"], fam["GKw"])
        assert r.statistic_w >= 0.0
        assert 0.0 <= r.p_value <= 1.0
        assert r.df == 3
        assert r.null_model.name == "Kw" and r.alt_model.name == "GKw"
