"""Smoke tests for the python module: thin checks that the bound surface works
end to end; the numerical heavy lifting is covered by the C++ suites."""

import math

import pytest

import needlebench as nb


@pytest.fixture(scope="module")
def profile():
    return nb.make_profile(1, n_r=2048, r_max=32.0)


@pytest.fixture(scope="module")
def ensemble(profile):
    spec = nb.KernelSpec("matern", l=0.1, nu=1.5, d=1)
    return nb.build_ensemble(spec, epsilon=0.05, B=1.0, profile=profile, strict=False)


def test_kernel_values():
    se = nb.KernelSpec("se", l=1.0, d=2)
    assert nb.eval_kernel(se, [0.0, 0.0], [1.0, 1.0]) == pytest.approx(math.exp(-1.0))
    ma = nb.KernelSpec("matern", l=1.0, nu=0.5, d=1)
    assert nb.eval_kernel_radial(ma, 1.0) == pytest.approx(math.exp(-1.0))
    assert nb.spectral_density_radial(ma, 0.0) == pytest.approx(2.0)


def test_spectral_mass_is_one():
    assert nb.spectral_mass(nb.KernelSpec("se", l=0.5, d=1)) == pytest.approx(1.0, abs=1e-6)


def test_profile_constants(profile):
    assert profile.h0 == pytest.approx(0.444, abs=5e-3)
    assert 0.3 < profile.zeta < 0.6
    assert profile.to_csv().startswith("r,h\n")


def test_ensemble_geometry_and_peaks(ensemble):
    assert ensemble.M == 3
    for m in range(1, ensemble.M + 1):
        c = ensemble.center(m)
        assert ensemble.eval(m, c) == pytest.approx(2 * ensemble.epsilon, rel=1e-9)
    assert ensemble.eval(0, [0.5]) == 0.0
    assert ensemble.region_index(ensemble.center(2)) == 2


def test_strict_rejection(profile):
    spec = nb.KernelSpec("se", l=1.0, d=1)
    with pytest.raises(ValueError):
        nb.build_ensemble(spec, epsilon=0.01, B=1.0, profile=profile, strict=True)


def test_certificate(ensemble):
    cert = nb.compute_certificate(ensemble)
    assert cert.ok
    assert cert.margin >= 0.0
    assert cert.norm_numeric <= cert.norm_chain_bound + cert.quadrature_error_estimate
    assert len(cert.chain) == 5


def test_episode_determinism(ensemble):
    a = nb.run_episode(ensemble, member=1, T=40, sigma=0.1, seed=3, grid_resolution=64)
    b = nb.run_episode(ensemble, member=1, T=40, sigma=0.1, seed=3, grid_resolution=64)
    assert list(a.observations) == list(b.observations)
    assert list(a.selections) == list(b.selections)
    assert a.cum_regret[-1] == pytest.approx(sum(a.inst_regret))
    assert sum(a.region_counts) == a.T


def test_oracle_regret_is_zero(ensemble):
    rec = nb.run_episode(ensemble, member=2, kind="oracle", T=25, sigma=0.1, seed=0,
                         grid_resolution=64)
    assert rec.simple_regret == 0.0
    assert rec.cum_regret[-1] == 0.0


def test_average_report_shapes(ensemble):
    rep = nb.run_ensemble_average(ensemble, T=30, sigma=0.1, seeds_per_member=2,
                                  grid_resolution=64, workers=2)
    assert rep["episodes"] == 2 * ensemble.M
    assert len(rep["mean_cum"]) == 30
    assert rep["mean_cum"] == sorted(rep["mean_cum"])  # nondecreasing


def test_bounds_surface(profile):
    assert nb.gaussian_kl(0.0, 0.2, 1.0) == pytest.approx(0.02)
    assert nb.auer_gap(0.5, 1.0, 0.02) == pytest.approx(0.5 + math.sqrt(0.02))
    assert nb.high_prob_conversion(0.5) == pytest.approx(0.5 / 3.5)

    spec = nb.KernelSpec("matern", l=0.1, nu=1.5, d=1)
    t = nb.simple_regret_threshold(spec, profile, epsilon=0.05, B=1.0, sigma=0.1)
    assert t > 0
    cum = nb.cumulative_regret_lower(spec, profile, T=1000.0, B=1.0, sigma=0.1)
    assert cum["R_lower"] == pytest.approx(1000.0 * cum["eps_star"])

    gammas = nb.info_gain_greedy(nb.KernelSpec("se", l=0.2, d=1), 64, 30, 0.1)
    assert gammas[0] == pytest.approx(0.5 * math.log(1 + 100.0))
    assert gammas == sorted(gammas)

    table = nb.exponent_table(nb.KernelSpec("matern", l=1.0, nu=1.5, d=1))
    assert table["cumulative_lower"]["t_power"] == pytest.approx(0.625)
    assert table["cumulative_conjectured"]["t_power"] == pytest.approx(0.7)


def test_vbar_and_divergence(ensemble):
    assert ensemble.vbar(1, 1) == pytest.approx(2 * ensemble.epsilon)
    counts = [0] * ensemble.M
    counts[0] = 10
    bound = nb.divergence_bound(ensemble, 1, counts, 0.1)
    assert bound == pytest.approx(10 * (2 * ensemble.epsilon) ** 2 / (2 * 0.1**2))
