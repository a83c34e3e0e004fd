import math

import numpy as np
import pytest
from scipy.special import digamma

from freemimo import asymptotics as asy
from freemimo import infotheory as it
from freemimo import montecarlo as mc
from freemimo import spectra as sp
from freemimo.experiments import _paired_grid_stats

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sampling_is_deterministic():
    spec = mc.EnsembleSpec("iid_complex_gaussian", 16, 8, 2.0)
    a = mc.sample_matrix(spec, 99, trial=3)
    b = mc.sample_matrix(spec, 99, trial=3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, mc.sample_matrix(spec, 99, trial=4))
    assert not np.array_equal(a, mc.sample_matrix(spec, 100, trial=3))


def test_haar_unitarity():
    u = mc.sample_matrix(mc.EnsembleSpec("haar_unitary", 64, 64), 1)
    assert np.max(np.abs(u.conj().T @ u - np.eye(64))) < 1e-12


def test_iid_trace_normalization():
    # (1/T) E[tr H^H H] = sigma^2 for a single factor
    spec = mc.EnsembleSpec("iid_complex_gaussian", 512, 512, 1.0)
    h = mc.sample_matrix(spec, 2)
    assert abs(np.real(np.trace(h.conj().T @ h)) / 512 - 1.0) < 0.1
    spec = mc.EnsembleSpec("iid_real_gaussian", 512, 256, 3.0)
    h = mc.sample_matrix(spec, 3)
    assert abs(np.trace(h.T @ h) / 256 - 3.0 * (512 / 512)) < 0.3


def test_product_factors():
    spec = mc.EnsembleSpec("product_iid", 64, 64, 1.0, factors=3)
    h = mc.sample_matrix(spec, 4)
    assert h.shape == (64, 64)
    assert np.iscomplexobj(h)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        mc.EnsembleSpec("haar_unitary", 4, 2)
    with pytest.raises(ValueError):
        mc.EnsembleSpec("bogus", 4, 4)
    with pytest.raises(ValueError):
        mc.EnsembleSpec("iid_real_gaussian", 4, 4, variance=0.0)
    with pytest.raises(ValueError):
        mc.EnsembleSpec("product_iid", 4, 4, factors=0)


# ---------------------------------------------------------------------------
# projectors
# ---------------------------------------------------------------------------

def test_projector_examples():
    h = np.arange(8, dtype=float).reshape(4, 2)
    assert np.array_equal(mc.apply_projector(h, mc.ProjectorSpec("receive", 1.0)), h)
    top = mc.apply_projector(h, mc.ProjectorSpec("receive", 0.5))
    assert np.array_equal(top, h[:2, :])
    left = mc.apply_projector(h.T, mc.ProjectorSpec("transmit", 0.5))
    assert np.array_equal(left, h.T[:, :2])


def test_kept_count_round_half_up():
    assert mc.kept_count(0.5, 5) == 3
    assert mc.kept_count(0.5, 4) == 2
    assert mc.kept_count(1.0, 7) == 7
    assert mc.kept_count(0.01, 10) == 1


def test_projected_iid_stays_iid():
    # trace/variance oracle over many draws: per-entry variance unchanged
    spec = mc.EnsembleSpec("iid_complex_gaussian", 16, 8, 1.0)
    proj = mc.ProjectorSpec("receive", 0.5)
    acc = 0.0
    for t in range(1000):
        hp = mc.apply_projector(mc.sample_matrix(spec, 55, t), proj)
        acc += np.mean(np.abs(hp) ** 2)
    assert abs(acc / 1000 - 1.0 / 16) < 0.005 * (1.0 / 16) * 10


# ---------------------------------------------------------------------------
# empirical spectra of sampled ensembles
# ---------------------------------------------------------------------------

def test_haar_spectrum_is_unit():
    spec = mc.empirical_spectrum(mc.EnsembleSpec("haar_unitary", 32, 32), 6)
    assert np.max(np.abs(spec.eigenvalues - 1.0)) < 1e-10


def test_square_iid_spectral_edge():
    spec = mc.empirical_spectrum(
        mc.EnsembleSpec("iid_complex_gaussian", 1024, 1024, 1.0), 7)
    assert abs(spec.eigenvalues[-1] - 4.0) < 0.3


def test_vanishing_variance_spectrum():
    spec = mc.empirical_spectrum(
        mc.EnsembleSpec("iid_complex_gaussian", 16, 16, 1e-28), 8)
    assert spec.eigenvalues[-1] < 1e-27


# ---------------------------------------------------------------------------
# ergodic estimators
# ---------------------------------------------------------------------------

def test_ergodic_mutual_info_haar():
    est = mc.ergodic_mutual_info(mc.EnsembleSpec("haar_unitary", 16, 16),
                                 None, 7.0, 10, 1)
    assert abs(est.mean - math.log2(8.0)) < 1e-12
    assert est.stderr < 1e-12


def test_ergodic_mutual_info_vanishing_variance():
    est = mc.ergodic_mutual_info(
        mc.EnsembleSpec("iid_complex_gaussian", 4, 2, 1e-28), None, 10.0, 5, 1)
    assert est.mean < 1e-20


def test_ergodic_mutual_info_self_consistency():
    # same estimator at two trial counts agrees within combined error bars
    spec = mc.EnsembleSpec("iid_complex_gaussian", 2, 2, 1.0)
    small = mc.ergodic_mutual_info(spec, None, 1e3, 3000, 12)
    large = mc.ergodic_mutual_info(spec, None, 1e3, 30000, 13)
    gap = abs(small.mean - large.mean)
    assert gap < 3.0 * math.hypot(small.stderr, large.stderr)


def test_ergodic_loss_beta_one_is_zero():
    est = mc.ergodic_loss(mc.EnsembleSpec("iid_complex_gaussian", 4, 2, 1.0),
                          mc.ProjectorSpec("receive", 1.0), 10.0, 10, 3)
    assert est.mean == 0.0 and est.stderr == 0.0


def test_paired_loss_is_pathwise_nonnegative():
    spec = mc.EnsembleSpec("iid_complex_gaussian", 8, 4, 1.0)
    proj = mc.ProjectorSpec("receive", 0.75)
    for t in range(50):
        h = mc.sample_matrix(spec, 77, t)
        hp = mc.apply_projector(h, proj)
        assert (it.mutual_info_finite(h, 100.0)
                - it.mutual_info_finite(hp, 100.0)) > -1e-12


def test_ergodic_loss_matches_wishart_oracle():
    # At gamma = 1e8 the finite-SNR remainder is ~1e-8; the exact mean of the
    # paired log-det loss follows from Wishart log-determinant moments.
    est = mc.ergodic_loss(mc.EnsembleSpec("iid_complex_gaussian", 4, 2, 1.0),
                          mc.ProjectorSpec("receive", 0.5), 1e8, 4000, 21)
    exact = (digamma(4) + digamma(3) - digamma(2) - digamma(1)) / (2 * LN2)
    assert abs(est.mean - exact) < 3.0 * est.stderr + 1e-6


def test_ergodic_loss_transmit_side():
    # removing columns: loss per reference transmit antenna, beta-weighted
    spec = mc.EnsembleSpec("iid_complex_gaussian", 2, 4, 1.0)
    proj = mc.ProjectorSpec("transmit", 0.5)
    trials = 64
    est = mc.ergodic_loss(spec, proj, 1e4, trials, 31)
    manual = np.mean([
        it.mutual_info_finite(mc.sample_matrix(spec, 31, t), 1e4)
        - 0.5 * it.mutual_info_finite(
            mc.apply_projector(mc.sample_matrix(spec, 31, t), proj), 1e4)
        for t in range(trials)])
    assert est.mean > 0.0
    assert abs(est.mean - float(manual)) < 1e-12


def test_ergodic_deviation_unitary_is_zero_to_rounding():
    # unit spectra make every trial zero up to eigensolver rounding
    est = mc.ergodic_deviation(mc.EnsembleSpec("haar_unitary", 64, 64),
                               0.5, 1e6, 10, 5)
    assert abs(est.mean) < 1e-12
    assert est.stderr < 1e-12


def test_ergodic_loss_monotone_in_gamma_common_seeds():
    spec = mc.EnsembleSpec("iid_complex_gaussian", 32, 16, 1.0)
    proj = mc.ProjectorSpec("receive", 0.75)
    means = []
    for gdb in (0.0, 10.0, 20.0, 30.0, 40.0):
        est = mc.ergodic_loss(spec, proj, 10.0 ** (gdb / 10.0), 100, 66)
        means.append(est.mean)
    assert all(b >= a - 1e-12 for a, b in zip(means, means[1:]))


def test_finite_size_losses_match_digamma_oracle():
    # MC estimate vs the exact finite-N Wishart mean, at gamma large enough
    # that the finite-SNR remainder is negligible.
    gamma = 1e8
    for n, trials in ((16, 4000), (64, 800)):
        t_cols, kept = n // 2, int(0.75 * n)
        spec = mc.EnsembleSpec("iid_complex_gaussian", n, t_cols, 1.0)
        mi_r, mi_p, _, _ = _paired_grid_stats(spec, 0.75, [gamma], trials, 42)
        loss = mi_r[0] - mi_p[0]
        mean = float(np.mean(loss))
        se = float(np.std(loss, ddof=1) / math.sqrt(trials))
        ks = np.arange(t_cols)
        exact = float(np.sum(digamma(n - ks) - digamma(kept - ks)) / (t_cols * LN2))
        assert abs(mean - exact) < 3.0 * se + 1e-7


def test_exact_finite_size_discrepancy_shrinks_with_n():
    # Large-system convergence, checked on the exact Wishart means.
    target = asy.binary_entropy_loss(0.5, 0.75)
    discs = []
    for n in (64, 128, 256, 512):
        t_cols, kept = n // 2, int(0.75 * n)
        ks = np.arange(t_cols)
        exact = float(np.sum(digamma(n - ks) - digamma(kept - ks)) / (t_cols * LN2))
        discs.append(abs(exact - target))
    assert all(a > b for a, b in zip(discs, discs[1:]))


def test_sup_property_of_deviation():
    # mutual-information deviation increases with SNR and is capped by the
    # multiplexing-rate deviation
    n, beta, trials = 256, 0.5, 40
    spec = mc.EnsembleSpec("iid_complex_gaussian", n, n, 1.0)
    gammas = [1.0, 1e2, 1e4, 1e6]
    mi_r, mi_p, _, _ = _paired_grid_stats(spec, beta, gammas, trials, 91)
    dev = mi_p - beta * mi_r
    means = np.mean(dev, axis=1)
    ses = np.std(dev, axis=1, ddof=1) / math.sqrt(trials)
    for i in range(1, len(gammas)):
        assert means[i] >= means[i - 1] - 3.0 * (ses[i] + ses[i - 1])
    cap = asy.deviation_iid(beta)
    assert means[-1] <= cap + 3.0 * ses[-1]


def test_limiting_family_map():
    assert isinstance(mc.limiting_family(
        mc.EnsembleSpec("haar_unitary", 8, 8)), sp.Dirac)
    fam = mc.limiting_family(mc.EnsembleSpec("product_iid", 8, 8, 2.0, factors=3))
    assert isinstance(fam, sp.FreeProduct) and len(fam.factors) == 3
    assert isinstance(mc.limiting_family(
        mc.EnsembleSpec("iid_real_gaussian", 8, 4)), sp.SquareIidGram)


def test_thread_count_does_not_change_results(monkeypatch):
    spec = mc.EnsembleSpec("iid_complex_gaussian", 8, 4, 1.0)
    proj = mc.ProjectorSpec("receive", 0.5)
    base = mc.ergodic_loss(spec, proj, 100.0, 64, 17)
    monkeypatch.setenv(mc.THREADS_ENV_VAR, "4")
    threaded = mc.ergodic_loss(spec, proj, 100.0, 64, 17)
    assert base == threaded


def test_trials_floor():
    with pytest.raises(ValueError):
        mc.ergodic_mutual_info(mc.EnsembleSpec("haar_unitary", 4, 4),
                               None, 1.0, 1, 0)
