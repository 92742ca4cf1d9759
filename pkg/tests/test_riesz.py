"""Gram matrices, two-sided Riesz bounds, and the four experiments."""

import json
import warnings

import numpy as np
import pytest
from scipy import special

from inghamlab import curves, oscint, riesz
from inghamlab.errors import DecayTooWeak, NotHermitian

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# system construction
# ---------------------------------------------------------------------------

def test_system_validation(mono2, full_circle):
    with pytest.raises(ValueError):
        riesz.curve_system([1, 1, 2], 2.0, mono2, 1.0)
    with pytest.raises(ValueError):
        riesz.curve_system([2, 1], 2.0, mono2, 1.0)
    with pytest.raises(ValueError):
        riesz.curve_system([0, 1], 2.0, mono2, 0.0)
    with pytest.raises(ValueError):
        riesz.curve_system([0, 1], 2.0, mono2, 1.0, weight="gaussian")
    with pytest.raises(ValueError):
        riesz.curve_system([0, 1], 2.0, mono2, 1.0, lambdas=[0.5, 0.5])
    with pytest.raises(ValueError):
        riesz.ExpSystem((0, 1), 2.0, curve=mono2, T=1.0, measure=full_circle)
    with pytest.raises(ValueError):
        riesz.ExpSystem((0, 1), 2.0)
    sys = riesz.curve_system([-2, 0, 3], 2.5, mono2, 1.0)
    assert sys.lambdas == (-2.0, 0.0, 3.0)
    assert sys.dim == 3
    assert sys.temporal_freq(-2) == pytest.approx(2.0 ** 2.5)
    assert sys.spatial_freq(3) == 3.0


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

def test_curve_gram_structure(mono2):
    idx = range(-3, 4)
    system = riesz.curve_system(idx, 2.0, mono2, 1.5)
    G = riesz.gram_matrix(system, tol=1e-10)
    H = G.entries
    assert np.abs(H - H.conj().T).max() < 1e-12
    np.testing.assert_allclose(np.diag(H).real, 1.5, rtol=0, atol=1e-14)
    assert G.T_or_mass == 1.5
    # Entries are the pair integrals with d = n - m, e = |n|^s - |m|^s.
    for (i, n), (j, m) in [((0, -3), (4, 1)), ((2, -1), (5, 2))]:
        want = oscint.oscillatory_integral(n, m, 2.0, mono2, 1.5, tol=1e-12)
        assert abs(H[i, j] - want.value) < 1e-9
    assert np.linalg.eigvalsh(H).min() > -1e-10


def test_measure_gram_matches_transform(full_circle):
    idx = (-2, 0, 1, 3)
    system = riesz.measure_system(idx, 2.5, full_circle)
    G = riesz.gram_matrix(system).entries
    phi = np.stack([np.array([abs(n) ** 2.5 for n in idx], dtype=float),
                    np.array(idx, dtype=float)], axis=1)
    for i in range(4):
        for j in range(4):
            want = curves.mu_hat(full_circle, phi[j] - phi[i])
            assert abs(G[i, j] - want) < 1e-12
            bessel = special.j0(TWO_PI * np.hypot(*(phi[j] - phi[i])))
            assert abs(G[i, j] - bessel) < 1e-8


def test_gram_round_trips_through_json(mono2):
    G = riesz.gram_matrix(riesz.curve_system(range(-2, 3), 2.0, mono2, 1.0))
    doc = json.loads(json.dumps(riesz.gram_to_dict(G)))
    back = riesz.gram_from_dict(doc)
    assert back.indices == G.indices
    assert back.T_or_mass == G.T_or_mass
    np.testing.assert_allclose(back.entries, G.entries, rtol=0, atol=1e-16)


# ---------------------------------------------------------------------------
# Riesz bounds
# ---------------------------------------------------------------------------

def _synthetic_gram(eigs, seed=5):
    rng = np.random.default_rng(seed)
    dim = len(eigs)
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim))
                        + 1j * rng.standard_normal((dim, dim)))
    H = Q @ np.diag(eigs) @ Q.conj().T
    H = 0.5 * (H + H.conj().T)
    return riesz.GramMatrix(H, tuple(range(dim)), 1.0, 1e-9)


def test_riesz_bounds_recover_known_spectrum():
    G = _synthetic_gram([1.0, 2.0, 5.0])
    rep = riesz.riesz_bounds(G)
    assert rep.lambda_min == pytest.approx(1.0, abs=1e-10)
    assert rep.lambda_max == pytest.approx(5.0, abs=1e-10)
    assert rep.normalized == pytest.approx((1.0, 5.0), abs=1e-10)
    assert rep.random_vector_checks == 64
    big = _synthetic_gram(np.linspace(0.5, 3.0, 12).tolist())
    rep = riesz.riesz_bounds(big)
    eigs = np.linalg.eigvalsh(big.entries)
    assert rep.lambda_min == pytest.approx(eigs[0], abs=1e-12)
    assert rep.lambda_max == pytest.approx(eigs[-1], abs=1e-12)


def test_riesz_bounds_reject_non_hermitian():
    H = np.array([[1.0, 0.5j], [0.4j, 1.0]])
    with pytest.raises(NotHermitian):
        riesz.riesz_bounds(riesz.GramMatrix(H, (0, 1), 1.0, 1e-9))


def test_quadratic_form_closes_the_loop(mono2, full_circle):
    rng = np.random.default_rng(21)
    systems = [
        riesz.curve_system(range(-3, 4), 2.0, mono2, 1.0),
        riesz.curve_system(range(-3, 4), 2.0, mono2, 1.0, weight="arclength"),
        riesz.measure_system((-2, 0, 1, 3), 2.5, full_circle),
    ]
    for system in systems:
        dim = system.dim
        c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        G = riesz.gram_matrix(system, tol=1e-10)
        want = float(np.real(c.conj() @ G.entries @ c))
        got = riesz.quadratic_form_quadrature(system, c)
        assert got == pytest.approx(want, rel=1e-6)
        assert got >= 0.0
    with pytest.raises(ValueError):
        riesz.quadratic_form_quadrature(systems[0], np.ones(3))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def test_ingham_sweep_lambda_min_is_monotone(mono2):
    sweep = riesz.ingham_sweep(mono2, 2.0, 4, [0.5, 1.0, 2.0])
    assert sweep.monotone
    assert sweep.lambda_min == sorted(sweep.lambda_min)
    assert sweep.lambda_min[-1] > 0.0
    assert sweep.empirical_T == 1.0
    with pytest.raises(ValueError):
        riesz.ingham_sweep(mono2, 2.0, 80, [0.5, 1.0])
    with pytest.raises(ValueError):
        riesz.ingham_sweep(mono2, 2.0, 4, [1.0])


def test_minimal_time_family_collapses(mono2):
    res = riesz.minimal_time_counterexample(mono2, 2.0, [2, 5, 10, 50])
    assert res.decreasing
    assert res.eps == pytest.approx(0.75)
    assert res.c_norm_sq == 2.0
    assert res.T_values == sorted(res.T_values, reverse=True)
    assert res.ratios[-1] < 0.05 * res.ratios[0]


def test_highfreq_tail_bounds_close(quarter_circle):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DecayTooWeak)
        hf = riesz.highfreq_bounds(quarter_circle, 2.5, [2, 6, 10, 14],
                                   window=10)
    assert hf.N_star == 6
    assert hf.delta_hat == pytest.approx(0.53, abs=0.1)
    i = hf.N_grid.index(hf.N_star)
    assert hf.lambda_min[i] >= 0.45 and hf.lambda_max[i] <= 1.55
    # Larger N only tightens the two-sided bounds on this geometry.
    assert hf.lambda_min == sorted(hf.lambda_min)
    assert hf.lambda_max == sorted(hf.lambda_max, reverse=True)


def test_highfreq_warns_when_decay_is_too_weak(quarter_circle):
    with pytest.warns(DecayTooWeak):
        riesz.highfreq_bounds(quarter_circle, 1.5, [2], window=4)


def test_sharpness_sum_grows_at_the_predicted_rate():
    res = riesz.sharpness_sum(0.5, 1.5, [32, 64, 128, 256, 512, 1024])
    assert res.passes
    assert res.slope == pytest.approx(2.0 - 0.5 * 1.5, abs=0.1)
    assert res.exceeds_diagonal
    with pytest.raises(ValueError):
        riesz.sharpness_sum(0.9, 2.0, [32, 64])


def test_merged_bound_coupling_decays_in_s(mono2):
    res = riesz.merged_bound_experiment(mono2, 0.5, [1.6, 2.0, 2.5], N=8)
    assert res.coupling_decreasing
    assert res.coupling == sorted(res.coupling, reverse=True)
    assert all(v > 0 for v in res.lambda_min)
    assert len(res.product_bound_max) == 3
    with pytest.raises(ValueError):
        riesz.merged_bound_experiment(mono2, 0.5, [2.0, 2.5], N=40)
