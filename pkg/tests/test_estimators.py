import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btlrank import graph as G
from btlrank.errors import MLENonexistenceError, ValidationError
from btlrank.estimators import (
    FitConfig,
    FitResult,
    d_infinity,
    fit,
    fit_tree_closed_form,
    fit_vanilla,
    gradient,
    hessian,
    neg_log_likelihood,
    auto_rho,
)
from btlrank.model import ComparisonData, linear_theta, simulate

from helpers import exact_data, random_connected_graph, random_instance, random_theta_with_edge_spread


# -- objective ----------------------------------------------------------------


def test_nll_at_zero_is_edges_times_log2(rng):
    g = G.erdos_renyi(15, 0.5, seed=3)
    d = simulate(g, rng.normal(size=15), 9, seed=1)
    assert neg_log_likelihood(np.zeros(15), d) == pytest.approx(g.m * math.log(2), rel=1e-14)


def test_nll_single_edge():
    d = ComparisonData(G.path(2), 4, [4])
    assert neg_log_likelihood([math.log(3), 0.0], d) == pytest.approx(-math.log(0.75), abs=1e-12)
    assert neg_log_likelihood([math.log(3), 0.0], d) == pytest.approx(0.28768, abs=1e-5)


def test_nll_shift_invariant(rng):
    _, theta, d, _ = random_instance(rng)
    assert neg_log_likelihood(theta + 3.7, d) == pytest.approx(neg_log_likelihood(theta, d), rel=1e-12)


def test_nll_adds_ridge(rng):
    _, theta, d, _ = random_instance(rng)
    diff = neg_log_likelihood(theta, d, 2.0) - neg_log_likelihood(theta, d, 0.0)
    assert diff == pytest.approx(np.dot(theta, theta), rel=1e-10)


def test_nll_finite_with_saturated_outcomes():
    d = ComparisonData(G.path(2), 5, [5])
    assert np.isfinite(neg_log_likelihood([40.0, -40.0], d))


# -- gradient -------------------------------------------------------------------


def test_gradient_vanishes_at_matching_point():
    theta = np.log([1.0, 2.0, 4.0])
    d = exact_data(G.complete(3), theta, 30)
    np.testing.assert_allclose(gradient(theta, d), 0.0, atol=1e-13)


def test_gradient_zero_for_fair_data():
    d = ComparisonData(G.cycle(6), 10, [5] * 6)
    np.testing.assert_array_equal(gradient(np.zeros(6), d, rho=1.5), np.zeros(6))


def central_difference(theta, d, rho, h=1e-5):
    out = np.empty_like(theta)
    for k in range(theta.size):
        e = np.zeros_like(theta)
        e[k] = h
        out[k] = (neg_log_likelihood(theta + e, d, rho) - neg_log_likelihood(theta - e, d, rho)) / (2 * h)
    return out


def test_gradient_matches_finite_differences(rng):
    for _ in range(50):
        _, theta, d, rho = random_instance(rng)
        g = gradient(theta, d, rho)
        fd = central_difference(theta, d, rho)
        assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(g), 1e-3)


def test_loss_gradient_sums_to_zero(rng):
    for _ in range(10):
        _, theta, d, _ = random_instance(rng)
        assert abs(gradient(theta + 2.0, d).sum()) < 1e-10


# -- Hessian --------------------------------------------------------------------


def test_hessian_at_zero(rng):
    g = G.erdos_renyi(12, 0.5, seed=8)
    d = simulate(g, rng.normal(size=12), 6, seed=2)
    expected = 0.7 * np.eye(12) + 0.25 * g.laplacian()
    np.testing.assert_allclose(hessian(np.zeros(12), d, 0.7), expected, atol=1e-15)


def test_hessian_matches_gradient_differences(rng):
    _, theta, d, rho = random_instance(rng, n_max=8)
    h = 1e-6
    cols = [(gradient(theta + h * e, d, rho) - gradient(theta - h * e, d, rho)) / (2 * h) for e in np.eye(theta.size)]
    np.testing.assert_allclose(hessian(theta, d, rho), np.array(cols).T, atol=1e-6)


def check_hessian_eigen_bounds(rng, tol=1e-8):
    n = int(rng.integers(3, 21))
    g = random_connected_graph(rng, n)
    theta = random_theta_with_edge_spread(rng, g)
    d = simulate(g, theta, 1, seed=0)  # outcomes do not enter the Hessian
    rho = float(rng.uniform(0, 2))
    ev = np.linalg.eigvalsh(hessian(theta, d, rho))
    s = G.spectral_summary(g)
    kE = float(np.abs(theta[g.edges[:, 0]] - theta[g.edges[:, 1]]).max())
    upper_ok = ev[-1] <= rho + s.n_max / 2 + tol
    lower_ok = ev[1] >= rho + s.lambda2 / (4 * math.exp(kE)) - tol
    return upper_ok and lower_ok


def test_hessian_eigenvalue_bounds(rng):
    assert all(check_hessian_eigen_bounds(rng) for _ in range(50))


# -- fitting --------------------------------------------------------------------


def test_fit_recovers_exact_stationary_point():
    theta = np.log([1.0, 2.0, 4.0])
    d = exact_data(G.complete(3), theta, 30)
    res = fit(d, FitConfig(grad_tol=1e-12))
    assert res.converged
    assert d_infinity(res.theta, theta) < 1e-10


@pytest.mark.parametrize("rho", [0.0, 0.3, 5.0])
def test_fair_data_fits_to_zero(rho):
    d = ComparisonData(G.complete(5), 8, [4] * 10)
    res = fit(d, FitConfig(rho=rho))
    np.testing.assert_allclose(res.theta, 0.0, atol=1e-15)
    assert res.iterations == 0


def test_fit_result_invariants(rng):
    for _ in range(10):
        _, _, d, rho = random_instance(rng)
        res = fit(d, FitConfig(rho=max(rho, 0.05)))
        assert abs(res.theta.sum()) <= 1e-8
        assert res.converged and res.final_grad_norm <= 1e-8


def test_objective_monotone_along_iterates(rng):
    for _ in range(5):
        _, _, d, _ = random_instance(rng)
        res = fit(d, FitConfig(rho=0.2), track_objective=True)
        assert np.all(np.diff(res.history) <= 1e-10)


def test_auto_rho_uses_rule():
    g = G.complete(6)
    d = simulate(g, linear_theta(6, 1.0), 20, seed=1)
    res = fit(d, FitConfig.auto())
    assert res.rho_used == pytest.approx(auto_rho(5, 20)) == pytest.approx(math.sqrt(5 / 20))


def test_vanilla_fit_needs_strong_connectivity():
    d = ComparisonData(G.path(3), 4, [4, 2])
    with pytest.raises(MLENonexistenceError):
        fit(d, FitConfig(rho=0.0))
    assert fit(d, FitConfig(rho=0.5)).converged  # the ridge keeps the optimum finite


def test_max_iters_respected():
    d = simulate(G.path(10), linear_theta(10, 2.0), 50, seed=0)
    res = fit(d, FitConfig(rho=0.01, max_iters=3))
    assert res.iterations == 3 and not res.converged


def test_fit_config_validation():
    for kw in ({"rho": -1}, {"grad_tol": 0}, {"max_iters": 0}, {"rho_rule": "nope"}, {"step_size": 0}):
        with pytest.raises(ValidationError):
            FitConfig(**kw)


def test_permutation_equivariance(rng):
    _, _, d, _ = random_instance(rng, n_max=12)
    n = d.n
    perm = rng.permutation(n)  # old label k becomes perm[k]
    rows = []
    wins = []
    for (i, j), w in zip(d.graph.edges.tolist(), d.wins.tolist()):
        a, b = perm[i], perm[j]
        rows.append((min(a, b), max(a, b)))
        wins.append(w if a < b else d.L - w)
    order = np.lexsort((np.array(rows)[:, 1], np.array(rows)[:, 0]))
    pd = ComparisonData(G.ComparisonGraph(n, rows), d.L, np.array(wins)[order])
    cfg = FitConfig(rho=0.3, grad_tol=1e-12)
    a = fit(d, cfg).theta
    b = fit(pd, cfg).theta
    np.testing.assert_allclose(b[perm], a, atol=1e-9)


def test_heterogeneous_L_weights_edges():
    strong = ComparisonData(G.ComparisonGraph(3, [(0, 1)]), 100, [75])
    weak = ComparisonData(G.ComparisonGraph(3, [(1, 2)]), 10, [5])
    res = fit([strong, weak], FitConfig(grad_tol=1e-12))
    t = res.theta
    assert t[0] - t[1] == pytest.approx(math.log(3), abs=1e-9)
    assert t[1] - t[2] == pytest.approx(0.0, abs=1e-9)


def test_fit_result_serialisation(tmp_path):
    d = simulate(G.complete(4), linear_theta(4, 1.0), 30, seed=2)
    res = fit(d, FitConfig(rho=0.1))
    doc = res.to_dict()
    assert set(doc) == {"theta", "iterations", "final_grad_norm", "rho", "converged"}
    back = FitResult.from_dict(doc)
    np.testing.assert_allclose(back.theta, res.theta)


# -- closed form on trees ---------------------------------------------------------


def test_closed_form_path3():
    # node 1 beats node 0 thirty times out of forty, nodes 1 and 2 split evenly
    d = ComparisonData(G.path(3), 40, [10, 20])
    t = fit_tree_closed_form(d).theta
    assert t[1] - t[0] == pytest.approx(math.log(3), abs=1e-12)
    assert t[2] == pytest.approx(t[1], abs=1e-12)


def test_closed_form_star_fair():
    d = ComparisonData(G.star(4), 6, [3, 3, 3])
    np.testing.assert_allclose(fit_tree_closed_form(d).theta, 0.0, atol=1e-15)


def test_closed_form_matches_iterative():
    for seed in range(3):
        d = simulate(G.path(6), linear_theta(6, 2.0), 500, seed=seed)
        a = fit_tree_closed_form(d).theta
        b = fit_vanilla(d, grad_tol=1e-10).theta
        assert np.abs(a - b).max() <= 1e-6


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 10), seed=st.integers(0, 10**6))
def test_closed_form_matches_iterative_random_trees(n, seed):
    g = G.random_tree(n, seed)
    d = simulate(g, linear_theta(n, 1.5), 200, seed=seed)
    if np.any((d.wins == 0) | (d.wins == d.L)):
        return
    a = fit_tree_closed_form(d).theta
    b = fit_vanilla(d, grad_tol=1e-10).theta
    assert np.abs(a - b).max() <= 1e-6


def test_closed_form_errors():
    with pytest.raises(ValidationError):
        fit_tree_closed_form(ComparisonData(G.cycle(3), 4, [1, 2, 3]))
    with pytest.raises(MLENonexistenceError):
        fit_tree_closed_form(ComparisonData(G.path(3), 4, [4, 2]))


# -- d_infinity -------------------------------------------------------------------


def test_d_infinity_examples():
    v = np.array([0.3, -1.0, 2.0])
    assert d_infinity(v, v) == 0.0
    assert d_infinity(v + 4.2, v) == pytest.approx(0.0, abs=1e-15)
    assert d_infinity([0.0, 0.0], [-1.0, 1.0]) == 1.0
    with pytest.raises(ValidationError):
        d_infinity([1.0], [1.0, 2.0])
