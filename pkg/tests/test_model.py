import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btlrank import graph as G
from btlrank.errors import ValidationError
from btlrank.model import (
    BtlParameters,
    ComparisonData,
    kappa,
    kappa_E,
    linear_theta,
    read_data,
    shifted_barbell_theta,
    shifted_island_theta,
    simulate,
    win_prob,
    write_data,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_win_prob_values():
    assert win_prob([0.3, 0.3], 0, 1) == 0.5
    assert win_prob([2.20, 0.0], 0, 1) == pytest.approx(0.900, abs=5e-4)
    assert win_prob([4.59, 0.0], 0, 1) == pytest.approx(0.990, abs=5e-4)


def test_win_prob_stable_at_extremes():
    assert win_prob([700.0, 0.0], 0, 1) == 1.0
    low = win_prob([-700.0, 0.0], 0, 1)
    assert 0.0 <= low < 1e-300


@given(a=finite, b=finite, c=finite)
def test_win_prob_symmetry_and_shift(a, b, c):
    t = [a, b]
    assert win_prob(t, 0, 1) + win_prob(t, 1, 0) == pytest.approx(1.0, abs=1e-15)
    assert win_prob([a + c, b + c], 0, 1) == pytest.approx(win_prob(t, 0, 1), abs=1e-12)


def test_kappa_examples():
    t = [-1.0, 0.0, 1.0]
    assert kappa(t) == 2.0
    assert kappa_E(t, G.path(3)) == 1.0


@settings(max_examples=50)
@given(st.lists(finite, min_size=5, max_size=5))
def test_kappa_E_below_kappa(values):
    assert kappa_E(values, G.cycle(5)) <= kappa(values)


def test_kappa_E_on_island_roughly_block_fraction():
    g = G.island(3, 50, 5)
    t = linear_theta(g.n, 2.2)
    assert kappa_E(t, g) == pytest.approx(2.2 * 49 / 139, rel=1e-12)
    assert kappa_E(t, g) == pytest.approx(2.2 * 50 / 140, rel=0.05)


def test_linear_theta():
    np.testing.assert_allclose(linear_theta(3, 2).theta, [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(linear_theta(2, 5).theta, [-2.5, 2.5], atol=1e-15)
    t = linear_theta(5, 2.2).theta
    np.testing.assert_allclose(np.diff(t), 0.55, atol=1e-12)
    assert abs(t.sum()) < 1e-12
    assert kappa(t) == pytest.approx(2.2, abs=1e-12)


def test_parameters_must_be_centred():
    with pytest.raises(ValidationError):
        BtlParameters(np.array([1.0, 0.0]))
    assert BtlParameters.centered([1.0, 3.0]).theta.tolist() == [-1.0, 1.0]


def test_shifted_thetas():
    np.testing.assert_allclose(shifted_island_theta(2, 3, 1, 2.2, 0).theta, linear_theta(5, 2.2).theta)
    np.testing.assert_allclose(shifted_barbell_theta(4, 0.0, 2).theta, [1, 1, -1, -1])
    base = linear_theta(5, 2.2).theta
    raw = base.copy()
    raw[2:] -= 1.0  # second block (nodes 2..4) lowered by one
    np.testing.assert_allclose(shifted_island_theta(2, 3, 1, 2.2, 1).theta, raw - raw.mean(), atol=1e-12)


def test_simulate_extremes():
    big = simulate(G.path(2), [25.0, -25.0], 100, seed=1)
    assert big.wins.tolist() == [100]
    one = simulate(G.path(2), [0.0, 0.0], 1, seed=2)
    assert one.wins[0] in (0, 1)


def test_simulate_fair_coin_within_four_sigma():
    g = G.complete(8)
    d = simulate(g, np.zeros(8), 10_000, seed=3)
    assert np.all(np.abs(d.ybar - 0.5) <= 4 * 0.005)


def test_simulate_reproducible():
    g = G.erdos_renyi(30, 0.4, seed=1)
    t = linear_theta(30, 2.0)
    a, b = simulate(g, t, 20, seed=9), simulate(g, t, 20, seed=9)
    assert np.array_equal(a.wins, b.wins)


def test_law_of_large_numbers():
    p = win_prob([1.0, 0.0], 0, 1)
    med = []
    for L in (10**2, 10**4, 10**6):
        dev = [abs(simulate(G.path(2), [1.0, 0.0], L, seed=s).ybar[0] - p) for s in range(20)]
        med.append(np.median(dev))
    assert med[0] > med[1] > med[2]


def test_data_validation():
    g = G.path(3)
    with pytest.raises(ValidationError):
        ComparisonData(g, 5, [1])
    with pytest.raises(ValidationError):
        ComparisonData(g, 5, [1, 6])
    with pytest.raises(ValidationError):
        ComparisonData(g, 0, [0, 0])


def test_data_round_trip(tmp_path):
    d = simulate(G.cycle(5), linear_theta(5, 1.0), 7, seed=4)
    p = tmp_path / "d.json"
    write_data(d, p)
    back = read_data(p)
    assert back.graph == d.graph and back.L == 7
    assert np.array_equal(back.wins, d.wins)


def test_data_rejects_non_canonical_pairs():
    with pytest.raises(ValidationError):
        ComparisonData.from_dict({"n": 2, "L": 1, "edges": [{"i": 1, "j": 0, "wins_i": 1}]})


def test_restrict():
    d = ComparisonData(G.complete(4), 10, [1, 2, 3, 4, 5, 6])
    sub, idx = d.restrict([1, 2, 3])
    assert idx.tolist() == [1, 2, 3]
    assert sub.wins.tolist() == [4, 5, 6]
    assert math.isclose(sub.ybar[0], 0.4)
