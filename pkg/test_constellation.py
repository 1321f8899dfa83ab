import math

import numpy as np
import pytest

from src.core.exceptions import DegenerateEncodingWarning, ValidationError
from src.models.entities import Constellation, EncodedSymbol
from src.simulators import constellation as const


def _symbol(x, p=0.0):
    return EncodedSymbol(b=0.0, theta=0.0, alpha_i=complex(x, p))


def test_default_constellation_is_distinguishable(optimum):
    symbols = const.encode_constellation(Constellation.from_degrees([0, 60, 120, 180]), math.sqrt(10.0), optimum(1))
    thetas = [symbol.theta for symbol in symbols]
    assert len(set(thetas)) == 4
    assert thetas == sorted(thetas)


def test_mirror_phases_are_degenerate(optimum):
    with pytest.warns(DegenerateEncodingWarning):
        const.encode_constellation(Constellation.from_degrees([90, 270]), 1.0, optimum(2))


def test_coinciding_phases_rejected():
    with pytest.raises(ValidationError):
        Constellation.from_degrees([0, 360])


def test_cloud_statistics_and_reproducibility():
    symbol = _symbol(1.5, -0.5)
    cloud = const.sample_cloud(symbol, 20000, seed=11)
    again = const.sample_cloud(symbol, 20000, seed=11)
    other = const.sample_cloud(symbol, 20000, seed=11, stream=1)
    assert np.array_equal(cloud.samples, again.samples)
    assert not np.array_equal(cloud.samples, other.samples)
    assert cloud.n_samples == 20000
    mean = cloud.samples.mean(axis=0)
    assert mean[0] == pytest.approx(1.5, abs=0.02)
    assert mean[1] == pytest.approx(-0.5, abs=0.02)
    assert np.std(cloud.samples, axis=0) == pytest.approx([0.5, 0.5], rel=0.03)


def test_classify_nearest_and_ties():
    symbols = [_symbol(-1.0), _symbol(1.0), _symbol(0.0, 2.0)]
    assert const.classify((0.9, 0.1), symbols) == 1
    assert const.classify((0.0, 1.9), symbols) == 2
    # equidistant from symbols 0 and 1
    assert const.classify((0.0, 0.0), symbols) == 0
    labels = const.classify_points(np.array([[-2.0, 0.0], [2.0, 0.0]]), symbols)
    assert list(labels) == [0, 1]


def test_two_symbol_ser_matches_q_function():
    symbols = [_symbol(-1.0), _symbol(1.0)]
    n_trials = 1000000
    estimate = const.estimate_ser_for_symbols(symbols, n_trials, seed=3)
    expected = const.pairwise_error(2.0)
    assert expected == pytest.approx(0.0227501, rel=1e-5)
    assert abs(estimate.ser - expected) < 3 * math.sqrt(expected * (1 - expected) / n_trials)
    assert estimate.ci95 == pytest.approx(1.96 * math.sqrt(estimate.ser * (1 - estimate.ser) / n_trials))
    assert sum(estimate.per_symbol_trials) == n_trials
    assert sum(estimate.per_symbol_errors) == round(estimate.ser * n_trials)


def test_ser_is_independent_of_worker_count():
    symbols = [_symbol(-1.0), _symbol(1.0), _symbol(0.0, 1.0)]
    serial = const.estimate_ser_for_symbols(symbols, 150000, seed=5, workers=1)
    parallel = const.estimate_ser_for_symbols(symbols, 150000, seed=5, workers=4)
    assert serial == parallel


def test_more_elements_lower_the_error_rate(optimum):
    psk = Constellation.from_degrees([0, 60, 120, 180])
    alpha = math.sqrt(10.0)
    rates = [const.estimate_ser(psk, alpha, optimum(N), 20000, seed=9).ser for N in (1, 5, 10)]
    assert rates[0] > rates[1] > rates[2]


def test_ser_validation():
    symbols = [_symbol(-1.0), _symbol(1.0)]
    with pytest.raises(ValidationError):
        const.estimate_ser_for_symbols(symbols, 999, seed=1)
    with pytest.raises(ValidationError):
        const.estimate_ser_for_symbols(symbols, 1000, seed=1, workers=0)


def test_pairwise_error_limits():
    assert const.pairwise_error(0.0) == pytest.approx(0.5)
    assert const.pairwise_error(math.inf) == 0.0
    with pytest.raises(ValidationError):
        const.pairwise_error(-1.0)


def test_min_distance_and_union_bound():
    symbols = [_symbol(0.0), _symbol(3.0), _symbol(3.5)]
    d_min, pair = const.min_distance(symbols)
    assert d_min == pytest.approx(0.5)
    assert pair == (1, 2)
    bound = const.union_bound(symbols)
    assert bound >= const.pairwise_error(0.5) * 2 / 3
    assert const.union_bound([_symbol(0.0)]) == 0.0
    with pytest.raises(ValidationError):
        const.min_distance([_symbol(0.0)])


def test_brighter_states_lower_the_error_rate(optimum):
    psk = Constellation.from_degrees([0, 60, 120, 180])
    dim = const.estimate_ser(psk, math.sqrt(10.0), optimum(5), 20000, seed=4)
    bright = const.estimate_ser(psk, math.sqrt(100.0), optimum(5), 20000, seed=4)
    assert bright.ser < dim.ser


def test_classifier_is_rotation_equivariant():
    rng = np.random.default_rng(21)
    symbols = [_symbol(2.0 * math.cos(a), 2.0 * math.sin(a)) for a in (0.1, 1.3, 2.9, 4.4)]
    points = rng.normal(scale=2.0, size=(500, 2))
    labels = const.classify_points(points, symbols)
    for angle in (0.4, 2.0, -1.1):
        turn = np.exp(1j * angle)
        turned_symbols = [_symbol((s.alpha_i * turn).real, (s.alpha_i * turn).imag) for s in symbols]
        turned = (points[:, 0] + 1j * points[:, 1]) * turn
        turned_points = np.column_stack([turned.real, turned.imag])
        assert np.array_equal(const.classify_points(turned_points, turned_symbols), labels)


@pytest.mark.parametrize("N", [1, 5, 10])
def test_ser_respects_union_bound(optimum, N):
    symbols = const.encode_constellation(Constellation.from_degrees([0, 60, 120, 180]), math.sqrt(10.0), optimum(N))
    estimate = const.estimate_ser_for_symbols(symbols, 100000, seed=17)
    assert estimate.ser <= const.union_bound(symbols) + 3 * estimate.ci95
