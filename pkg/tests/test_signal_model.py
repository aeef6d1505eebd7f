import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import cKDTree

from periodrecon import PeriodicSignal, extract_train, fourier_signal, make_chirp_like, sine
from periodrecon.signal_model import train_matrix

finite_t = st.floats(-50, 50, allow_nan=False)


def sawtooth(samples=8):
    return PeriodicSignal(1.0, samples=np.arange(samples) / samples)


def test_fourier_sine_quarter_period():
    assert fourier_signal(1.0, [(1, 0.0, 1.0)]).evaluate(0.25) == pytest.approx(1.0, abs=1e-15)


def test_table_sine_matches_closed_form():
    table = PeriodicSignal(1.0, samples=np.sin(2 * np.pi * np.arange(1024) / 1024))
    assert abs(table.evaluate(0.1) - np.sin(0.2 * np.pi)) < 1e-4


@pytest.mark.parametrize("signal", [
    fourier_signal(2.5, [(1, 0.3, 1.0), (3, -0.2, 0.5), (7, 0.05, 0.0)]),
    make_chirp_like(0.7),
    sawtooth(),
])
def test_periodic_on_dense_grid(signal):
    t = np.linspace(-3 * signal.period, 3 * signal.period, 10_000)
    diff = np.abs(signal.evaluate(t + signal.period) - signal.evaluate(t))
    assert diff.max() <= 1e-9 * signal.peak_to_peak


@settings(max_examples=50, deadline=None)
@given(finite_t)
def test_fourier_periodicity_relative(t):
    s = fourier_signal(1.3, [(1, 0.0, 1.0), (2, 0.4, 0.1)])
    a, b = s.evaluate(t), s.evaluate(t + 1.3)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a)) * max(1.0, abs(t))


def test_table_needs_eight_samples():
    with pytest.raises(ValueError):
        PeriodicSignal(1.0, samples=np.zeros(7))


def test_sawtooth_train():
    train = extract_train(sawtooth(), 0.0, 0.25, 3)
    np.testing.assert_allclose(train.values, [0.0, 0.25, 0.5], atol=1e-15)
    assert train.d == 3 and train.tau == 0.25


@settings(max_examples=30, deadline=None)
@given(finite_t)
def test_train_is_periodic(t):
    s = make_chirp_like(1.0)
    a = extract_train(s, t, 0.39, 4).values
    b = extract_train(s, t + 1.0, 0.39, 4).values
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_sine_train_closed_form():
    train = extract_train(sine(), 0.1, 0.39, 3)
    expected = [np.sin(0.2 * np.pi), np.sin(0.98 * np.pi), np.sin(1.76 * np.pi)]
    np.testing.assert_allclose(train.values, expected, atol=1e-12)


def test_train_rejects_bad_arguments():
    with pytest.raises(ValueError):
        extract_train(sine(), 0.0, 0.1, 1)
    with pytest.raises(ValueError):
        extract_train(sine(), 0.0, 0.0, 3)


coef = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(coef, coef, st.lists(st.tuples(st.integers(1, 5), coef, coef), min_size=1, max_size=3),
       st.lists(st.tuples(st.integers(1, 5), coef, coef), min_size=1, max_size=3))
def test_trains_are_linear_in_signal(a, b, terms1, terms2):
    s1, s2 = fourier_signal(1.0, terms1), fourier_signal(1.0, terms2)
    mix = fourier_signal(1.0, [(k, a * p, a * q) for k, p, q in terms1]
                         + [(k, b * p, b * q) for k, p, q in terms2])
    t = np.linspace(0, 1, 17)
    lhs = train_matrix(mix, t, 0.39, 3)
    rhs = a * train_matrix(s1, t, 0.39, 3) + b * train_matrix(s2, t, 0.39, 3)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("tau", [0.1, 0.25, 0.39])
def test_sine_two_sample_trains_lie_on_an_ellipse(tau):
    pts = train_matrix(sine(), np.linspace(0, 1, 500, endpoint=False), tau, 2)
    x, y = pts.T
    # Conic a x^2 + b xy + c y^2 + e x + f y + g = 0 fitted by least squares.
    design = np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])
    coeffs = np.linalg.svd(design)[2][-1]
    assert np.abs(design @ coeffs).max() < 1e-9
    # Ellipse: discriminant b^2 - 4ac < 0.
    assert coeffs[1] ** 2 - 4 * coeffs[0] * coeffs[2] < 0


def test_chirp_peak_to_peak_and_periodicity():
    s = make_chirp_like(1.0)
    assert s.peak_to_peak == pytest.approx(4.0, abs=1e-12)
    t = np.linspace(0, 1, 101)
    np.testing.assert_allclose(s.evaluate(t + 1.0), s.evaluate(t), atol=1e-12)


def test_chirp_train_curve_does_not_self_intersect():
    s = make_chirp_like(1.0)
    n = 40_000
    pts = train_matrix(s, np.arange(n) / n, 0.39, 3)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    length = arc[-1] + np.linalg.norm(pts[0] - pts[-1])
    pairs = cKDTree(pts).query_pairs(0.5, output_type="ndarray")
    along = np.abs(arc[pairs[:, 0]] - arc[pairs[:, 1]])
    along = np.minimum(along, length - along)
    # Any two points closer than 0.5 in space must be neighbours along the arc.
    assert np.all(along < 1.5)


def test_signal_json_round_trip(tmp_path):
    for s in (make_chirp_like(2.0), fourier_signal(0.5, [(1, 0.1, 0.2), (4, 0.0, -1.0)])):
        path = tmp_path / "signal.json"
        s.save(path)
        doc = json.loads(path.read_text())
        assert doc["type"] == s.kind and doc["period"] == s.period
        back = PeriodicSignal.load(path)
        t = np.linspace(0, 3, 50)
        np.testing.assert_array_equal(back.evaluate(t), s.evaluate(t))


def test_signal_rejects_ambiguous_model():
    with pytest.raises(ValueError):
        PeriodicSignal(1.0)
    with pytest.raises(ValueError):
        PeriodicSignal(-1.0, samples=np.zeros(8))
