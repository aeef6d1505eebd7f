import csv

import numpy as np
import pytest

from oracles import brute_force_errors
from periodrecon import PeriodicSignal, fourier_signal, max_error, period_error, rms_error, sine
from periodrecon.metrics import ErrorReport, append_rows, evaluate


def test_period_error():
    assert period_error(1.0, 1.0) == 0.0
    assert period_error(1.0, 1.001) == pytest.approx(0.001, abs=1e-15)
    with pytest.raises(ValueError):
        period_error(1.0, 0.0)


def test_identical_signals_have_zero_error(chirp):
    eps2, _ = rms_error(chirp, chirp)
    epsinf, _ = max_error(chirp, chirp)
    assert eps2 < 1e-9 and epsinf < 1e-9


def test_pure_shift_is_absorbed():
    s = fourier_signal(1.0, [(1, 0.2, 1.0), (2, 0.0, 0.4)])
    moved = PeriodicSignal(1.0, samples=s.evaluate(np.arange(4096) / 4096 - 0.3))
    eps2, shift = rms_error(s, moved)
    assert eps2 < 1e-5
    assert shift == pytest.approx(0.3, abs=1e-4)


def test_scaled_sine_closed_form():
    eps2, shift = rms_error(sine(), sine(1.0, 1.1), 1.0, 1.0)
    assert eps2 == pytest.approx(0.1 * np.sqrt(0.5), abs=1e-4)
    assert min(shift, 1 - shift) < 1e-4


def test_constant_offset_sup_error():
    one = PeriodicSignal(1.0, samples=np.ones(8))
    more = PeriodicSignal(1.0, samples=np.full(8, 1.25))
    assert max_error(one, more)[0] == pytest.approx(0.25, abs=1e-12)


def test_harmonic_pair_matches_dense_brute_force():
    ref = sine()
    est = fourier_signal(1.0, [(1, 0.0, 1.0), (2, 0.0, 0.1)])
    b2, binf = brute_force_errors(ref, est, 1.0, 1.0)
    assert rms_error(ref, est, 1.0, 1.0)[0] == pytest.approx(b2, abs=1e-3)
    assert max_error(ref, est, 1.0, 1.0)[0] == pytest.approx(binf, abs=1e-3)


def test_period_rescaling_in_comparison(chirp):
    # The same waveform reported with a slightly wrong period is stretched back.
    stretched = PeriodicSignal(1.002, samples=chirp.samples)
    eps2, _ = rms_error(chirp, stretched, 1.0, 1.002)
    assert eps2 < 1e-9


@pytest.mark.parametrize("shift", [0.05, 0.41, 0.77])
def test_shift_invariance(chirp, shift):
    est = fourier_signal(1.0, [(1, 0.1, 1.5), (3, 0.2, 0.3)])
    moved = PeriodicSignal(1.0, samples=est.evaluate(np.arange(8192) / 8192 + shift))
    assert rms_error(chirp, moved)[0] == pytest.approx(rms_error(chirp, est)[0], abs=1e-5)
    assert max_error(chirp, moved)[0] == pytest.approx(max_error(chirp, est)[0], abs=1e-4)


def test_sup_error_is_symmetric(chirp):
    other = fourier_signal(1.0, [(1, 0.5, 1.2), (2, -0.3, 0.0)])
    a, _ = max_error(chirp, other, 1.0, 1.0)
    b, _ = max_error(other, chirp, 1.0, 1.0)
    # Equal up to the 4096-point time grid on which the sup is taken.
    assert a == pytest.approx(b, abs=1e-4)


def test_sup_dominates_normalized_l2():
    ref = fourier_signal(2.0, [(1, 0.0, 1.0), (5, 0.1, 0.0)])
    est = fourier_signal(2.0, [(1, 0.2, 0.9)])
    eps2, _ = rms_error(ref, est)
    epsinf, _ = max_error(ref, est)
    assert epsinf >= eps2 / np.sqrt(2.0) - 1e-12


@pytest.mark.parametrize("grid", [256, 512])
def test_doubling_shift_grid_never_hurts(chirp, grid):
    est = fourier_signal(1.0, [(1, 0.3, 1.8), (2, 0.0, 0.5)])
    for fn in (rms_error, max_error):
        coarse = fn(chirp, est, shift_grid=grid)[0]
        fine = fn(chirp, est, shift_grid=2 * grid)[0]
        assert fine <= coarse + 1e-6


def test_small_shift_grid_rejected():
    with pytest.raises(ValueError):
        rms_error(sine(), sine(), shift_grid=128)


def test_reports_append_to_csv(tmp_path):
    path = tmp_path / "errors.csv"
    r1 = evaluate(sine(), sine(1.0, 1.1), 1.0, 1.01, metadata={"d": 3, "n": 100, "seed": 4})
    assert isinstance(r1, ErrorReport) and r1.eps_T == pytest.approx(0.01)
    assert min(r1.eps_T, r1.eps_2, r1.eps_inf) >= 0
    append_rows(path, [r1])
    append_rows(path, [r1])
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 2
    assert {"eps_T", "eps_2", "eps_inf", "best_shift", "d", "n", "seed"} <= set(rows[0])
    assert float(rows[1]["eps_2"]) == r1.eps_2
