"""Reconstruction error measures.

The estimate's time axis is rescaled by ``T_est / T_true`` so both signals
share the true period, then the best time shift of the reference is chosen.
``eps_2`` is ``sqrt(integral_0^T (...)^2 dt)`` without division by ``T``.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .signal_model import PeriodicSignal

TIME_GRID = 4096
SHIFT_GRID = 256


@dataclass
class ErrorReport:
    eps_T: float
    eps_2: float
    eps_inf: float
    best_shift: float
    metadata: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = asdict(self)
        out.update(out.pop("metadata"))
        return out


def period_error(T_true: float, T_est: float) -> float:
    if not (T_true > 0 and T_est > 0):
        raise ValueError("periods must be positive")
    return abs(T_true - T_est)


def _prepare(s_ref: PeriodicSignal, s_est: PeriodicSignal, T_true, T_est, time_grid):
    T_true = s_ref.period if T_true is None else T_true
    T_est = s_est.period if T_est is None else T_est
    t = np.arange(time_grid) * (T_true / time_grid)
    est = s_est.evaluate(t * T_est / T_true)
    return T_true, t, est


def _residuals(s_ref, t, est, shifts):
    shifts = np.atleast_1d(shifts)
    return s_ref.evaluate(t[None, :] - shifts[:, None]) - est[None, :]


def _golden(f, a, b, tol):
    inv_phi = (np.sqrt(5) - 1) / 2
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def rms_error(s_ref: PeriodicSignal, s_est: PeriodicSignal, T_true: float | None = None,
              T_est: float | None = None, shift_grid: int = SHIFT_GRID,
              time_grid: int = TIME_GRID) -> tuple[float, float]:
    """``min_t0 sqrt(integral_0^T (s_ref(t - t0) - s_est(t T_est / T))^2 dt)``.

    Returns ``(eps_2, best_shift)``.  The shift is scanned on a lattice of
    ``shift_grid`` points, refined by the vertex of the parabola through the
    best lattice point and its neighbours, then by golden section inside that
    bracket.
    """
    if shift_grid < 256:
        raise ValueError("shift_grid must be at least 256")
    T, t, est = _prepare(s_ref, s_est, T_true, T_est, time_grid)
    dt = T / time_grid

    def sq(shift):
        r = _residuals(s_ref, t, est, shift)
        return np.sum(r**2, axis=1) * dt

    lattice = np.arange(shift_grid) * (T / shift_grid)
    vals = sq(lattice)
    j = int(np.argmin(vals))
    h = T / shift_grid
    best_shift, best = lattice[j], vals[j]

    y0, y1, y2 = vals[j - 1], vals[j], vals[(j + 1) % shift_grid]
    curv = y0 - 2 * y1 + y2
    if curv > 0:
        cand = lattice[j] + 0.5 * h * (y0 - y2) / curv
        v = sq(cand)[0]
        if v < best:
            best_shift, best = cand, v
    cand, v = _golden(lambda s: sq(s)[0], lattice[j] - h, lattice[j] + h, 1e-9 * T)
    if v < best:
        best_shift, best = cand, v
    return float(np.sqrt(max(best, 0.0))), float(np.mod(best_shift, T))


def max_error(s_ref: PeriodicSignal, s_est: PeriodicSignal, T_true: float | None = None,
              T_est: float | None = None, shift_grid: int = SHIFT_GRID,
              time_grid: int = TIME_GRID) -> tuple[float, float]:
    """``min_t0 max_t |s_ref(t - t0) - s_est(t T_est / T)|``; returns ``(eps_inf, best_shift)``.

    The max is piecewise smooth in the shift, so each of the three best
    lattice points is refined by golden section within one lattice step.
    """
    if shift_grid < 256:
        raise ValueError("shift_grid must be at least 256")
    T, t, est = _prepare(s_ref, s_est, T_true, T_est, time_grid)

    def sup(shift):
        return np.max(np.abs(_residuals(s_ref, t, est, shift)), axis=1)

    lattice = np.arange(shift_grid) * (T / shift_grid)
    vals = sup(lattice)
    h = T / shift_grid
    best_i = int(np.argmin(vals))
    best_shift, best = lattice[best_i], vals[best_i]
    for j in np.argsort(vals, kind="stable")[:3]:
        cand, v = _golden(lambda s: sup(s)[0], lattice[j] - h, lattice[j] + h, 1e-9 * T)
        if v < best:
            best_shift, best = cand, v
    return float(best), float(np.mod(best_shift, T))


def evaluate(s_ref: PeriodicSignal, s_est: PeriodicSignal, T_true: float | None = None,
             T_est: float | None = None, shift_grid: int = SHIFT_GRID,
             metadata: dict | None = None) -> ErrorReport:
    """All three error measures in one report."""
    T_true = s_ref.period if T_true is None else T_true
    T_est = s_est.period if T_est is None else T_est
    eps_2, shift = rms_error(s_ref, s_est, T_true, T_est, shift_grid)
    eps_inf, _ = max_error(s_ref, s_est, T_true, T_est, shift_grid)
    return ErrorReport(period_error(T_true, T_est), eps_2, eps_inf, shift, dict(metadata or {}))


def append_rows(path, reports) -> None:
    """Append error reports to a CSV file, writing a header if it is new."""
    rows = [r.row() for r in reports]
    if not rows:
        return
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        if new:
            writer.writeheader()
        writer.writerows(rows)
