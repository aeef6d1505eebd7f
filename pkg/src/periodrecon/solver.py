"""Offset recovery, period estimate and signal assembly.

For a 1-periodic uniform-time curve ``q`` in R^d the offset ``x0`` is the
fraction of a period spanned by one sampling interval.  It is found by
minimizing the least-squares mismatch between shifted coordinates::

    F(x0) = sum_{k<l} integral_0^1 (q_k(x + (l-k) x0) - q_l(x))^2 dx
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousMinimum
from .signal_model import PeriodicSignal

COARSE_GRID = 2048
QUADRATURE_POINTS = 4096
OFFSET_TOL = 1e-7
AMBIGUITY_FRACTION = 0.01

INV_PHI = (math.sqrt(5) - 1) / 2


def objective_F(curve, x0: float, quadrature_points: int = QUADRATURE_POINTS) -> float:
    """Trapezoid (periodic rectangle) quadrature of F at ``x0``."""
    if quadrature_points < 256:
        raise ValueError("quadrature_points must be at least 256")
    x = np.arange(quadrature_points) / quadrature_points
    base = curve(x)
    d = base.shape[1]
    total = 0.0
    for lag in range(1, d):
        shifted = curve(x + lag * x0)
        diff = shifted[:, :d - lag] - base[:, lag:]
        total += float(np.mean(diff**2) * (d - lag))
    return total


def objective_profile(table: np.ndarray, steps) -> np.ndarray:
    """F at offsets ``steps / len(table)`` from a uniform tabulation of the curve.

    Uses circular cross-correlations, so it equals the direct quadrature on
    the same nodes.
    """
    n, d = table.shape
    steps = np.asarray(steps)
    spec = np.fft.rfft(table, axis=0)
    energy = np.mean(table**2, axis=0)
    out = np.zeros(steps.shape)
    for k in range(d):
        for l in range(k + 1, d):
            # corr[s] = mean_i table[i + s, k] * table[i, l]
            corr = np.fft.irfft(spec[:, k] * np.conj(spec[:, l]), n=n) / n
            out += energy[k] + energy[l] - 2 * corr[((l - k) * steps) % n]
    return out


def golden_section(f, a: float, b: float, tol: float = OFFSET_TOL):
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass
class OffsetSearchResult:
    x0: float
    objective: float
    orientation: str
    grid: np.ndarray = field(repr=False)
    profile: np.ndarray = field(repr=False)

    def period(self, tau: float) -> float:
        return tau / self.x0 if self.orientation == "forward" else tau / (1 - self.x0)

    def to_dict(self) -> dict:
        return {"x0": self.x0, "objective": self.objective, "orientation": self.orientation,
                "grid": self.grid.tolist(), "profile": self.profile.tolist()}


def _local_minima(values: np.ndarray) -> np.ndarray:
    inner = (values[1:-1] <= values[:-2]) & (values[1:-1] <= values[2:])
    idx = np.flatnonzero(inner) + 1
    ends = [i for i, ok in ((0, values[0] <= values[1]),
                            (len(values) - 1, values[-1] <= values[-2])) if ok]
    return np.sort(np.concatenate([idx, ends]).astype(int))


def find_offset(curve, coarse_grid: int = COARSE_GRID,
                quadrature_points: int = QUADRATURE_POINTS,
                tol: float = OFFSET_TOL, margin_grid: int | None = None) -> OffsetSearchResult:
    """Global minimizer of F over (0, 1): grid scan, then golden section.

    Offsets closer than ``2 / margin_grid`` to 0 or 1 are excluded (they
    correspond to unbounded periods).  ``margin_grid`` defaults to the
    curve's warp grid.

    Raises
    ------
    AmbiguousMinimum
        Two distinct minima of F are within 1% of F's range of each other and
        are not a time-reversal pair ``x0``, ``1 - x0``.
    """
    if quadrature_points % coarse_grid:
        raise ValueError("quadrature_points must be a multiple of coarse_grid")
    margin = 2.0 / (margin_grid or getattr(curve, "grid", quadrature_points))
    table = curve(np.arange(quadrature_points) / quadrature_points)
    stride = quadrature_points // coarse_grid
    j = np.arange(1, coarse_grid)
    x = j / coarse_grid
    ok = (x >= margin) & (x <= 1 - margin)
    j, x = j[ok], x[ok]
    profile = objective_profile(table, j * stride)

    best = int(np.argmin(profile))
    minima = _local_minima(profile)
    others = minima[np.abs(minima - best) > 1]
    if len(others):
        second = others[np.argmin(profile[others])]
        spread = profile.max() - profile.min()
        twin = abs(x[second] - (1 - x[best])) <= 2.0 / coarse_grid
        if profile[second] - profile[best] < AMBIGUITY_FRACTION * spread and not twin:
            raise AmbiguousMinimum(
                f"F has comparable minima at x0={x[best]:.4f} and x0={x[second]:.4f}")

    step = 1.0 / coarse_grid
    lo = max(x[best] - step, margin)
    hi = min(x[best] + step, 1 - margin)
    x0, fx = golden_section(lambda v: objective_F(curve, v, quadrature_points), lo, hi, tol)
    if profile[best] < fx:
        x0, fx = float(x[best]), float(profile[best])
    orientation = "reversed" if x0 > 0.5 else "forward"
    return OffsetSearchResult(float(x0), float(fx), orientation, x, profile)


@dataclass
class ReconstructionResult:
    period_estimate: float
    signal_estimate: PeriodicSignal
    offset: OffsetSearchResult
    curve: object = field(repr=False)
    tau: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "period_estimate": self.period_estimate,
            "x0": self.offset.x0,
            "orientation": self.offset.orientation,
            "objective": self.offset.objective,
            "tau": self.tau,
            "signal": self.signal_estimate.to_dict(),
            "diagnostics": {"F_grid": self.offset.grid.tolist(),
                            "F_profile": self.offset.profile.tolist()},
            "metadata": self.metadata,
        }


def assemble_signal(curve, offset: OffsetSearchResult, tau: float,
                    output_resolution: int = 4096) -> ReconstructionResult:
    """Period estimate and one period of the signal (up to a time shift).

    Coordinate ``k`` of a train started at ``t`` is ``s(t + k tau)``, so
    ``coord_k(t - k tau)`` estimates ``s(t)`` for every ``k``; the estimate is
    their average.
    """
    period = offset.period(tau)
    sign = 1.0 if offset.orientation == "forward" else -1.0
    t = np.arange(output_resolution) * (period / output_resolution)
    d = curve.dim
    acc = np.zeros(output_resolution)
    for k in range(d):
        acc += curve(sign * (t - k * tau) / period)[:, k]
    signal = PeriodicSignal(period, samples=acc / d)
    return ReconstructionResult(period, signal, offset, curve, tau)


def coordinate_estimates(curve, offset: OffsetSearchResult, tau: float, t) -> np.ndarray:
    """The ``d`` individual estimates ``coord_k(t - k tau)``, shape ``(len(t), d)``."""
    period = offset.period(tau)
    sign = 1.0 if offset.orientation == "forward" else -1.0
    t = np.asarray(t, dtype=float)
    return np.column_stack([curve(sign * (t - k * tau) / period)[:, k]
                            for k in range(curve.dim)])
