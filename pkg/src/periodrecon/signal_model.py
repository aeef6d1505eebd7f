"""Periodic test signals and their sample-train map.

A :class:`PeriodicSignal` is either a truncated Fourier series or a table of
uniformly spaced samples over one period evaluated by linear interpolation.
Both are immutable and exactly periodic in ``t``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

# Chirp-like reference waveform: linear sweep of the instantaneous frequency
# from CHIRP_F0 to CHIRP_F0 + CHIRP_SWEEP cycles per period, tapered to zero
# (with zero slope) over CHIRP_TAPER of the period at each end so that the
# periodic extension is C1.
CHIRP_F0 = 1.0
CHIRP_SWEEP = 1.5
CHIRP_TAPER = 0.2
CHIRP_TABLE_SIZE = 4096
CHIRP_PEAK_TO_PEAK = 4.0


@dataclass(frozen=True)
class PeriodicSignal:
    """A T-periodic waveform.

    Exactly one of ``coefficients`` (rows of ``(k, a_k, b_k)`` for the term
    ``a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T)``) or ``samples`` (values
    at ``t = j T / len(samples)``) is set.
    """

    period: float
    coefficients: np.ndarray | None = None
    samples: np.ndarray | None = None

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if (self.coefficients is None) == (self.samples is None):
            raise ValueError("give exactly one of coefficients or samples")
        if self.coefficients is not None:
            c = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
            if c.shape[1] != 3:
                raise ValueError("coefficients must be rows of (k, a_k, b_k)")
            c.setflags(write=False)
            object.__setattr__(self, "coefficients", c)
        else:
            s = np.asarray(self.samples, dtype=float).ravel().copy()
            if s.size < 8:
                raise ValueError("table model needs at least 8 samples per period")
            s.setflags(write=False)
            object.__setattr__(self, "samples", s)

    @property
    def kind(self) -> str:
        return "fourier" if self.coefficients is not None else "table"

    def evaluate(self, t):
        """Signal value(s) at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        phase = np.mod(t / self.period, 1.0)
        if self.coefficients is not None:
            k, a, b = self.coefficients.T
            arg = 2 * np.pi * np.multiply.outer(phase, k)
            out = np.cos(arg) @ a + np.sin(arg) @ b
        else:
            n = self.samples.size
            pos = phase * n
            i = np.floor(pos).astype(int) % n
            frac = pos - np.floor(pos)
            out = (1 - frac) * self.samples[i] + frac * self.samples[(i + 1) % n]
        return out if out.ndim else float(out)

    __call__ = evaluate

    @cached_property
    def peak_to_peak(self) -> float:
        if self.samples is not None:
            v = self.samples
        else:
            kmax = max(1.0, float(np.abs(self.coefficients[:, 0]).max()))
            v = self.evaluate(np.linspace(0, self.period, int(64 * kmax) + 1))
        return float(v.max() - v.min())

    def tabulate(self, size: int) -> np.ndarray:
        """Values on the uniform grid ``j T / size``, ``j = 0..size-1``."""
        return self.evaluate(np.arange(size) * (self.period / size))

    def to_dict(self) -> dict:
        if self.coefficients is not None:
            return {"type": "fourier", "period": self.period,
                    "coefficients": self.coefficients.tolist()}
        return {"type": "table", "period": self.period, "samples": self.samples.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "PeriodicSignal":
        kind = doc.get("type")
        if kind == "fourier":
            return cls(float(doc["period"]), coefficients=np.asarray(doc["coefficients"]))
        if kind == "table":
            return cls(float(doc["period"]), samples=np.asarray(doc["samples"]))
        raise ValueError(f"unknown signal type {kind!r}")

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "PeriodicSignal":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class SampleTrain:
    values: np.ndarray
    tau: float
    start_time: float | None = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size < 2:
            raise ValueError("a sample train needs d >= 2 samples")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.values.size


def fourier_signal(period: float, terms) -> PeriodicSignal:
    """Build a Fourier-model signal from ``(k, a_k, b_k)`` triples."""
    return PeriodicSignal(period, coefficients=np.asarray(terms, dtype=float))


def sine(period: float = 1.0, amplitude: float = 1.0) -> PeriodicSignal:
    return fourier_signal(period, [(1, 0.0, amplitude)])


def train_matrix(signal: PeriodicSignal, t, tau: float, d: int) -> np.ndarray:
    """Trains for many start times at once, shape ``(len(t), d)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return signal.evaluate(t[:, None] + tau * np.arange(d)[None, :])


def extract_train(signal: PeriodicSignal, t: float, tau: float, d: int) -> SampleTrain:
    """The ``d`` samples ``s(t), s(t + tau), ..., s(t + (d-1) tau)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not tau > 0:
        raise ValueError("tau must be positive")
    return SampleTrain(train_matrix(signal, t, tau, d)[0], tau, start_time=float(t))


def _chirp_shape(x: np.ndarray) -> np.ndarray:
    phase = CHIRP_F0 * x + CHIRP_SWEEP * x**2 / 2
    w = np.ones_like(x)
    head = x < CHIRP_TAPER
    tail = x > 1 - CHIRP_TAPER
    w[head] = np.sin(np.pi * x[head] / (2 * CHIRP_TAPER)) ** 2
    w[tail] = np.sin(np.pi * (1 - x[tail]) / (2 * CHIRP_TAPER)) ** 2
    return np.sin(2 * np.pi * phase) * w


def make_chirp_like(period: float = 1.0) -> PeriodicSignal:
    """Fixed chirp-like table signal with 4 V peak-to-peak.

    The sweep runs from 1 to 2.5 cycles per period; a sin^2 taper over the
    first and last fifth of the period makes the periodic extension C1.
    Its 3-sample trains at ``tau = 0.39 T`` trace a closed curve whose
    non-adjacent branches stay about 1 V apart.
    """
    if not period > 0:
        raise ValueError("period must be positive")
    x = np.arange(CHIRP_TABLE_SIZE) / CHIRP_TABLE_SIZE
    v = _chirp_shape(x)
    v = v - (v.max() + v.min()) / 2
    v *= CHIRP_PEAK_TO_PEAK / (v.max() - v.min())
    return PeriodicSignal(period, samples=v)
