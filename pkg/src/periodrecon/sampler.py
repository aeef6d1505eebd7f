"""Noisy point clouds of sample trains.

Each point is the train of a signal started at a uniformly random phase, plus
radially symmetric noise, optionally quantized.  ``sigma**2`` is the *total*
noise variance (trace of the covariance), so a gaussian draw has per-coordinate
standard deviation ``sigma / sqrt(d)``.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidNoise, TauTooLarge
from .signal_model import PeriodicSignal, train_matrix

PROFILES = ("gaussian-isotropic", "uniform-ball")


@dataclass(frozen=True)
class NoiseModel:
    sigma: float = 0.0
    profile: str = "gaussian-isotropic"

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidNoise(f"sigma must be non-negative, got {self.sigma}")
        if self.profile not in PROFILES:
            raise InvalidNoise(f"unknown noise profile {self.profile!r}")

    def ball_radius(self, d: int) -> float:
        """Radius of the uniform ball whose total variance is sigma**2."""
        return self.sigma * math.sqrt((d + 2) / d)

    def normalizer(self, d: int) -> float:
        """Constant c_d in ``f_sigma(x) = c_d sigma**-d g(|x| / sigma)``.

        ``g`` is ``exp(-d rho**2 / 2)`` for the gaussian profile and the
        indicator of ``rho <= sqrt((d + 2) / d)`` for the uniform ball.
        """
        if self.profile == "gaussian-isotropic":
            return (d / (2 * math.pi)) ** (d / 2)
        rho = math.sqrt((d + 2) / d)
        unit_ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
        return 1.0 / (unit_ball * rho**d)

    def pdf(self, x) -> np.ndarray:
        """Noise density at points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        if self.sigma == 0:
            raise InvalidNoise("density of zero noise is a point mass")
        rho = np.linalg.norm(x, axis=-1) / self.sigma
        if self.profile == "gaussian-isotropic":
            g = np.exp(-d * rho**2 / 2)
        else:
            g = (rho <= math.sqrt((d + 2) / d)).astype(float)
        return self.normalizer(d) * self.sigma ** (-d) * g

    def draw(self, rng: np.random.Generator, n: int, d: int) -> np.ndarray:
        if self.sigma == 0:
            return np.zeros((n, d))
        if self.profile == "gaussian-isotropic":
            return rng.normal(scale=self.sigma / math.sqrt(d), size=(n, d))
        direction = rng.normal(size=(n, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = self.ball_radius(d) * rng.random(n) ** (1.0 / d)
        return direction * radius[:, None]


@dataclass
class PointCloud:
    points: np.ndarray
    tau: float
    seed: int | None = None
    quantization_step: float = 0.0
    start_times: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] < 1:
            raise ValueError("a point cloud needs at least one point")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        seed = "" if self.seed is None else self.seed
        buf.write(f"# tau={self.tau!r} d={self.dim} seed={seed}\n")
        np.savetxt(buf, self.points, delimiter=",", fmt="%.17g")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source, tau: float | None = None) -> "PointCloud":
        """Read a cloud file; ``source`` is a path or the file's text.

        ``tau`` overrides the header value and is required when the file has
        no header line.
        """
        text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
        header = {}
        lines = text.splitlines()
        if lines and lines[0].startswith("#"):
            for field in lines[0][1:].split():
                key, _, value = field.partition("=")
                header[key] = value
            lines = lines[1:]
        if tau is None:
            if not header.get("tau"):
                raise ValueError("cloud file has no tau header; pass tau explicitly")
            tau = float(header["tau"])
        seed = int(header["seed"]) if header.get("seed") else None
        points = np.loadtxt(io.StringIO("\n".join(lines)), delimiter=",", ndmin=2)
        if header.get("d") and points.shape[1] != int(header["d"]):
            raise ValueError("column count does not match header d")
        return cls(points, tau, seed=seed)


def sample_cloud(signal: PeriodicSignal, tau: float, d: int, n: int,
                 noise: NoiseModel | None = None, quantization_step: float = 0.0,
                 seed=None) -> PointCloud:
    """Draw ``n`` noisy ``d``-sample trains at uniformly random start times.

    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`
    (an int, a sequence of ints, or a ``SeedSequence``).
    """
    noise = noise or NoiseModel()
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if quantization_step < 0:
        raise ValueError("quantization_step must be non-negative")
    if tau >= signal.period / 2:
        warnings.warn(f"tau={tau} is not below half the period {signal.period}",
                      TauTooLarge, stacklevel=2)
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, signal.period, size=n)
    points = train_matrix(signal, t, tau, d) + noise.draw(rng, n, d)
    if quantization_step > 0:
        points = np.round(points / quantization_step) * quantization_step
    return PointCloud(points, tau, seed=seed if isinstance(seed, int) else None,
                      quantization_step=quantization_step, start_times=t)
