"""Density of the sample trains along a reconstructed curve.

The density is estimated from the number of cloud points within ``R`` of each
chain node, interpolated linearly in arc length and normalized to unit mass
over the closed curve.  Inverting its CDF gives the reparametrization under
which a uniformly distributed phase moves along the curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curve import ClosedCurve, PolygonalChain
from .errors import EmptyNeighborhood, NonInvertible

DEFAULT_GRID = 4096


@dataclass
class DensityProfile:
    """Cyclic piecewise-linear PDF over arc length ``[0, length)``.

    ``anchors`` are the arc lengths of the distinct chain nodes, starting at
    0; ``counts`` the (unnormalized) density values there.  The segment from
    the last anchor back to ``length`` closes the loop.
    """

    anchors: np.ndarray
    counts: np.ndarray
    length: float

    def __post_init__(self):
        self.anchors = np.asarray(self.anchors, dtype=float)
        self.counts = np.asarray(self.counts, dtype=float)
        if self.anchors.shape != self.counts.shape:
            raise ValueError("anchors and counts must have the same length")
        if np.any(np.diff(self.anchors) <= 0) or self.anchors[-1] >= self.length:
            raise ValueError("anchors must increase strictly within [0, length)")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        # Closed knot vector with the wrap-around anchor at ``length``.
        self._u = np.append(self.anchors, self.length)
        c = np.append(self.counts, self.counts[0])
        self.normalization = float(np.sum(np.diff(self._u) * (c[:-1] + c[1:]) / 2))
        if not self.normalization > 0:
            raise NonInvertible("density is zero everywhere")
        self._f = c / self.normalization
        seg = np.diff(self._u) * (self._f[:-1] + self._f[1:]) / 2
        self._cdf = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def values(self) -> np.ndarray:
        """Normalized PDF at the anchors."""
        return self._f[:-1]

    def pdf(self, u):
        return np.interp(np.mod(u, self.length), self._u, self._f)

    def cdf(self, u):
        """Accumulated mass on ``[0, u]`` for ``u`` in ``[0, length]``."""
        u = np.clip(np.asarray(u, dtype=float), 0.0, self.length)
        j = np.clip(np.searchsorted(self._u, u, side="right") - 1, 0, len(self._u) - 2)
        s = u - self._u[j]
        h = self._u[j + 1] - self._u[j]
        g = self._f[j + 1] - self._f[j]
        return self._cdf[j] + self._f[j] * s + g * s**2 / (2 * h)

    def inverse_cdf(self, x):
        """Arc length ``u`` with ``cdf(u) = x``, solved per segment in closed form."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        j = np.clip(np.searchsorted(self._cdf, x, side="right") - 1, 0, len(self._u) - 2)
        y = x - self._cdf[j]
        h = self._u[j + 1] - self._u[j]
        f0 = self._f[j]
        g = self._f[j + 1] - f0
        # Root of g/(2h) s^2 + f0 s - y = 0 in the cancellation-free form.
        disc = np.sqrt(np.maximum(f0**2 + 2 * g * y / h, 0.0))
        denom = f0 + disc
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(denom > 0, 2 * y / denom, 0.0)
        return self._u[j] + np.clip(s, 0.0, h)

    def check_invertible(self, grid: int = DEFAULT_GRID) -> None:
        zero = (self._f[:-1] == 0) & (self._f[1:] == 0)
        widest = np.diff(self._u)[zero].max(initial=0.0)
        if widest > self.length / grid:
            raise NonInvertible(
                f"density vanishes on an arc of length {widest:.4g} "
                f"(> L/{grid}); the warp is not invertible")

    def to_dict(self) -> dict:
        return {"anchors": self.anchors.tolist(), "counts": self.counts.tolist(),
                "length": self.length, "normalization": self.normalization}

    @classmethod
    def from_dict(cls, doc: dict) -> "DensityProfile":
        return cls(np.asarray(doc["anchors"]), np.asarray(doc["counts"]), float(doc["length"]))


def neighbourhood_counts(points: np.ndarray, centres: np.ndarray, radius: float) -> np.ndarray:
    """Number of ``points`` within closed distance ``radius`` of each centre."""
    return cKDTree(points).query_ball_point(centres, radius, return_length=True)


def estimate_density(cloud, curve: ClosedCurve, chain: PolygonalChain | None = None,
                     radius: float = None) -> DensityProfile:
    """Density along ``curve`` from R-neighbourhood counts at the chain nodes.

    The curve interpolates its chain, so the node preimages are the spline
    knots' arc lengths; ``chain`` defaults to the one the curve was built from.
    """
    if radius is None or not radius > 0:
        raise ValueError("a positive radius is required")
    chain = chain or curve.chain
    points = np.asarray(getattr(cloud, "points", cloud), dtype=float)
    nodes = chain.distinct_nodes
    if chain is curve.chain:
        anchors = curve.anchors[:-1]
    else:
        anchors = np.array([curve.project(p) for p in nodes])
        order = np.argsort(anchors)
        anchors, nodes = anchors[order], nodes[order]
    counts = neighbourhood_counts(points, nodes, radius)
    if np.any(counts == 0):
        empty = int(np.sum(counts == 0))
        raise EmptyNeighborhood(
            f"{empty} chain node(s) have no cloud points within R; "
            "R is too small for this number of points")
    return DensityProfile(anchors, counts, curve.length)


class UniformTimeCurve:
    """The base curve re-timed so that equal steps in ``x`` carry equal mass.

    ``curve(x) = base(L * r(x))`` where ``r`` inverts the normalized CDF; it
    is 1-periodic in ``x``.
    """

    def __init__(self, base: ClosedCurve, profile: DensityProfile, grid: int = DEFAULT_GRID):
        profile.check_invertible(grid)
        self.base = base
        self.profile = profile
        self.grid = grid

    @property
    def dim(self) -> int:
        return self.base.dim

    def warp(self, x):
        """r(x), extended by ``r(x + 1) = r(x) + 1``."""
        x = np.asarray(x, dtype=float)
        whole = np.floor(x)
        return whole + self.profile.inverse_cdf(x - whole) / self.base.length

    def warp_table(self) -> np.ndarray:
        """r on the closed grid ``j / grid``, ``j = 0..grid``."""
        return self.warp(np.arange(self.grid + 1) / self.grid)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        frac = x - np.floor(x)
        return self.base(self.profile.inverse_cdf(frac))

    def tabulate(self, size: int) -> np.ndarray:
        return self(np.arange(size) / size)


def invert_density(profile: DensityProfile, curve: ClosedCurve,
                   grid: int = DEFAULT_GRID) -> UniformTimeCurve:
    return UniformTimeCurve(curve, profile, grid)
