"""Closed-curve reconstruction from a point cloud.

:func:`build_chain` turns a noisy cloud into an ordered closed polygonal chain
with node spacing of the order of the radius ``R``; :func:`fit_closed_curve`
interpolates the chain with a periodic cubic spline and reparametrizes it by
arc length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import ChainNotClosed, MultipleComponents, NotClosed, TooFewPoints

DENOISE_ITERATIONS = 3
# Components with fewer nodes than this are treated as stray noise.
MIN_COMPONENT_NODES = 3
# Degree of the local polynomial fit that places the final nodes, and the
# number of raw points needed before it is trusted.
FIT_DEGREE = 4
MIN_FIT_POINTS = 12
ARC_SAMPLES_PER_SEGMENT = 16
# Thinning spacing as a fraction of R; keeps node gaps inside [R/2, 2R].
THIN_FRACTION = 0.75


@dataclass
class PolygonalChain:
    """Ordered chain nodes; a closed chain repeats its first node at the end."""

    nodes: np.ndarray
    closed: bool

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))

    @classmethod
    def from_cycle(cls, cycle) -> "PolygonalChain":
        cycle = np.atleast_2d(np.asarray(cycle, dtype=float))
        return cls(np.vstack([cycle, cycle[:1]]), True)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def distinct_nodes(self) -> np.ndarray:
        return self.nodes[:-1] if self.closed else self.nodes

    def reversed(self) -> "PolygonalChain":
        """Same chain traversed backwards, still starting at the first node."""
        cyc = self.distinct_nodes
        if not self.closed:
            return PolygonalChain(cyc[::-1].copy(), False)
        return PolygonalChain.from_cycle(np.vstack([cyc[:1], cyc[:0:-1]]))

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.nodes, axis=0), axis=1)

    def to_dict(self) -> dict:
        return {"nodes": self.nodes.tolist(), "closed": self.closed}

    @classmethod
    def from_dict(cls, doc: dict) -> "PolygonalChain":
        return cls(np.asarray(doc["nodes"]), bool(doc["closed"]))


def _open_ball_radius(radius: float) -> float:
    return float(np.nextafter(radius, 0.0))


def _denoise(points: np.ndarray, radius: float, iterations: int) -> np.ndarray:
    """Pull each point towards the centroid of its R-neighbourhood, across the curve only.

    The shift is projected off the neighbourhood's principal direction, so
    points are not drawn along the curve into denser stretches (which would
    open gaps where the density is low).  Neighbourhoods are taken in the
    original cloud; only the centres move.
    """
    n, d = points.shape
    tree = cKDTree(points)
    r = _open_ball_radius(radius)
    outer = (points[:, :, None] * points[:, None, :]).reshape(n, d * d)
    out = points
    for _ in range(iterations):
        adj = cKDTree(out).sparse_distance_matrix(tree, r, output_type="coo_matrix").tocsr()
        adj.data[:] = 1.0
        count = np.asarray(adj.sum(axis=1)).ravel()
        ok = count >= 2
        mean = (adj @ points)[ok] / count[ok, None]
        cov = (adj @ outer)[ok].reshape(-1, d, d) / count[ok, None, None]
        cov -= mean[:, :, None] * mean[:, None, :]
        tangent = np.linalg.eigh(cov)[1][:, :, -1]
        shift = mean - out[ok]
        shift -= np.sum(shift * tangent, axis=1, keepdims=True) * tangent
        out = out.copy()
        out[ok] += shift
    return out


def _farthest_point_subsample(points: np.ndarray, spacing: float) -> np.ndarray:
    """Indices of a greedy farthest-point subsample with covering radius < spacing.

    Starts from the lexicographically smallest point so the result does not
    depend on the order of the input.
    """
    start = int(np.lexsort(points.T[::-1])[0])
    chosen = [start]
    dist = np.linalg.norm(points - points[start], axis=1)
    while True:
        far = int(np.argmax(dist))
        if dist[far] < spacing:
            return np.array(chosen)
        chosen.append(far)
        np.minimum(dist, np.linalg.norm(points - points[far], axis=1), out=dist)


def _nearest_neighbour_cycle(nodes: np.ndarray, radius: float) -> np.ndarray:
    n = len(nodes)
    visited = np.zeros(n, dtype=bool)
    order = [0]
    visited[0] = True
    for _ in range(n - 1):
        d = np.linalg.norm(nodes - nodes[order[-1]], axis=1)
        d[visited] = np.inf
        nxt = int(np.argmin(d))
        if d[nxt] > 2 * radius:
            raise NotClosed(
                f"chain breaks after {len(order)} of {n} nodes (gap {d[nxt]:.4g} > 2R); "
                "R may be too large or the cloud too sparse")
        order.append(nxt)
        visited[nxt] = True
    gap = np.linalg.norm(nodes[order[-1]] - nodes[order[0]])
    if gap > 2 * radius:
        raise NotClosed(f"chain endpoints are {gap:.4g} apart (> 2R)")
    return np.array(order)


def _local_fit(node: np.ndarray, nbr_points: np.ndarray) -> np.ndarray:
    """Move ``node`` onto a polynomial fitted to nearby raw points.

    The normal offsets are regressed on the coordinate along the
    neighbourhood's principal direction.  Unlike a centroid this does not pull
    nodes towards the inside of a bend; a quartic leaves a bias of order R^6
    times the curvature derivatives.
    """
    if len(nbr_points) < MIN_FIT_POINTS:
        return nbr_points.mean(axis=0) if len(nbr_points) else node
    centre = nbr_points.mean(axis=0)
    rel = nbr_points - centre
    _, _, vt = np.linalg.svd(rel, full_matrices=False)
    tangent = vt[0]
    s = rel @ tangent
    normal = rel - np.outer(s, tangent)
    scale = np.abs(s).max()
    design = np.vander(s / scale, FIT_DEGREE + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(design, normal, rcond=None)
    s0 = (node - centre) @ tangent
    basis = (s0 / scale) ** np.arange(FIT_DEGREE + 1)
    return centre + s0 * tangent + basis @ coef


def build_chain(cloud, radius: float,
                denoise_iterations: int = DENOISE_ITERATIONS) -> PolygonalChain:
    """Approximate the cloud by a single closed polygonal chain.

    Steps: local-average denoising, farthest-point thinning at spacing
    ``0.75 * radius``, nearest-neighbour ordering, closure check, and a final
    local polynomial fit of each node against the raw points within
    ``radius``.

    Raises
    ------
    TooFewPoints
        The cloud is too sparse or too concentrated to carry a curve.
    MultipleComponents
        More than one separated chain survives.
    NotClosed
        The ordered nodes cannot be joined into a loop with gaps <= 2R.
    """
    points = np.asarray(getattr(cloud, "points", cloud), dtype=float)
    if not radius > 0:
        raise ValueError("radius must be positive")
    n = len(points)
    if n < 4:
        raise TooFewPoints(f"{n} points cannot define a closed curve")
    tree = cKDTree(points)
    nbr_counts = tree.query_ball_point(points, 2 * radius, return_length=True) - 1
    if np.median(nbr_counts) < 2:
        raise TooFewPoints(
            f"median point has {np.median(nbr_counts):g} neighbours within 2R; "
            "the cloud is too sparse for this radius")

    smooth = _denoise(points, radius, denoise_iterations)
    nodes = smooth[_farthest_point_subsample(smooth, THIN_FRACTION * radius)]

    m = len(nodes)
    pairs = cKDTree(nodes).query_pairs(2 * radius, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    ncomp, labels = connected_components(graph, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    keep = np.flatnonzero(sizes >= MIN_COMPONENT_NODES)
    if len(keep) == 0:
        raise TooFewPoints("all points lie in a region too small to carry a curve")
    if len(keep) > 1:
        raise MultipleComponents(f"{len(keep)} separate chains found")
    nodes = nodes[labels == keep[0]]
    if len(nodes) < 4:
        raise TooFewPoints(f"only {len(nodes)} chain nodes; the cloud is too concentrated")

    nodes = nodes[_nearest_neighbour_cycle(nodes, radius)]

    r = _open_ball_radius(radius)
    nodes = np.array([_local_fit(p, points[idx])
                      for p, idx in zip(nodes, tree.query_ball_point(nodes, r))])
    return PolygonalChain.from_cycle(nodes)


class ClosedCurve:
    """Periodic cubic spline through a closed chain, addressed by arc length.

    ``curve(u)`` evaluates the unit-speed parametrization, which is periodic
    in ``u`` with period :attr:`length` and starts at the chain's first node.
    """

    def __init__(self, chain: PolygonalChain,
                 samples_per_segment: int = ARC_SAMPLES_PER_SEGMENT):
        if not chain.closed:
            raise ChainNotClosed("the chain must be closed")
        nodes = chain.nodes
        if len(nodes) < 5:
            raise ChainNotClosed("a closed chain needs at least 4 distinct nodes")
        chords = np.linalg.norm(np.diff(nodes, axis=0), axis=1)
        if np.any(chords == 0):
            raise ValueError("consecutive chain nodes must be distinct")
        self.chain = chain
        self.knots = np.concatenate([[0.0], np.cumsum(chords)])
        self.spline = CubicSpline(self.knots, nodes, bc_type="periodic")
        self._dspline = self.spline.derivative()

        k = samples_per_segment
        p = np.concatenate([
            np.linspace(a, b, k, endpoint=False) for a, b in zip(self.knots[:-1], self.knots[1:])
        ] + [self.knots[-1:]])
        speed = np.linalg.norm(self._dspline(p), axis=1)
        u = cumulative_simpson(speed, x=p, initial=0.0)
        # Inverse table u -> p as a Hermite cubic with the exact slope 1/speed.
        self._inverse = CubicHermiteSpline(u, p, 1.0 / speed)
        self._dinverse = self._inverse.derivative()
        self.length = float(u[-1])
        self.anchors = u[::k]

    @property
    def dim(self) -> int:
        return self.chain.dim

    @property
    def param_period(self) -> float:
        return float(self.knots[-1])

    def parameter(self, u):
        """Spline parameter at arc length ``u``."""
        u = np.mod(np.asarray(u, dtype=float), self.length)
        return self._inverse(u)

    def __call__(self, u):
        return self.spline(self.parameter(u))

    def tangent(self, u):
        """Derivative of the arc-length parametrization."""
        u = np.mod(np.asarray(u, dtype=float), self.length)
        return self._dspline(self._inverse(u)) * self._dinverse(u)[..., None]

    def sample(self, count: int) -> np.ndarray:
        """``count`` points equally spaced in arc length."""
        return self(np.arange(count) * (self.length / count))

    def project(self, point) -> float:
        return project_to_curve(self, point)

    def to_dict(self) -> dict:
        return {"nodes": self.chain.nodes.tolist(), "closed": True,
                "knots": self.knots.tolist(), "length": self.length}

    @classmethod
    def from_dict(cls, doc: dict) -> "ClosedCurve":
        return cls(PolygonalChain(np.asarray(doc["nodes"]), True))


def fit_closed_curve(chain: PolygonalChain) -> ClosedCurve:
    """Interpolate a closed chain with a periodic cubic spline, unit speed."""
    return ClosedCurve(chain)


def project_to_curve(curve: ClosedCurve, point, grid: int | None = None) -> float:
    """Arc length of the curve point nearest to ``point``.

    A coarse scan at 8 samples per chain segment picks the basin; Brent's
    method then refines within one coarse step on either side.
    """
    point = np.asarray(point, dtype=float)
    grid = grid or 8 * (len(curve.knots) - 1)
    u = np.arange(grid) * (curve.length / grid)
    d2 = np.sum((curve(u) - point) ** 2, axis=1)
    best = int(np.argmin(d2))
    step = curve.length / grid
    res = minimize_scalar(lambda v: float(np.sum((curve(v) - point) ** 2)),
                          bounds=(u[best] - step, u[best] + step), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, curve.length)})
    cand = res.x if res.fun <= d2[best] else u[best]
    return float(np.mod(cand, curve.length))


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return float(max(cKDTree(b).query(a)[0].max(), cKDTree(a).query(b)[0].max()))


def densify(polyline, spacing: float) -> np.ndarray:
    """Points along a polyline with gaps no larger than ``spacing``."""
    polyline = np.asarray(polyline, dtype=float)
    out = [polyline[:1]]
    for a, b in zip(polyline[:-1], polyline[1:]):
        k = max(1, int(np.ceil(np.linalg.norm(b - a) / spacing)))
        w = np.arange(1, k + 1)[:, None] / k
        out.append(a + w * (b - a))
    return np.vstack(out)
