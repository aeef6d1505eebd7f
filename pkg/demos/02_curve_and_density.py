"""
From a point cloud to a uniform-time curve
==========================================

The cloud is thinned to a closed chain of nodes, the chain is smoothed into
a periodic spline, and the point density along the spline tells how fast
the signal moves there.  Inverting that density re-times the curve so that
equal steps correspond to equal time.
"""

import numpy as np

from periodrecon import (NoiseModel, build_chain, estimate_density, fit_closed_curve,
                         invert_density, make_chirp_like, sample_cloud)
from periodrecon.curve import densify, hausdorff
from periodrecon.signal_model import train_matrix

signal = make_chirp_like()
sigma = 0.02
radius = 5 * sigma
cloud = sample_cloud(signal, 0.39, 3, 20_000, NoiseModel(sigma), seed=3)

# Stage one: a closed chain of nodes roughly 0.75 R apart.
chain = build_chain(cloud, radius)
print("chain nodes:", len(chain.distinct_nodes))

truth = train_matrix(signal, np.arange(100_000) / 100_000, 0.39, 3)
print("distance to the true curve:", round(hausdorff(densify(chain.nodes, radius / 10), truth), 4))

# A periodic spline through the nodes, addressed by arc length.
curve = fit_closed_curve(chain)
print("curve length:", round(curve.length, 3))
u = np.linspace(0, curve.length, 5)
print("unit speed check:", np.round(np.linalg.norm(curve.tangent(u), axis=1), 6))

# Stage two: counts of cloud points within R of every node.
profile = estimate_density(cloud, curve, radius=radius)
print("density range per unit length:", profile.values.min().round(4), profile.values.max().round(4))

# Slow stretches of the waveform collect more points; the warp undoes that.
timed = invert_density(profile, curve)
x = np.linspace(0, 1, 6)
print("warp r(x):", np.round(timed.warp(x), 4))
