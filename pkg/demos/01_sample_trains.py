"""
Sample trains from an undersampled waveform
===========================================

A scope that fires every tau seconds, with tau a large fraction of the
signal period, records short trains of d samples.  Each train is a point in
R^d, and many trains started at random times trace a closed curve.
"""

import numpy as np

from periodrecon import NoiseModel, extract_train, make_chirp_like, sample_cloud

# A 1-second chirp-like test waveform, 4 V peak to peak.
signal = make_chirp_like(period=1.0)
print("peak to peak:", signal.peak_to_peak)

# One train of 3 samples, spaced 0.39 s apart, starting at t = 0.1.
train = extract_train(signal, 0.1, tau=0.39, d=3)
print("one train:", np.round(train.values, 4))

# Twenty thousand trains with random start times and 0.02 V of total noise.
cloud = sample_cloud(signal, tau=0.39, d=3, n=20_000, noise=NoiseModel(0.02), seed=1)
print("cloud:", cloud.points.shape, "spread per coordinate:", np.round(cloud.points.std(axis=0), 3))

# The noise is split evenly across coordinates: sigma^2 is the total variance.
clean = sample_cloud(signal, tau=0.39, d=3, n=20_000, seed=1)
print("mean squared noise:", np.mean(np.sum((cloud.points - clean.points) ** 2, axis=1)))

# Quantized scopes round every sample to a multiple of the step.
coarse = sample_cloud(signal, tau=0.39, d=3, n=5, quantization_step=0.02, seed=2)
print(coarse.points)

# Clouds travel as CSV with a one-line header.
print(coarse.to_csv().splitlines()[0])
