import os

import numpy as np

from perspectivekit.corpus import ATTRIBUTES, LabeledDataset

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')


def make_dataset(features, labels, name='test', ids=None):
    """Dataset from per-row features; rows shorter than nine values are zero-padded."""
    rows = [list(row) + [0.0] * (len(ATTRIBUTES) - len(row)) for row in features]
    ids = ids if ids is not None else [str(i) for i in range(len(rows))]
    return LabeledDataset(name, ids, np.array(rows, dtype=np.float64).reshape(len(rows), len(ATTRIBUTES)), labels)


def separable_dataset(n=40, seed=3, name='separable'):
    """Class 0 in [0, 0.3]^9, class 1 in [0.7, 1]^9, n/2 rows each."""
    rng = np.random.Generator(np.random.PCG64(seed))
    half = n // 2
    negatives = rng.uniform(0.0, 0.3, size=(half, len(ATTRIBUTES)))
    positives = rng.uniform(0.7, 1.0, size=(n - half, len(ATTRIBUTES)))
    return LabeledDataset(name, [str(i) for i in range(n)], np.vstack([negatives, positives]), [0] * half + [1] * (n - half))


def gaussian_dataset(n_majority, n_minority, majority_mean, minority_mean, sd, seed, name):
    rng = np.random.Generator(np.random.PCG64(seed))
    majority = rng.normal(majority_mean, sd, size=(n_majority, len(ATTRIBUTES)))
    minority = rng.normal(minority_mean, sd, size=(n_minority, len(ATTRIBUTES)))
    features = np.clip(np.vstack([majority, minority]), 0.0, 1.0)
    return LabeledDataset(name, [str(i) for i in range(n_majority + n_minority)], features,
                          [0] * n_majority + [1] * n_minority)
