from collections import namedtuple

import numpy as np
import scipy.spatial.distance

from . import ClassifierError, TrainedModel, check_training, training_arrays

KnnParams = namedtuple('KnnParams', ['k'])

QUERY_CHUNK = 256


def knn_params(k=5):
    if int(k) < 1:
        raise ClassifierError('knn needs k >= 1, got {}'.format(k))
    return KnnParams(k=int(k))


class KnnModel(TrainedModel):
    """
    Brute-force Euclidean k nearest neighbors.

    The score is the positive share of the k votes; ties in distance go to the lower
    training index, and an even split of the votes predicts 0.
    """

    name = 'knn'

    def __init__(self, params, X, y):
        super(KnnModel, self).__init__(params)
        self.X = X
        self.y = y
        self.X.setflags(write=False)
        self.y.setflags(write=False)
        # strict majority: more than k/2 positive votes
        self.threshold = (params.k // 2 + 1) / float(params.k)

    def votes(self, X):
        X = np.asarray(X, dtype=np.float64)
        votes = np.empty(len(X), dtype=np.int64)
        for start in range(0, len(X), QUERY_CHUNK):
            distances = scipy.spatial.distance.cdist(X[start:start + QUERY_CHUNK], self.X, 'sqeuclidean')
            nearest = np.argsort(distances, axis=1, kind='stable')[:, :self.params.k]
            votes[start:start + QUERY_CHUNK] = self.y[nearest].sum(axis=1)
        return votes

    def predict_scores(self, X):
        return self.votes(X) / float(self.params.k)

    def predict_labels(self, X):
        return (2 * self.votes(X) > self.params.k).astype(np.int64)

    def state(self):
        return {'n_train': len(self.y)}


def fit_knn(X, y, params):
    X, y = check_training(X, y)
    if len(X) < params.k:
        raise ClassifierError('knn with k={} needs at least {} training rows, got {}'.format(params.k, params.k, len(X)))
    return KnnModel(params, X.copy(), y.copy())


def train_knn(dataset, params=None):
    return fit_knn(*training_arrays(dataset), params=params or knn_params())
