from collections import namedtuple

import numpy as np
import scipy.special

from . import ClassifierError, TrainedModel, check_training, training_arrays

GnbParams = namedtuple('GnbParams', ['var_floor'])


def gnb_params(var_floor=1e-9):
    if not var_floor > 0:
        raise ClassifierError('var_floor must be > 0, got {}'.format(var_floor))
    return GnbParams(var_floor=float(var_floor))


class GaussianNBModel(TrainedModel):
    """Per-class independent normals with priors from training frequencies."""

    name = 'gnb'

    def __init__(self, params, priors, means, variances):
        super(GaussianNBModel, self).__init__(params)
        self.priors = priors
        self.means = means
        self.variances = variances

    def joint_log_likelihood(self, X):
        X = np.asarray(X, dtype=np.float64)
        columns = []
        for c in (0, 1):
            log_density = -0.5 * np.log(2.0 * np.pi * self.variances[c]) - (X - self.means[c]) ** 2 / (2.0 * self.variances[c])
            columns.append(np.log(self.priors[c]) + log_density.sum(axis=1))
        return np.column_stack(columns)

    def predict_proba(self, X):
        jll = self.joint_log_likelihood(X)
        return np.exp(jll - scipy.special.logsumexp(jll, axis=1, keepdims=True))

    def predict_scores(self, X):
        return self.predict_proba(X)[:, 1]

    def state(self):
        return {'priors': self.priors, 'means': self.means, 'variances': self.variances}


def fit_gnb(X, y, params):
    X, y = check_training(X, y)
    priors = np.array([np.mean(y == c) for c in (0, 1)])
    means = np.array([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.maximum(np.array([X[y == c].var(axis=0) for c in (0, 1)]), params.var_floor)
    return GaussianNBModel(params, priors, means, variances)


def train_gnb(dataset, params=None):
    return fit_gnb(*training_arrays(dataset), params=params or gnb_params())
