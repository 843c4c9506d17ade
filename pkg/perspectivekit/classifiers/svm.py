from collections import namedtuple

import numpy as np

from .. import util
from . import ClassifierError, TrainedModel, check_training, training_arrays

SvmParams = namedtuple('SvmParams', ['lam', 'epochs', 'seed'])


def svm_params(lam=1e-4, epochs=200, seed=0):
    if not lam > 0:
        raise ClassifierError('lam must be > 0, got {}'.format(lam))
    if int(epochs) < 1:
        raise ClassifierError('epochs must be >= 1, got {}'.format(epochs))
    return SvmParams(lam=float(lam), epochs=int(epochs), seed=int(seed))


def _augment(X):
    X = np.asarray(X, dtype=np.float64)
    return np.column_stack([X, np.ones(len(X))])


def objective(w, Xa, signs, lam):
    """lam/2 ||w||^2 + mean hinge loss."""
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, 1.0 - signs * (Xa @ w))))


class LinearSvmModel(TrainedModel):
    """Margin w.x + b; positive margins predict 1."""

    name = 'svm'
    threshold = 0.0

    def __init__(self, params, weights, loss_curve):
        super(LinearSvmModel, self).__init__(params)
        self.weights = weights
        self.loss_curve = loss_curve

    def predict_scores(self, X):
        return _augment(X) @ self.weights

    def state(self):
        return {'weights': self.weights[:-1], 'bias': float(self.weights[-1]), 'loss_curve': self.loss_curve}


def fit_linear_svm(X, y, params):
    """
    Hinge loss with L2 penalty by stochastic subgradient steps (step 1/(lam t)).

    Each epoch visits every row once in a seeded random order; the bias is the weight of
    a constant feature. Scores are in [0, 1] already, so nothing is rescaled. The model
    keeps the epoch-end weights with the lowest objective.
    """
    X, y = check_training(X, y)
    Xa = _augment(X)
    signs = 2.0 * y - 1.0
    rng = util.make_rng(params.seed)
    w = np.zeros(Xa.shape[1])
    t = 0
    loss_curve = []
    best_w, best_loss = None, np.inf
    for _ in range(params.epochs):
        for i in rng.permutation(len(Xa)):
            t += 1
            eta = 1.0 / (params.lam * t)
            margin = signs[i] * (Xa[i] @ w)
            w *= 1.0 - eta * params.lam
            if margin < 1.0:
                w += eta * signs[i] * Xa[i]
        loss = objective(w, Xa, signs, params.lam)
        loss_curve.append(loss)
        if loss < best_loss:
            best_w, best_loss = w.copy(), loss
    return LinearSvmModel(params, best_w, loss_curve)


def train_linear_svm(dataset, params=None):
    return fit_linear_svm(*training_arrays(dataset), params=params or svm_params())
