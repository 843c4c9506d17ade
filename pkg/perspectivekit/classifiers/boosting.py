"""
Gradient-boosted regression trees on the logistic loss.

Each round fits a depth-limited SSE tree to the residuals y - p and replaces its leaf
values by the Newton step sum(y - p) / sum(p (1 - p)), shrunk by the learning rate.
A round whose step would raise the training log-loss is halved until it does not.
"""

from collections import namedtuple

import numpy as np
import scipy.special

from .. import config
from . import ClassifierError, TrainedModel, check_training, training_arrays
from .tree import grow_tree

log = config.log

GbtParams = namedtuple('GbtParams', ['n_rounds', 'max_depth', 'learning_rate', 'min_samples_leaf'])

HESSIAN_FLOOR = 1e-12
MAX_HALVINGS = 30


def gbt_params(n_rounds=100, max_depth=3, learning_rate=0.1, min_samples_leaf=1):
    if int(n_rounds) < 1:
        raise ClassifierError('n_rounds must be >= 1, got {}'.format(n_rounds))
    if int(max_depth) < 1:
        raise ClassifierError('max_depth must be >= 1, got {}'.format(max_depth))
    if not 0.0 < learning_rate <= 1.0:
        raise ClassifierError('learning_rate must be in (0, 1], got {}'.format(learning_rate))
    if int(min_samples_leaf) < 1:
        raise ClassifierError('min_samples_leaf must be >= 1, got {}'.format(min_samples_leaf))
    return GbtParams(int(n_rounds), int(max_depth), float(learning_rate), int(min_samples_leaf))


def log_loss(y, margin):
    # mean of log(1 + e^F) - y F
    return float(np.mean(np.logaddexp(0.0, margin) - y * margin))


class GradientBoostingModel(TrainedModel):
    """The score is the sigmoid of the summed tree outputs."""

    name = 'gbt'

    def __init__(self, params, base_margin, trees, loss_curve):
        super(GradientBoostingModel, self).__init__(params)
        self.base_margin = base_margin
        self.trees = trees
        self.loss_curve = loss_curve

    def decision_function(self, X):
        margin = np.full(len(X), self.base_margin)
        for tree in self.trees:
            margin += tree.predict_value(X)
        return margin

    def predict_scores(self, X):
        return scipy.special.expit(self.decision_function(np.asarray(X, dtype=np.float64)))

    def state(self):
        return {
            'base_margin': self.base_margin,
            'trees': [tree.to_document() for tree in self.trees],
            'loss_curve': self.loss_curve,
        }


def fit_gbt(X, y, params):
    X, y = check_training(X, y)
    yf = y.astype(np.float64)
    prior = yf.mean()
    base_margin = float(np.log(prior / (1.0 - prior)))
    margin = np.full(len(X), base_margin)
    loss = log_loss(yf, margin)
    loss_curve = [loss]
    trees = []
    for _ in range(params.n_rounds):
        p = scipy.special.expit(margin)
        residual = yf - p
        tree = grow_tree(X, residual, params.max_depth, params.min_samples_leaf, criterion='sse')
        leaves = tree.apply(X)
        hessian = p * (1.0 - p)
        for leaf in np.unique(leaves):
            rows = leaves == leaf
            tree.value[leaf] = params.learning_rate * residual[rows].sum() / max(hessian[rows].sum(), HESSIAN_FLOOR)

        step = tree.value[leaves]
        scale = 1.0
        candidate = log_loss(yf, margin + step)
        halvings = 0
        while candidate > loss and halvings < MAX_HALVINGS:
            scale /= 2.0
            halvings += 1
            candidate = log_loss(yf, margin + scale * step)
        if candidate > loss:
            scale, candidate = 0.0, loss
        if scale != 1.0:
            log.debug('boosting round %d: step scaled by %g' % (len(trees) + 1, scale))
            tree.value = tree.value * scale
        margin = margin + scale * step
        loss = candidate
        loss_curve.append(loss)
        trees.append(tree)
    return GradientBoostingModel(params, base_margin, trees, loss_curve)


def train_gbt(dataset, params=None):
    return fit_gbt(*training_arrays(dataset), params=params or gbt_params())
