"""
CART trees and random forests.

Splits are searched exhaustively at midpoints between sorted unique feature values; a
row goes left when x[feature] <= threshold. Equal gains keep the lowest feature index,
then the lowest threshold. Classification trees use Gini impurity, regression trees
(used by boosting) the sum of squared errors.
"""

from collections import namedtuple

import numpy as np

from .. import config
from . import ClassifierError, TrainedModel, check_training, training_arrays

log = config.log

GAIN_TIE = 1e-12
LEAF = -1

TreeParams = namedtuple('TreeParams', ['max_depth', 'min_samples_leaf'])
ForestParams = namedtuple('ForestParams', ['n_trees', 'max_features', 'bootstrap', 'max_depth', 'min_samples_leaf', 'seed'])


def _check_growth(max_depth, min_samples_leaf):
    if max_depth is not None and int(max_depth) < 1:
        raise ClassifierError('max_depth must be >= 1 or None, got {}'.format(max_depth))
    if int(min_samples_leaf) < 1:
        raise ClassifierError('min_samples_leaf must be >= 1, got {}'.format(min_samples_leaf))


def tree_params(max_depth=10, min_samples_leaf=2):
    _check_growth(max_depth, min_samples_leaf)
    return TreeParams(max_depth=None if max_depth is None else int(max_depth), min_samples_leaf=int(min_samples_leaf))


def forest_params(n_trees=100, max_features=3, bootstrap=True, max_depth=10, min_samples_leaf=2, seed=0):
    _check_growth(max_depth, min_samples_leaf)
    if int(n_trees) < 1:
        raise ClassifierError('n_trees must be >= 1, got {}'.format(n_trees))
    if max_features is not None and int(max_features) < 1:
        raise ClassifierError('max_features must be >= 1 or None, got {}'.format(max_features))
    return ForestParams(
        n_trees=int(n_trees),
        max_features=None if max_features is None else int(max_features),
        bootstrap=bool(bootstrap),
        max_depth=None if max_depth is None else int(max_depth),
        min_samples_leaf=int(min_samples_leaf),
        seed=int(seed),
    )


def gini_gains(ys, total):
    n = len(ys)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    pos_left = np.cumsum(ys)[:-1]
    p_left = pos_left / n_left
    p_right = (total - pos_left) / n_right
    p = total / float(n)
    weighted = (n_left * 2.0 * p_left * (1.0 - p_left) + n_right * 2.0 * p_right * (1.0 - p_right)) / n
    return 2.0 * p * (1.0 - p) - weighted


def sse_gains(ys, total):
    n = len(ys)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    s_left = np.cumsum(ys)[:-1]
    q = np.cumsum(ys ** 2)
    q_left = q[:-1]
    sse_left = q_left - s_left ** 2 / n_left
    sse_right = (q[-1] - q_left) - (total - s_left) ** 2 / n_right
    return (q[-1] - total ** 2 / n) - (sse_left + sse_right)


CRITERIA = {'gini': gini_gains, 'sse': sse_gains}


class Tree(object):
    """Flat binary tree; feature == LEAF marks a leaf."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def _add(self, value):
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(value))
        return len(self.value) - 1

    def freeze(self):
        for attr in ('feature', 'left', 'right'):
            setattr(self, attr, np.array(getattr(self, attr), dtype=np.int64))
        self.threshold = np.array(self.threshold, dtype=np.float64)
        self.value = np.array(self.value, dtype=np.float64)
        return self

    @property
    def n_leaves(self):
        return int(np.sum(self.feature == LEAF))

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        nodes = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            features = self.feature[nodes]
            internal = np.flatnonzero(features != LEAF)
            if not len(internal):
                return nodes
            current = nodes[internal]
            go_left = X[rows[internal], features[internal]] <= self.threshold[current]
            nodes[internal] = np.where(go_left, self.left[current], self.right[current])

    def predict_value(self, X):
        return self.value[self.apply(X)]

    def to_document(self):
        return {
            'feature': self.feature.tolist(),
            'threshold': self.threshold.tolist(),
            'left': self.left.tolist(),
            'right': self.right.tolist(),
            'value': self.value.tolist(),
        }


def best_split(X, y, indices, features, criterion, min_samples_leaf):
    """(gain, feature, threshold) of the best admissible split, or None."""
    gains_of = CRITERIA[criterion]
    best = None
    ys_all = y[indices]
    total = float(ys_all.sum())
    n = len(indices)
    sizes = np.arange(1, n)
    admissible_size = (sizes >= min_samples_leaf) & (n - sizes >= min_samples_leaf)
    for f in features:
        xs = X[indices, f]
        order = np.argsort(xs, kind='stable')
        xs = xs[order]
        valid = admissible_size & (xs[1:] > xs[:-1])
        if not valid.any():
            continue
        gains = np.where(valid, gains_of(ys_all[order], total), -np.inf)
        i = int(np.argmax(gains))
        if best is None or gains[i] > best[0] + GAIN_TIE:
            threshold = (xs[i] + xs[i + 1]) / 2.0
            if not xs[i] <= threshold < xs[i + 1]:
                threshold = xs[i]
            best = (float(gains[i]), int(f), float(threshold))
    return best


def grow_tree(X, y, max_depth, min_samples_leaf, criterion='gini', max_features=None, rng=None):
    """
    Grow a tree over (X, y); leaf values are node means of y.

    A node splits while it is impure, below max_depth and an admissible split exists,
    including zero-gain splits. With max_features set, each split draws that many
    candidate features from rng.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d = X.shape[1]
    tree = Tree()

    def build(indices, depth):
        ys = y[indices]
        node = tree._add(ys.mean())
        if np.all(ys == ys[0]) or len(indices) < 2 * min_samples_leaf:
            return node
        if max_depth is not None and depth >= max_depth:
            return node
        if max_features is None or max_features >= d:
            features = range(d)
        else:
            features = np.sort(rng.choice(d, size=max_features, replace=False))
        split = best_split(X, y, indices, features, criterion, min_samples_leaf)
        if split is None:
            return node
        _, feature, threshold = split
        mask = X[indices, feature] <= threshold
        tree.feature[node] = feature
        tree.threshold[node] = threshold
        tree.left[node] = build(indices[mask], depth + 1)
        tree.right[node] = build(indices[~mask], depth + 1)
        return node

    build(np.arange(len(X)), 0)
    return tree.freeze()


class DecisionTreeModel(TrainedModel):
    """The score is the positive share of the leaf a row falls into."""

    name = 'dtree'

    def __init__(self, params, tree):
        super(DecisionTreeModel, self).__init__(params)
        self.tree = tree

    def predict_scores(self, X):
        return self.tree.predict_value(X)

    def state(self):
        return {'tree': self.tree.to_document()}


class RandomForestModel(TrainedModel):
    """Majority vote of the trees' hard predictions; half the votes predicts 1."""

    name = 'rforest'

    def __init__(self, params, trees):
        super(RandomForestModel, self).__init__(params)
        self.trees = trees

    def predict_scores(self, X):
        votes = [(tree.predict_value(X) >= 0.5).astype(np.float64) for tree in self.trees]
        return np.mean(votes, axis=0)

    def state(self):
        return {'trees': [tree.to_document() for tree in self.trees]}


def fit_dtree(X, y, params):
    X, y = check_training(X, y)
    return DecisionTreeModel(params, grow_tree(X, y, params.max_depth, params.min_samples_leaf))


def fit_rforest(X, y, params):
    X, y = check_training(X, y)
    n = len(X)
    trees = []
    # one independent stream per tree, so trees do not depend on each other's draws
    for child in np.random.SeedSequence(params.seed).spawn(params.n_trees):
        rng = np.random.Generator(np.random.PCG64(child))
        rows = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
        trees.append(grow_tree(X[rows], y[rows], params.max_depth, params.min_samples_leaf,
                               max_features=params.max_features, rng=rng))
    log.debug('grew %d trees, %d leaves in total' % (len(trees), sum(t.n_leaves for t in trees)))
    return RandomForestModel(params, trees)


def train_dtree(dataset, params=None):
    return fit_dtree(*training_arrays(dataset), params=params or tree_params())


def train_rforest(dataset, params=None):
    return fit_rforest(*training_arrays(dataset), params=params or forest_params())
