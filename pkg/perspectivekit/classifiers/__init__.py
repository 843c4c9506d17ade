"""
Baseline classifiers over the nine attribute scores.

Every learner has an array-level ``fit_*(X, y, params)`` and a dataset-level
``train_*(dataset, params=None)``; both return an immutable TrainedModel where

    predict(x) == 1  iff  predict_score(x) >= model.threshold
"""

import json
import inspect
from collections import namedtuple, OrderedDict

import numpy as np

from .. import util
from .. import config
from .. import PerspectiveKitException
from ..corpus import CorpusError

log = config.log


class ClassifierError(PerspectiveKitException):
    pass


class TrainedModel(object):

    name = None
    threshold = 0.5

    def __init__(self, params):
        self.params = params

    def predict_scores(self, X):
        raise NotImplementedError

    def predict_labels(self, X):
        return (self.predict_scores(X) >= self.threshold).astype(np.int64)

    def predict_score(self, vector):
        return float(self.predict_scores(_as_matrix(vector))[0])

    def predict(self, vector):
        return int(self.predict_labels(_as_matrix(vector))[0])

    def state(self):
        return {}

    def to_document(self):
        document = {'classifier': self.name, 'params': self.params._asdict(), 'threshold': self.threshold}
        document.update(self.state())
        return document

    def to_json(self):
        return json.dumps(self.to_document(), sort_keys=True, default=util.custom_json_serializer)


def _as_matrix(vector):
    return np.asarray(vector, dtype=np.float64).reshape(1, -1)


def check_training(X, y):
    """Float features and 0/1 int labels; both classes must be present."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) == 0:
        raise ClassifierError('training set is empty')
    if y.shape != (len(X),):
        raise ClassifierError('{} labels for {} rows'.format(len(y), len(X)))
    if not np.all(np.isfinite(X)):
        raise ClassifierError('training features must be finite')
    if not np.isin(y, (0, 1)).all():
        raise ClassifierError('labels must be 0 or 1')
    if len(np.unique(y)) < 2:
        raise ClassifierError('training set has a single class ({})'.format(int(y[0])))
    return X, y


def training_arrays(dataset):
    if len(dataset) == 0:
        raise ClassifierError('dataset {} is empty'.format(dataset.name))
    try:
        dataset.require_both_labels()
    except CorpusError as e:
        raise ClassifierError(str(e))
    return dataset.features, dataset.labels


def make_params(factory, seed=None, **overrides):
    """Hyperparams from factory; seed is passed only to learners that take one."""
    if seed is not None and 'seed' in inspect.signature(factory).parameters:
        overrides['seed'] = seed
    return factory(**overrides)


Learner = namedtuple('Learner', ['name', 'fit', 'params'])

CLASSIFIERS = OrderedDict()


def register(name, fit, params):
    CLASSIFIERS[name] = Learner(name, fit, params)


def learner(name):
    try:
        return CLASSIFIERS[name]
    except KeyError:
        raise ClassifierError('unknown classifier {!r}; expected one of {}'.format(name, ', '.join(CLASSIFIERS)))


def hyperparams(name, seed=None, **overrides):
    return make_params(learner(name).params, seed=seed, **overrides)


def train(name, dataset, params=None):
    entry = learner(name)
    X, y = training_arrays(dataset)
    model = entry.fit(X, y, params if params is not None else entry.params())
    log.debug('trained %s on %s (%d rows)' % (name, dataset.name, len(dataset)))
    return model


from .knn import KnnParams, knn_params, fit_knn, train_knn  # noqa: E402
from .naive_bayes import GnbParams, gnb_params, fit_gnb, train_gnb  # noqa: E402
from .tree import TreeParams, ForestParams, tree_params, forest_params  # noqa: E402
from .tree import fit_dtree, fit_rforest, train_dtree, train_rforest  # noqa: E402
from .svm import SvmParams, svm_params, fit_linear_svm, train_linear_svm  # noqa: E402
from .boosting import GbtParams, gbt_params, fit_gbt, train_gbt  # noqa: E402

register('dtree', fit_dtree, tree_params)
register('rforest', fit_rforest, forest_params)
register('gnb', fit_gnb, gnb_params)
register('svm', fit_linear_svm, svm_params)
register('knn', fit_knn, knn_params)
register('gbt', fit_gbt, gbt_params)
