"""
Confusion-matrix metrics and the cross-dataset harness.

A cell trains on one dataset (optionally oversampled) and tests on another. The
positive class is label 1. Zero denominators give 0.0 and name the metric in
``degenerate`` instead of raising.
"""

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import util
from . import config
from . import classifiers
from . import resampling
from . import PerspectiveKitException
from .config import ConfigurationError

log = config.log

METRICS = ('precision', 'recall', 'f1', 'accuracy')


class EvaluationError(PerspectiveKitException):
    pass


class ConfusionMatrix(namedtuple('ConfusionMatrix', ['tp', 'fn', 'fp', 'tn'])):
    __slots__ = ()

    @property
    def total(self):
        return self.tp + self.fn + self.fp + self.tn


Metrics = namedtuple('Metrics', ['precision', 'recall', 'f1', 'accuracy', 'degenerate'])

EvalReport = namedtuple('EvalReport', [
    'train', 'sampler', 'classifier', 'test', 'seed',
    'matrix', 'metrics', 'train_counts', 'error',
])


def confusion_matrix(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise EvaluationError('{} labels but {} predictions'.format(len(y_true), len(y_pred)))
    return ConfusionMatrix(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
    )


def metrics(matrix):
    if min(matrix) < 0:
        raise EvaluationError('confusion matrix counts must be non-negative: {}'.format(matrix))
    if matrix.total == 0:
        raise EvaluationError('confusion matrix is empty')
    degenerate = []
    if matrix.tp + matrix.fp:
        precision = matrix.tp / float(matrix.tp + matrix.fp)
    else:
        precision = 0.0
        degenerate.append('precision')
    if matrix.tp + matrix.fn:
        recall = matrix.tp / float(matrix.tp + matrix.fn)
    else:
        recall = 0.0
        degenerate.append('recall')
    if precision + recall:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append('f1')
    accuracy = (matrix.tp + matrix.tn) / float(matrix.total)
    return Metrics(precision, recall, f1, accuracy, tuple(degenerate))


def classifier_spec(spec, seed):
    """(name, params) from a name or a (name, params) pair; params get a seed if stochastic."""
    if isinstance(spec, str):
        return spec, classifiers.hyperparams(spec, seed=seed)
    name, params = spec
    classifiers.learner(name)
    return name, params


def cross_eval(train, test, sampler, classifier, seed=0, probe=None):
    """
    Oversample train (never test), fit the classifier on it and score test.

    classifier is a registered name or a (name, params) pair. probe, when given, is
    called with the training set the classifier actually sees.
    """
    if train.feature_names != test.feature_names:
        raise EvaluationError('{} and {} use different feature orders'.format(train.name, test.name))
    if len(test) == 0:
        raise EvaluationError('test set {} is empty'.format(test.name))
    name, params = classifier_spec(classifier, util.derive_seed(seed, 'classifier'))

    balanced = resampling.resample(train, sampler)
    if probe is not None:
        probe(balanced)
    model = classifiers.train(name, balanced, params)
    matrix = confusion_matrix(test.labels, model.predict_labels(test.features))
    result = metrics(matrix)
    log.info('%s/%s/%s -> %s: f1=%.4f recall=%.4f precision=%.4f accuracy=%.4f' % (
        train.name, sampler.method, name, test.name, result.f1, result.recall, result.precision, result.accuracy))
    return EvalReport(
        train=train.name, sampler=str(sampler.method), classifier=name, test=test.name, seed=seed,
        matrix=matrix, metrics=result, train_counts=balanced.class_counts(), error=None,
    )


def _grid_cells(samplers, classifier_specs, seed):
    cells = []
    for spec in classifier_specs:
        name = spec if isinstance(spec, str) else spec[0]
        for sampler in samplers:
            cell_seed = util.derive_seed(seed, 'cell:{}:{}'.format(sampler.method, name))
            cells.append((sampler._replace(seed=util.derive_seed(cell_seed, 'sampler')), spec, cell_seed))
    return cells


def run_grid(train, test, samplers, classifier_specs, seed=0, workers=None):
    """
    Every (classifier, sampler) cell in declared order, classifiers outermost.

    A failing cell is reported with its error and the grid continues.
    """
    if not samplers:
        raise ConfigurationError('run_grid needs at least one sampler')
    if not classifier_specs:
        raise ConfigurationError('run_grid needs at least one classifier')
    for spec in classifier_specs:
        classifiers.learner(spec if isinstance(spec, str) else spec[0])
    workers = config.get_item('grid', 'workers') if workers is None else workers

    def run(cell):
        sampler, spec, cell_seed = cell
        try:
            return cross_eval(train, test, sampler, spec, seed=cell_seed)
        except PerspectiveKitException as e:
            name = spec if isinstance(spec, str) else spec[0]
            log.warning('grid cell %s/%s failed: %s' % (sampler.method, name, e))
            return EvalReport(train.name, str(sampler.method), name, test.name, cell_seed, None, None, None, str(e))

    cells = _grid_cells(samplers, classifier_specs, seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, cells))
    else:
        reports = [run(cell) for cell in cells]
    log.info('grid of %d cells done, %d failed' % (len(reports), sum(1 for r in reports if r.error)))
    return reports


def report_document(report):
    document = {
        'train': report.train,
        'sampler': report.sampler,
        'classifier': report.classifier,
        'test': report.test,
        'seed': report.seed,
        'error': report.error,
    }
    if report.matrix is not None:
        document['matrix'] = report.matrix._asdict()
        document.update({m: getattr(report.metrics, m) for m in METRICS})
        document['degenerate'] = list(report.metrics.degenerate)
        document['train_counts'] = {str(k): v for k, v in report.train_counts.items()}
    return document


def render_grid(reports, metric):
    """Classifiers as rows, samplers as columns; degenerate values are starred."""
    if metric not in METRICS:
        raise ConfigurationError('unknown metric {}; expected one of {}'.format(metric, ', '.join(METRICS)))
    rows = []
    columns = []
    values = {}
    for r in reports:
        if r.classifier not in rows:
            rows.append(r.classifier)
        if r.sampler not in columns:
            columns.append(r.sampler)
        if r.error:
            cell = 'error'
        else:
            cell = '{:.4f}'.format(getattr(r.metrics, metric))
            if metric in r.metrics.degenerate:
                cell += '*'
        values[(r.classifier, r.sampler)] = cell

    table = [[metric] + columns]
    table += [[row] + [values.get((row, col), '') for col in columns] for row in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(table[0]))]
    lines = [' '.join([line[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(line[1:], widths[1:])]) for line in table]
    return '\n'.join(lines) + '\n'
