"""
Labeled text corpora and score-augmented datasets.

A corpus is a CSV of raw texts with a (possibly multi-class) label column. Scoring turns
it into a LabeledDataset: one row per text with the nine attribute scores and a binary
hate label, persisted as

    id,TOXICITY,SEVERE_TOXICITY,...,SPAM,label
"""

import re
import os
import hashlib
from collections import namedtuple

import numpy as np
import pandas as pd

from . import config
from . import PerspectiveKitException
from .config import ConfigurationError

log = config.log

# Row order of the ANOVA tables; sequential sums of squares depend on it.
ATTRIBUTES = (
    'TOXICITY',
    'SEVERE_TOXICITY',
    'IDENTITY_ATTACK',
    'INSULT',
    'PROFANITY',
    'THREAT',
    'SEXUALLY_EXPLICIT',
    'OBSCENE',
    'SPAM',
)

ScoreVector = namedtuple('ScoreVector', [a.lower() for a in ATTRIBUTES])

TextInstance = namedtuple('TextInstance', ['id', 'text', 'raw_label'])

LabelMapping = namedtuple('LabelMapping', ['name', 'positive_classes'])


class CorpusError(PerspectiveKitException):

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = 'row {}: {}'.format(row, message)
        super(CorpusError, self).__init__(message)


class SchemaError(PerspectiveKitException):
    pass


class RangeError(PerspectiveKitException):
    pass


def label_mapping(name, positive_classes):
    positive_classes = frozenset(str(c) for c in positive_classes)
    if not positive_classes:
        raise ConfigurationError('label mapping {} has no positive classes'.format(name))
    return LabelMapping(name=name, positive_classes=positive_classes)


MAPPINGS = {
    'binary': label_mapping('binary', ['1']),
    # Davidson et al. 2017: 0 hate speech, 1 offensive, 2 neither
    'davidson': label_mapping('davidson', ['0']),
}


def score_vector(values):
    values = [float(v) for v in values]
    if len(values) != len(ATTRIBUTES):
        raise SchemaError('score vector needs {} components, got {}'.format(len(ATTRIBUTES), len(values)))
    for name, value in zip(ATTRIBUTES, values):
        if not 0.0 <= value <= 1.0:
            raise RangeError('{} = {!r} is outside [0, 1]'.format(name, value))
    return ScoreVector(*values)


def load_corpus(path, text_column, label_column, id_column=None, format='csv'):
    """
    Read a raw corpus, one TextInstance per data row in file order.

    Ids default to the 0-based data row index when no id column is given.
    """
    if format != 'csv':
        raise ConfigurationError('unsupported corpus format ' + str(format))
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, na_values=[''], encoding='utf-8')
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        row = int(match.group(1)) - 1 if match else None
        raise CorpusError('malformed row in {}: {}'.format(path, e), row=row)
    except pd.errors.EmptyDataError:
        raise CorpusError('{} is empty'.format(path))

    required = [text_column, label_column] + ([id_column] if id_column else [])
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ConfigurationError('{} has no column(s) {}; header is {}'.format(
            path, ', '.join(missing), ', '.join(df.columns)))

    # short rows and empty fields both read as NaN
    absent = df[required].isna()
    short = np.flatnonzero(absent.any(axis=1).values)
    if len(short):
        i = int(short[0])
        raise CorpusError('missing ' + ', '.join(absent.columns[absent.iloc[i].values]), row=i + 1)

    instances = []
    seen = set()
    for i, (text, raw_label) in enumerate(zip(df[text_column], df[label_column])):
        _id = df[id_column].iat[i] if id_column else str(i)
        if not text.strip():
            raise CorpusError('empty text', row=i + 1)
        if _id in seen:
            raise CorpusError('duplicate id ' + _id, row=i + 1)
        seen.add(_id)
        instances.append(TextInstance(id=_id, text=text, raw_label=raw_label.strip()))
    log.info('loaded %d instances from %s' % (len(instances), path))
    return instances


def binarize(instances, mapping):
    return [(inst.id, 1 if inst.raw_label in mapping.positive_classes else 0) for inst in instances]


class LabeledDataset(object):
    """
    Score matrix with binary labels.

    features is an (n, 9) float64 array in ATTRIBUTES order, labels an (n,) int array.
    Both are frozen; derive new datasets instead of editing in place.
    """

    def __init__(self, name, ids, features, labels, metadata=None, feature_names=ATTRIBUTES):
        self.name = name
        self.feature_names = tuple(feature_names)
        self.ids = tuple(str(i) for i in ids)
        self.features = np.array(features, dtype=np.float64).reshape(len(self.ids), len(ATTRIBUTES))
        self.labels = np.array(labels, dtype=np.int64).reshape(len(self.ids))
        self.metadata = dict(metadata or {})
        self._check()
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    def _check(self):
        if self.feature_names != ATTRIBUTES:
            raise SchemaError('feature names must be {}, got {}'.format(', '.join(ATTRIBUTES), ', '.join(self.feature_names)))
        if len(set(self.ids)) != len(self.ids):
            raise CorpusError('dataset {} has duplicate ids'.format(self.name))
        if not np.all(np.isfinite(self.features)):
            raise RangeError('dataset {} has non-finite scores'.format(self.name))
        outside = (self.features < 0.0) | (self.features > 1.0)
        if outside.any():
            row, col = [int(i) for i in np.argwhere(outside)[0]]
            raise RangeError('dataset {}: {} of row {} is {!r}, outside [0, 1]'.format(
                self.name, ATTRIBUTES[col], self.ids[row], self.features[row, col]))
        if not np.isin(self.labels, (0, 1)).all():
            raise RangeError('dataset {}: labels must be 0 or 1'.format(self.name))

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        return (
            isinstance(other, LabeledDataset) and
            self.name == other.name and
            self.ids == other.ids and
            np.array_equal(self.features, other.features) and
            np.array_equal(self.labels, other.labels)
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<LabeledDataset {} n={} positive={}>'.format(self.name, len(self), self.class_counts()[1])

    @property
    def rows(self):
        return [(_id, ScoreVector(*x), int(y)) for _id, x, y in zip(self.ids, self.features.tolist(), self.labels)]

    def class_counts(self):
        positive = int(self.labels.sum())
        return {0: len(self) - positive, 1: positive}

    def fingerprint(self):
        hash_ = hashlib.sha256()
        hash_.update('\x00'.join(self.ids).encode('utf-8'))
        hash_.update(self.features.tobytes())
        hash_.update(self.labels.tobytes())
        return hash_.hexdigest()

    def subset(self, indices, name=None):
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            name or self.name,
            [self.ids[i] for i in indices],
            self.features[indices],
            self.labels[indices],
            metadata=self.metadata,
        )

    def extended(self, ids, features, labels, name=None, metadata=None):
        """New dataset with rows appended after the existing ones."""
        merged = dict(self.metadata)
        merged.update(metadata or {})
        return LabeledDataset(
            name or self.name,
            self.ids + tuple(ids),
            np.vstack([self.features, np.asarray(features, dtype=np.float64).reshape(-1, len(ATTRIBUTES))]),
            np.concatenate([self.labels, np.asarray(labels, dtype=np.int64)]),
            metadata=merged,
        )

    def require_both_labels(self):
        counts = self.class_counts()
        if counts[0] == 0 or counts[1] == 0:
            raise CorpusError('dataset {} needs both labels, has {}'.format(self.name, counts))


def from_scores(name, scored, labels):
    """
    Build a dataset from (id, ScoreVector) pairs and an id -> label dict.

    Pairs whose id has no label are skipped.
    """
    rows = [(_id, vector) for _id, vector in scored if _id in labels]
    return LabeledDataset(
        name,
        [_id for _id, _ in rows],
        np.array([list(vector) for _, vector in rows], dtype=np.float64).reshape(len(rows), len(ATTRIBUTES)),
        [labels[_id] for _id, _ in rows],
    )


HEADER = ('id',) + ATTRIBUTES + ('label',)


def save_dataset(dataset, path):
    digits = config.get_item('output', 'float_digits')
    df = pd.DataFrame(dataset.features, columns=list(ATTRIBUTES))
    df.insert(0, 'id', list(dataset.ids))
    df['label'] = dataset.labels
    df.to_csv(path, index=False, float_format='%.{}g'.format(digits), lineterminator='\n', encoding='utf-8')
    log.debug('wrote %d rows to %s' % (len(dataset), path))
    return path


def load_dataset(path, name=None):
    """
    Read a dataset written by save_dataset.

    Rows with a missing score are excluded and listed in metadata['excluded'].
    """
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    if tuple(df.columns) != HEADER:
        raise SchemaError('{} does not match the dataset schema; expected header {}, got {}'.format(
            path, ','.join(HEADER), ','.join(df.columns)))

    raw = df[list(ATTRIBUTES)].to_numpy(dtype=object)
    missing = (raw == '').any(axis=1)
    excluded = [df['id'].iat[i] for i in np.flatnonzero(missing)]
    if excluded:
        log.warning('%s: excluding %d row(s) with missing scores: %s' % (path, len(excluded), ', '.join(excluded[:10])))
    kept = np.flatnonzero(~missing)
    try:
        features = np.array(raw[kept].tolist(), dtype=np.float64).reshape(len(kept), len(ATTRIBUTES))
    except ValueError as e:
        raise SchemaError('{}: non-numeric score: {}'.format(path, e))
    labels = df['label'].to_numpy()[kept]
    if not np.isin(labels, ('0', '1')).all():
        raise RangeError('{}: labels must be 0 or 1'.format(path))

    return LabeledDataset(
        name or os.path.splitext(os.path.basename(path))[0],
        df['id'].to_numpy()[kept].tolist(),
        features,
        labels.astype(np.int64),
        metadata={'source': path, 'excluded': excluded},
    )
