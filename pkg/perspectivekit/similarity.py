"""
Dataset similarity over ANOVA significance vectors.

    similarity(U, V) = mean_i min(u_i, v_i) / max(u_i, v_i)

which lies in (0, 1] for strictly positive vectors and is 1 only when U == V.
"""

from collections import namedtuple

import numpy as np

from . import util
from . import config
from . import validators
from . import PerspectiveKitException
from .numerics import DomainError

log = config.log


class AlignmentError(PerspectiveKitException):
    pass


class SignificanceVector(namedtuple('SignificanceVector', ['terms', 'values', 'dataset'])):
    """Ordered p-values (any strictly positive values are accepted) keyed by term name."""

    __slots__ = ()

    def __new__(cls, terms, values, dataset=None):
        return super(SignificanceVector, cls).__new__(cls, tuple(terms), tuple(float(v) for v in values), dataset)

    def to_document(self):
        document = {'terms': list(self.terms), 'p_values': list(self.values)}
        if self.dataset is not None:
            document['dataset'] = self.dataset
        return document


def check_vector(vector):
    if len(vector.terms) != len(vector.values):
        raise AlignmentError('{} terms but {} values'.format(len(vector.terms), len(vector.values)))
    if not vector.values:
        raise AlignmentError('significance vector is empty')
    for term, value in zip(vector.terms, vector.values):
        if not value > 0 or not np.isfinite(value):
            raise DomainError('{} has value {!r}; significance values must be positive and finite'.format(term, value))
    return vector


def similarity(u, v):
    check_vector(u)
    check_vector(v)
    if len(u.terms) != len(v.terms):
        raise AlignmentError('vectors have {} and {} terms'.format(len(u.terms), len(v.terms)))
    if u.terms != v.terms:
        mismatch = next(i for i, (a, b) in enumerate(zip(u.terms, v.terms)) if a != b)
        raise AlignmentError('term order differs at position {}: {} vs {}'.format(mismatch, u.terms[mismatch], v.terms[mismatch]))
    a = np.array(u.values)
    b = np.array(v.values)
    return float(np.mean(np.minimum(a, b) / np.maximum(a, b)))


def load_vector(path):
    document = validators.load_json(path, 'significance_vector.json')
    return check_vector(SignificanceVector(document['terms'], document['p_values'], document.get('dataset')))


def save_vector(vector, path):
    document = validators.validate(check_vector(vector).to_document(), 'significance_vector.json')
    util.write_json(path, document)
    log.debug('wrote significance vector of %d terms to %s' % (len(vector.terms), path))
    return path
