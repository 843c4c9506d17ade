"""
Minority oversampling: SMOTE and Borderline-SMOTE (variant 1).

A synthetic point is x + u * (x_nn - x) for a minority base x, one of its k nearest
minority neighbors x_nn and u ~ U[0, 1). Bases are visited in index order, cycling, until
the minority class reaches target_ratio * majority. Neighbor search is brute force.
"""

import math
from collections import namedtuple

import numpy as np

from . import util
from . import config
from . import PerspectiveKitException

log = config.log


class SamplerError(PerspectiveKitException):
    pass


class InsufficientNeighborsError(SamplerError):
    pass


class Method(util.Enum):
    none = 'none'
    smote = 'smote'
    borderline_smote = 'borderline_smote'


SamplerConfig = namedtuple('SamplerConfig', ['method', 'k_neighbors', 'm_neighbors', 'seed', 'target_ratio'])
SyntheticBatch = namedtuple('SyntheticBatch', ['points', 'parent_indices'])
Parent = namedtuple('Parent', ['base_index', 'neighbor_index', 'u'])


def sampler_config(method='smote', k_neighbors=None, m_neighbors=None, seed=0, target_ratio=None):
    """SamplerConfig with unset fields taken from the sampler config section."""
    try:
        method = Method(str(method))
    except ValueError:
        raise SamplerError('unknown sampling method {!r}; expected one of {}'.format(
            str(method), ', '.join(m.value for m in Method)))
    section = config.get_config()['sampler']
    k_neighbors = section['k_neighbors'] if k_neighbors is None else k_neighbors
    m_neighbors = section['m_neighbors'] if m_neighbors is None else m_neighbors
    target_ratio = section['target_ratio'] if target_ratio is None else target_ratio
    if int(k_neighbors) < 1:
        raise SamplerError('k_neighbors must be >= 1, got {}'.format(k_neighbors))
    if int(m_neighbors) < 1:
        raise SamplerError('m_neighbors must be >= 1, got {}'.format(m_neighbors))
    if not 0.0 < float(target_ratio) <= 1.0:
        raise SamplerError('target_ratio must be in (0, 1], got {}'.format(target_ratio))
    return SamplerConfig(method, int(k_neighbors), int(m_neighbors), int(seed), float(target_ratio))


def knn_indices(points, query_index, k, restrict_to=None):
    """
    Indices of the k points nearest to points[query_index], nearest first.

    The query itself is never returned; equal distances go to the lower index.
    restrict_to limits the candidates to the given indices.
    """
    points = np.asarray(points, dtype=np.float64)
    if restrict_to is None:
        candidates = np.arange(len(points))
    else:
        candidates = np.asarray(sorted(restrict_to), dtype=np.int64)
    candidates = candidates[candidates != query_index]
    if len(candidates) < k:
        raise InsufficientNeighborsError('{} neighbors requested but only {} eligible points'.format(k, len(candidates)))
    distances = np.sum((points[candidates] - points[query_index]) ** 2, axis=1)
    order = np.lexsort((candidates, distances))
    return candidates[order[:k]]


def _classes(dataset):
    counts = dataset.class_counts()
    minority = 1 if counts[1] <= counts[0] else 0
    return minority, counts[minority], counts[1 - minority]


def _needed(sampler, minority_count, majority_count):
    # round first so 0.3 * 10 is not lifted to 4 by representation error
    return int(math.ceil(round(sampler.target_ratio * majority_count, 9))) - minority_count


def _check_minority(minority_count, sampler):
    if minority_count < 2 or minority_count < sampler.k_neighbors + 1:
        raise InsufficientNeighborsError('{} minority points cannot support k_neighbors={}'.format(
            minority_count, sampler.k_neighbors))


def interpolate(features, bases, neighbors, needed, rng):
    """Draw `needed` synthetics cycling through bases; neighbors maps base -> candidate indices."""
    points = []
    parents = []
    for i in range(needed):
        base = bases[i % len(bases)]
        candidates = neighbors[base]
        neighbor = int(candidates[int(rng.integers(len(candidates)))])
        u = float(rng.random())
        x = features[base] + u * (features[neighbor] - features[base])
        points.append(np.clip(x, 0.0, 1.0))
        parents.append(Parent(int(base), neighbor, u))
    return SyntheticBatch(points=points, parent_indices=parents)


def _append(dataset, batch, label, sampler, **metadata):
    taken = [int(i[4:]) for i in dataset.ids if i.startswith('syn-') and i[4:].isdigit()]
    offset = max(taken) + 1 if taken else 0
    ids = ['syn-{}'.format(offset + i) for i in range(len(batch.points))]
    metadata.update({'synthetic_batch': batch, 'sampler': sampler._asdict()})
    result = dataset.extended(
        ids,
        np.array(batch.points).reshape(len(batch.points), dataset.features.shape[1]),
        [label] * len(batch.points),
        metadata=metadata,
    )
    log.info('%s: %s added %d synthetic rows, class counts now %s' % (
        dataset.name, sampler.method, len(batch.points), result.class_counts()))
    return result


def smote(dataset, sampler, rng=None):
    minority, minority_count, majority_count = _classes(dataset)
    needed = _needed(sampler, minority_count, majority_count)
    if needed <= 0:
        log.info('%s is already balanced at %s' % (dataset.name, dataset.class_counts()))
        return dataset
    _check_minority(minority_count, sampler)
    rng = util.make_rng(sampler.seed) if rng is None else rng

    members = np.flatnonzero(dataset.labels == minority)
    neighbors = {i: knn_indices(dataset.features, i, sampler.k_neighbors, restrict_to=members) for i in members}
    batch = interpolate(dataset.features, list(members), neighbors, needed, rng)
    return _append(dataset, batch, minority, sampler)


def danger_points(dataset, minority, m_neighbors):
    """
    Split minority indices by the count m' of majority points among their m nearest
    neighbors (all classes): danger m/2 <= m' < m, noise m' = m, safe otherwise.
    """
    danger, noise, safe = [], [], []
    for i in np.flatnonzero(dataset.labels == minority):
        nearest = knn_indices(dataset.features, i, m_neighbors)
        m_prime = int(np.sum(dataset.labels[nearest] != minority))
        if m_prime == m_neighbors:
            noise.append(int(i))
        elif 2 * m_prime >= m_neighbors:
            danger.append(int(i))
        else:
            safe.append(int(i))
    return danger, noise, safe


def borderline_smote(dataset, sampler, rng=None):
    minority, minority_count, majority_count = _classes(dataset)
    needed = _needed(sampler, minority_count, majority_count)
    if needed <= 0:
        log.info('%s is already balanced at %s' % (dataset.name, dataset.class_counts()))
        return dataset
    _check_minority(minority_count, sampler)

    m_neighbors = min(sampler.m_neighbors, len(dataset) - 1)
    if m_neighbors < sampler.m_neighbors:
        log.warning('%s: m_neighbors=%d capped at %d for %d rows' % (dataset.name, sampler.m_neighbors, m_neighbors, len(dataset)))
    danger, noise, safe = danger_points(dataset, minority, m_neighbors)
    log.debug('%s: %d danger, %d noise, %d safe minority points' % (dataset.name, len(danger), len(noise), len(safe)))
    if not danger:
        log.warning('%s: no minority point is in danger, falling back to plain SMOTE' % dataset.name)
        result = smote(dataset, sampler, rng=rng)
        result.metadata['borderline_fallback'] = True
        result.metadata['m_neighbors_used'] = m_neighbors
        return result

    rng = util.make_rng(sampler.seed) if rng is None else rng
    members = np.flatnonzero(dataset.labels == minority)
    neighbors = {i: knn_indices(dataset.features, i, sampler.k_neighbors, restrict_to=members) for i in danger}
    batch = interpolate(dataset.features, danger, neighbors, needed, rng)
    return _append(dataset, batch, minority, sampler, borderline_fallback=False, m_neighbors_used=m_neighbors)


def resample(dataset, sampler, rng=None):
    if sampler.method == Method.none:
        return dataset
    if sampler.method == Method.smote:
        return smote(dataset, sampler, rng=rng)
    return borderline_smote(dataset, sampler, rng=rng)
