import os
import json
import enum
import hashlib
import datetime

import pytz
import numpy as np


def format_hash(hash_alg, hash_):
    """
    format the hash including version and algorithm
    """
    return '-'.join(('v0', hash_alg, hash_))


def path_from_hash(hash_):
    """
    create a filepath from a hash
    e.g.
    hash_ = v0-sha256-01b395a1cbc0f218
    will return
    v0/sha256/01/b3/v0-sha256-01b395a1cbc0f218.json
    """
    hash_version, hash_alg, actual_hash = hash_.split('-')
    first_stanza = actual_hash[0:2]
    second_stanza = actual_hash[2:4]
    path = (hash_version, hash_alg, first_stanza, second_stanza, hash_ + '.json')
    return os.path.join(*path)


def content_hash(payload, hash_alg='sha256'):
    """Hash of a JSON-serializable payload with sorted keys."""
    encoded = json.dumps(payload, sort_keys=True, separators=(',', ':'), ensure_ascii=False)
    return format_hash(hash_alg, hashlib.new(hash_alg, encoded.encode('utf-8')).hexdigest())


def file_hash(filepath, hash_alg='sha256'):
    hash_ = hashlib.new(hash_alg)
    with open(filepath, 'rb') as fd:
        for chunk in iter(lambda: fd.read(2**20), b''):
            hash_.update(chunk)
    return format_hash(hash_alg, hash_.hexdigest())


def parse_list(value):
    """Comma-separated command line list; empty input gives ()."""
    if not value:
        return ()
    return tuple(t.strip() for t in value.split(',') if t.strip())


def derive_seed(seed, stage):
    """64-bit seed for a named stage, derived from the master seed."""
    digest = hashlib.sha256(('%d:%s' % (seed, stage)).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def utcnow():
    return datetime.datetime.now(pytz.utc)


def custom_json_serializer(obj):
    if isinstance(obj, datetime.datetime):
        if obj.tzinfo is None:
            obj = pytz.timezone('UTC').localize(obj)
        return obj.isoformat()
    elif isinstance(obj, enum.Enum):
        return str(obj)
    elif isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(repr(obj) + " is not JSON serializable")


def write_json(path, document):
    with open(path, 'w', encoding='utf-8', newline='\n') as fd:
        json.dump(document, fd, sort_keys=True, indent=4, separators=(',', ': '), default=custom_json_serializer)
        fd.write('\n')


class Enum(enum.Enum):
    # Enum strings are prefixed by their class: "Method.smote".
    # This overrides that behaviour and removes the prefix.
    def __str__(self):
        return str(self.name)
