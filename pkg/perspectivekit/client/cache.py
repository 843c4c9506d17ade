import os
import tempfile

from .. import util
from .. import config
from .. import validators

log = config.log


class DiskCache(object):
    """
    One JSON document per scored text, named by the content hash of (text, attributes).

    Writes go to a temporary file in the target directory and are renamed into place,
    so concurrent writers never leave a partial document behind.
    """

    def __init__(self, cache_dir, mode):
        self.root = os.path.join(cache_dir, mode)

    def path(self, hash_):
        return os.path.join(self.root, util.path_from_hash(hash_))

    def get(self, hash_):
        path = self.path(hash_)
        if not os.path.exists(path):
            return None
        try:
            return validators.load_json(path, 'cache_entry.json')
        except (ValueError, validators.ValidationError) as e:
            log.warning('ignoring unreadable cache entry %s: %s' % (path, e))
            return None

    def put(self, entry):
        validators.validate(entry, 'cache_entry.json')
        path = self.path(entry['hash'])
        target_dir = os.path.dirname(path)
        if not os.path.exists(target_dir):
            os.makedirs(target_dir, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(prefix='.tmp-', dir=target_dir)
        os.close(fd)
        try:
            util.write_json(temp_path, entry)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        return path
