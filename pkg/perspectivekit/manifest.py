"""
Run manifests: what a command read, how it was configured and what it wrote.

The manifest for an output file is written next to it as <output>.manifest.json.
"""

import os
import json

from . import util
from . import config
from . import validators
from . import __version__

log = config.log

SUFFIX = '.manifest.json'


class RunManifest(object):

    def __init__(self, command, arguments, seed=None):
        self.command = command
        self.arguments = dict(arguments)
        self.seed = seed
        self.config = config.snapshot()
        self.inputs = {}
        self.outputs = []

    def add_input(self, path):
        self.inputs[os.path.basename(path)] = util.file_hash(path)
        return path

    def add_output(self, path):
        self.outputs.append(os.path.basename(path))
        return path

    def to_document(self, timestamp=None):
        return {
            'command': self.command,
            'arguments': self.arguments,
            'config': self.config,
            'seed': self.seed,
            'inputs': self.inputs,
            'outputs': self.outputs,
            'tool_version': __version__,
            'timestamp': (timestamp or util.utcnow()).isoformat(),
        }

    def write(self, output_path, timestamp=None):
        """Validate and write the manifest beside output_path; returns the manifest path."""
        path = output_path + SUFFIX
        document = self.to_document(timestamp)
        # arguments and config may hold enums or numpy scalars
        util.write_json(path, validators.validate(_plain(document), 'manifest.json'))
        log.debug('wrote manifest %s' % path)
        return path


def _plain(document):
    return json.loads(json.dumps(document, default=util.custom_json_serializer))


def load_manifest(path):
    return validators.load_json(path, 'manifest.json')
