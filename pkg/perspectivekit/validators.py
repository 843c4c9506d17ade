import os
import json
import jsonschema

from . import config
from . import PerspectiveKitException

log = config.log

# json schema files are expected to be in the schemas folder relative to this module
schema_path = os.path.join(os.path.abspath(os.path.dirname(__file__)), 'schemas')

expected_schemas = set([
    'analyze_response.json',
    'cache_entry.json',
    'config.json',
    'manifest.json',
    'significance_vector.json',
])
schemas = {}
# load and check schemas at start time
for schema_file in os.listdir(schema_path):
    if not schema_file.endswith('.json'):
        continue
    with open(os.path.join(schema_path, schema_file)) as fd:
        schema = json.load(fd)
    jsonschema.Draft7Validator.check_schema(schema)
    schemas[schema_file] = schema

assert set(schemas) == expected_schemas, '{} is different from {}'.format(set(schemas), expected_schemas)


class ValidationError(PerspectiveKitException):

    def __init__(self, schema_file, error):
        self.schema_file = schema_file
        self.relative_path = list(error.relative_path)
        self.validator = error.validator
        super(ValidationError, self).__init__(
            '{} at {}: {}'.format(schema_file, '/'.join(str(p) for p in self.relative_path) or '<root>', error.message))


def validate(document, schema_file):
    try:
        jsonschema.Draft7Validator(schemas[schema_file]).validate(document)
    except jsonschema.ValidationError as e:
        log.debug('%s rejected: %s' % (schema_file, e.message))
        raise ValidationError(schema_file, e)
    return document


def load_json(path, schema_file):
    """Read a JSON document and validate it against a schema."""
    with open(path, encoding='utf-8') as fd:
        document = json.load(fd)
    return validate(document, schema_file)
