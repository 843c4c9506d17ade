import os
import copy
import json
import logging

from . import PerspectiveKitException


logging.basicConfig(
    format='%(asctime)s %(name)16.16s %(filename)24.24s %(lineno)5d:%(levelname)4.4s %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    level=logging.WARNING,
)
log = logging.getLogger('perspectivekit')

logging.getLogger('requests').setLevel(logging.WARNING) # silence Requests library
logging.getLogger('urllib3').setLevel(logging.WARNING)


# NOTE: Keep in sync with schemas/config.json
DEFAULT_CONFIG = {
    'core': {
        'log_level': 'info',
    },
    'client': {
        'api_key_env': 'PERSPECTIVE_API_KEY',
        'endpoint': 'https://commentanalyzer.googleapis.com/v1alpha1/comments:analyze',
        'languages': 'en',
        'qps_limit': 1.0,
        'max_retries': 5,
        'backoff_base': 2.0,
        'timeout': 30.0,
        'cache_dir': os.path.join(os.path.expanduser('~'), '.cache', 'perspectivekit'),
        'mode': 'live',
        'workers': 1,
    },
    'mock': {
        'key': 'perspectivekit-mock',
        'boost': 0.5,
        # substring -> attributes raised by mock.boost when the substring occurs
        'triggers': {
            'fuck': ['TOXICITY', 'PROFANITY', 'OBSCENE', 'INSULT'],
            'shit': ['TOXICITY', 'PROFANITY', 'OBSCENE'],
            'kill': ['THREAT', 'SEVERE_TOXICITY'],
        },
    },
    'sampler': {
        'k_neighbors': 5,
        'm_neighbors': 10,
        'target_ratio': 1.0,
    },
    'grid': {
        'workers': 1,
    },
    'output': {
        'float_digits': 17,
    },
}

__config = copy.deepcopy(DEFAULT_CONFIG)


class ConfigurationError(PerspectiveKitException):
    pass


def _coerce(value, default):
    if value.lower() == 'true':
        return True
    elif value.lower() == 'false':
        return False
    elif value.lower() == 'none':
        return None
    if isinstance(default, bool) or default is None:
        return value
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    if isinstance(default, (dict, list)):
        return json.loads(value)
    return value


def apply_environment(config, environ=None):
    environ = os.environ if environ is None else environ
    for outer_key, scoped_config in config.items():
        for inner_key in scoped_config:
            key = 'PERSPECTIVEKIT_' + outer_key.upper() + '_' + inner_key.upper()
            if key in environ:
                scoped_config[inner_key] = _coerce(environ[key], DEFAULT_CONFIG[outer_key][inner_key])
    return config


def _merge(config, overrides):
    for outer_key, scoped in overrides.items():
        config.setdefault(outer_key, {}).update(scoped)
    return config


def load_file(path):
    """Merge a JSON config file into the live configuration.

    Environment variables keep precedence over the file.
    """
    from . import validators
    with open(path) as fd:
        overrides = json.load(fd)
    validators.validate(overrides, 'config.json')
    log.debug('merging configuration from %s' % path)
    _merge(__config, overrides)
    apply_environment(__config)
    set_log_level(__config['core']['log_level'])
    return __config


def reset():
    global __config
    __config = apply_environment(copy.deepcopy(DEFAULT_CONFIG))
    set_log_level(__config['core']['log_level'])
    return __config


def set_log_level(level):
    log.setLevel(getattr(logging, level.upper()))


def get_config():
    return __config


def get_item(outer, inner):
    return get_config()[outer][inner]


def snapshot():
    """Copy of the live configuration, safe to embed in manifests."""
    return copy.deepcopy(__config)


apply_environment(__config)
set_log_level(__config['core']['log_level'])
