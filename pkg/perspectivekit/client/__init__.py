from collections import namedtuple

from .. import config
from .. import PerspectiveKitException
from ..config import ConfigurationError


class ClientError(PerspectiveKitException):
    pass


class MissingApiKeyError(ClientError):

    def __init__(self, variable):
        self.variable = variable
        super(MissingApiKeyError, self).__init__('environment variable {} is not set; live mode needs an API key'.format(variable))


class TransportError(ClientError):

    def __init__(self, message, status=None):
        self.status = status
        super(TransportError, self).__init__('{} (last status: {})'.format(message, status))


class ProtocolError(ClientError):

    def __init__(self, message, attribute=None):
        self.attribute = attribute
        super(ProtocolError, self).__init__(message)


MODES = ('live', 'mock')

ClientConfig = namedtuple('ClientConfig', [
    'api_key_source',
    'qps_limit',
    'max_retries',
    'backoff_base',
    'cache_dir',
    'mode',
    'endpoint',
    'languages',
    'timeout',
    'workers',
])


def client_config(**overrides):
    """ClientConfig from the live configuration, with keyword overrides."""
    values = {
        'api_key_source': config.get_item('client', 'api_key_env'),
        'qps_limit': config.get_item('client', 'qps_limit'),
        'max_retries': config.get_item('client', 'max_retries'),
        'backoff_base': config.get_item('client', 'backoff_base'),
        'cache_dir': config.get_item('client', 'cache_dir'),
        'mode': config.get_item('client', 'mode'),
        'endpoint': config.get_item('client', 'endpoint'),
        'languages': config.get_item('client', 'languages'),
        'timeout': config.get_item('client', 'timeout'),
        'workers': config.get_item('client', 'workers'),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = ClientConfig(**values)
    check_config(cfg)
    return cfg


def check_config(cfg):
    if not cfg.qps_limit > 0:
        raise ConfigurationError('qps_limit must be > 0, got {}'.format(cfg.qps_limit))
    if cfg.max_retries < 0:
        raise ConfigurationError('max_retries must be >= 0, got {}'.format(cfg.max_retries))
    if cfg.mode not in MODES:
        raise ConfigurationError('mode must be one of {}, got {}'.format(', '.join(MODES), cfg.mode))
    if cfg.workers < 1:
        raise ConfigurationError('workers must be >= 1, got {}'.format(cfg.workers))
    return cfg


from .scorer import PerspectiveClient, ScoringFailure, CorpusScores, analyze, analyze_corpus  # noqa: E402
