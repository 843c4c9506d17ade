import os
import time
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

from .. import util
from .. import config
from .. import validators
from ..corpus import ATTRIBUTES, ScoreVector
from . import ClientError, MissingApiKeyError, TransportError, ProtocolError
from . import check_config
from .cache import DiskCache
from .ratelimit import RateLimiter, NoLimit
from .transport import RequestsTransport, MockTransport, request_body

log = config.log

# Server-side throttling and transient failures; everything else fails immediately.
RETRY_STATUSES = frozenset([429, 500, 502, 503, 504])

ScoringFailure = namedtuple('ScoringFailure', ['id', 'error', 'status'])
CorpusScores = namedtuple('CorpusScores', ['scored', 'failures'])


def parse_response(document):
    """Extract the nine summary scores, or raise ProtocolError."""
    if document is None:
        raise ProtocolError('response body is not JSON')
    try:
        validators.validate(document, 'analyze_response.json')
    except validators.ValidationError as e:
        raise ProtocolError('malformed response: ' + str(e))
    attribute_scores = document['attributeScores']
    values = []
    for attribute in ATTRIBUTES:
        if attribute not in attribute_scores:
            raise ProtocolError('response is missing attribute ' + attribute, attribute=attribute)
        value = attribute_scores[attribute]['summaryScore']['value']
        if not 0.0 <= value <= 1.0:
            raise ProtocolError('{} score {!r} is outside [0, 1]'.format(attribute, value), attribute=attribute)
        values.append(float(value))
    provenance = {
        'languages': document.get('languages', []),
        'detectedLanguages': document.get('detectedLanguages', []),
        'summaryTypes': {a: attribute_scores[a]['summaryScore'].get('type') for a in ATTRIBUTES},
    }
    return ScoreVector(*values), provenance


class PerspectiveClient(object):
    """
    Scores texts through a transport, a disk cache and a rate limiter.

    Parameters
    ----------
    client_config: ClientConfig
    transport: object with post(body) -> (status, document), optional
        Defaults to the HTTP transport in live mode and the mock scorer in mock mode.
    limiter: object with acquire(), optional
        Defaults to qps_limit in live mode; mock requests are not limited.
    sleep: callable, optional
        Used between retries.
    environ: mapping, optional
        Where the API key is looked up.
    """

    def __init__(self, client_config, transport=None, cache=None, limiter=None, sleep=time.sleep, environ=None):
        self.config = check_config(client_config)
        self.sleep = sleep
        self.cache = cache or DiskCache(client_config.cache_dir, client_config.mode)
        if transport is None:
            if client_config.mode == 'live':
                transport = RequestsTransport(client_config.endpoint, self._api_key(environ), client_config.timeout)
            else:
                transport = MockTransport()
        elif client_config.mode == 'live':
            self._api_key(environ)
        self.transport = transport
        if limiter is None:
            limiter = RateLimiter(client_config.qps_limit) if client_config.mode == 'live' else NoLimit()
        self.limiter = limiter

    def _api_key(self, environ):
        environ = os.environ if environ is None else environ
        key = environ.get(self.config.api_key_source)
        if not key:
            raise MissingApiKeyError(self.config.api_key_source)
        return key

    def _request(self, body):
        status = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                delay = self.config.backoff_base * 2 ** (attempt - 1)
                log.warning('retrying in %.1fs (attempt %d/%d, last status %s)' % (delay, attempt, self.config.max_retries, status))
                self.sleep(delay)
            self.limiter.acquire()
            try:
                status, document = self.transport.post(body)
            except TransportError as e:
                status = e.status
                continue
            if status == 200:
                return document
            if status not in RETRY_STATUSES:
                raise TransportError('comment analyzer rejected the request', status=status)
        raise TransportError('giving up after {} attempts'.format(self.config.max_retries + 1), status=status)

    def analyze(self, text):
        if not text or not text.strip():
            raise ClientError('cannot score an empty text')
        hash_ = util.content_hash({'text': text, 'attributes': list(ATTRIBUTES)})
        entry = self.cache.get(hash_)
        if entry is not None:
            return ScoreVector(*[entry['scores'][a] for a in ATTRIBUTES])

        body = request_body(text, ATTRIBUTES, self.config.languages)
        vector, provenance = parse_response(self._request(body))
        self.cache.put({
            'hash': hash_,
            'text': text,
            'attributes': list(ATTRIBUTES),
            'scores': dict(zip(ATTRIBUTES, vector)),
            'mode': self.config.mode,
            'provenance': provenance,
            'created': util.utcnow().isoformat(),
        })
        return vector

    def _analyze_instance(self, instance):
        try:
            return instance.id, self.analyze(instance.text), None
        except (TransportError, ProtocolError) as e:
            log.warning('failed to score %s: %s' % (instance.id, e))
            return instance.id, None, ScoringFailure(instance.id, str(e), getattr(e, 'status', None))

    def analyze_corpus(self, instances):
        """
        Score every instance; failures are reported, never dropped silently.

        Scores are cached as they arrive, so a rerun only requests what is missing.
        Raises ClientError when a non-empty corpus yields no score at all.
        """
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = list(pool.map(self._analyze_instance, instances))
        else:
            results = [self._analyze_instance(inst) for inst in instances]
        scored = [(_id, vector) for _id, vector, _ in results if vector is not None]
        failures = [failure for _, _, failure in results if failure is not None]
        log.info('scored %d of %d instances, %d failures' % (len(scored), len(results), len(failures)))
        if results and not scored:
            raise ClientError('no instance could be scored; first failure: ' + failures[0].error)
        return CorpusScores(scored=scored, failures=failures)


def analyze(text, client_config, **kwargs):
    return PerspectiveClient(client_config, **kwargs).analyze(text)


def analyze_corpus(instances, client_config, **kwargs):
    return PerspectiveClient(client_config, **kwargs).analyze_corpus(instances)
