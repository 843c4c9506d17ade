import os
import threading

import pytest
import requests

from perspectivekit import client
from perspectivekit.client import transport, cache, ratelimit, scorer
from perspectivekit.corpus import ATTRIBUTES, TextInstance, ScoreVector
from perspectivekit.config import ConfigurationError


class CountingTransport(object):
    """Mock scorer that counts requests and can fail chosen texts."""

    def __init__(self, fail=(), status=503, drop=None):
        self.mock = transport.MockTransport()
        self.fail = set(fail)
        self.status = status
        self.drop = drop
        self.calls = []
        self._lock = threading.Lock()

    def post(self, body):
        text = body['comment']['text']
        with self._lock:
            self.calls.append(text)
        if text in self.fail:
            return self.status, None
        status, document = self.mock.post(body)
        if self.drop:
            del document['attributeScores'][self.drop]
        return status, document


def mock_client(cache_dir, transport_=None, **overrides):
    cfg = client.client_config(mode='mock', cache_dir=cache_dir, **overrides)
    return client.PerspectiveClient(cfg, transport=transport_ or CountingTransport(), sleep=lambda s: None)


def test_mock_scores_are_deterministic(cache_dir, tmp_path):
    first = mock_client(cache_dir).analyze('hello')
    second = mock_client(str(tmp_path / 'other')).analyze('hello')
    assert first == second
    assert isinstance(first, ScoreVector)
    assert all(0.0 <= v <= 1.0 for v in first)
    assert mock_client(cache_dir).analyze('goodbye') != first


def test_mock_triggers_raise_designated_attributes():
    mock = transport.MockTransport(key='k', boost=0.5, triggers={'damn': ['TOXICITY']})
    plain = transport.MockTransport(key='k', boost=0.5, triggers={})
    base = plain.score('TOXICITY', 'what a DAMN day')
    assert mock.score('TOXICITY', 'what a DAMN day') == min(base + 0.5, 1.0)
    assert mock.score('TOXICITY', 'damn') >= 0.5
    assert mock.score('THREAT', 'damn') == plain.score('THREAT', 'damn')
    assert mock.score('TOXICITY', 'what a day') == plain.score('TOXICITY', 'what a day')


def test_cache_prevents_second_request(cache_dir):
    counter = CountingTransport()
    scores = mock_client(cache_dir, counter)
    first = scores.analyze('hello')
    second = scores.analyze('hello')
    assert first == second
    assert counter.calls == ['hello']
    # a fresh client over the same cache directory does not request either
    assert mock_client(cache_dir, counter).analyze('hello') == first
    assert counter.calls == ['hello']


def test_cache_entries_are_keyed_by_content_hash(cache_dir):
    mock_client(cache_dir).analyze('hello')
    files = [f for _, _, names in os.walk(cache_dir) for f in names]
    assert len(files) == 1
    assert files[0].startswith('v0-sha256-') and files[0].endswith('.json')
    assert not [f for f in files if f.startswith('.tmp-')]


def test_corrupt_cache_entry_is_a_miss(cache_dir):
    counter = CountingTransport()
    scores = mock_client(cache_dir, counter)
    scores.analyze('hello')
    path = [os.path.join(d, f) for d, _, names in os.walk(cache_dir) for f in names][0]
    with open(path, 'w') as fd:
        fd.write('{not json')
    scores.analyze('hello')
    assert counter.calls == ['hello', 'hello']


def test_missing_attribute_is_protocol_error(cache_dir):
    with pytest.raises(client.ProtocolError) as e:
        mock_client(cache_dir, CountingTransport(drop='SPAM')).analyze('hello')
    assert e.value.attribute == 'SPAM'
    assert 'SPAM' in str(e.value)


def test_empty_text_is_rejected(cache_dir):
    with pytest.raises(client.ClientError):
        mock_client(cache_dir).analyze('   ')


def test_retries_with_exponential_backoff(cache_dir):
    delays = []
    counter = CountingTransport(fail=['hello'], status=429)
    cfg = client.client_config(mode='mock', cache_dir=cache_dir, max_retries=3, backoff_base=2.0)
    scores = client.PerspectiveClient(cfg, transport=counter, sleep=delays.append)
    with pytest.raises(client.TransportError) as e:
        scores.analyze('hello')
    assert e.value.status == 429
    assert delays == [2.0, 4.0, 8.0]
    assert len(counter.calls) == 4


def test_client_errors_are_not_retried(cache_dir):
    counter = CountingTransport(fail=['hello'], status=400)
    with pytest.raises(client.TransportError) as e:
        mock_client(cache_dir, counter).analyze('hello')
    assert e.value.status == 400
    assert counter.calls == ['hello']


def test_transient_failure_then_success(cache_dir):
    class Flaky(CountingTransport):
        def post(self, body):
            if not self.calls:
                self.calls.append('failed')
                raise client.TransportError('connection reset')
            return super(Flaky, self).post(body)

    counter = Flaky()
    vector = mock_client(cache_dir, counter).analyze('hello')
    assert vector == mock_client(cache_dir + '-2').analyze('hello')
    assert counter.calls == ['failed', 'hello']


@pytest.mark.parametrize('error', [
    requests.exceptions.ChunkedEncodingError('truncated body'),
    requests.exceptions.TooManyRedirects('redirect loop'),
    requests.exceptions.InvalidURL('bad endpoint'),
    requests.exceptions.ConnectionError('refused'),
])
def test_requests_errors_become_transport_errors(error):
    class FailingSession(object):
        def post(self, *args, **kwargs):
            raise error

    http = transport.RequestsTransport('http://localhost/analyze', 'key', session=FailingSession())
    with pytest.raises(client.TransportError):
        http.post(transport.request_body('hello'))


def test_live_mode_needs_api_key(cache_dir):
    cfg = client.client_config(mode='live', cache_dir=cache_dir)
    with pytest.raises(client.MissingApiKeyError) as e:
        client.PerspectiveClient(cfg, environ={})
    assert 'PERSPECTIVE_API_KEY' in str(e.value)
    client.PerspectiveClient(cfg, transport=CountingTransport(), environ={'PERSPECTIVE_API_KEY': 'k'})


def test_client_config_validation():
    with pytest.raises(ConfigurationError):
        client.client_config(qps_limit=0)
    with pytest.raises(ConfigurationError):
        client.client_config(max_retries=-1)
    with pytest.raises(ConfigurationError):
        client.client_config(mode='offline')


def corpus_of(*texts):
    return [TextInstance(str(i), text, '0') for i, text in enumerate(texts)]


def test_analyze_corpus_reports_failures_and_resumes(cache_dir):
    counter = CountingTransport(fail=['bad'], status=500)
    result = mock_client(cache_dir, counter, max_retries=0).analyze_corpus(corpus_of('one', 'bad', 'three'))
    assert [i for i, _ in result.scored] == ['0', '2']
    assert result.failures == [client.ScoringFailure('1', result.failures[0].error, 500)]

    rerun = CountingTransport()
    result = mock_client(cache_dir, rerun, max_retries=0).analyze_corpus(corpus_of('one', 'bad', 'three'))
    assert rerun.calls == ['bad']
    assert [i for i, _ in result.scored] == ['0', '1', '2']
    assert result.failures == []


def test_analyze_corpus_empty_and_all_failed(cache_dir):
    counter = CountingTransport()
    assert mock_client(cache_dir, counter).analyze_corpus([]) == client.CorpusScores([], [])
    assert counter.calls == []
    with pytest.raises(client.ClientError):
        mock_client(cache_dir, CountingTransport(fail=['x'], status=500), max_retries=0).analyze_corpus(corpus_of('x'))


def test_analyze_corpus_parallel_keeps_order(cache_dir):
    texts = ['text number %d' % i for i in range(20)]
    serial = mock_client(cache_dir + '-a').analyze_corpus(corpus_of(*texts))
    parallel = mock_client(cache_dir + '-b', workers=4).analyze_corpus(corpus_of(*texts))
    assert parallel == serial


def test_parse_response_rejects_out_of_range():
    document = transport.MockTransport().post(transport.request_body('x'))[1]
    document['attributeScores']['THREAT']['summaryScore']['value'] = 1.5
    with pytest.raises(client.ProtocolError):
        scorer.parse_response(document)
    with pytest.raises(client.ProtocolError):
        scorer.parse_response(None)


def test_request_body_asks_for_all_attributes():
    body = transport.request_body('hi', languages='en')
    assert list(body['requestedAttributes']) == list(ATTRIBUTES)
    assert body['languages'] == ['en']
    assert body['comment'] == {'text': 'hi'}


def test_rate_limiter_spaces_requests():
    now = [0.0]
    slots = []

    def sleep(seconds):
        now[0] += seconds

    limiter = ratelimit.RateLimiter(2.0, clock=lambda: now[0], sleep=sleep)
    for _ in range(5):
        slots.append(limiter.acquire())
    assert slots == [0.0, 0.5, 1.0, 1.5, 2.0]
    # observed rate never exceeds qps
    assert all(b - a >= 0.5 for a, b in zip(slots, slots[1:]))


def test_rate_limiter_does_not_sleep_when_idle():
    now = [0.0]
    sleeps = []
    limiter = ratelimit.RateLimiter(1.0, clock=lambda: now[0], sleep=sleeps.append)
    limiter.acquire()
    now[0] = 10.0
    assert limiter.acquire() == 10.0
    assert sleeps == []


def test_disk_cache_round_trip(tmp_path):
    disk = cache.DiskCache(str(tmp_path), 'mock')
    entry = {
        'hash': 'v0-sha256-' + 'ab' * 32,
        'text': 'hello',
        'attributes': list(ATTRIBUTES),
        'scores': {a: 0.5 for a in ATTRIBUTES},
        'mode': 'mock',
    }
    assert disk.get(entry['hash']) is None
    path = disk.put(entry)
    assert path.startswith(os.path.join(str(tmp_path), 'mock', 'v0', 'sha256', 'ab', 'ab'))
    assert disk.get(entry['hash']) == entry
