"""
Transport boundary of the comment-analysis client.

Everything that knows about HTTP lives here. A transport turns one request body into
(status, json document); the mock computes the document locally with the same shape the
live API returns, so the parsing path is shared.
"""

import hashlib

import requests

from .. import config
from ..corpus import ATTRIBUTES
from . import TransportError

log = config.log


def request_body(text, attributes=ATTRIBUTES, languages='en'):
    return {
        'comment': {'text': text},
        'languages': [l.strip() for l in languages.split(',') if l.strip()],
        'requestedAttributes': {attribute: {} for attribute in attributes},
        'doNotStore': True,
    }


class RequestsTransport(object):

    def __init__(self, endpoint, api_key, timeout=30.0, session=None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self.session = session or requests.Session()

    def post(self, body):
        try:
            r = self.session.post(self.endpoint, params={'key': self.api_key}, json=body, timeout=self.timeout)
        except requests.exceptions.RequestException as e:
            log.debug('request to comment analyzer failed: %s' % e)
            raise TransportError('request to comment analyzer failed: ' + str(e))
        try:
            document = r.json()
        except ValueError:
            document = None
        if r.status_code != 200:
            log.debug('%s - %s' % (r.status_code, r.reason))
        return r.status_code, document


class MockTransport(object):
    """
    Deterministic offline scorer.

    Each attribute score is a keyed 64-bit hash of (attribute, text) mapped to [0, 1];
    texts containing a trigger substring get `boost` added (clamped to 1.0) on the
    trigger's attributes.
    """

    def __init__(self, key=None, boost=None, triggers=None):
        self.key = (key if key is not None else config.get_item('mock', 'key')).encode('utf-8')
        self.boost = boost if boost is not None else config.get_item('mock', 'boost')
        self.triggers = triggers if triggers is not None else config.get_item('mock', 'triggers')

    def score(self, attribute, text):
        digest = hashlib.blake2b((attribute + '\x00' + text).encode('utf-8'), digest_size=8, key=self.key).digest()
        value = int.from_bytes(digest, 'little') / float(2**64 - 1)
        lowered = text.lower()
        for substring, attributes in self.triggers.items():
            if attribute in attributes and substring.lower() in lowered:
                value += self.boost
        return min(value, 1.0)

    def post(self, body):
        text = body['comment']['text']
        scores = {
            attribute: {'summaryScore': {'value': self.score(attribute, text), 'type': 'PROBABILITY'}}
            for attribute in body['requestedAttributes']
        }
        return 200, {'attributeScores': scores, 'languages': body.get('languages', ['en'])}
