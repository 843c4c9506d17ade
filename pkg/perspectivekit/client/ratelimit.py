import time
import threading

from .. import config

log = config.log


class RateLimiter(object):
    """
    Hands out request slots at most qps apart, across threads.

    clock and sleep are injectable so tests can run on simulated time.
    """

    def __init__(self, qps, clock=time.monotonic, sleep=time.sleep):
        self.interval = 1.0 / qps
        self.clock = clock
        self.sleep = sleep
        self._next = None
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            now = self.clock()
            slot = now if self._next is None else max(now, self._next)
            if slot > now:
                log.debug('rate limiting, waiting %.2fs' % (slot - now))
                self.sleep(slot - now)
            self._next = slot + self.interval
            return slot


class NoLimit(object):

    def acquire(self):
        return None
