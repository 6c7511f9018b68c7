import time


def throttle_requests(timestamps, per_second):
    """Drop request timestamps that exceed the per-second bucket."""
    allowed = []
    bucket_start = None
    for ts in timestamps:
        if bucket_start is None or ts - bucket_start >= 1.0:
            bucket_start = ts
            count = 0
        if count < per_second:
            allowed.append(ts)
            count += 1
    return allowed


class RetryPolicy:
    """Retry schedule with exponential backoff and jitter."""

    def __init__(self, base_delay=0.5, attempts=4):
        self.base_delay = base_delay
        self.attempts = attempts

    def backoff_delay(self, attempt, jitter=0.0):
        """Exponential backoff delay for the given attempt with jitter."""
        return self.base_delay * (2 ** attempt) + jitter
