"""Error-rate drift detectors and the sliding-window error tracker.

Two classic detectors watch a stream of binary prediction outcomes and
expose both a discrete level (stable / warning / change) and a
continuous reading: :class:`DdmDetector` tracks the running error rate
and yields ``epsilon = p + s``; :class:`EddmDetector` tracks distances
between consecutive errors and yields the similarity ratio
``zeta = (p' + 2s') / (p'_max + 2s'_max)`` clamped to [0.9, 1.0].
:class:`WindowedErrorRate` is the plain last-``w``-outcomes error
tracker whose ``epsilon`` mirrors the DDM form on the window.

Both detectors run in continuous mode by default: a change signal
resets the detector's own statistics so it can re-arm, and never
touches any classifier.
"""

from __future__ import annotations

import math
from collections import deque

STABLE = "stable"
WARNING = "warning"
CHANGE = "change"


class DdmDetector:
    """Running error-rate detector with minimum-tracking control limits.

    After each outcome the error probability estimate ``p`` and its
    binomial deviation ``s = sqrt(p(1-p)/n)`` are refreshed; the lowest
    recorded ``p + s`` (stored as a pair) anchors the warning and change
    limits at two and three deviations above it.

    Minima recording and level evaluation wait for ``warmup`` outcomes
    and ``min_errors`` observed errors. The error gate is a deliberate
    hardening: on streams with long clean prefixes the first recorded
    minimum would otherwise be (0, 0) and the very first error would
    fire an alarm.
    """

    def __init__(self, warmup: int = 30, min_errors: int = 30, continuous: bool = True):
        self.warmup = int(warmup)
        self.min_errors = int(min_errors)
        self.continuous = bool(continuous)
        self.reset()

    def reset(self):
        self.n = 0
        self.p = 0.0
        self.s = 0.0
        self.errors = 0
        self.p_min = math.inf
        self.s_min = math.inf
        self.level = STABLE
        return self

    def update(self, is_error) -> str:
        err = 1.0 if is_error else 0.0
        self.n += 1
        self.p += (err - self.p) / self.n
        self.s = math.sqrt(self.p * (1.0 - self.p) / self.n)
        if is_error:
            self.errors += 1
        level = STABLE
        if self.n >= self.warmup and self.errors >= self.min_errors:
            ps = self.p + self.s
            if ps < self.p_min + self.s_min:
                self.p_min = self.p
                self.s_min = self.s
            if ps > self.p_min + 3.0 * self.s_min:
                level = CHANGE
            elif ps > self.p_min + 2.0 * self.s_min:
                level = WARNING
        self.level = level
        if level == CHANGE and self.continuous:
            saved = self.level
            self.reset()
            self.level = saved
        return level

    def epsilon(self) -> float:
        """Continuous error reading p + s; 0 on a fresh detector."""
        if self.n == 0:
            return 0.0
        return self.p + self.s


class EddmDetector:
    """Distance-between-errors detector.

    Every outcome advances a distance counter; an error feeds the
    counter value into running distance moments (mean ``p'``, population
    deviation ``s'``) and resets it, so the first error's distance is
    its 1-based position and back-to-back errors measure 1. The largest
    recorded ``p' + 2s'`` (kept as a pair) is the reference scale;
    shrinking distances pull the ratio ``zeta`` below 1. Levels need
    ``warmup_errors`` errors; until then, and again after a continuous
    reset, ``similarity`` holds its last value (initially 1.0).
    """

    def __init__(
        self,
        warmup_errors: int = 30,
        change_threshold: float = 0.9,
        warning_threshold: float = 0.95,
        continuous: bool = True,
    ):
        self.warmup_errors = int(warmup_errors)
        self.change_threshold = float(change_threshold)
        self.warning_threshold = float(warning_threshold)
        self.continuous = bool(continuous)
        self._since = 0
        self._raw = 1.0
        self.level = STABLE
        self._reset_moments()

    def _reset_moments(self):
        self.error_count = 0
        self._mean = 0.0
        self._m2 = 0.0
        self._max_sum = 0.0

    def reset(self):
        self._since = 0
        self._raw = 1.0
        self.level = STABLE
        self._reset_moments()
        return self

    def update(self, is_error) -> str:
        self._since += 1
        if not is_error:
            return self.level
        distance = self._since
        self._since = 0
        self.error_count += 1
        delta = distance - self._mean
        self._mean += delta / self.error_count
        self._m2 += delta * (distance - self._mean)
        dev = math.sqrt(self._m2 / self.error_count)
        current = self._mean + 2.0 * dev
        if current > self._max_sum:
            self._max_sum = current
        level = STABLE
        if self.error_count >= self.warmup_errors:
            self._raw = current / self._max_sum
            if self._raw < self.change_threshold:
                level = CHANGE
            elif self._raw < self.warning_threshold:
                level = WARNING
        self.level = level
        if level == CHANGE and self.continuous:
            self._reset_moments()
        return level

    def similarity(self) -> float:
        """Last computed distance-similarity ratio, clamped to [0.9, 1.0]."""
        if self._raw < 0.9:
            return 0.9
        if self._raw > 1.0:
            return 1.0
        return self._raw


class WindowedErrorRate:
    """Error rate over the last ``window`` outcomes.

    ``epsilon`` is ``p_w + s_w`` with the same binomial deviation form
    the running detector uses, computed over however many outcomes the
    window currently holds; an empty window reads 0.
    """

    def __init__(self, window: int = 100):
        if window < 1:
            raise ValueError("window must hold at least one outcome")
        self.window = int(window)
        self._buf = deque(maxlen=self.window)
        self._errors = 0

    def reset(self):
        self._buf.clear()
        self._errors = 0
        return self

    def update(self, is_error):
        if len(self._buf) == self.window:
            self._errors -= self._buf[0]
        e = 1 if is_error else 0
        self._buf.append(e)
        self._errors += e
        return self

    def error_rate(self) -> float:
        m = len(self._buf)
        if m == 0:
            return 0.0
        return self._errors / m

    def epsilon(self) -> float:
        m = len(self._buf)
        if m == 0:
            return 0.0
        p = self._errors / m
        return p + math.sqrt(p * (1.0 - p) / m)
