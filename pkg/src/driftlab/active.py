"""Label-query strategies for stream active learning.

Each strategy looks at the current prediction's posterior and answers
whether the true label should be bought. The interesting one is
:class:`RandomizedVariableUncertainty`: an adaptive confidence threshold
that shrinks whenever a label is bought and grows when one is not, with
a multiplicative Gaussian jitter so that occasional confident instances
are still sampled. A query decision carries the exact threshold it
compared against so downstream records can replay the reasoning.
"""

from __future__ import annotations

import numpy as np

from .core import ClassPosterior, ConfigError


class QueryDecision:
    """Outcome of one query check plus the values that drove it."""

    __slots__ = ("query", "threshold", "top_prob")

    def __init__(self, query, threshold, top_prob):
        self.query = query
        self.threshold = threshold
        self.top_prob = top_prob

    def __repr__(self):
        return (
            f"QueryDecision(query={self.query!r}, threshold={self.threshold!r},"
            f" top_prob={self.top_prob!r})"
        )


class RandomQuery:
    """Queries uniformly at random at exactly the budget rate."""

    adaptive_threshold = None

    def __init__(self, budget: float, rng=None):
        if not 0.0 <= budget <= 1.0:
            raise ConfigError("budget must lie in [0, 1]")
        self.budget = float(budget)
        self._rng = rng if rng is not None else np.random.default_rng(0)

    def decide(self, posterior: ClassPosterior) -> QueryDecision:
        query = self._rng.random() < self.budget
        return QueryDecision(query, self.budget, posterior.top_prob)


class SamplingQuery:
    """Margin-driven selective sampling.

    Queries with probability delta / (delta + margin), so tied top
    classes are always bought and confident predictions rarely.
    """

    adaptive_threshold = None

    def __init__(self, delta: float = 1.0, rng=None):
        if delta <= 0.0:
            raise ConfigError("sampling delta must be positive")
        self.delta = float(delta)
        self._rng = rng if rng is not None else np.random.default_rng(0)

    def decide(self, posterior: ClassPosterior) -> QueryDecision:
        margin = posterior.top_prob - posterior.second_prob
        p = self.delta / (self.delta + margin)
        query = self._rng.random() < p
        return QueryDecision(query, p, posterior.top_prob)


class RandomizedVariableUncertainty:
    """Adaptive uncertainty threshold with multiplicative Gaussian jitter.

    Starts fully permissive (threshold 1). Each decision draws one
    factor eta ~ Normal(1, noise) and queries iff the top posterior is
    at most threshold * eta; buying a label tightens the threshold by
    the step factor, passing loosens it, and the threshold is clamped to
    [1/classes, 1]. With ``noise=0`` this is the plain deterministic
    variable-uncertainty rule. A negative eta draw simply means "don't
    query" since no posterior is negative.
    """

    def __init__(self, step: float = 0.01, noise: float = 1.0, rng=None):
        if not 0.0 < step <= 1.0:
            raise ConfigError("threshold step must lie in (0, 1]")
        if noise < 0.0:
            raise ConfigError("randomization scale must be nonnegative")
        self.step = float(step)
        self.noise = float(noise)
        self.threshold = 1.0
        self._rng = rng if rng is not None else np.random.default_rng(0)

    @property
    def adaptive_threshold(self) -> float:
        return self.threshold

    def decide(self, posterior: ClassPosterior) -> QueryDecision:
        eta = 1.0 + self.noise * self._rng.standard_normal()
        randomized = self.threshold * eta
        top = posterior.top_prob
        if top <= randomized:
            query = True
            threshold = self.threshold * (1.0 - self.step)
        else:
            query = False
            threshold = self.threshold * (1.0 + self.step)
        floor = 1.0 / len(posterior.probs)
        if threshold < floor:
            threshold = floor
        elif threshold > 1.0:
            threshold = 1.0
        self.threshold = threshold
        return QueryDecision(query, randomized, top)
