"""Budget-gated online learning that mixes bought labels with its own.

The runner folds one rule over the stream: predict, score the
prediction for evaluation, then either buy the true label (when spend
is under budget and the query strategy asks) or fall through to the
self-labeling gate and maybe train on the prediction itself. Bought
labels are the only thing that feeds the drift detectors, the error
window, and the budget accounting; self-labeling is free by
construction. Label access is split in two: the evaluation score reads
the hidden label every step, the learning path sees it only when a
query fires.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError, DriftLabError, Instance, LoadedStream, StreamSchema
from .active import RandomizedVariableUncertainty, RandomQuery, SamplingQuery
from .drift import DdmDetector, EddmDetector, WindowedErrorRate
from .evaluation import PrequentialWindow
from .learners import AccuracyWeightedEnsemble, HoeffdingTree, NaiveBayes
from .selflabel import (
    AdaptiveConfidence,
    ErrorScaledConfidence,
    Feedback,
    FixedConfidence,
    InvertedUncertainty,
    RandomizedAdaptiveConfidence,
    SimilarityScaledConfidence,
    WindowScaledConfidence,
)

QUERIED = "queried"
SELF_LABELED = "self_labeled"
SKIPPED = "skipped"


class EmptyStream(DriftLabError):
    """Raised when a run is asked to process zero instances."""


class BudgetState:
    """Label spend accounting: bought labels as a share of all instances."""

    __slots__ = ("budget", "labeled", "seen")

    def __init__(self, budget: float):
        if not 0.0 <= budget <= 1.0:
            raise ConfigError("budget must lie in [0, 1]")
        self.budget = float(budget)
        self.labeled = 0
        self.seen = 0

    @property
    def spend(self) -> float:
        return self.labeled / self.seen if self.seen else 0.0

    def open(self) -> bool:
        return self.spend < self.budget


LEARNERS = ("nb", "ht", "awe")
ACTIVE = ("random", "sampling", "randvar")
SELF_LABEL = (
    "none",
    "fixed",
    "uni",
    "randuni",
    "invunc",
    "cddm",
    "ceddm",
    "winerr",
)


@dataclass(frozen=True)
class HybridConfig:
    """One run's choices: learner, strategies, budget, seed, window."""

    learner: str
    active: str
    self_label: str = "none"
    budget: float = 0.1
    seed: int = 0
    window: int = 1000

    def __post_init__(self):
        if self.learner not in LEARNERS:
            raise ConfigError(
                f"unknown learner {self.learner!r}; choose from {', '.join(LEARNERS)}"
            )
        if self.active not in ACTIVE:
            raise ConfigError(
                f"unknown active strategy {self.active!r};"
                f" choose from {', '.join(ACTIVE)}"
            )
        if self.self_label not in SELF_LABEL:
            raise ConfigError(
                f"unknown self-label strategy {self.self_label!r};"
                f" choose from {', '.join(SELF_LABEL)}"
            )
        if not 0.0 <= self.budget <= 1.0:
            raise ConfigError("budget must lie in [0, 1]")
        if self.window < 1:
            raise ConfigError("window must be at least 1")
        if self.self_label == "invunc" and self.active != "randvar":
            raise ConfigError(
                "self_label 'invunc' needs the adaptive threshold that only"
                " active 'randvar' publishes"
            )

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "active": self.active,
            "self_label": self.self_label,
            "budget": self.budget,
            "seed": self.seed,
            "window": self.window,
        }


def make_learner(name: str, schema: StreamSchema, seed: int):
    if name == "nb":
        return NaiveBayes(schema)
    if name == "ht":
        return HoeffdingTree(schema, seed=seed)
    if name == "awe":
        return AccuracyWeightedEnsemble(schema)
    raise ConfigError(f"unknown learner {name!r}")


def make_active(name: str, budget: float, rng):
    if name == "random":
        return RandomQuery(budget, rng=rng)
    if name == "sampling":
        return SamplingQuery(rng=rng)
    if name == "randvar":
        return RandomizedVariableUncertainty(rng=rng)
    raise ConfigError(f"unknown active strategy {name!r}")


def make_self_label(name: str, rng):
    if name == "none":
        return None
    if name == "fixed":
        return FixedConfidence()
    if name == "uni":
        return AdaptiveConfidence()
    if name == "randuni":
        return RandomizedAdaptiveConfidence(rng=rng)
    if name == "invunc":
        return InvertedUncertainty()
    if name == "cddm":
        return ErrorScaledConfidence()
    if name == "ceddm":
        return SimilarityScaledConfidence()
    if name == "winerr":
        return WindowScaledConfidence()
    raise ConfigError(f"unknown self-label strategy {name!r}")


class StepRecord:
    """Everything observable about one processed instance."""

    FIELDS = (
        "index",
        "action",
        "predicted",
        "true_label",
        "correct",
        "top_prob",
        "query_threshold",
        "al_threshold",
        "sl_threshold",
        "error_estimate",
        "similarity",
        "windowed_error",
        "windowed_accuracy",
        "spend",
        "queried",
        "self_labeled",
        "skipped",
    )
    __slots__ = FIELDS

    def __init__(self, **values):
        for name in self.FIELDS:
            setattr(self, name, values[name])

    def as_tuple(self):
        return tuple(getattr(self, name) for name in self.FIELDS)

    def __repr__(self):
        inner = ", ".join(f"{n}={getattr(self, n)!r}" for n in self.FIELDS[:6])
        return f"StepRecord({inner}, ...)"


@dataclass(frozen=True)
class RunSummary:
    stream: str
    instances: int
    accuracy: float
    final_spend: float
    queried: int
    self_labeled: int
    skipped: int
    mean_windowed_accuracy: float
    max_budget_overshoot: float

    def to_dict(self) -> dict:
        return {
            "stream": self.stream,
            "instances": self.instances,
            "accuracy": self.accuracy,
            "final_spend": self.final_spend,
            "queried": self.queried,
            "self_labeled": self.self_labeled,
            "skipped": self.skipped,
            "mean_windowed_accuracy": self.mean_windowed_accuracy,
            "max_budget_overshoot": self.max_budget_overshoot,
        }


class HybridRunner:
    """Per-instance orchestration over pre-built components.

    Build one straight from parts for white-box tests, or through
    :func:`build_runner` to resolve a :class:`HybridConfig`.
    """

    def __init__(self, schema, learner, active, self_label, budget, window=1000):
        self.schema = schema
        self.learner = learner
        self.active = active
        self.self_label = self_label
        self.budget = BudgetState(budget)
        self.evaluation = PrequentialWindow(window)
        self.error_monitor = DdmDetector()
        self.distance_monitor = EddmDetector()
        self.error_window = WindowedErrorRate(window=100)
        self.max_overshoot = 0.0
        self.correct_total = 0
        self.queried = 0
        self.self_labeled = 0
        self.skipped = 0
        self._windowed_accuracy_sum = 0.0
        self._feedback = Feedback(class_count=schema.class_count)

    def process_instance(self, instance: Instance, want_record: bool = True):
        """Run one instance; returns a :class:`StepRecord` or, with
        ``want_record=False``, only the action constant (the record
        object is a measurable share of a sweep's cost)."""
        truth = instance.label
        posterior = self.learner.predict(instance.features)
        predicted = posterior.top_index
        correct = predicted == truth
        # evaluation-only read of the hidden label
        self.evaluation.update(0 if correct else 1)
        if correct:
            self.correct_total += 1
        self.budget.seen += 1

        action = SKIPPED
        true_label = None
        al_threshold = None
        sl_threshold = None
        if self.budget.open():
            decision = self.active.decide(posterior)
            al_threshold = decision.threshold
            if decision.query:
                # the label is bought: it may now feed learning state
                true_label = truth
                self.budget.labeled += 1
                is_error = not correct
                self.error_monitor.update(is_error)
                self.distance_monitor.update(is_error)
                self.error_window.update(is_error)
                self.learner.train(instance.features, truth)
                action = QUERIED
                overshoot = (
                    self.budget.labeled - self.budget.budget * self.budget.seen
                )
                if overshoot > self.max_overshoot:
                    self.max_overshoot = overshoot

        if action is SKIPPED and self.self_label is not None:
            feedback = self._feedback
            feedback.query_threshold = self.active.adaptive_threshold
            feedback.error_estimate = self.error_monitor.epsilon()
            feedback.similarity = self.distance_monitor.similarity()
            feedback.windowed_error = self.error_window.error_rate()
            decision = self.self_label.decide(posterior, feedback)
            sl_threshold = decision.threshold
            if decision.train:
                self.learner.train(instance.features, predicted)
                action = SELF_LABELED

        if action is QUERIED:
            self.queried += 1
        elif action is SELF_LABELED:
            self.self_labeled += 1
        else:
            self.skipped += 1

        windowed_accuracy = self.evaluation.accuracy()
        self._windowed_accuracy_sum += windowed_accuracy
        if not want_record:
            return action
        return StepRecord(
            index=self.budget.seen,
            action=action,
            predicted=predicted,
            true_label=true_label,
            correct=correct,
            top_prob=posterior.top_prob,
            query_threshold=self.active.adaptive_threshold,
            al_threshold=al_threshold,
            sl_threshold=sl_threshold,
            error_estimate=self.error_monitor.epsilon(),
            similarity=self.distance_monitor.similarity(),
            windowed_error=self.error_window.error_rate(),
            windowed_accuracy=windowed_accuracy,
            spend=self.budget.spend,
            queried=self.queried,
            self_labeled=self.self_labeled,
            skipped=self.skipped,
        )

    def summary(self, stream_name: str) -> RunSummary:
        seen = self.budget.seen
        return RunSummary(
            stream=stream_name,
            instances=seen,
            accuracy=self.correct_total / seen if seen else 0.0,
            final_spend=self.budget.spend,
            queried=self.queried,
            self_labeled=self.self_labeled,
            skipped=self.skipped,
            mean_windowed_accuracy=(
                self._windowed_accuracy_sum / seen if seen else 0.0
            ),
            max_budget_overshoot=self.max_overshoot,
        )


def build_runner(schema: StreamSchema, config: HybridConfig) -> HybridRunner:
    learner = make_learner(config.learner, schema, config.seed)
    active = make_active(
        config.active, config.budget, np.random.default_rng([config.seed, 0])
    )
    self_label = make_self_label(
        config.self_label, np.random.default_rng([config.seed, 1])
    )
    return HybridRunner(
        schema, learner, active, self_label, config.budget, config.window
    )


def run_stream(stream: LoadedStream, config: HybridConfig, record_stride: int = 0):
    """Fold the runner over a loaded stream.

    ``record_stride`` keeps a step record every that-many instances
    (0 keeps none, 1 keeps all). Returns (records, summary).
    """
    if len(stream.instances) == 0:
        raise EmptyStream(f"stream {stream.name!r} has no instances")
    if record_stride < 0:
        raise ConfigError("record stride must be nonnegative")
    runner = build_runner(stream.schema, config)
    records = []
    for position, instance in enumerate(stream.instances, start=1):
        if instance.label is None:
            raise ConfigError(
                f"stream {stream.name!r} instance {position} has no label;"
                " prequential runs need fully labeled streams"
            )
        want = bool(record_stride) and position % record_stride == 0
        record = runner.process_instance(instance, want_record=want)
        if want:
            records.append(record)
    return records, runner.summary(stream.name)
