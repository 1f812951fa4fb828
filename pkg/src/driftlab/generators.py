"""Synthetic drifting-stream generators.

A :class:`DriftProfile` turns a stream position into a concept *phase*:
a float whose integer part selects a concept and whose fractional part
blends toward the next one. Three concept families interpret phases:

* ``gaussian-clusters``: spherical per-class Gaussians whose means
  rotate between concepts;
* ``rotating-hyperplane``: uniform cube data labeled by a rotating
  linear boundary through the first two dimensions;
* ``sea-like-thresholds``: uniform data labeled by the sum of the
  first two features against a per-concept threshold.

Generation is vectorized and deterministic for a fixed seed: the
profile's mixing draws (gradual/recurring only) come first, then labels,
then feature noise, in that frozen order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    NUMERIC,
    Attribute,
    ConfigError,
    DriftLabError,
    Instance,
    LoadedStream,
    StreamSchema,
)

SUDDEN = "sudden"
GRADUAL = "gradual"
INCREMENTAL = "incremental"
RECURRING = "recurring"
KINDS = (SUDDEN, GRADUAL, INCREMENTAL, RECURRING)


class InvalidProfile(DriftLabError):
    """Drift profile is internally inconsistent or does not fit the stream."""


@dataclass(frozen=True)
class DriftProfile:
    """Where and how concepts change along the stream.

    ``change_points`` are 0-based instance indices; the instance at a
    change point is the first one affected by the transition. ``width``
    is the transition window length and must be 0 exactly for sudden
    drift. Recurring drift cycles concept indices modulo
    ``cycle_length`` instead of progressing.
    """

    kind: str
    change_points: tuple[int, ...] = ()
    width: int = 0
    cycle_length: int = 2

    def __post_init__(self):
        if not isinstance(self.change_points, tuple):
            object.__setattr__(self, "change_points", tuple(self.change_points))
        if self.kind not in KINDS:
            raise InvalidProfile(f"unknown drift kind: {self.kind!r}")
        points = self.change_points
        for p in points:
            if p <= 0:
                raise InvalidProfile(f"change point {p} must be positive")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise InvalidProfile(f"change points must be strictly increasing: {points}")
        if self.kind == SUDDEN:
            if self.width != 0:
                raise InvalidProfile("transition width must be 0 for sudden drift")
        else:
            if self.width < 1:
                raise InvalidProfile(f"{self.kind} drift needs a transition width >= 1")
            for a, b in zip(points, points[1:]):
                if a + self.width > b:
                    raise InvalidProfile(
                        f"transition window at {a} (width {self.width})"
                        f" overlaps the next change point {b}"
                    )
        if self.cycle_length < 1:
            raise InvalidProfile("cycle_length must be at least 1")

    def validate_length(self, n: int) -> None:
        for p in self.change_points:
            if p >= n:
                raise InvalidProfile(f"change point {p} outside stream of {n} instances")
            if self.kind != SUDDEN and p + self.width > n:
                raise InvalidProfile(
                    f"transition window at {p} (width {self.width})"
                    f" runs past the stream end {n}"
                )

    def concept_phases(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Per-instance concept phase array of length ``n``.

        Sudden/gradual/recurring yield whole-number phases (gradual and
        recurring resolve their in-window mixture with one uniform draw
        per stream position); incremental yields fractional phases that
        ramp linearly from one concept to the next inside each window.
        """
        self.validate_length(n)
        points = self.change_points
        positions = np.arange(n)
        segment = np.searchsorted(points, positions, side="right").astype(np.float64)
        if self.kind == SUDDEN:
            return segment
        if self.kind == INCREMENTAL:
            phases = segment
            for j, cp in enumerate(points):
                idx = np.arange(cp, cp + self.width)
                phases[idx] = j + (idx - cp) / self.width
            return phases
        # gradual and recurring: draw once per position, used inside windows
        mix = rng.random(n)
        phases = segment
        for j, cp in enumerate(points):
            idx = np.arange(cp, cp + self.width)
            ramp = (idx - cp) / self.width
            phases[idx] = np.where(mix[idx] < ramp, j + 1.0, float(j))
        if self.kind == RECURRING:
            phases = np.mod(phases, self.cycle_length)
        return phases


class GaussianClusters:
    """Per-class spherical Gaussians; drift rotates the cluster centers.

    Class ``i`` of concept phase ``t`` is centered on a circle of the
    given radius at angle ``t * rotation + 2*pi*i / classes`` (in the
    first two dimensions; any further dimensions are pure noise).
    """

    name = "gaussian-clusters"

    def __init__(self, classes=2, dims=2, radius=3.0, spread=1.0, rotation=0.8):
        if classes < 2:
            raise ConfigError("gaussian-clusters needs at least 2 classes")
        if not 2 <= dims <= 10:
            raise ConfigError("gaussian-clusters supports 2 to 10 dimensions")
        if spread <= 0:
            raise ConfigError("spread must be positive")
        self.classes = int(classes)
        self.dims = int(dims)
        self.radius = float(radius)
        self.spread = float(spread)
        self.rotation = float(rotation)

    def params(self):
        return {
            "classes": self.classes,
            "dims": self.dims,
            "radius": self.radius,
            "spread": self.spread,
            "rotation": self.rotation,
        }

    def schema(self) -> StreamSchema:
        attrs = tuple(Attribute(f"x{i}", NUMERIC) for i in range(self.dims))
        return StreamSchema(attrs, tuple(f"c{i}" for i in range(self.classes)))

    def class_means(self, phase: float) -> np.ndarray:
        """Cluster centers (classes x dims) at one concept phase."""
        out = np.zeros((self.classes, self.dims))
        for i in range(self.classes):
            a = phase * self.rotation + 2.0 * math.pi * i / self.classes
            out[i, 0] = self.radius * math.cos(a)
            out[i, 1] = self.radius * math.sin(a)
        return out

    def sample(self, rng: np.random.Generator, phases: np.ndarray):
        n = len(phases)
        y = rng.integers(0, self.classes, size=n)
        angles = phases * self.rotation + 2.0 * math.pi * y / self.classes
        x = self.spread * rng.standard_normal((n, self.dims))
        x[:, 0] += self.radius * np.cos(angles)
        x[:, 1] += self.radius * np.sin(angles)
        return x, y


class RotatingHyperplane:
    """Uniform data in [-1, 1]^d labeled by a rotating linear boundary.

    The boundary normal starts along the first axis and rotates in the
    plane of the first two dimensions by ``rotation`` radians per
    concept; remaining dimensions are irrelevant attributes.
    """

    name = "rotating-hyperplane"
    classes = 2

    def __init__(self, dims=5, rotation=0.5, noise=0.0):
        if dims < 2:
            raise ConfigError("rotating-hyperplane needs at least 2 dimensions")
        if not 0.0 <= noise < 0.5:
            raise ConfigError("label noise must be in [0, 0.5)")
        self.dims = int(dims)
        self.rotation = float(rotation)
        self.noise = float(noise)

    def params(self):
        return {"dims": self.dims, "rotation": self.rotation, "noise": self.noise}

    def schema(self) -> StreamSchema:
        attrs = tuple(Attribute(f"x{i}", NUMERIC) for i in range(self.dims))
        return StreamSchema(attrs, ("c0", "c1"))

    def boundary_normal(self, phase: float) -> np.ndarray:
        a = phase * self.rotation
        w = np.zeros(self.dims)
        w[0] = math.cos(a)
        w[1] = math.sin(a)
        return w

    def sample(self, rng: np.random.Generator, phases: np.ndarray):
        n = len(phases)
        x = rng.uniform(-1.0, 1.0, size=(n, self.dims))
        a = phases * self.rotation
        score = x[:, 0] * np.cos(a) + x[:, 1] * np.sin(a)
        y = (score >= 0.0).astype(np.int64)
        if self.noise > 0.0:
            flip = rng.random(n) < self.noise
            y = np.where(flip, 1 - y, y)
        return x, y


class SeaThresholds:
    """Three uniform features in [0, 10]; label is x0 + x1 <= threshold.

    Concepts cycle through the classic threshold list (8, 9, 7, 9.5);
    fractional phases interpolate between consecutive thresholds.
    """

    name = "sea-like-thresholds"
    classes = 2
    dims = 3
    thresholds = (8.0, 9.0, 7.0, 9.5)

    def __init__(self, noise=0.0):
        if not 0.0 <= noise < 0.5:
            raise ConfigError("label noise must be in [0, 0.5)")
        self.noise = float(noise)

    def params(self):
        return {"noise": self.noise}

    def schema(self) -> StreamSchema:
        attrs = tuple(Attribute(f"x{i}", NUMERIC) for i in range(self.dims))
        return StreamSchema(attrs, ("c0", "c1"))

    def threshold_at(self, phase: float) -> float:
        t = self.thresholds
        k = int(math.floor(phase))
        frac = phase - k
        lo = t[k % len(t)]
        hi = t[(k + 1) % len(t)]
        return lo + frac * (hi - lo)

    def sample(self, rng: np.random.Generator, phases: np.ndarray):
        n = len(phases)
        x = rng.uniform(0.0, 10.0, size=(n, self.dims))
        t = np.asarray(self.thresholds)
        k = np.floor(phases).astype(np.int64)
        frac = phases - k
        lo = t[k % len(t)]
        hi = t[(k + 1) % len(t)]
        thr = lo + frac * (hi - lo)
        y = (x[:, 0] + x[:, 1] <= thr).astype(np.int64)
        if self.noise > 0.0:
            flip = rng.random(n) < self.noise
            y = np.where(flip, 1 - y, y)
        return x, y


FAMILIES = {
    GaussianClusters.name: GaussianClusters,
    RotatingHyperplane.name: RotatingHyperplane,
    SeaThresholds.name: SeaThresholds,
}


def make_family(family, **params):
    if isinstance(family, str):
        try:
            cls = FAMILIES[family]
        except KeyError:
            known = ", ".join(sorted(FAMILIES))
            raise ConfigError(f"unknown concept family {family!r} (known: {known})") from None
        try:
            return cls(**params)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for family {family!r}: {exc}") from None
    return family


def gen_drift_stream(profile: DriftProfile, family, n: int, seed, name=None, **family_params) -> LoadedStream:
    """Generate ``n`` instances from a concept family under a drift profile.

    Deterministic for fixed (profile, family, params, n, seed): calling
    twice yields identical instances.
    """
    if n < 1:
        raise ConfigError("stream length must be at least 1")
    fam = make_family(family, **family_params)
    rng = np.random.default_rng(seed)
    phases = profile.concept_phases(n, rng)
    x, y = fam.sample(rng, phases)
    rows = x.tolist()
    labels = y.tolist()
    instances = [Instance(tuple(row), label) for row, label in zip(rows, labels)]
    metadata = {
        "source": "generator",
        "family": fam.name,
        "params": fam.params(),
        "kind": profile.kind,
        "change_points": list(profile.change_points),
        "width": profile.width,
        "cycle_length": profile.cycle_length,
        "n": n,
        "seed": seed,
    }
    stream_name = name or f"{fam.name}:{profile.kind}"
    return LoadedStream(stream_name, fam.schema(), instances, metadata)
