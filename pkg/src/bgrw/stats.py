"""Estimators over trajectories: ball measures, drift, speed, tails, proxies.

Everything here is pure with respect to simulation state: functions either
take finished TrajectorySummary records, or drive the selected kernel lane
themselves through fresh derived seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BgrwConfig, TrajectorySummary, one_step_distribution, simulate_summary
from .errors import ValidationError
from .rng import derive_stream
from .topology import canonical_encode, extract_ball

__all__ = [
    "EmpiricalMeasure",
    "accumulate_ball",
    "MeasureObserver",
    "tv_distance",
    "merge_measures",
    "measure_from_summary",
    "walker_drift",
    "DriftCheck",
    "drift_identity_check",
    "SpeedEstimate",
    "speed_estimate",
    "visit_tail",
    "degree_tail",
    "degree_tail_curve",
    "fit_log_linear",
    "tip_passage_time",
    "FractionEstimate",
    "halfline_hit_fraction",
    "ProxyEstimate",
    "one_ended_proxy",
    "distance_milestone",
]


# ---------------------------------------------------------------------------
# Empirical measures over rooted balls


@dataclass
class EmpiricalMeasure:
    """Counted canonical ball codes at one fixed radius."""

    radius: int
    counts: dict[bytes, int] = field(default_factory=dict)
    total: int = 0

    def add(self, code: bytes, weight: int = 1) -> None:
        if weight < 1:
            raise ValidationError("weight must be a positive count")
        self.counts[code] = self.counts.get(code, 0) + weight
        self.total += weight

    def frequencies(self) -> dict[bytes, float]:
        if self.total == 0:
            raise ValidationError("empty measure has no frequencies")
        return {code: c / self.total for code, c in self.counts.items()}

    def copy(self) -> "EmpiricalMeasure":
        return EmpiricalMeasure(self.radius, dict(self.counts), self.total)


def measure_from_summary(summary: TrajectorySummary) -> EmpiricalMeasure:
    """Lift the ball counts a fast-lane run accumulated into a measure."""
    if summary.measure_radius is None or summary.measure_counts is None:
        raise ValidationError("summary carries no measure accumulation")
    counts = {bytes(k): int(v) for k, v in summary.measure_counts.items()}
    return EmpiricalMeasure(summary.measure_radius, counts, sum(counts.values()))


def accumulate_ball(measure: EmpiricalMeasure, tree, walker: int) -> EmpiricalMeasure:
    """Count the canonical code of the walker's radius-r ball; returns the
    same measure for chaining."""
    measure.add(canonical_encode(extract_ball(tree, walker, measure.radius)))
    return measure


class MeasureObserver:
    """run_trajectory observer accumulating the walker's ball every
    ``stride`` recorded times (time 0 included)."""

    def __init__(self, radius: int, stride: int = 1):
        if stride < 1:
            raise ValidationError("stride must be >= 1")
        self.measure = EmpiricalMeasure(radius)
        self.stride = stride
        self._clock = 0

    def __call__(self, state) -> None:
        if self._clock % self.stride == 0:
            accumulate_ball(self.measure, state, state.walker)
        self._clock += 1


def tv_distance(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """Total-variation distance between two same-radius measures."""
    if a.radius != b.radius:
        raise ValidationError(f"radius mismatch: {a.radius} vs {b.radius}")
    fa = a.frequencies()
    fb = b.frequencies()
    codes = set(fa) | set(fb)
    return 0.5 * sum(abs(fa.get(c, 0.0) - fb.get(c, 0.0)) for c in codes)


def merge_measures(a: EmpiricalMeasure, b: EmpiricalMeasure) -> EmpiricalMeasure:
    """Code-wise count addition; inputs are left untouched."""
    if a.radius != b.radius:
        raise ValidationError(f"radius mismatch: {a.radius} vs {b.radius}")
    out = a.copy()
    for code, c in b.counts.items():
        out.counts[code] = out.counts.get(code, 0) + c
    out.total += b.total
    return out


# ---------------------------------------------------------------------------
# One-step drift


def _exact_probability(p) -> Fraction:
    x = p if isinstance(p, Fraction) else Fraction(p)
    if not (0 < x <= 1):
        raise ValidationError("p must lie in (0, 1]")
    return x


def walker_drift(degree: int, p):
    """Expected one-step change of distance-to-root away from the root, for
    a walker with the given degree that is not at the root itself.

    With a creation (probability p) the walker picks uniformly among
    degree+1 edges of which one leads rootward; without, among its degree
    edges. Returns a Fraction when p is one, else a float.
    """
    if degree < 1:
        raise ValidationError("drift formula needs degree >= 1")
    x = _exact_probability(p)
    d = Fraction(degree)
    out = x * (d - 1) / (d + 1) + (1 - x) * (d - 2) / d
    return out if isinstance(p, Fraction) else float(out)


@dataclass(frozen=True)
class DriftCheck:
    analytic: float
    kernel: float
    difference: float
    exact: bool


def drift_identity_check(state, p) -> DriftCheck:
    """Compare the closed-form drift against exact kernel enumeration.

    kernel = sum over the one-step law of probability x (new distance - old
    distance); analytic = walker_drift(d, p), plus the correction to +1 when
    the walker sits at the root (every move then leads away). Both sides are
    computed in exact rationals, so ``difference`` is 0.0 whenever the
    identity holds and ``exact`` records the rational-equality verdict.
    """
    x = _exact_probability(p)
    state.expand(state.walker)
    w = state.walker
    d = len(state.adjacency[w])
    if d == 0:
        raise ValidationError("isolated walker: the drift identity needs a neighbor")
    n = state.vertex_count
    depth = state.depth
    kernel = Fraction(0)
    for outcome, prob in one_step_distribution(state, x):
        if outcome.created and outcome.target == n:
            delta = 1
        else:
            delta = depth[outcome.target] - depth[w]
        kernel += prob * delta
    base = x * (d - 1) / (d + 1) + (1 - x) * (d - 2) / Fraction(d)
    analytic = base + (1 - base) * (1 if w == state.root else 0)
    diff = kernel - analytic
    return DriftCheck(
        analytic=float(analytic),
        kernel=float(kernel),
        difference=abs(float(diff)),
        exact=(diff == 0),
    )


# ---------------------------------------------------------------------------
# Speed


@dataclass(frozen=True)
class SpeedEstimate:
    """Distance-per-step estimates; both lie in [-1, 1] by construction."""

    endpoint: float
    windowed: float
    steps: int


def speed_estimate(summary: TrajectorySummary) -> SpeedEstimate:
    """Endpoint ratio distance/steps plus the mean slope over the last half.

    The distance series is measured from the initial tree's root, the
    walker's starting vertex for the canonical one-vertex start.
    """
    steps = summary.steps
    if steps < 1:
        raise ValidationError("speed needs at least one step")
    dist = summary.distance
    endpoint = float(dist[steps]) / steps
    half = steps // 2
    windowed = float(dist[steps] - dist[half]) / (steps - half)
    return SpeedEstimate(endpoint=endpoint, windowed=windowed, steps=steps)


# ---------------------------------------------------------------------------
# Visit and degree tails


def visit_tail(summaries: list[TrajectorySummary], target: int) -> dict[int, float]:
    """Empirical P(visits to target >= k) for k = 1..max observed.

    Every summary must have been run with ``target`` among its marked
    vertices. Values are nonincreasing in k.
    """
    if not summaries:
        raise ValidationError("no summaries given")
    counts = []
    for s in summaries:
        if target not in s.visits:
            raise ValidationError(f"vertex {target} was not marked during the runs")
        counts.append(s.visits[target])
    top = max(counts)
    n = len(counts)
    return {k: sum(1 for c in counts if c >= k) / n for k in range(1, top + 1)}


def degree_tail(summaries: list[TrajectorySummary], k: int) -> float:
    """Mean over runs of the count of times the walker's degree was >= k."""
    if k < 1:
        raise ValidationError("degree threshold must be >= 1")
    if not summaries:
        raise ValidationError("no summaries given")
    total = 0
    for s in summaries:
        total += int(np.count_nonzero(s.walker_degree >= k))
    return total / len(summaries)


def degree_tail_curve(summaries: list[TrajectorySummary], ks) -> list[float]:
    return [degree_tail(summaries, int(k)) for k in ks]


def fit_log_linear(xs, ys) -> tuple[float, float, float]:
    """Least-squares fit of log(y) = slope*x + intercept.

    Returns (slope, intercept, r_squared); requires positive y values and at
    least two points. A perfectly flat log series fits exactly (r2 = 1).
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if len(x) != len(y) or len(x) < 2:
        raise ValidationError("need two same-length samples to fit")
    if np.any(y <= 0):
        raise ValidationError("log fit needs positive values")
    logs = np.log(y)
    slope, intercept = np.polyfit(x, logs, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((logs - pred) ** 2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


# ---------------------------------------------------------------------------
# First-passage statistics


def tip_passage_time(config: BgrwConfig, length: int, *, backend=None) -> int | None:
    """First time the walker's radius-``length`` ball is a bare path with
    the walker at its tip; None when censored at the horizon."""
    if length < 1:
        raise ValidationError("corridor length must be >= 1")
    summary = simulate_summary(
        config, corridor_lengths=(length,), record_series=False, backend=backend
    )
    return summary.first_tip_time[length]


def distance_milestone(summary: TrajectorySummary, threshold: int) -> int | None:
    """First recorded time with distance-to-root >= threshold, else None."""
    if threshold < 1:
        raise ValidationError("milestone threshold must be >= 1")
    hits = np.nonzero(summary.distance >= threshold)[0]
    return None if len(hits) == 0 else int(hits[0])


@dataclass(frozen=True)
class FractionEstimate:
    """Monte Carlo fraction with its one-sigma binomial radius."""

    fraction: float
    radius: float
    trials: int


def halfline_hit_fraction(
    coordinate: int,
    horizon: int,
    p: float,
    trials: int,
    master_seed: int,
    *,
    backend=None,
) -> FractionEstimate:
    """Fraction of half-line runs that reach the given coordinate in time.

    Each run starts at coordinate 0 of the one-ended half-line and stops
    early on arrival; trial i uses the stream derived from (master_seed, i).
    """
    if backend is None:
        from . import _backend as backend
    if coordinate < 1:
        raise ValidationError("coordinate must be >= 1")
    if trials < 1 or horizon < 1:
        raise ValidationError("need trials >= 1 and horizon >= 1")
    hits = 0
    for i in range(trials):
        res = backend.run_summary(
            ("halfline",),
            float(p),
            horizon,
            derive_stream(master_seed, i),
            stop_at_vertex=coordinate,
            record_series=False,
        )
        if res["stopped"] == "target-vertex":
            hits += 1
    frac = hits / trials
    return FractionEstimate(
        fraction=frac,
        radius=math.sqrt(frac * (1.0 - frac) / trials),
        trials=trials,
    )


@dataclass(frozen=True)
class ProxyEstimate:
    """Never-revisited fraction among corridor-resolved runs.

    ``fraction`` is None when no run resolved its corridor event; the
    one-sigma radius defaults to 1.0 in that case so comparisons against an
    unresolved cell are never read as significant.
    """

    fraction: float | None
    radius: float
    resolved: int
    censored: int
    trials: int


def one_ended_proxy(
    length: int,
    offset: int,
    horizon: int,
    trials: int,
    p: float,
    master_seed: int,
    *,
    backend=None,
) -> ProxyEstimate:
    """Escape persistence behind a freshly built corridor.

    Each run starts from a single vertex and waits for the walker's
    radius-``length`` ball to become a bare path with the walker at its tip;
    the corridor vertex ``offset`` edges from its far end is then marked and
    the run reports whether the walker ever returns to it before the
    horizon. Runs whose corridor event is censored are excluded from the
    fraction and reported separately. offset == length marks the walker's
    own position, which counts as revisited immediately.
    """
    if backend is None:
        from . import _backend as backend
    if not (1 <= offset <= length):
        raise ValidationError("need 1 <= offset <= length")
    if trials < 1 or horizon < 1:
        raise ValidationError("need trials >= 1 and horizon >= 1")
    single = ("finite", 1, (), 0, 0)
    resolved = 0
    censored = 0
    never = 0
    for i in range(trials):
        res = backend.run_corridor_watch(
            single, length, offset, float(p), horizon, derive_stream(master_seed, i)
        )
        if res["hit"] < 0:
            censored += 1
        else:
            resolved += 1
            if res["revisited"] == 0:
                never += 1
    if resolved == 0:
        return ProxyEstimate(None, 1.0, 0, censored, trials)
    frac = never / resolved
    return ProxyEstimate(
        fraction=frac,
        radius=math.sqrt(frac * (1.0 - frac) / resolved),
        resolved=resolved,
        censored=censored,
        trials=trials,
    )
