"""Path-wise couplings between the growth walk and simpler comparison chains.

Three layers live here:

- ``couple_bgrw_loop`` runs the tree walk from a labeled-path start and
  replays the segment process off the walk's own path-visit steps, so both
  hitting times come from one random stream and can be compared path-wise.
- ``block_stopping_times`` / ``minorant_walk`` chop a trajectory into
  fixed-radius excursion blocks and build the unit-step walk those blocks
  dominate.
- ``consecutive_ones_bound`` / ``run_probability_exact`` give the disjoint
  block lower bound for a run of ones in coin flips, and its exact
  independent-flip value as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BgrwConfig, simulate_summary
from .errors import ResourceLimitError, ValidationError
from .rng import derive_stream

__all__ = [
    "CoupledRun",
    "couple_bgrw_loop",
    "coupling_batch",
    "BlockRecord",
    "block_cap",
    "blocks_from_series",
    "block_stopping_times",
    "MinorantStep",
    "minorant_walk",
    "up_fraction",
    "consecutive_ones_bound",
    "run_probability_exact",
    "ENUMERATION_BUDGET",
]


# ---------------------------------------------------------------------------
# Walk / segment-process coupling


@dataclass(frozen=True)
class CoupledRun:
    """One coupled (tree walk, segment shadow) pair.

    The walk starts at the far end of the labeled path 0..path_length with
    one extra off-path leaf there, so its projection onto the path carries
    the mandatory attached loop. The shadow's clock advances one tick per
    step the walk spends on the path; if the walk stops returning before the
    shadow reaches 0, the shadow finishes on an auxiliary stream, still
    capped at ``horizon`` ticks total.

    Hitting times are None when censored. ``walk_hit_time`` counts walk
    steps until the walker reaches vertex 0; ``segment_hit_time`` counts
    shadow ticks until the shadow does.
    """

    path_length: int
    p: float
    horizon: int
    seed: int
    walk_hit_time: int | None
    segment_hit_time: int | None
    steps: int
    walk_path_ticks: int
    segment_ticks: int
    # per-step log, only when recorded: walker's path label (-1 off path)
    # and the shadow position after each step
    path_label: np.ndarray | None = None
    shadow_label: np.ndarray | None = None

    @property
    def uncensored(self) -> bool:
        return self.walk_hit_time is not None and self.segment_hit_time is not None

    def hitting_order_ok(self) -> bool:
        """Shadow never hits later than the walk; vacuous under censoring."""
        if self.walk_hit_time is None or self.segment_hit_time is None:
            return True
        return self.walk_hit_time >= self.segment_hit_time

    def alignment_ok(self) -> bool:
        """While the walker is on the path, the shadow sits on its label."""
        if self.path_label is None or self.shadow_label is None:
            raise ValidationError("run was not recorded with an alignment log")
        on = self.path_label >= 0
        return bool(np.all(self.shadow_label[on] == self.path_label[on]))


def couple_bgrw_loop(
    config: BgrwConfig,
    path_length: int,
    *,
    record_alignment: bool = False,
    backend=None,
) -> CoupledRun:
    """Run one coupled pair; p, horizon and seed come from ``config``.

    The initial tree is built here (labeled path of the given length plus
    one leaf at the walker's end), the minimal start in which the walker has
    an ancestor at that distance and degree >= 2; any initial-tree field on
    the config is ignored for this operation.
    """
    if backend is None:
        from . import _backend as backend
    if int(path_length) != path_length or path_length < 1:
        raise ValidationError("path length must be an integer >= 1")
    res = backend.run_coupled(
        int(path_length),
        float(config.p),
        config.horizon,
        config.seed,
        bool(record_alignment),
    )
    walk_hit = int(res["walk_hit"])
    seg_hit = int(res["seg_hit"])
    return CoupledRun(
        path_length=int(path_length),
        p=float(config.p),
        horizon=config.horizon,
        seed=config.seed,
        walk_hit_time=None if walk_hit < 0 else walk_hit,
        segment_hit_time=None if seg_hit < 0 else seg_hit,
        steps=int(res["steps"]),
        walk_path_ticks=int(res["coupled_ticks"]),
        segment_ticks=int(res["loop_ticks"]),
        path_label=res.get("align_label"),
        shadow_label=res.get("align_loop"),
    )


def coupling_batch(
    p: float,
    path_length: int,
    horizon: int,
    runs: int,
    master_seed: int,
    *,
    backend=None,
) -> dict:
    """Tally hitting-order outcomes over independent coupled runs.

    Returns counts: runs, uncensored pairs, order violations (walk hit
    strictly before its shadow), exact ties, and censoring on either side.
    Run i uses the stream derived from (master_seed, i).
    """
    if backend is None:
        from . import _backend as backend
    if runs < 1:
        raise ValidationError("need at least one run")
    if int(path_length) != path_length or path_length < 1:
        raise ValidationError("path length must be an integer >= 1")
    out = {
        "runs": runs,
        "uncensored": 0,
        "violations": 0,
        "equal": 0,
        "walk_censored": 0,
        "segment_censored": 0,
    }
    for i in range(runs):
        res = backend.run_coupled(
            int(path_length), float(p), horizon, derive_stream(master_seed, i), False
        )
        walk_hit = int(res["walk_hit"])
        seg_hit = int(res["seg_hit"])
        if walk_hit < 0:
            out["walk_censored"] += 1
        if seg_hit < 0:
            out["segment_censored"] += 1
        if walk_hit >= 0 and seg_hit >= 0:
            out["uncensored"] += 1
            if walk_hit < seg_hit:
                out["violations"] += 1
            elif walk_hit == seg_hit:
                out["equal"] += 1
    return out


# ---------------------------------------------------------------------------
# Excursion blocks and the unit-step minorant


@dataclass(frozen=True)
class BlockRecord:
    """One closed excursion block of a distance series.

    ``tag`` is "up" when distance-to-root moved by exactly +radius within
    the block, "down" for -radius, "timeout" when the step cap elapsed
    first. Index 0 is the "start" anchor carrying the initial distance.
    """

    index: int
    time: int
    distance: int
    tag: str


def block_cap(radius: int) -> int:
    """Step budget of one block: ceil(exp(sqrt(radius)))."""
    if int(radius) != radius or radius < 1:
        raise ValidationError("block radius must be an integer >= 1")
    return math.ceil(math.exp(math.sqrt(radius)))


def blocks_from_series(dist, radius: int, max_blocks: int | None = None) -> list[BlockRecord]:
    """Chop a distance-to-root series into excursion blocks.

    Each block ends at the first step where the distance has moved by
    +radius or -radius from the block's start, or after the step cap.
    A trailing stretch too short to fill a block is dropped.
    """
    cap = block_cap(radius)
    if len(dist) == 0:
        raise ValidationError("empty distance series")
    records = [BlockRecord(0, 0, int(dist[0]), "start")]
    last = len(dist) - 1
    start = 0
    k = 0
    while max_blocks is None or k < max_blocks:
        base = int(dist[start])
        tag = None
        end = -1
        limit = min(start + cap, last)
        for t in range(start + 1, limit + 1):
            delta = int(dist[t]) - base
            if delta == radius:
                tag, end = "up", t
                break
            if delta == -radius:
                tag, end = "down", t
                break
        if tag is None:
            if start + cap <= last:
                tag, end = "timeout", start + cap
            else:
                break
        k += 1
        records.append(BlockRecord(k, end, int(dist[end]), tag))
        start = end
    return records


def block_stopping_times(
    config: BgrwConfig,
    radius: int,
    *,
    max_blocks: int | None = None,
    backend=None,
) -> list[BlockRecord]:
    """Simulate the config's trajectory and return its excursion blocks."""
    summary = simulate_summary(config, backend=backend)
    return blocks_from_series(summary.distance, radius, max_blocks=max_blocks)


@dataclass(frozen=True)
class MinorantStep:
    """Minorant walk value at one block, with its domination check."""

    index: int
    value: int
    scaled: int
    distance: int
    dominated: bool


def minorant_walk(blocks: list[BlockRecord], radius: int) -> list[MinorantStep]:
    """Unit-step walk under the block sequence, with domination flags.

    Starts at floor(d_0 / radius), moves +1 on an up block and -1 on any
    other. Each step's flag records distance >= radius * value; an up block
    adds exactly ``radius`` to the distance and 1 to the walk, every other
    block subtracts at most ``radius``, so the flags hold path-wise.
    """
    if int(radius) != radius or radius < 1:
        raise ValidationError("block radius must be an integer >= 1")
    if not blocks or blocks[0].tag != "start":
        raise ValidationError("blocks must begin with the index-0 start anchor")
    value = blocks[0].distance // radius
    out = [
        MinorantStep(
            0, value, radius * value, blocks[0].distance,
            blocks[0].distance >= radius * value,
        )
    ]
    for rec in blocks[1:]:
        value = value + 1 if rec.tag == "up" else value - 1
        out.append(
            MinorantStep(
                rec.index, value, radius * value, rec.distance,
                rec.distance >= radius * value,
            )
        )
    return out


def up_fraction(blocks: list[BlockRecord]) -> float:
    """Fraction of closed blocks tagged "up"."""
    tags = [b.tag for b in blocks if b.tag != "start"]
    if not tags:
        raise ValidationError("no closed blocks to summarize")
    return sum(1 for t in tags if t == "up") / len(tags)


# ---------------------------------------------------------------------------
# Runs of ones in coin flips

ENUMERATION_BUDGET = 24


def _exact_probability(prob) -> Fraction:
    if isinstance(prob, Fraction):
        x = prob
    elif isinstance(prob, (int, float)):
        x = Fraction(prob)
    else:
        raise ValidationError(f"probability must be a number, got {type(prob).__name__}")
    if not (0 <= x <= 1):
        raise ValidationError("probability must lie in [0, 1]")
    return x


def consecutive_ones_bound(prob, run_length: int, trials: int):
    """Lower bound for a run of ``run_length`` ones among ``trials`` flips.

    Partition the flips into floor(trials / run_length) disjoint blocks; a
    run certainly occurs if some block is all ones, giving
    1 - (1 - prob**run_length)**floor(trials/run_length). Computed in exact
    rationals; the return type follows the input (Fraction in, Fraction
    out).
    """
    x = _exact_probability(prob)
    if not (1 <= run_length <= trials):
        raise ValidationError("need 1 <= run_length <= trials")
    q = trials // run_length
    out = 1 - (1 - x**run_length) ** q
    return out if isinstance(prob, Fraction) else float(out)


def run_probability_exact(trials: int, run_length: int, prob):
    """Exact probability of a run of ones among independent flips.

    Dynamic program over the trailing-run length with an absorbing hit
    state, in exact rationals. ``trials`` is capped at ENUMERATION_BUDGET to
    keep this an oracle, not a production path.
    """
    if not (1 <= run_length <= trials):
        raise ValidationError("need 1 <= run_length <= trials")
    if trials > ENUMERATION_BUDGET:
        raise ResourceLimitError(
            f"exact run probability capped at {ENUMERATION_BUDGET} trials, got {trials}"
        )
    x = _exact_probability(prob)
    state = [Fraction(0)] * run_length
    state[0] = Fraction(1)
    hit = Fraction(0)
    for _ in range(trials):
        nxt = [Fraction(0)] * run_length
        nxt[0] = (1 - x) * sum(state)
        for tail in range(run_length - 1):
            nxt[tail + 1] = x * state[tail]
        hit += x * state[run_length - 1]
        state = nxt
    return hit if isinstance(prob, Fraction) else float(hit)
