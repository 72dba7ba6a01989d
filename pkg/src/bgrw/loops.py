"""Loop-decorated segment process: the walk's projection onto a path.

The state is a path 0..length with a count of loops at each vertex, at least
one loop at vertex ``length``. Each step, with probability p a loop is added
at the walker's vertex; then one attached edge of the walker's vertex is
chosen uniformly in the updated state. Path edges move the walker, loops
keep it in place, and the loop just added can itself be chosen. Loops are
counted once. Edge indexing is normative for reproducibility: path edge to
the left (when it exists), then path edge to the right (when it exists),
then the loops.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimitError, ValidationError
from .rng import Rng


@dataclass
class BackboneState:
    """Path 0..length with loop counts; walker on a path vertex."""

    length: int
    loops: list[int]
    walker: int
    time: int = 0

    def validate(self) -> None:
        if self.length < 1:
            raise ValidationError("segment length must be >= 1")
        if len(self.loops) != self.length + 1:
            raise ValidationError("loop table must have length + 1 entries")
        if any(c < 0 for c in self.loops):
            raise ValidationError("loop counts must be nonnegative")
        if self.loops[self.length] < 1:
            raise ValidationError("vertex `length` must carry at least one loop")
        if not (0 <= self.walker <= self.length):
            raise ValidationError("walker must sit on the path")

    def attached_edges(self, v: int) -> int:
        """Edges available at v: path edges plus loops, loops counted once."""
        path_edges = (1 if v > 0 else 0) + (1 if v < self.length else 0)
        return path_edges + self.loops[v]


def minimal_backbone(length: int) -> BackboneState:
    """Bare path with the single mandatory loop at the far end, walker there."""
    if length < 1:
        raise ValidationError("segment length must be >= 1")
    loops = [0] * length + [1]
    state = BackboneState(length=length, loops=loops, walker=length)
    state.validate()
    return state


def backbone_transform(tree, walker: int, ancestor: int) -> BackboneState:
    """Project a tree onto the walker-to-ancestor path.

    Vertices at distance >= 2 from the path are discarded; every edge from a
    path vertex to an off-path neighbor becomes one loop. Path vertices are
    labeled by distance from the ancestor, so the ancestor maps to 0 and the
    walker to the path length. The walker must carry at least one off-path
    edge (degree >= 2) so the projected state has its mandatory loop.
    """
    n = len(tree.adjacency)
    if not (0 <= walker < n and 0 <= ancestor < n):
        raise ValidationError("walker or ancestor not in the tree")
    if walker == ancestor:
        raise ValidationError("walker and ancestor must differ")
    # walk from the walker toward the root until the ancestor is hit
    path = [walker]
    v = walker
    while v != ancestor:
        q = tree.parent_of(v)
        if q is None:
            raise ValidationError("given vertex is not an ancestor of the walker")
        path.append(q)
        v = q
    path.reverse()  # ancestor first
    length = len(path) - 1
    on_path = set(path)
    loops = []
    for i, u in enumerate(path):
        interior_edges = (1 if i > 0 else 0) + (1 if i < length else 0)
        loops.append(len(tree.adjacency[u]) - interior_edges)
    if loops[length] < 1:
        raise ValidationError(
            "walker needs degree >= 2 so the projection keeps its mandatory loop"
        )
    state = BackboneState(length=length, loops=loops, walker=length)
    state.validate()
    return state


def loop_step(state: BackboneState, p: float, rng: Rng) -> BackboneState:
    """Advance the segment process one step in place."""
    w = state.walker
    if rng.uniform() < p:
        state.loops[w] += 1
    attached = state.attached_edges(w)
    idx = rng.next_u64() % attached
    path_edges = (1 if w > 0 else 0) + (1 if w < state.length else 0)
    if idx < path_edges:
        if w > 0 and idx == 0:
            state.walker = w - 1
        else:
            state.walker = w + 1
    state.time += 1
    return state


def loop_hitting_time(
    length: int, p: float, horizon: int, seed: int, *, backend=None
) -> int | None:
    """First time >= 1 the segment walker reaches vertex 0, from a minimal
    start at the far end; None when censored at the horizon."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    # p = 0 is legitimate here: the segment process degenerates to a delayed
    # reflecting walk, a useful analytic baseline
    if not (0.0 <= p <= 1.0):
        raise ValidationError("p must lie in [0, 1]")
    if backend is None:
        from . import _backend as backend
    state = minimal_backbone(length)
    t = backend.run_loop(state.loops, state.walker, float(p), horizon, seed)
    return None if t < 0 else int(t)


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo fraction with its one-sigma binomial radius."""

    fraction: float
    radius: float
    trials: int
    threshold: int


def loop_tail_estimate(
    length: int,
    p: float,
    trials: int,
    master_seed: int,
    *,
    step_budget: int = 1_000_000,
    backend=None,
) -> TailEstimate:
    """Estimate the chance the segment walker reaches 0 within exp(sqrt(length)).

    Runs ``trials`` independent minimal-start simulations capped at
    ceil(exp(sqrt(length))) steps each and reports the hit fraction with a
    one-sigma binomial radius.
    """
    import math

    from .rng import derive_stream

    if trials < 1:
        raise ValidationError("trials must be >= 1")
    cap = math.ceil(math.exp(math.sqrt(length)))
    if cap > step_budget:
        raise ResourceLimitError(
            f"threshold {cap} exceeds the step budget {step_budget}"
        )
    if backend is None:
        from . import _backend as backend
    hits = 0
    loops0 = [0] * length + [1]
    for i in range(trials):
        t = backend.run_loop(loops0, length, float(p), cap, derive_stream(master_seed, i))
        if t >= 0:
            hits += 1
    frac = hits / trials
    radius = math.sqrt(frac * (1.0 - frac) / trials)
    return TailEstimate(fraction=frac, radius=radius, trials=trials, threshold=cap)
