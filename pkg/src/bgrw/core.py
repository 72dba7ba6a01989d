"""Growth-walk kernel: tree state, initial trees, one-step law, trajectories.

The process lives on a growing rooted tree. Each step, with probability p a
new leaf is attached at the walker's vertex, then the walker moves to a
neighbor chosen uniformly in the post-insertion tree. Vertex ids are dense:
0..n-1, new vertices appended. Every step consumes exactly two raw draws from
the stream (creation coin, neighbor index), see bgrw.rng.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvariantViolation, ResourceLimitError, ValidationError
from .rng import Rng

DEFAULT_VERTEX_CAP = 10_000_000

LAZY_NONE = 0
LAZY_HALFLINE = 1
LAZY_HARDTREE = 2

STOP_HORIZON = "horizon"
STOP_VERTEX_COUNT = "vertex-count"
STOP_DISTANCE = "distance"
STOP_TARGET_VERTEX = "target-vertex"


class TreeState:
    """Mutable rooted tree with a walker on it.

    ``pending[v]`` counts children of v that exist in an infinite initial
    tree but have not been materialized yet; they are materialized before the
    walker can interact with them, so the kernel always sees full neighbor
    lists. ``provider_index[v]`` is the half-line coordinate of v (or -1 for
    vertices that are not half-line backbone vertices).
    """

    __slots__ = (
        "adjacency",
        "depth",
        "root",
        "walker",
        "time",
        "creations",
        "pending",
        "provider_index",
        "lazy_kind",
        "growth",
        "max_vertices",
    )

    def __init__(
        self,
        adjacency: list[list[int]],
        depth: list[int],
        root: int,
        walker: int,
        *,
        pending: list[int] | None = None,
        provider_index: list[int] | None = None,
        lazy_kind: int = LAZY_NONE,
        growth: Callable[[int], int] | None = None,
        max_vertices: int = DEFAULT_VERTEX_CAP,
    ):
        n = len(adjacency)
        self.adjacency = adjacency
        self.depth = depth
        self.root = root
        self.walker = walker
        self.time = 0
        self.creations = 0
        self.pending = pending if pending is not None else [0] * n
        self.provider_index = (
            provider_index if provider_index is not None else [-1] * n
        )
        self.lazy_kind = lazy_kind
        self.growth = growth
        self.max_vertices = max_vertices
        if n > max_vertices:
            raise ResourceLimitError(
                f"initial tree has {n} vertices, cap is {max_vertices}"
            )

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        """Materialized degree; equals the full degree once v is expanded."""
        return len(self.adjacency[v])

    def full_degree(self, v: int) -> int:
        """Degree in the ambient (possibly infinite) tree."""
        return len(self.adjacency[v]) + self.pending[v]

    def _check_cap(self) -> None:
        if len(self.adjacency) >= self.max_vertices:
            raise ResourceLimitError(
                f"vertex cap {self.max_vertices} exceeded at time {self.time}"
            )

    def add_leaf(self, at: int) -> int:
        """Attach a fresh leaf at vertex ``at`` and return its id."""
        self._check_cap()
        new = len(self.adjacency)
        self.adjacency[at].append(new)
        self.adjacency.append([at])
        self.depth.append(self.depth[at] + 1)
        self.pending.append(0)
        self.provider_index.append(-1)
        self.creations += 1
        return new

    def _materialize_child(self, v: int) -> int:
        self._check_cap()
        new = len(self.adjacency)
        self.adjacency[v].append(new)
        self.adjacency.append([v])
        child_depth = self.depth[v] + 1
        self.depth.append(child_depth)
        if self.lazy_kind == LAZY_HALFLINE:
            self.pending.append(1)
            self.provider_index.append(self.provider_index[v] + 1)
        else:
            count = self.growth(child_depth)
            if count < 1:
                raise ValidationError(
                    f"growth descriptor must be >= 1, got {count} at depth {child_depth}"
                )
            self.pending.append(count)
            self.provider_index.append(-1)
        self.pending[v] -= 1
        return new

    def expand(self, v: int) -> None:
        """Materialize all pending provider children of v."""
        while self.pending[v] > 0:
            self._materialize_child(v)

    def ensure_radius(self, center: int, r: int) -> None:
        """Materialize every ambient vertex within distance r of center."""
        if self.lazy_kind == LAZY_NONE or r <= 0:
            return
        frontier = [center]
        seen = {center}
        for _ in range(r):
            nxt = []
            for v in frontier:
                self.expand(v)
                for w in self.adjacency[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt

    def parent_of(self, v: int) -> int | None:
        """Neighbor of v one step closer to the root (None for the root)."""
        if v == self.root:
            return None
        d = self.depth[v]
        for w in self.adjacency[v]:
            if self.depth[w] == d - 1:
                return w
        raise InvariantViolation(f"vertex {v} has no parent; depth data corrupt")

    def snapshot(self) -> "TreeSnapshot":
        n = len(self.adjacency)
        parent = np.full(n, -1, dtype=np.int64)
        for v in range(n):
            if v != self.root:
                d = self.depth[v]
                for w in self.adjacency[v]:
                    if self.depth[w] == d - 1:
                        parent[v] = w
                        break
        return TreeSnapshot(
            vertices=n,
            root=self.root,
            walker=self.walker,
            parent=parent,
            depth=np.asarray(self.depth, dtype=np.int64),
        )

    def validate(self) -> None:
        """Full BFS audit: connectivity, edge count, depth consistency."""
        n = len(self.adjacency)
        if not (0 <= self.root < n and 0 <= self.walker < n):
            raise InvariantViolation("root or walker out of range")
        edge_ends = sum(len(nbrs) for nbrs in self.adjacency)
        if edge_ends != 2 * (n - 1):
            raise InvariantViolation("edge count does not match a tree")
        seen = [False] * n
        seen[self.root] = True
        if self.depth[self.root] != 0:
            raise InvariantViolation("root depth is not 0")
        queue = [self.root]
        reached = 1
        while queue:
            nxt = []
            for v in queue:
                for w in self.adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        reached += 1
                        if self.depth[w] != self.depth[v] + 1:
                            raise InvariantViolation(
                                f"depth of {w} inconsistent with BFS"
                            )
                        nxt.append(w)
            queue = nxt
        if reached != n:
            raise InvariantViolation("tree is not connected")


@dataclass(frozen=True)
class TreeSnapshot:
    """Immutable record of a final tree: parent pointers plus marks."""

    vertices: int
    root: int
    walker: int
    parent: np.ndarray
    depth: np.ndarray

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.vertices):
            q = int(self.parent[v])
            if q >= 0:
                out.append((min(v, q), max(v, q)))
        out.sort()
        return out

    def height(self) -> int:
        return int(self.depth.max()) if self.vertices else 0

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertices)]
        for v in range(self.vertices):
            q = int(self.parent[v])
            if q >= 0:
                adj[q].append(v)
                adj[v].append(q)
        return adj


# ---------------------------------------------------------------------------
# Initial trees


@dataclass(frozen=True)
class InitialTree:
    """Declarative initial-condition spec, JSON-serializable for configs."""

    kind: str
    length: int | None = None
    arms: int | None = None
    growth_offset: int | None = None
    growth_power: int | None = None
    growth_fn: Callable[[int], int] | None = None

    @staticmethod
    def single() -> "InitialTree":
        return InitialTree("single")

    @staticmethod
    def path(length: int) -> "InitialTree":
        return InitialTree("path", length=length)

    @staticmethod
    def star(arms: int) -> "InitialTree":
        return InitialTree("star", arms=arms)

    @staticmethod
    def halfline() -> "InitialTree":
        return InitialTree("halfline")

    @staticmethod
    def hardtree(growth=(2, 2)) -> "InitialTree":
        if callable(growth):
            return InitialTree("hardtree", growth_fn=growth)
        offset, power = growth
        return InitialTree("hardtree", growth_offset=offset, growth_power=power)

    def to_json(self) -> dict:
        if self.kind == "path":
            return {"kind": "path", "length": self.length}
        if self.kind == "star":
            return {"kind": "star", "arms": self.arms}
        if self.kind == "hardtree":
            if self.growth_fn is not None:
                raise ValidationError(
                    "hardtree with a callable growth descriptor is not serializable"
                )
            return {
                "kind": "hardtree",
                "offset": self.growth_offset,
                "power": self.growth_power,
            }
        return {"kind": self.kind}

    @staticmethod
    def from_json(obj) -> "InitialTree":
        """Inverse of to_json; accepts only the serializable kinds."""
        if not isinstance(obj, dict):
            raise ValidationError("initial tree spec must be a JSON object")
        kind = obj.get("kind")
        allowed = {
            "single": set(),
            "halfline": set(),
            "path": {"length"},
            "star": {"arms"},
            "hardtree": {"offset", "power"},
        }
        if kind not in allowed:
            raise ValidationError(f"unknown initial tree kind {kind!r}")
        extra = sorted(set(obj) - {"kind"} - allowed[kind])
        if extra:
            raise ValidationError(f"unexpected initial tree fields: {extra}")

        def _count(name: str, low: int) -> int:
            v = obj.get(name)
            if isinstance(v, bool) or not isinstance(v, int) or v < low:
                raise ValidationError(f"{kind} {name} must be an integer >= {low}")
            return v

        if kind == "single":
            return InitialTree.single()
        if kind == "halfline":
            return InitialTree.halfline()
        if kind == "path":
            return InitialTree.path(_count("length", 1))
        if kind == "star":
            return InitialTree.star(_count("arms", 1))
        if "offset" not in obj or "power" not in obj:
            raise ValidationError("hardtree needs offset and power")
        return InitialTree.hardtree((_count("offset", 1), _count("power", 0)))

    def growth_callable(self) -> Callable[[int], int]:
        if self.growth_fn is not None:
            return self.growth_fn
        off, pw = self.growth_offset, self.growth_power
        return lambda h: (h + off) ** pw


def make_initial_tree(spec: InitialTree | str | tuple) -> "TreeProvider":
    """Resolve an initial-condition spec to a provider.

    Accepts an InitialTree, a bare kind string ("single", "halfline"), or a
    (kind, parameter) tuple such as ("path", 5).
    """
    if isinstance(spec, str):
        spec = InitialTree(spec)
    elif isinstance(spec, tuple):
        kind, param = spec
        if kind == "path":
            spec = InitialTree.path(param)
        elif kind == "star":
            spec = InitialTree.star(param)
        elif kind == "hardtree":
            spec = InitialTree.hardtree(param)
        else:
            raise ValidationError(f"unknown initial tree kind {kind!r}")
    kind = spec.kind
    if kind == "single":
        return FiniteTreeProvider([], root=0, walker=0)
    if kind == "path":
        length = spec.length
        if not isinstance(length, int) or length < 1:
            raise ValidationError("path length must be an integer >= 1")
        edges = [(i, i + 1) for i in range(length)]
        return FiniteTreeProvider(edges, root=0, walker=length)
    if kind == "star":
        arms = spec.arms
        if not isinstance(arms, int) or arms < 1:
            raise ValidationError("star arm count must be an integer >= 1")
        edges = [(0, i) for i in range(1, arms + 1)]
        return FiniteTreeProvider(edges, root=0, walker=0)
    if kind == "halfline":
        return HalflineProvider()
    if kind == "hardtree":
        return HardTreeProvider(spec.growth_callable())
    raise ValidationError(f"unknown initial tree kind {kind!r}")


class TreeProvider:
    """Read-only view of an initial tree plus a state factory.

    ``neighbors(v)`` answers in the provider's own coordinates and returns
    the same list on repeated queries. ``build_state`` produces the mutable
    run state (run-local ids for lazy providers).
    """

    root: int = 0
    walker: int = 0
    lazy_kind: int = LAZY_NONE

    def neighbors(self, v: int) -> list[int]:
        raise NotImplementedError

    def build_state(self, max_vertices: int = DEFAULT_VERTEX_CAP) -> TreeState:
        raise NotImplementedError

    def backend_init(self) -> tuple:
        """Primitive description consumed by the kernel lanes."""
        raise NotImplementedError


class FiniteTreeProvider(TreeProvider):
    def __init__(self, edges: list[tuple[int, int]], root: int, walker: int):
        n = 1 + len(edges)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError("edge endpoint out of range")
            adj[u].append(v)
            adj[v].append(u)
        self._adjacency = adj
        self._edges = list(edges)
        self.root = root
        self.walker = walker
        # depth doubles as the connectivity/acyclicity check
        depth = [-1] * n
        depth[root] = 0
        queue = [root]
        seen = 1
        while queue:
            nxt = []
            for x in queue:
                for y in adj[x]:
                    if depth[y] < 0:
                        depth[y] = depth[x] + 1
                        seen += 1
                        nxt.append(y)
            queue = nxt
        if seen != n:
            raise ValidationError("initial edges do not form a tree")
        self._depth = depth

    def neighbors(self, v: int) -> list[int]:
        return list(self._adjacency[v])

    def build_state(self, max_vertices: int = DEFAULT_VERTEX_CAP) -> TreeState:
        return TreeState(
            [list(nbrs) for nbrs in self._adjacency],
            list(self._depth),
            self.root,
            self.walker,
            max_vertices=max_vertices,
        )

    def backend_init(self) -> tuple:
        flat: list[int] = []
        for u, v in self._edges:
            flat.append(u)
            flat.append(v)
        return ("finite", len(self._adjacency), flat, self.root, self.walker)


class HalflineProvider(TreeProvider):
    """One-ended infinite path v_0, v_1, ...; walker starts at v_0."""

    lazy_kind = LAZY_HALFLINE

    def neighbors(self, v: int) -> list[int]:
        if v < 0:
            raise ValidationError("half-line vertices are indexed from 0")
        return [1] if v == 0 else [v - 1, v + 1]

    def build_state(self, max_vertices: int = DEFAULT_VERTEX_CAP) -> TreeState:
        return TreeState(
            [[1], [0]],
            [0, 1],
            root=0,
            walker=0,
            pending=[0, 1],
            provider_index=[0, 1],
            lazy_kind=LAZY_HALFLINE,
            max_vertices=max_vertices,
        )

    def backend_init(self) -> tuple:
        return ("halfline",)


class HardTreeProvider(TreeProvider):
    """Rooted tree where every vertex at depth h has growth(h) children."""

    lazy_kind = LAZY_HARDTREE

    def __init__(self, growth: Callable[[int], int]):
        self.growth = growth
        self._level_start = [0, 1]  # id of the first vertex at each depth
        self._level_width = [1]
        if growth(0) < 1:
            raise ValidationError("growth descriptor must be >= 1 at depth 0")

    def _extend_levels(self, depth: int) -> None:
        while len(self._level_width) <= depth:
            h = len(self._level_width) - 1
            g = self.growth(h)
            if g < 1:
                raise ValidationError(
                    f"growth descriptor must be >= 1, got {g} at depth {h}"
                )
            self._level_width.append(self._level_width[-1] * g)
            self._level_start.append(self._level_start[-1] + self._level_width[-1])

    def _depth_of(self, v: int) -> int:
        self._extend_levels(1)
        while self._level_start[-1] <= v:
            self._extend_levels(len(self._level_width))
        lo = 0
        while self._level_start[lo + 1] <= v:
            lo += 1
        return lo

    def neighbors(self, v: int) -> list[int]:
        if v < 0:
            raise ValidationError("vertex ids are nonnegative")
        h = self._depth_of(v)
        offset = v - self._level_start[h]
        g = self.growth(h)
        self._extend_levels(h + 1)
        first_child = self._level_start[h + 1] + offset * g
        children = list(range(first_child, first_child + g))
        if v == 0:
            return children
        gp = self.growth(h - 1)
        parent = self._level_start[h - 1] + offset // gp
        return [parent] + children

    def build_state(self, max_vertices: int = DEFAULT_VERTEX_CAP) -> TreeState:
        state = TreeState(
            [[]],
            [0],
            root=0,
            walker=0,
            pending=[self.growth(0)],
            provider_index=[-1],
            lazy_kind=LAZY_HARDTREE,
            growth=self.growth,
            max_vertices=max_vertices,
        )
        state.expand(0)
        return state

    def backend_init(self, depth_bound: int | None = None) -> tuple:
        if depth_bound is None:
            raise ValidationError("hardtree backend init needs a depth bound")
        table = []
        for h in range(depth_bound + 1):
            g = self.growth(h)
            if g < 1:
                raise ValidationError(
                    f"growth descriptor must be >= 1, got {g} at depth {h}"
                )
            table.append(g)
        return ("hardtree", table)


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class BgrwConfig:
    """Everything one trajectory needs: law, budget, seed, start."""

    p: float
    horizon: int
    seed: int
    initial: InitialTree = field(default_factory=InitialTree.single)
    max_vertices: int = DEFAULT_VERTEX_CAP
    stop_at_count: int | None = None
    stop_at_distance: int | None = None

    def __post_init__(self):
        if not isinstance(self.horizon, int) or self.horizon < 0:
            raise ValidationError("horizon must be a nonnegative integer")
        if not (0.0 < float(self.p) <= 1.0):
            raise ValidationError("p must lie in (0, 1]; p = 0 is rejected")
        if not isinstance(self.seed, int):
            raise ValidationError("seed must be an integer")
        if self.max_vertices < 1:
            raise ValidationError("max_vertices must be positive")
        if self.stop_at_count is not None and self.stop_at_count < 1:
            raise ValidationError("stop_at_count must be positive")
        if self.stop_at_distance is not None and self.stop_at_distance < 1:
            raise ValidationError("stop_at_distance must be positive")

    def provider(self) -> TreeProvider:
        return make_initial_tree(self.initial)


# ---------------------------------------------------------------------------
# Kernel


@dataclass(frozen=True)
class StepOutcome:
    """One atom of the one-step law: did a leaf appear, where did we move.

    ``target`` is the walker's next vertex; for the created-and-followed atom
    it equals the id the new leaf would receive (current vertex count).
    """

    created: bool
    target: int


def one_step_distribution(state: TreeState, p) -> list[tuple[StepOutcome, Fraction]]:
    """Exact one-step law at the current state, probabilities as Fractions.

    Accepts p in [0, 1]. Atoms with probability zero are omitted. Convention
    corner: a neighbor-less walker with no creation stays put.
    """
    pf = p if isinstance(p, Fraction) else Fraction(p)
    if not 0 <= pf <= 1:
        raise ValidationError("p must lie in [0, 1]")
    state.expand(state.walker)
    w = state.walker
    nbrs = state.adjacency[w]
    d = len(nbrs)
    n = state.vertex_count
    out: list[tuple[StepOutcome, Fraction]] = []
    if pf > 0:
        share = pf / (d + 1)
        for v in nbrs:
            out.append((StepOutcome(True, v), share))
        out.append((StepOutcome(True, n), share))
    if pf < 1:
        if d == 0:
            out.append((StepOutcome(False, w), 1 - pf))
        else:
            share = (1 - pf) / d
            for v in nbrs:
                out.append((StepOutcome(False, v), share))
    return out


def bgrw_step(state: TreeState, p: float, rng: Rng) -> TreeState:
    """Advance the walk one step in place; returns the same state object."""
    w = state.walker
    if state.pending[w]:
        state.expand(w)
    if rng.uniform() < p:
        state.add_leaf(w)
    u = rng.next_u64()
    nbrs = state.adjacency[w]
    d = len(nbrs)
    if d:
        v = nbrs[u % d]
        state.walker = v
        if state.pending[v]:
            state.expand(v)
    state.time += 1
    return state


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class TrajectorySummary:
    """Per-run record consumed by the statistics layer.

    ``distance`` is distance to the root (the distinguished anchor of the
    initial tree), one entry per recorded time 0..steps. First-passage
    features derive from it (see bgrw.stats.distance_milestone); corridor
    first-passage times appear in ``first_tip_time`` when requested.
    """

    p: float
    horizon: int
    seed: int
    steps: int
    stopped: str
    distance: np.ndarray
    walker_degree: np.ndarray
    vertex_count: np.ndarray
    creations: int
    visits: dict[int, int]
    first_tip_time: dict[int, int | None]
    measure_radius: int | None
    measure_counts: dict[bytes, int] | None
    final_tree: TreeSnapshot | None


def run_trajectory(
    config: BgrwConfig,
    observers: Sequence[Callable[[TreeState], None]] = (),
    *,
    audit_every: int = 0,
    record_tree: bool = True,
) -> TrajectorySummary:
    """Reference trajectory runner: pure Python, observer-friendly.

    Observers are called once per recorded time, including time 0. Identical
    configs produce identical summaries; see simulate_summary for the fast
    lane with the same contract.
    """
    provider = config.provider()
    state = provider.build_state(config.max_vertices)
    rng = Rng(config.seed)
    horizon = config.horizon
    dist = np.zeros(horizon + 1, dtype=np.int64)
    deg = np.zeros(horizon + 1, dtype=np.int64)
    vcount = np.zeros(horizon + 1, dtype=np.int64)

    def record(t: int) -> None:
        dist[t] = state.depth[state.walker]
        deg[t] = state.degree(state.walker)
        vcount[t] = state.vertex_count

    record(0)
    for obs in observers:
        obs(state)
    stopped = STOP_HORIZON
    steps = 0
    target_count = config.stop_at_count
    target_distance = config.stop_at_distance
    if target_count is not None and state.vertex_count >= target_count:
        if state.vertex_count > target_count:
            raise ValidationError("initial tree already exceeds the target count")
        stopped = STOP_VERTEX_COUNT
    else:
        for t in range(1, horizon + 1):
            bgrw_step(state, config.p, rng)
            record(t)
            for obs in observers:
                obs(state)
            if audit_every and t % audit_every == 0:
                state.validate()
            steps = t
            if target_count is not None and state.vertex_count >= target_count:
                stopped = STOP_VERTEX_COUNT
                break
            if target_distance is not None and dist[t] >= target_distance:
                stopped = STOP_DISTANCE
                break
    return TrajectorySummary(
        p=config.p,
        horizon=horizon,
        seed=config.seed,
        steps=steps,
        stopped=stopped,
        distance=dist[: steps + 1].copy(),
        walker_degree=deg[: steps + 1].copy(),
        vertex_count=vcount[: steps + 1].copy(),
        creations=state.creations,
        visits={},
        first_tip_time={},
        measure_radius=None,
        measure_counts=None,
        final_tree=state.snapshot() if record_tree else None,
    )


def simulate_summary(
    config: BgrwConfig,
    *,
    stride: int = 1,
    measure_radius: int | None = None,
    marked: Iterable[int] = (),
    corridor_lengths: Iterable[int] = (),
    stop_at_vertex: int | None = None,
    record_series: bool = True,
    record_tree: bool = False,
    backend=None,
) -> TrajectorySummary:
    """Fast trajectory runner backed by the selected kernel lane.

    Produces the same distance/degree/count series as run_trajectory for the
    same config, plus optional in-loop features: empirical-measure
    accumulation at a given ball radius (every ``stride`` steps), visit
    counters for marked initial vertices, corridor first-passage detection
    for each length in ``corridor_lengths``, and early stop when the walker
    reaches a half-line coordinate.
    """
    if backend is None:
        from . import _backend as backend
    provider = config.provider()
    radius = -1 if measure_radius is None else int(measure_radius)
    if radius >= 0 and stride < 1:
        raise ValidationError("stride must be >= 1")
    if isinstance(provider, HardTreeProvider):
        depth_bound = config.horizon + (radius if radius > 0 else 0) + 2
        init = provider.backend_init(depth_bound)
    else:
        init = provider.backend_init()
    if stop_at_vertex is not None and not isinstance(provider, HalflineProvider):
        raise ValidationError("stop_at_vertex only applies to half-line starts")
    res = backend.run_summary(
        init,
        float(config.p),
        config.horizon,
        config.seed,
        stride=stride,
        measure_radius=radius,
        marked=tuple(marked),
        corridor_lengths=tuple(corridor_lengths),
        stop_at_count=-1 if config.stop_at_count is None else config.stop_at_count,
        stop_at_distance=(
            -1 if config.stop_at_distance is None else config.stop_at_distance
        ),
        stop_at_vertex=-1 if stop_at_vertex is None else stop_at_vertex,
        max_vertices=config.max_vertices,
        record_series=record_series,
        record_tree=record_tree,
    )
    hits = {}
    for length, t in zip(corridor_lengths, res["corridor_hit"]):
        hits[int(length)] = None if t < 0 else int(t)
    snap = None
    if record_tree:
        snap = TreeSnapshot(
            vertices=res["n_final"],
            root=res["root"],
            walker=res["walker"],
            parent=res["parent"],
            depth=res["depth"],
        )
    return TrajectorySummary(
        p=float(config.p),
        horizon=config.horizon,
        seed=config.seed,
        steps=res["steps"],
        stopped=res["stopped"],
        distance=res["dist"],
        walker_degree=res["deg"],
        vertex_count=res["vcount"],
        creations=res["creations"],
        visits={int(v): int(c) for v, c in zip(marked, res["visits"])},
        first_tip_time=hits,
        measure_radius=None if radius < 0 else radius,
        measure_counts=res["measure"] if radius >= 0 else None,
        final_tree=snap,
    )
