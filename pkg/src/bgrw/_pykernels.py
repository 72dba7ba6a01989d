"""Pure-Python kernel lane.

Implements the same entry points as the compiled lane (bgrw._ckernels) on
top of the reference TreeState/bgrw_step machinery, consuming the random
stream identically, so both lanes produce bit-identical results. This lane
is the fallback when the extension is not built and the readable definition
of what the compiled lane must do.
"""
from __future__ import annotations

import numpy as np

from .core import (
    DEFAULT_VERTEX_CAP,
    LAZY_HALFLINE,
    LAZY_HARDTREE,
    STOP_DISTANCE,
    STOP_HORIZON,
    STOP_TARGET_VERTEX,
    STOP_VERTEX_COUNT,
    TreeState,
    bgrw_step,
)
from .errors import ResourceLimitError, ValidationError
from .rng import Rng, aux_seed
from .topology import canonical_encode, extract_ball

BACKEND_NAME = "python"


def _build_state(init: tuple, max_vertices: int) -> TreeState:
    kind = init[0]
    if kind == "finite":
        _, n0, flat, root, walker = init
        adj: list[list[int]] = [[] for _ in range(n0)]
        for i in range(0, len(flat), 2):
            u, v = flat[i], flat[i + 1]
            adj[u].append(v)
            adj[v].append(u)
        depth = [-1] * n0
        depth[root] = 0
        queue = [root]
        while queue:
            nxt = []
            for x in queue:
                for y in adj[x]:
                    if depth[y] < 0:
                        depth[y] = depth[x] + 1
                        nxt.append(y)
            queue = nxt
        return TreeState(adj, depth, root, walker, max_vertices=max_vertices)
    if kind == "halfline":
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
    if kind == "hardtree":
        table = init[1]

        def growth(h: int, _table=table) -> int:
            if h >= len(_table):
                raise ResourceLimitError(
                    "hardtree growth table exhausted; depth bound too small"
                )
            return _table[h]

        state = TreeState(
            [[]],
            [0],
            root=0,
            walker=0,
            pending=[table[0]],
            provider_index=[-1],
            lazy_kind=LAZY_HARDTREE,
            growth=growth,
            max_vertices=max_vertices,
        )
        state.expand(0)
        return state
    raise ValidationError(f"unknown backend init kind {kind!r}")


def _corridor_length(state: TreeState, maxlen: int) -> int:
    """Length of the clean corridor behind a degree-1 walker.

    Returns the largest L <= maxlen such that the walker, its neighbor, and
    so on through L edges pass only through ambient-degree-2 vertices
    (endpoints excluded). The radius-L ball around the walker is then a bare
    path with the walker at its tip.
    """
    w = state.walker
    prev = w
    cur = state.adjacency[w][0]
    length = 1
    while length < maxlen:
        state.expand(cur)
        nbrs = state.adjacency[cur]
        if len(nbrs) != 2:
            break
        nxt = nbrs[1] if nbrs[0] == prev else nbrs[0]
        prev, cur = cur, nxt
        length += 1
    return length


def _corridor_vertex(state: TreeState, hops: int) -> int:
    """Vertex ``hops`` edges up the corridor from a degree-1 walker."""
    cur = state.walker
    prev = -1
    for _ in range(hops):
        state.expand(cur)
        nbrs = state.adjacency[cur]
        nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
        prev, cur = cur, nxt
    return cur


def run_summary(
    init: tuple,
    p: float,
    horizon: int,
    seed: int,
    *,
    stride: int = 1,
    measure_radius: int = -1,
    marked: tuple = (),
    corridor_lengths: tuple = (),
    stop_at_count: int = -1,
    stop_at_distance: int = -1,
    stop_at_vertex: int = -1,
    max_vertices: int = DEFAULT_VERTEX_CAP,
    record_series: bool = True,
    record_tree: bool = False,
) -> dict:
    state = _build_state(init, max_vertices)
    rng = Rng(seed)
    dist = np.zeros(horizon + 1, dtype=np.int64) if record_series else None
    deg = np.zeros(horizon + 1, dtype=np.int64) if record_series else None
    vcount = np.zeros(horizon + 1, dtype=np.int64) if record_series else None
    visits = [0] * len(marked)
    mark_pos = {int(v): i for i, v in enumerate(marked)}
    measure: dict[bytes, int] | None = {} if measure_radius >= 0 else None
    corridor_hit = {int(length): -1 for length in corridor_lengths}
    unresolved = sorted(corridor_hit)

    def observe(t: int) -> None:
        w = state.walker
        if record_series:
            dist[t] = state.depth[w]
            deg[t] = len(state.adjacency[w])
            vcount[t] = state.vertex_count
        i = mark_pos.get(w)
        if i is not None:
            visits[i] += 1
        if measure is not None and t % stride == 0:
            code = canonical_encode(extract_ball(state, w, measure_radius))
            measure[code] = measure.get(code, 0) + 1
        if unresolved and state.full_degree(w) == 1:
            reach = _corridor_length(state, unresolved[-1])
            while unresolved and unresolved[0] <= reach:
                corridor_hit[unresolved.pop(0)] = t

    observe(0)
    stopped = STOP_HORIZON
    steps = 0
    if stop_at_count >= 0 and state.vertex_count >= stop_at_count:
        if state.vertex_count > stop_at_count:
            raise ValidationError("initial tree already exceeds the target count")
        stopped = STOP_VERTEX_COUNT
    else:
        for t in range(1, horizon + 1):
            bgrw_step(state, p, rng)
            observe(t)
            steps = t
            if stop_at_count >= 0 and state.vertex_count >= stop_at_count:
                stopped = STOP_VERTEX_COUNT
                break
            if stop_at_distance >= 0 and state.depth[state.walker] >= stop_at_distance:
                stopped = STOP_DISTANCE
                break
            if stop_at_vertex >= 0 and state.provider_index[state.walker] == stop_at_vertex:
                stopped = STOP_TARGET_VERTEX
                break
    out = {
        "steps": steps,
        "stopped": stopped,
        "dist": dist[: steps + 1].copy() if record_series else None,
        "deg": deg[: steps + 1].copy() if record_series else None,
        "vcount": vcount[: steps + 1].copy() if record_series else None,
        "creations": state.creations,
        "visits": np.asarray(visits, dtype=np.int64),
        "corridor_hit": np.asarray(
            [corridor_hit[int(length)] for length in corridor_lengths], dtype=np.int64
        ),
        "measure": measure,
        "n_final": state.vertex_count,
        "root": state.root,
        "walker": state.walker,
    }
    if record_tree:
        snap = state.snapshot()
        out["parent"] = snap.parent
        out["depth"] = snap.depth
    return out


def run_loop(loops: list, walker: int, p: float, horizon: int, seed: int) -> int:
    """Segment process from the given state; first time >= 1 at vertex 0.

    Returns -1 when censored at the horizon. The input loop table is not
    mutated.
    """
    from .loops import BackboneState, loop_step

    state = BackboneState(length=len(loops) - 1, loops=list(loops), walker=walker)
    rng = Rng(seed)
    for t in range(1, horizon + 1):
        loop_step(state, p, rng)
        if state.walker == 0:
            return t
    return -1


def run_coupled(
    path_len: int,
    p: float,
    horizon: int,
    seed: int,
    record_alignment: bool = False,
) -> dict:
    """Coupled pair: growth walk on a path-plus-loop start, segment shadow.

    The tree starts as the labeled path 0..path_len plus one extra leaf at the
    walker's end (so the projection carries its mandatory loop). The segment
    process is replayed from the walk's path-visit steps: the creation coin
    at an on-path step adds a loop, a move to a path neighbor moves the
    shadow, any other move leaves it in place. If the walk stops visiting
    the path before the shadow reaches 0, the shadow continues on its own
    auxiliary stream; its clock is censored at ``horizon`` total steps.
    """
    adj: list[list[int]] = [[] for _ in range(path_len + 2)]
    for i in range(path_len):
        adj[i].append(i + 1)
        adj[i + 1].append(i)
    adj[path_len].append(path_len + 1)
    adj[path_len + 1].append(path_len)
    depth = list(range(path_len + 1)) + [path_len + 1]
    state = TreeState(adj, depth, root=0, walker=path_len)
    rng = Rng(seed)
    loops = [0] * path_len + [1]
    loop_pos = path_len
    k = 0  # segment clock: one tick per path-visit step of the walk
    walk_hit = -1
    seg_hit = -1
    align_label = [path_len] if record_alignment else None
    align_loop = [loop_pos] if record_alignment else None
    steps = 0
    for t in range(1, horizon + 1):
        w = state.walker
        on_path = w <= path_len
        before = state.vertex_count
        bgrw_step(state, p, rng)
        steps = t
        v = state.walker
        if on_path:
            k += 1
            if state.vertex_count > before:
                loops[w] += 1
            if v <= path_len:
                loop_pos = v
            if loop_pos == 0 and seg_hit < 0:
                seg_hit = k
        if record_alignment:
            align_label.append(v if v <= path_len else -1)
            align_loop.append(loop_pos)
        if v == 0:
            walk_hit = t
            break
    coupled_ticks = k
    if seg_hit < 0:
        aux = Rng(aux_seed(seed))
        from .loops import BackboneState, loop_step

        seg = BackboneState(length=path_len, loops=loops, walker=loop_pos)
        while k < horizon:
            k += 1
            loop_step(seg, p, aux)
            if seg.walker == 0:
                seg_hit = k
                break
    out = {
        "walk_hit": walk_hit,
        "seg_hit": seg_hit,
        "steps": steps,
        "coupled_ticks": coupled_ticks,
        "loop_ticks": k,
    }
    if record_alignment:
        out["align_label"] = np.asarray(align_label, dtype=np.int64)
        out["align_loop"] = np.asarray(align_loop, dtype=np.int64)
    return out


def run_corridor_watch(
    init: tuple,
    length: int,
    offset: int,
    p: float,
    horizon: int,
    seed: int,
    max_vertices: int = DEFAULT_VERTEX_CAP,
) -> dict:
    """Run until the corridor event, then watch one marked vertex.

    At the first time the radius-``length`` ball around the walker is a bare
    path with the walker at its tip, the corridor vertex ``offset`` edges from
    its far end is marked; the run then reports whether the walker returns to
    it before the horizon. hit = -1 means the corridor event was censored.
    """
    if not (0 <= offset <= length):
        raise ValidationError("need 0 <= offset <= length")
    state = _build_state(init, max_vertices)
    rng = Rng(seed)
    hit_t = -1
    marked = -1
    revisited = -1
    t = 0
    while t <= horizon:
        w = state.walker
        if hit_t < 0:
            if state.full_degree(w) == 1 and _corridor_length(state, length) >= length:
                hit_t = t
                marked = _corridor_vertex(state, length - offset)
                revisited = 1 if w == marked else 0
                if revisited:
                    break
        else:
            if w == marked:
                revisited = 1
                break
        if t == horizon:
            break
        bgrw_step(state, p, rng)
        t += 1
    return {"hit": hit_t, "revisited": revisited, "steps": t}


def sample_step_outcomes(d: int, p: float, n: int, seed: int) -> np.ndarray:
    """Empirical counts of the one-step outcome atoms at a degree-d state.

    Outcome ids follow the ordering of one_step_distribution: with a creation,
    index of the chosen neighbor among d old neighbors then the new leaf
    (d+1 atoms); without, d+1 + index among the d old neighbors. A degree-0
    state has two atoms: create-and-follow, stay.
    """
    rng = Rng(seed)
    counts = np.zeros(2 if d == 0 else 2 * d + 1, dtype=np.int64)
    for _ in range(n):
        created = rng.uniform() < p
        u = rng.next_u64()
        if d == 0:
            counts[0 if created else 1] += 1
        elif created:
            counts[u % (d + 1)] += 1
        else:
            counts[d + 1 + (u % d)] += 1
    return counts
