# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernel lane.

Mirrors bgrw._pykernels exactly: same entry points, same random-stream
consumption, bit-identical outputs. See that module for the readable
definition of the semantics; only representation differs here (C++ vectors,
uint64 arithmetic).
"""

import numpy as np

from cython.operator cimport dereference as deref, preincrement as inc
from libc.stdint cimport int64_t, uint64_t
from libcpp.algorithm cimport sort as csort
from libcpp.string cimport string
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from .errors import ResourceLimitError, ValidationError

BACKEND_NAME = "compiled"

DEF STOP_HORIZON_CODE = 0
DEF STOP_COUNT_CODE = 1
DEF STOP_DISTANCE_CODE = 2
DEF STOP_VERTEX_CODE = 3

_STOP_NAMES = ("horizon", "vertex-count", "distance", "target-vertex")

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15
cdef uint64_t MULT1 = 0xBF58476D1CE4E5B9
cdef uint64_t MULT2 = 0x94D049BB133111EB
cdef double UNIT = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MULT1
    z = (z ^ (z >> 27)) * MULT2
    return z ^ (z >> 31)


cdef inline uint64_t _next_u64(uint64_t* rs) nogil:
    rs[0] = rs[0] + GOLDEN
    return _mix64(rs[0])


cdef inline double _next_unit(uint64_t* rs) nogil:
    return <double>(_next_u64(rs) >> 11) * UNIT


cdef class _Sim:
    cdef vector[vector[long]] adj
    cdef vector[long] depth
    cdef vector[long] pending
    cdef vector[long] pidx
    cdef vector[long] growth
    cdef int lazy_kind          # 0 none, 1 halfline, 2 hardtree
    cdef long max_vertices
    cdef long creations
    cdef long walker
    cdef long root


cdef int _add_leaf(_Sim s, long at) except -1:
    cdef long n = <long>s.adj.size()
    if n >= s.max_vertices:
        raise ResourceLimitError(f"vertex cap {s.max_vertices} exceeded")
    cdef vector[long] fresh
    fresh.push_back(at)
    s.adj[at].push_back(n)
    s.adj.push_back(fresh)
    s.depth.push_back(s.depth[at] + 1)
    s.pending.push_back(0)
    s.pidx.push_back(-1)
    s.creations += 1
    return 0


cdef int _materialize_child(_Sim s, long v) except -1:
    cdef long n = <long>s.adj.size()
    if n >= s.max_vertices:
        raise ResourceLimitError(f"vertex cap {s.max_vertices} exceeded")
    cdef long child_depth = s.depth[v] + 1
    cdef long count
    cdef vector[long] fresh
    fresh.push_back(v)
    s.adj[v].push_back(n)
    s.adj.push_back(fresh)
    s.depth.push_back(child_depth)
    if s.lazy_kind == 1:
        s.pending.push_back(1)
        s.pidx.push_back(s.pidx[v] + 1)
    else:
        if child_depth >= <long>s.growth.size():
            raise ResourceLimitError(
                "hardtree growth table exhausted; depth bound too small"
            )
        count = s.growth[child_depth]
        if count < 1:
            raise ValidationError(
                f"growth descriptor must be >= 1, got {count} at depth {child_depth}"
            )
        s.pending.push_back(count)
        s.pidx.push_back(-1)
    s.pending[v] -= 1
    return 0


cdef int _expand(_Sim s, long v) except -1:
    while s.pending[v] > 0:
        _materialize_child(s, v)
    return 0


cdef int _ensure_radius(_Sim s, long center, int r) except -1:
    if s.lazy_kind == 0 or r <= 0:
        return 0
    cdef vector[long] frontier, nxt
    cdef unordered_set[long] seen
    cdef long v, w
    cdef size_t i, j
    cdef int layer
    frontier.push_back(center)
    seen.insert(center)
    for layer in range(r):
        nxt.clear()
        for i in range(frontier.size()):
            v = frontier[i]
            _expand(s, v)
            for j in range(s.adj[v].size()):
                w = s.adj[v][j]
                if seen.count(w) == 0:
                    seen.insert(w)
                    nxt.push_back(w)
        frontier.swap(nxt)
    return 0


cdef inline int _stepk(_Sim s, double p, uint64_t* rs) except -1:
    """One kernel step: creation coin, then uniform neighbor move."""
    cdef long w = s.walker
    cdef uint64_t u
    cdef long d, v
    if s.pending[w] > 0:
        _expand(s, w)
    if _next_unit(rs) < p:
        _add_leaf(s, w)
    u = _next_u64(rs)
    d = <long>s.adj[w].size()
    if d > 0:
        v = s.adj[w][<long>(u % <uint64_t>d)]
        s.walker = v
        if s.pending[v] > 0:
            _expand(s, v)
    return 0


cdef _Sim _build(init, long max_vertices):
    cdef _Sim s = _Sim()
    cdef long n0, u, v, i
    s.max_vertices = max_vertices
    s.creations = 0
    kind = init[0]
    if kind == "finite":
        n0 = init[1]
        flat = init[2]
        s.root = init[3]
        s.walker = init[4]
        s.lazy_kind = 0
        s.adj.resize(n0)
        s.depth.resize(n0)
        s.pending.assign(n0, 0)
        s.pidx.assign(n0, -1)
        for i in range(0, len(flat), 2):
            u = flat[i]
            v = flat[i + 1]
            s.adj[u].push_back(v)
            s.adj[v].push_back(u)
        _depth_bfs(s, n0)
        return s
    if kind == "halfline":
        s.root = 0
        s.walker = 0
        s.lazy_kind = 1
        s.adj.resize(2)
        s.adj[0].push_back(1)
        s.adj[1].push_back(0)
        s.depth.push_back(0)
        s.depth.push_back(1)
        s.pending.push_back(0)
        s.pending.push_back(1)
        s.pidx.push_back(0)
        s.pidx.push_back(1)
        return s
    if kind == "hardtree":
        table = init[1]
        s.root = 0
        s.walker = 0
        s.lazy_kind = 2
        for u in table:
            s.growth.push_back(u)
        s.adj.resize(1)
        s.depth.push_back(0)
        s.pending.push_back(s.growth[0])
        s.pidx.push_back(-1)
        _expand(s, 0)
        return s
    raise ValidationError(f"unknown backend init kind {kind!r}")


cdef int _depth_bfs(_Sim s, long n0) except -1:
    cdef vector[long] queue, nxt
    cdef vector[char] seen
    cdef long x, y
    cdef size_t i, j
    seen.assign(n0, 0)
    for x in range(n0):
        s.depth[x] = -1
    s.depth[s.root] = 0
    seen[s.root] = 1
    queue.push_back(s.root)
    while queue.size() > 0:
        nxt.clear()
        for i in range(queue.size()):
            x = queue[i]
            for j in range(s.adj[x].size()):
                y = s.adj[x][j]
                if seen[y] == 0:
                    seen[y] = 1
                    s.depth[y] = s.depth[x] + 1
                    nxt.push_back(y)
        queue.swap(nxt)
    return 0


cdef string _encode_ball(_Sim s, long center, int r) except *:
    """Canonical code of the radius-r ball around center; see bgrw.topology
    for the grammar."""
    _ensure_radius(s, center, r)
    cdef vector[long] order
    cdef vector[int] parent_local
    cdef unordered_map[long, int] local
    cdef long start = 0, stop = 1, v, w
    cdef size_t j
    cdef int layer, li, k, i, pi
    order.push_back(center)
    parent_local.push_back(-1)
    local[center] = 0
    for layer in range(r):
        for li in range(<int>start, <int>stop):
            v = order[li]
            for j in range(s.adj[v].size()):
                w = s.adj[v][j]
                if local.count(w) == 0:
                    local[w] = <int>order.size()
                    parent_local.push_back(li)
                    order.push_back(w)
        start = stop
        stop = <long>order.size()
        if start == stop:
            break
    k = <int>order.size()
    cdef vector[string] codes
    cdef vector[vector[string]] kids
    cdef string c
    codes.resize(k)
    kids.resize(k)
    for i in range(k - 1, -1, -1):
        csort(kids[i].begin(), kids[i].end())
        c.clear()
        c.push_back(c'(')
        for j in range(kids[i].size()):
            c.append(kids[i][j])
        c.push_back(c')')
        codes[i] = c
        pi = parent_local[i]
        if pi >= 0:
            kids[pi].push_back(codes[i])
    return codes[0]


cdef long _corridor_length(_Sim s, long maxlen) except -1:
    cdef long w = s.walker
    cdef long prev = w
    cdef long cur = s.adj[w][0]
    cdef long length = 1
    cdef long nxt
    while length < maxlen:
        _expand(s, cur)
        if s.adj[cur].size() != 2:
            break
        nxt = s.adj[cur][1] if s.adj[cur][0] == prev else s.adj[cur][0]
        prev = cur
        cur = nxt
        length += 1
    return length


cdef long _corridor_vertex(_Sim s, long hops) except -1:
    cdef long cur = s.walker
    cdef long prev = -1
    cdef long nxt, i
    for i in range(hops):
        _expand(s, cur)
        nxt = s.adj[cur][0] if s.adj[cur][0] != prev else s.adj[cur][1]
        prev = cur
        cur = nxt
    return cur


def run_summary(
    init,
    double p,
    long horizon,
    seed,
    *,
    long stride=1,
    int measure_radius=-1,
    marked=(),
    corridor_lengths=(),
    long stop_at_count=-1,
    long stop_at_distance=-1,
    long stop_at_vertex=-1,
    long max_vertices=10_000_000,
    bint record_series=True,
    bint record_tree=False,
):
    cdef _Sim s = _build(init, max_vertices)
    cdef uint64_t rs = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef long long[::1] dist_mv = None
    cdef long long[::1] deg_mv = None
    cdef long long[::1] vcount_mv = None
    dist_arr = deg_arr = vcount_arr = None
    if record_series:
        dist_arr = np.zeros(horizon + 1, dtype=np.int64)
        deg_arr = np.zeros(horizon + 1, dtype=np.int64)
        vcount_arr = np.zeros(horizon + 1, dtype=np.int64)
        dist_mv = dist_arr
        deg_mv = deg_arr
        vcount_mv = vcount_arr
    cdef vector[long] markedv
    cdef vector[long long] visits
    for m in marked:
        markedv.push_back(m)
        visits.push_back(0)
    cdef long n_marked = <long>markedv.size()
    cdef vector[long] corlens
    cdef vector[long long] corhit
    for path_len in corridor_lengths:
        corlens.push_back(path_len)
        corhit.push_back(-1)
    cdef long n_cor = <long>corlens.size()
    cdef long n_cor_open = n_cor
    cdef unordered_map[string, long long] measure
    cdef bint want_measure = measure_radius >= 0
    cdef long t = 0, steps = 0, w, i, maxlen, length
    cdef int stopped = STOP_HORIZON_CODE
    cdef string code

    # observation at time 0: series, visit counters, measure, corridor scan
    w = s.walker
    if record_series:
        dist_mv[0] = s.depth[w]
        deg_mv[0] = <long long>s.adj[w].size()
        vcount_mv[0] = <long long>s.adj.size()
    for i in range(n_marked - 1, -1, -1):
        if markedv[i] == w:
            visits[i] += 1
            break
    if want_measure:
        code = _encode_ball(s, w, measure_radius)
        measure[code] += 1
    if n_cor_open > 0 and <long>s.adj[w].size() + s.pending[w] == 1:
        maxlen = 0
        for i in range(n_cor):
            if corhit[i] < 0 and corlens[i] > maxlen:
                maxlen = corlens[i]
        length = _corridor_length(s, maxlen)
        for i in range(n_cor):
            if corhit[i] < 0 and corlens[i] <= length:
                corhit[i] = 0
                n_cor_open -= 1

    if stop_at_count >= 0 and <long>s.adj.size() >= stop_at_count:
        if <long>s.adj.size() > stop_at_count:
            raise ValidationError("initial tree already exceeds the target count")
        stopped = STOP_COUNT_CODE
    else:
        for t in range(1, horizon + 1):
            _stepk(s, p, &rs)
            w = s.walker
            if record_series:
                dist_mv[t] = s.depth[w]
                deg_mv[t] = <long long>s.adj[w].size()
                vcount_mv[t] = <long long>s.adj.size()
            for i in range(n_marked - 1, -1, -1):
                if markedv[i] == w:
                    visits[i] += 1
                    break
            if want_measure and t % stride == 0:
                code = _encode_ball(s, w, measure_radius)
                measure[code] += 1
            if n_cor_open > 0 and <long>s.adj[w].size() + s.pending[w] == 1:
                maxlen = 0
                for i in range(n_cor):
                    if corhit[i] < 0 and corlens[i] > maxlen:
                        maxlen = corlens[i]
                length = _corridor_length(s, maxlen)
                for i in range(n_cor):
                    if corhit[i] < 0 and corlens[i] <= length:
                        corhit[i] = t
                        n_cor_open -= 1
            steps = t
            if stop_at_count >= 0 and <long>s.adj.size() >= stop_at_count:
                stopped = STOP_COUNT_CODE
                break
            if stop_at_distance >= 0 and s.depth[w] >= stop_at_distance:
                stopped = STOP_DISTANCE_CODE
                break
            if stop_at_vertex >= 0 and s.pidx[w] == stop_at_vertex:
                stopped = STOP_VERTEX_CODE
                break

    measure_out = None
    cdef unordered_map[string, long long].iterator it
    if want_measure:
        measure_out = {}
        it = measure.begin()
        while it != measure.end():
            measure_out[deref(it).first] = deref(it).second
            inc(it)
    visits_arr = np.zeros(n_marked, dtype=np.int64)
    for i in range(n_marked):
        visits_arr[i] = visits[i]
    cor_arr = np.zeros(n_cor, dtype=np.int64)
    for i in range(n_cor):
        cor_arr[i] = corhit[i]
    out = {
        "steps": steps,
        "stopped": _STOP_NAMES[stopped],
        "dist": dist_arr[: steps + 1].copy() if record_series else None,
        "deg": deg_arr[: steps + 1].copy() if record_series else None,
        "vcount": vcount_arr[: steps + 1].copy() if record_series else None,
        "creations": s.creations,
        "visits": visits_arr,
        "corridor_hit": cor_arr,
        "measure": measure_out,
        "n_final": <long>s.adj.size(),
        "root": s.root,
        "walker": s.walker,
    }
    cdef long nf, vv
    cdef long long[::1] par_mv, dep_mv
    if record_tree:
        nf = <long>s.adj.size()
        parent_arr = np.full(nf, -1, dtype=np.int64)
        depth_arr = np.zeros(nf, dtype=np.int64)
        par_mv = parent_arr
        dep_mv = depth_arr
        for vv in range(nf):
            dep_mv[vv] = s.depth[vv]
            if vv != s.root:
                for i in range(<long>s.adj[vv].size()):
                    if s.depth[s.adj[vv][i]] == s.depth[vv] - 1:
                        par_mv[vv] = s.adj[vv][i]
                        break
        out["parent"] = parent_arr
        out["depth"] = depth_arr
    return out


def run_loop(loops, long walker, double p, long horizon, seed):
    """Segment process; first time >= 1 at vertex 0, or -1 when censored."""
    cdef vector[long long] lp
    for c in loops:
        lp.push_back(c)
    cdef long L = <long>lp.size() - 1
    cdef uint64_t rs = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef long w = walker
    cdef long t, path_edges
    cdef long long attached
    cdef uint64_t u
    cdef long long idx
    for t in range(1, horizon + 1):
        if _next_unit(&rs) < p:
            lp[w] += 1
        path_edges = (1 if w > 0 else 0) + (1 if w < L else 0)
        attached = path_edges + lp[w]
        u = _next_u64(&rs)
        idx = <long long>(u % <uint64_t>attached)
        if idx < path_edges:
            if w > 0 and idx == 0:
                w = w - 1
            else:
                w = w + 1
        if w == 0:
            return t
    return -1


def run_coupled(
    long path_len,
    double p,
    long horizon,
    seed,
    bint record_alignment=False,
):
    """Coupled growth-walk / segment pair; see _pykernels.run_coupled."""
    cdef _Sim s = _Sim()
    cdef long i
    s.max_vertices = 10_000_000
    s.creations = 0
    s.lazy_kind = 0
    s.root = 0
    s.walker = path_len
    s.adj.resize(path_len + 2)
    for i in range(path_len):
        s.adj[i].push_back(i + 1)
        s.adj[i + 1].push_back(i)
    s.adj[path_len].push_back(path_len + 1)
    s.adj[path_len + 1].push_back(path_len)
    for i in range(path_len + 1):
        s.depth.push_back(i)
    s.depth.push_back(path_len + 1)
    s.pending.assign(path_len + 2, 0)
    s.pidx.assign(path_len + 2, -1)

    cdef uint64_t rs = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef vector[long long] loops
    loops.assign(path_len + 1, 0)
    loops[path_len] = 1
    cdef long loop_pos = path_len
    cdef long long k = 0
    cdef long long walk_hit = -1
    cdef long long seg_hit = -1
    cdef long t = 0, steps = 0, w, v
    cdef long before
    cdef bint on_path
    cdef long long[::1] al_mv = None
    cdef long long[::1] alp_mv = None
    align_label = align_loop = None
    if record_alignment:
        align_label = np.full(horizon + 1, -2, dtype=np.int64)
        align_loop = np.full(horizon + 1, -2, dtype=np.int64)
        al_mv = align_label
        alp_mv = align_loop
        al_mv[0] = path_len
        alp_mv[0] = loop_pos
    for t in range(1, horizon + 1):
        w = s.walker
        on_path = w <= path_len
        before = <long>s.adj.size()
        _stepk(s, p, &rs)
        steps = t
        v = s.walker
        if on_path:
            k += 1
            if <long>s.adj.size() > before:
                loops[w] += 1
            if v <= path_len:
                loop_pos = v
            if loop_pos == 0 and seg_hit < 0:
                seg_hit = k
        if record_alignment:
            al_mv[t] = v if v <= path_len else -1
            alp_mv[t] = loop_pos
        if v == 0:
            walk_hit = t
            break
    cdef long long coupled_ticks = k
    # continue the shadow on its own stream when the walk stopped feeding it
    cdef uint64_t aux = <uint64_t>(
        ((seed & 0xFFFFFFFFFFFFFFFF) ^ 0xD1B54A32D192ED03) & 0xFFFFFFFFFFFFFFFF
    )
    aux = _mix64(aux)
    cdef long path_edges
    cdef long long attached, idx
    cdef uint64_t u
    if seg_hit < 0:
        while k < horizon:
            k += 1
            if _next_unit(&aux) < p:
                loops[loop_pos] += 1
            path_edges = (1 if loop_pos > 0 else 0) + (1 if loop_pos < path_len else 0)
            attached = path_edges + loops[loop_pos]
            u = _next_u64(&aux)
            idx = <long long>(u % <uint64_t>attached)
            if idx < path_edges:
                if loop_pos > 0 and idx == 0:
                    loop_pos = loop_pos - 1
                else:
                    loop_pos = loop_pos + 1
            if loop_pos == 0:
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
        out["align_label"] = align_label[: steps + 1].copy()
        out["align_loop"] = align_loop[: steps + 1].copy()
    return out


def run_corridor_watch(
    init,
    long length,
    long offset,
    double p,
    long horizon,
    seed,
    long max_vertices=10_000_000,
):
    """Corridor first passage, then a revisit watch on one marked vertex."""
    if not (0 <= offset <= length):
        raise ValidationError("need 0 <= offset <= length")
    cdef _Sim st = _build(init, max_vertices)
    cdef uint64_t rs = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef long long hit_t = -1
    cdef long marked = -1
    cdef int revisited = -1
    cdef long t = 0, w
    while t <= horizon:
        w = st.walker
        if hit_t < 0:
            if <long>st.adj[w].size() + st.pending[w] == 1:
                if _corridor_length(st, length) >= length:
                    hit_t = t
                    marked = _corridor_vertex(st, length - offset)
                    revisited = 1 if w == marked else 0
                    if revisited == 1:
                        break
        else:
            if w == marked:
                revisited = 1
                break
        if t == horizon:
            break
        _stepk(st, p, &rs)
        t += 1
    return {"hit": hit_t, "revisited": revisited, "steps": t}


def sample_step_outcomes(long d, double p, long n, seed):
    """Empirical one-step outcome counts at a degree-d state; ids follow
    _pykernels.sample_step_outcomes."""
    counts_arr = np.zeros(2 if d == 0 else 2 * d + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef uint64_t rs = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef long i
    cdef bint created
    cdef uint64_t u
    for i in range(n):
        created = _next_unit(&rs) < p
        u = _next_u64(&rs)
        if d == 0:
            counts[0 if created else 1] += 1
        elif created:
            counts[<long>(u % <uint64_t>(d + 1))] += 1
        else:
            counts[d + 1 + <long>(u % <uint64_t>d)] += 1
    return counts_arr
