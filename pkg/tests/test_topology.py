"""Ball extraction, canonical codes, the local metric, and degree bounds."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bgrw.core import BgrwConfig, InitialTree, make_initial_tree, simulate_summary
from bgrw.rng import Rng
from bgrw.topology import (
    LocalDistance,
    ValidationError,
    canonical_encode,
    encode_rooted,
    extract_ball,
    local_distance,
    max_degree_within,
    parse_code,
    path_tip_code,
    rooted_isomorphic,
    serialize_code,
)

from helpers import (
    nx_rooted_isomorphic,
    random_rooted_tree,
    relabel,
    rooted_shapes,
    shape_to_adjacency,
)


class Plain:
    """Bare adjacency holder; the minimal tree-like object the ops accept."""

    def __init__(self, adjacency):
        self.adjacency = adjacency


def path_adj(n):
    return Plain([[j for j in (i - 1, i + 1) if 0 <= j <= n] for i in range(n + 1)])


def star_adj(k):
    return Plain([list(range(1, k + 1))] + [[0] for _ in range(k)])


# --- ball extraction --------------------------------------------------------


def test_radius_zero_ball_is_a_point():
    ball = extract_ball(path_adj(5), 2, 0)
    assert ball.vertex_count == 1
    assert ball.adjacency == [[]]
    assert ball.radius == 0


def test_ball_of_path_endpoint():
    ball = extract_ball(path_adj(5), 0, 3)
    assert ball.vertex_count == 4
    assert canonical_encode(ball) == path_tip_code(3)


def test_ball_of_star_leaf():
    star = star_adj(7)
    edge = extract_ball(star, 1, 1)
    assert edge.vertex_count == 2
    assert canonical_encode(edge) == path_tip_code(1)
    full = extract_ball(star, 1, 2)
    assert full.vertex_count == 8
    # full star, but rooted at the leaf we centered on
    assert canonical_encode(full) == encode_rooted(star.adjacency, 1)


def test_ball_errors():
    with pytest.raises(ValidationError):
        extract_ball(path_adj(2), 9, 1)
    with pytest.raises(ValidationError):
        extract_ball(path_adj(2), 0, -1)


def test_ball_monotone_in_radius():
    # the r-ball is exactly the r-ball of the (r+1)-ball
    rng = random.Random(31)
    for _ in range(20):
        adj = random_rooted_tree(40, rng)
        center = rng.randrange(40)
        for r in range(4):
            outer = extract_ball(Plain(adj), center, r + 1)
            inner = extract_ball(Plain(adj), center, r)
            nested = extract_ball(outer, 0, r)
            assert canonical_encode(nested) == canonical_encode(inner)


# --- canonical codes --------------------------------------------------------


def test_single_vertex_code():
    assert encode_rooted([[]], 0) == b"()"


def test_leaf_and_tip_grammar():
    assert path_tip_code(0) == b"()"
    assert path_tip_code(1) == b"(())"
    assert path_tip_code(3) == b"(((())))"
    # two leaves under a root: sorted concatenation of children codes
    assert encode_rooted(star_adj(2).adjacency, 0) == b"(()())"


def test_root_position_changes_code():
    path2 = path_adj(2)
    assert encode_rooted(path2.adjacency, 1) != encode_rooted(path2.adjacency, 0)


def test_all_labelings_of_three_path_share_one_code():
    codes = set()
    for perm in itertools.permutations(range(3)):
        adj = [[] for _ in range(3)]
        # original edges 0-1, 1-2 with center 1, pushed through perm
        for u, v in ((0, 1), (1, 2)):
            adj[perm[u]].append(perm[v])
            adj[perm[v]].append(perm[u])
        codes.add(encode_rooted(adj, perm[1]))
    assert len(codes) == 1


def test_exhaustive_relabeling_invariance_small():
    for n in range(1, 7):
        for shape in rooted_shapes(n):
            adj = shape_to_adjacency(shape)
            base = encode_rooted(adj, 0)
            for perm in itertools.permutations(range(n)):
                padj, proot = relabel(adj, 0, list(perm))
                assert encode_rooted(padj, proot) == base


def test_codes_separate_all_small_classes():
    # distinct shapes on n vertices get distinct codes, for n up to 8
    for n in range(1, 9):
        shapes = rooted_shapes(n)
        codes = {encode_rooted(shape_to_adjacency(s), 0) for s in shapes}
        assert len(codes) == len(shapes)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 120))
def test_random_relabeling_invariance(seed, n):
    rng = random.Random(seed)
    adj = random_rooted_tree(n, rng)
    root = rng.randrange(n)
    perm = list(range(n))
    rng.shuffle(perm)
    padj, proot = relabel(adj, root, perm)
    assert encode_rooted(padj, proot) == encode_rooted(adj, root)


def test_rooted_isomorphic_matches_independent_matcher():
    rng = random.Random(1117)
    for _ in range(60):
        n = rng.randrange(2, 8)
        a = random_rooted_tree(n, rng)
        b = random_rooted_tree(n, rng)
        ra, rb = rng.randrange(n), rng.randrange(n)
        ball_a = extract_ball(Plain(a), ra, n)
        ball_b = extract_ball(Plain(b), rb, n)
        assert rooted_isomorphic(ball_a, ball_b) == nx_rooted_isomorphic(a, ra, b, rb)


def test_rooted_isomorphic_examples():
    p3 = path_adj(3)
    ball = extract_ball(p3, 0, 3)
    assert rooted_isomorphic(ball, ball)
    assert not rooted_isomorphic(extract_ball(p3, 0, 3), extract_ball(p3, 1, 3))


def test_relabeled_self_is_isomorphic():
    rng = random.Random(88)
    for _ in range(500):
        n = rng.randrange(2, 13)
        adj = random_rooted_tree(n, rng)
        root = rng.randrange(n)
        perm = list(range(n))
        rng.shuffle(perm)
        padj, proot = relabel(adj, root, perm)
        a = extract_ball(Plain(adj), root, n)
        b = extract_ball(Plain(padj), proot, n)
        assert rooted_isomorphic(a, b)


# --- serialization ----------------------------------------------------------


def test_serialize_round_trip():
    for code in (b"()", path_tip_code(4), encode_rooted(star_adj(3).adjacency, 0)):
        blob = serialize_code(code)
        assert blob[:4] == len(code).to_bytes(4, "big")
        got, rest = parse_code(blob)
        assert got == code and rest == b""


def test_parse_concatenated_stream():
    codes = [path_tip_code(i) for i in range(4)]
    blob = b"".join(serialize_code(c) for c in codes)
    out = []
    while blob:
        code, blob = parse_code(blob)
        out.append(code)
    assert out == codes


def test_parse_truncated_blob():
    blob = serialize_code(path_tip_code(2))
    with pytest.raises(ValidationError):
        parse_code(blob[:3])
    with pytest.raises(ValidationError):
        parse_code(blob[:-1])


# --- local metric -----------------------------------------------------------


def test_identical_finite_trees_have_distance_zero():
    a = path_adj(3)
    d = local_distance((a, 0), (a, 0), r_max=5)
    assert d == LocalDistance(Fraction(0), False)


def test_point_vs_edge():
    d = local_distance((Plain([[]]), 0), (path_adj(1), 0), r_max=4)
    assert d.value == Fraction(1) and not d.is_upper_bound


def test_path3_vs_path4_from_the_tip():
    d = local_distance((path_adj(3), 0), (path_adj(4), 0), r_max=6)
    assert d.value == Fraction(1, 4) and not d.is_upper_bound


def test_agreement_through_r_max_is_an_upper_bound():
    # same 2-balls, trees keep going: only a bound is observable
    d = local_distance((path_adj(5), 0), (path_adj(9), 0), r_max=2)
    assert d == LocalDistance(Fraction(1, 3), True)
    with pytest.raises(ValidationError):
        local_distance((path_adj(1), 0), (path_adj(1), 0), r_max=-1)


def test_metric_symmetry_and_triples():
    rng = random.Random(5150)
    trees = [(Plain(random_rooted_tree(rng.randrange(2, 30), rng))) for _ in range(12)]
    centered = [(t, rng.randrange(len(t.adjacency))) for t in trees]
    for _ in range(80):
        a, b, c = (centered[rng.randrange(len(centered))] for _ in range(3))
        dab = local_distance(a, b, 6)
        dba = local_distance(b, a, 6)
        assert dab == dba
        dac = local_distance(a, c, 6).value
        dbc = local_distance(b, c, 6).value
        assert dac <= max(dab.value, dbc) or local_distance(a, c, 6).is_upper_bound


def test_zero_iff_equal_finite():
    a, b = path_adj(3), path_adj(4)
    assert local_distance((a, 0), (b, 0), 10).value > 0
    assert local_distance((a, 0), (a, 0), 10).value == 0


# --- degree statistic -------------------------------------------------------


def test_max_degree_examples():
    assert max_degree_within(Plain([[]]), 0, 0) == 0
    assert max_degree_within(Plain([[]]), 0, 5) == 0
    star = star_adj(7)
    assert max_degree_within(star, 0, 0) == 7
    assert max_degree_within(star, 1, 1) == 7
    assert max_degree_within(star, 1, 0) == 1


def test_max_degree_dominates_ball_degrees():
    rng = random.Random(2024)
    for _ in range(25):
        adj = random_rooted_tree(50, rng)
        center = rng.randrange(50)
        r = rng.randrange(4)
        ball = extract_ball(Plain(adj), center, r)
        inside = max(len(a) for a in ball.adjacency)
        assert max_degree_within(Plain(adj), center, r) >= inside


def test_max_degree_sees_unmaterialized_children():
    # lazy ambient trees count pending children in their degrees
    state = make_initial_tree(InitialTree.halfline()).build_state()
    assert max_degree_within(state, 0, 2) == 2
    hard = make_initial_tree(InitialTree.hardtree((2, 2))).build_state()
    # depth-1 vertices have 9 children plus the root edge
    assert max_degree_within(hard, 0, 1) == 10


def test_ball_of_live_run_state():
    cfg = BgrwConfig(p=0.5, horizon=200, seed=13, initial=InitialTree.star(3))
    summ = simulate_summary(cfg, record_tree=True)
    snap = summ.final_tree
    tree = Plain(snap.adjacency())
    walker_ball = extract_ball(tree, snap.walker, 2)
    assert walker_ball.vertex_count >= 1
    code = canonical_encode(walker_ball)
    assert code.startswith(b"(") and code.endswith(b")")
    assert canonical_encode(extract_ball(tree, snap.walker, 2)) == code
