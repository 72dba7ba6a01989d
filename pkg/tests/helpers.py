"""Shared test oracles: tree enumeration, independent isomorphism, run
probabilities by brute force, and reachable-state generation.

Everything here is deliberately implemented differently from the package
(nested-tuple shapes, networkx matching, 2^m enumeration) so agreement is
evidence, not tautology.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher, categorical_node_match

from bgrw.core import InitialTree, TreeState, bgrw_step, make_initial_tree
from bgrw.rng import Rng

# Rooted trees on 1..8 vertices (A000081).
ROOTED_TREE_COUNTS = [1, 1, 2, 4, 9, 20, 48, 115]


@lru_cache(maxsize=None)
def rooted_shapes(n: int) -> tuple:
    """All distinct rooted trees on n vertices, as sorted nested tuples.

    A shape is the sorted tuple of its children's shapes; sortedness makes
    the representation canonical, so set-dedup below yields each isomorphism
    class exactly once.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if n == 1:
        return ((),)
    out = set()

    def rec(remaining: int, bound, parts: list) -> None:
        if remaining == 0:
            out.add(tuple(sorted(parts)))
            return
        for size in range(remaining, 0, -1):
            for shape in rooted_shapes(size):
                key = (size, shape)
                if bound is not None and key > bound:
                    continue
                parts.append(shape)
                rec(remaining - size, key, parts)
                parts.pop()

    rec(n - 1, None, [])
    return tuple(sorted(out))


def shape_to_adjacency(shape) -> list[list[int]]:
    """Concrete adjacency for a shape, vertex 0 as the root."""
    adj: list[list[int]] = [[]]

    def build(parent: int, children) -> None:
        for child in children:
            v = len(adj)
            adj.append([parent])
            adj[parent].append(v)
            build(v, child)

    build(0, shape)
    return adj


def relabel(adj: list[list[int]], root: int, perm: list[int]):
    """Apply a vertex permutation; neighbor order follows the permutation."""
    fresh: list[list[int]] = [[] for _ in adj]
    for v, nbrs in enumerate(adj):
        for w in nbrs:
            fresh[perm[v]].append(perm[w])
    return fresh, perm[root]


def random_rooted_tree(n: int, rng: random.Random) -> list[list[int]]:
    """Random recursive tree on n vertices rooted at 0."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        q = rng.randrange(v)
        adj[v].append(q)
        adj[q].append(v)
    return adj


def _to_nx(adj: list[list[int]], root: int) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(len(adj)))
    for v, nbrs in enumerate(adj):
        for w in nbrs:
            if v < w:
                g.add_edge(v, w)
    nx.set_node_attributes(g, False, "is_root")
    g.nodes[root]["is_root"] = True
    return g


def nx_rooted_isomorphic(adj_a, root_a, adj_b, root_b) -> bool:
    """Root-preserving isomorphism via networkx VF2; the independent judge."""
    matcher = GraphMatcher(
        _to_nx(adj_a, root_a),
        _to_nx(adj_b, root_b),
        node_match=categorical_node_match("is_root", False),
    )
    return matcher.is_isomorphic()


def run_probability_enumerated(trials: int, run_length: int, prob) -> Fraction:
    """P(>= run_length consecutive ones) by enumerating all 2^trials words."""
    if trials > 16:
        raise ValueError("enumeration oracle capped at 16 trials")
    x = Fraction(prob)
    total = Fraction(0)
    for word in range(1 << trials):
        run = best = ones = 0
        for i in range(trials):
            if (word >> i) & 1:
                run += 1
                ones += 1
                best = max(best, run)
            else:
                run = 0
        if best >= run_length:
            total += x**ones * (1 - x) ** (trials - ones)
    return total


_STARTS = (
    InitialTree.single(),
    InitialTree.path(1),
    InitialTree.path(4),
    InitialTree.star(3),
    InitialTree.star(6),
)


def reachable_state(seed: int, max_steps: int = 120) -> TreeState:
    """A tree/walker state reachable by the process from a small start.

    Drives the real kernel for a seed-determined number of steps at a
    seed-determined p, so returned states carry realistic degree profiles.
    """
    rng = Rng(seed)
    start = _STARTS[rng.below(len(_STARTS))]
    steps = rng.below(max_steps + 1)
    p = 0.15 + 0.7 * rng.uniform()
    state = make_initial_tree(start).build_state()
    walk = Rng(rng.next_u64())
    for _ in range(steps):
        bgrw_step(state, p, walk)
    return state


# Criterion results for the terminal summary, keyed by criterion number.
CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(index: int, passed: bool, detail: str = "") -> None:
    CRITERIA[index] = (bool(passed), detail)
