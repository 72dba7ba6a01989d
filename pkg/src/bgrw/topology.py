"""Canonical forms and local neighborhoods of finite rooted trees.

Canonical code grammar (normative, stable across versions):

    code(leaf)       = b"()"
    code(vertex)     = b"(" + concatenation of children codes, sorted as
                       byte strings ascending + b")"

Two rooted trees are isomorphic exactly when their codes are equal. For
embedding codes in binary streams, serialize_code prefixes the raw code with
its length as 4 bytes big-endian.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError


@dataclass
class RootedBall:
    """Finite rooted tree extracted around a center; local ids, center = 0.

    Vertices are numbered in BFS order from the center, so adjacency[0] are
    the center's neighbors and depths are nondecreasing along the id order.
    """

    radius: int
    adjacency: list[list[int]]

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)


def extract_ball(tree, center: int, r: int) -> RootedBall:
    """Induced subtree on the vertices within distance r of center.

    ``tree`` is a TreeState (or anything with adjacency / ensure_radius);
    lazy initial trees are materialized as far as the ball needs.
    """
    if r < 0:
        raise ValidationError("ball radius must be nonnegative")
    if not (0 <= center < len(tree.adjacency)):
        raise ValidationError(f"unknown center vertex {center}")
    ensure = getattr(tree, "ensure_radius", None)
    if ensure is not None:
        ensure(center, r)
    adj = tree.adjacency
    local = {center: 0}
    order = [center]
    ball_adj: list[list[int]] = [[]]
    frontier = [center]
    for _ in range(r):
        nxt = []
        for v in frontier:
            lv = local[v]
            for w in adj[v]:
                if w not in local:
                    lw = len(order)
                    local[w] = lw
                    order.append(w)
                    ball_adj.append([lv])
                    ball_adj[lv].append(lw)
                    nxt.append(w)
        frontier = nxt
    return RootedBall(radius=r, adjacency=ball_adj)


def encode_rooted(adjacency: list[list[int]], root: int) -> bytes:
    """Canonical code of an arbitrary finite rooted tree."""
    n = len(adjacency)
    if not (0 <= root < n):
        raise ValidationError(f"unknown root vertex {root}")
    parent = [-2] * n
    parent[root] = -1
    order = [root]
    for v in order:
        for w in adjacency[v]:
            if parent[w] == -2:
                parent[w] = v
                order.append(w)
    if len(order) != n:
        raise ValidationError("adjacency is not a connected tree")
    codes: list[bytes] = [b""] * n
    children_codes: list[list[bytes]] = [[] for _ in range(n)]
    for v in reversed(order):
        parts = children_codes[v]
        parts.sort()
        codes[v] = b"(" + b"".join(parts) + b")"
        q = parent[v]
        if q >= 0:
            children_codes[q].append(codes[v])
    return codes[root]


def canonical_encode(ball: RootedBall) -> bytes:
    """Canonical code of a ball, rooted at its center."""
    return encode_rooted(ball.adjacency, 0)


def rooted_isomorphic(a: RootedBall, b: RootedBall) -> bool:
    """Rooted isomorphism, decided through code equality."""
    return canonical_encode(a) == canonical_encode(b)


def path_tip_code(length: int) -> bytes:
    """Code of a path with ``length`` edges rooted at one endpoint."""
    if length < 0:
        raise ValidationError("path length must be nonnegative")
    return b"(" * length + b"()" + b")" * length


def serialize_code(code: bytes) -> bytes:
    return struct.pack(">I", len(code)) + code


def parse_code(blob: bytes) -> tuple[bytes, bytes]:
    """Inverse of serialize_code; returns (code, remaining bytes)."""
    if len(blob) < 4:
        raise ValidationError("truncated code blob")
    (n,) = struct.unpack(">I", blob[:4])
    if len(blob) < 4 + n:
        raise ValidationError("truncated code blob")
    return blob[4 : 4 + n], blob[4 + n :]


@dataclass(frozen=True)
class LocalDistance:
    """Either an exact local distance or an upper bound 1/(1+r_max)."""

    value: Fraction
    is_upper_bound: bool


def local_distance(
    a: tuple, b: tuple, r_max: int
) -> LocalDistance:
    """Distance 1/(1 + s) between two centered trees, s = largest radius at
    which the centered balls are still isomorphic.

    Each argument is a (tree, center) pair. If the balls agree through r_max
    the result is exact 0 when both trees are finite, fully contained in
    their r_max-balls, and isomorphic; otherwise it is the upper bound
    1/(1 + r_max).
    """
    if r_max < 0:
        raise ValidationError("r_max must be nonnegative")
    tree_a, center_a = a
    tree_b, center_b = b
    agree = -1
    ball_a = ball_b = None
    for r in range(r_max + 1):
        ball_a = extract_ball(tree_a, center_a, r)
        ball_b = extract_ball(tree_b, center_b, r)
        if canonical_encode(ball_a) != canonical_encode(ball_b):
            break
        agree = r
    else:
        lazy_a = getattr(tree_a, "lazy_kind", 0) != 0
        lazy_b = getattr(tree_b, "lazy_kind", 0) != 0
        covered_a = not lazy_a and ball_a.vertex_count == len(tree_a.adjacency)
        covered_b = not lazy_b and ball_b.vertex_count == len(tree_b.adjacency)
        if covered_a and covered_b:
            return LocalDistance(Fraction(0), False)
        return LocalDistance(Fraction(1, 1 + r_max), True)
    if agree < 0:
        # balls at radius 0 are single vertices and always agree
        raise ValidationError("radius-0 balls cannot disagree")
    return LocalDistance(Fraction(1, 1 + agree), False)


def max_degree_within(tree, center: int, r: int) -> int:
    """Largest full-tree degree among vertices within distance r of center.

    Degrees count ambient neighbors, including children of lazy initial
    trees that have not been materialized, so the value dominates every
    degree visible inside the extracted ball.
    """
    if r < 0:
        raise ValidationError("radius must be nonnegative")
    if not (0 <= center < len(tree.adjacency)):
        raise ValidationError(f"unknown center vertex {center}")
    ensure = getattr(tree, "ensure_radius", None)
    if ensure is not None:
        ensure(center, r)
    full_degree = getattr(tree, "full_degree", None)
    if full_degree is None:
        full_degree = lambda v: len(tree.adjacency[v])
    best = full_degree(center)
    seen = {center}
    frontier = [center]
    for _ in range(r):
        nxt = []
        for v in frontier:
            for w in tree.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    dw = full_degree(w)
                    if dw > best:
                        best = dw
        frontier = nxt
    return best
