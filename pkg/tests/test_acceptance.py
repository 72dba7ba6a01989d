"""Acceptance battery: fifteen numbered end-to-end checks on the shipped
package. Each test records a PASS/FAIL line for the terminal summary (see
conftest) and then asserts, so a red criterion is visible both ways.

These run the real compiled-or-fallback kernels at desk scale: several
minutes total, dominated by the Monte Carlo criteria.
"""

import json
import math
import random
from collections import deque
from fractions import Fraction
from itertools import permutations

import numpy as np

import helpers
from bgrw.cli import main as cli_main
from bgrw.cli import parse_tree_dot
from bgrw.core import BgrwConfig, InitialTree, one_step_distribution, simulate_summary
from bgrw.couplings import (
    block_stopping_times,
    consecutive_ones_bound,
    coupling_batch,
    minorant_walk,
    run_probability_exact,
    up_fraction,
)
from bgrw.loops import loop_tail_estimate
from bgrw.rng import derive_stream
from bgrw.stats import (
    drift_identity_check,
    fit_log_linear,
    degree_tail_curve,
    measure_from_summary,
    one_ended_proxy,
    speed_estimate,
    tv_distance,
    visit_tail,
)
from bgrw.topology import encode_rooted


def check(index: int, passed: bool, detail: str) -> None:
    helpers.record_criterion(index, passed, detail)
    assert passed, f"criterion {index}: {detail}"


def nonincreasing(xs) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


# ---------------------------------------------------------------------------


def test_criterion_01_sampled_step_frequencies_match_exact_law():
    """Empirical one-step frequencies agree with the enumerated law."""
    from bgrw import _backend as backend

    n = 10**6
    worst = 0.0
    cells = 0
    for i in range(50):
        state = helpers.reachable_state(seed=1000 + i)
        d = len(state.adjacency[state.walker])
        for j, p in enumerate((0.1, 0.5, 0.9)):
            law = one_step_distribution(state, p)
            counts = backend.sample_step_outcomes(
                d, p, n, derive_stream(1, i * 3 + j)
            )
            assert len(counts) == len(law)
            tv = 0.5 * sum(
                abs(counts[a] / n - float(q)) for a, (_, q) in enumerate(law)
            )
            worst = max(worst, tv)
            cells += 1
    check(1, worst <= 0.005, f"max TV {worst:.5f} over {cells} cells (bound 0.005)")


def test_criterion_02_drift_identity_is_exact():
    """Closed-form drift equals kernel enumeration in exact rationals."""
    ps = (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10))
    worst = 0.0
    exact_all = True
    for i in range(100):
        state = helpers.reachable_state(seed=2000 + i)
        for p in ps:
            res = drift_identity_check(state, p)
            worst = max(worst, res.difference)
            exact_all = exact_all and res.exact
    check(
        2,
        worst <= 1e-12,
        f"max |analytic-kernel| {worst:.2e} on 300 cells; rational equality: {exact_all}",
    )


def test_criterion_03_vertex_count_is_a_bernoulli_sum():
    """Vertex gain is Binomial(n, p): unit increments, mean near np."""
    n = 10**4
    gains = []
    increments_ok = True
    for i in range(100):
        s = simulate_summary(BgrwConfig(p=0.5, horizon=n, seed=derive_stream(3, i)))
        deltas = np.diff(s.vertex_count)
        increments_ok = increments_ok and bool(np.all((deltas == 0) | (deltas == 1)))
        gains.append(int(s.vertex_count[-1] - s.vertex_count[0]))
    mean = float(np.mean(gains))
    # three standard errors of the 100-seed mean of Binomial(1e4, 1/2)
    tol = 3 * math.sqrt(n * 0.25) / math.sqrt(100)
    ok = increments_ok and abs(mean - n * 0.5) <= tol
    check(3, ok, f"mean gain {mean:.1f} vs 5000 +- {tol:.0f}; unit increments: {increments_ok}")


def test_criterion_04_speed_is_positive_and_stable():
    """Speed estimates land in (0, p], agree across estimators and seeds."""
    n = 2 * 10**5
    ok = True
    parts = []
    for pi, p in enumerate((0.1, 0.5, 0.9)):
        endpoints, windows = [], []
        for i in range(20):
            s = simulate_summary(
                BgrwConfig(p=p, horizon=n, seed=derive_stream(4, pi * 20 + i))
            )
            est = speed_estimate(s)
            ok = ok and 0.0 < est.endpoint <= p and 0.0 < est.windowed <= p
            ok = ok and abs(est.endpoint - est.windowed) <= 0.02
            endpoints.append(est.endpoint)
            windows.append(est.windowed)
        spread = max(np.std(endpoints, ddof=1), np.std(windows, ddof=1))
        ok = ok and spread < 0.02
        parts.append(f"p={p}: c~{np.mean(endpoints):.3f} std {spread:.4f}")
    check(4, ok, "; ".join(parts))


def test_criterion_05_coupled_hitting_order_never_violated():
    """The segment shadow hits no later than the tree walk, every run."""
    res = coupling_batch(0.5, 10, 10**5, 10**4, master_seed=5)
    ok = res["violations"] == 0 and res["uncensored"] > 0
    check(
        5,
        ok,
        f"runs={res['runs']} uncensored={res['uncensored']} violations={res['violations']}",
    )


def test_criterion_06_minorant_domination_and_up_fraction():
    """Distance dominates radius times the minorant at every block; the
    pooled up-fraction at radius 16 is checked against one half."""
    violations = 0
    blocks_seen = 0
    qhat = {}
    for pi, p in enumerate((0.5, 0.9)):
        for ri, r in enumerate((4, 16)):
            pooled = []
            for i in range(1000):
                cfg = BgrwConfig(
                    p=p, horizon=20_000, seed=derive_stream(6, (pi * 2 + ri) * 1000 + i)
                )
                blocks = block_stopping_times(cfg, r)
                violations += sum(
                    1 for m in minorant_walk(blocks, r) if not m.dominated
                )
                blocks_seen += len(blocks)
                pooled.extend(blocks)
            if r == 16:
                qhat[p] = up_fraction(pooled)
    dominated = violations == 0
    q_ok = all(q > 0.5 for q in qhat.values())
    check(
        6,
        dominated and q_ok,
        f"violations={violations}/{blocks_seen} blocks; "
        f"up-fraction r=16: p=0.5 {qhat[0.5]:.4f}, p=0.9 {qhat[0.9]:.4f} (need > 0.5)",
    )


def test_criterion_07_run_probability_dominates_block_bound():
    """Exact k-run probability is at least the independent-blocks bound."""
    mus = (Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(9, 10))
    failures = 0
    cells = 0
    for m in range(1, 25):
        for k in range(1, m + 1):
            for mu in mus:
                exact = run_probability_exact(m, k, mu)
                bound = consecutive_ones_bound(mu, k, m)
                cells += 1
                if exact < bound:
                    failures += 1
    check(7, failures == 0, f"{cells} exact comparisons, {failures} failures")


def test_criterion_08_segment_hit_fraction_trend():
    """Hit fractions within the square-root-scaled cap, over growing
    lengths, never increase beyond paired confidence radii."""
    ests = [loop_tail_estimate(l, 0.5, 10_000, 8) for l in (4, 9, 16, 25)]
    ok = all(
        b.fraction <= a.fraction + 2 * (a.radius + b.radius)
        for a, b in zip(ests, ests[1:])
    )
    fracs = ", ".join(f"{e.fraction:.4f}" for e in ests)
    check(8, ok, f"fractions at lengths 4/9/16/25: {fracs}")


def test_criterion_09_walker_ball_statistics_forget_the_start():
    """Radius-1 empirical measures from different starts nearly coincide."""
    n = 10**6

    def measure(initial, stream):
        s = simulate_summary(
            BgrwConfig(p=0.5, horizon=n, seed=derive_stream(9, stream), initial=initial),
            measure_radius=1,
            record_series=False,
        )
        return measure_from_summary(s)

    base = measure(InitialTree.single(), 0)
    star = measure(InitialTree.star(10), 1)
    again = measure(InitialTree.single(), 2)
    tv_starts = tv_distance(base, star)
    tv_seeds = tv_distance(base, again)
    ok = tv_starts <= 0.02 and tv_seeds <= 0.01
    check(
        9,
        ok,
        f"TV single-vs-star(10) {tv_starts:.4f} (bound 0.02); "
        f"single cross-seed {tv_seeds:.4f} (bound 0.01)",
    )


def test_criterion_10_canonical_codes_are_exactly_isomorphism():
    """Codes are relabeling-invariant and separate isomorphism classes."""
    mismatches = 0

    # every relabeling of every rooted tree on <= 8 vertices
    for n in range(1, 9):
        for shape in helpers.rooted_shapes(n):
            adj = helpers.shape_to_adjacency(shape)
            base = encode_rooted(adj, 0)
            for perm in permutations(range(n)):
                radj, rroot = helpers.relabel(adj, 0, list(perm))
                if encode_rooted(radj, rroot) != base:
                    mismatches += 1

    # random relabelings of random larger trees
    rng = random.Random(10)
    for _ in range(500):
        size = rng.randint(1, 200)
        adj = helpers.random_rooted_tree(size, rng)
        base = encode_rooted(adj, 0)
        for _ in range(100):
            perm = list(range(size))
            rng.shuffle(perm)
            radj, rroot = helpers.relabel(adj, 0, perm)
            if encode_rooted(radj, rroot) != base:
                mismatches += 1

    # code equality must agree with brute-force rooted isomorphism
    disagreements = 0
    for n in range(1, 9):
        shapes = [helpers.shape_to_adjacency(s) for s in helpers.rooted_shapes(n)]
        codes = [encode_rooted(a, 0) for a in shapes]
        for i in range(len(shapes)):
            perm = list(range(n))
            rng.shuffle(perm)
            radj, rroot = helpers.relabel(shapes[i], 0, perm)
            rcode = encode_rooted(radj, rroot)
            for j in range(i, len(shapes)):
                same_code = rcode == codes[j]
                same_iso = helpers.nx_rooted_isomorphic(radj, rroot, shapes[j], 0)
                if same_code != same_iso:
                    disagreements += 1
    ok = mismatches == 0 and disagreements == 0
    check(
        10,
        ok,
        f"relabeling mismatches={mismatches}, isomorphism disagreements={disagreements}",
    )


def test_criterion_11_degree_and_visit_tails_decay():
    """Both tails are nonincreasing with a clean log-linear decay."""
    summaries = [
        simulate_summary(
            BgrwConfig(p=0.5, horizon=10**5, seed=derive_stream(11, i)), marked=(0,)
        )
        for i in range(100)
    ]
    ks = list(range(3, 13))
    vt = visit_tail(summaries, 0)
    visit_curve = [vt[k] for k in ks]
    degree_curve = degree_tail_curve(summaries, ks)
    ok = nonincreasing(visit_curve) and nonincreasing(degree_curve)
    sv, _, r2v = fit_log_linear(ks, visit_curve)
    sd, _, r2d = fit_log_linear(ks, degree_curve)
    ok = ok and sv < 0 and sd < 0 and r2v >= 0.9 and r2d >= 0.9
    check(
        11,
        ok,
        f"visit slope {sv:.3f} (R2 {r2v:.3f}), degree slope {sd:.3f} (R2 {r2d:.3f})",
    )


def test_criterion_12_corridor_escape_strengthens_with_length():
    """Never-revisit fraction grows with corridor slack; near one when fast."""
    cells = [(8, 4), (12, 4), (20, 4)]
    ests = [
        one_ended_proxy(length, offset, 2 * 10**5, 1000, 0.5, 12_000 + length)
        for length, offset in cells
    ]
    trend_ok = True
    for a, b in zip(ests, ests[1:]):
        if a.fraction is None or b.fraction is None:
            continue  # an unresolved cell cannot witness a decrease
        if b.fraction < a.fraction - 2 * (a.radius + b.radius):
            trend_ok = False
    strong = one_ended_proxy(20, 4, 10**6, 1000, 0.9, 129)
    strong_ok = strong.fraction is not None and strong.fraction > 0.9
    fr = ", ".join("na" if e.fraction is None else f"{e.fraction:.3f}" for e in ests)
    check(
        12,
        trend_ok and strong_ok,
        f"p=0.5 fractions {fr}; p=0.9 (20,4) {strong.fraction}",
    )


def test_criterion_13_distance_milestone_is_almost_sure():
    """Nearly every run crosses log-squared distance within the horizon."""
    n = 10**5
    threshold = math.ceil(math.log(n) ** 2)
    hits = 0
    for i in range(1000):
        s = simulate_summary(
            BgrwConfig(
                p=0.5, horizon=n, seed=derive_stream(13, i), stop_at_distance=threshold
            ),
            record_series=False,
        )
        hits += s.stopped == "distance"
    check(13, hits >= 990, f"{hits}/1000 runs reached distance {threshold}")


def test_criterion_14_tree_height_grows_with_p(tmp_path):
    """Fixed-size grown trees get taller as the growth chance rises."""

    def height(vertices, root, walker, edges):
        adj = [[] for _ in range(vertices)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        depth = [-1] * vertices
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    queue.append(v)
        return max(depth)

    medians = []
    for p in (0.01, 0.1, 0.5, 0.9):
        out = tmp_path / f"fig_{p}"
        cfg = tmp_path / f"fig_{p}.json"
        cfg.write_text(
            json.dumps(
                {
                    "p": p,
                    "stop_vertices": 5000,
                    "seeds": 10,
                    "stride": 100,
                    "master_seed": 14,
                }
            ),
            encoding="utf-8",
        )
        assert cli_main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        heights = [
            height(*parse_tree_dot(out / f"tree_{i}.dot")) for i in range(10)
        ]
        medians.append(float(np.median(heights)))
    ok = all(a < b for a, b in zip(medians, medians[1:]))
    check(14, ok, "median heights at p=0.01/0.1/0.5/0.9: " + str(medians))


def test_criterion_15_outputs_are_byte_deterministic(tmp_path):
    """Same config, same bytes: across reruns and across worker counts."""
    jobs = (
        (
            "simulate",
            {"p": 0.6, "horizon": 2000, "seeds": 4, "stride": 10, "master_seed": 15},
        ),
        (
            "measure",
            {
                "p": 0.5,
                "horizon": 500,
                "radii": [0, 1],
                "seeds": 2,
                "initials": [{"kind": "single"}, {"kind": "star", "arms": 4}],
                "master_seed": 15,
            },
        ),
        (
            "coupling",
            {
                "mode": "coupled",
                "p": 0.5,
                "path_length": 3,
                "horizon": 400,
                "trials": 8,
                "master_seed": 15,
            },
        ),
    )
    ok = True
    for name, cfg_obj in jobs:
        cfg = tmp_path / f"{name}.json"
        cfg.write_text(json.dumps(cfg_obj), encoding="utf-8")
        snapshots = []
        for run, workers in (("a", 1), ("b", 2), ("c", 1)):
            out = tmp_path / f"{name}_{run}"
            code = cli_main(
                [name, "--config", str(cfg), "--out", str(out), "--workers", str(workers)]
            )
            assert code == 0
            snapshots.append(
                {f.name: f.read_bytes() for f in sorted(out.iterdir())}
            )
        ok = ok and snapshots[0] == snapshots[1] == snapshots[2]
    check(15, ok, "simulate, measure, coupling reruns and worker counts compared")
