"""Experiment runner: JSON-configured subcommands over the simulation core.

    bgrw simulate|sweep|measure|coupling|export --config FILE [--out DIR] [--workers N]

One JSON document per run. Every field has a default (documented in the
per-command schemas below); unknown fields are errors, not warnings. All
numeric parameters are validated before any simulation starts.

Every output file begins with a provenance header carrying the tool version,
a sha256 over the canonical effective config (defaults applied, keys sorted;
the plumbing-only ``out``/``workers`` knobs excluded), and the master seed.
Run i of a command consumes the derived stream i of the master seed, so the
bytes written are independent of the worker count.

Exit codes: 0 success, 1 validation error, 2 runtime/resource error,
3 invariant violation detected by a coupling verdict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import DEFAULT_VERTEX_CAP, BgrwConfig, InitialTree, simulate_summary
from .couplings import block_stopping_times, couple_bgrw_loop, minorant_walk
from .errors import InvariantViolation, ResourceLimitError, ValidationError
from .rng import derive_stream
from .stats import measure_from_summary, speed_estimate, tv_distance

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RESOURCE = 2
EXIT_VIOLATION = 3

# Step budget substituted when a simulate config stops on vertex count alone.
# Ten times the expected steps-to-target; reaching it means the run is
# reported with stopped == "horizon" instead of looping forever.
STOP_BUDGET_CAP = 10_000_000

_REQUIRED = object()


# ---------------------------------------------------------------------------
# Config loading and field validation


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read config {path}: {e.strerror}") from e
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"config {path} is not valid JSON: line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(cfg, dict):
        raise ValidationError(f"config {path} must be a JSON object")
    return cfg


def _check_unknown(cfg: dict, allowed) -> None:
    extra = sorted(set(cfg) - set(allowed))
    if extra:
        raise ValidationError(f"unknown config fields: {', '.join(extra)}")


def _as_int(cfg: dict, name: str, default=_REQUIRED, low=None, high=None):
    if name not in cfg or cfg[name] is None:
        if default is _REQUIRED:
            raise ValidationError(f"{name} is required")
        return default
    v = cfg[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{name} must be an integer")
    if low is not None and v < low:
        raise ValidationError(f"{name} must be >= {low}")
    if high is not None and v > high:
        raise ValidationError(f"{name} must be <= {high}")
    return v


def _as_prob(cfg: dict, name: str, default=_REQUIRED) -> float:
    if name not in cfg:
        if default is _REQUIRED:
            raise ValidationError(f"{name} is required")
        return default
    v = cfg[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{name} must be a number")
    v = float(v)
    if not 0.0 < v <= 1.0:
        raise ValidationError(f"{name} must lie in (0, 1]")
    return v


def _as_str(cfg: dict, name: str, default=_REQUIRED, choices=None) -> str:
    if name not in cfg:
        if default is _REQUIRED:
            raise ValidationError(f"{name} is required")
        return default
    v = cfg[name]
    if not isinstance(v, str):
        raise ValidationError(f"{name} must be a string")
    if choices is not None and v not in choices:
        raise ValidationError(f"{name} must be one of {sorted(choices)}")
    return v


def _as_initial(cfg: dict, name: str, default=None) -> dict:
    """Validate an initial-tree spec and return its normalized JSON form."""
    obj = cfg.get(name)
    if obj is None:
        obj = default if default is not None else {"kind": "single"}
    return InitialTree.from_json(obj).to_json()


def _config_digest(effective: dict) -> str:
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# Output writers. Text mode with explicit newline so bytes match everywhere.


def _header_line(digest: str, master_seed: int) -> str:
    return f"bgrw {__version__} config_sha256={digest} master_seed={master_seed}"


def _provenance_obj(digest: str, master_seed: int) -> dict:
    return {
        "tool": "bgrw",
        "version": __version__,
        "config_sha256": digest,
        "master_seed": master_seed,
    }


def _write_text(path: Path, lines) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _write_csv(path: Path, header: str, columns: str, rows) -> None:
    body = [f"# {header}", columns]
    body.extend(",".join(str(c) for c in row) for row in rows)
    _write_text(path, body)


def write_tree_json(path: Path, tree, master_seed: int, digest: str) -> None:
    vertices, root, walker, edges = tree
    doc = {
        "provenance": _provenance_obj(digest, master_seed),
        "vertices": vertices,
        "root": root,
        "walker": walker,
        "edges": [list(e) for e in sorted(tuple(sorted(e)) for e in edges)],
    }
    _write_text(path, [json.dumps(doc, separators=(", ", ": "))])


def write_tree_dot(path: Path, tree, header: str) -> None:
    vertices, root, walker, edges = tree
    lines = [f"// {header}", "graph tree {"]
    marks = {root: "root"}
    marks[walker] = "root walker" if walker == root else "walker"
    for v in sorted(marks):
        lines.append(f'  {v} [label="{marks[v]}"];')
    for u, v in sorted(tuple(sorted(e)) for e in edges):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    _write_text(path, lines)


# ---------------------------------------------------------------------------
# Tree file parsing (export command)


def _check_tree(vertices, root, walker, edges, where: str):
    if not isinstance(vertices, int) or vertices < 1:
        raise ValidationError(f"{where}: vertices must be a positive integer")
    for name, v in (("root", root), ("walker", walker)):
        if not isinstance(v, int) or not 0 <= v < vertices:
            raise ValidationError(f"{where}: {name} out of range")
    if len(edges) != vertices - 1:
        raise ValidationError(
            f"{where}: expected {vertices - 1} edges for {vertices} vertices, got {len(edges)}"
        )
    parent = list(range(vertices))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        if not (isinstance(u, int) and isinstance(v, int)):
            raise ValidationError(f"{where}: edge endpoints must be integers")
        if not (0 <= u < vertices and 0 <= v < vertices) or u == v:
            raise ValidationError(f"{where}: bad edge ({u}, {v})")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise ValidationError(f"{where}: edge ({u}, {v}) closes a cycle")
        parent[ru] = rv
    return vertices, root, walker, [tuple(sorted(e)) for e in edges]


def parse_tree_json(path: Path):
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"{path}: line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: tree snapshot must be a JSON object")
    _check_unknown(doc, {"provenance", "vertices", "root", "walker", "edges"})
    for key in ("vertices", "root", "walker", "edges"):
        if key not in doc:
            raise ValidationError(f"{path}: missing field {key}")
    edges = doc["edges"]
    if not isinstance(edges, list) or any(
        not isinstance(e, list) or len(e) != 2 for e in edges
    ):
        raise ValidationError(f"{path}: edges must be a list of [u, v] pairs")
    return _check_tree(
        doc["vertices"], doc["root"], doc["walker"], [tuple(e) for e in edges], str(path)
    )


_DOT_NODE = re.compile(r"^(\d+)\s*\[label=\"([^\"]*)\"\]\s*;$")
_DOT_EDGE = re.compile(r"^(\d+)\s*--\s*(\d+)\s*;$")


def parse_tree_dot(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    root = walker = None
    edges: list[tuple[int, int]] = []
    seen_open = seen_close = False
    top = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if seen_close:
            raise ValidationError(f"{path}:{lineno}: content after closing brace")
        if not seen_open:
            if re.fullmatch(r"graph\s*\w*\s*\{", line):
                seen_open = True
                continue
            raise ValidationError(f"{path}:{lineno}: expected 'graph ... {{'")
        if line == "}":
            seen_close = True
            continue
        m = _DOT_NODE.fullmatch(line)
        if m:
            v = int(m.group(1))
            label = m.group(2)
            if "root" in label:
                root = v
            if "walker" in label:
                walker = v
            top = max(top, v)
            continue
        m = _DOT_EDGE.fullmatch(line)
        if m:
            u, v = int(m.group(1)), int(m.group(2))
            edges.append((u, v))
            top = max(top, u, v)
            continue
        raise ValidationError(f"{path}:{lineno}: unrecognized statement {line!r}")
    if not (seen_open and seen_close):
        raise ValidationError(f"{path}: truncated graph block")
    if root is None or walker is None:
        raise ValidationError(f"{path}: root and walker labels are required")
    return _check_tree(top + 1, root, walker, edges, str(path))


# ---------------------------------------------------------------------------
# Worker fan-out. Tasks are (kind, payload) tuples; results come back in task
# order, so the files written downstream never depend on the pool size.


def _task_simulate(payload: dict):
    config = BgrwConfig(
        p=payload["p"],
        horizon=payload["budget"],
        seed=payload["seed"],
        initial=InitialTree.from_json(payload["initial"]),
        max_vertices=payload["max_vertices"],
        stop_at_count=payload["stop_vertices"],
    )
    summary = simulate_summary(config, record_series=True, record_tree=True)
    stride = payload["stride"]
    ticks = list(range(0, summary.steps + 1, stride))
    if ticks[-1] != summary.steps:
        ticks.append(summary.steps)
    rows = [
        (
            t,
            int(summary.distance[t]),
            int(summary.walker_degree[t]),
            int(summary.vertex_count[t]),
        )
        for t in ticks
    ]
    snap = summary.final_tree
    return rows, (snap.vertices, snap.root, snap.walker, snap.edges())


def _task_sweep(payload: dict):
    config = BgrwConfig(
        p=payload["p"],
        horizon=payload["horizon"],
        seed=payload["seed"],
        initial=InitialTree.from_json(payload["initial"]),
        max_vertices=payload["max_vertices"],
    )
    est = speed_estimate(simulate_summary(config, record_series=True))
    return est.endpoint, est.windowed


def _task_measure(payload: dict):
    config = BgrwConfig(
        p=payload["p"],
        horizon=payload["horizon"],
        seed=payload["seed"],
        initial=InitialTree.from_json(payload["initial"]),
        max_vertices=payload["max_vertices"],
    )
    summary = simulate_summary(
        config,
        stride=payload["stride"],
        measure_radius=payload["radius"],
        record_series=False,
    )
    measure = measure_from_summary(summary)
    return {code.hex(): n for code, n in measure.counts.items()}, measure.total


def _task_coupled(payload: dict):
    config = BgrwConfig(
        p=payload["p"], horizon=payload["horizon"], seed=payload["seed"]
    )
    run = couple_bgrw_loop(config, payload["path_length"])
    return (
        run.walk_hit_time,
        run.segment_hit_time,
        run.steps,
        run.walk_path_ticks,
        run.segment_ticks,
        run.uncensored,
        run.hitting_order_ok(),
    )


def _task_minorant(payload: dict):
    config = BgrwConfig(
        p=payload["p"],
        horizon=payload["horizon"],
        seed=payload["seed"],
        initial=InitialTree.from_json(payload["initial"]),
    )
    blocks = block_stopping_times(config, payload["radius"], max_blocks=payload["max_blocks"])
    walk = minorant_walk(blocks, payload["radius"])
    return [
        (b.index, b.time, b.distance, b.tag, m.value, m.scaled, int(m.dominated))
        for b, m in zip(blocks, walk)
    ]


_TASK_FNS = {
    "simulate": _task_simulate,
    "sweep": _task_sweep,
    "measure": _task_measure,
    "coupled": _task_coupled,
    "minorant": _task_minorant,
}


def _run_task(task):
    kind, payload = task
    return _TASK_FNS[kind](payload)


def _fan_out(tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(cfg: dict, out_dir: Path, workers: int) -> int:
    """Per-seed trajectory CSVs plus final-tree JSON and DOT snapshots.

    Fields: p (required), exactly one of horizon / stop_vertices, seeds (1),
    master_seed (0), initial ({"kind": "single"}), stride (1, thins the CSV
    rows; the final step is always kept), max_vertices (cap).
    """
    _check_unknown(
        cfg,
        {"p", "horizon", "stop_vertices", "seeds", "master_seed", "initial",
         "stride", "max_vertices", "out", "workers"},
    )
    p = _as_prob(cfg, "p")
    horizon = _as_int(cfg, "horizon", default=None, low=0)
    stop_vertices = _as_int(cfg, "stop_vertices", default=None, low=1)
    if (horizon is None) == (stop_vertices is None):
        raise ValidationError("exactly one of horizon and stop_vertices is required")
    seeds = _as_int(cfg, "seeds", default=1, low=1)
    master_seed = _as_int(cfg, "master_seed", default=0)
    stride = _as_int(cfg, "stride", default=1, low=1)
    max_vertices = _as_int(cfg, "max_vertices", default=DEFAULT_VERTEX_CAP, low=1)
    initial = _as_initial(cfg, "initial")
    effective = {
        "command": "simulate",
        "p": p,
        "horizon": horizon,
        "stop_vertices": stop_vertices,
        "seeds": seeds,
        "master_seed": master_seed,
        "initial": initial,
        "stride": stride,
        "max_vertices": max_vertices,
    }
    digest = _config_digest(effective)
    header = _header_line(digest, master_seed)
    if stop_vertices is None:
        budget = horizon
    else:
        budget = min(STOP_BUDGET_CAP, max(10_000, math.ceil(10 * stop_vertices / p)))
    tasks = [
        (
            "simulate",
            {
                "p": p,
                "budget": budget,
                "stop_vertices": stop_vertices,
                "seed": derive_stream(master_seed, i),
                "initial": initial,
                "stride": stride,
                "max_vertices": max_vertices,
            },
        )
        for i in range(seeds)
    ]
    for i, (rows, tree) in enumerate(_fan_out(tasks, workers)):
        _write_csv(
            out_dir / f"trajectory_{i}.csv",
            header,
            "t,dist_to_root,walker_degree,vertex_count",
            rows,
        )
        write_tree_json(out_dir / f"tree_{i}.json", tree, master_seed, digest)
        write_tree_dot(out_dir / f"tree_{i}.dot", tree, header)
    return EXIT_OK


def cmd_sweep(cfg: dict, out_dir: Path, workers: int) -> int:
    """Speed estimates over a list of p values: sweep.csv + sweep_summary.csv.

    Fields: p_list (required, nonempty), horizon (required, >= 1), seeds (20),
    master_seed (0), initial ({"kind": "single"}), max_vertices.
    """
    _check_unknown(
        cfg,
        {"p_list", "horizon", "seeds", "master_seed", "initial", "max_vertices",
         "out", "workers"},
    )
    plist = cfg.get("p_list")
    if not isinstance(plist, list) or not plist:
        raise ValidationError("p_list must be a nonempty list of probabilities")
    ps = [_as_prob({"p": v}, "p") for v in plist]
    horizon = _as_int(cfg, "horizon", low=1)
    seeds = _as_int(cfg, "seeds", default=20, low=1)
    master_seed = _as_int(cfg, "master_seed", default=0)
    max_vertices = _as_int(cfg, "max_vertices", default=DEFAULT_VERTEX_CAP, low=1)
    initial = _as_initial(cfg, "initial")
    effective = {
        "command": "sweep",
        "p_list": ps,
        "horizon": horizon,
        "seeds": seeds,
        "master_seed": master_seed,
        "initial": initial,
        "max_vertices": max_vertices,
    }
    digest = _config_digest(effective)
    header = _header_line(digest, master_seed)
    tasks = []
    for pi, p in enumerate(ps):
        for si in range(seeds):
            tasks.append(
                (
                    "sweep",
                    {
                        "p": p,
                        "horizon": horizon,
                        "seed": derive_stream(master_seed, pi * seeds + si),
                        "initial": initial,
                        "max_vertices": max_vertices,
                    },
                )
            )
    results = _fan_out(tasks, workers)
    rows = []
    summary_rows = []
    for pi, p in enumerate(ps):
        block = results[pi * seeds : (pi + 1) * seeds]
        for si, (endpoint, windowed) in enumerate(block):
            rows.append((_fmt(p), si, _fmt(endpoint), _fmt(windowed)))
        endpoints = np.array([b[0] for b in block])
        windows = np.array([b[1] for b in block])
        ddof = 1 if seeds > 1 else 0
        summary_rows.append(
            (
                _fmt(p),
                seeds,
                _fmt(endpoints.mean()),
                _fmt(endpoints.std(ddof=ddof)),
                _fmt(windows.mean()),
                _fmt(windows.std(ddof=ddof)),
            )
        )
    _write_csv(
        out_dir / "sweep.csv",
        header,
        "p,seed_index,speed_endpoint,speed_windowed",
        rows,
    )
    _write_csv(
        out_dir / "sweep_summary.csv",
        header,
        "p,seeds,mean_endpoint,std_endpoint,mean_windowed,std_windowed",
        summary_rows,
    )
    return EXIT_OK


def cmd_measure(cfg: dict, out_dir: Path, workers: int) -> int:
    """Walker-centered ball frequencies as JSONL, one file per initial tree.

    Fields: p (required), horizon (required), radii (required, nonempty),
    initials (list of initial-tree specs, default [{"kind": "single"}]),
    seeds per initial (1), stride (1), master_seed (0), max_vertices.
    Two or more initials additionally produce tv_report.csv with pairwise
    total-variation distances per radius.
    """
    _check_unknown(
        cfg,
        {"p", "horizon", "radii", "initials", "seeds", "stride", "master_seed",
         "max_vertices", "out", "workers"},
    )
    p = _as_prob(cfg, "p")
    horizon = _as_int(cfg, "horizon", low=0)
    radii = cfg.get("radii")
    if not isinstance(radii, list) or not radii:
        raise ValidationError("radii must be a nonempty list")
    for r in radii:
        if isinstance(r, bool) or not isinstance(r, int) or r < 0:
            raise ValidationError("radii entries must be integers >= 0")
    seeds = _as_int(cfg, "seeds", default=1, low=1)
    stride = _as_int(cfg, "stride", default=1, low=1)
    master_seed = _as_int(cfg, "master_seed", default=0)
    max_vertices = _as_int(cfg, "max_vertices", default=DEFAULT_VERTEX_CAP, low=1)
    raw_initials = cfg.get("initials", [{"kind": "single"}])
    if not isinstance(raw_initials, list) or not raw_initials:
        raise ValidationError("initials must be a nonempty list of tree specs")
    initials = [_as_initial({"initial": obj}, "initial") for obj in raw_initials]
    effective = {
        "command": "measure",
        "p": p,
        "horizon": horizon,
        "radii": radii,
        "initials": initials,
        "seeds": seeds,
        "stride": stride,
        "master_seed": master_seed,
        "max_vertices": max_vertices,
    }
    digest = _config_digest(effective)
    tasks = []
    for ii, initial in enumerate(initials):
        for ri, radius in enumerate(radii):
            for si in range(seeds):
                index = (ii * len(radii) + ri) * seeds + si
                tasks.append(
                    (
                        "measure",
                        {
                            "p": p,
                            "horizon": horizon,
                            "seed": derive_stream(master_seed, index),
                            "initial": initial,
                            "radius": radius,
                            "stride": stride,
                            "max_vertices": max_vertices,
                        },
                    )
                )
    results = _fan_out(tasks, workers)
    merged: dict[tuple[int, int], dict[str, int]] = {}
    totals: dict[tuple[int, int], int] = {}
    pos = 0
    for ii in range(len(initials)):
        for ri in range(len(radii)):
            counts: dict[str, int] = {}
            total = 0
            for _ in range(seeds):
                part, subtotal = results[pos]
                pos += 1
                for code, n in part.items():
                    counts[code] = counts.get(code, 0) + n
                total += subtotal
            merged[ii, ri] = counts
            totals[ii, ri] = total
    for ii in range(len(initials)):
        lines = [
            json.dumps({"provenance": _provenance_obj(digest, master_seed)})
        ]
        for ri, radius in enumerate(radii):
            counts, total = merged[ii, ri], totals[ii, ri]
            for code in sorted(counts):
                lines.append(
                    json.dumps(
                        {
                            "radius": radius,
                            "canonical_code": code,
                            "count": counts[code],
                            "frequency": counts[code] / total,
                        }
                    )
                )
        _write_text(out_dir / f"measure_{ii}.jsonl", lines)
    if len(initials) > 1:
        from .stats import EmpiricalMeasure

        rows = []
        for ri, radius in enumerate(radii):
            for a in range(len(initials)):
                for b in range(a + 1, len(initials)):
                    ma = EmpiricalMeasure(radius)
                    for code, n in merged[a, ri].items():
                        ma.add(bytes.fromhex(code), n)
                    mb = EmpiricalMeasure(radius)
                    for code, n in merged[b, ri].items():
                        mb.add(bytes.fromhex(code), n)
                    rows.append((radius, a, b, _fmt(tv_distance(ma, mb))))
        _write_csv(
            out_dir / "tv_report.csv",
            _header_line(digest, master_seed),
            "radius,initial_a,initial_b,tv",
            rows,
        )
    return EXIT_OK


def cmd_coupling(cfg: dict, out_dir: Path, workers: int) -> int:
    """Path-wise invariant checks; a nonzero violation count exits with 3.

    mode="coupled": trials coupled runs (fields p, path_length, horizon)
    write coupled_runs.csv; the verdict counts hitting-order violations
    among uncensored pairs. mode="minorant": trials trajectories (fields
    p, radius, horizon, initial, max_blocks) write blocks.csv; the verdict
    counts blocks whose distance drops below radius times the minorant.
    """
    mode = _as_str(cfg, "mode", choices={"coupled", "minorant"})
    common = {"mode", "p", "horizon", "trials", "master_seed", "out", "workers"}
    p = _as_prob(cfg, "p")
    horizon = _as_int(cfg, "horizon", low=1)
    trials = _as_int(cfg, "trials", low=1)
    master_seed = _as_int(cfg, "master_seed", default=0)

    if mode == "coupled":
        _check_unknown(cfg, common | {"path_length"})
        path_length = _as_int(cfg, "path_length", low=1)
        effective = {
            "command": "coupling",
            "mode": mode,
            "p": p,
            "path_length": path_length,
            "horizon": horizon,
            "trials": trials,
            "master_seed": master_seed,
        }
        digest = _config_digest(effective)
        header = _header_line(digest, master_seed)
        tasks = [
            (
                "coupled",
                {
                    "p": p,
                    "horizon": horizon,
                    "path_length": path_length,
                    "seed": derive_stream(master_seed, i),
                },
            )
            for i in range(trials)
        ]
        results = _fan_out(tasks, workers)
        rows = []
        uncensored = violations = 0
        for i, (walk_hit, seg_hit, steps, wticks, sticks, unc, ok) in enumerate(results):
            rows.append(
                (
                    i,
                    -1 if walk_hit is None else walk_hit,
                    -1 if seg_hit is None else seg_hit,
                    steps,
                    wticks,
                    sticks,
                    int(unc),
                    int(ok),
                )
            )
            if unc:
                uncensored += 1
                if not ok:
                    violations += 1
        _write_csv(
            out_dir / "coupled_runs.csv",
            header,
            "run,walk_hit,segment_hit,steps,walk_path_ticks,segment_ticks,uncensored,order_ok",
            rows,
        )
        _write_text(
            out_dir / "verdict.txt",
            [
                f"# {header}",
                f"coupled-order runs={trials} uncensored={uncensored} violations={violations}",
            ],
        )
        return EXIT_VIOLATION if violations else EXIT_OK

    _check_unknown(cfg, common | {"radius", "initial", "max_blocks"})
    radius = _as_int(cfg, "radius", low=1)
    max_blocks = _as_int(cfg, "max_blocks", default=None, low=1)
    initial = _as_initial(cfg, "initial")
    effective = {
        "command": "coupling",
        "mode": mode,
        "p": p,
        "radius": radius,
        "horizon": horizon,
        "trials": trials,
        "master_seed": master_seed,
        "initial": initial,
        "max_blocks": max_blocks,
    }
    digest = _config_digest(effective)
    header = _header_line(digest, master_seed)
    tasks = [
        (
            "minorant",
            {
                "p": p,
                "horizon": horizon,
                "radius": radius,
                "initial": initial,
                "max_blocks": max_blocks,
                "seed": derive_stream(master_seed, i),
            },
        )
        for i in range(trials)
    ]
    results = _fan_out(tasks, workers)
    rows = []
    blocks = violations = ups = closed = 0
    for i, per_seed in enumerate(results):
        for index, time, distance, tag, value, scaled, dominated in per_seed:
            rows.append((i, index, time, distance, tag, value, scaled, dominated))
            blocks += 1
            if not dominated:
                violations += 1
            if tag != "start":
                closed += 1
                ups += tag == "up"
    q_hat = _fmt(ups / closed) if closed else "nan"
    _write_csv(
        out_dir / "blocks.csv",
        header,
        "run,block,time,distance,tag,minorant,scaled,dominated",
        rows,
    )
    _write_text(
        out_dir / "verdict.txt",
        [
            f"# {header}",
            f"minorant-domination trajectories={trials} blocks={blocks} "
            f"violations={violations} up_fraction={q_hat}",
        ],
    )
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_export(cfg: dict, out_dir: Path, workers: int) -> int:
    """Convert a tree snapshot between the JSON schema and DOT.

    Fields: input (required path; format inferred from the .json/.dot
    suffix), to ("json" or "dot", required), output (path, default: the
    input basename with the target suffix, inside the output directory).
    """
    _check_unknown(cfg, {"input", "to", "output", "out", "workers"})
    src = Path(_as_str(cfg, "input"))
    to = _as_str(cfg, "to", choices={"json", "dot"})
    suffix = src.suffix.lower()
    if suffix == ".json":
        tree = parse_tree_json(src)
    elif suffix in (".dot", ".gv"):
        tree = parse_tree_dot(src)
    else:
        raise ValidationError(f"cannot infer tree format from suffix {suffix!r}")
    out_name = cfg.get("output")
    if out_name is not None and not isinstance(out_name, str):
        raise ValidationError("output must be a path string")
    dest = Path(out_name) if out_name else out_dir / (src.stem + "." + to)
    effective = {"command": "export", "input": str(src), "to": to}
    digest = _config_digest(effective)
    header = _header_line(digest, 0)
    if to == "json":
        write_tree_json(dest, tree, 0, digest)
    else:
        write_tree_dot(dest, tree, header)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point


_DISPATCH = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "measure": cmd_measure,
    "coupling": cmd_coupling,
    "export": cmd_export,
}


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are validation errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bgrw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _DISPATCH:
        sp = sub.add_parser(name, help=f"run the {name} command")
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=None, help="worker processes")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _load_config(args.config)
        out_dir = Path(
            args.out
            or cfg.get("out")
            or os.environ.get("BGRW_OUT_DIR")
            or "."
        )
        workers = args.workers if args.workers is not None else cfg.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise ValidationError("workers must be an integer >= 1")
        return _DISPATCH[args.command](cfg, out_dir, workers)
    except ValidationError as e:
        sys.stderr.write(f"bgrw: validation error: {e}\n")
        return EXIT_VALIDATION
    except ResourceLimitError as e:
        sys.stderr.write(f"bgrw: resource limit: {e}\n")
        return EXIT_RESOURCE
    except OSError as e:
        sys.stderr.write(f"bgrw: i/o error: {e}\n")
        return EXIT_RESOURCE
    except InvariantViolation as e:
        sys.stderr.write(f"bgrw: invariant violation: {e}\n")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
