"""Lorentz-Finsler length of polygonal causal curves and the longest-path distance."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .causal import DEFAULT_SCHEDULE, Digraph, _check_schedule, build_causal_graph
from .geometry import Spacetime

TIE_TOL = 1e-9


class PathError(ValueError):
    """A node sequence that is not a path of the graph."""


@dataclass
class DistanceResult:
    value: float
    witness: tuple[int, ...] | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def path_length(g: Digraph, path: Sequence[int]) -> float:
    """Sum of edge weights along ``path``; a single node has length 0."""
    nodes = [int(v) for v in path]
    if not nodes:
        raise PathError("empty path")
    total = 0.0
    for i, (u, v) in enumerate(zip(nodes, nodes[1:])):
        e = g.edge_id(u, v)
        if e is None:
            raise PathError(f"step {i}: {u} -> {v} is not an edge of the causal graph")
        total += g.weight[e]
    return total


def _longest_from(g: Digraph, source: int) -> np.ndarray:
    """Longest path lengths from ``source``; ``-inf`` where unreachable.

    Acyclic graphs only.
    """
    val = np.full(g.n, -np.inf)
    val[source] = 0.0
    order, bounds = g.level_blocks
    lv = g.levels
    start = lv[source]
    for L in range(start, len(bounds) - 1):
        eids = order[bounds[L]:bounds[L + 1]]
        if not len(eids):
            continue
        s = g.src[eids]
        live = val[s] > -np.inf
        if not live.any():
            continue
        eids = eids[live]
        np.maximum.at(val, g.dst[eids], val[g.src[eids]] + g.weight[eids])
    return val


def _condensed_longest(g: Digraph, source: int) -> np.ndarray:
    """Longest path lengths on a possibly cyclic graph.

    Strongly connected components containing a positive-weight edge make
    everything downstream ``+inf``; zero-weight cycles are harmless.
    """
    ncomp, label = g.components
    inner = label[g.src] == label[g.dst]
    positive = np.zeros(ncomp, dtype=bool)
    positive[label[g.src[inner & (g.weight > 0)]]] = True
    cross = ~inner
    cond = Digraph(ncomp, label[g.src[cross]], label[g.dst[cross]], g.weight[cross])
    val = np.full(ncomp, -np.inf)
    val[label[source]] = 0.0
    order, bounds = cond.level_blocks
    lv = cond.levels
    for L in range(len(bounds) - 1):
        at_level = (lv == L) & positive & (val > -np.inf)
        val[at_level] = np.inf
        eids = order[bounds[L]:bounds[L + 1]]
        if len(eids):
            np.maximum.at(val, cond.dst[eids], val[cond.src[eids]] + cond.weight[eids])
    return val[label]


def _raw_field(g: Digraph, source: int) -> np.ndarray:
    return _longest_from(g, source) if g.acyclic else _condensed_longest(g, source)


def distance_field(g: Digraph, p: int) -> np.ndarray:
    """Longest-path distance from ``p`` to every node; 0 off the future of p."""
    val = _raw_field(g, int(p))
    return np.where(val == -np.inf, 0.0, val)


def distance_to_field(g: Digraph, q: int) -> np.ndarray:
    """``d(., q)`` for every node, via the reversed graph."""
    return distance_field(g.reverse, q)


def _witness(g: Digraph, p: int, q: int, fwd: np.ndarray) -> tuple[int, ...]:
    back = _longest_from(g.reverse, q)
    total = fwd[q]
    tol = TIE_TOL * max(1.0, abs(total))
    path = [p]
    acc = 0.0
    v = p
    while v != q:
        lo, hi = g.indptr[v], g.indptr[v + 1]
        cand = g.dst[lo:hi]
        tot = acc + g.weight[lo:hi] + back[cand]
        ok = np.flatnonzero(np.abs(tot - total) <= tol)
        # successors are sorted, so the first feasible one is lexicographically smallest
        k = lo + ok[0]
        acc += g.weight[k]
        v = int(g.dst[k])
        path.append(v)
    return tuple(path)


def distance(g: Digraph, p: int, q: int, witness: bool = True) -> DistanceResult:
    """Lorentz-Finsler distance d(p, q) as a longest path.

    Returns 0 when q is not in the future of p and ``+inf`` when p reaches q
    through a positive-length cycle.  On acyclic graphs the witness is the
    lexicographically smallest maximising node sequence.
    """
    p, q = int(p), int(q)
    val = _raw_field(g, p)
    v = val[q]
    if v == -np.inf:
        return DistanceResult(0.0, None)
    if not math.isfinite(v) or not witness or not g.acyclic:
        return DistanceResult(float(v), None)
    return DistanceResult(float(v), _witness(g, p, q, val))


def distance_matrix(g: Digraph, sources: Sequence[int], targets: Sequence[int] | None = None,
                    workers: int = 1) -> np.ndarray:
    """``D[i, j] = d(sources[i], targets[j])``, one sweep per source."""
    tg = np.arange(g.n) if targets is None else np.asarray(targets)
    g.level_blocks if g.acyclic else g.components  # warm the caches before threading
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: distance_field(g, s)[tg], sources))
    else:
        rows = [distance_field(g, s)[tg] for s in sources]
    return np.array(rows).reshape(len(sources), len(tg))


def export_distance_table(path, rows: Sequence[tuple[int, int, float]]) -> None:
    """Write ``source,target,value,finite_flag`` rows."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("source,target,value,finite_flag\n")
        for s, t, v in rows:
            fin = math.isfinite(v)
            fh.write(f"{s},{t},{v:.12g},{int(fin)}\n" if fin else f"{s},{t},inf,0\n")


@dataclass
class StableDistance:
    estimate: float
    eps: list[float]
    values: list[float] = field(default_factory=list)

    @property
    def stably_infinite(self) -> bool:
        return all(math.isinf(v) for v in self.values)


def stable_distance(st: Spacetime, p, q, eps_schedule: Sequence[float] = DEFAULT_SCHEDULE,
                    stencil_radius: int = 1) -> StableDistance:
    """Distances ``d_eps(p, q)`` of the widened spacetimes along the schedule.

    The estimate is the value at the smallest eps, an upper bound for the
    stable distance up to discretisation.
    """
    eps = _check_schedule(eps_schedule)
    p, q = st.node(p), st.node(q)
    values = []
    for e in eps:
        ge = build_causal_graph(st.widened(e), stencil_radius)
        values.append(distance(ge, p, q, witness=False).value)
    return StableDistance(values[-1], eps, values)
