"""Causal graphs on gridded spacetimes: reachability, cycles, Seifert relation."""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .geometry import Spacetime, contains_many, finsler_many

DEFAULT_SCHEDULE = tuple(0.2 * 2.0 ** -k for k in range(6))


class CausalityError(RuntimeError):
    """A graph that has to be acyclic contains a directed cycle."""

    def __init__(self, message: str, cycle: Sequence[int] = ()):
        super().__init__(message)
        self.cycle = list(cycle)


class Digraph:
    """Directed graph stored as edge arrays sorted by (src, dst).

    ``weight`` is the per-edge length; it is zero for graphs that only carry
    causal information (product graphs).
    """

    def __init__(self, n: int, src, dst, weight=None):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        w = np.zeros(len(src)) if weight is None else np.asarray(weight, dtype=float)
        order = np.lexsort((dst, src))
        self.n = int(n)
        self.src, self.dst, self.weight = src[order], dst[order], w[order]
        self.indptr = np.searchsorted(self.src, np.arange(self.n + 1))
        self._perm = order

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def successors(self, v: int) -> np.ndarray:
        return self.dst[self.indptr[v]:self.indptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int | None:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        k = lo + int(np.searchsorted(self.dst[lo:hi], v))
        if k < hi and self.dst[k] == v:
            return k
        return None

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((np.ones(self.n_edges, dtype=np.int8), (self.src, self.dst)),
                                 shape=(self.n, self.n))

    @cached_property
    def reverse(self) -> "Digraph":
        return Digraph(self.n, self.dst, self.src, self.weight)

    @cached_property
    def levels(self) -> np.ndarray | None:
        """Longest hop count from a source node, or None when cyclic."""
        indeg = np.bincount(self.dst, minlength=self.n)
        level = np.zeros(self.n, dtype=np.int64)
        frontier = np.flatnonzero(indeg == 0)
        seen = 0
        while len(frontier):
            seen += len(frontier)
            starts, ends = self.indptr[frontier], self.indptr[frontier + 1]
            counts = ends - starts
            if counts.sum() == 0:
                break
            eids = np.repeat(starts - np.cumsum(np.r_[0, counts[:-1]]), counts) + np.arange(counts.sum())
            targets = self.dst[eids]
            np.maximum.at(level, targets, np.repeat(level[frontier], counts) + 1)
            np.subtract.at(indeg, targets, 1)
            cand = np.unique(targets)
            frontier = cand[indeg[cand] == 0]
        return level if seen == self.n else None

    @property
    def acyclic(self) -> bool:
        return self.levels is not None

    @cached_property
    def topological_order(self) -> np.ndarray | None:
        lv = self.levels
        return None if lv is None else np.lexsort((np.arange(self.n), lv))

    @cached_property
    def level_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge ids sorted by level of their source, plus block boundaries."""
        lv = self.levels
        if lv is None:
            raise CausalityError("graph is cyclic", find_cycle(self))
        elv = lv[self.src]
        order = np.argsort(elv, kind="stable")
        bounds = np.searchsorted(elv[order], np.arange(lv.max() + 2))
        return order, bounds

    @cached_property
    def components(self) -> tuple[int, np.ndarray]:
        return csgraph.connected_components(self.csr, directed=True, connection="strong")


class CausalGraph(Digraph):
    """Stencil graph of a spacetime: edge ``p -> q`` iff the displacement lies
    in the cone at ``p``; the weight is F at ``p`` on that displacement."""

    def __init__(self, spacetime: Spacetime, stencil_radius: int, src, dst, disp, weight):
        super().__init__(spacetime.n_nodes, src, dst, weight)
        self.spacetime = spacetime
        self.stencil_radius = stencil_radius
        self.disp = np.asarray(disp, dtype=float).reshape(-1, spacetime.ndim)[self._perm]

    def __repr__(self) -> str:
        return (f"CausalGraph({self.spacetime.name}, nodes={self.n}, edges={self.n_edges}, "
                f"radius={self.stencil_radius})")


def primitive_offsets(ndim: int, radius: int) -> np.ndarray:
    """Nonzero integer offsets of max-norm <= radius whose entries have gcd 1."""
    rng = np.arange(-radius, radius + 1)
    grid = np.array(np.meshgrid(*[rng] * ndim, indexing="ij")).reshape(ndim, -1).T
    g = np.gcd.reduce(np.abs(grid), axis=1)
    return grid[g == 1]


def build_causal_graph(st: Spacetime, stencil_radius: int = 1) -> CausalGraph:
    if stencil_radius < 1:
        raise ValueError("stencil_radius must be >= 1")
    offsets = primitive_offsets(st.ndim, stencil_radius)
    disp = offsets * np.asarray(st.spacing)
    dims = np.asarray(st.dims)
    multi = np.array(np.unravel_index(np.arange(st.n_nodes), st.dims)).T
    periodic = np.asarray(st.periodic)
    S, D, Y, W = [], [], [], []
    for fid, (cone, F) in enumerate(st.fields):
        nodes = np.flatnonzero(st.field_index == fid)
        if not len(nodes):
            continue
        ok = contains_many(cone, disp)
        w_all = np.zeros(len(disp))
        w_all[ok] = finsler_many(F, disp[ok])
        for k in np.flatnonzero(ok):
            tgt = multi[nodes] + offsets[k]
            wrapped = np.where(periodic, tgt % dims, tgt)
            inside = np.all((wrapped >= 0) & (wrapped < dims), axis=1)
            q = np.ravel_multi_index(wrapped[inside].T, st.dims)
            p = nodes[inside]
            S.append(p)
            D.append(q)
            Y.append(np.broadcast_to(disp[k], (len(p), st.ndim)))
            W.append(np.full(len(p), w_all[k]))
    if S:
        src, dst = np.concatenate(S), np.concatenate(D)
        Y, W = np.concatenate(Y), np.concatenate(W)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        Y, W = np.zeros((0, st.ndim)), np.zeros(0)
    keep = src != dst
    src, dst, Y, W = src[keep], dst[keep], Y[keep], W[keep]
    # wrapped offsets may hit the same target twice; keep the longest edge
    order = np.lexsort((-W, dst, src))
    src, dst, Y, W = src[order], dst[order], Y[order], W[order]
    first = np.ones(len(src), dtype=bool)
    first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
    if not first.any():
        warnings.warn(f"stencil radius {stencil_radius} produces an empty causal graph", RuntimeWarning)
    return CausalGraph(st, stencil_radius, src[first], dst[first], Y[first], W[first])


# ---------------------------------------------------------------------------
# reachability
# ---------------------------------------------------------------------------

def future(g: Digraph, p: int) -> np.ndarray:
    """Sorted nodes reachable from ``p`` (``p`` included)."""
    return np.sort(csgraph.breadth_first_order(g.csr, int(p), directed=True,
                                               return_predecessors=False))


def past(g: Digraph, p: int) -> np.ndarray:
    return future(g.reverse, p)


def _dag_closure(n: int, indptr, dst, order) -> np.ndarray:
    nbytes = (n + 7) // 8
    bits = np.zeros((n, nbytes), dtype=np.uint8)
    own = np.arange(n)
    bits[own, own >> 3] = (1 << (7 - (own & 7))).astype(np.uint8)
    for v in order[::-1]:
        succ = dst[indptr[v]:indptr[v + 1]]
        if len(succ):
            bits[v] |= np.bitwise_or.reduce(bits[succ], axis=0)
    return np.unpackbits(bits, axis=1, count=n).astype(bool)


def reachability(g: Digraph) -> np.ndarray:
    """Dense boolean matrix ``R[p, q]`` = q is reachable from p (reflexive)."""
    if g.acyclic:
        return _dag_closure(g.n, g.indptr, g.dst, g.topological_order)
    ncomp, label = g.components
    cs, cd = label[g.src], label[g.dst]
    keep = cs != cd
    cond = Digraph(ncomp, cs[keep], cd[keep])
    Rc = _dag_closure(ncomp, cond.indptr, cond.dst, cond.topological_order)
    return Rc[np.ix_(label, label)]


class Relation:
    """A reflexive binary relation on the nodes of a graph, as a boolean matrix."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("relation matrix must be square")
        self.matrix = m

    @classmethod
    def of_graph(cls, g: Digraph) -> "Relation":
        return cls(reachability(g))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __contains__(self, pair) -> bool:
        p, q = pair
        return bool(self.matrix[p, q])

    def __and__(self, other: "Relation") -> "Relation":
        return Relation(self.matrix & other.matrix)

    def __le__(self, other: "Relation") -> bool:
        return not np.any(self.matrix & ~other.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, Relation) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def pairs(self) -> np.ndarray:
        return np.argwhere(self.matrix)

    def difference(self, other: "Relation") -> np.ndarray:
        return np.argwhere(self.matrix & ~other.matrix)

    def export(self, path, pair_list_limit: int = 400) -> None:
        """Pair list ``source,target`` for small relations, otherwise one line
        per source: ``source: t1 t2 ...``."""
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            if self.n <= pair_list_limit:
                fh.write("source,target\n")
                for p, q in self.pairs():
                    fh.write(f"{p},{q}\n")
            else:
                for p in range(self.n):
                    fh.write(f"{p}: " + " ".join(map(str, np.flatnonzero(self.matrix[p]))) + "\n")


# ---------------------------------------------------------------------------
# cycles and causality conditions
# ---------------------------------------------------------------------------

def find_cycle(g: Digraph) -> list[int] | None:
    """A shortest directed cycle through the smallest node lying on any cycle."""
    if g.acyclic:
        return None
    ncomp, label = g.components
    sizes = np.bincount(label, minlength=ncomp)
    on_cycle = np.flatnonzero(sizes[label] > 1)
    start = int(on_cycle[0])
    parent = {start: -1}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in g.successors(v):
            u = int(u)
            if u == start:
                cycle = [v]
                while parent[cycle[-1]] != -1:
                    cycle.append(parent[cycle[-1]])
                return cycle[::-1] + [start]
            if u not in parent:
                parent[u] = v
                queue.append(u)
    raise AssertionError("cycle search failed on a cyclic graph")


def is_causal(g: Digraph) -> tuple[bool, list[int] | None]:
    """``(True, None)`` for acyclic graphs, else ``(False, witness_cycle)``.

    The witness is a closed node list (first node repeated at the end).
    """
    if g.acyclic:
        return True, None
    return False, find_cycle(g)


def _check_schedule(eps_schedule: Sequence[float]) -> list[float]:
    eps = [float(e) for e in eps_schedule]
    if not eps:
        raise ValueError("eps schedule is empty")
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing positive reals")
    return eps


@dataclass
class SeifertResult:
    relation: Relation
    eps: list[float]
    cyclic: list[bool]
    converged: bool
    stably_causal: bool
    base_causal: bool

    @property
    def not_stably_causal(self) -> bool:
        return not self.stably_causal


def seifert_relation(st: Spacetime, eps_schedule: Sequence[float] = DEFAULT_SCHEDULE,
                     stencil_radius: int = 1,
                     graph_builder: Callable[[Spacetime], Digraph] | None = None) -> SeifertResult:
    """Intersection of the causal relations of the widened spacetimes.

    ``converged`` is False when the last two schedule steps disagree on a
    pair.  ``stably_causal`` is False when no widened graph is acyclic.
    """
    eps = _check_schedule(eps_schedule)
    build = graph_builder or (lambda s: build_causal_graph(s, stencil_radius))
    base_causal = build(st).acyclic
    rel = None
    last = []
    cyclic = []
    for e in eps:
        ge = build(st.widened(e))
        cyclic.append(not ge.acyclic)
        r = Relation.of_graph(ge)
        rel = r if rel is None else rel & r
        last.append(r)
    converged = len(last) < 2 or last[-1] == last[-2]
    return SeifertResult(rel, eps, cyclic, converged, not all(cyclic), base_causal)


def is_stably_causal(st: Spacetime, eps_schedule: Sequence[float] = DEFAULT_SCHEDULE,
                     stencil_radius: int = 1) -> bool:
    """True iff some widened graph of the schedule is acyclic."""
    eps = _check_schedule(eps_schedule)
    # widened graphs nest, so the smallest eps decides
    return build_causal_graph(st.widened(eps[-1]), stencil_radius).acyclic


def tilt_sweep(omegas: Iterable[float], stencil_radius: int = 1, **params) -> list[tuple[float, bool]]:
    """Causality of ``tilted_cones`` for each tilt rate (ascending order)."""
    from .geometry import builtin_spacetime

    out = []
    for w in sorted(omegas):
        g = build_causal_graph(builtin_spacetime("tilted_cones", omega=w, **params), stencil_radius)
        out.append((w, g.acyclic))
    return out


def transition_is_monotone(sweep: Sequence[tuple[float, bool]]) -> bool:
    flags = [c for _, c in sweep]
    return all(a >= b for a, b in zip(flags, flags[1:]))
