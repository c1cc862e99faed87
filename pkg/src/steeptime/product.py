"""The product trick: the spacetime as a cone structure on M x R.

A product node is a pair ``(p, k)`` of a base node and a fiber level, with
flat index ``p * fiber_levels + k`` and fiber coordinate ``origin + k * spacing``.
The future fiber direction points *down*: ``(p, k) -> (p, k - 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .causal import (DEFAULT_SCHEDULE, CausalGraph, Digraph, _check_schedule,
                     build_causal_graph, seifert_relation)
from .distance import distance_field, path_length
from .geometry import ConeSpec, FinslerSpec, Spacetime, contains_many, finsler_many

QUANT_TOL = 1e-9


def lift_cone_down(cone: ConeSpec, F: FinslerSpec) -> Callable[[np.ndarray, float], bool]:
    """Membership predicate of ``{(y, z): y in C u {0}, z <= F(y)} minus (0, 0)``."""

    def member(y, z) -> bool:
        y = np.asarray(y, dtype=float)
        if not np.any(y):
            return bool(z < 0)
        if not contains_many(cone, y[None, :])[0]:
            return False
        return bool(z <= finsler_many(F, y[None, :])[0] + QUANT_TOL)

    return member


def lift_cone_sym(cone: ConeSpec, F: FinslerSpec) -> Callable[[np.ndarray, float], bool]:
    """Membership predicate of ``{(y, z): y in C, |z| <= F(y)}``."""

    def member(y, z) -> bool:
        y = np.asarray(y, dtype=float)
        if not np.any(y) or not contains_many(cone, y[None, :])[0]:
            return False
        return bool(abs(z) <= finsler_many(F, y[None, :])[0] + QUANT_TOL)

    return member


@dataclass
class LiftedPath:
    nodes: tuple[int, ...]
    fiber: np.ndarray


def lift_curve(g: Digraph, path: Sequence[int]) -> LiftedPath:
    """Attach the running length as fiber coordinate to a base path."""
    nodes = tuple(int(v) for v in path)
    steps = [path_length(g, nodes[i:i + 2]) for i in range(len(nodes) - 1)]
    return LiftedPath(nodes, np.concatenate([[0.0], np.cumsum(steps)]))


class ProductSpacetime(Digraph):
    """Causal graph on (base node, fiber level) pairs.

    Edges: ``(p, k) -> (p, k - 1)`` for every p and k >= 1, and
    ``(p, k) -> (q, k')`` for every base edge p -> q of length F and every
    ``k'`` with ``(k' - k) * spacing <= F``.  Lengths are quantised down to
    multiples of the fiber spacing.
    """

    def __init__(self, base: CausalGraph, levels: int, spacing: float, origin: float | None = None):
        if levels < 2:
            raise ValueError("need at least 2 fiber levels")
        if not spacing > 0:
            raise ValueError("fiber spacing must be positive")
        K = int(levels)
        self.base = base
        self.fiber_levels = K
        self.spacing = float(spacing)
        self.origin = -(K - 1) / 2 * self.spacing if origin is None else float(origin)
        nb = base.n
        lift = np.floor(base.weight / self.spacing + QUANT_TOL).astype(np.int64)
        S, D = [], []
        # fiber-down edges
        p = np.repeat(np.arange(nb), K - 1)
        k = np.tile(np.arange(1, K), nb)
        S.append(p * K + k)
        D.append(p * K + k - 1)
        # base-moving edges, every allowed target level
        truncated = 0
        for k0 in range(K):
            top = k0 + lift
            truncated += int(np.sum(top > K - 1))
            top = np.minimum(top, K - 1)
            valid = top >= 0
            counts = np.where(valid, top + 1, 0)
            eid = np.repeat(np.arange(base.n_edges), counts)
            kk = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
            S.append(base.src[eid] * K + k0)
            D.append(base.dst[eid] * K + kk)
        self.truncated_edges = truncated
        self.lift = lift
        super().__init__(nb * K, np.concatenate(S), np.concatenate(D))

    @property
    def spacetime(self) -> Spacetime:
        return self.base.spacetime

    def node(self, p: int, k: int) -> int:
        return int(p) * self.fiber_levels + int(k)

    def split(self, nodes) -> tuple[np.ndarray, np.ndarray]:
        nodes = np.asarray(nodes)
        return nodes // self.fiber_levels, nodes % self.fiber_levels

    def fiber_coordinate(self, k) -> np.ndarray:
        return self.origin + np.asarray(k) * self.spacing

    def __repr__(self) -> str:
        return (f"ProductSpacetime(base={self.spacetime.name}, base_nodes={self.base.n}, "
                f"fiber_levels={self.fiber_levels}, spacing={self.spacing}, edges={self.n_edges})")


def build_product_graph(st: Spacetime, fiber_levels: int, fiber_spacing: float,
                        stencil_radius: int = 1, origin: float | None = None) -> ProductSpacetime:
    return ProductSpacetime(build_causal_graph(st, stencil_radius), fiber_levels, fiber_spacing, origin)


# ---------------------------------------------------------------------------
# J_S of the product versus (J_S, D) of the base
# ---------------------------------------------------------------------------

class BudgetExceeded(ValueError):
    pass


@dataclass
class VyvReport:
    product_nodes: int
    left_size: int
    right_size: int
    only_left: list[tuple[int, int, int, int]]
    only_right: list[tuple[int, int, int, int]]
    beyond_quantum: list[tuple[int, int, int, int]]
    fiber_spacing: float
    quantum_slack: float
    truncated_edges: int
    eps: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.beyond_quantum

    def to_text(self) -> str:
        lines = [
            "verify_vyv report",
            f"product_nodes = {self.product_nodes}",
            f"eps_schedule = {', '.join(f'{e:.6g}' for e in self.eps)}",
            f"fiber_spacing = {self.fiber_spacing:.6g}",
            f"left_size (product Seifert) = {self.left_size}",
            f"right_size (base J_S with r'-r <= D) = {self.right_size}",
            f"symmetric_difference = {len(self.only_left) + len(self.only_right)}",
            f"beyond_one_quantum = {len(self.beyond_quantum)}",
            f"quantization_slack_used = {self.quantum_slack:.6g}",
            f"truncated_edges = {self.truncated_edges}",
            f"status = {'PASS' if self.passed else 'FAIL'}",
        ]
        for tag, rows in (("only_left", self.only_left), ("only_right", self.only_right)):
            for p, k, q, k2 in rows:
                lines.append(f"{tag}: ({p},{k}) -> ({q},{k2})")
        return "\n".join(lines) + "\n"


def verify_vyv(st: Spacetime, fiber_levels: int = 7, fiber_spacing: float = 1.0,
               eps_schedule: Sequence[float] = DEFAULT_SCHEDULE, stencil_radius: int = 1,
               budget: int = 5000) -> VyvReport:
    """Compare the Seifert relation of the product with
    ``{((p, r), (p', r')): (p, p') in J_S, r' - r <= D(p, p')}``.

    Both sides are computed independently: the left from product graphs of
    the widened base, the right from the base Seifert relation and the
    stable distance of every base pair.
    """
    eps = _check_schedule(eps_schedule)
    K = int(fiber_levels)
    n_prod = st.n_nodes * K
    if n_prod > budget:
        raise BudgetExceeded(
            f"{n_prod} product nodes exceed the brute-force budget {budget}; "
            f"use at most {budget // K} base nodes with {K} fiber levels")

    left = seifert_relation(st, eps, graph_builder=lambda s: ProductSpacetime(
        build_causal_graph(s, stencil_radius), K, fiber_spacing)).relation

    base_js = seifert_relation(st, eps, stencil_radius).relation
    nb = st.n_nodes
    # stable distance for all base pairs: one field per source per eps
    D = None
    for e in eps:
        ge = build_causal_graph(st.widened(e), stencil_radius)
        De = np.array([distance_field(ge, p) for p in range(nb)])
        D = De if D is None else np.minimum(D, De)
    k = np.arange(K)
    dk = (k[None, :] - k[:, None]) * fiber_spacing          # r' - r, indexed [k, k']
    right4 = base_js.matrix[:, None, :, None] & (dk[None, :, None, :] <= D[:, None, :, None] + QUANT_TOL)
    right = right4.reshape(n_prod, n_prod)
    # reflexivity of the right side is automatic: D(p, p) = 0 and r' = r

    L = left.matrix
    only_l = np.argwhere(L & ~right)
    only_r = np.argwhere(right & ~L)

    def unpack(rows):
        return [(int(a // K), int(a % K), int(b // K), int(b % K)) for a, b in rows]

    ol, orr = unpack(only_l), unpack(only_r)
    beyond = []
    slack = 0.0
    for p, kp, q, kq in ol + orr:
        miss = abs((kq - kp) * fiber_spacing - D[p, q]) if base_js.matrix[p, q] else math.inf
        slack = max(slack, miss)
        if miss > fiber_spacing + QUANT_TOL:
            beyond.append((p, kp, q, kq))
    pg = ProductSpacetime(build_causal_graph(st, stencil_radius), K, fiber_spacing)
    return VyvReport(n_prod, len(left), int(right.sum()), ol, orr, beyond,
                     float(fiber_spacing), slack, pg.truncated_edges, eps)
