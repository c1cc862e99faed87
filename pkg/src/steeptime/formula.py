"""Numerical checks of the distance formula, order representation and topology separation."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .causal import DEFAULT_SCHEDULE, CausalGraph, Relation
from .distance import distance_field, stable_distance
from .geometry import Spacetime
from .timefn import (FrancoContext, Measure, SteepFamily, default_fiber_spacing,
                     franco_for_pair, is_steep, linear_separator, volume_function)

ROUND_TOL = 1e-9


def _scale(values: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0


# ---------------------------------------------------------------------------
# distance formula
# ---------------------------------------------------------------------------

@dataclass
class FormulaRecord:
    p: int
    q: int
    d: float
    D_estimate: float | None
    infimum: float
    gap: float
    tol: float
    best_member: int

    @property
    def sound(self) -> bool:
        return self.gap >= -ROUND_TOL * max(1.0, abs(self.d))

    @property
    def within_tol(self) -> bool:
        return self.gap <= self.tol


@dataclass
class FormulaReport:
    records: list[FormulaRecord]
    rel_tol: float
    spacing_tol: float
    quantum: float
    family_size: int

    @property
    def sound(self) -> bool:
        """The one-sided bound ``infimum >= d``; never allowed to fail."""
        return all(r.sound for r in self.records)

    @property
    def passed(self) -> bool:
        return self.sound and all(r.within_tol for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else (1 if self.sound else 4)

    def to_text(self) -> str:
        gaps = np.array([r.gap for r in self.records]) if self.records else np.zeros(1)
        lines = [
            "distance formula report",
            f"pairs = {len(self.records)}",
            f"family_size = {self.family_size}",
            f"tolerance = {self.rel_tol:g}*d + {self.spacing_tol:.6g} + {self.quantum:.6g}",
            f"max_gap = {gaps.max():.9f}",
            f"min_gap = {gaps.min():.9f}",
            f"mean_gap = {gaps.mean():.9f}",
            f"one_sided_violations = {sum(not r.sound for r in self.records)}",
            f"tolerance_violations = {sum(not r.within_tol for r in self.records)}",
            f"status = {'PASS' if self.passed else ('SOFT-FAIL' if self.sound else 'FAIL')}",
        ]
        for r in self.records:
            D = "-" if r.D_estimate is None else f"{r.D_estimate:.9f}"
            lines.append(f"pair {r.p} -> {r.q}: d={r.d:.9f} D={D} inf={r.infimum:.9f} "
                         f"gap={r.gap:.9f} tol={r.tol:.6f} member={r.best_member}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("p,q,d,D_estimate,infimum,gap,tol,best_member\n")
            for r in self.records:
                D = "" if r.D_estimate is None else f"{r.D_estimate:.12g}"
                fh.write(f"{r.p},{r.q},{r.d:.12g},{D},{r.infimum:.12g},{r.gap:.12g},"
                         f"{r.tol:.12g},{r.best_member}\n")


def verify_distance_formula(st: Spacetime, g: CausalGraph, family: SteepFamily,
                            pairs: Sequence[tuple[int, int]], rel_tol: float = 0.05,
                            spacing_tol: float | None = None, quantum: float | None = None,
                            with_stable: bool = False,
                            eps_schedule: Sequence[float] = DEFAULT_SCHEDULE) -> FormulaReport:
    """Compare ``inf_f [f(q) - f(p)]^+`` over the family with ``d(p, q)``.

    The default tolerance is ``rel_tol * d + 2 * spacing + one fiber quantum``.
    """
    if not len(family):
        raise ValueError("family is empty")
    M = family.matrix
    spacing_tol = 2.0 * max(st.spacing) if spacing_tol is None else spacing_tol
    if quantum is None:
        fs = family.config.fiber_spacing if family.config is not None else None
        quantum = default_fiber_spacing(g, fs)
    fields: dict[int, np.ndarray] = {}
    records = []
    for p, q in pairs:
        p, q = st.node(p), st.node(q)
        if p not in fields:
            fields[p] = distance_field(g, p)
        d = float(fields[p][q])
        inc = M[:, q] - M[:, p]
        k = int(np.argmin(inc))
        inf = max(float(inc[k]), 0.0)
        D = stable_distance(st, p, q, eps_schedule, g.stencil_radius).estimate if with_stable else None
        tol = rel_tol * d + spacing_tol + quantum
        records.append(FormulaRecord(p, q, d, D, inf, inf - max(d, 0.0), tol, k))
    return FormulaReport(records, rel_tol, spacing_tol, quantum, len(family))


# ---------------------------------------------------------------------------
# order representation
# ---------------------------------------------------------------------------

@dataclass
class OrderReport:
    checked_related: int
    checked_unrelated: int
    forward_failures: list[tuple[int, int]]
    resolved_by_family: int
    resolved_by_targeted: int
    resolved_by_linear: int
    reverse_failures: list[tuple[int, int]]
    generated: int = 0

    @property
    def passed(self) -> bool:
        return not self.forward_failures and not self.reverse_failures

    @property
    def exit_code(self) -> int:
        if self.forward_failures:
            return 4
        return 1 if self.reverse_failures else 0

    def to_text(self) -> str:
        lines = [
            "order representation report",
            f"related_pairs = {self.checked_related}",
            f"unrelated_pairs = {self.checked_unrelated}",
            f"forward_failures = {len(self.forward_failures)}",
            f"reverse_separated_by_family = {self.resolved_by_family}",
            f"reverse_separated_by_targeted_franco = {self.resolved_by_targeted}",
            f"reverse_separated_by_linear = {self.resolved_by_linear}",
            f"reverse_failures = {len(self.reverse_failures)}",
            f"members_generated = {self.generated}",
            f"status = {'PASS' if self.passed else ('FAIL' if self.forward_failures else 'SOFT-FAIL')}",
        ]
        lines += [f"forward_failure: {p} -> {q}" for p, q in self.forward_failures]
        lines += [f"reverse_failure: {p} -> {q}" for p, q in self.reverse_failures]
        return "\n".join(lines) + "\n"


def verify_order_representation(g: CausalGraph, relation: Relation, family: SteepFamily,
                                pairs: Sequence[tuple[int, int]] | None = None,
                                targeted: bool = True, block: int = 64) -> OrderReport:
    """Check ``(p, q) in relation <=> f(p) <= f(q) for every member``.

    Unseparated unrelated pairs get a Franco candidate aimed at them, then a
    linear separator; successful candidates join the family.
    """
    M = family.matrix
    tol = ROUND_TOL * _scale(M)
    n = g.n
    if pairs is None:
        P = np.repeat(np.arange(n), n)
        Q = np.tile(np.arange(n), n)
        keep = P != Q
        P, Q = P[keep], Q[keep]
    else:
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        P, Q = arr[:, 0], arr[:, 1]
    rel = relation.matrix[P, Q]
    drop = np.empty(len(P))            # max over members of f(p) - f(q)
    rise = np.empty(len(P))            # min over members of f(q) - f(p)
    for i in range(0, len(P), block * 64):
        sl = slice(i, i + block * 64)
        diff = M[:, P[sl]] - M[:, Q[sl]]
        drop[sl] = diff.max(axis=0)
        rise[sl] = (-diff).min(axis=0)
    fwd_bad = rel & (rise < -tol)
    forward = [(int(a), int(b)) for a, b in zip(P[fwd_bad], Q[fwd_bad])]
    unsep = ~rel & ~(drop > tol)
    by_family = int(np.sum(~rel & (drop > tol)))
    ctx = family.context if family.context is not None else FrancoContext(g)
    by_targeted = by_linear = generated = 0
    failures = []
    extra: list[np.ndarray] = []
    for a, b in zip(P[unsep], Q[unsep]):
        a, b = int(a), int(b)
        if any(v[a] - v[b] > tol for v in extra):
            by_family += 1
            continue
        if not targeted:
            failures.append((a, b))
            continue
        fc = franco_for_pair(ctx, a, b)
        v = fc.function.values
        if fc.covered and v[a] - v[b] > tol and family.add(g, v, "franco", {"pair": (a, b)}):
            by_targeted += 1
            generated += 1
            extra.append(v)
            continue
        lin = linear_separator(g, a, b)
        if lin is not None and lin.values[a] - lin.values[b] > tol and family.add(g, lin.values, "linear", lin.info):
            by_linear += 1
            generated += 1
            extra.append(lin.values)
            continue
        failures.append((a, b))
    return OrderReport(int(rel.sum()), int((~rel).sum()), forward, by_family, by_targeted,
                       by_linear, failures, generated)


# ---------------------------------------------------------------------------
# topology separation
# ---------------------------------------------------------------------------

class TopologyRefusal(ValueError):
    pass


@dataclass
class TopologyReport:
    p: int
    box: tuple[tuple[int, ...], tuple[int, ...]]
    core: list[int]
    region: list[int]
    outside: list[int]
    f_steep: bool
    h_steep: bool
    f: np.ndarray = field(repr=False, default=None)
    h: np.ndarray = field(repr=False, default=None)

    @property
    def contains_p(self) -> bool:
        return self.p in self.region

    @property
    def passed(self) -> bool:
        return self.contains_p and not self.outside and self.f_steep and self.h_steep

    @property
    def exit_code(self) -> int:
        if not (self.f_steep and self.h_steep):
            return 4
        return 0 if self.passed else 1

    def to_text(self) -> str:
        lo, hi = self.box
        lines = [
            "topology separation report",
            f"point = {self.p}",
            f"box = {list(lo)} .. {list(hi)}",
            f"core_nodes = {len(self.core)}",
            f"region_nodes = {len(self.region)}",
            f"point_in_region = {self.contains_p}",
            f"region_outside_box = {len(self.outside)}",
            f"f_steep = {self.f_steep}",
            f"h_steep = {self.h_steep}",
            f"status = {'PASS' if self.passed else 'FAIL'}",
        ]
        lines += [f"outside: {v}" for v in self.outside]
        return "\n".join(lines) + "\n"


MIN_BOX_NODES = 3


def verify_topology_separation(st: Spacetime, g: CausalGraph, family: SteepFamily, p,
                               box: tuple[Sequence[int], Sequence[int]]) -> TopologyReport:
    """Find steep f, h with ``p in {f > 0} & {h < 0}`` inside the index box ``[lo, hi]``.

    With ``t`` a family member shifted to vanish at p, a core set Q (the box
    slice through p's time index) and a large weight ``lam``:
    ``f = t - c + lam * V_past`` and ``h = t + c - lam * V_future``, where the
    volume functions use the indicator of Q.  Then ``{f > 0}`` is the future
    of Q and ``{h < 0}`` its past, so the region is the causal hull of Q.
    """
    p = st.node(p)
    lo = np.asarray(box[0], dtype=int)
    hi = np.asarray(box[1], dtype=int)
    if lo.shape != (st.ndim,) or hi.shape != (st.ndim,):
        raise TopologyRefusal("box corners must have one index per axis")
    if np.any(lo < 0) or np.any(hi >= np.asarray(st.dims)) or np.any(lo > hi):
        raise TopologyRefusal(f"box {lo.tolist()}..{hi.tolist()} does not lie in the grid {st.dims}")
    size = hi - lo + 1
    if np.any(size < MIN_BOX_NODES):
        raise TopologyRefusal(
            f"box has {size.tolist()} nodes per axis; at least {MIN_BOX_NODES} per axis are needed "
            f"at this spacing (refine the grid or enlarge the box)")
    pi = np.asarray(st.multi_index(p))
    if np.any(pi < lo) or np.any(pi > hi):
        raise TopologyRefusal("box does not contain the point")
    if not len(family):
        raise ValueError("family is empty")

    multi = np.array(np.unravel_index(np.arange(st.n_nodes), st.dims)).T
    in_box = np.all((multi >= lo) & (multi <= hi), axis=1)
    core_mask = in_box & (multi[:, 0] == pi[0])
    # keep the core off the box faces when there is room, so its hull stays inside
    inner = core_mask & np.all((multi[:, 1:] > lo[1:]) & (multi[:, 1:] < hi[1:]), axis=1)
    if inner[p]:
        core_mask = inner
    phi = core_mask.astype(float)

    member = _pick_member(family)
    t = member - member[p]
    ctx = family.context
    R = ctx.R if ctx is not None else None
    mu = Measure.uniform(st.n_nodes)
    v_past = volume_function(g, phi, mu, "past", R).values
    v_fut = -volume_function(g, phi, mu, "future", R).values
    T = float(np.max(np.abs(t)))
    c = T + 1.0
    m = float(np.min((phi * mu.weights)[core_mask]))
    lam = (c + T + 1.0) / m
    f = t - c + lam * v_past
    h = t + c - lam * v_fut
    region = np.flatnonzero((f > 0) & (h < 0))
    outside = [int(v) for v in region if not in_box[v]]
    return TopologyReport(p, (tuple(lo.tolist()), tuple(hi.tolist())),
                          [int(v) for v in np.flatnonzero(core_mask)], [int(v) for v in region],
                          outside, is_steep(f, g).ok, is_steep(h, g).ok, f, h)


def _pick_member(family: SteepFamily) -> np.ndarray:
    for m in family.members:
        if m.provenance == "linear":
            return m.values
    return family.members[0].values


# ---------------------------------------------------------------------------
# property suites
# ---------------------------------------------------------------------------

@dataclass
class PropertyReport:
    f_pairs: int
    f_violations: int
    triples: int
    triple_violations: int
    widening_pairs: int
    widening_violations: int
    stable_violations: int

    @property
    def passed(self) -> bool:
        return not (self.f_violations or self.triple_violations
                    or self.widening_violations or self.stable_violations)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 4

    def to_text(self) -> str:
        return "\n".join([
            "property report",
            f"superadditivity_pairs = {self.f_pairs}",
            f"superadditivity_violations = {self.f_violations}",
            f"reverse_triangle_triples = {self.triples}",
            f"reverse_triangle_violations = {self.triple_violations}",
            f"widening_pairs = {self.widening_pairs}",
            f"widening_monotonicity_violations = {self.widening_violations}",
            f"stable_below_d_violations = {self.stable_violations}",
            f"status = {'PASS' if self.passed else 'FAIL'}",
        ]) + "\n"


def superadditivity_violations(st: Spacetime, n_pairs: int, rng: np.random.Generator) -> int:
    from .geometry import finsler_many, sample_cone

    bad = 0
    per = -(-n_pairs // len(st.fields))
    for cone, F in st.fields:
        y1 = sample_cone(cone, per, rng) * rng.uniform(0.1, 10.0, (per, 1))
        y2 = sample_cone(cone, per, rng) * rng.uniform(0.1, 10.0, (per, 1))
        f1, f2, f12 = finsler_many(F, y1), finsler_many(F, y2), finsler_many(F, y1 + y2)
        scale = np.maximum(1.0, f12)
        bad += int(np.sum(f12 < f1 + f2 - ROUND_TOL * scale))
    return bad


def sample_triples(R: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random chains ``p <= q <= r`` of the reachability matrix."""
    out = np.empty((n, 3), dtype=np.int64)
    N = len(R)
    for i in range(n):
        p = int(rng.integers(N))
        q = int(rng.choice(np.flatnonzero(R[p])))
        r = int(rng.choice(np.flatnonzero(R[q])))
        out[i] = (p, q, r)
    return out


def verify_properties(st: Spacetime, g: CausalGraph, seed: int = 0, n_pairs: int = 1000,
                      n_triples: int = 500, n_widening: int = 200,
                      eps_schedule: Sequence[float] = DEFAULT_SCHEDULE) -> PropertyReport:
    """Superadditivity of F, reverse triangle for d, and monotone widening of d."""
    from .causal import _check_schedule, build_causal_graph, reachability
    from .distance import distance_matrix

    rng = np.random.default_rng(seed)
    fv = superadditivity_violations(st, n_pairs, rng)
    if not g.acyclic:
        raise ValueError("property suites need an acyclic causal graph")
    R = reachability(g)
    trip = sample_triples(R, n_triples, rng)
    src = np.unique(trip[:, :2])
    D = np.zeros((g.n, g.n))
    D[src] = distance_matrix(g, src)
    lhs = D[trip[:, 0], trip[:, 2]]
    rhs = D[trip[:, 0], trip[:, 1]] + D[trip[:, 1], trip[:, 2]]
    tv = int(np.sum(lhs < rhs - ROUND_TOL * np.maximum(1.0, rhs)))

    eps = _check_schedule(eps_schedule)
    P = rng.integers(g.n, size=n_widening)
    Q = rng.integers(g.n, size=n_widening)
    sources = np.unique(P)
    base = distance_matrix(g, sources)[np.searchsorted(sources, P), Q]
    prev = None
    wv = 0
    for e in eps:            # decreasing eps: values must not increase, and stay >= d
        ge = build_causal_graph(st.widened(e), g.stencil_radius)
        if not ge.acyclic:
            break
        val = distance_matrix(ge, sources)[np.searchsorted(sources, P), Q]
        tolv = ROUND_TOL * np.maximum(1.0, np.abs(val))
        wv += int(np.sum(val < base - tolv))
        if prev is not None:
            wv += int(np.sum(val > prev + tolv))
        prev = val
    sv = int(np.sum(prev < base - ROUND_TOL * np.maximum(1.0, base))) if prev is not None else 0
    return PropertyReport(n_pairs, fv, n_triples, tv, n_widening, wv, sv)
