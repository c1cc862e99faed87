"""Time functions on causal graphs.

Averaged time functions on the product (``tau_down``, ``tau_up`` and their
log quotient), level-set extraction back to the base, steepness checks,
volume functions, Franco-type sums of distance fields, and the assembly of
a validated family of steep functions.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .causal import CausalGraph, CausalityError, Digraph, find_cycle, reachability
from .distance import distance_field, distance_matrix, distance_to_field
from .geometry import Spacetime
from .product import ProductSpacetime

STEEP_TOL = 1e-9


class FamilyError(RuntimeError):
    """No member survived validation."""


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GridFunction:
    """Node values on a base or product grid; NaN marks nodes outside the domain."""

    values: np.ndarray
    domain: str = "base"
    name: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)


@dataclass(eq=False)
class Measure:
    """Nonnegative node weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or not len(w) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("measure weights must be finite and nonnegative")
        total = w.sum()
        if not total > 0:
            raise ValueError("measure has zero mass")
        self.weights = w / total

    @classmethod
    def uniform(cls, n: int) -> "Measure":
        return cls(np.full(int(n), 1.0 / n))

    @classmethod
    def gaussian(cls, coords: np.ndarray, sigma, center=None) -> "Measure":
        """Weights ``exp(-|x - center|^2 / 2 sigma^2)``, centered on the chart by default.

        ``sigma`` may be a scalar or one width per coordinate axis.
        """
        x = np.asarray(coords, dtype=float)
        c = 0.5 * (x.min(axis=0) + x.max(axis=0)) if center is None else np.asarray(center, float)
        s = np.broadcast_to(np.asarray(sigma, dtype=float), (x.shape[1],))
        if np.any(s <= 0):
            raise ValueError("sigma must be positive")
        z = np.sum(((x - c) / s) ** 2, axis=1)
        w = np.exp(-0.5 * (z - z.min()))
        if w.min() < 1e-9:
            # tiny weights are swallowed by round-off in the future/past masses
            raise ValueError("gaussian measure too concentrated: weight ratio below 1e-9")
        return cls(w)

    @property
    def n(self) -> int:
        return len(self.weights)


def centered_measure(ps: ProductSpacetime, base_frac: float = 0.5, fiber_frac: float = 0.125) -> Measure:
    """Gaussian product measure with widths given as fractions of the base and fiber extents.

    A narrow fiber width puts most of the mass near the middle fiber level,
    which is what lets a single level of the log quotient cross every column
    of a bounded chart.
    """
    c = product_coords(ps)
    ext = np.ptp(c, axis=0)
    sigma = np.concatenate([base_frac * np.maximum(ext[:-1], 1e-12), [fiber_frac * ext[-1]]])
    return Measure.gaussian(c, sigma)


def product_coords(ps: ProductSpacetime) -> np.ndarray:
    """Coordinates of product nodes: base chart coordinates plus the fiber coordinate."""
    base = ps.spacetime.coords()
    K = ps.fiber_levels
    z = ps.fiber_coordinate(np.arange(K))
    return np.column_stack([np.repeat(base, K, axis=0), np.tile(z, len(base))])


# ---------------------------------------------------------------------------
# averaging on the product
# ---------------------------------------------------------------------------

def averaging_parameters(a_samples: int = 8, eps_max: float = 0.3) -> list[tuple[float, float]]:
    """Midpoint nodes ``a`` of [1, 2] and their widening ``eps(a) = (a - 1) * eps_max``."""
    if a_samples < 1:
        raise ValueError("a_samples must be >= 1")
    if not eps_max > 0:
        raise ValueError("eps_max must be positive")
    a = 1.0 + (np.arange(a_samples) + 0.5) / a_samples
    return [(float(x), float((x - 1.0) * eps_max)) for x in a]


def widened_products(ps: ProductSpacetime, a_samples: int = 8, eps_max: float = 0.3) -> list[ProductSpacetime]:
    """Product graphs built on the widened bases of the averaging family.

    Only the base cone and F are widened, so the fiber direction keeps its
    lightlike role in every member.
    """
    from .causal import build_causal_graph

    st = ps.spacetime
    out = []
    for a, eps in averaging_parameters(a_samples, eps_max):
        base = build_causal_graph(st.widened(eps), ps.base.stencil_radius)
        if not base.acyclic:
            cyc = find_cycle(base)
            raise CausalityError(f"widened base at a={a:.4g} (eps={eps:.4g}) has a closed causal curve", cyc)
        out.append(ProductSpacetime(base, ps.fiber_levels, ps.spacing, ps.origin))
    return out


def _masses(g: Digraph, w: np.ndarray, block: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """``(mu(J+(v)), mu(J-(v)))`` for every node v."""
    R = reachability(g)
    fut = np.empty(g.n)
    pst = np.zeros(g.n)
    for i in range(0, g.n, block):
        Rb = R[i:i + block].astype(float)
        fut[i:i + block] = Rb @ w
        pst += w[i:i + block] @ Rb
    return fut, pst


@dataclass
class Averaged:
    """Both averaged functions from one pass over the widening family."""

    down: GridFunction
    up: GridFunction


def averaged_functions(ps: ProductSpacetime, mu: Measure | None = None, a_samples: int = 8,
                       eps_max: float = 0.3) -> Averaged:
    mu = Measure.uniform(ps.n) if mu is None else mu
    if mu.n != ps.n:
        raise ValueError("measure size does not match the product graph")
    fut = np.zeros(ps.n)
    pst = np.zeros(ps.n)
    graphs = widened_products(ps, a_samples, eps_max)
    for pg in graphs:
        f, p = _masses(pg, mu.weights)
        fut += f
        pst += p
    info = {"a_samples": a_samples, "eps_max": eps_max}
    return Averaged(GridFunction(-fut / len(graphs), "product", "tau_down", dict(info)),
                    GridFunction(pst / len(graphs), "product", "tau_up", dict(info)))


def tau_down(ps: ProductSpacetime, mu: Measure | None = None, a_samples: int = 8,
             eps_max: float = 0.3) -> GridFunction:
    """Minus the future mass averaged over the widening family; values in [-1, 0]."""
    return averaged_functions(ps, mu, a_samples, eps_max).down


def tau_up(ps: ProductSpacetime, mu: Measure | None = None, a_samples: int = 8,
           eps_max: float = 0.3) -> GridFunction:
    """Past mass averaged over the widening family; values in [0, 1]."""
    return averaged_functions(ps, mu, a_samples, eps_max).up


def geroch_tau(td: GridFunction, tu: GridFunction) -> GridFunction:
    """``log(tau_up / -tau_down)``; nodes where either factor vanishes are NaN."""
    d, u = td.values, tu.values
    ok = (d < 0) & (u > 0)
    out = np.full(len(d), np.nan)
    out[ok] = np.log(u[ok] / -d[ok])
    return GridFunction(out, td.domain, "geroch_tau", {"excluded": int((~ok).sum())})


# ---------------------------------------------------------------------------
# level sets
# ---------------------------------------------------------------------------

class ColumnOrderError(ValueError):
    pass


def _columns(tau: GridFunction, ps: ProductSpacetime) -> np.ndarray:
    if len(tau) != ps.n:
        raise ValueError("function is not defined on this product")
    cols = tau.values.reshape(ps.base.n, ps.fiber_levels)
    with np.errstate(invalid="ignore"):
        bad = np.diff(cols, axis=1) > 0
    if bad.any():
        p = int(np.flatnonzero(bad.any(axis=1))[0])
        raise ColumnOrderError(
            f"column of base node {p} is not monotone along the fiber: "
            f"value rises towards larger fiber coordinate")
    return cols


def common_level_range(tau: GridFunction, ps: ProductSpacetime) -> tuple[float, float]:
    """Interval of levels bracketed by every fiber column (empty when lo > hi)."""
    cols = _columns(tau, ps)
    return float(np.max(cols[:, -1])), float(np.min(cols[:, 0]))


def level_set_graph(tau: GridFunction, ps: ProductSpacetime, level: float = 0.0) -> GridFunction:
    """Fiber coordinate where each column crosses ``level``, by linear interpolation.

    Columns must be nonincreasing in the fiber index (the fiber points to the
    future downwards).  Columns that do not bracket the level are NaN and
    counted in ``info['missing']``.
    """
    cols = _columns(tau, ps)
    nb, K = cols.shape
    with np.errstate(invalid="ignore"):
        above = cols >= level
    j = above.sum(axis=1) - 1
    out = np.full(nb, np.nan)
    defined = np.all(np.isfinite(cols), axis=1)
    ok = defined & (j >= 0) & ((j < K - 1) | (cols[np.arange(nb), K - 1] == level))
    idx = np.flatnonzero(ok)
    jj = np.minimum(j[idx], K - 2)
    t0 = cols[idx, jj]
    t1 = cols[idx, jj + 1]
    span = t0 - t1
    frac = np.where(span > 0, (t0 - level) / np.where(span > 0, span, 1.0), 0.0)
    out[idx] = ps.fiber_coordinate(jj) + frac * ps.spacing
    return GridFunction(out, "base", f"level[{level:.6g}]",
                        {"level": float(level), "missing": int(nb - len(idx))})


# ---------------------------------------------------------------------------
# steepness
# ---------------------------------------------------------------------------

@dataclass
class SteepCheck:
    ok: bool
    margin: float
    violations: np.ndarray
    undefined: int = 0

    def __bool__(self) -> bool:
        return self.ok


def edge_increments(t, g: Digraph) -> np.ndarray:
    v = t.values if isinstance(t, GridFunction) else np.asarray(t, dtype=float)
    return v[g.dst] - v[g.src]


def is_steep(t, g: CausalGraph, mode: str = "F", tol: float = STEEP_TOL, delta: float = 0.0,
             norm: float = 2) -> SteepCheck:
    """Edgewise steepness of ``t`` on ``g``.

    ``mode='F'``: ``t(q) - t(p) >= F(q - p) + delta*|q - p|``;
    ``mode='h'``: the right side is the ``norm`` of the displacement;
    ``mode='temporal'``: strict increase.  ``tol`` is an absolute slack for
    the F and h modes (scaled by the largest edge weight when above 1).
    Edges touching undefined nodes are violations.
    """
    inc = edge_increments(t, g)
    length = np.linalg.norm(g.disp, ord=norm, axis=1) if g.n_edges else np.zeros(0)
    if mode == "F":
        rhs = g.weight + delta * length
    elif mode == "h":
        rhs = (1.0 + delta) * length
    elif mode == "temporal":
        rhs = np.zeros(g.n_edges)
    else:
        raise ValueError(f"unknown steepness mode {mode!r}")
    slack = inc - rhs
    finite = np.isfinite(slack)
    undefined = int((~finite).sum())
    if mode == "temporal":
        bad = ~(slack > 0)
    else:
        scale = max(1.0, float(np.max(g.weight))) if g.n_edges else 1.0
        bad = ~(slack >= -tol * scale)
    margin = float(np.min(slack[finite])) if finite.any() else -math.inf
    return SteepCheck(not bad.any(), margin, np.flatnonzero(bad), undefined)


def strictly_increasing(t, g: Digraph) -> tuple[bool, int]:
    """Whether ``t`` strictly increases on every edge, and the number of failing edges."""
    inc = edge_increments(t, g)
    bad = int(np.sum(~(inc > 0)))
    return bad == 0, bad


def steep_scale(t, g: CausalGraph) -> float | None:
    """Smallest factor making a strictly increasing ``t`` F-steep, or None."""
    inc = edge_increments(t, g)
    if not np.all(inc > 0):
        return None
    pos = g.weight > 0
    if not pos.any():
        return 1.0
    return float(np.max(g.weight[pos] / inc[pos]))


# ---------------------------------------------------------------------------
# volume functions
# ---------------------------------------------------------------------------

def volume_function(g: Digraph, phi, mu: Measure | None = None, direction: str = "past",
                    R: np.ndarray | None = None) -> GridFunction:
    """Weighted volume of pasts (``direction='past'``) or minus that of futures."""
    phi = phi.values if isinstance(phi, GridFunction) else np.asarray(phi, dtype=float)
    if np.any(phi < 0):
        raise ValueError("phi must be nonnegative")
    mu = Measure.uniform(g.n) if mu is None else mu
    w = phi * mu.weights
    R = reachability(g) if R is None else R
    if direction == "past":
        vals = w @ R
    elif direction == "future":
        vals = -(R @ w)
    else:
        raise ValueError("direction must be 'past' or 'future'")
    return GridFunction(vals, "base", f"volume_{direction}")


# ---------------------------------------------------------------------------
# Franco-type candidates
# ---------------------------------------------------------------------------

@dataclass
class FrancoCandidate:
    function: GridFunction
    anchors: list[tuple[int, int]]
    uncovered: np.ndarray
    check: SteepCheck | None = None

    @property
    def covered(self) -> bool:
        return len(self.uncovered) == 0


class FrancoContext:
    """Cached reachability and all-pairs distances of an acyclic graph."""

    def __init__(self, g: CausalGraph, workers: int = 1):
        if not g.acyclic:
            raise CausalityError("graph has a closed causal curve", find_cycle(g))
        self.g = g
        self.workers = workers
        self._R = None
        self._D = None

    @property
    def R(self) -> np.ndarray:
        if self._R is None:
            self._R = reachability(self.g)
        return self._R

    @property
    def D(self) -> np.ndarray:
        if self._D is None:
            self._D = distance_matrix(self.g, np.arange(self.g.n), workers=self.workers)
        return self._D


def _anchor_sum(g: CausalGraph, anchors, ctx: FrancoContext | None):
    f = np.zeros(g.n)
    for r, sign in anchors:
        if sign > 0:
            fld = ctx.D[r] if ctx is not None else distance_field(g, r)
            f += fld
        else:
            fld = ctx.D[:, r] if ctx is not None else distance_to_field(g, r)
            f -= fld
        if not np.all(np.isfinite(fld)):
            raise ValueError(f"distance field of anchor {r} is not finite")
    return f


def _coverage(g: CausalGraph, anchors, ctx: FrancoContext | None) -> np.ndarray:
    from .causal import future, past

    cov = np.zeros(g.n_edges, dtype=bool)
    for r, sign in anchors:
        if ctx is not None:
            inside = ctx.R[r] if sign > 0 else ctx.R[:, r]
        else:
            inside = np.zeros(g.n, dtype=bool)
            inside[future(g, r) if sign > 0 else past(g, r)] = True
        cov |= inside[g.src] if sign > 0 else inside[g.dst]
    return cov


def franco_candidate(g: CausalGraph, anchors: Sequence[tuple[int, int]],
                     ctx: FrancoContext | None = None) -> FrancoCandidate:
    """Sum of ``d(r, .)`` over ``+`` anchors and ``-d(., r)`` over ``-`` anchors.

    A ``+`` summand is F-steep on edges leaving its future set and a ``-``
    summand on edges entering its past set; ``uncovered`` lists the edges
    reached by neither, and is empty exactly when steepness is guaranteed.
    """
    anchors = [(int(r), 1 if s > 0 else -1) for r, s in anchors]
    if not anchors:
        raise ValueError("at least one anchor is required")
    f = _anchor_sum(g, anchors, ctx)
    uncovered = np.flatnonzero(~_coverage(g, anchors, ctx))
    fn = GridFunction(f, "base", "franco", {"anchors": anchors})
    return FrancoCandidate(fn, anchors, uncovered, is_steep(fn, g))


def franco_for_pair(ctx: FrancoContext, p: int, q: int) -> FrancoCandidate:
    """Greedy anchor cover aimed at making ``f(q) - f(p)`` small (or negative).

    The contribution of an anchor to ``f(q) - f(p)`` is read off four
    distance fields.  Unrelated pairs are seeded with the most negative
    anchor; then free anchors (no contribution) cover what they can, a single
    anchor finishing the cover is preferred, and otherwise the anchor with
    the least contribution per newly covered edge is added.
    """
    g, R, D = ctx.g, ctx.R, ctx.D
    n = g.n
    cost = np.concatenate([D[:, q] - D[:, p], D[p, :] - D[q, :]])
    cover = np.concatenate([R[:, g.src], R.T[:, g.dst]])     # (2n, E)
    uncovered = np.ones(g.n_edges, dtype=bool)
    chosen: list[int] = []

    def take(i):
        chosen.append(int(i))
        uncovered[cover[i]] = False

    if not R[p, q]:
        i = int(np.argmin(cost))
        if cost[i] < 0:
            take(i)
    free = cost <= 1e-12
    while uncovered.any():
        new = cover[:, uncovered].sum(axis=1)
        cand = np.flatnonzero(free & (new > 0))
        if not len(cand):
            break
        take(cand[np.argmax(new[cand])])
    while uncovered.any():
        new = cover[:, uncovered].sum(axis=1)
        full = np.flatnonzero(new == uncovered.sum())
        if len(full):
            take(full[np.argmin(cost[full])])
            break
        cand = np.flatnonzero(new > 0)
        if not len(cand):
            break
        take(cand[np.argmin(cost[cand] / new[cand])])
    anchors = [(i, 1) if i < n else (i - n, -1) for i in chosen]
    cand = franco_candidate(g, anchors, ctx)
    cand.function.info.update(pair=(int(p), int(q)))
    return cand


# ---------------------------------------------------------------------------
# linear members
# ---------------------------------------------------------------------------

def linear_candidate(g: CausalGraph, covector) -> GridFunction | None:
    """``s * <covector, x>`` scaled to be F-steep; None if not temporal on every edge."""
    st = g.spacetime
    if any(st.periodic):
        return None
    w = np.asarray(covector, dtype=float)
    inc = g.disp @ w
    if g.n_edges and not np.all(inc > 0):
        return None
    vals = st.coords() @ w
    s = steep_scale(vals, g) if g.n_edges else 1.0
    return GridFunction(s * vals, "base", "linear", {"covector": w.tolist(), "scale": s})


def boost_covectors(ndim: int, n: int = 9, vmax: float = 0.6) -> np.ndarray:
    """Covectors ``(1, v)`` with the spatial part on a symmetric grid of radius ``vmax``."""
    if n < 1:
        return np.zeros((0, ndim))
    v = np.linspace(-vmax, vmax, n) if n > 1 else np.zeros(1)
    if ndim == 2:
        return np.column_stack([np.ones(len(v)), v])
    vx, vy = np.meshgrid(v, v, indexing="ij")
    keep = vx ** 2 + vy ** 2 <= vmax ** 2 + 1e-12
    return np.column_stack([np.ones(keep.sum()), vx[keep], vy[keep]])


def linear_separator(g: CausalGraph, p: int, q: int) -> GridFunction | None:
    """A linear steep function with ``f(p) > f(q)``, found by a small LP."""
    st = g.spacetime
    if any(st.periodic) or not g.n_edges:
        return None
    Y = np.unique(np.round(g.disp, 12), axis=0)
    x = st.coords([p, q])
    dx = x[1] - x[0]
    # find w with <w, y> >= 1 on every edge direction and <w, dx> <= -1
    A = np.vstack([-Y, dx[None, :]])
    b = np.concatenate([-np.ones(len(Y)), [-1.0]])
    res = linprog(np.zeros(st.ndim), A_ub=A, b_ub=b, bounds=[(None, None)] * st.ndim, method="highs")
    if res.status != 0:
        return None
    return linear_candidate(g, res.x)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass
class Member:
    values: np.ndarray
    provenance: str
    margin: float
    strict: bool
    info: dict = field(default_factory=dict)


@dataclass
class FamilyConfig:
    level_sets: bool = True
    fiber_levels: int = 9
    fiber_spacing: float | None = None    # default: twice the largest edge length
    eps_max_values: tuple[float, ...] = (0.3, 0.15)
    a_samples: int = 8
    n_levels: int = 3
    measure: str = "gaussian"
    sigma_frac: tuple[float, float] = (0.5, 0.125)
    franco: bool = True
    targets: Sequence[tuple[int, int]] | None = None
    max_targets: int = 256
    seed: int = 0
    linear: bool = True
    n_boosts: int = 9
    delta: float = 0.0
    workers: int = 1


@dataclass
class SteepFamily:
    members: list[Member]
    dropped: dict
    config: FamilyConfig | None = None
    context: FrancoContext | None = None

    def __len__(self) -> int:
        return len(self.members)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([m.values for m in self.members])

    def add(self, g: CausalGraph, values, provenance: str, info: dict | None = None,
            delta: float = 0.0) -> bool:
        """Validate and append; duplicates and failures are counted, not added."""
        values = np.asarray(values, dtype=float)
        chk = is_steep(values, g)
        if not chk.ok or not np.all(np.isfinite(values)):
            self.dropped[provenance] = self.dropped.get(provenance, 0) + 1
            return False
        key = hashlib.sha1(np.round(values - values.min(), 9).tobytes()).hexdigest()
        seen = getattr(self, "_keys", None)
        if seen is None:
            seen = self._keys = set()
        if key in seen:
            return False
        seen.add(key)
        strict = is_steep(values, g, delta=delta).ok if delta > 0 else chk.margin > STEEP_TOL
        self.members.append(Member(values, provenance, chk.margin, strict, dict(info or {})))
        return True

    def export(self, directory) -> None:
        """One ``member_XXX.csv`` per member plus ``manifest.json``."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        entries = []
        for i, m in enumerate(self.members):
            name = f"member_{i:03d}.csv"
            with (d / name).open("w", encoding="utf-8", newline="\n") as fh:
                fh.write("node,value\n")
                for j, v in enumerate(m.values):
                    fh.write(f"{j},{v:.12g}\n")
            entries.append({"file": name, "provenance": m.provenance,
                            "margin": float(f"{m.margin:.12g}"), "strict": bool(m.strict)})
        manifest = {"members": entries, "dropped": self.dropped}
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")


def default_targets(ctx: FrancoContext, max_targets: int, seed: int) -> list[tuple[int, int]]:
    """Related pairs to aim Franco candidates at: all of them on small grids, else a sample."""
    R = ctx.R.copy()
    np.fill_diagonal(R, False)
    pairs = np.argwhere(R)
    if len(pairs) > max_targets:
        rng = np.random.default_rng(seed)
        pairs = pairs[np.sort(rng.choice(len(pairs), max_targets, replace=False))]
    return [(int(a), int(b)) for a, b in pairs]


def default_fiber_spacing(g: CausalGraph, spacing: float | None = None) -> float:
    if spacing is not None:
        return float(spacing)
    wmax = float(np.max(g.weight)) if g.n_edges else 0.0
    return 2.0 * wmax if wmax > 0 else 1.0


def _level_set_members(fam: SteepFamily, st: Spacetime, g: CausalGraph, cfg: FamilyConfig) -> None:
    ps = ProductSpacetime(g, cfg.fiber_levels, default_fiber_spacing(g, cfg.fiber_spacing))
    mu = centered_measure(ps, *cfg.sigma_frac) if cfg.measure == "gaussian" else Measure.uniform(ps.n)
    for eps_max in cfg.eps_max_values:
        avg = averaged_functions(ps, mu, cfg.a_samples, eps_max)
        tau = geroch_tau(avg.down, avg.up)
        lo, hi = common_level_range(tau, ps)
        if not lo < hi:
            fam.dropped["level_set"] = fam.dropped.get("level_set", 0) + cfg.n_levels
            continue
        for c in np.linspace(lo, hi, cfg.n_levels + 2)[1:-1]:
            t = level_set_graph(tau, ps, c)
            s = steep_scale(t.values, g)
            if s is None:
                fam.dropped["level_set"] = fam.dropped.get("level_set", 0) + 1
                continue
            fam.add(g, s * t.values, "level_set",
                    {"eps_max": eps_max, "level": float(c), "scale": s}, cfg.delta)


def build_steep_family(st: Spacetime, g: CausalGraph, config: FamilyConfig | None = None) -> SteepFamily:
    """Assemble validated steep functions from level sets, Franco sums and linear maps."""
    cfg = FamilyConfig() if config is None else config
    if not g.acyclic:
        raise CausalityError("causal graph has a closed causal curve; no steep function exists",
                             find_cycle(g))
    ctx = FrancoContext(g, cfg.workers)
    fam = SteepFamily([], {}, cfg, ctx)
    if cfg.linear:
        for w in boost_covectors(st.ndim, cfg.n_boosts):
            lin = linear_candidate(g, w)
            if lin is None:
                fam.dropped["linear"] = fam.dropped.get("linear", 0) + 1
            else:
                fam.add(g, lin.values, "linear", lin.info, cfg.delta)
    if cfg.level_sets:
        try:
            _level_set_members(fam, st, g, cfg)
        except CausalityError:
            fam.dropped["level_set"] = fam.dropped.get("level_set", 0) + cfg.n_levels * len(cfg.eps_max_values)
    if cfg.franco:
        targets = cfg.targets if cfg.targets is not None else default_targets(ctx, cfg.max_targets, cfg.seed)
        for p, q in targets:
            fc = franco_for_pair(ctx, p, q)
            if fc.covered:
                fam.add(g, fc.function.values, "franco", {"anchors": fc.anchors, "pair": (p, q)}, cfg.delta)
            else:
                fam.dropped["franco"] = fam.dropped.get("franco", 0) + 1
    if not fam.members:
        raise FamilyError("no steep function survived validation")
    return fam
