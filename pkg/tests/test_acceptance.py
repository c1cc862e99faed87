"""The nine acceptance criteria, each at its stated tolerance.

Every test records one ``criterion N: PASS|FAIL ...`` line, printed in the
terminal summary (and to stdout, visible with ``-s``).  Run alone with
``pytest tests/test_acceptance.py``.
"""
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from steeptime.causal import (DEFAULT_SCHEDULE, build_causal_graph, is_causal, reachability,
                              seifert_relation, tilt_sweep, transition_is_monotone)
from steeptime.cli import main as cli_main
from steeptime.distance import distance, distance_matrix, path_length, stable_distance
from steeptime.formula import verify_distance_formula, verify_order_representation, verify_properties
from steeptime.geometry import builtin_spacetime
from steeptime.product import ProductSpacetime, verify_vyv
from steeptime.timefn import (SteepFamily, averaged_functions, build_steep_family,
                              centered_measure, common_level_range, default_fiber_spacing,
                              franco_candidate, geroch_tau, is_steep, level_set_graph,
                              strictly_increasing)


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def timelike_pairs(st, n, rng, max_slope=0.7, min_dt=10):
    """Random pairs with time separation >= min_dt and |dx| <= max_slope * dt."""
    nt, nx = st.dims
    out = []
    while len(out) < n:
        t0, x0 = rng.integers(nt), rng.integers(nx)
        t1, x1 = rng.integers(nt), rng.integers(nx)
        dt, dx = t1 - t0, x1 - x0
        if dt >= min_dt and abs(dx) <= max_slope * dt:
            out.append(((int(t0), int(x0)), (int(t1), int(x1))))
    return out


# 1 ---------------------------------------------------------------------------

def test_criterion_1_flat_distance_oracle():
    t0 = time.perf_counter()
    st = builtin_spacetime("minkowski2d", dims=(81, 81))
    g = build_causal_graph(st, 4)
    pairs = timelike_pairs(st, 50, np.random.default_rng(2024))
    errs = []
    for a, b in pairs:
        d = distance(g, st.node(a), st.node(b), witness=False).value
        exact = math.sqrt((b[0] - a[0]) ** 2 - (b[1] - a[1]) ** 2)
        errs.append(abs(d - exact) / exact)
    elapsed = time.perf_counter() - t0
    ok = max(errs) <= 0.05 and elapsed < 30.0
    record(1, ok, f"max rel error {max(errs):.4f} (<= 0.05), runtime {elapsed:.2f}s (< 30s), 50 pairs")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_criterion_2_reverse_triangle_suites():
    parts, ok = [], True
    for name, params, radius in [("minkowski2d", {}, 2), ("custom_finsler_polyhedral", {}, 2),
                                 ("minkowski3d", {"dims": (5, 5, 5)}, 1)]:
        st = builtin_spacetime(name, **params)
        rep = verify_properties(st, build_causal_graph(st, radius), seed=11, n_pairs=1000, n_triples=500)
        ok &= rep.f_violations == 0 and rep.triple_violations == 0
        parts.append(f"{name} {rep.f_violations}/{rep.f_pairs} F-pairs, "
                     f"{rep.triple_violations}/{rep.triples} d-triples")
    record(2, ok, "violations: " + "; ".join(parts))
    assert ok


# 3 ---------------------------------------------------------------------------

def test_criterion_3_product_brute_force():
    t0 = time.perf_counter()
    rep = verify_vyv(builtin_spacetime("minkowski2d", dims=(5, 5)), fiber_levels=7, fiber_spacing=1.0)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and elapsed < 60.0
    sym = len(rep.only_left) + len(rep.only_right)
    record(3, ok, f"{rep.product_nodes} product nodes, symmetric difference {sym}, "
                  f"beyond one quantum {len(rep.beyond_quantum)}, runtime {elapsed:.2f}s (< 60s)")
    assert ok


# 4 ---------------------------------------------------------------------------

def weak(g, arrays):
    fam = SteepFamily([], {})
    for v in arrays:
        fam.add(g, v, "weak")
    return fam


def test_criterion_4_distance_formula():
    st = builtin_spacetime("minkowski2d")
    g = build_causal_graph(st, 2)
    fam = build_steep_family(st, g)
    R = reachability(g)
    related = np.argwhere(R & ~np.eye(g.n, dtype=bool))
    rng = np.random.default_rng(4)
    pairs = [tuple(map(int, related[i])) for i in rng.choice(len(related), 50, replace=False)]
    rep = verify_distance_formula(st, g, fam, pairs)
    gaps = [r.gap for r in rep.records]

    # one-sided bound on every configuration, weak families included
    unsound = 0
    configs = 0
    for name, params, radius in [("minkowski2d", {}, 2), ("custom_finsler_polyhedral", {}, 1),
                                 ("minkowski3d", {"dims": (4, 4, 4)}, 1),
                                 ("tilted_cones", {"omega": 0.1}, 1)]:
        s = builtin_spacetime(name, **params)
        gg = build_causal_graph(s, radius)
        full = build_steep_family(s, gg)
        fams = [full, weak(gg, [full.members[0].values]), weak(gg, [full.members[-1].values]),
                weak(gg, [franco_candidate(gg, [(0, 1)]).function.values])]
        r = np.random.default_rng(radius)
        fams += [weak(gg, [full.members[i].values for i in r.choice(len(full), 3, replace=False)])
                 for _ in range(3)]
        pp = [(p, q) for p in range(gg.n) for q in range(gg.n)]
        for f in fams:
            if len(f):
                configs += 1
                unsound += sum(not x.sound for x in verify_distance_formula(s, gg, f, pp).records)
    ok = rep.passed and unsound == 0
    record(4, ok, f"50 pairs: gap in [{max(min(gaps), 0.0):.4f}, {max(gaps):.4f}], tolerance failures "
                  f"{sum(not r.within_tol for r in rep.records)}; one-sided violations {unsound} "
                  f"over {configs} family configurations (all pairs)")
    assert ok


# 5 ---------------------------------------------------------------------------

def test_criterion_5_averaging_time_functions():
    st = builtin_spacetime("minkowski2d", dims=(9, 9))
    g = build_causal_graph(st, 1)
    h = default_fiber_spacing(g)
    ps = ProductSpacetime(g, 9, h)
    avg = averaged_functions(ps, centered_measure(ps), a_samples=8, eps_max=0.3)
    tau = geroch_tau(avg.down, avg.up)
    bad = [strictly_increasing(f, ps)[1] for f in (avg.down, avg.up, tau)]
    lo, hi = common_level_range(tau, ps)
    t = level_set_graph(tau, ps, 0.5 * (lo + hi))
    within = is_steep(t, g, tol=h)
    exact = is_steep(t, g)
    ok = bad == [0, 0, 0] and t.info["missing"] == 0 and within.ok
    record(5, ok, f"9x9x9 product, {ps.n_edges} edges; non-increasing edges tau_down/tau_up/tau "
                  f"{bad[0]}/{bad[1]}/{bad[2]}; level set missing {t.info['missing']} columns, "
                  f"F-steep within one quantum ({h:g}) on {g.n_edges - len(within.violations)}/{g.n_edges} "
                  f"edges, exact margin {exact.margin:.4f}")
    assert ok


# 6 ---------------------------------------------------------------------------

def test_criterion_6_order_representation():
    st = builtin_spacetime("minkowski2d", dims=(10, 10))
    g = build_causal_graph(st, 1)
    fam = build_steep_family(st, g)
    rel = seifert_relation(st).relation
    rep = verify_order_representation(g, rel, fam)
    ok = rep.passed and rep.checked_related + rep.checked_unrelated == g.n * (g.n - 1)
    record(6, ok, f"{rep.checked_related} related / {rep.checked_unrelated} unrelated pairs; forward failures "
                  f"{len(rep.forward_failures)}; unrelated separated by family {rep.resolved_by_family}, "
                  f"targeted {rep.resolved_by_targeted + rep.resolved_by_linear}, unresolved {len(rep.reverse_failures)}")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_criterion_7_causality_classification():
    st = builtin_spacetime("periodic_time", period=5, nx=5)
    g = build_causal_graph(st, 1)
    causal, cycle = is_causal(g)
    valid = (cycle is not None and cycle[0] == cycle[-1]
             and all(g.edge_id(u, v) is not None for u, v in zip(cycle, cycle[1:]))
             and path_length(g, cycle) > 0)
    on_cycle = [distance(g, cycle[0], v).value for v in cycle]
    sweep = tilt_sweep(np.round(np.linspace(0.0, 0.29, 30), 4))
    flags = [c for _, c in sweep]
    first_bad = next((w for w, c in sweep if not c), None)
    ok = (not causal and valid and all(math.isinf(v) for v in on_cycle)
          and transition_is_monotone(sweep) and flags[0] and not flags[-1])
    record(7, ok, f"periodic_time non-causal, witness {' -> '.join(map(str, cycle))}, d = +inf on cycle; "
                  f"tilted sweep monotone with first non-causal omega {first_bad}")
    assert ok


# 8 ---------------------------------------------------------------------------

def shrunken_cone_pairs(st, dt_min, slope_lo, slope_hi):
    c = st.coords()
    dt = c[None, :, 0] - c[:, None, 0]
    if st.ndim == 2:
        dx = c[None, :, 1] - c[:, None, 1]
        inside = (dx >= slope_lo * dt) & (dx <= slope_hi * dt)
    else:
        dx = np.linalg.norm(c[None, :, 1:] - c[:, None, 1:], axis=2)
        inside = dx <= slope_hi * dt
    return (dt >= dt_min) & inside


CRITERION_8_CHARTS = [
    ("minkowski2d", {"dims": (21, 21)}, 4, (-0.7, 0.7)),
    ("custom_finsler_polyhedral", {}, 2, (-0.55, 0.4)),
    ("minkowski3d", {"dims": (7, 7, 7)}, 2, (0.0, 0.5)),
]


def widening_check(name, params, radius, slopes):
    st = builtin_spacetime(name, **params)
    g = build_causal_graph(st, radius)
    rng = np.random.default_rng(8)
    P = rng.integers(g.n, size=400)
    src = np.unique(P)
    Q = rng.integers(g.n, size=400)
    rows = np.searchsorted(src, P)
    d = distance_matrix(g, src)
    vals = [d]
    for e in DEFAULT_SCHEDULE:
        vals.append(distance_matrix(build_causal_graph(st.widened(e), radius), src))
    seq = [v[rows, Q] for v in vals]            # d, then d_eps for decreasing eps
    base = seq[0]
    violations = sum(int(np.sum(x < base - 1e-9 * np.maximum(1, base))) for x in seq[1:])
    violations += sum(int(np.sum(b > a + 1e-9 * np.maximum(1, a))) for a, b in zip(seq[1:], seq[2:]))
    # stable distance estimate against d on well-timelike pairs of this globally hyperbolic chart
    D_est = vals[-1]
    mask = shrunken_cone_pairs(st, 2 * max(st.spacing), *slopes)[src]
    below = int(np.sum(D_est < d - 1e-9))
    rel = float(np.max((D_est[mask] - d[mask]) / d[mask]))
    # the dedicated routine agrees with the matrix sweep
    p = int(src[0])
    q = int(np.flatnonzero(mask[0])[-1])
    sd = stable_distance(st, p, q, DEFAULT_SCHEDULE, radius)
    agree = abs(sd.estimate - D_est[0, q]) <= 1e-12 * max(1.0, D_est[0, q])
    ok = violations == 0 and below == 0 and rel <= 0.05 and agree
    return ok, (f"{name} widening {violations} violations, D_est < d on {below}, "
                f"max rel {rel:.4f} over {int(mask.sum())} timelike pairs")


def test_criterion_8_widening_monotonicity():
    results = [widening_check(*c) for c in CRITERION_8_CHARTS]
    ok = all(r[0] for r in results)
    record(8, ok, f"400 pairs x {len(DEFAULT_SCHEDULE)} eps per chart: " + "; ".join(r[1] for r in results))
    assert ok


# 9 ---------------------------------------------------------------------------

def test_criterion_9_determinism(tmp_path, capsys):
    runs = [
        ["timefn", "--builtin", "minkowski2d", "--seed", "5"],
        ["verify", "formula", "--builtin", "minkowski2d", "--radius", "2", "--sample", "40", "--seed", "5"],
        ["verify", "order", "--builtin", "minkowski2d", "--param", "dims=6,6", "--seed", "5"],
        ["distance", "--builtin", "minkowski2d", "--sample", "20", "--seed", "5", "--witness", "--stable"],
    ]
    mismatched = []
    nfiles = 0
    for i, argv in enumerate(runs):
        dirs = [tmp_path / f"{i}{tag}" for tag in "ab"]
        for d in dirs:
            assert cli_main(argv + ["-o", str(d)]) == 0
        names = sorted(p.name for p in dirs[0].iterdir())
        assert names == sorted(p.name for p in dirs[1].iterdir())
        for name in names:
            nfiles += 1
            if (dirs[0] / name).read_bytes() != (dirs[1] / name).read_bytes():
                mismatched.append(f"{argv[0]}:{name}")
    capsys.readouterr()
    ok = not mismatched
    record(9, ok, f"{nfiles} report/SVG files compared across two runs, {len(mismatched)} differ"
                  + (": " + ", ".join(mismatched) if mismatched else ""))
    assert ok
