"""Command-line entry point: ``steeptime {distance,timefn,verify,scenario-validate}``.

Exit codes: 0 success, 1 soft verification failure (tolerance), 2 bad
configuration or arguments, 3 closed causal curve or infinite distance,
4 failure of an unconditional check.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .causal import CausalityError, build_causal_graph, find_cycle, seifert_relation
from .distance import distance, stable_distance
from .geometry import Spacetime
from .scenario import (GRID_PARAM_PARSERS, ScenarioConfig, ScenarioError, builtin_config,
                       load_scenario, parse_pairs)

EXIT_OK, EXIT_SOFT, EXIT_CONFIG, EXIT_CYCLE, EXIT_HARD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load(args) -> ScenarioConfig:
    if args.scenario and args.builtin:
        raise UsageError("give either a scenario file or --builtin, not both")
    if args.scenario:
        cfg = load_scenario(args.scenario)
    elif args.builtin:
        params = {}
        for item in args.param or []:
            if "=" not in item:
                raise UsageError(f"--param {item!r}: expected key=value")
            k, v = item.split("=", 1)
            k = k.strip()
            if k not in GRID_PARAM_PARSERS:
                raise UsageError(f"--param {k!r}: unknown grid parameter")
            try:
                params[k] = GRID_PARAM_PARSERS[k](v)
            except ValueError as exc:
                raise UsageError(f"--param {k}: {exc}") from None
        try:
            cfg = builtin_config(args.builtin, **params)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("a scenario file or --builtin NAME is required")
    if getattr(args, "radius", None) is not None:
        cfg.stencil_radius = args.radius
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "threads", None) is not None:
        cfg.threads = args.threads
    if getattr(args, "pair", None):
        cfg.pairs = []
        for item in args.pair:
            try:
                cfg.pairs += parse_pairs(item)
            except ValueError as exc:
                raise UsageError(f"--pair: {exc}") from None
    if getattr(args, "max_members", None) is not None:
        if args.max_members < 1:
            raise UsageError("--max-members must be >= 1")
        cfg.max_members = args.max_members
    if getattr(args, "no_targeted", False):
        cfg.targeted = False
    if getattr(args, "sample", None) is not None:
        cfg.sample = args.sample
        if cfg.seed is None:
            raise UsageError("--sample needs a seed (--seed or [run] seed)")
    return cfg


def _pairs(cfg: ScenarioConfig, st: Spacetime) -> list[tuple[int, int]]:
    out = []
    for a, b in cfg.pairs:
        try:
            out.append((st.node(a), st.node(b)))
        except IndexError as exc:
            raise UsageError(f"pair {a} -> {b}: {exc}") from None
    if cfg.sample:
        rng = np.random.default_rng(cfg.seed)
        pq = rng.integers(st.n_nodes, size=(cfg.sample, 2))
        out += [(int(p), int(q)) for p, q in pq]
    return out


def _versions() -> dict:
    import matplotlib
    import scipy

    return {"steeptime": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "matplotlib": matplotlib.__version__, "python": platform.python_version()}


def _write_manifest(out: Path, cfg: ScenarioConfig, command: str, files: Sequence[str]) -> None:
    digests = {}
    for name in sorted(files):
        digests[name] = hashlib.sha256((out / name).read_bytes()).hexdigest()
    manifest = {"command": command, "config_hash": cfg.config_hash(), "config": cfg.to_dict(),
                "versions": _versions(), "files": digests}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n",
                                       encoding="utf-8")


def _family_config(cfg: ScenarioConfig):
    from .timefn import FamilyConfig

    return FamilyConfig(fiber_levels=cfg.fiber_levels, fiber_spacing=cfg.fiber_spacing,
                        eps_max_values=(cfg.eps_max, cfg.eps_max / 2), a_samples=cfg.a_samples,
                        measure=cfg.measure, sigma_frac=tuple(cfg.sigma_frac),
                        franco=cfg.franco, max_targets=cfg.max_targets, seed=cfg.seed or 0,
                        linear=cfg.linear, level_sets=cfg.level_sets, workers=cfg.threads)


def _family(cfg: ScenarioConfig, st: Spacetime, g):
    from .timefn import build_steep_family

    fam = build_steep_family(st, g, _family_config(cfg))
    if cfg.max_members is not None and len(fam) > cfg.max_members:
        fam.members = fam.members[:cfg.max_members]
    return fam


def _report_cycle(exc: CausalityError) -> int:
    print(f"error: {exc}", file=sys.stderr)
    if exc.cycle:
        print("witness cycle: " + " -> ".join(str(v) for v in exc.cycle), file=sys.stderr)
    return EXIT_CYCLE


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_distance(args) -> int:
    cfg = _load(args)
    st = cfg.spacetime()
    pairs = _pairs(cfg, st)
    if not pairs:
        raise UsageError("no pairs given (use [pairs] list/sample or --pair)")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    g = build_causal_graph(st, cfg.stencil_radius)
    rows, witnesses, stable_rows = [], [], []
    infinite = False
    for p, q in pairs:
        res = distance(g, p, q, witness=args.witness)
        rows.append((p, q, res.value))
        infinite |= not res.finite
        if args.witness:
            path = "" if res.witness is None else " ".join(str(v) for v in res.witness)
            witnesses.append(f"{p},{q}: {path}")
        if args.stable:
            sd = stable_distance(st, p, q, cfg.eps_schedule, cfg.stencil_radius)
            stable_rows += [(p, q, e, v) for e, v in zip(sd.eps, sd.values)]
    from .distance import export_distance_table

    files = ["distance.csv"]
    export_distance_table(out / "distance.csv", rows)
    if args.witness:
        (out / "witness.txt").write_text("\n".join(witnesses) + "\n", encoding="utf-8")
        files.append("witness.txt")
    if args.stable:
        with (out / "stable.csv").open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("source,target,eps,value\n")
            for p, q, e, v in stable_rows:
                fh.write(f"{p},{q},{e:.12g},{v:.12g}\n" if math.isfinite(v) else f"{p},{q},{e:.12g},inf\n")
        files.append("stable.csv")
    _write_manifest(out, cfg, "distance", files)
    for p, q, v in rows:
        print(f"{p},{q},{v:.12g}" if math.isfinite(v) else f"{p},{q},inf")
    if infinite and not args.allow_infinite:
        print("error: infinite distance (closed causal curve); pass --allow-infinite to accept",
              file=sys.stderr)
        return EXIT_CYCLE
    return EXIT_OK


def _write_values(path: Path, header: str, rows) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _fmt(v: float) -> str:
    return f"{v:.12g}" if math.isfinite(v) else ""


def _plot_levels(path: Path, st: Spacetime, g, t: np.ndarray, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from .geometry import boundary_rays

    matplotlib.rcParams["svg.hashsalt"] = "steeptime"
    coords = st.coords()
    sl = np.ones(st.n_nodes, dtype=bool)
    if st.ndim == 3:                       # middle slice of the last axis
        mid = st.dims[2] // 2
        sl = np.array(np.unravel_index(np.arange(st.n_nodes), st.dims))[2] == mid
    T = coords[sl, 0].reshape(st.dims[0], st.dims[1])
    X = coords[sl, 1].reshape(st.dims[0], st.dims[1])
    V = t[sl].reshape(st.dims[0], st.dims[1])
    fig, ax = plt.subplots(figsize=(5, 5))
    if np.isfinite(V).sum() >= 4 and np.nanmax(V) > np.nanmin(V):
        cs = ax.contour(X, T, np.ma.masked_invalid(V), levels=10, colors="k", linewidths=0.8)
        ax.clabel(cs, fontsize=6, fmt="%.2f")
    ax.scatter(X[~np.isfinite(V)], T[~np.isfinite(V)], marker="x", s=12, color="tab:red")
    # cones at a few nodes, drawn with their two boundary rays
    step = max(1, st.dims[0] // 3)
    scale = 0.4 * min(st.spacing[:2])
    for i in range(step // 2, st.dims[0], step):
        for j in range(step // 2, st.dims[1], step):
            node = st.node((i, j) + ((st.dims[2] // 2,) if st.ndim == 3 else ()))
            cone, _ = st.pair_at(node)
            c0 = coords[node]
            if st.ndim == 2:
                rays = boundary_rays(cone, 2) if cone.kind == "round" else cone.generators
                for r in rays:
                    r = r / np.linalg.norm(r) * scale
                    ax.plot([c0[1], c0[1] + r[1]], [c0[0], c0[0] + r[0]], color="tab:blue", lw=1)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title(title, fontsize=9)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_timefn(args) -> int:
    from .product import ProductSpacetime
    from .timefn import (Measure, averaged_functions, centered_measure, common_level_range,
                         default_fiber_spacing, geroch_tau, is_steep, level_set_graph,
                         strictly_increasing)

    cfg = _load(args)
    st = cfg.spacetime()
    g = build_causal_graph(st, cfg.stencil_radius)
    if not g.acyclic:
        return _report_cycle(CausalityError("the causal graph has a closed causal curve", find_cycle(g)))
    h = default_fiber_spacing(g, cfg.fiber_spacing)
    ps = ProductSpacetime(g, cfg.fiber_levels, h)
    mu = centered_measure(ps, *cfg.sigma_frac) if cfg.measure == "gaussian" else Measure.uniform(ps.n)
    try:
        avg = averaged_functions(ps, mu, cfg.a_samples, cfg.eps_max)
    except CausalityError as exc:
        return _report_cycle(exc)
    tau = geroch_tau(avg.down, avg.up)
    lo, hi = common_level_range(tau, ps)
    level = args.level if args.level is not None else (0.5 * (lo + hi) if lo <= hi else 0.0)
    t = level_set_graph(tau, ps, level)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base, k = ps.split(np.arange(ps.n))
    for name, fn in (("tau_down.csv", avg.down), ("tau_up.csv", avg.up), ("tau.csv", tau)):
        _write_values(out / name, "node,base_node,level,fiber,value",
                      ([str(i), str(b), str(kk), _fmt(ps.fiber_coordinate(kk)), _fmt(v)]
                       for i, (b, kk, v) in enumerate(zip(base, k, fn.values))))
    _write_values(out / "level_set.csv", "base_node,value",
                  ([str(i), _fmt(v)] for i, v in enumerate(t.values)))
    chk = is_steep(t, g, tol=h)
    exact = is_steep(t, g)
    mono = [strictly_increasing(f, ps)[1] for f in (avg.down, avg.up, tau)]
    summary = [
        "time function summary",
        f"product = {st.n_nodes} base nodes x {ps.fiber_levels} fiber levels, fiber spacing {h:.6g}",
        f"a_samples = {cfg.a_samples}, eps_max = {cfg.eps_max:.6g}, measure = {cfg.measure}",
        f"non_increasing_edges tau_down/tau_up/tau = {mono[0]}/{mono[1]}/{mono[2]} of {ps.n_edges}",
        f"common_level_range = [{lo:.9f}, {hi:.9f}]",
        f"level = {level:.9f}",
        f"missing_columns = {t.info['missing']}",
        f"steep_margin = {exact.margin:.9f} (within one fiber quantum: {'yes' if chk.ok else 'no'}; "
        f"exact: {'yes' if exact.ok else 'no'})",
    ]
    (out / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    _plot_levels(out / "level_set.svg", st, g, t.values, f"level set of tau at {level:.4g}")
    _write_manifest(out, cfg, "timefn", ["tau_down.csv", "tau_up.csv", "tau.csv", "level_set.csv",
                                         "summary.txt", "level_set.svg"])
    print("\n".join(summary))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .formula import (TopologyRefusal, verify_distance_formula, verify_order_representation,
                          verify_properties, verify_topology_separation)
    from .product import BudgetExceeded, verify_vyv

    cfg = _load(args)
    st = cfg.spacetime()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    which = args.which
    files = [f"{which}.txt"]
    if which == "vyv":
        try:
            rep = verify_vyv(st, cfg.fiber_levels, cfg.fiber_spacing or 1.0, cfg.eps_schedule,
                             cfg.stencil_radius, cfg.budget)
        except BudgetExceeded as exc:
            raise UsageError(str(exc)) from None
        code = EXIT_OK if rep.passed else EXIT_SOFT
    else:
        g = build_causal_graph(st, cfg.stencil_radius)
        if not g.acyclic:
            return _report_cycle(CausalityError("the causal graph has a closed causal curve", find_cycle(g)))
        if which == "properties":
            rep = verify_properties(st, g, seed=cfg.seed or 0, eps_schedule=cfg.eps_schedule)
            code = rep.exit_code
        else:
            fam = _family(cfg, st, g)
            if which == "formula":
                pairs = _pairs(cfg, st)
                if not pairs:
                    if st.n_nodes ** 2 > 40000:
                        raise UsageError("grid too large for the all-pairs default; give pairs")
                    pairs = [(p, q) for p in range(st.n_nodes) for q in range(st.n_nodes) if p != q]
                rep = verify_distance_formula(st, g, fam, pairs, cfg.rel_tol, cfg.spacing_tol, cfg.quantum)
                rep.to_csv(out / "formula.csv")
                files.append("formula.csv")
            elif which == "order":
                rel = seifert_relation(st, cfg.eps_schedule, cfg.stencil_radius).relation
                pairs = _pairs(cfg, st) or None
                rep = verify_order_representation(g, rel, fam, pairs, targeted=cfg.targeted)
            else:
                point = cfg.point if cfg.point is not None else tuple(n // 2 for n in st.dims)
                if cfg.box is not None:
                    box = cfg.box
                else:
                    box = (tuple(max(0, c - 2) for c in point),
                           tuple(min(n - 1, c + 2) for c, n in zip(point, st.dims)))
                try:
                    rep = verify_topology_separation(st, g, fam, point, box)
                except (TopologyRefusal, IndexError) as exc:
                    raise UsageError(f"topology: {exc}") from None
            code = rep.exit_code
    text = rep.to_text()
    (out / f"{which}.txt").write_text(text, encoding="utf-8")
    _write_manifest(out, cfg, f"verify {which}", files)
    print(text.split("\n")[0] + ": " + next(l for l in text.splitlines() if l.startswith("status")))
    return code


def cmd_validate(args) -> int:
    cfg = _load(args)
    st = cfg.spacetime()
    g = build_causal_graph(st, cfg.stencil_radius)
    print(f"scenario {cfg.source}: ok")
    print(f"grid = {'x'.join(map(str, st.dims))}, spacing = {', '.join(f'{s:g}' for s in st.spacing)}")
    print(f"periodic axes = {[i for i, p in enumerate(st.periodic) if p]}")
    print(f"cone fields = {len(st.fields)}")
    print(f"stencil radius = {cfg.stencil_radius}, edges = {g.n_edges}, acyclic = {g.acyclic}")
    print(f"config hash = {cfg.config_hash()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, out_default: str | None = "out") -> None:
    p.add_argument("scenario", nargs="?", help="scenario file (INI key-value text)")
    p.add_argument("--builtin", help="catalog spacetime instead of a scenario file")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="parameter of the builtin spacetime, e.g. dims=9,9 (repeatable)")
    p.add_argument("--radius", type=int, help="stencil radius (overrides the scenario)")
    p.add_argument("--seed", type=int, help="random seed (overrides the scenario)")
    p.add_argument("--threads", type=int, help="cap on worker threads (default 1)")
    if out_default is not None:
        p.add_argument("-o", "--out", default=out_default, help=f"output directory (default {out_default})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steeptime", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="longest-path distance for node pairs")
    _common(p)
    p.add_argument("--pair", action="append", metavar="'a,b -> c,d'", help="pair of multi-indices (repeatable)")
    p.add_argument("--sample", type=int, help="number of random pairs (needs a seed)")
    p.add_argument("--witness", action="store_true", help="also write maximising paths")
    p.add_argument("--stable", action="store_true", help="also write the widened distances per eps")
    p.add_argument("--allow-infinite", action="store_true", help="exit 0 even if some distance is infinite")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("timefn", help="averaged time functions and their level set")
    _common(p)
    p.add_argument("--level", type=float, help="level of the extracted graph (default: middle of the common range)")
    p.set_defaults(func=cmd_timefn)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("which", choices=["formula", "order", "topology", "vyv", "properties"])
    _common(p)
    p.add_argument("--pair", action="append", metavar="'a,b -> c,d'", help="pair of multi-indices (repeatable)")
    p.add_argument("--sample", type=int, help="number of random pairs (needs a seed)")
    p.add_argument("--max-members", type=int, help="keep only the first N family members")
    p.add_argument("--no-targeted", action="store_true",
                   help="order check: report unseparated pairs without generating new members")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scenario-validate", help="parse a scenario and report the grid")
    _common(p, out_default=None)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CausalityError as exc:
        return _report_cycle(exc)


if __name__ == "__main__":
    sys.exit(main())
