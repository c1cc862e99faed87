"""Scenario files: INI-style key-value text describing a spacetime and a run.

Sections
--------
``[grid]``
    ``builtin`` (optional) names a catalog spacetime; extra keys in this
    section are passed as its parameters (``dims``, ``spacing``, ``omega``,
    ``period``, ``nx``, ``periodic_space``).  Without ``builtin``: ``dims``,
    ``spacing`` and optional ``origin`` describe a uniform chart.
``[cones]``
    ``kind = round`` with ``metric`` (rows separated by ``;``) and optional
    ``orientation``; or ``kind = polyhedral`` with ``generators`` (one vector
    per ``;``-separated entry).
``[finsler]``
    ``kind = lorentzian`` (uses the cone metric, or ``metric``) or
    ``kind = custom`` with ``nodes`` and ``values`` of the cross-section profile.
``[identifications]``
    ``periodic`` lists the periodic axes by index, e.g. ``periodic = 0``.
``[run]``
    ``stencil_radius``, ``eps_schedule``, ``seed``, ``threads``.
``[pairs]``
    ``list = 0,0 -> 4,2; 1,0 -> 5,1`` and/or ``sample`` (count, needs ``seed``).
``[fiber]``
    ``levels``, ``spacing``.
``[timefn]``
    ``a_samples``, ``eps_max``, ``measure`` (uniform|gaussian), ``sigma_frac``.
``[family]``
    ``max_members``, ``max_targets``, ``level_sets``, ``franco``, ``linear``.
``[verify]``
    ``rel_tol``, ``spacing_tol``, ``quantum``, ``targeted``, ``budget``,
    ``point``, ``box`` (two corners separated by ``;``).

Every real number is parsed with :class:`decimal.Decimal` first, so values
like ``1e`` or ``0x10`` are rejected rather than guessed.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .causal import DEFAULT_SCHEDULE
from .geometry import (BUILTIN_NAMES, Spacetime, builtin_spacetime, custom_finsler,
                       lorentzian_finsler, polyhedral_cone, round_cone, uniform_spacetime)

SECTIONS = ("grid", "cones", "finsler", "identifications", "run", "pairs", "fiber",
            "timefn", "family", "verify")


class ScenarioError(ValueError):
    """Malformed scenario; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass
class ScenarioConfig:
    grid: dict
    cones: dict = field(default_factory=dict)
    finsler: dict = field(default_factory=dict)
    periodic: tuple[int, ...] = ()
    stencil_radius: int = 1
    eps_schedule: tuple[float, ...] = DEFAULT_SCHEDULE
    seed: int | None = None
    threads: int = 1
    pairs: list = field(default_factory=list)
    sample: int = 0
    fiber_levels: int = 9
    fiber_spacing: float | None = None
    a_samples: int = 8
    eps_max: float = 0.3
    measure: str = "gaussian"
    sigma_frac: tuple[float, float] = (0.5, 0.125)
    max_members: int | None = None
    max_targets: int = 256
    level_sets: bool = True
    franco: bool = True
    linear: bool = True
    rel_tol: float = 0.05
    spacing_tol: float | None = None
    quantum: float | None = None
    targeted: bool = True
    budget: int = 5000
    point: tuple[int, ...] | None = None
    box: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    source: str = "<builtin>"

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("source")
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def spacetime(self) -> Spacetime:
        return build_spacetime(self)


# ---------------------------------------------------------------------------
# value parsers
# ---------------------------------------------------------------------------

def parse_real(text: str) -> float:
    try:
        v = Decimal(text.strip())
    except InvalidOperation:
        raise ValueError(f"{text.strip()!r} is not a decimal number") from None
    if not v.is_finite():
        raise ValueError(f"{text.strip()!r} is not finite")
    return float(v)


def parse_int(text: str) -> int:
    s = text.strip()
    if not re.fullmatch(r"[+-]?\d+", s):
        raise ValueError(f"{s!r} is not an integer")
    return int(s)


def parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "yes", "true", "on"):
        return True
    if s in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"{text.strip()!r} is not a boolean")


def parse_reals(text: str) -> tuple[float, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(parse_real(p) for p in parts)


def parse_ints(text: str) -> tuple[int, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(parse_int(p) for p in parts)


def parse_rows(text: str) -> list[tuple[float, ...]]:
    rows = [r for r in text.split(";") if r.strip()]
    if not rows:
        raise ValueError("empty matrix")
    return [parse_reals(r) for r in rows]


def parse_pairs(text: str) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        if "->" not in item:
            raise ValueError(f"pair {item.strip()!r} needs the form 'a,b -> c,d'")
        a, b = item.split("->", 1)
        out.append((parse_ints(a), parse_ints(b)))
    return out


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def _line_index(text: str) -> dict[tuple[str, str], int]:
    """Line number of every ``key`` inside every ``[section]``."""
    idx = {}
    section = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            idx[(section, "")] = i
            continue
        m = re.match(r"([^=:#;]+?)\s*[=:]", line)
        if m and section and not line.startswith(("#", ";")):
            idx.setdefault((section, m.group(1).strip().lower()), i)
    return idx


GRID_PARAM_PARSERS = {
    "dims": parse_ints,
    "spacing": parse_real,
    "omega": parse_real,
    "period": parse_int,
    "nx": parse_int,
    "periodic_space": parse_bool,
}


def load_scenario(path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text, str(path))


def parse_scenario(text: str, source: str = "<string>") -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text, source=source)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ScenarioError(f"cannot parse: {exc.errors[0][1].strip() if exc.errors else exc}", line) from None
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ScenarioError(str(exc).splitlines()[0], line) from None
    lines = _line_index(text)

    for sec in cp.sections():
        if sec.lower() not in SECTIONS:
            raise ScenarioError(f"unknown section [{sec}]", lines.get((sec.lower(), "")))
    if not cp.has_section("grid"):
        raise ScenarioError("missing [grid] section", None, "grid")

    def get(sec, key, parser, default=None):
        if not cp.has_option(sec, key):
            return default
        try:
            return parser(cp.get(sec, key))
        except (ValueError, IndexError) as exc:
            raise ScenarioError(f"[{sec}] {key}: {exc}", lines.get((sec, key)), f"{sec}.{key}") from None

    def check_keys(sec, allowed):
        if not cp.has_section(sec):
            return
        for key in cp.options(sec):
            if key not in allowed:
                raise ScenarioError(f"[{sec}] unknown key {key!r}", lines.get((sec, key)), f"{sec}.{key}")

    cfg = ScenarioConfig(grid={}, source=source)

    # grid
    if cp.has_option("grid", "builtin"):
        name = cp.get("grid", "builtin").strip()
        if name not in BUILTIN_NAMES:
            raise ScenarioError(f"[grid] builtin: unknown spacetime {name!r}",
                                lines.get(("grid", "builtin")), "grid.builtin")
        check_keys("grid", {"builtin", *GRID_PARAM_PARSERS})
        params = {k: get("grid", k, GRID_PARAM_PARSERS[k]) for k in cp.options("grid") if k != "builtin"}
        cfg.grid = {"builtin": name, **params}
        for sec in ("cones", "finsler", "identifications"):
            if cp.has_section(sec):
                raise ScenarioError(f"[{sec}] is not allowed together with a builtin spacetime",
                                    lines.get((sec, "")), sec)
    else:
        check_keys("grid", {"dims", "spacing", "origin"})
        dims = get("grid", "dims", parse_ints)
        if dims is None:
            raise ScenarioError("[grid] dims is required", lines.get(("grid", "")), "grid.dims")
        cfg.grid = {"dims": dims, "spacing": get("grid", "spacing", parse_reals, (1.0,)),
                    "origin": get("grid", "origin", parse_reals, None)}
        if not cp.has_section("cones"):
            raise ScenarioError("missing [cones] section", None, "cones")
        check_keys("cones", {"kind", "metric", "orientation", "generators"})
        kind = cp.get("cones", "kind", fallback="round").strip()
        if kind == "round":
            metric = get("cones", "metric", parse_rows)
            if metric is None:
                raise ScenarioError("[cones] metric is required for round cones", lines.get(("cones", "")), "cones.metric")
            cfg.cones = {"kind": "round", "metric": metric,
                         "orientation": get("cones", "orientation", parse_reals)}
        elif kind == "polyhedral":
            gens = get("cones", "generators", parse_rows)
            if gens is None:
                raise ScenarioError("[cones] generators is required for polyhedral cones",
                                    lines.get(("cones", "")), "cones.generators")
            cfg.cones = {"kind": "polyhedral", "generators": gens}
        else:
            raise ScenarioError(f"[cones] kind: unknown kind {kind!r}", lines.get(("cones", "kind")), "cones.kind")
        check_keys("finsler", {"kind", "metric", "nodes", "values"})
        fkind = cp.get("finsler", "kind", fallback="lorentzian").strip() if cp.has_section("finsler") else "lorentzian"
        if fkind == "lorentzian":
            cfg.finsler = {"kind": "lorentzian", "metric": get("finsler", "metric", parse_rows)}
        elif fkind == "custom":
            nodes = get("finsler", "nodes", parse_reals)
            values = get("finsler", "values", parse_reals)
            if nodes is None or values is None:
                raise ScenarioError("[finsler] custom kind needs nodes and values",
                                    lines.get(("finsler", "")), "finsler.nodes")
            cfg.finsler = {"kind": "custom", "nodes": nodes, "values": values}
        else:
            raise ScenarioError(f"[finsler] kind: unknown kind {fkind!r}",
                                lines.get(("finsler", "kind")), "finsler.kind")
        check_keys("identifications", {"periodic"})
        per = cp.get("identifications", "periodic", fallback="").strip() if cp.has_section("identifications") else ""
        cfg.periodic = get("identifications", "periodic", parse_ints, ()) if per else ()

    # run
    check_keys("run", {"stencil_radius", "eps_schedule", "seed", "threads"})
    cfg.stencil_radius = get("run", "stencil_radius", parse_int, 1)
    cfg.eps_schedule = get("run", "eps_schedule", parse_reals, DEFAULT_SCHEDULE)
    cfg.seed = get("run", "seed", parse_int, None)
    cfg.threads = get("run", "threads", parse_int, 1)
    if cfg.stencil_radius < 1:
        raise ScenarioError("[run] stencil_radius must be >= 1", lines.get(("run", "stencil_radius")), "run.stencil_radius")
    if cfg.threads < 1:
        raise ScenarioError("[run] threads must be >= 1", lines.get(("run", "threads")), "run.threads")
    eps = cfg.eps_schedule
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ScenarioError("[run] eps_schedule must be positive and strictly decreasing",
                            lines.get(("run", "eps_schedule")), "run.eps_schedule")

    check_keys("pairs", {"list", "sample"})
    cfg.pairs = get("pairs", "list", parse_pairs, [])
    cfg.sample = get("pairs", "sample", parse_int, 0)
    if cfg.sample < 0:
        raise ScenarioError("[pairs] sample must be >= 0", lines.get(("pairs", "sample")), "pairs.sample")
    if cfg.sample and cfg.seed is None:
        raise ScenarioError("[pairs] sample needs [run] seed", lines.get(("pairs", "sample")), "run.seed")

    check_keys("fiber", {"levels", "spacing"})
    cfg.fiber_levels = get("fiber", "levels", parse_int, 9)
    cfg.fiber_spacing = get("fiber", "spacing", parse_real, None)
    if cfg.fiber_levels < 2:
        raise ScenarioError("[fiber] levels must be >= 2", lines.get(("fiber", "levels")), "fiber.levels")
    if cfg.fiber_spacing is not None and cfg.fiber_spacing <= 0:
        raise ScenarioError("[fiber] spacing must be positive", lines.get(("fiber", "spacing")), "fiber.spacing")

    check_keys("timefn", {"a_samples", "eps_max", "measure", "sigma_frac"})
    cfg.a_samples = get("timefn", "a_samples", parse_int, 8)
    cfg.eps_max = get("timefn", "eps_max", parse_real, 0.3)
    cfg.measure = cp.get("timefn", "measure", fallback="gaussian").strip() if cp.has_section("timefn") else "gaussian"
    cfg.sigma_frac = get("timefn", "sigma_frac", parse_reals, (0.5, 0.125))
    if cfg.measure not in ("uniform", "gaussian"):
        raise ScenarioError("[timefn] measure must be uniform or gaussian", lines.get(("timefn", "measure")), "timefn.measure")
    if cfg.a_samples < 1:
        raise ScenarioError("[timefn] a_samples must be >= 1", lines.get(("timefn", "a_samples")), "timefn.a_samples")
    if cfg.eps_max <= 0:
        raise ScenarioError("[timefn] eps_max must be positive", lines.get(("timefn", "eps_max")), "timefn.eps_max")
    if len(cfg.sigma_frac) != 2 or min(cfg.sigma_frac) <= 0:
        raise ScenarioError("[timefn] sigma_frac needs two positive numbers",
                            lines.get(("timefn", "sigma_frac")), "timefn.sigma_frac")

    check_keys("family", {"max_members", "max_targets", "level_sets", "franco", "linear"})
    cfg.max_members = get("family", "max_members", parse_int, None)
    cfg.max_targets = get("family", "max_targets", parse_int, 256)
    cfg.level_sets = get("family", "level_sets", parse_bool, True)
    cfg.franco = get("family", "franco", parse_bool, True)
    cfg.linear = get("family", "linear", parse_bool, True)
    if cfg.max_members is not None and cfg.max_members < 1:
        raise ScenarioError("[family] max_members must be >= 1", lines.get(("family", "max_members")), "family.max_members")

    check_keys("verify", {"rel_tol", "spacing_tol", "quantum", "targeted", "budget", "point", "box"})
    cfg.rel_tol = get("verify", "rel_tol", parse_real, 0.05)
    cfg.spacing_tol = get("verify", "spacing_tol", parse_real, None)
    cfg.quantum = get("verify", "quantum", parse_real, None)
    cfg.targeted = get("verify", "targeted", parse_bool, True)
    cfg.budget = get("verify", "budget", parse_int, 5000)
    cfg.point = get("verify", "point", parse_ints, None)
    box = get("verify", "box", lambda s: [parse_ints(c) for c in s.split(";") if c.strip()], None)
    if box is not None:
        if len(box) != 2:
            raise ScenarioError("[verify] box needs two corners separated by ';'", lines.get(("verify", "box")), "verify.box")
        cfg.box = (box[0], box[1])

    # catch spacetime construction problems here, with the grid line as anchor
    try:
        build_spacetime(cfg)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"[grid] {exc}", lines.get(("grid", "")), "grid") from None
    return cfg


def builtin_config(name: str, **params) -> ScenarioConfig:
    cfg = ScenarioConfig(grid={"builtin": name, **params})
    build_spacetime(cfg)
    return cfg


def build_spacetime(cfg: ScenarioConfig) -> Spacetime:
    grid = cfg.grid
    if "builtin" in grid:
        params = {k: (tuple(v) if isinstance(v, (list, tuple)) else v)
                  for k, v in grid.items() if k != "builtin"}
        return builtin_spacetime(grid["builtin"], **params)
    dims = tuple(grid["dims"])
    spacing = grid["spacing"]
    spacing = spacing * len(dims) if len(spacing) == 1 else spacing
    if len(spacing) != len(dims):
        raise ValueError("spacing needs one value or one per axis")
    c = cfg.cones
    if c["kind"] == "round":
        cone = round_cone(np.array(c["metric"]), None if c["orientation"] is None else np.array(c["orientation"]))
    else:
        cone = polyhedral_cone(np.array(c["generators"]))
    f = cfg.finsler
    if f["kind"] == "lorentzian":
        metric = f.get("metric") or (c.get("metric") if c["kind"] == "round" else None)
        if metric is None:
            raise ValueError("lorentzian F on a polyhedral cone needs [finsler] metric")
        F = lorentzian_finsler(np.array(metric))
    else:
        F = custom_finsler(np.array(f["nodes"]), np.array(f["values"]), len(dims))
    periodic = tuple(i in cfg.periodic for i in range(len(dims)))
    if any(i < 0 or i >= len(dims) for i in cfg.periodic):
        raise ValueError("periodic axis index out of range")
    origin = grid.get("origin")
    st = uniform_spacetime(dims, tuple(spacing), cone, F, origin=origin, periodic=periodic, name="scenario")
    st.validate()
    return st
