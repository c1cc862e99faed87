"""Cone fields and Lorentz-Finsler length functionals on a gridded chart.

Vectors are plain numpy arrays in chart components, component 0 being the
time coordinate.  A cone is either *round* (given by a Lorentzian metric and
a time-orientation covector) or *polyhedral* (given by generator rays).  The
length functional is either the Lorentzian one, ``sqrt(-g(y, y))``, or a
*custom* positive-homogeneous concave function tabulated on the cross-section
``y0 = 1`` of the cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, nnls

MEMBERSHIP_TOL = 1e-10


class InvalidInputError(ValueError):
    """Raised for malformed vectors (e.g. the zero vector in a cone query)."""


class DomainError(ValueError):
    """Raised when a length functional is evaluated outside its cone."""


class InvalidParameterError(ValueError):
    """Raised for geometric parameters that break sharpness or concavity."""


def _as_vector(y) -> np.ndarray:
    v = np.asarray(y, dtype=float)
    if v.ndim != 1 or v.size not in (2, 3):
        raise InvalidInputError(f"tangent vectors must have 2 or 3 components, got shape {v.shape}")
    return v


def _check_nonzero(v: np.ndarray) -> None:
    if not np.any(v):
        raise InvalidInputError("the zero vector is not a cone element")


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConeSpec:
    """A closed, sharp, convex cone in one tangent space.

    Use :func:`round_cone` or :func:`polyhedral_cone` to build instances; the
    constructors validate sharpness.
    """

    kind: str
    metric: np.ndarray | None = None
    orientation: np.ndarray | None = None
    generators: np.ndarray | None = None

    @property
    def dim(self) -> int:
        if self.kind == "round":
            return self.metric.shape[0]
        return self.generators.shape[1]

    def __repr__(self) -> str:
        if self.kind == "round":
            return f"ConeSpec(round, metric={self.metric.tolist()})"
        return f"ConeSpec(polyhedral, {len(self.generators)} generators)"


def round_cone(metric, orientation=None) -> ConeSpec:
    """Future cone ``{g(y, y) <= 0, orientation(y) > 0}`` of a Lorentzian metric.

    ``orientation`` defaults to ``dt``.  It has to be a timelike covector.
    """
    g = np.array(metric, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] not in (2, 3):
        raise InvalidParameterError("metric must be a 2x2 or 3x3 matrix")
    if not np.allclose(g, g.T, atol=1e-12):
        raise InvalidParameterError("metric must be symmetric")
    eig = np.linalg.eigvalsh(g)
    if not (eig[0] < 0 and np.all(eig[1:] > 0)):
        raise InvalidParameterError(f"metric must have Lorentzian signature, eigenvalues {eig}")
    w = np.zeros(g.shape[0]) if orientation is None else np.array(orientation, dtype=float)
    if orientation is None:
        w[0] = 1.0
    if w.shape != (g.shape[0],):
        raise InvalidParameterError("orientation covector has the wrong dimension")
    if w @ np.linalg.solve(g, w) >= 0:
        raise InvalidParameterError("orientation covector is not timelike for this metric")
    g.setflags(write=False)
    w.setflags(write=False)
    return ConeSpec("round", metric=g, orientation=w)


def _strictly_positive_covector(gens: np.ndarray) -> np.ndarray | None:
    """Covector w with w(g) >= 1 on every generator, or None if there is none."""
    n = gens.shape[1]
    res = linprog(np.zeros(n), A_ub=-gens, b_ub=-np.ones(len(gens)),
                  bounds=[(None, None)] * n, method="highs")
    return res.x if res.status == 0 else None


def polyhedral_cone(generators) -> ConeSpec:
    """Cone of nonnegative combinations of the given generator rays."""
    gens = np.array(generators, dtype=float)
    if gens.ndim != 2 or gens.shape[1] not in (2, 3) or len(gens) < gens.shape[1]:
        raise InvalidParameterError("need at least `dim` generators of dimension 2 or 3")
    norms = np.linalg.norm(gens, axis=1)
    if np.any(norms == 0):
        raise InvalidParameterError("zero generator")
    gens = gens / norms[:, None]
    if _strictly_positive_covector(gens) is None:
        raise InvalidParameterError("generators do not span a sharp cone")
    if np.linalg.matrix_rank(gens) < gens.shape[1]:
        raise InvalidParameterError("polyhedral cone has empty interior")
    gens.setflags(write=False)
    return ConeSpec("polyhedral", generators=gens)


def cone_contains(cone: ConeSpec, y, tol: float = MEMBERSHIP_TOL) -> bool:
    v = _as_vector(y)
    _check_nonzero(v)
    return bool(contains_many(cone, v[None, :], tol)[0])


def contains_many(cone: ConeSpec, ys, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Vectorised membership for the rows of ``ys``; zero rows are excluded."""
    Y = np.atleast_2d(np.asarray(ys, dtype=float))
    norm2 = np.einsum("ij,ij->i", Y, Y)
    out = np.zeros(len(Y), dtype=bool)
    nz = norm2 > 0
    if cone.kind == "round":
        q = np.einsum("ij,jk,ik->i", Y, cone.metric, Y)
        scale = np.abs(cone.metric).max()
        out = nz & (q <= tol * scale * norm2) & (Y @ cone.orientation > 0)
        return out
    G = cone.generators.T
    for i in np.flatnonzero(nz):
        _, resid = nnls(G, Y[i])
        out[i] = resid <= tol * math.sqrt(norm2[i])
    return out


def cone_axis(cone: ConeSpec) -> np.ndarray:
    """A unit vector in the interior of the cone."""
    if cone.kind == "round":
        v = -np.linalg.solve(cone.metric, cone.orientation)
    else:
        v = cone.generators.mean(axis=0)
    return v / np.linalg.norm(v)


def boundary_rays(cone: ConeSpec, n: int = 64) -> np.ndarray:
    """Unit vectors on the boundary of the cone (generators for polyhedral)."""
    if cone.kind == "polyhedral":
        return np.array(cone.generators)
    dim = cone.dim
    a = cone_axis(cone)
    if dim == 2:
        e = np.array([-a[1], a[0]])
        dirs = [e, -e]
    else:
        basis = np.linalg.svd(a[None, :])[2][1:]
        ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
        dirs = list(np.cos(ang)[:, None] * basis[0] + np.sin(ang)[:, None] * basis[1])
    rays = []
    for e in dirs:
        # g(a + s e, a + s e) = 0 for the positive root s
        A, B, C = e @ cone.metric @ e, 2 * a @ cone.metric @ e, a @ cone.metric @ a
        s = (-B + math.sqrt(B * B - 4 * A * C)) / (2 * A)
        r = a + s * e
        rays.append(r / np.linalg.norm(r))
    return np.array(rays)


def sample_cone(cone: ConeSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random cone vectors: nonnegative combinations of boundary rays."""
    rays = boundary_rays(cone)
    coef = rng.random((n, len(rays))) ** 3
    coef *= rng.uniform(0.1, 10.0, size=(n, 1)) / coef.sum(axis=1, keepdims=True)
    return coef @ rays


# ---------------------------------------------------------------------------
# Lorentz-Finsler functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FinslerSpec:
    """Positive-homogeneous concave length functional on a cone.

    ``lorentzian``: ``F(y) = sqrt(-metric(y, y))``.

    ``custom``: ``F(y) = y0 * profile(u)`` with section coordinate
    ``u = y[1:] / y0``.  In 2D the profile is tabulated against ``u``; in 3D
    it is radial, tabulated against ``|u|``.
    """

    kind: str
    metric: np.ndarray | None = None
    profile_nodes: np.ndarray | None = None
    profile_values: np.ndarray | None = None
    dim: int = field(default=2)

    def __repr__(self) -> str:
        if self.kind == "lorentzian":
            return f"FinslerSpec(lorentzian, metric={self.metric.tolist()})"
        return f"FinslerSpec(custom, {len(self.profile_nodes)} profile samples)"


def lorentzian_finsler(metric) -> FinslerSpec:
    g = np.array(metric, dtype=float)
    g.setflags(write=False)
    return FinslerSpec("lorentzian", metric=g, dim=g.shape[0])


def custom_finsler(profile_nodes, profile_values, dim: int = 2) -> FinslerSpec:
    u = np.array(profile_nodes, dtype=float)
    v = np.array(profile_values, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or len(u) < 2:
        raise InvalidParameterError("profile nodes/values must be equal-length 1D arrays (>= 2)")
    if np.any(np.diff(u) <= 0):
        raise InvalidParameterError("profile nodes must be strictly increasing")
    if np.any(v < 0):
        raise InvalidParameterError("profile values must be nonnegative")
    if dim == 3 and u[0] != 0.0:
        raise InvalidParameterError("radial profile must start at radius 0")
    u.setflags(write=False)
    v.setflags(write=False)
    return FinslerSpec("custom", profile_nodes=u, profile_values=v, dim=dim)


def finsler_many(F: FinslerSpec, ys) -> np.ndarray:
    """F on the rows of ``ys`` without membership checks (caller's duty)."""
    Y = np.atleast_2d(np.asarray(ys, dtype=float))
    if F.kind == "lorentzian":
        q = -np.einsum("ij,jk,ik->i", Y, F.metric, Y)
        return np.sqrt(np.maximum(q, 0.0))
    t = Y[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        if F.dim == 2:
            u = Y[:, 1] / t
        else:
            u = np.linalg.norm(Y[:, 1:], axis=1) / t
    # tiny overshoot from round-off is clamped onto the tabulated range
    u = np.clip(u, F.profile_nodes[0], F.profile_nodes[-1])
    prof = np.interp(u, F.profile_nodes, F.profile_values)
    return np.where(t > 0, t * prof, 0.0)


def finsler_value(F: FinslerSpec, cone: ConeSpec, y) -> float:
    v = _as_vector(y)
    _check_nonzero(v)
    if not cone_contains(cone, v):
        raise DomainError(f"vector {v.tolist()} lies outside the cone")
    return float(finsler_many(F, v[None, :])[0])


def section_interval(cone: ConeSpec) -> tuple[float, float]:
    """Range of ``u = y1 / y0`` over a 2D cone (needs the cone in ``y0 > 0``)."""
    rays = boundary_rays(cone)
    if np.any(rays[:, 0] <= 0):
        raise InvalidParameterError("cone is not contained in the half-space y0 > 0")
    u = rays[:, 1] / rays[:, 0]
    return float(u.min()), float(u.max())


def section_radius(cone: ConeSpec) -> float:
    rays = boundary_rays(cone)
    if np.any(rays[:, 0] <= 0):
        raise InvalidParameterError("cone is not contained in the half-space y0 > 0")
    return float(np.max(np.linalg.norm(rays[:, 1:], axis=1) / rays[:, 0]))


def check_pair(cone: ConeSpec, F: FinslerSpec, n_samples: int = 200, seed: int = 0) -> None:
    """Check that F is defined on exactly this cone and is superadditive there.

    Raises :class:`InvalidParameterError` on failure.
    """
    if cone.dim != F.dim:
        raise InvalidParameterError("cone and Finsler function dimensions differ")
    rays = boundary_rays(cone)
    if F.kind == "lorentzian":
        q = np.einsum("ij,jk,ik->i", rays, F.metric, rays)
        if np.any(q > 1e-9 * np.abs(F.metric).max()):
            raise InvalidParameterError("Lorentzian F is not defined on the whole cone")
    else:
        if F.dim == 2:
            lo, hi = section_interval(cone)
            if abs(F.profile_nodes[0] - lo) > 1e-9 or abs(F.profile_nodes[-1] - hi) > 1e-9:
                raise InvalidParameterError(
                    f"profile covers [{F.profile_nodes[0]}, {F.profile_nodes[-1]}], "
                    f"cone section is [{lo}, {hi}]")
        elif F.profile_nodes[-1] < section_radius(cone) - 1e-9:
            raise InvalidParameterError("radial profile does not cover the cone section")
    rng = np.random.default_rng(seed)
    y1 = sample_cone(cone, n_samples, rng)
    y2 = sample_cone(cone, n_samples, rng)
    lhs = finsler_many(F, y1 + y2)
    rhs = finsler_many(F, y1) + finsler_many(F, y2)
    scale = np.linalg.norm(y1, axis=1) + np.linalg.norm(y2, axis=1)
    bad = lhs < rhs - 1e-9 * scale
    if np.any(bad):
        raise InvalidParameterError(
            f"Finsler function fails superadditivity on {int(bad.sum())}/{n_samples} sampled pairs")


# ---------------------------------------------------------------------------
# widening
# ---------------------------------------------------------------------------

def _upper_concave_envelope(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hull = []
    for p in zip(x, y):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    hx, hy = zip(*hull)
    return np.array(hx), np.array(hy)


def _tilt_generators(gens: np.ndarray, eps: float) -> np.ndarray:
    axis = gens.mean(axis=0)
    axis /= np.linalg.norm(axis)
    out = []
    for g in gens:
        c = np.clip(g @ axis, -1.0, 1.0)
        theta = math.acos(c)
        perp = g - c * axis
        if np.linalg.norm(perp) < 1e-14:
            out.append(g)
            continue
        perp /= np.linalg.norm(perp)
        if theta + eps >= math.pi / 2 - 1e-9:
            raise InvalidParameterError(
                f"widening by {eps} would open the cone to a half-space")
        out.append(math.cos(theta + eps) * axis + math.sin(theta + eps) * perp)
    return np.array(out)


def _widen_round_metric(g: np.ndarray, eps: float) -> np.ndarray:
    ge = g - eps * np.eye(len(g))
    eig = np.linalg.eigvalsh(ge)
    if not (eig[0] < 0 and np.all(eig[1:] > 0)):
        raise InvalidParameterError(f"widening by {eps} destroys sharpness of the cone")
    return ge


def widen(cone: ConeSpec, F: FinslerSpec, eps: float) -> tuple[ConeSpec, FinslerSpec]:
    """Return a strictly wider cone and a strictly larger Finsler function.

    Round cones open as ``g - eps * I``; polyhedral generators tilt outward
    by the angle ``eps``.  F is extended to the new cone and multiplied by
    ``1 + eps``.
    """
    if not eps > 0:
        raise InvalidParameterError("eps must be positive")
    if cone.kind == "round":
        ge = _widen_round_metric(cone.metric, eps)
        v = -np.linalg.solve(cone.metric, cone.orientation)
        new_cone = round_cone(ge, -ge @ v)
    else:
        new_cone = polyhedral_cone(_tilt_generators(np.array(cone.generators), eps))

    if F.kind == "lorentzian":
        gF = F.metric
        if cone.kind == "round":
            lam = float(np.sum(gF * cone.metric) / np.sum(cone.metric * cone.metric))
            new_F = lorentzian_finsler((1 + eps) ** 2 * lam * ge)
        else:
            e = eps
            rays = np.array(new_cone.generators)
            while True:
                gFe = _widen_round_metric(gF, e)
                if np.all(np.einsum("ij,jk,ik->i", rays, gFe, rays) <= 0):
                    break
                e *= 1.5
            new_F = lorentzian_finsler((1 + eps) ** 2 * gFe)
    else:
        vmax = float(F.profile_values.max()) or 1.0
        u, v = np.array(F.profile_nodes), np.array(F.profile_values)
        if F.dim == 2:
            lo, hi = section_interval(new_cone)
            xs = np.concatenate([[lo], u, [hi]])
            ys = np.concatenate([[0.0], v, [0.0]])
        else:
            hi = max(section_radius(new_cone), u[-1])
            xs = np.concatenate([u, [hi]])
            ys = np.concatenate([v, [0.0]])
        hx, hy = _upper_concave_envelope(xs, ys)
        new_F = custom_finsler(hx, (1 + eps) * hy + eps * vmax, dim=F.dim)
    return new_cone, new_F


# ---------------------------------------------------------------------------
# spacetimes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spacetime:
    """Bounded coordinate grid carrying a (cone, F) pair at every node.

    Nodes with identical data share an entry of ``fields``; ``field_index``
    maps each flat node index to its entry.  Axis 0 is time.
    """

    dims: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    fields: tuple[tuple[ConeSpec, FinslerSpec], ...]
    field_index: np.ndarray
    periodic: tuple[bool, ...]
    name: str = "custom"

    def __post_init__(self):
        if len(self.dims) not in (2, 3):
            raise InvalidParameterError("only 2D and 3D charts are supported")
        if any(n < 2 for n in self.dims):
            raise InvalidParameterError("every axis needs at least 2 nodes")
        if any(not s > 0 for s in self.spacing):
            raise InvalidParameterError("grid spacing must be positive")
        if not (len(self.spacing) == len(self.origin) == len(self.periodic) == len(self.dims)):
            raise InvalidParameterError("grid descriptors have inconsistent lengths")
        fi = np.asarray(self.field_index)
        if fi.shape != (self.n_nodes,) or fi.min() < 0 or fi.max() >= len(self.fields):
            raise InvalidParameterError("field_index must map every node to a field entry")
        for cone, F in self.fields:
            if cone.dim != self.ndim:
                raise InvalidParameterError("cone dimension does not match the chart")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.dims))

    def node(self, ident) -> int:
        """Flat index of a node given as an int or a multi-index tuple."""
        if isinstance(ident, (int, np.integer)):
            if not 0 <= ident < self.n_nodes:
                raise IndexError(f"node {ident} out of range")
            return int(ident)
        idx = tuple(int(i) for i in ident)
        if len(idx) != self.ndim or any(not 0 <= i < n for i, n in zip(idx, self.dims)):
            raise IndexError(f"node {idx} out of grid bounds {self.dims}")
        return int(np.ravel_multi_index(idx, self.dims))

    def multi_index(self, node: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(node, self.dims))

    def coords(self, nodes=None) -> np.ndarray:
        """Chart coordinates of nodes (all nodes by default), shape (k, ndim)."""
        if nodes is None:
            nodes = np.arange(self.n_nodes)
        idx = np.array(np.unravel_index(np.asarray(nodes), self.dims)).T
        return np.asarray(self.origin) + idx * np.asarray(self.spacing)

    def pair_at(self, node) -> tuple[ConeSpec, FinslerSpec]:
        return self.fields[int(self.field_index[self.node(node)])]

    def widened(self, eps: float) -> "Spacetime":
        return Spacetime(self.dims, self.spacing, self.origin,
                         tuple(widen(c, F, eps) for c, F in self.fields),
                         self.field_index, self.periodic, f"{self.name}[eps={eps:g}]")

    def validate(self) -> None:
        for cone, F in self.fields:
            check_pair(cone, F)


def uniform_spacetime(dims: Sequence[int], spacing, cone: ConeSpec, F: FinslerSpec,
                      origin=None, periodic=None, name: str = "custom") -> Spacetime:
    dims = tuple(int(n) for n in dims)
    nd = len(dims)
    spacing = tuple(float(s) for s in np.broadcast_to(np.asarray(spacing, dtype=float), (nd,)))
    origin = tuple(0.0 for _ in dims) if origin is None else tuple(float(o) for o in origin)
    periodic = tuple(False for _ in dims) if periodic is None else tuple(bool(p) for p in periodic)
    n = int(np.prod(dims))
    return Spacetime(dims, spacing, origin, ((cone, F),), np.zeros(n, dtype=np.int64), periodic, name)


def minkowski_metric(dim: int) -> np.ndarray:
    return np.diag([-1.0] + [1.0] * (dim - 1))


def tilted_metric(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """2D Minkowski metric and orientation with the cone axis rotated by ``theta``
    from the time axis toward +x."""
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    g = R @ minkowski_metric(2) @ R.T
    return g, np.array([c, s])


def polyhedral_approximation(cone: ConeSpec, n: int = 16) -> ConeSpec:
    """Inscribed polyhedral cone whose generators lie on the round boundary."""
    if cone.kind != "round":
        raise InvalidParameterError("only round cones can be approximated")
    return polyhedral_cone(boundary_rays(cone, n) if cone.dim == 3 else boundary_rays(cone))


def _custom_profile_2d(lo: float, hi: float, n: int = 33) -> tuple[np.ndarray, np.ndarray]:
    u = np.linspace(lo, hi, n)
    c, w = (lo + hi) / 2, (hi - lo) / 2
    v = 0.2 + 0.8 * np.sqrt(np.clip(1 - ((u - c) / w) ** 2, 0, None))
    return u, v


def builtin_spacetime(name: str, **params) -> Spacetime:
    """Catalogue of test spacetimes.

    ``minkowski2d(dims=(9, 9), spacing=1.0)``,
    ``minkowski3d(dims=(5, 5, 5), spacing=1.0)``,
    ``tilted_cones(omega, dims=(9, 9), spacing=1.0, periodic_space=True)``,
    ``periodic_time(period=5, nx=5, spacing=1.0)``,
    ``custom_finsler_polyhedral(dims=(9, 9), spacing=1.0)``.
    """
    if name == "minkowski2d":
        dims = params.pop("dims", (9, 9))
        spacing = params.pop("spacing", 1.0)
        _no_extra(name, params)
        g = minkowski_metric(2)
        return uniform_spacetime(dims, spacing, round_cone(g), lorentzian_finsler(g), name=name)
    if name == "minkowski3d":
        dims = params.pop("dims", (5, 5, 5))
        spacing = params.pop("spacing", 1.0)
        _no_extra(name, params)
        g = minkowski_metric(3)
        return uniform_spacetime(dims, spacing, round_cone(g), lorentzian_finsler(g), name=name)
    if name == "periodic_time":
        period = params.pop("period", 5)
        nx = params.pop("nx", 5)
        spacing = params.pop("spacing", 1.0)
        _no_extra(name, params)
        if not (isinstance(period, (int, np.integer)) and period > 0):
            raise InvalidParameterError("period must be a positive number of grid spacings")
        if period < 2:
            raise InvalidParameterError("period must span at least 2 grid nodes")
        g = minkowski_metric(2)
        return uniform_spacetime((period, nx), spacing, round_cone(g), lorentzian_finsler(g),
                                 periodic=(True, False), name=name)
    if name == "tilted_cones":
        if "omega" not in params:
            raise InvalidParameterError("tilted_cones needs the tilt rate omega")
        omega = float(params.pop("omega"))
        dims = tuple(params.pop("dims", (9, 9)))
        spacing = params.pop("spacing", 1.0)
        periodic_space = params.pop("periodic_space", True)
        _no_extra(name, params)
        if len(dims) != 2:
            raise InvalidParameterError("tilted_cones is two-dimensional")
        sp = np.broadcast_to(np.asarray(spacing, dtype=float), (2,))
        fields = []
        for ix in range(dims[1]):
            theta = omega * ix * sp[1]
            if abs(theta) >= 3 * math.pi / 4:
                raise InvalidParameterError("tilt beyond 135 degrees flips the time orientation")
            g, w = tilted_metric(theta)
            fields.append((round_cone(g, w), lorentzian_finsler(g)))
        field_index = np.tile(np.arange(dims[1]), dims[0])
        return Spacetime(dims, tuple(float(s) for s in sp), (0.0, 0.0), tuple(fields),
                         field_index, (False, bool(periodic_space)), name)
    if name == "custom_finsler_polyhedral":
        dims = params.pop("dims", (9, 9))
        spacing = params.pop("spacing", 1.0)
        _no_extra(name, params)
        cone = polyhedral_cone([[1.0, -0.8], [1.0, 0.6]])
        lo, hi = section_interval(cone)
        u, v = _custom_profile_2d(lo, hi)
        F = custom_finsler(u, v)
        check_pair(cone, F)
        return uniform_spacetime(dims, spacing, cone, F, name=name)
    raise InvalidParameterError(f"unknown builtin spacetime {name!r}")


BUILTIN_NAMES = ("minkowski2d", "minkowski3d", "tilted_cones", "periodic_time",
                 "custom_finsler_polyhedral")


def _no_extra(name: str, params: dict) -> None:
    if params:
        raise InvalidParameterError(f"unexpected parameters for {name}: {sorted(params)}")
