import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steeptime.geometry import (BUILTIN_NAMES, DomainError, InvalidInputError, InvalidParameterError,
                                boundary_rays, builtin_spacetime, check_pair, cone_contains,
                                contains_many, custom_finsler, finsler_many, finsler_value,
                                lorentzian_finsler, minkowski_metric, polyhedral_cone, round_cone,
                                sample_cone, widen)

G2 = minkowski_metric(2)
ROUND = round_cone(G2)
LOR = lorentzian_finsler(G2)


@pytest.mark.parametrize("y, inside", [
    ((1, 0), True), ((1, 1), True), ((1, -1), True), ((2, 1), True),
    ((1, 1.01), False), ((-1, 0), False), ((0, 1), False), ((-2, 1), False),
])
def test_round_membership(y, inside):
    assert cone_contains(ROUND, y) is inside


@pytest.mark.parametrize("y, value", [((1, 0), 1.0), ((2, 1), math.sqrt(3)), ((1, 1), 0.0),
                                      ((5, 3), 4.0)])
def test_lorentzian_values(y, value):
    assert finsler_value(LOR, ROUND, y) == pytest.approx(value, abs=1e-12)


def test_zero_and_outside_vectors_rejected():
    with pytest.raises(InvalidInputError):
        cone_contains(ROUND, (0, 0))
    with pytest.raises(DomainError):
        finsler_value(LOR, ROUND, (1, 2))


def test_cone_constructors_validate():
    with pytest.raises(InvalidParameterError):
        round_cone(np.eye(2))
    with pytest.raises(InvalidParameterError):
        polyhedral_cone([[1.0, 0.5], [2.0, 1.0]])


def test_polyhedral_membership():
    cone = polyhedral_cone([[1.0, -0.8], [1.0, 0.6]])
    assert cone_contains(cone, (1.0, 0.0))
    assert cone_contains(cone, (1.0, 0.6))
    assert not cone_contains(cone, (1.0, 0.61))
    assert not cone_contains(cone, (1.0, -0.81))


def test_round_widening_matches_shifted_metric():
    eps = 0.1
    cone_e, F_e = widen(ROUND, LOR, eps)
    ge = G2 - eps * np.eye(2)
    for y in [(1, 1.05), (1, 1.1), (1, 0.3), (1, 1.12)]:
        y = np.asarray(y, float)
        assert cone_contains(cone_e, y) is bool(y @ ge @ y <= 0)
    # the old boundary is now strictly inside and F grew there
    assert finsler_value(F_e, cone_e, (1, 1)) > 0


def test_widening_dominates_on_original_cone():
    rng = np.random.default_rng(1)
    for cone, F in [(ROUND, LOR), builtin_spacetime("custom_finsler_polyhedral").fields[0]]:
        ys = sample_cone(cone, 200, rng)
        _, F_e = widen(cone, F, 0.05)
        assert np.all(finsler_many(F_e, ys) > finsler_many(F, ys))


def test_widening_limit_recovers_cone():
    rays = boundary_rays(ROUND)
    rot = np.array([[1.0, 0.0], [0.0, 1.0 + 1e-3]])
    outside = rays @ rot.T
    assert np.all(contains_many(widen(ROUND, LOR, 1e-6)[0], rays))
    assert not np.any(contains_many(widen(ROUND, LOR, 1e-8)[0], outside))


def test_widening_that_opens_the_cone_fails():
    with pytest.raises(InvalidParameterError):
        widen(ROUND, LOR, 1.5)
    poly = polyhedral_cone([[1.0, -0.8], [1.0, 0.6]])
    with pytest.raises(InvalidParameterError):
        widen(poly, lorentzian_finsler(G2), 1.2)
    with pytest.raises(InvalidParameterError):
        widen(ROUND, LOR, 0.0)


def test_non_concave_profile_fails_superadditivity():
    cone = polyhedral_cone([[1.0, -0.5], [1.0, 0.5]])
    u = np.linspace(-0.5, 0.5, 11)
    with pytest.raises(InvalidParameterError):
        check_pair(cone, custom_finsler(u, 0.2 + 4 * u ** 2))
    check_pair(cone, custom_finsler(u, 1 - u ** 2))


def test_profile_must_match_cone():
    cone = polyhedral_cone([[1.0, -0.5], [1.0, 0.5]])
    with pytest.raises(InvalidParameterError):
        check_pair(cone, custom_finsler([-0.4, 0.5], [1.0, 1.0]))


def test_builtins():
    st = builtin_spacetime("minkowski2d")
    assert st.dims == (9, 9) and st.n_nodes == 81 and len(st.fields) == 1
    assert builtin_spacetime("minkowski3d").ndim == 3
    assert builtin_spacetime("tilted_cones", omega=0.1).periodic == (False, True)
    assert builtin_spacetime("periodic_time").periodic == (True, False)
    for name in BUILTIN_NAMES:
        if name != "tilted_cones":
            builtin_spacetime(name).validate()
    with pytest.raises(InvalidParameterError):
        builtin_spacetime("anti_de_sitter")
    with pytest.raises(InvalidParameterError):
        builtin_spacetime("periodic_time", period=0)
    with pytest.raises(InvalidParameterError):
        builtin_spacetime("tilted_cones")
    with pytest.raises(InvalidParameterError):
        builtin_spacetime("minkowski2d", colour="red")


def test_node_indexing():
    st = builtin_spacetime("minkowski2d", dims=(4, 6))
    assert st.node((2, 3)) == 15
    assert st.multi_index(15) == (2, 3)
    np.testing.assert_allclose(st.coords([15]), [[2.0, 3.0]])
    with pytest.raises(IndexError):
        st.node((4, 0))


FIELDS = [(ROUND, LOR), builtin_spacetime("custom_finsler_polyhedral").fields[0],
          builtin_spacetime("minkowski3d").fields[0]]


@settings(max_examples=60, deadline=None)
@given(which=st.integers(0, 2), seed=st.integers(0, 2**31), lam=st.floats(0.01, 100.0))
def test_homogeneity(which, seed, lam):
    cone, F = FIELDS[which]
    y = sample_cone(cone, 5, np.random.default_rng(seed))
    np.testing.assert_allclose(finsler_many(F, lam * y), lam * finsler_many(F, y), rtol=1e-9, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(which=st.integers(0, 2), seed=st.integers(0, 2**31))
def test_superadditivity(which, seed):
    cone, F = FIELDS[which]
    rng = np.random.default_rng(seed)
    y1, y2 = sample_cone(cone, 20, rng), sample_cone(cone, 20, rng)
    lhs = finsler_many(F, y1 + y2)
    rhs = finsler_many(F, y1) + finsler_many(F, y2)
    assert np.all(lhs >= rhs - 1e-9 * np.maximum(1.0, lhs))


@settings(max_examples=40, deadline=None)
@given(which=st.integers(0, 2), e1=st.floats(0.002, 0.2), frac=st.floats(0.05, 0.95),
       seed=st.integers(0, 2**31))
def test_widening_nests(which, e1, frac, seed):
    cone, F = FIELDS[which]
    e2 = e1 * frac
    small, F2 = widen(cone, F, e2)
    big, F1 = widen(cone, F, e1)
    rays = boundary_rays(small, 32)
    assert np.all(contains_many(big, rays, tol=1e-9))
    ys = sample_cone(small, 10, np.random.default_rng(seed))
    assert np.all(finsler_many(F1, ys) >= finsler_many(F2, ys) - 1e-12)
