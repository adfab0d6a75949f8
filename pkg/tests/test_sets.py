import math

import numpy as np
import pytest

from splitqp.instances import cesaro_oracle, cesaro_triple
from splitqp.sets import (Ball, Box, Cartesian, Halfspace, NonnegativeOrthant,
                          SecondOrderCone, Singleton, TranslatedCone, Zero,
                          whole_space)

ALL_KINDS = ["box", "orthant", "zero", "singleton", "halfspace", "ball",
             "soc", "translated_cone", "cartesian"]

inf = np.inf


def random_sets(kind, count, base_seed=0):
    return [cesaro_triple(base_seed + 37 * i, kind)[0] for i in range(count)]


# ---------------------------------------------------------------- dimensions

def test_dim_examples():
    assert Box([0, 0], [1, 1]).dim == 2
    assert Cartesian([Box([0, 0], [1, 1]), SecondOrderCone(3)]).dim == 5
    assert Zero(4).dim == 4


# ---------------------------------------------------------------- projection

def test_project_examples():
    assert np.allclose(Box([0.0], [1.0]).project([1.5]), [1.0])
    # standard cone projection: ((t + ||x||)/2) * (1, x/||x||)
    assert np.allclose(SecondOrderCone(3).project([0.0, 2.0, 0.0]), [1.0, 1.0, 0.0])
    assert np.allclose(Halfspace([1.0, 0.0], 0.0).project([2.0, 3.0]), [0.0, 3.0])


def test_project_dimension_mismatch():
    with pytest.raises(ValueError):
        Box([0.0], [1.0]).project([1.0, 2.0])


def test_soc_projection_against_brute_force():
    # the projection must beat the distance of every sampled member
    rng = np.random.default_rng(42)
    S = SecondOrderCone(3)
    for _ in range(10):
        v = rng.normal(size=3) * 2.0
        p = S.project(v)
        assert S.contains(p, 1e-9)
        d = np.linalg.norm(v - p)
        samples = rng.normal(size=(2000, 3)) * 3.0
        for s in samples:
            q = S.project(s)
            assert d <= np.linalg.norm(v - q) + 1e-6


def test_halfspace_projection_against_brute_force():
    rng = np.random.default_rng(43)
    S = Halfspace([1.0, -2.0, 0.5], 0.7)
    for _ in range(10):
        v = rng.normal(size=3) * 2.0
        p = S.project(v)
        assert S.contains(p, 1e-9)
        d = np.linalg.norm(v - p)
        samples = rng.normal(size=(2000, 3)) * 3.0
        for s in samples:
            q = S.project(s)
            assert d <= np.linalg.norm(v - q) + 1e-6


# ------------------------------------------------------------------- support

def test_support_examples():
    # max over the 4 vertices of <z, y> is 2 - 3 = -1
    assert Box([1.0, 3.0], [2.0, 4.0]).support([1.0, -1.0]) == pytest.approx(-1.0)
    assert NonnegativeOrthant(2).support([-1.0, -2.0]) == 0.0
    assert Ball([0.0, 0.0], 1.0).support([3.0, 4.0]) == pytest.approx(5.0)


def test_support_infinities():
    S = Box([0.0, -inf], [inf, 0.0])
    assert S.support([1.0, 0.0]) == inf          # unbounded above in coord 0
    assert S.support([0.0, 1.0]) == 0.0          # upper bound 0
    assert S.support([-1.0, -1.0]) == inf        # unbounded below in coord 1
    assert S.support([0.0, 0.0]) == 0.0          # 0 * inf = 0 rule
    assert NonnegativeOrthant(2).support([0.5, -1.0]) == inf
    assert SecondOrderCone(2).support([-2.0, 1.0]) == 0.0
    assert SecondOrderCone(2).support([2.0, 1.0]) == inf


def test_support_singleton_halfspace_translated():
    assert Singleton([1.0, 2.0]).support([3.0, -1.0]) == pytest.approx(1.0)
    H = Halfspace([2.0, 0.0], 3.0)
    assert H.support([4.0, 0.0]) == pytest.approx(6.0)   # y = 2 * normal
    assert H.support([-2.0, 0.0]) == inf                 # t < 0
    assert H.support([1.0, 1.0]) == inf                  # not parallel
    assert H.support([0.0, 0.0]) == 0.0
    T = TranslatedCone([1.0, -1.0], NonnegativeOrthant(2))
    assert T.support([-2.0, -1.0]) == pytest.approx(-1.0)
    assert T.support([1.0, -1.0]) == inf


def test_support_zero_cone_always_zero():
    S = Zero(3)
    assert S.support([5.0, -2.0, 7.0]) == 0.0


def test_support_cone_membership_tolerance():
    S = NonnegativeOrthant(2)
    y = np.array([1e-5, -1.0])
    assert S.support(y) == inf
    assert S.support(y, cone_tol=1e-4) == 0.0


# ---------------------------------------------------------- recession cones

def test_project_recession_examples():
    assert np.allclose(Box([0.0], [inf]).project_recession([-3.0]), [0.0])
    assert np.allclose(Ball([0.0, 0.0], 2.0).project_recession([5.0, 5.0]), [0.0, 0.0])
    assert np.allclose(Halfspace([1.0, 0.0], 7.0).project_recession([2.0, 1.0]),
                       [0.0, 1.0])


def test_project_polar_recession_examples():
    assert np.allclose(Box([0.0], [inf]).project_polar_recession([-3.0]), [-3.0])
    assert np.allclose(Ball([1.0, 1.0], 2.0).project_polar_recession([5.0, 5.0]),
                       [5.0, 5.0])
    assert np.allclose(NonnegativeOrthant(2).project_polar_recession([3.0, -4.0]),
                       [0.0, -4.0])


def test_distance_to_recession_examples():
    assert NonnegativeOrthant(1).distance_to_recession([1.0]) == 0.0
    assert NonnegativeOrthant(1).distance_to_recession([-2.0]) == pytest.approx(2.0)
    assert Box([0.0, 0.0], [1.0, 1.0]).distance_to_recession([3.0, 4.0]) == pytest.approx(5.0)


def test_translated_cone_recession_is_inner_cone():
    T = TranslatedCone([5.0, 5.0], NonnegativeOrthant(2))
    assert np.allclose(T.project_recession([-1.0, 2.0]), [0.0, 2.0])


# ------------------------------------------------------------------ contains

def test_contains_examples():
    assert Box([0.0], [1.0]).contains([0.5], 0.0)
    assert not Box([0.0], [1.0]).contains([1.0000001], 1e-9)
    assert Zero(2).contains([0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        Box([0.0], [1.0]).contains([0.5], -1.0)


# ---------------------------------------------------------------- validation

def test_descriptor_validation():
    with pytest.raises(ValueError, match="empty"):
        Box([1.0], [0.0])
    with pytest.raises(ValueError):
        Box([np.inf], [np.inf])
    with pytest.raises(ValueError, match="nonzero"):
        Halfspace([0.0, 0.0], 1.0)
    with pytest.raises(ValueError, match="radius"):
        Ball([0.0], -1.0)
    with pytest.raises(ValueError):
        TranslatedCone([0.0], Ball([0.0], 1.0))
    with pytest.raises(ValueError):
        TranslatedCone([0.0, 0.0], NonnegativeOrthant(3))
    with pytest.raises(ValueError):
        Cartesian([])
    with pytest.raises(ValueError, match="NaN"):
        Box([np.nan], [1.0])


def test_whole_space():
    S = whole_space(3)
    v = np.array([4.0, -7.0, 0.1])
    assert np.allclose(S.project(v), v)
    assert S.support(np.zeros(3)) == 0.0
    assert S.support([1.0, 0.0, 0.0]) == inf
    assert np.allclose(S.project_recession(v), v)


# --------------------------------------------------------- property sampling

@pytest.mark.parametrize("kind", ALL_KINDS)
def test_projection_properties(kind):
    rng = np.random.default_rng(ALL_KINDS.index(kind))
    for S in random_sets(kind, 5, base_seed=11):
        d = S.dim
        for _ in range(40):
            u = rng.normal(size=d) * 3.0
            v = rng.normal(size=d) * 3.0
            pu, pv = S.project(u), S.project(v)
            # idempotence
            assert np.max(np.abs(S.project(pu) - pu)) <= 1e-12
            # firm nonexpansiveness
            lhs = float(np.linalg.norm(pu - pv) ** 2)
            rhs = float((pu - pv) @ (u - v))
            assert lhs <= rhs + 1e-12
            # projecting a member returns it
            assert np.max(np.abs(S.project(pu) - pu)) <= 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_moreau_decomposition(kind):
    rng = np.random.default_rng(7)
    for S in random_sets(kind, 5, base_seed=23):
        for _ in range(40):
            dvec = rng.normal(size=S.dim) * 3.0
            p = S.project_recession(dvec)
            r = S.project_polar_recession(dvec)
            # bit-exact by construction: the polar part is the complement
            assert np.array_equal(r, dvec - p)
            assert np.max(np.abs(p + r - dvec)) <= 4e-16 * (1.0 + np.max(np.abs(dvec)))
            assert abs(float(p @ r)) <= 1e-10 * (1.0 + float(dvec @ dvec))
            # idempotence of the recession projection
            assert np.max(np.abs(S.project_recession(p) - p)) <= 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_support_inequality(kind):
    rng = np.random.default_rng(13)
    for S in random_sets(kind, 4, base_seed=31):
        members = [S.project(rng.normal(size=S.dim) * 4.0) for _ in range(25)]
        for _ in range(25):
            y = rng.normal(size=S.dim)
            sup = S.support(y)
            if math.isinf(sup):
                continue
            for z in members:
                assert float(z @ y) <= sup + 1e-10


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_normal_cone_identity(kind):
    # with p = proj(v), r = v - p: <p, r> equals the support at r
    rng = np.random.default_rng(17)
    for S in random_sets(kind, 4, base_seed=41):
        for _ in range(30):
            v = rng.normal(size=S.dim) * 3.0
            p = S.project(v)
            r = v - p
            sup = S.support(r)
            inner = float(p @ r)
            if math.isinf(sup):
                continue
            if abs(sup) <= 1e-10 and abs(inner) <= 1e-10:
                continue  # cone-like case: both sides vanish
            assert abs(inner - sup) <= 1e-9 * (1.0 + abs(inner))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_residual_in_polar_recession(kind):
    rng = np.random.default_rng(19)
    for S in random_sets(kind, 4, base_seed=53):
        for _ in range(30):
            v = rng.normal(size=S.dim) * 3.0
            r = v - S.project(v)
            w = rng.normal(size=S.dim) * 3.0
            d = S.project_recession(w)
            assert float(r @ d) <= 1e-10 * (1.0 + np.linalg.norm(r) * np.linalg.norm(d))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_cesaro_projection_limit(kind):
    for i in range(3):
        S, delta_s, s0 = cesaro_triple(61 + 13 * i, kind)
        p_avg, r_avg, _ = cesaro_oracle(S, delta_s, s0, 10**6)
        assert np.linalg.norm(p_avg - S.project_recession(delta_s)) <= 1e-3
        assert np.linalg.norm(r_avg - S.project_polar_recession(delta_s)) <= 1e-3


# ------------------------------------------------------ projection jacobians

def _near_kink(S, v, h):
    """True when any coordinate probe crosses a non-smooth region."""
    probes = [v]
    for j in range(S.dim):
        e = np.zeros(S.dim)
        e[j] = 10 * h
        probes.extend([v + e, v - e])
    jac_ref = S.projection_jacobian(v)
    return any(np.max(np.abs(S.projection_jacobian(p) - jac_ref)) > 1e-6
               for p in probes)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_projection_jacobian_matches_finite_differences(kind):
    rng = np.random.default_rng(29)
    h = 1e-7
    for S in random_sets(kind, 3, base_seed=71):
        checked = 0
        for _ in range(30):
            v = rng.normal(size=S.dim) * 2.0
            if _near_kink(S, v, h):
                continue
            D = S.projection_jacobian(v)
            for j in range(S.dim):
                e = np.zeros(S.dim)
                e[j] = h
                fd = (S.project(v + e) - S.project(v - e)) / (2 * h)
                assert np.max(np.abs(D[:, j] - fd)) <= 5e-6
            checked += 1
        assert checked > 0


def test_jacobian_kink_convention_clamps():
    # at an active bound the derivative is the clamped branch (zero)
    B = Box([0.0], [1.0])
    assert B.projection_jacobian([0.0])[0, 0] == 0.0
    assert B.projection_jacobian([1.0])[0, 0] == 0.0
    assert B.projection_jacobian([0.5])[0, 0] == 1.0
    N = NonnegativeOrthant(1)
    assert N.projection_jacobian([0.0])[0, 0] == 0.0
    H = Halfspace([1.0], 0.0)
    assert H.projection_jacobian([0.0])[0, 0] == 0.0
