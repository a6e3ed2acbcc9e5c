from __future__ import annotations

import numpy as np
import pytest

from rankcodes import LinearizedPoly, ParameterError, build_field, c_sigma_t, min_distance
from rankcodes.codes import product_grid
from rankcodes.geometry import (
    Label,
    PointSet,
    ProjPoint,
    ProjSubspace,
    base_subspace,
    build_cone_construction,
    canonical_subgeometry,
    cf_set,
    cf_sigma_set,
    cf_vertices,
    code_from_pointset,
    cone,
    dondur_exterior_set,
    exterior_bound,
    exterior_bound_in_cone,
    gamma_set,
    is_embedding,
    is_exterior_set,
    j_set,
    normalize,
    point_type,
    point_types,
    project,
    secant_membership,
    sigma_hat,
    vertex_subspace,
)


def all_points(F, m):
    vecs = product_grid(np.arange(F.order), m)[1:]
    return np.unique(normalize(F, vecs), axis=0)


def test_subgeometry_sizes(F8, F27):
    assert len(canonical_subgeometry(F8)) == 7
    S = canonical_subgeometry(F27)
    assert len(S) == 13
    assert ProjPoint(F27, [1, 1, 1]) in S


def test_sigma_hat(F27, rng):
    S = canonical_subgeometry(F27)
    for P in S:
        assert sigma_hat(F27, P) == P
    assert sigma_hat(F27, ProjPoint(F27, [1, 0, 0])) == ProjPoint(F27, [0, 1, 0])
    for _ in range(20):
        v = rng.integers(0, 27, size=3)
        if not v.any():
            continue
        P = ProjPoint(F27, v)
        Q = P
        for _ in range(3):
            Q = sigma_hat(F27, Q)
        assert Q == P


def test_point_types(F27):
    for P in canonical_subgeometry(F27):
        assert point_type(F27, P) == 1
    assert point_type(F27, np.array([0, 0, 1])) == 3


@pytest.mark.parametrize("spec", [(2, 1, 3, 1), (3, 1, 3, 1), (2, 1, 4, 1)])
def test_point_type_matches_poly_rank(spec, rng):
    F = build_field(*spec)
    vecs = rng.integers(0, F.order, size=(200, F.n))
    vecs = vecs[np.any(vecs != 0, axis=1)]
    fast = point_types(F, vecs)
    slow = point_types(F, vecs, use_engine=False)
    ranks = [LinearizedPoly(F, v).rank() for v in vecs]
    assert fast.tolist() == slow.tolist() == ranks


def test_secant_fast_and_brute_agree_pg2_8(F8):
    S = canonical_subgeometry(F8)
    pts = all_points(F8, 3)
    assert len(pts) == 73
    for h in (0, 1):
        for P in pts:
            assert secant_membership(P, S, h, fast=True) == secant_membership(P, S, h, fast=False)


def test_secant_trivial_cases(F27):
    S = canonical_subgeometry(F27)
    for P in S.points[:4]:
        for h in (0, 1, 2):
            assert secant_membership(P, S, h)
    # h >= rank(span) - 1 saturates to the span, here all of PG(2, 27)
    assert secant_membership(np.array([0, 0, 1]), S, 2, fast=False)


def test_exterior_conventions(F27):
    S = canonical_subgeometry(F27)
    single = PointSet(F27, [[0, 0, 1]])
    assert is_exterior_set(single, S, 1)[0]
    withS = PointSet(F27, [[0, 0, 1], list(S.points[0])])
    ok, wit = is_exterior_set(withS, S, 0)
    assert not ok and wit["point"] == ":".join(map(str, S.points[0]))


def test_exterior_bounds():
    assert exterior_bound(4, 1, 2) == 3
    assert exterior_bound(4, 3, 2) == 0
    assert exterior_bound(4, 2, 2) == 1
    assert exterior_bound_in_cone(6, 1, 2, 3) == exterior_bound(6, 1, 2)
    assert exterior_bound_in_cone(6, 4, 2, 3) == (2**3 - 1)
    with pytest.raises(ParameterError):
        exterior_bound(3, 3, 2)


def test_cone_line_and_conventions(F27):
    M = PointSet(F27, [[1, 0, 0]])
    N = PointSet(F27, [[0, 1, 0]])
    assert len(cone(M, N)) == 1 + 1 + 26
    empty = PointSet(F27, [], dim=3)
    assert np.array_equal(cone(empty, N).points, N.points)
    with pytest.raises(ParameterError):
        cone(M, M)


def test_cone_size_f16(F16):
    K = build_cone_construction(F16, 3, [1])
    assert len(K) == 273 == (2**12 - 1) // (2**4 - 1)


def test_projection(F16, rng):
    k = 3
    Ls, L = vertex_subspace(F16, k), base_subspace(F16, k)
    for x in rng.integers(1, 16, size=20):
        Pt = np.array([F16.sigma(int(x), i) for i in range(4)])
        img = project(Pt, Ls, L)
        expect = Pt.copy()
        expect[4 - k + 2:] = 0
        assert img == ProjPoint(F16, expect)
        assert L.contains(img.array[None])[0]
    empty = ProjSubspace(F16, [], 4)
    P = ProjPoint(F16, [1, 2, 3, 4])
    assert project(P.array, empty, ProjSubspace(F16, np.eye(4, dtype=np.int64), 4)) == P


def test_embedding(F16, F27):
    ok, low, thr = is_embedding(vertex_subspace(F16, 3))
    assert ok and low == 4 and thr == 4
    assert is_embedding(ProjSubspace(F27, [], 3))[0]
    bad = ProjSubspace(F16, [[1, 1, 1, 1]], 4)
    assert not is_embedding(bad)[0]


def test_cf_components(F27):
    Xa = cf_sigma_set(F27, 2, 1)
    assert len(Xa) == 13
    X = cf_set(F27, 2)
    assert len(X) == 27 + 1
    # X_1 is the projection of Sigma, here Gamma itself
    assert np.array_equal(Xa.points, gamma_set(F27, 2).points)
    assert len(j_set(F27, 2, 2)) == 13


def test_exterior_set_e(F8, F27):
    E = dondur_exterior_set(F8, 2, [1])
    assert len(E) == 9
    A, B = cf_vertices(F27, 2)
    E27 = dondur_exterior_set(F27, 2, [1])
    assert A in E27 and B in E27
    assert is_exterior_set(E27, gamma_set(F27, 2), 0, fast=False)[0]
    with pytest.raises(ParameterError):
        dondur_exterior_set(F27, 2, [2])


def test_code_from_single_point(F27):
    K = PointSet(F27, [[1, 0, 0]])
    C = code_from_pointset(K)
    assert len(C) == 27


@pytest.mark.parametrize("spec,k", [((3, 1, 3, 2), 2), ((2, 1, 4, 3), 3), ((3, 1, 3, 1), 2)])
def test_code_from_cone_equals_cst(spec, k):
    F = build_field(*spec)
    K = build_cone_construction(F, k, [1])
    C = code_from_pointset(K, F.n - k + 1)
    D = c_sigma_t(F, k, [1])
    assert np.array_equal(C.enumerate(), D.enumerate())
    if F.order < 20:
        assert min_distance(C).min_distance == F.n - k + 1


def test_pointset_serialization(F27):
    E = dondur_exterior_set(F27, 2, [1])
    text = E.serialize()
    assert text.splitlines()[0] == "dim=3 field=3^1:3:1"
    back = PointSet.parse(text)
    assert np.array_equal(back.points, E.points)
    assert E.label == Label.E_SET


def test_k_range(F27):
    with pytest.raises(ParameterError):
        vertex_subspace(F27, 3)
