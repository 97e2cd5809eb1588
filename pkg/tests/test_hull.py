from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from abelconvex.errors import InputError
from abelconvex.hull import (Membership, contains, convex_hull, exposed_face, faces,
                             fraction_to_str, interior_certificate, linprog_eq, minkowski_sum,
                             support_value, to_fraction)

from conftest import brute_vertices, in_hull_caratheodory

TRI = [(0, 0), (1, 0), (0, 1)]


def test_hull_drops_edge_point():
    P = convex_hull([(0, 0), (2, 0), (0, 2), (1, 1)])
    assert set(P.vertices) == {(0, 0), (2, 0), (0, 2)}
    assert set(P.vertices) == set(brute_vertices([(0, 0), (2, 0), (0, 2), (1, 1)]))
    assert P.dim == 2


def test_singleton_hull():
    P = convex_hull([(5, 7)])
    assert P.vertices == ((5, 7),)
    assert P.dim == 0 and P.affine_basis == ()


def test_interval_endpoints():
    P = convex_hull([(0,), (1,), (F(1, 2),)])
    assert P.vertices == ((0,), (1,))


def test_degenerate_inputs_keep_ambient_dim():
    P = convex_hull([(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3)])
    assert P.ambient_dim == 3 and P.dim == 1
    assert P.vertices == ((0, 0, 0), (3, 3, 3))
    Q = convex_hull([(1, 2)] * 4)
    assert Q.vertices == ((1, 2),)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        convex_hull([(0, 0), (1,)])
    with pytest.raises(InputError):
        convex_hull([])
    with pytest.raises(InputError):
        contains(convex_hull(TRI), (1, 2, 3))


def test_floats_refused():
    with pytest.raises(InputError):
        convex_hull([(0.5, 0)])
    assert to_fraction("3/6") == F(1, 2)
    assert fraction_to_str(F(4, -6)) == "-2/3"
    assert fraction_to_str(F(0)) == "0/1"


@pytest.mark.parametrize("q, expected", [
    ((F(1, 3), F(1, 3)), Membership.INTERIOR),
    ((F(1, 2), F(1, 2)), Membership.BOUNDARY),
    ((1, 1), Membership.OUTSIDE),
    ((0, 0), Membership.BOUNDARY),
])
def test_contains_simplex(q, expected):
    assert contains(convex_hull(TRI), q) is expected


def test_contains_relative_to_affine_hull():
    seg = convex_hull([(0, 0), (2, 2)])
    assert contains(seg, (1, 1)) is Membership.INTERIOR
    assert contains(seg, (2, 2)) is Membership.BOUNDARY
    assert contains(seg, (3, 3)) is Membership.OUTSIDE
    assert contains(seg, (1, 0)) is Membership.OFF_AFFINE_HULL
    pt = convex_hull([(1, 1)])
    assert contains(pt, (1, 1)) is Membership.INTERIOR
    assert contains(pt, (1, 2)) is Membership.OFF_AFFINE_HULL


@pytest.mark.parametrize("beta, expected", [
    ((1, 0), {(1, 0)}),
    ((1, 1), {(1, 0), (0, 1)}),
    ((0, 0), {(0, 0), (1, 0), (0, 1)}),
])
def test_exposed_face(beta, expected):
    P = convex_hull(TRI)
    f = exposed_face(P, beta)
    assert {P.vertices[i] for i in f.vertex_indices} == expected
    assert set(f.polytope.vertices) == expected


def test_minkowski_examples():
    a = convex_hull([(0,), (1,)])
    b = convex_hull([(0,), (2,)])
    assert minkowski_sum([(F(1, 2), a), (F(1, 2), b)]).vertices == ((0,), (F(3, 2),))
    P = convex_hull(TRI)
    moved = minkowski_sum([(1, P), (1, convex_hull([(3, -1)]))])
    assert set(moved.vertices) == {(3, -1), (4, -1), (3, 0)}
    S = minkowski_sum([(F(1, 2), convex_hull([(0, 0), (1, 0)])),
                       (F(1, 2), convex_hull([(0, 0), (0, 1)]))])
    assert set(S.vertices) == {(0, 0), (F(1, 2), 0), (0, F(1, 2)), (F(1, 2), F(1, 2))}
    with pytest.raises(InputError):
        minkowski_sum([])
    with pytest.raises(InputError):
        minkowski_sum([(0, P)])


def test_cube_face_lattice():
    cube = convex_hull([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
                       + [(F(1, 2), F(1, 2), F(1, 2)), (0, F(1, 2), 1)])
    assert len(cube.vertices) == 8
    assert len(cube.facets) == 6
    fs = faces(cube)
    assert [len(f.vertex_indices) for f in fs].count(1) == 8
    assert [len(f.vertex_indices) for f in fs].count(2) == 12
    assert [len(f.vertex_indices) for f in fs].count(4) == 6
    for f in fs:
        assert exposed_face(cube, f.selector).vertex_indices == f.vertex_indices


def test_linprog_small():
    # max x0 + x1 s.t. x0 + 2 x1 + s = 4, 3 x0 + x1 + t = 6
    res = linprog_eq([[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6], [1, 1, 0, 0])
    assert res is not None
    x, val = res
    assert val == F(14, 5) and x[:2] == (F(8, 5), F(6, 5))
    assert linprog_eq([[1, 1]], [-1]) is None


# ---------------------------------------------------------------------------
# properties

coord = st.integers(-4, 4)


def point_sets(dim, max_size=8):
    return st.lists(st.tuples(*[coord] * dim), min_size=1, max_size=max_size)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(point_sets))
def test_vertices_match_caratheodory_oracle(pts):
    P = convex_hull(pts)
    assert set(P.vertices) == set(brute_vertices(pts))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(point_sets))
def test_hull_idempotent(pts):
    P = convex_hull(pts)
    assert convex_hull(list(P.vertices)) == P
    assert convex_hull(list(P.vertices)).affine_basis == P.affine_basis
    for v in P.vertices:
        assert P.affine_coords(v) is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3).flatmap(point_sets),
       st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=3, max_size=3))
def test_membership_agrees_with_oracle(pts, q):
    P = convex_hull(pts)
    q = tuple(q[:P.ambient_dim])
    m = contains(P, q)
    inside = in_hull_caratheodory(q, pts)
    assert (m in (Membership.INTERIOR, Membership.BOUNDARY)) == inside
    cert = interior_certificate(P, q)
    if m is Membership.INTERIOR:
        # strictly positive convex combination, exhibited exactly
        assert cert is not None and all(c > 0 for c in cert) and sum(cert) == 1
        assert tuple(sum(c * v[i] for c, v in zip(cert, P.vertices)) for i in range(len(q))) == q
    else:
        assert cert is None or len(P.vertices) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(point_sets),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_exposed_face_is_argmax(pts, beta):
    P = convex_hull(pts)
    beta = tuple(beta[:P.ambient_dim])
    f = exposed_face(P, beta)
    vals = [sum(a * b for a, b in zip(v, beta)) for v in P.vertices]
    assert list(f.vertex_indices) == [i for i, v in enumerate(vals) if v == max(vals)]


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.lists(point_sets(d, 5), min_size=1, max_size=3)),
       st.lists(st.fractions(min_value=F(1, 5), max_value=2, max_denominator=5),
                min_size=3, max_size=3),
       st.randoms(use_true_random=False))
def test_minkowski_support_function(sets, ws, rnd):
    terms = [(w, convex_hull(s)) for w, s in zip(ws, sets)]
    S = minkowski_sum(terms)
    k = S.ambient_dim
    # independent oracle: all weighted vertex sums in one shot
    sums = [()]
    for w, P in terms:
        sums = [tuple(a + w * b for a, b in zip(s, v)) if s else tuple(w * b for b in v)
                for s in sums for v in P.vertices]
    if len(sums) <= 12:  # the brute-force oracle is exponential in the point count
        assert set(S.vertices) == set(brute_vertices(sums))
    for _ in range(100):
        beta = tuple(F(rnd.randint(-9, 9), rnd.randint(1, 4)) for _ in range(k))
        assert support_value(S, beta) == sum(w * support_value(P, beta) for w, P in terms)
