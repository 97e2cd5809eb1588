import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abelconvex.errors import ConvergenceError, InputError, NotInteriorError
from abelconvex.hull import Membership, contains, convex_hull, faces
from abelconvex.kempfness import exact_moment, moment_map
from abelconvex.orbitgeom import (affine_residual, ambient_max, boundary_stabilizer_check,
                                  critical_data, density_experiment, face_orbit, fixed_point_images,
                                  flow_limit, flow_trajectory, invert_moment, level_gap,
                                  margin_target, newton_minimize, orbit_polytope, parse_x_spec,
                                  sample_image, sample_seeds, vertex_witnesses, wmax_membership)
from abelconvex.weights import WeightSystem, act, random_point, stabilizer_algebra

from conftest import SIMPLEX, bisect, point

W2 = WeightSystem.from_lists(SIMPLEX)
CUBE = WeightSystem.from_lists([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])


def test_flow_limit_example():
    fl = flow_limit(W2, point(1, 1, 1), (1, 1))
    assert fl.limit_support == {1, 2} and fl.achieved_value == 1
    assert np.allclose(fl.limit.sq_moduli(), [0, 0.5, 0.5])
    assert fl.limit.support == {1, 2}


def test_flow_limit_matches_long_flow():
    x = random_point(W2, [0, 1, 2], seed=4)
    fl = flow_limit(W2, x, (2, 1))
    far = act(W2, [60.0, 30.0], x)
    assert fl.limit.support == {1}
    assert far.projective_distance(fl.limit) < 1e-12


def test_ambient_max_and_wmax():
    assert ambient_max(W2, (1, 1)) == 1
    assert wmax_membership(W2, point(1, 1, 0), (1, 1), 1)
    assert not wmax_membership(W2, point(1, 0, 0), (1, 1), 1)


def test_flow_trajectory_monotone():
    x = random_point(W2, [0, 1, 2], seed=2)
    ts = np.linspace(0, 20, 81)
    vals = flow_trajectory(W2, x, (1, 1), ts)
    assert np.all(np.diff(vals) >= -1e-15)
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)
    assert level_gap(W2, x, (1, 1)) == 1
    assert level_gap(W2, point(0, 1, 1), (1, 1)) is None


def test_critical_data():
    cd = critical_data(W2, (1, 1))
    assert cd.values == (0, 1)
    assert cd.level_supports == (frozenset({0}), frozenset({1, 2}))
    with pytest.raises(InputError):
        critical_data(W2, (0, 0))


def test_orbit_polytope_and_fixed_points():
    x = point(1, 0, 1)
    P = orbit_polytope(W2, x)
    assert P.vertices == ((0, 0), (0, 1))
    assert fixed_point_images(W2, x) == [(0, 0), (0, 1)]
    assert [w.attained for w in vertex_witnesses(W2, x)] == [True, True]
    assert {w.vertex for w in vertex_witnesses(W2, x)} == set(P.vertices)


def test_fixed_point_witness_is_itself():
    ws = vertex_witnesses(W2, point(0, 1, 0))
    assert len(ws) == 1 and ws[0].attained and ws[0].vertex == (1, 0)


def test_invert_closed_form():
    v = invert_moment(W2, point(1, 1, 1), (F(1, 2), F(1, 4)))
    assert v == pytest.approx([0.5 * math.log(2), 0.0], abs=1e-12)


def test_invert_against_bisection():
    W = WeightSystem.from_lists([(0,), (1,)])
    x = point(1, 2)
    v = invert_moment(W, x, (F(1, 3),))
    oracle = bisect(lambda t: 4 * math.exp(2 * t) / (1 + 4 * math.exp(2 * t)) - 1 / 3, -10, 10)
    assert v[0] == pytest.approx(oracle, abs=1e-12)
    assert v[0] == pytest.approx(0.5 * math.log(1 / 8), abs=1e-12)


def test_invert_stays_in_stabilizer_complement():
    x = point(1, 1, 0)
    v = invert_moment(W2, x, (F(1, 3), 0))
    assert v[1] == 0.0
    assert moment_map(W2, act(W2, v, x)) == pytest.approx([1 / 3, 0], abs=1e-12)


@pytest.mark.parametrize("target, membership", [
    ((F(1, 2), F(1, 2)), Membership.BOUNDARY),
    ((0, 0), Membership.BOUNDARY),
    ((1, 1), Membership.OUTSIDE),
])
def test_invert_rejects_non_interior(target, membership):
    with pytest.raises(NotInteriorError) as exc:
        invert_moment(W2, point(1, 1, 1), target)
    assert exc.value.membership is membership


def test_invert_rejects_off_hull():
    with pytest.raises(NotInteriorError) as exc:
        invert_moment(W2, point(1, 1, 0), (F(1, 2), F(1, 10)))
    assert exc.value.membership is Membership.OFF_AFFINE_HULL


def test_invert_fixed_point():
    x = point(0, 1, 0)
    assert np.array_equal(invert_moment(W2, x, (1, 0)), [0.0, 0.0])


def test_newton_reports_nonconvergence():
    # unbounded below: the gradient never vanishes
    with pytest.raises(ConvergenceError) as exc:
        newton_minimize(lambda u: (float(u[0]), np.array([1.0]), np.array([[1.0]])), 1, max_iter=5)
    assert exc.value.residual > 0


def test_newton_quadratic_one_step():
    u, it = newton_minimize(lambda u: (float((u - 3) @ (u - 3)), 2 * (u - 3), 2 * np.eye(2)), 2)
    assert u == pytest.approx([3, 3]) and it == 1


def test_face_orbit_every_face_of_cube():
    x = random_point(CUBE, range(8), seed=0)
    P = orbit_polytope(CUBE, x)
    for f in faces(P):
        y, face = face_orbit(CUBE, x, f.selector)
        assert face == f.polytope
        assert y.support == {i for i, w in enumerate(CUBE.weights) if w in f.polytope.vertices}


def test_face_orbit_preconditions():
    with pytest.raises(InputError):
        face_orbit(W2, point(1, 1, 1), (0, 0))
    with pytest.raises(InputError, match=r"\[1\]"):
        face_orbit(W2, point(1, 0, 1), (1, 0))


def test_boundary_stabilizer_examples():
    chk = boundary_stabilizer_check(W2, point(1, 1, 1), (1, 0))
    assert chk.applicable and chk.on_boundary and chk.dim_y > chk.dim_x and chk.passed
    chk = boundary_stabilizer_check(W2, point(1, 0, 0), (1, 0))
    assert not chk.applicable and chk.passed


def test_density_small():
    rep = density_experiment(W2, "full", 50, seed=1)
    assert rep.fraction == 1.0 and rep.reference == convex_hull(SIMPLEX)
    assert all(c == 50 for _, c in rep.omega)
    sub = density_experiment(W2, "0,2", 10, seed=1)
    assert sub.reference.vertices == ((0, 0), (0, 1)) and sub.fraction == 1.0
    assert rep.to_json()["success_fraction"] == 1.0


def test_parse_x_spec():
    assert parse_x_spec(W2, "real") == ("real", [0, 1, 2], True)
    assert parse_x_spec(W2, "2,0") == ("support:0,2", [0, 2], False)
    for bad in ("banana", "7", ""):
        with pytest.raises(InputError):
            parse_x_spec(W2, bad)


def test_sample_seeds_deterministic():
    assert sample_seeds(9, 5) == sample_seeds(9, 5)
    assert sample_seeds(9, 5) != sample_seeds(10, 5)
    assert len(set(sample_seeds(9, 100))) == 100


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([[0, 1, 2], [0, 1], [1, 2]]))
def test_image_in_polytope_and_affine_slice(seed, support):
    x = random_point(W2, support, seed)
    P = orbit_polytope(W2, x)
    vs, mus = sample_image(W2, x, 20, seed)
    for v, mu in zip(vs, mus):
        y = act(W2, v, x)
        assert contains(P, exact_moment(W2, y)[0]) is not Membership.OUTSIDE
        assert affine_residual(W2, x, mu) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_invert_roundtrip(seed):
    rng = np.random.default_rng(seed)
    x = random_point(CUBE, range(8), seed)
    target = margin_target(orbit_polytope(CUBE, x), 0.01, rng)
    v = invert_moment(CUBE, x, target)
    assert np.linalg.norm(moment_map(CUBE, act(CUBE, v, x)) - [float(q) for q in target]) <= 1e-9


def test_margin_target_interior():
    P = convex_hull(SIMPLEX)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert contains(P, margin_target(P, 1e-3, rng)) is Membership.INTERIOR
