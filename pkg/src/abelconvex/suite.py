"""The bundled verification suite: every invariant checked against a scenario.

Each check returns an :class:`InvariantResult`; ``verify`` fails if any of
them does. Float comparisons use the tolerances below, polytope comparisons
are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, NotInteriorError
from .hull import Membership, contains, convex_hull, exposed_face, faces, in_span, sub, support_value
from .kempfness import check_properties, exact_moment, kn_derivatives, kn_value, moment_map, random_rational
from .measures import (DiscreteMeasure, check_measure_properties, exact_measure_moment, limit_measure,
                       measure_invert, measure_moment, measure_orbit_polytope, pushforward)
from .orbitgeom import (affine_residual, boundary_stabilizer_check, density_experiment, face_orbit,
                        flow_limit, flow_trajectory, invert_moment, level_gap, margin_target,
                        orbit_polytope, sample_seeds, vertex_witnesses)
from .weights import ProjPoint, WeightSystem, act, difference_span, random_point, stabilizer_algebra

COORD_TOL = 1e-12
TRANSLATION_TOL = 1e-10
HESSIAN_REL_TOL = 1e-6
SUPPORT_T = 30.0
SUPPORT_TOL = 1e-8


@dataclass
class InvariantResult:
    name: str
    subject: str
    passed: bool
    worst: float = 0.0
    checked: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "subject": self.subject, "passed": bool(self.passed),
                "worst": float(self.worst), "checked": int(self.checked), "detail": self.detail}


def _rng(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, *salt])


def group_law(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(trials):
        v, w = rng.uniform(-2, 2, (2, W.dim_a))
        a = act(W, v, act(W, w, x)).coords
        b = act(W, v + w, x).coords
        worst = max(worst, float(np.max(np.abs(a - b))))
    return InvariantResult("group_law", "", worst <= COORD_TOL, worst, trials)


def stabilizer_action(W: WeightSystem, x: ProjPoint, seed: int) -> InvariantResult:
    """Stabilizer directions fix x; directions off the stabilizer move it."""
    stab = stabilizer_algebra(W, x)
    worst = 0.0
    checked = 0
    for b in stab.basis:
        xi = np.array([float(q) for q in b])
        for t in np.linspace(-5, 5, 11):
            worst = max(worst, x.projective_distance(act(W, t * xi, x)))
            checked += 1
    rng = _rng(seed, 2)
    moved = True
    for _ in range(10):
        xi = random_rational(rng, W.dim_a)
        if stab.contains(xi):
            continue
        checked += 1
        y = act(W, np.array([float(q) for q in xi]), x)
        moved &= x.projective_distance(y) > 0
    return InvariantResult("stabilizer_action", "", worst <= COORD_TOL and moved, worst, checked)


def translation_identity(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    stab = stabilizer_algebra(W, x)
    rng = _rng(seed, 3)
    mu0 = moment_map(W, x)
    worst = 0.0
    for _ in range(trials):
        mu = moment_map(W, act(W, rng.uniform(-3, 3, W.dim_a), x))
        for b in stab.basis:
            wv = np.array([float(q) for q in b])
            worst = max(worst, abs(float((mu - mu0) @ wv)))
    return InvariantResult("translation_identity", "", worst <= TRANSLATION_TOL, worst, trials)


def image_containment(W: WeightSystem, x: ProjPoint, samples: int, seed: int) -> list[InvariantResult]:
    """Sampled moments: exact relative-interior membership and the affine-subspace law."""
    P = orbit_polytope(W, x)
    comp = difference_span(W, x.support)
    mu0, _ = exact_moment(W, x)
    rng = _rng(seed, 4)
    interior = affine_exact = True
    worst_aff = 0.0
    for _ in range(samples):
        y = act(W, rng.uniform(-2, 2, W.dim_a), x)
        mu, _ = exact_moment(W, y)
        interior &= contains(P, mu) is Membership.INTERIOR
        affine_exact &= in_span(comp.basis, sub(mu, mu0))
        worst_aff = max(worst_aff, affine_residual(W, x, moment_map(W, y)))
    return [
        InvariantResult("image_interior", "", interior, 0.0, samples),
        InvariantResult("affine_subspace", "", affine_exact and worst_aff <= TRANSLATION_TOL,
                        worst_aff, samples),
    ]


def hessian_fd(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    rng = _rng(seed, 5)
    h = 1e-4
    worst = 0.0
    k = W.dim_a
    for _ in range(trials):
        v = rng.uniform(-1, 1, k)
        hess = kn_derivatives(W, x, v).hessian
        e = np.eye(k) * h
        fd = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                fd[i, j] = (kn_value(W, x, v + e[i] + e[j]) - kn_value(W, x, v + e[i] - e[j])
                            - kn_value(W, x, v - e[i] + e[j]) + kn_value(W, x, v - e[i] - e[j])) / (4 * h * h)
        worst = max(worst, float(np.max(np.abs(fd - hess))) / max(1.0, float(np.max(np.abs(hess)))))
    return InvariantResult("hessian_fd", "", worst <= HESSIAN_REL_TOL, worst, trials)


def vertex_attainment(W: WeightSystem, x: ProjPoint) -> InvariantResult:
    """Vertices are fixed-point images and each is reached by a flow limit."""
    P = orbit_polytope(W, x)
    fixed = {W.weights[i] for i in x.support}
    ok = set(P.vertices) <= fixed and convex_hull(sorted(fixed)) == P
    witnesses = vertex_witnesses(W, x)
    ok &= all(wt.attained for wt in witnesses)
    ok &= {wt.vertex for wt in witnesses} == set(P.vertices)
    return InvariantResult("vertex_attainment", "", ok, 0.0, len(witnesses))


def legendre_roundtrip(W: WeightSystem, x: ProjPoint, trials: int, seed: int,
                       tol: float) -> InvariantResult:
    P = orbit_polytope(W, x)
    if P.dim == 0:
        return InvariantResult("legendre_roundtrip", "", True, 0.0, 0, "orbit is a point")
    rng = _rng(seed, 6)
    worst = 0.0
    for _ in range(trials):
        target = margin_target(P, 0.05, rng)
        v = invert_moment(W, x, target, tol)
        res = float(np.linalg.norm(moment_map(W, act(W, v, x)) - [float(q) for q in target]))
        worst = max(worst, res)
    return InvariantResult("legendre_roundtrip", "", worst <= tol, worst, trials)


def midpoint_convexity(W: WeightSystem, x: ProjPoint, trials: int, seed: int,
                       tol: float) -> InvariantResult:
    if orbit_polytope(W, x).dim == 0:
        return InvariantResult("midpoint_convexity", "", True, 0.0, 0, "orbit is a point")
    rng = _rng(seed, 7)
    worst = 0.0
    for _ in range(trials):
        v1, v2 = rng.uniform(-2, 2, (2, W.dim_a))
        m1, _ = exact_moment(W, act(W, v1, x))
        m2, _ = exact_moment(W, act(W, v2, x))
        mid = tuple((a + b) / 2 for a, b in zip(m1, m2))
        v = invert_moment(W, x, mid, tol)
        worst = max(worst, float(np.linalg.norm(moment_map(W, act(W, v, x)) - [float(q) for q in mid])))
    return InvariantResult("midpoint_convexity", "", worst <= tol, worst, trials)


def face_functoriality(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    rng = _rng(seed, 8)
    P = orbit_polytope(W, x)
    ok = True
    for _ in range(trials):
        beta = random_rational(rng, W.dim_a)
        y = flow_limit(W, x, beta).limit
        ok &= exposed_face(P, beta).polytope == orbit_polytope(W, y)
    return InvariantResult("face_functoriality", "", ok, 0.0, trials)


def flow_monotonicity(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    """mu^beta is nondecreasing along exp(t beta) and converges to the flow-limit value."""
    rng = _rng(seed, 9)
    grid = np.round(np.arange(0, 201) * 0.1, 10)
    worst_drop = 0.0
    worst_gap = 0.0
    for _ in range(trials):
        beta = random_rational(rng, W.dim_a)
        traj = flow_trajectory(W, x, beta, grid)
        worst_drop = max(worst_drop, float(np.max(-np.diff(traj), initial=0.0)))
        fl = flow_limit(W, x, beta)
        gap = level_gap(W, x, beta)
        t_end = 20.0 / float(gap) if gap is not None else 20.0
        end = flow_trajectory(W, x, beta, [t_end])[0]
        worst_gap = max(worst_gap, abs(end - float(fl.achieved_value)))
    ok = worst_drop <= COORD_TOL and worst_gap <= 1e-9
    return InvariantResult("flow_monotonicity", "", ok, max(worst_drop, worst_gap), trials)


def boundary_stabilizer(W: WeightSystem, x: ProjPoint, trials: int, seed: int) -> InvariantResult:
    P = orbit_polytope(W, x)
    rng = _rng(seed, 10)
    betas = list(P.facet_selectors()) if P.dim else []
    betas += [random_rational(rng, W.dim_a) for _ in range(trials)]
    checks = [boundary_stabilizer_check(W, x, b) for b in betas]
    ok = all(c.passed for c in checks)
    hits = sum(c.on_boundary for c in checks)
    return InvariantResult("boundary_stabilizer", "", ok, 0.0, len(checks),
                           f"{hits} cases on the relative boundary")


def kn_axioms(W: WeightSystem, x: ProjPoint, trials: int, seed: int, tol: float) -> InvariantResult:
    rep = check_properties(W, x, trials, seed, tol)
    bad = [r.name for r in rep.results if not r.passed]
    worst = rep["cocycle"].worst
    return InvariantResult("kn_axioms", "", rep.passed, worst, trials, ",".join(bad))


def point_suite(W: WeightSystem, name: str, x: ProjPoint, samples: int, seed: int,
                tol: float) -> list[InvariantResult]:
    out = [
        kn_axioms(W, x, 100, seed, tol),
        group_law(W, x, 50, seed),
        stabilizer_action(W, x, seed),
        translation_identity(W, x, 100, seed),
        *image_containment(W, x, samples, seed),
        hessian_fd(W, x, 20, seed),
        vertex_attainment(W, x),
        legendre_roundtrip(W, x, 50, seed, tol),
        midpoint_convexity(W, x, 50, seed, tol),
        face_functoriality(W, x, 50, seed),
        flow_monotonicity(W, x, 10, seed),
        boundary_stabilizer(W, x, 20, seed),
    ]
    for r in out:
        r.subject = f"point:{name}"
    return out


# ---------------------------------------------------------------------------
# measures


def measure_suite(W: WeightSystem, name: str, nu: DiscreteMeasure, samples: int, seed: int,
                  tol: float) -> list[InvariantResult]:
    out = []
    rep = check_measure_properties(W, nu, 100, seed, tol)
    out.append(InvariantResult("measure_kn_axioms", "", rep.passed, rep["cocycle"].worst, 100,
                               ",".join(r.name for r in rep.results if not r.passed)))

    exact = exact_measure_moment(W, nu)
    lin = tuple(sum((w * exact_moment(W, x)[0][j] for x, w in nu.atoms), Fraction(0))
                for j in range(W.dim_a))
    out.append(InvariantResult("measure_linearity", "", exact == lin, 0.0, 1))

    P = measure_orbit_polytope(W, nu)
    rng = _rng(seed, 11)
    ok = True
    for _ in range(samples):
        ok &= contains(P, exact_measure_moment(W, pushforward(W, rng.uniform(-2, 2, W.dim_a), nu))) \
            in (Membership.INTERIOR, Membership.BOUNDARY)
    out.append(InvariantResult("measure_image_containment", "", ok, 0.0, samples))

    worst = 0.0
    for _ in range(100):
        beta = tuple(Fraction(int(b)) for b in rng.integers(-3, 4, W.dim_a))
        b = np.array([float(q) for q in beta])
        h = float(support_value(P, beta))
        worst = max(worst, abs(float(measure_moment(W, pushforward(W, SUPPORT_T * b, nu)) @ b) - h))
    out.append(InvariantResult("support_function", "", worst <= SUPPORT_TOL, worst, 100))

    ok = True
    checked = 0
    if P.dim:
        for f in faces(P):
            if len(f.vertex_indices) != 1:
                continue
            checked += 1
            lim = limit_measure(W, nu, f.selector)
            ok &= exact_measure_moment(W, lim) == P.vertices[f.vertex_indices[0]]
    out.append(InvariantResult("limit_measure_vertices", "", ok, 0.0, checked))

    worst = 0.0
    trials = 50 if P.dim else 0
    for _ in range(trials):
        target = margin_target(P, 0.05, rng)
        v = measure_invert(W, nu, target, tol)
        worst = max(worst, float(np.linalg.norm(measure_moment(W, pushforward(W, v, nu))
                                                - [float(q) for q in target])))
    out.append(InvariantResult("measure_invert_roundtrip", "", worst <= tol, worst, trials))
    for r in out:
        r.subject = f"measure:{name}"
    return out


def weights_suite(W: WeightSystem, samples: int, seed: int) -> list[InvariantResult]:
    out = []
    for spec in ("full", "real"):
        rep = density_experiment(W, spec, samples, seed)
        out.append(InvariantResult(f"density_{spec}", "weights", rep.fraction == 1.0,
                                   1.0 - rep.fraction, samples))
    # face_orbit over every face of the full polytope, from a full-support point
    x = random_point(W, range(len(W.weights)), sample_seeds(seed, 1)[0])
    P = orbit_polytope(W, x)
    ok = True
    count = 0
    if P.dim:
        for f in faces(P):
            _, face = face_orbit(W, x, f.selector)
            ok &= face == f.polytope
            count += 1
    out.append(InvariantResult("face_orbit", "weights", ok, 0.0, count))
    return out


def run_suite(scenario, samples: int = 500, seed: int = 0, tol: float = 1e-9) -> list[InvariantResult]:
    W = scenario.weights
    results = list(weights_suite(W, samples, seed))
    for name in sorted(scenario.points):
        try:
            results += point_suite(W, name, scenario.points[name], samples, seed, tol)
        except (ConvergenceError, NotInteriorError) as exc:
            results.append(InvariantResult("solver", f"point:{name}", False, detail=str(exc)))
    for name in sorted(scenario.measures):
        try:
            results += measure_suite(W, name, scenario.measures[name], samples, seed, tol)
        except (ConvergenceError, NotInteriorError) as exc:
            results.append(InvariantResult("solver", f"measure:{name}", False, detail=str(exc)))
    return results
