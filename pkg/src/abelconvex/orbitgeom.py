"""Orbit geometry of a diagonal action: flow limits, orbit polytopes, moment inversion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, InputError, NotInteriorError
from .hull import (Membership, Polytope, Vec, contains, convex_hull, exposed_face, faces,
                   fraction_to_str, to_vec, vec_to_json)
from .kempfness import exact_moment, kn_derivatives, moment_map
from .weights import (ProjPoint, WeightSystem, _check, act, difference_span, is_fixed,
                      random_point, stabilizer_algebra)


@dataclass(frozen=True)
class FlowResult:
    limit: ProjPoint
    achieved_value: Fraction
    limit_support: frozenset

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "achieved_value": fraction_to_str(self.achieved_value),
            "limit_support": sorted(self.limit_support),
        }


@dataclass(frozen=True)
class CriticalData:
    values: tuple[Fraction, ...]
    level_supports: tuple[frozenset, ...]

    def to_json(self) -> dict:
        return {
            "values": [fraction_to_str(c) for c in self.values],
            "level_supports": [sorted(s) for s in self.level_supports],
        }


def flow_limit(W: WeightSystem, x: ProjPoint, beta: Sequence) -> FlowResult:
    """lim exp(t beta).x as t -> +inf, computed from the top level of <alpha_i, beta>."""
    _check(W, x)
    pair = W.pairings(beta)
    m = max(pair[i] for i in x.support)
    top = frozenset(i for i in x.support if pair[i] == m)
    z = np.array(x.coords)
    mask = np.zeros(x.size, dtype=bool)
    mask[list(top)] = True
    z[~mask] = 0
    return FlowResult(ProjPoint(z, top), m, top)


def ambient_max(W: WeightSystem, beta: Sequence) -> Fraction:
    """max of the beta-component of the moment map over all of P^n."""
    return max(W.pairings(beta))


def wmax_membership(W: WeightSystem, x: ProjPoint, beta: Sequence, x_max) -> bool:
    return flow_limit(W, x, beta).achieved_value == Fraction(x_max)


def flow_trajectory(W: WeightSystem, x: ProjPoint, beta: Sequence, ts: Iterable[float]) -> np.ndarray:
    """<mu(exp(t beta).x), beta> on a grid of times."""
    b = np.array([float(q) for q in to_vec(beta)])
    return np.array([float(moment_map(W, act(W, t * b, x)) @ b) for t in ts])


def level_gap(W: WeightSystem, x: ProjPoint, beta: Sequence) -> Fraction | None:
    """Distance from the top level of beta on supp(x) to the next one (None if single level)."""
    pair = sorted({W.pairings(beta)[i] for i in x.support}, reverse=True)
    return pair[0] - pair[1] if len(pair) > 1 else None


def orbit_polytope(W: WeightSystem, x: ProjPoint) -> Polytope:
    """Closure of mu(A.x): the hull of the active weights."""
    _check(W, x)
    return convex_hull([W.weights[i] for i in x.support_list])


def critical_data(W: WeightSystem, beta: Sequence) -> CriticalData:
    pair = W.pairings(beta)
    if all(q == 0 for q in to_vec(beta)):
        raise InputError("beta = 0: every point is critical")
    values = tuple(sorted(set(pair)))
    levels = tuple(frozenset(i for i, p in enumerate(pair) if p == c) for c in values)
    return CriticalData(values, levels)


# ---------------------------------------------------------------------------
# moment inversion


def newton_minimize(fun: Callable[[np.ndarray], tuple[float, np.ndarray, np.ndarray]],
                    dim: int, tol: float = 1e-9, max_iter: int = 100) -> tuple[np.ndarray, int]:
    """Damped Newton for a smooth strictly convex function on R^dim.

    ``fun(u)`` returns value, gradient and Hessian. Steps are halved until the
    Armijo condition holds; a step that halves the gradient norm is also
    accepted, since near the optimum the value stops resolving in floating
    point before the gradient does.
    """
    u = np.zeros(dim)
    if dim == 0:
        return u, 0
    f, g, h = fun(u)
    for it in range(max_iter + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol:
            return _polish(fun, u, g, h), it
        if it == max_iter:
            break
        try:
            d = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            d = -g
        slope = float(g @ d)
        if slope >= 0:
            d, slope = -g, -gnorm**2
        s = 1.0
        while True:
            cand = u + s * d
            fc, gc, hc = fun(cand)
            if fc <= f + 1e-4 * s * slope or np.linalg.norm(gc) <= 0.5 * gnorm:
                break
            s *= 0.5
            if s < 1e-14:
                raise ConvergenceError("line search failed", gnorm, it)
        u, f, g, h = cand, fc, gc, hc
    raise ConvergenceError("Newton iteration did not converge", float(np.linalg.norm(g)), max_iter)


def _polish(fun, u, g, h):
    # one extra full Newton step, kept only if it shrinks the gradient
    try:
        cand = u - np.linalg.solve(h, g)
    except np.linalg.LinAlgError:
        return u
    _, gc, _ = fun(cand)
    return cand if np.linalg.norm(gc) < np.linalg.norm(g) else u


def _require_interior(P: Polytope, target: Vec) -> None:
    m = contains(P, target)
    if m is not Membership.INTERIOR:
        raise NotInteriorError(
            f"target {vec_to_json(target)} is {m.value} relative to the orbit polytope; "
            "only relative-interior values are attained at finite group elements", m)


def invert_moment(W: WeightSystem, x: ProjPoint, target: Sequence, tol: float = 1e-9,
                  max_iter: int = 100) -> np.ndarray:
    """The unique v in the complement of the stabilizer with mu(exp(v).x) = target."""
    _check(W, x)
    target = to_vec(target)
    _require_interior(orbit_polytope(W, x), target)
    basis = stabilizer_algebra(W, x).orthogonal_complement().orthonormal_basis()
    t = np.array([float(q) for q in target])

    def fun(u):
        v = basis @ u
        ev = kn_derivatives(W, x, v)
        return (ev.value - float(t @ v), basis.T @ (ev.gradient - t),
                basis.T @ ev.hessian @ basis)

    u, _ = newton_minimize(fun, basis.shape[1], tol, max_iter)
    return basis @ u


# ---------------------------------------------------------------------------
# faces and vertices


def face_orbit(W: WeightSystem, x: ProjPoint, beta: Sequence) -> tuple[ProjPoint, Polytope]:
    """Flow limit y of x along beta together with the face it realizes.

    Requires supp(x) to meet the top level of beta over all weights, so that
    the face reached is the face of the full polytope exposed by beta.
    """
    _check(W, x)
    beta = to_vec(beta)
    if all(q == 0 for q in beta):
        raise InputError("beta = 0 does not expose a proper face")
    pair = W.pairings(beta)
    top = {i for i, p in enumerate(pair) if p == max(pair)}
    if not top & x.support:
        raise InputError(f"support of x misses the top-level indices {sorted(top)}")
    y = flow_limit(W, x, beta).limit
    face = orbit_polytope(W, y)
    expected = exposed_face(orbit_polytope(W, x), beta).polytope
    if face != expected:
        raise RuntimeError("flow-limit orbit polytope differs from the exposed face")
    return y, face


@dataclass(frozen=True)
class VertexWitness:
    vertex: Vec
    selector: Vec
    limit: ProjPoint
    moment: Vec

    @property
    def attained(self) -> bool:
        return self.moment == self.vertex


def vertex_witnesses(W: WeightSystem, x: ProjPoint) -> list[VertexWitness]:
    """For each vertex of the orbit polytope, an exposing beta and its flow limit."""
    P = orbit_polytope(W, x)
    if P.dim == 0:
        selectors = [(P.vertices[0], tuple(Fraction(0) for _ in range(W.dim_a)))]
    else:
        selectors = [(P.vertices[f.vertex_indices[0]], f.selector)
                     for f in faces(P) if len(f.vertex_indices) == 1]
    out = []
    for vertex, beta in selectors:
        y = flow_limit(W, x, beta).limit
        out.append(VertexWitness(vertex, beta, y, exact_moment(W, y)[0]))
    return out


def fixed_point_images(W: WeightSystem, x: ProjPoint) -> list[Vec]:
    """Moments of the A-fixed points in the orbit closure: the basis points e_i, i in supp(x)."""
    return sorted({W.weights[i] for i in x.support})


# ---------------------------------------------------------------------------
# experiments


@dataclass
class DensityReport:
    x_spec: str
    samples: int
    seed: int
    reference: Polytope
    successes: int
    omega: list[tuple[Vec, int]] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.successes / self.samples if self.samples else 0.0

    def to_json(self) -> dict:
        return {
            "x_spec": self.x_spec,
            "samples": self.samples,
            "seed": self.seed,
            "reference_polytope": self.reference.to_json(),
            "successes": self.successes,
            "success_fraction": self.fraction,
            "omega": [{"vertex": vec_to_json(v), "members": c,
                       "fraction": c / self.samples if self.samples else 0.0}
                      for v, c in self.omega],
        }


def sample_seeds(seed: int, count: int) -> list[int]:
    """Independent per-sample seeds derived from one master seed."""
    if count <= 0:
        return []
    words = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(w) for w in words]


def parse_x_spec(W: WeightSystem, x_spec) -> tuple[str, list[int], bool]:
    """Returns (label, support pattern, real)."""
    full = list(range(len(W.weights)))
    if x_spec in ("full", None):
        return "full", full, False
    if x_spec == "real":
        return "real", full, True
    if isinstance(x_spec, str):
        try:
            pattern = [int(s) for s in x_spec.split(",") if s.strip()]
        except ValueError as exc:
            raise InputError(f"unknown X specification {x_spec!r}") from exc
    else:
        pattern = [int(i) for i in x_spec]
    if not pattern or min(pattern) < 0 or max(pattern) >= len(full):
        raise InputError(f"invalid support pattern {pattern}")
    pattern = sorted(set(pattern))
    return "support:" + ",".join(map(str, pattern)), pattern, False


def density_experiment(W: WeightSystem, x_spec, samples: int, seed: int) -> DensityReport:
    """Fraction of sampled points whose orbit image closure is the whole polytope.

    ``x_spec`` is "full" (P^n), "real" (real locus of P^n) or a support pattern
    (points supported exactly on it; the reference polytope is then the hull of
    the pattern's weights).
    """
    label, pattern, real = parse_x_spec(W, x_spec)
    reference = convex_hull([W.weights[i] for i in pattern])
    omega = {v: 0 for v in reference.vertices}
    ok = 0
    for s in sample_seeds(seed, samples):
        x = random_point(W, pattern, s, real=real)
        P = orbit_polytope(W, x)
        ok += P == reference
        for v in reference.vertices:
            if contains(P, v) in (Membership.INTERIOR, Membership.BOUNDARY):
                omega[v] += 1
    return DensityReport(label, samples, seed, reference, ok, sorted(omega.items()))


@dataclass(frozen=True)
class BoundaryCheck:
    applicable: bool
    on_boundary: bool
    dim_x: int
    dim_y: int
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def boundary_stabilizer_check(W: WeightSystem, x: ProjPoint, beta: Sequence) -> BoundaryCheck:
    """If mu(phi(x)) is on the relative boundary of the orbit polytope, the stabilizer grows."""
    _check(W, x)
    dim_x = stabilizer_algebra(W, x).dim
    if is_fixed(W, x):
        return BoundaryCheck(False, False, dim_x, dim_x, True)
    y = flow_limit(W, x, beta).limit
    dim_y = stabilizer_algebra(W, y).dim
    mu_y, _ = exact_moment(W, y)
    on_boundary = contains(orbit_polytope(W, x), mu_y) is Membership.BOUNDARY
    return BoundaryCheck(True, on_boundary, dim_x, dim_y, (not on_boundary) or dim_y > dim_x)


def sample_image(W: WeightSystem, x: ProjPoint, samples: int, seed: int,
                 spread: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Random group elements v and the moments mu(exp(v).x)."""
    rng = np.random.default_rng(seed)
    vs = rng.uniform(-spread, spread, (samples, W.dim_a))
    mus = np.array([moment_map(W, act(W, v, x)) for v in vs]).reshape(samples, W.dim_a)
    return vs, mus


def affine_residual(W: WeightSystem, x: ProjPoint, mu: np.ndarray) -> float:
    """Distance of mu from mu(x) + span of active weight differences."""
    comp = difference_span(W, x.support).orthonormal_basis()
    d = mu - moment_map(W, x)
    return float(np.linalg.norm(d - comp @ (comp.T @ d)))


def margin_target(P: Polytope, margin: float, rng: np.random.Generator) -> Vec:
    """A rational point of P whose barycentric weights on the vertices are all >= margin-ish.

    Mixes a random vertex-heavy combination with the barycenter so the
    result sits about ``margin`` (relative) inside the relative boundary.
    """
    m = len(P.vertices)
    lam = rng.dirichlet(np.full(m, 0.3))
    lam = (1 - m * margin) * lam + margin
    q = [Fraction(round(float(l) * 10**9), 10**9) for l in lam]
    q[-1] = 1 - sum(q[:-1])
    if q[-1] <= 0:
        q = [Fraction(1, m)] * m
    return tuple(sum((c * v[j] for c, v in zip(q, P.vertices)), Fraction(0))
                 for j in range(P.ambient_dim))

