"""Finite-support probability measures on P^n under the pushforward action.

The Kempf-Ness function of a measure is the weighted sum of the atoms'
Kempf-Ness functions, and its gradient map is the weighted average of the
atoms' moments. The closure of the gradient image of an orbit is the weighted
Minkowski sum of the atoms' orbit polytopes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .hull import Polytope, Vec, minkowski_sum, to_fraction, to_vec
from .kempfness import PropertyReport, check_axioms, exact_moment, kn_derivatives, kn_value, moment_map
from .orbitgeom import _require_interior, flow_limit, newton_minimize, orbit_polytope
from .weights import ProjPoint, Subalgebra, WeightSystem, _check, act, difference_span


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    atoms: tuple[tuple[ProjPoint, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InputError("a measure needs at least one atom")
        atoms = tuple((x, to_fraction(w)) for x, w in self.atoms)
        for _, w in atoms:
            if w <= 0:
                raise InputError(f"atom weights must be positive, got {w}")
        total = sum(w for _, w in atoms)
        if total != 1:
            raise InputError(f"atom weights sum to {total}, not 1")
        sizes = {x.size for x, _ in atoms}
        if len(sizes) != 1:
            raise InputError("atoms live in projective spaces of different dimension")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[ProjPoint, object]]) -> "DiscreteMeasure":
        return cls(tuple(pairs))

    @property
    def points(self) -> list[ProjPoint]:
        return [x for x, _ in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.atoms]


def _check_measure(W: WeightSystem, nu: DiscreteMeasure) -> None:
    for x in nu.points:
        _check(W, x)


def pushforward(W: WeightSystem, v, nu: DiscreteMeasure) -> DiscreteMeasure:
    _check_measure(W, nu)
    return DiscreteMeasure(tuple((act(W, v, x), w) for x, w in nu.atoms))


def measure_kn(W: WeightSystem, nu: DiscreteMeasure, v) -> float:
    _check_measure(W, nu)
    return sum(float(w) * kn_value(W, x, v) for x, w in nu.atoms)


def measure_moment(W: WeightSystem, nu: DiscreteMeasure) -> np.ndarray:
    _check_measure(W, nu)
    return sum(float(w) * moment_map(W, x) for x, w in nu.atoms)


def exact_measure_moment(W: WeightSystem, nu: DiscreteMeasure) -> Vec:
    """Gradient map with rational atom weights times rationalized atom moments."""
    _check_measure(W, nu)
    out = [Fraction(0)] * W.dim_a
    for x, w in nu.atoms:
        mu, _ = exact_moment(W, x)
        out = [a + w * b for a, b in zip(out, mu)]
    return tuple(out)


def measure_orbit_polytope(W: WeightSystem, nu: DiscreteMeasure) -> Polytope:
    """sum_j w_j conv{alpha_i : i in supp(x_j)}, exactly."""
    _check_measure(W, nu)
    return _minkowski_cached(W, nu)


@lru_cache(maxsize=128)
def _minkowski_cached(W: WeightSystem, nu: DiscreteMeasure) -> Polytope:
    # both arguments are immutable; the sum and its facets get reused by inversions
    return minkowski_sum([(w, orbit_polytope(W, x)) for x, w in nu.atoms])


def common_stabilizer_complement(W: WeightSystem, nu: DiscreteMeasure) -> Subalgebra:
    """Orthogonal complement of the intersection of the atoms' stabilizers."""
    vecs = []
    for x in nu.points:
        vecs.extend(difference_span(W, x.support).basis)
    return Subalgebra.spanned_by(vecs, W.dim_a)


def measure_invert(W: WeightSystem, nu: DiscreteMeasure, target: Sequence, tol: float = 1e-9,
                   max_iter: int = 100) -> np.ndarray:
    """v with Phi(exp(v)_* nu) = target, v orthogonal to the common stabilizer."""
    _check_measure(W, nu)
    target = to_vec(target)
    _require_interior(measure_orbit_polytope(W, nu), target)
    basis = common_stabilizer_complement(W, nu).orthonormal_basis()
    t = np.array([float(q) for q in target])
    ws = [float(w) for w in nu.weights]

    def fun(u):
        v = basis @ u
        val = 0.0
        grad = np.zeros(W.dim_a)
        hess = np.zeros((W.dim_a, W.dim_a))
        for wj, x in zip(ws, nu.points):
            ev = kn_derivatives(W, x, v)
            val += wj * ev.value
            grad += wj * ev.gradient
            hess += wj * ev.hessian
        return val - float(t @ v), basis.T @ (grad - t), basis.T @ hess @ basis

    u, _ = newton_minimize(fun, basis.shape[1], tol, max_iter)
    return basis @ u


def limit_measure(W: WeightSystem, nu: DiscreteMeasure, beta: Sequence) -> DiscreteMeasure:
    """Atomwise flow limit along a shared beta; an A-invariant measure in the orbit closure."""
    _check_measure(W, nu)
    return DiscreteMeasure(tuple((flow_limit(W, x, beta).limit, w) for x, w in nu.atoms))


def check_measure_properties(W: WeightSystem, nu: DiscreteMeasure, trials: int = 100,
                             seed: int = 0, tol: float = 1e-9) -> PropertyReport:
    """The axiom checks of :func:`check_properties` for the measure Kempf-Ness function."""
    _check_measure(W, nu)
    comp = common_stabilizer_complement(W, nu)
    return check_axioms(
        psi=lambda v: measure_kn(W, nu, v),
        translated_psi=lambda v, w: measure_kn(W, pushforward(W, v, nu), w),
        gradient=lambda v: measure_moment(W, pushforward(W, v, nu)),
        stabilizer=comp.orthogonal_complement(),
        k=W.dim_a, trials=trials, seed=seed, tol=tol,
    )
