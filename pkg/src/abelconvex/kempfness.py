"""Kempf-Ness function and gradient map of a diagonal action on P^n.

For a normalized point x and v in R^k::

    psi(x, v) = 1/2 log sum_i |z_i|^2 exp(2 <alpha_i, v>)

Its gradient in v is the moment map at exp(v).x, the softmax average of the
active weights, and its Hessian is twice their covariance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import InputError
from .hull import Vec
from .weights import ProjPoint, Subalgebra, WeightSystem, _check, _check_v, act, stabilizer_algebra


@dataclass(frozen=True)
class KNEvaluation:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def _log_coeffs(W: WeightSystem, x: ProjPoint, v: np.ndarray):
    idx = x.support_list
    s = 2.0 * np.log(np.abs(x.coords[idx])) + 2.0 * (W.array[idx] @ v)
    return idx, s


def _softmax(s: np.ndarray) -> np.ndarray:
    p = np.exp(s - s.max())
    return p / p.sum()


def kn_value(W: WeightSystem, x: ProjPoint, v) -> float:
    _check(W, x)
    v = _check_v(W, v)
    if not v.any():
        return 0.0
    _, s = _log_coeffs(W, x, v)
    m = s.max()
    return 0.5 * (m + math.log(np.exp(s - m).sum()))


def moment_map(W: WeightSystem, x: ProjPoint) -> np.ndarray:
    _check(W, x)
    idx = x.support_list
    p = x.sq_moduli()[idx]
    return (p / p.sum()) @ W.array[idx]


def exact_moment(W: WeightSystem, x: ProjPoint) -> tuple[Vec, dict[int, Fraction]]:
    """Moment map with the coefficients |z_i|^2 rationalized.

    The coefficients are exact binary rationals renormalized to sum to one, so
    the result is an exact convex combination of the active weights.
    """
    _check(W, x)
    q = x.exact_sq_moduli()
    total = sum(q.values())
    coeffs = {i: c / total for i, c in q.items()}
    mu = [Fraction(0)] * W.dim_a
    for i, c in coeffs.items():
        mu = [m + c * a for m, a in zip(mu, W.weights[i])]
    return tuple(mu), coeffs


def kn_derivatives(W: WeightSystem, x: ProjPoint, v) -> KNEvaluation:
    _check(W, x)
    v = _check_v(W, v)
    idx, s = _log_coeffs(W, x, v)
    p = _softmax(s)
    a = W.array[idx]
    mean = p @ a
    centered = a - mean
    hess = 2.0 * (centered.T * p) @ centered
    return KNEvaluation(kn_value(W, x, v), mean, 0.5 * (hess + hess.T))


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    trials: int
    detail: str = ""


@dataclass
class PropertyReport:
    seed: int
    trials: int
    tol: float
    stabilizer_dim: int
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> PropertyResult:
        return next(r for r in self.results if r.name == name)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "tol": self.tol,
            "stabilizer_dim": self.stabilizer_dim,
            "passed": self.passed,
            "properties": [asdict(r) for r in self.results],
        }


FD_STEP = 1e-5
SECOND_DIFF_STEP = 1e-2


def random_rational(rng: np.random.Generator, k: int, bound: int = 4, max_den: int = 4) -> Vec:
    return tuple(Fraction(int(rng.integers(-bound * max_den, bound * max_den + 1)),
                          int(rng.integers(1, max_den + 1))) for _ in range(k))


def check_axioms(psi: Callable[[np.ndarray], float],
                 translated_psi: Callable[[np.ndarray, np.ndarray], float],
                 gradient: Callable[[np.ndarray], np.ndarray],
                 stabilizer: Subalgebra,
                 k: int, trials: int, seed: int, tol: float = 1e-9,
                 fd_tol: float = 1e-6, second_tol: float = 1e-10) -> PropertyReport:
    """Cocycle, first-derivative and convexity checks for an abelian Kempf-Ness function.

    ``psi(v)`` is Psi(x, exp v); ``translated_psi(v, w)`` is Psi(exp(v)x, exp w);
    ``gradient(v)`` is the gradient map at exp(v)x. Directions xi are drawn as
    exact rationals, half of them inside the stabilizer, so the vanishing
    condition of the second derivative is tested in both directions.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    cocycle = fd = 0.0
    convex_min = math.inf
    stab_worst = 0.0
    transverse_min = math.inf
    n_stab = n_trans = 0
    for trial in range(trials):
        v = rng.uniform(-1.0, 1.0, k)
        w = rng.uniform(-1.0, 1.0, k)
        cocycle = max(cocycle, abs(psi(v + w) - psi(v) - translated_psi(v, w)))

        if stabilizer.dim and trial % 2 == 1:
            coeffs = random_rational(rng, stabilizer.dim)
            xi = tuple(sum((c * b[j] for c, b in zip(coeffs, stabilizer.basis)), Fraction(0))
                       for j in range(k))
        else:
            xi = random_rational(rng, k)
        xi_f = np.array([float(q) for q in xi])
        exact = float(gradient(v) @ xi_f)
        t = FD_STEP
        fd_val = (translated_psi(v, t * xi_f) - translated_psi(v, -t * xi_f)) / (2 * t)
        fd = max(fd, abs(fd_val - exact) / max(1.0, abs(exact)))

        t = SECOND_DIFF_STEP
        second = (translated_psi(v, t * xi_f) + translated_psi(v, -t * xi_f)) / t**2
        convex_min = min(convex_min, second)
        if stabilizer.contains(xi):
            n_stab += 1
            stab_worst = max(stab_worst, abs(second))
        else:
            n_trans += 1
            transverse_min = min(transverse_min, second)

    transverse_min = float(transverse_min) if n_trans else 0.0
    results = [
        PropertyResult("cocycle", bool(cocycle <= tol), float(cocycle), trials),
        PropertyResult("gradient_fd", bool(fd <= fd_tol), float(fd), trials),
        PropertyResult("convexity", bool(convex_min >= -second_tol), float(convex_min), trials),
        PropertyResult("stabilizer_flat", bool(stab_worst <= second_tol), float(stab_worst),
                       n_stab, "second difference along stabilizer directions"),
        PropertyResult("transverse_strict", bool(n_trans == 0 or transverse_min > second_tol),
                       transverse_min, n_trans, "second difference off the stabilizer"),
    ]
    return PropertyReport(seed, trials, tol, stabilizer.dim, results)


def check_properties(W: WeightSystem, x: ProjPoint, trials: int = 100, seed: int = 0,
                     tol: float = 1e-9) -> PropertyReport:
    """Run the axiom checks for Psi at the point ``x``."""
    _check(W, x)
    return check_axioms(
        psi=lambda v: kn_value(W, x, v),
        translated_psi=lambda v, w: kn_value(W, act(W, v, x), w),
        gradient=lambda v: moment_map(W, act(W, v, x)),
        stabilizer=stabilizer_algebra(W, x),
        k=W.dim_a, trials=trials, seed=seed, tol=tol,
    )

