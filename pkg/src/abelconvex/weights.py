"""Diagonal torus-type actions on complex projective space.

A weight system alpha_0..alpha_n in Q^k defines the action
``(exp(v) . z)_i = exp(<alpha_i, v>) z_i`` of A = exp(R^k) on P^n.
Points carry their support as exact metadata; the action never changes it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .hull import Vec, dot, in_span, nullspace, span_basis, sub, to_vec, vec_to_json

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class WeightSystem:
    dim_a: int
    weights: tuple[Vec, ...]

    def __post_init__(self):
        if self.dim_a < 1:
            raise InputError(f"dim_a must be >= 1, got {self.dim_a}")
        if not self.weights:
            raise InputError("weight system needs at least one weight")
        ws = tuple(to_vec(w) for w in self.weights)
        for i, w in enumerate(ws):
            if len(w) != self.dim_a:
                raise InputError(f"weight {i} has dimension {len(w)}, expected {self.dim_a}")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def from_lists(cls, weights: Iterable[Sequence]) -> "WeightSystem":
        ws = [to_vec(w) for w in weights]
        if not ws:
            raise InputError("weight system needs at least one weight")
        return cls(len(ws[0]), tuple(ws))

    @property
    def n(self) -> int:
        """Projective dimension: the action is on P^n."""
        return len(self.weights) - 1

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array([[float(q) for q in w] for w in self.weights], dtype=float)
        a.setflags(write=False)
        return a

    def pairings(self, beta: Sequence[Fraction]) -> list[Fraction]:
        """Exact values <alpha_i, beta> for every weight."""
        beta = to_vec(beta)
        if len(beta) != self.dim_a:
            raise InputError(f"expected a vector of dimension {self.dim_a}, got {len(beta)}")
        return [dot(w, beta) for w in self.weights]

    def to_json(self) -> dict:
        return {"dim_a": self.dim_a, "weights": [vec_to_json(w) for w in self.weights]}


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A normalized point of P^n with an exact support set."""

    coords: np.ndarray
    support: frozenset

    def __post_init__(self):
        z = np.array(self.coords, dtype=complex)
        if z.ndim != 1 or z.size == 0:
            raise InputError("coordinates must be a nonempty vector")
        supp = frozenset(int(i) for i in self.support)
        if not supp:
            raise InputError("support must be nonempty")
        if min(supp) < 0 or max(supp) >= z.size:
            raise InputError(f"support {sorted(supp)} out of range for {z.size} coordinates")
        if not np.all(np.isfinite(z)):
            raise InputError("coordinates must be finite")
        mask = np.zeros(z.size, dtype=bool)
        mask[list(supp)] = True
        z[~mask] = 0
        if np.any(z[mask] == 0):
            raise InputError("a coordinate declared in the support is zero")
        z = z / np.linalg.norm(z)
        z.setflags(write=False)
        object.__setattr__(self, "coords", z)
        object.__setattr__(self, "support", supp)

    @classmethod
    def from_coords(cls, coords: Sequence, support: Iterable[int] | None = None) -> "ProjPoint":
        z = np.asarray(coords, dtype=complex)
        if support is None:
            support = np.flatnonzero(z != 0)
        return cls(z, frozenset(support))

    @classmethod
    def basis_point(cls, i: int, size: int) -> "ProjPoint":
        z = np.zeros(size, dtype=complex)
        z[i] = 1
        return cls(z, frozenset({i}))

    @property
    def size(self) -> int:
        return self.coords.size

    @property
    def support_list(self) -> list[int]:
        return sorted(self.support)

    def sq_moduli(self) -> np.ndarray:
        return np.abs(self.coords) ** 2

    def exact_sq_moduli(self) -> dict[int, Fraction]:
        """|z_i|^2 as exact binary rationals (positive on the support)."""
        out = {}
        for i in self.support_list:
            z = self.coords[i]
            out[i] = Fraction(float(z.real)) ** 2 + Fraction(float(z.imag)) ** 2
        return out

    def projective_distance(self, other: "ProjPoint") -> float:
        """Chordal distance between the lines, after aligning phases."""
        c = np.vdot(other.coords, self.coords)
        phase = c / abs(c) if c != 0 else 1.0
        return float(np.linalg.norm(self.coords - phase * other.coords))

    def to_json(self) -> dict:
        return {
            "coords": [[float(z.real), float(z.imag)] for z in self.coords],
            "support": self.support_list,
        }


@dataclass(frozen=True)
class Subalgebra:
    """A subspace of R^k given by a canonical (RREF) rational basis."""

    ambient_dim: int
    basis: tuple[Vec, ...]

    @classmethod
    def spanned_by(cls, vectors: Iterable[Sequence[Fraction]], k: int) -> "Subalgebra":
        return cls(k, span_basis(vectors, k))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, xi: Sequence) -> bool:
        return in_span(self.basis, to_vec(xi))

    def orthogonal_complement(self) -> "Subalgebra":
        return Subalgebra(self.ambient_dim,
                          span_basis(nullspace(self.basis, self.ambient_dim), self.ambient_dim))

    def orthonormal_basis(self) -> np.ndarray:
        """Float matrix whose columns are an orthonormal basis (k x dim)."""
        if not self.basis:
            return np.zeros((self.ambient_dim, 0))
        b = np.array([[float(q) for q in row] for row in self.basis]).T
        q, _ = np.linalg.qr(b)
        return q

    def to_json(self) -> dict:
        return {"dim": self.dim, "basis": [vec_to_json(b) for b in self.basis]}


def _check(W: WeightSystem, x: ProjPoint) -> None:
    if x.size != len(W.weights):
        raise InputError(f"point has {x.size} coordinates, weight system has {len(W.weights)}")


def _check_v(W: WeightSystem, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (W.dim_a,):
        raise InputError(f"expected a vector of dimension {W.dim_a}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError("group element has non-finite entries")
    return v


def act(W: WeightSystem, v, x: ProjPoint) -> ProjPoint:
    """exp(v) . x, renormalized; support preserved."""
    _check(W, x)
    v = _check_v(W, v)
    idx = x.support_list
    z = x.coords[idx]
    logs = np.log(np.abs(z)) + W.array[idx] @ v
    mags = np.exp(logs - logs.max())
    # supported coordinates may not underflow to an exact zero
    mags = np.maximum(mags, _TINY)
    out = np.zeros(x.size, dtype=complex)
    out[idx] = mags * (z / np.abs(z))
    return ProjPoint(out, x.support)


def stabilizer_algebra(W: WeightSystem, x: ProjPoint) -> Subalgebra:
    """Projective stabilizer: kernel of the active weight differences."""
    _check(W, x)
    idx = x.support_list
    diffs = [sub(W.weights[i], W.weights[idx[0]]) for i in idx[1:]]
    return Subalgebra(W.dim_a, span_basis(nullspace(diffs, W.dim_a), W.dim_a))


def difference_span(W: WeightSystem, support: Iterable[int]) -> Subalgebra:
    """span{alpha_i - alpha_j : i, j in support}, the complement of the stabilizer."""
    idx = sorted(support)
    return Subalgebra.spanned_by((sub(W.weights[i], W.weights[idx[0]]) for i in idx[1:]), W.dim_a)


def is_fixed(W: WeightSystem, x: ProjPoint) -> bool:
    _check(W, x)
    first = W.weights[min(x.support)]
    return all(W.weights[i] == first for i in x.support)


def random_point(W: WeightSystem, support_pattern: Iterable[int], seed: int,
                 real: bool = False) -> ProjPoint:
    """Reproducible random point with exactly the given support.

    Coordinates on the support are standard (complex) Gaussians; ``real=True``
    draws real coordinates, i.e. a point of the real locus.
    """
    supp = sorted(set(int(i) for i in support_pattern))
    if not supp:
        raise InputError("support pattern must be nonempty")
    size = len(W.weights)
    if supp[0] < 0 or supp[-1] >= size:
        raise InputError(f"support pattern {supp} out of range for P^{size - 1}")
    rng = np.random.default_rng(seed)
    z = np.zeros(size, dtype=complex)
    for i in supp:
        val = 0j
        while val == 0:
            val = complex(rng.standard_normal(), 0.0 if real else rng.standard_normal())
        z[i] = val
    return ProjPoint(z, frozenset(supp))
