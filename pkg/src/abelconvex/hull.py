"""Exact-rational convex geometry.

Everything here runs on :class:`fractions.Fraction`; floats are rejected at the
boundary. Sizes are desk scale (tens of points, ambient dimension up to 4), so
the algorithms favour obvious correctness over asymptotics:

* affine hulls by exact Gaussian elimination (canonical RREF bases),
* vertex detection by exact LP feasibility (two-phase simplex, Bland's rule),
* facets by enumerating affinely independent vertex subsets.

Public values are Fractions; the inner loops run on gmpy2 ``mpq``, which is
exact, hashes like Fraction and is much faster.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import InputError

Vec = tuple  # tuple of Fraction


# ---------------------------------------------------------------------------
# rationals and vectors


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions and "p/q" strings; floats are refused."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not an exact rational: {value!r}")


def to_vec(values: Iterable) -> Vec:
    return tuple(to_fraction(v) for v in values)


def fraction_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def vec_to_json(v: Sequence[Fraction]) -> list[str]:
    return [fraction_to_str(q) for q in v]


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    out = 0
    for x, y in zip(a, b):
        out += x * y
    return Fraction(out) if isinstance(out, int) else out


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def scale(c: Fraction, a: Sequence[Fraction]) -> Vec:
    return tuple(c * x for x in a)


# ---------------------------------------------------------------------------
# exact linear algebra


def rref(rows: Iterable[Sequence[Fraction]], ncols: int) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and their pivot columns."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    one = next((type(x)(1) for row in rows for x in row), Fraction(1))
    basis = []
    for f in free:
        x = [one * 0] * ncols
        x[f] = one
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def span_basis(vectors: Iterable[Sequence[Fraction]], ncols: int) -> tuple[Vec, ...]:
    """Canonical basis (RREF rows) of the span of ``vectors``."""
    reduced, _ = rref(vectors, ncols)
    return tuple(reduced)


def in_span(basis: Sequence[Vec], v: Sequence[Fraction]) -> bool:
    """Membership of ``v`` in the span of an RREF basis."""
    if not basis:
        return all(x == 0 for x in v)
    coords = _rref_coords(basis, v)
    recon = [Fraction(0)] * len(v)
    for c, row in zip(coords, basis):
        if c:
            recon = [a + c * b for a, b in zip(recon, row)]
    return tuple(recon) == tuple(v)


def _rref_coords(basis: Sequence[Vec], v: Sequence[Fraction]) -> list[Fraction]:
    # for v in span(basis), the coefficient of row j is v at that row's pivot
    out = []
    for row in basis:
        p = next(i for i, x in enumerate(row) if x != 0)
        out.append(v[p])
    return out


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vec:
    """Solve a square nonsingular system exactly."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    reduced, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise InputError("singular system")
    return tuple(row[n] for row in reduced)


# ---------------------------------------------------------------------------
# exact simplex


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], r: int, c: int) -> None:
    inv = 1 / rows[r][c]
    pr = [x * inv for x in rows[r]]
    rows[r] = pr
    for i, row in enumerate(rows):
        if i != r and row[c] != 0:
            f = row[c]
            rows[i] = [x - f * y for x, y in zip(row, pr)]
    if obj[c] != 0:
        f = obj[c]
        obj[:] = [x - f * y for x, y in zip(obj, pr)]


def _run_simplex(rows, obj, basis, allowed: int) -> bool:
    """Maximize in place. Columns >= ``allowed`` never enter. False if unbounded."""
    while True:
        entering = next((j for j in range(allowed) if obj[j] > 0), None)
        if entering is None:
            return True
        best = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        leave = best[1]
        _pivot(rows, obj, leave, entering)
        basis[leave] = entering


def linprog_eq(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction],
               c: Sequence[Fraction] | None = None):
    """Maximize c.x subject to a x = b, x >= 0, exactly.

    Returns ``None`` when infeasible, otherwise ``(x, value)``. With ``c`` None
    only feasibility is decided and any feasible vertex is returned.
    """
    a = [[mpq(x) for x in row] for row in a]
    b = [mpq(x) for x in b]
    m = len(a)
    n = len(a[0]) if m else 0
    rows: list[list] = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        art = [mpq(0)] * m
        art[i] = mpq(1)
        rows.append([sign * x for x in a[i]] + art + [sign * b[i]])
    # phase one: maximize -sum(artificials)
    obj = [sum((row[j] for row in rows), mpq(0)) for j in range(n)]
    obj += [mpq(0)] * m + [sum((row[-1] for row in rows), mpq(0))]
    basis = [n + i for i in range(m)]
    _run_simplex(rows, obj, basis, n)
    if obj[-1] != 0:
        return None
    # drive degenerate artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(rows):
        if basis[i] >= n:
            j = next((j for j in range(n) if rows[i][j] != 0), None)
            if j is None:
                del rows[i]
                del basis[i]
                continue
            _pivot(rows, [mpq(0)] * (n + m + 1), i, j)
            basis[i] = j
        i += 1
    rows = [row[:n] + [row[-1]] for row in rows]
    if c is None:
        c = [0] * n
    c = [mpq(x) for x in c]
    obj = c + [mpq(0)]
    for row, bi in zip(rows, basis):
        if c[bi] != 0:
            f = c[bi]
            obj = [x - f * y for x, y in zip(obj, row)]
    if not _run_simplex(rows, obj, basis, n):
        raise InputError("unbounded linear program")
    x = [Fraction(0)] * n
    for row, bi in zip(rows, basis):
        x[bi] = Fraction(row[-1])
    return tuple(x), Fraction(-obj[-1])


def convex_combination(points: Sequence[Vec], q: Vec) -> Vec | None:
    """Exact convex weights expressing ``q`` from ``points``, or None."""
    if not points:
        return None
    k = len(q)
    a = [[p[i] for p in points] for i in range(k)] + [[Fraction(1)] * len(points)]
    res = linprog_eq(a, list(q) + [Fraction(1)])
    return None if res is None else res[0]


# ---------------------------------------------------------------------------
# polytopes


class Membership(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"
    OFF_AFFINE_HULL = "off-affine-hull"


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope given by its irredundant vertices (lexicographically sorted).

    ``affine_basis`` is the canonical RREF basis of the direction space of the
    affine hull and ``base_point`` is the first vertex. Two polytopes compare
    equal iff their vertex tuples are identical.
    """

    ambient_dim: int
    vertices: tuple[Vec, ...]
    affine_basis: tuple[Vec, ...]
    base_point: Vec

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.ambient_dim, self.vertices))

    @property
    def dim(self) -> int:
        return len(self.affine_basis)

    def affine_coords(self, q: Sequence[Fraction]) -> Vec | None:
        """Coordinates of ``q`` in the affine frame, or None if off the affine hull."""
        diff = sub(q, self.base_point)
        if not in_span(self.affine_basis, diff):
            return None
        return tuple(_rref_coords(self.affine_basis, diff))

    @cached_property
    def _coords(self) -> list[tuple]:
        return [tuple(mpq(q) for q in self.affine_coords(v)) for v in self.vertices]

    @cached_property
    def facets(self) -> tuple[tuple[Vec, Fraction, frozenset], ...]:
        """Facet inequalities ``n . y <= b`` in affine coordinates, with vertex sets."""
        d = self.dim
        ys = self._coords
        if d == 0:
            return ()
        if d == 1:
            vals = [Fraction(y[0]) for y in ys]
            lo, hi = min(vals), max(vals)
            return (
                ((Fraction(1),), hi, frozenset(i for i, v in enumerate(vals) if v == hi)),
                ((Fraction(-1),), -lo, frozenset(i for i, v in enumerate(vals) if v == lo)),
            )
        found: dict[Vec, tuple[Vec, Fraction, frozenset]] = {}
        covered: set[frozenset] = set()
        for combo in itertools.combinations(range(len(ys)), d):
            if any(set(combo) <= s for s in covered):
                continue
            y0 = ys[combo[0]]
            diffs = [sub(ys[j], y0) for j in combo[1:]]
            ns = nullspace(diffs, d)
            if len(ns) != 1:
                continue
            n = ns[0]
            b = dot(n, y0)
            vals = [dot(n, y) for y in ys]
            if all(v <= b for v in vals):
                pass
            elif all(v >= b for v in vals):
                n, b = tuple(-x for x in n), -b
            else:
                continue
            lead = abs(next(x for x in n if x != 0))
            key = tuple(Fraction(x / lead) for x in n)
            if key not in found:
                on = frozenset(i for i, y in enumerate(ys) if dot(n, y) == b)
                found[key] = (key, Fraction(b / lead), on)
                covered.add(on)
        return tuple(found[key] for key in sorted(found))

    def ambient_functional(self, n_aff: Sequence[Fraction]) -> Vec:
        """The ambient vector in the direction space inducing ``n_aff`` on affine coordinates."""
        basis = self.affine_basis
        gram = [[dot(u, w) for w in basis] for u in basis]
        c = solve(gram, list(n_aff))
        out = [Fraction(0)] * self.ambient_dim
        for cj, row in zip(c, basis):
            out = [x + cj * y for x, y in zip(out, row)]
        return tuple(out)

    def facet_selectors(self) -> list[Vec]:
        """One exposing functional per facet, in ambient coordinates."""
        return [self.ambient_functional(n) for n, _, _ in self.facets]

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "vertices": [vec_to_json(v) for v in self.vertices],
            "affine_basis": [vec_to_json(v) for v in self.affine_basis],
            "base_point": vec_to_json(self.base_point),
        }


@dataclass(frozen=True)
class Face:
    selector: Vec
    vertex_indices: tuple[int, ...]
    polytope: Polytope = field(compare=False)


def _check_dims(points: Sequence[Sequence], k: int | None = None) -> int:
    if not points:
        raise InputError("empty point list")
    k = len(points[0]) if k is None else k
    for p in points:
        if len(p) != k:
            raise InputError(f"dimension mismatch: expected {k}, got {len(p)}")
    return k


def _from_vertices(vertices: Iterable[Vec], k: int) -> Polytope:
    """Build a polytope from points already known to be in convex position."""
    verts = tuple(sorted(set(vertices)))
    base = verts[0]
    basis = span_basis((sub(v, base) for v in verts[1:]), k)
    return Polytope(k, verts, basis, base)


def _is_vertex(i: int, coords: Sequence[Vec]) -> bool:
    others = [c for j, c in enumerate(coords) if j != i]
    return convex_combination(others, coords[i]) is None


def convex_hull(points: Sequence[Sequence]) -> Polytope:
    """Irredundant vertex description of conv(points), exactly."""
    k = _check_dims(points)
    pts = sorted({to_vec(p) for p in points})
    base = pts[0]
    basis = span_basis((sub(p, base) for p in pts[1:]), k)
    d = len(basis)
    if d == 0:
        return Polytope(k, (base,), (), base)
    coords = [tuple(_rref_coords(basis, sub(p, base))) for p in pts]
    if d == 1:
        order = sorted(range(len(pts)), key=lambda i: coords[i])
        keep = {order[0], order[-1]}
    else:
        ints = _integer_coords(coords)
        keep = _probe_vertices(ints)
        lifted = [tuple(mpq(x) for x in c) for c in ints]
        for i in range(len(pts)):
            if i not in keep and _is_vertex(i, lifted):
                keep.add(i)
    verts = tuple(pts[i] for i in sorted(keep))
    return Polytope(k, verts, basis, verts[0])


@lru_cache(maxsize=None)
def _probes(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(p for p in itertools.product((-2, -1, 0, 1, 3), repeat=d) if any(p))


def _probe_vertices(coords: Sequence[tuple[int, ...]]) -> set[int]:
    # unique maximizers of fixed integer functionals are vertices
    found = set()
    for probe in _probes(len(coords[0])):
        vals = [sum(a * b for a, b in zip(probe, c)) for c in coords]
        top = max(vals)
        if vals.count(top) == 1:
            found.add(vals.index(top))
    return found


def _integer_coords(coords: Sequence[Vec]) -> list[tuple[int, ...]]:
    """Scale by the common denominator; the hull structure is unchanged."""
    den = math.lcm(*(q.denominator for c in coords for q in c))
    return [tuple(int(q * den) for q in c) for c in coords]


def contains(P: Polytope, q: Sequence) -> Membership:
    """Classify ``q`` relative to the affine hull of ``P``."""
    q = to_vec(q)
    if len(q) != P.ambient_dim:
        raise InputError(f"dimension mismatch: expected {P.ambient_dim}, got {len(q)}")
    y = P.affine_coords(q)
    if y is None:
        return Membership.OFF_AFFINE_HULL
    on_boundary = False
    for n, b, _ in P.facets:
        v = dot(n, y)
        if v > b:
            return Membership.OUTSIDE
        if v == b:
            on_boundary = True
    return Membership.BOUNDARY if on_boundary else Membership.INTERIOR


def interior_certificate(P: Polytope, q: Sequence) -> Vec | None:
    """Strictly positive convex weights on the vertices of ``P`` reproducing ``q``.

    Returns None when no such combination exists, i.e. ``q`` is not in the
    relative interior. Solves max t subject to lambda_j >= t.
    """
    q = to_vec(q)
    m = len(P.vertices)
    k = P.ambient_dim
    # lambda_j = t + mu_j, columns: mu_0..mu_{m-1}, t
    a = [[v[i] for v in P.vertices] + [sum((v[i] for v in P.vertices), Fraction(0))]
         for i in range(k)]
    a.append([Fraction(1)] * m + [Fraction(m)])
    c = [Fraction(0)] * m + [Fraction(1)]
    res = linprog_eq(a, list(q) + [Fraction(1)], c)
    if res is None or res[1] <= 0:
        return None
    x, t = res
    return tuple(t + mu for mu in x[:m])


def exposed_face(P: Polytope, beta: Sequence) -> Face:
    beta = to_vec(beta)
    if len(beta) != P.ambient_dim:
        raise InputError(f"dimension mismatch: expected {P.ambient_dim}, got {len(beta)}")
    vals = [dot(v, beta) for v in P.vertices]
    top = max(vals)
    idx = tuple(i for i, v in enumerate(vals) if v == top)
    return Face(beta, idx, _from_vertices((P.vertices[i] for i in idx), P.ambient_dim))


def faces(P: Polytope) -> list[Face]:
    """All nonempty proper faces with exact exposing functionals.

    Faces are intersections of facets; the sum of the facet normals of the
    facets containing a face exposes exactly that face.
    """
    facets = P.facets
    sets: dict[frozenset, set[int]] = {}
    for idx, (_, _, verts) in enumerate(facets):
        sets.setdefault(verts, set()).add(idx)
    frontier = list(sets)
    while frontier:
        new = []
        for s in frontier:
            for t in list(sets):
                inter = s & t
                if inter and inter not in sets:
                    sets[inter] = set()
                    new.append(inter)
        frontier = new
    out = []
    for verts in sets:
        containing = [i for i, (_, _, fv) in enumerate(facets) if verts <= fv]
        n = [Fraction(0)] * P.dim
        for i in containing:
            n = [a + b for a, b in zip(n, facets[i][0])]
        beta = P.ambient_functional(n)
        face = exposed_face(P, beta)
        assert frozenset(face.vertex_indices) == verts
        out.append(face)
    out.sort(key=lambda f: (len(f.vertex_indices), f.vertex_indices))
    return out


def minkowski_sum(terms: Sequence[tuple]) -> Polytope:
    """Weighted Minkowski sum of ``(weight, polytope)`` pairs, weights positive."""
    if not terms:
        raise InputError("empty Minkowski sum")
    k = terms[0][1].ambient_dim
    acc: list[Vec] | None = None
    for w, P in terms:
        w = to_fraction(w)
        if w <= 0:
            raise InputError(f"Minkowski weight must be positive, got {w}")
        if P.ambient_dim != k:
            raise InputError("dimension mismatch in Minkowski sum")
        scaled = [scale(w, v) for v in P.vertices]
        if acc is None:
            acc = scaled
        else:
            acc = list(convex_hull([add(a, b) for a in acc for b in scaled]).vertices)
    return convex_hull(acc)


def support_value(P: Polytope, beta: Sequence[Fraction]) -> Fraction:
    """h_P(beta) = max over P of <., beta>."""
    return max(dot(v, beta) for v in P.vertices)
