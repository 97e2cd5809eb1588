import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from abelconvex.weights import ProjPoint, WeightSystem

# fixed example streams keep the suite's runtime and outcome reproducible
settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")

SIMPLEX = [(0, 0), (1, 0), (0, 1)]


@pytest.fixture
def simplex():
    return WeightSystem.from_lists(SIMPLEX)


@pytest.fixture
def line():
    return WeightSystem.from_lists([(0,), (1,)])


def point(*coords):
    return ProjPoint.from_coords(coords)


# ---------------------------------------------------------------------------
# independent oracles (no LP, no library elimination)


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def _cramer(a, b):
    d = _det(a)
    if d == 0:
        return None
    out = []
    for j in range(len(a)):
        aj = [row[:j] + [bi] + row[j + 1:] for row, bi in zip(a, b)]
        out.append(_det(aj) / d)
    return out


def in_hull_caratheodory(q, pts):
    """q in conv(pts), decided by trying every small subset (Caratheodory)."""
    q = [Fraction(x) for x in q]
    pts = [[Fraction(x) for x in p] for p in pts]
    k = len(q)
    for m in range(1, k + 2):
        for sub in itertools.combinations(pts, m):
            # columns: points lifted by a 1; normal equations give the unique candidate
            a = [list(p) + [Fraction(1)] for p in sub]  # m x (k+1)
            b = q + [Fraction(1)]
            ata = [[sum(x * y for x, y in zip(r, s)) for s in a] for r in a]
            atb = [sum(x * y for x, y in zip(r, b)) for r in a]
            lam = _cramer(ata, atb)
            if lam is None or any(l < 0 for l in lam):
                continue
            recon = [sum(l * r[i] for l, r in zip(lam, a)) for i in range(k + 1)]
            if recon == b:
                return True
    return False


def brute_vertices(pts):
    pts = sorted({tuple(Fraction(x) for x in p) for p in pts})
    return [p for i, p in enumerate(pts)
            if not in_hull_caratheodory(p, pts[:i] + pts[i + 1:])]


def bisect(f, lo, hi, iters=200):
    """Root of an increasing function on [lo, hi]."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rng(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
