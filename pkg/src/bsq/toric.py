"""Delzant polytopes and the interior versus all-lattice-points comparison.

Nonsingular Bohr-Sommerfeld fibres of a toric manifold sit over interior
lattice points of the moment polytope; Kähler quantization counts every
lattice point.  Points on faces of any codimension are singular.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, ParseError
from .exact import fmt, rank, solve, to_fraction

MAX_CANDIDATES = 10**8
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class DelzantPolytope:
    """``{x in R^n : u_i . x <= c_i}`` with integer normals ``u_i``."""

    n: int
    halfspaces: tuple  # ((u, c), ...) with u a tuple of ints and c a Fraction

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ParseError("dimension must be a positive integer")
        hs = []
        for u, c in self.halfspaces:
            if len(u) != self.n:
                raise ParseError(f"normal {list(u)} has the wrong length")
            if any(isinstance(x, bool) or int(x) != x for x in u):
                raise ParseError(f"normal {list(u)} is not integral")
            u = tuple(int(x) for x in u)
            if not any(u):
                raise ParseError("zero normal")
            hs.append((u, to_fraction(c)))
        if not hs:
            raise ParseError("no halfspaces")
        object.__setattr__(self, "halfspaces", tuple(hs))

    @classmethod
    def box(cls, lows: Sequence, highs: Sequence) -> "DelzantPolytope":
        n = len(lows)
        hs = []
        for i, (a, b) in enumerate(zip(lows, highs)):
            e = tuple(int(j == i) for j in range(n))
            hs.append((e, to_fraction(b)))
            hs.append((tuple(-x for x in e), -to_fraction(a)))
        return cls(n, tuple(hs))

    @classmethod
    def simplex(cls, n: int, size) -> "DelzantPolytope":
        hs = [(tuple(-int(j == i) for j in range(n)), Fraction(0)) for i in range(n)]
        hs.append(((1,) * n, to_fraction(size)))
        return cls(n, tuple(hs))

    def contains(self, point: Sequence) -> bool:
        return all(sum(a * b for a, b in zip(u, point)) <= c for u, c in self.halfspaces)

    def slack(self, point: Sequence) -> list:
        return [c - sum(a * b for a, b in zip(u, point)) for u, c in self.halfspaces]

    def vertices(self) -> list:
        """Exact vertices: feasible solutions of every nonsingular n-subset of facets."""
        out = set()
        for sub in itertools.combinations(self.halfspaces, self.n):
            rows = [[Fraction(x) for x in u] for u, _ in sub]
            if rank(rows) < self.n:
                continue
            x = solve(rows, [c for _, c in sub])
            if x is not None and self.contains(x):
                out.add(tuple(x))
        return sorted(out)

    def check(self) -> list:
        """Bounded, nonempty and full-dimensional, else :class:`DomainError`; returns the vertices."""
        from scipy.optimize import linprog

        a = np.array([u for u, _ in self.halfspaces], dtype=float)
        b = np.array([float(c) for _, c in self.halfspaces])
        for i in range(self.n):
            for sign in (1.0, -1.0):
                cost = np.zeros(self.n)
                cost[i] = sign
                res = linprog(cost, A_ub=a, b_ub=b, bounds=[(None, None)] * self.n, method="highs")
                if res.status == 3:
                    raise DomainError("polytope is unbounded")
                if res.status == 2:
                    raise DomainError("polytope is empty")
        verts = self.vertices()
        if not verts:
            raise DomainError("polytope is empty")
        diffs = [[x - y for x, y in zip(v, verts[0])] for v in verts[1:]]
        if not diffs or rank(diffs) < self.n:
            raise DomainError("polytope is not full-dimensional")
        return verts

    def to_json(self) -> dict:
        return {"n": self.n, "halfspaces": [{"u": list(u), "c": fmt(c)} for u, c in self.halfspaces]}

    @classmethod
    def from_json(cls, obj) -> "DelzantPolytope":
        try:
            hs = tuple((tuple(h["u"]), to_fraction(h["c"])) for h in obj["halfspaces"])
            n = obj["n"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed polytope: {exc}") from exc
        if not isinstance(n, int) or isinstance(n, bool):
            raise ParseError("n must be an integer")
        return cls(n, hs)


@dataclass(frozen=True)
class LatticeReport:
    interior_points: tuple
    boundary_points: tuple

    @property
    def real_dim(self) -> int:
        return len(self.interior_points)

    @property
    def kahler_dim(self) -> int:
        return len(self.interior_points) + len(self.boundary_points)

    @property
    def discrepancy(self) -> int:
        return len(self.boundary_points)

    def to_json(self, points: bool = False) -> dict:
        out = {"real_dim": self.real_dim, "kahler_dim": self.kahler_dim, "boundary": self.discrepancy}
        if points:
            out["interior_points"] = [list(p) for p in self.interior_points]
            out["boundary_points"] = [list(p) for p in self.boundary_points]
        return out


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("BSQ_JOBS", "1")))
    except ValueError:
        return 1


def bounding_box(polytope: DelzantPolytope) -> tuple:
    verts = polytope.check()
    lo = [math.ceil(min(v[i] for v in verts)) for i in range(polytope.n)]
    hi = [math.floor(max(v[i] for v in verts)) for i in range(polytope.n)]
    return lo, hi


def enumerate_lattice_points(polytope: DelzantPolytope, jobs: int | None = None, backend: str | None = None) -> LatticeReport:
    """Scan the integer bounding box and sort points into interior and boundary.

    The scan is cut into slabs along the first axis; with ``jobs > 1`` slabs
    run on threads (the compiled kernel releases the GIL).  ``backend`` picks
    ``"compiled"`` or ``"python"`` explicitly.
    """
    jobs = _default_jobs() if jobs is None else max(1, int(jobs))
    lo, hi = bounding_box(polytope)
    shape = [max(0, b - a + 1) for a, b in zip(lo, hi)]
    total = math.prod(shape)
    if total == 0:
        return LatticeReport((), ())
    if total > MAX_CANDIDATES:
        raise DomainError(f"{total} candidate points exceed the scan limit {MAX_CANDIDATES}")
    lcm = math.lcm(*(c.denominator for _, c in polytope.halfspaces))
    normals = np.array([u for u, _ in polytope.halfspaces], dtype=np.int64)
    num = np.array([int(c * lcm) for _, c in polytope.halfspaces], dtype=np.int64)
    den = np.full(len(polytope.halfspaces), lcm, dtype=np.int64)
    reach = max(abs(a) + abs(b) for a, b in zip(lo, hi))
    bound = lcm * int(np.abs(normals).sum(axis=1).max()) * reach + int(np.abs(num).max())
    if bound >= _INT64_SAFE:
        raise DomainError("coordinates too large for 64-bit lattice arithmetic")
    if backend is None:
        kernel = _kernels.classify_range
    elif backend == "python":
        kernel = _kernels.python_classify_range
    elif backend == "compiled":
        if _kernels.BACKEND != "compiled":
            raise DomainError("compiled kernel is not available")
        kernel = _kernels.classify_range
    else:
        raise DomainError(f"unknown backend {backend!r}")
    lo_arr = np.array(lo, dtype=np.int64)
    shape_arr = np.array(shape, dtype=np.int64)
    slab = total // shape[0]
    nslabs = min(shape[0], max(1, jobs * 4)) if jobs > 1 else 1
    bounds = [round(i * shape[0] / nslabs) * slab for i in range(nslabs + 1)]
    tasks = list(zip(bounds, bounds[1:]))

    def run(task):
        return kernel(normals, num, den, lo_arr, shape_arr, task[0], task[1])

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run, tasks))
    else:
        parts = [run(t) for t in tasks]
    codes = np.concatenate(parts)

    def points(code):
        idx = np.flatnonzero(codes == code)
        coords = np.stack(np.unravel_index(idx, shape), axis=1) + lo_arr
        return tuple(map(tuple, coords.tolist()))

    return LatticeReport(points(1), points(2))


def quantize(polytope: DelzantPolytope, jobs: int | None = None) -> dict:
    rep = enumerate_lattice_points(polytope, jobs)
    return {"real_dim": rep.real_dim, "kahler_dim": rep.kahler_dim, "discrepancy": rep.discrepancy}


def _det_exact(rows) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    return sum((-1) ** j * rows[0][j] * _det_exact([r[:j] + r[j + 1 :] for r in rows[1:]]) for j in range(n))


def delzant_validate(polytope: DelzantPolytope) -> list:
    """Diagnostics for the Delzant conditions; an empty list means valid."""
    out = []
    for u, _ in polytope.halfspaces:
        if math.gcd(*u) != 1:
            out.append(f"normal {list(u)} is not primitive")
    try:
        verts = polytope.check()
    except DomainError as exc:
        return out + [str(exc)]
    for v in verts:
        active = [list(u) for u, c in polytope.halfspaces if sum(a * b for a, b in zip(u, v)) == c]
        where = "(" + ", ".join(fmt(x) for x in v) + ")"
        if len(active) != polytope.n:
            out.append(f"vertex {where} is not simple ({len(active)} active facets)")
            continue
        d = _det_exact(active)
        if abs(d) != 1:
            out.append(f"vertex {where}: active normals have determinant {d}")
    return out


def transform(polytope: DelzantPolytope, matrix: Sequence, shift: Sequence | None = None) -> DelzantPolytope:
    """Image under ``x -> A x + b`` for an integer matrix ``A`` with ``det A = +-1``."""
    n = polytope.n
    a = [[int(x) for x in row] for row in matrix]
    if len(a) != n or any(len(r) != n for r in a):
        raise DomainError("matrix must be n x n")
    if abs(_det_exact(a)) != 1:
        raise DomainError("matrix is not unimodular")
    b = [to_fraction(x) for x in (shift or [0] * n)]
    # rows of A^{-T}: solve A^T y = u for each normal
    at = [[Fraction(a[j][i]) for j in range(n)] for i in range(n)]
    hs = []
    for u, c in polytope.halfspaces:
        y = solve(at, [Fraction(x) for x in u])
        v = tuple(int(x) for x in y)
        hs.append((v, c + sum(x * s for x, s in zip(v, b))))
    return DelzantPolytope(n, tuple(hs))
