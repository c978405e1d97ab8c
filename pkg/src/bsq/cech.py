"""Čech cohomology of leafwise-flat sections over structured covers.

A flat section over a brick has the form ``a(t) exp(i t theta_B)``, where
``theta_B`` is the branch of the angle chosen on that brick.  A cochain
component on an intersection is written in the angle branch of the first
brick (origin discs have no angle and are skipped).  Rewriting a face
component in the branch of a larger intersection multiplies it by
``exp(2 pi i t w)`` for an integer winding ``w``, so every coboundary
matrix has entries ``+-exp(2 pi i t w)``.

Cohomology with smooth-function coefficients is computed parameter by
parameter.  Away from integers each pointwise complex is exact; at an
integer ``t0`` the rank of ``delta^{q-1}`` drops by ``d`` and the
function-space cohomology picks up ``C^d`` in degree ``q`` (evaluation at
``t0`` is the quotient map).  :func:`pointwise_h` returns that local
contribution, and :func:`pointwise_betti` the plain ``ker/im`` dimension of
the numeric complex at one parameter.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError, InconsistencyError, ParseError
from .exact import (
    MAX_EXACT_DEGREE,
    field_degree,
    fmt,
    matmul,
    numeric_rank,
    rank,
    rref,
    nullspace,
    root_of_unity_power,
    simplest_between,
    solve,
    to_fraction,
)
from .geometry import Band


class UnresolvedCoverError(InconsistencyError):
    """The cover puts a Bohr-Sommerfeld leaf where the pointwise method has no answer."""


# --------------------------------------------------------------------------
# covers

@dataclass(frozen=True)
class CircleCover:
    """``arc_count`` arcs around the circle; arc ``j`` spans
    ``offset + (j, j+1)/arc_count`` widened by ``overlap`` on both sides.

    Arcs are stored lifted inside ``(offset - overlap, offset + 1 + overlap)``,
    so the only branch jump sits between the last and the first arc.
    """

    arc_count: int
    offset: Fraction = Fraction(0)
    overlap: Fraction | None = None

    def __post_init__(self):
        if not isinstance(self.arc_count, int) or self.arc_count < 3:
            raise DomainError("a circle cover needs at least 3 arcs")
        object.__setattr__(self, "offset", to_fraction(self.offset) % 1)
        eps = Fraction(1, 8 * self.arc_count) if self.overlap is None else to_fraction(self.overlap)
        if not 0 < eps < Fraction(1, 2 * self.arc_count):
            raise DomainError("arc overlap must lie in (0, 1/(2*arc_count))")
        object.__setattr__(self, "overlap", eps)

    @property
    def branch_jump_index(self) -> int:
        """Index ``i`` of the adjacent pair ``(i, i+1 mod n)`` carrying the 2 pi jump."""
        return self.arc_count - 1

    def arc(self, j: int) -> tuple:
        n = self.arc_count
        return (self.offset + Fraction(j, n) - self.overlap, self.offset + Fraction(j + 1, n) + self.overlap)

    def cuts(self) -> list:
        return [(self.offset + Fraction(j, self.arc_count)) % 1 for j in range(self.arc_count)]


def _circular_gap(a: Sequence, b: Sequence) -> Fraction:
    best = Fraction(1)
    for x in a:
        for y in b:
            d = (x - y) % 1
            best = min(best, d, 1 - d)
    return best


@dataclass(frozen=True)
class Brick:
    layer: int  # -1 for the origin disc
    index: int
    label: str
    lo: Fraction | None  # None: unbounded below (the origin disc)
    hi: Fraction
    arc: tuple | None  # lifted (lo, hi) in turns; None: whole circle, no angle
    ring: int = 0  # arcs in this brick's layer

    @property
    def has_angle(self) -> bool:
        return self.arc is not None

    def key(self):
        return (self.layer, self.index)


@dataclass(frozen=True)
class Simplex:
    """Nonempty intersection of bricks, in the canonical writing order."""

    bricks: tuple  # brick indices, canonical order
    lo: Fraction | None
    hi: Fraction
    shifts: tuple  # per brick: integer w with theta = x - w on the intersection, None for the origin

    @property
    def degree(self) -> int:
        return len(self.bricks) - 1

    def rep(self) -> int | None:
        """Position of the brick whose angle branch writes this component."""
        for pos, s in enumerate(self.shifts):
            if s is not None:
                return pos
        return None

    def active(self, param: Fraction) -> bool:
        return (self.lo is None or self.lo < param) and param < self.hi


def _canonical(bricks: list, members: tuple) -> tuple:
    """Writing order: origin first, then by layer, cyclic order within a layer."""
    order = sorted(members, key=lambda i: bricks[i].key())
    out = list(order)
    for pos in range(len(out) - 1):
        a, b = bricks[out[pos]], bricks[out[pos + 1]]
        if a.layer == b.layer and a.layer >= 0 and a.index == 0 and b.index == a.ring - 1:
            out[pos], out[pos + 1] = out[pos + 1], out[pos]
    return tuple(out)


def _build_nerve(bricks: list) -> dict:
    n = len(bricks)
    level = []
    for i, b in enumerate(bricks):
        ang = b.arc
        level.append(((i,), b.lo, b.hi, ang, {i: (0 if b.has_angle else None)}))
    by_degree: dict = {}
    while level:
        for members, lo, hi, ang, shifts in level:
            canon = _canonical(bricks, members)
            by_degree.setdefault(len(members) - 1, []).append(
                Simplex(canon, lo, hi, tuple(shifts[i] for i in canon))
            )
        nxt = []
        for members, lo, hi, ang, shifts in level:
            for j in range(members[-1] + 1, n):
                b = bricks[j]
                lo2 = b.lo if lo is None else (lo if b.lo is None else max(lo, b.lo))
                hi2 = min(hi, b.hi)
                if lo2 is not None and not lo2 < hi2:
                    continue
                new_shifts = dict(shifts)
                if b.arc is None:
                    ang2 = ang
                    new_shifts[j] = None
                elif ang is None:
                    ang2 = b.arc
                    new_shifts[j] = 0
                else:
                    a0, a1 = b.arc
                    ws = range(math.floor(ang[0] - a1) + 1, math.ceil(ang[1] - a0))
                    if len(ws) == 0:
                        continue
                    if len(ws) > 1:
                        raise InconsistencyError("arcs too wide: intersection is disconnected")
                    w = ws[0]
                    ang2 = (max(ang[0], a0 + w), min(ang[1], a1 + w))
                    new_shifts[j] = w
                nxt.append((members + (j,), lo2, hi2, ang2, new_shifts))
        level = nxt
    for q in by_degree:
        by_degree[q].sort(key=lambda s: tuple(bricks[i].key() for i in s.bricks))
    return by_degree


def _layer_labels(sizes: Sequence[int], first_letter: str) -> list:
    if len(sizes) == 1 and sizes[0] == 3:
        return [["E", "F", "G"]]
    if len(sizes) == 1:
        return [[f"E{j + 1}" for j in range(sizes[0])]]
    return [[f"{chr(ord(first_letter) + l)}{j + 1}" for j in range(n)] for l, n in enumerate(sizes)]


@dataclass(frozen=True)
class Layer:
    interval: tuple
    circle: CircleCover

    def to_json(self) -> dict:
        return {
            "interval": [fmt(self.interval[0]), fmt(self.interval[1])],
            "arcs": self.circle.arc_count,
            "offset": fmt(self.circle.offset),
        }


class _NerveMixin:
    @cached_property
    def nerve(self) -> dict:
        return _build_nerve(list(self.bricks))

    def simplices(self, degree: int) -> list:
        return self.nerve.get(degree, [])

    def counts(self) -> dict:
        """Number of simplices per degree: elements, double, triple, ... intersections."""
        return {q: len(v) for q, v in sorted(self.nerve.items())}

    def label(self, simplex: Simplex) -> str:
        return "".join(self.bricks[i].label for i in simplex.bricks)

    @property
    def cover_hash(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class BrickWallCover(_NerveMixin):
    """Layered cover of a band (or annulus) by parameter-angle rectangles.

    ``param`` names the radial coordinate, ``"t"`` on the cylinder and ``"s"``
    on a ring around the origin of the plane.
    """

    layers: tuple
    param: str = "t"
    warnings: tuple = ()

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise DomainError("a brick wall needs at least one layer")
        for a, b in zip(layers, layers[1:]):
            if not (a.interval[0] < b.interval[0] < a.interval[1] < b.interval[1]):
                raise DomainError("consecutive layers must overlap in an open interval")
        for a, c in zip(layers, layers[2:]):
            if a.interval[1] > c.interval[0]:
                raise DomainError("non-consecutive layers must be disjoint")
        for a, b in zip(layers, layers[1:]):
            gap = _circular_gap(a.circle.cuts(), b.circle.cuts())
            widest = max(a.circle.overlap, b.circle.overlap)
            if gap <= 2 * widest:
                raise DomainError(
                    "within-layer overlaps of adjacent layers meet (quadruple intersection)"
                )

    @property
    def span(self) -> tuple:
        return (self.layers[0].interval[0], self.layers[-1].interval[1])

    @cached_property
    def bricks(self) -> tuple:
        labels = _layer_labels([l.circle.arc_count for l in self.layers], "A")
        out = []
        for li, layer in enumerate(self.layers):
            n = layer.circle.arc_count
            for j in range(n):
                out.append(Brick(li, j, labels[li][j], layer.interval[0], layer.interval[1], layer.circle.arc(j), n))
        return tuple(out)

    def breakpoints(self) -> list:
        pts = set()
        for layer in self.layers:
            pts.update(layer.interval)
        return sorted(pts)

    def to_json(self) -> dict:
        return {
            "param": self.param,
            "overlap": fmt(min(l.circle.overlap for l in self.layers)),
            "layers": [l.to_json() for l in self.layers],
        }


@dataclass(frozen=True)
class PlaneCover(_NerveMixin):
    """Origin disc ``A = {s < disc_radius}`` plus a brick-wall ring around it."""

    disc_radius: Fraction
    ring: BrickWallCover
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "disc_radius", to_fraction(self.disc_radius))
        r0, r1 = self.ring.span
        if not 0 < r0 < self.disc_radius:
            raise DomainError("ring must start strictly between 0 and the disc radius")

    @property
    def outer_radius(self) -> Fraction:
        return max(self.disc_radius, self.ring.span[1])

    @property
    def fatal_flags(self) -> tuple:
        return tuple(f for f in self.flags if not f.startswith("ring contains"))

    @cached_property
    def bricks(self) -> tuple:
        sizes = [l.circle.arc_count for l in self.ring.layers]
        labels = _layer_labels(sizes, "B")
        out = [Brick(-1, 0, "A", None, self.disc_radius, None, 0)]
        for li, layer in enumerate(self.ring.layers):
            n = layer.circle.arc_count
            for j in range(n):
                out.append(Brick(li, j, labels[li][j], layer.interval[0], layer.interval[1], layer.circle.arc(j), n))
        return tuple(out)

    def breakpoints(self) -> list:
        return sorted({Fraction(0), self.disc_radius, *self.ring.breakpoints()})

    def to_json(self) -> dict:
        return {"disc_radius": fmt(self.disc_radius), "ring": self.ring.to_json()}


# --------------------------------------------------------------------------
# constructors

def _integers_in(lo, hi):
    return range(math.floor(lo) + 1, math.ceil(hi))


def auto_layers(lo, hi, arc_counts: Sequence[int] = (3, 4), splits: Sequence | None = None) -> list:
    """Layer spec covering ``(lo, hi)`` whose overlaps avoid every integer.

    Layers are cut at ``splits`` (default: the half-integers inside the
    interval); each overlap is a small window around its cut.
    """
    lo, hi = to_fraction(lo), to_fraction(hi)
    windows = split_windows(lo, hi, splits)
    bounds = [lo] + [w for pair in windows for w in pair] + [hi]
    # bounds: lo, a1, b1, a2, b2, ..., hi ; layer l = (prev a/lo, next b/hi)
    layers = []
    starts = [lo] + [a for a, _ in windows]
    ends = [b for _, b in windows] + [hi]
    for l, (a, b) in enumerate(zip(starts, ends)):
        layers.append(((a, b), arc_counts[l % len(arc_counts)]))
    del bounds
    return layers


def split_windows(lo: Fraction, hi: Fraction, splits: Sequence | None = None) -> list:
    """Overlap windows ``(a, b)`` around each split point, free of integers."""
    if splits is None:
        splits = [Fraction(2 * j + 1, 2) for j in range(math.floor(lo), math.ceil(hi))]
        splits = [s for s in splits if lo < s < hi]
    else:
        splits = sorted(to_fraction(s) for s in splits)
        for s in splits:
            if s.denominator == 1:
                raise DomainError(f"split point {fmt(s)} is an integer")
            if not lo < s < hi:
                raise DomainError(f"split point {fmt(s)} outside ({fmt(lo)}, {fmt(hi)})")
    if len(set(splits)) != len(splits):
        raise DomainError("split points must be distinct")
    pts = [lo] + list(splits) + [hi]
    windows = []
    for i, s in enumerate(splits):
        to_int = min(s - math.floor(s), math.ceil(s) - s)
        delta = min(Fraction(1, 4), to_int / 2, (s - pts[i]) / 4, (pts[i + 2] - s) / 4)
        windows.append((s - delta, s + delta))
    return windows


def _make_wall(lo: Fraction, hi: Fraction, layer_spec: Sequence, param: str) -> BrickWallCover:
    if not layer_spec:
        raise DomainError("empty layer spec")
    parsed = []
    for item in layer_spec:
        if len(item) == 2:
            (a, b), n = item
            off = None
        elif len(item) == 3:
            (a, b), n, off = item
            off = None if off is None else to_fraction(off)
        else:
            raise ParseError("layer spec entries are (interval, arcs[, offset])")
        a, b = to_fraction(a), to_fraction(b)
        if not a < b:
            raise DomainError(f"empty layer interval ({fmt(a)}, {fmt(b)})")
        parsed.append([a, b, int(n), off])
    parsed.sort(key=lambda p: (p[0], p[1]))
    if parsed[0][0] > lo or parsed[-1][1] < hi:
        raise DomainError(f"layers do not cover ({fmt(lo)}, {fmt(hi)})")
    # clip to the covered interval; layers falling outside are an error
    for p in parsed:
        p[0], p[1] = max(p[0], lo), min(p[1], hi)
        if not p[0] < p[1]:
            raise DomainError("a layer lies outside the covered interval")
    for n in (p[2] for p in parsed):
        if n < 3:
            raise DomainError("a circle cover needs at least 3 arcs")
    offsets = []
    for l, p in enumerate(parsed):
        if p[3] is not None:
            offsets.append(p[3])
        elif l == 0:
            offsets.append(Fraction(0))
        else:
            offsets.append(offsets[-1] + Fraction(1, 2 * math.lcm(parsed[l - 1][2], p[2])))
    eps = min(Fraction(1, 8 * p[2]) for p in parsed)
    for l in range(len(parsed) - 1):
        cuts_a = [(offsets[l] + Fraction(j, parsed[l][2])) % 1 for j in range(parsed[l][2])]
        cuts_b = [(offsets[l + 1] + Fraction(j, parsed[l + 1][2])) % 1 for j in range(parsed[l + 1][2])]
        gap = _circular_gap(cuts_a, cuts_b)
        if gap == 0:
            raise DomainError(f"layers {l} and {l + 1} have coinciding arc boundaries")
        eps = min(eps, gap / 4)
    layers = tuple(
        Layer((p[0], p[1]), CircleCover(p[2], off, eps)) for p, off in zip(parsed, offsets)
    )
    warnings = []
    for l in range(len(layers) - 1):
        a, b = layers[l + 1].interval[0], layers[l].interval[1]
        for j in range(math.ceil(a), math.floor(b) + 1):
            warnings.append(
                f"Bohr-Sommerfeld leaf {param}={j} lies in the overlap of layers {l} and {l + 1}"
            )
    return BrickWallCover(layers, param, tuple(warnings))


def _single_interval(band: Band) -> tuple:
    if band.m != 1 or band.k != 0:
        raise DomainError("cylinder covers need a band with m=1, k=0")
    return band.t_intervals[0]


def build_ek_cover(k: int, band: Band) -> BrickWallCover:
    """Single-layer cover of a cylinder band by ``k`` arcs."""
    if k < 3:
        raise DomainError("E_k needs k >= 3 (only adjacent arcs may overlap)")
    lo, hi = _single_interval(band)
    return _make_wall(lo, hi, [((lo, hi), k)], "t")


def build_brick_wall(band: Band, layer_spec: Sequence | None = None) -> BrickWallCover:
    """Brick wall over a cylinder band.

    ``layer_spec`` lists ``(interval, arc_count)`` or ``(interval, arc_count,
    offset)``.  Missing offsets rotate each layer by half the finest cut
    spacing against its predecessor.  Default: :func:`auto_layers`.
    """
    lo, hi = _single_interval(band)
    if layer_spec is None:
        layer_spec = auto_layers(lo, hi)
    return _make_wall(lo, hi, layer_spec, "t")


def build_ring(lo, hi, layer_spec: Sequence | None = None) -> BrickWallCover:
    """Brick wall over the annulus ``lo < s < hi`` of the plane."""
    lo, hi = to_fraction(lo), to_fraction(hi)
    if lo < 0:
        raise DomainError("annulus radii are nonnegative")
    if layer_spec is None:
        layer_spec = auto_layers(lo, hi)
    return _make_wall(lo, hi, layer_spec, "s")


def build_plane_cover(disc_radius, arc_count: int = 3, ring=None, ring_layers: Sequence | None = None) -> PlaneCover:
    """Origin disc of radius ``disc_radius`` surrounded by a ring of arcs.

    ``ring`` is the annulus ``(r0, r1)`` the arcs cover (one layer of
    ``arc_count`` arcs); by default it starts at half the disc radius and
    stops before the next integer.  ``ring_layers`` gives a full layer spec
    instead.  Bohr-Sommerfeld circles met by the ring or by the disc are
    recorded in ``flags``.
    """
    r_a = to_fraction(disc_radius)
    if r_a <= 0:
        raise DomainError("disc radius must be positive")
    if ring_layers is not None:
        lo = min(to_fraction(iv[0]) for iv, *_ in ring_layers)
        hi = max(to_fraction(iv[1]) for iv, *_ in ring_layers)
        wall = build_ring(lo, hi, ring_layers)
    else:
        if ring is None:
            gap = math.floor(r_a) + 1 - r_a
            ring = (r_a / 2, r_a + min(r_a / 2, gap / 2))
        r0, r1 = to_fraction(ring[0]), to_fraction(ring[1])
        wall = build_ring(r0, r1, [((r0, r1), arc_count)])
    flags = list(wall.warnings)
    r0, r1 = wall.span
    for j in _integers_in(r0, r1):
        if j > 0:
            flags.append(f"ring contains Bohr-Sommerfeld circle s={j}")
    for j in range(1, math.ceil(r_a)):
        flags.append(f"origin disc contains Bohr-Sommerfeld circle s={j}")
    return PlaneCover(r_a, wall, tuple(flags))


def fine_plane_cover(radius, arc_counts: Sequence[int] = (3, 4)) -> PlaneCover:
    """Plane cover of ``{s < radius}`` fine enough to see every circle ``s = j``."""
    radius = to_fraction(radius)
    r_a = min(radius, Fraction(1)) * Fraction(3, 4)
    lo = r_a / 2
    return build_plane_cover(r_a, ring_layers=auto_layers(lo, radius, arc_counts))


# --------------------------------------------------------------------------
# pointwise complexes

@dataclass
class PointwiseComplex:
    """The numeric Čech complex of a cover at one parameter value.

    ``labels[q]`` names the active ``q``-simplices carrying sections;
    ``entries[q]`` maps ``(row, col)`` of ``delta^q`` to ``(sign, winding)``,
    the entry being ``sign * exp(2 pi i param winding)``.
    """

    param: Fraction
    labels: list
    entries: list
    tol: float = 1e-10

    @property
    def top(self) -> int:
        return len(self.labels) - 1

    def dim(self, q: int) -> int:
        return len(self.labels[q]) if 0 <= q < len(self.labels) else 0

    def _order(self) -> int:
        return Fraction(self.param).denominator

    def exact_ok(self) -> bool:
        return field_degree(self._order()) <= MAX_EXACT_DEGREE

    def matrix(self, q: int) -> list:
        """``delta^q`` with exact entries (Fractions or cyclotomic numbers)."""
        rows, cols = self.dim(q + 1), self.dim(q)
        zero = Fraction(0)
        m = [[zero] * cols for _ in range(rows)]
        cache = {}
        for (r, c), (sign, w) in self.entries[q].items() if q < len(self.entries) else ():
            if w not in cache:
                cache[w] = root_of_unity_power(self.param * w)
            m[r][c] = cache[w] * sign
        return m

    def numeric(self, q: int) -> np.ndarray:
        rows, cols = self.dim(q + 1), self.dim(q)
        m = np.zeros((rows, cols), dtype=complex)
        x = float(self.param)
        for (r, c), (sign, w) in self.entries[q].items() if q < len(self.entries) else ():
            m[r, c] = sign * np.exp(2j * np.pi * x * w)
        return m

    def laurent(self, q: int) -> dict:
        return dict(self.entries[q]) if 0 <= q < len(self.entries) else {}

    def rank(self, q: int) -> int:
        if q < 0 or self.dim(q) == 0 or self.dim(q + 1) == 0:
            return 0
        if self.exact_ok():
            return rank(self.matrix(q))
        return numeric_rank(self.numeric(q), self.tol)

    def betti(self, q: int) -> int:
        """``dim ker delta^q - rank delta^{q-1}`` of this numeric complex."""
        return self.dim(q) - self.rank(q) - self.rank(q - 1)

    def bettis(self) -> list:
        ranks = [self.rank(q) for q in range(self.top + 1)]
        return [self.dim(q) - ranks[q] - (ranks[q - 1] if q else 0) for q in range(self.top + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * self.dim(q) for q in range(self.top + 1))

    def local_contributions(self) -> list:
        """Function-space cohomology supported at this parameter, per degree.

        From the Betti numbers ``h`` of the pointwise complex and generic
        exactness: ``h^q = c_q + c_{q+1}`` with ``c_0 = 0``.
        """
        h = self.bettis()
        c = [0]
        for q in range(len(h)):
            c.append(h[q] - c[q])
        if any(x < 0 for x in c) or c[-1] != 0:
            raise InconsistencyError(
                f"pointwise complex at {fmt(self.param)} is not generically exact (betti {h})"
            )
        return c[:-1]


def pointwise_complex(cover, param, tol: float = 1e-10) -> PointwiseComplex:
    """Restrict the cover's Čech complex to the slice at ``param``."""
    param = to_fraction(param)
    lo, hi = _param_range(cover)
    if not (lo <= param < hi if lo == 0 and isinstance(cover, PlaneCover) else lo < param < hi):
        raise DomainError(f"parameter {fmt(param)} outside ({fmt(lo)}, {fmt(hi)})")
    active = {}
    labels = []
    q = 0
    while cover.simplices(q):
        act = [s for s in cover.simplices(q) if s.active(param) and s.rep() is not None]
        if not act:
            break
        active[q] = {frozenset(s.bricks): (i, s) for i, s in enumerate(act)}
        labels.append([cover.label(s) for s in act])
        q += 1
    if not labels:
        labels = [[]]  # only the origin disc is present: no sections at all
    entries = []
    for q in range(len(labels) - 1):
        ent = {}
        for r, (row, sigma) in enumerate(sorted(active[q + 1].values(), key=lambda v: v[0])):
            rep_sigma = sigma.shifts[sigma.rep()]
            for i in range(len(sigma.bricks)):
                face_members = sigma.bricks[:i] + sigma.bricks[i + 1 :]
                hit = active[q].get(frozenset(face_members))
                if hit is None:
                    continue  # the origin disc alone carries no sections
                col, face = hit
                sign = (-1) ** i * _perm_sign(face_members, face.bricks)
                pos = {b: p for p, b in enumerate(sigma.bricks)}
                rep_face = sigma.shifts[pos[face.bricks[face.rep()]]]
                ent[(row, col)] = (sign, rep_sigma - rep_face)
        entries.append(ent)
    return PointwiseComplex(param, labels, entries, tol)


def _perm_sign(seq: tuple, target: tuple) -> int:
    perm = [target.index(x) for x in seq]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def _param_range(cover) -> tuple:
    if isinstance(cover, PlaneCover):
        return (Fraction(0), cover.outer_radius)
    return cover.span


def pointwise_h(cover, param, degree: int, tol: float = 1e-10) -> int:
    """Dimension of the degree-``degree`` cohomology concentrated at ``param``."""
    if degree < 0:
        return 0
    c = pointwise_complex(cover, param, tol).local_contributions()
    return c[degree] if degree < len(c) else 0


def pointwise_betti(cover, param, degree: int, tol: float = 1e-10) -> int:
    cx = pointwise_complex(cover, param, tol)
    return cx.betti(degree) if degree <= cx.top else 0


# --------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class SupportPoint:
    coord: str
    value: tuple
    degree: int
    dim: int

    def to_json(self) -> dict:
        v = [fmt(x) for x in self.value]
        return {self.coord: v[0] if len(v) == 1 else v, "degree": self.degree, "dim": self.dim}


@dataclass(frozen=True)
class CohomologyReport:
    """Per-degree dimensions plus the parameters that carry them."""

    H: tuple
    support: tuple = ()
    cover_hash: str = field(default="", compare=False)
    warnings: tuple = field(default=(), compare=False)

    @classmethod
    def from_dims(cls, dims: dict, top: int, support=(), cover_hash="", warnings=()) -> "CohomologyReport":
        top = max([top] + [q for q, d in dims.items() if d])
        if any(d < 0 for d in dims.values()):
            raise InconsistencyError("negative cohomology dimension")
        sup = tuple(sorted(support, key=lambda p: (p.degree, p.value)))
        return cls(tuple(dims.get(q, 0) for q in range(top + 1)), sup, cover_hash, tuple(warnings))

    def dim(self, q: int) -> int:
        return self.H[q] if 0 <= q < len(self.H) else 0

    @property
    def is_zero(self) -> bool:
        return not any(self.H)

    def to_json(self) -> dict:
        out = {"H": {str(q): d for q, d in enumerate(self.H)}, "support": [p.to_json() for p in self.support]}
        if self.cover_hash:
            out["cover"] = self.cover_hash
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out

    @classmethod
    def from_json(cls, obj) -> "CohomologyReport":
        try:
            dims = {int(q): int(d) for q, d in obj["H"].items()}
            support = []
            for p in obj.get("support", []):
                coord = next(k for k in p if k not in ("degree", "dim"))
                raw = p[coord]
                vals = tuple(to_fraction(x) for x in (raw if isinstance(raw, list) else [raw]))
                support.append(SupportPoint(coord, vals, int(p["degree"]), int(p["dim"])))
        except (KeyError, TypeError, ValueError, StopIteration) as exc:
            raise ParseError(f"malformed cohomology report: {exc}") from exc
        top = max(dims) if dims else 0
        return cls.from_dims(dims, top, support, obj.get("cover", ""), tuple(obj.get("warnings", ())))


def sample_params(breakpoints: Sequence, lo: Fraction, hi: Fraction, per_unit: int = 5) -> list:
    """Generic parameters: a few low-height rationals inside every cell.

    Cells are the open intervals between consecutive breakpoints and
    integers; each gets ``ceil(per_unit * length)`` samples (at least one).
    """
    cuts = {lo, hi}
    cuts.update(b for b in breakpoints if lo < b < hi)
    cuts.update(Fraction(j) for j in _integers_in(lo, hi))
    cuts = sorted(cuts)
    out = []
    for a, b in zip(cuts, cuts[1:]):
        n = max(1, math.ceil(per_unit * (b - a)))
        for i in range(n):
            x = simplest_between(a + (b - a) * i / n, a + (b - a) * (i + 1) / n)
            if x.denominator == 1:
                x = simplest_between(x, a + (b - a) * (i + 1) / n)
            out.append(x)
    return out


def _cover_cohomology(cover, lo: Fraction, hi: Fraction, coord: str, samples: int, tol: float,
                      include_lo: bool = False) -> CohomologyReport:
    fatal = cover.fatal_flags if isinstance(cover, PlaneCover) else cover.warnings
    if fatal:
        raise UnresolvedCoverError("; ".join(fatal))
    for x in sample_params(cover.breakpoints(), lo, hi, samples):
        cx = pointwise_complex(cover, x, tol)
        h = cx.bettis()
        if any(h):
            raise InconsistencyError(
                f"cohomology at generic {coord}={fmt(x)} is {h}; the cover is malformed"
            )
    dims: dict = {}
    support = []
    params = list(_integers_in(lo, hi))
    if include_lo and lo.denominator == 1:
        params.insert(0, int(lo))
    for j in params:
        for q, c in enumerate(pointwise_complex(cover, j, tol).local_contributions()):
            if c:
                dims[q] = dims.get(q, 0) + c
                support.append(SupportPoint(coord, (Fraction(j),), q, c))
    return CohomologyReport.from_dims(dims, 1, support, cover.cover_hash, getattr(cover, "flags", ()))


def band_cohomology(band: Band, cover: BrickWallCover | None = None, samples: int = 5,
                    tol: float = 1e-10) -> CohomologyReport:
    """Čech cohomology of a cylinder band with respect to ``cover``.

    The sum of the local contributions at the integers in the band; every
    generic sample must give an exact pointwise complex.
    """
    lo, hi = _single_interval(band)
    if cover is None:
        cover = build_brick_wall(band)
    if cover.param != "t" or cover.span != (lo, hi):
        raise DomainError("cover does not match the band")
    return _cover_cohomology(cover, lo, hi, "t", samples, tol)


@dataclass(frozen=True)
class Annulus:
    inner: Fraction
    outer: Fraction

    def __post_init__(self):
        object.__setattr__(self, "inner", to_fraction(self.inner))
        object.__setattr__(self, "outer", to_fraction(self.outer))
        if not 0 < self.inner < self.outer:
            raise DomainError("annulus needs 0 < inner < outer")


def _restrict_plane_cover(cover: PlaneCover, radius: Fraction) -> PlaneCover:
    if radius > cover.outer_radius:
        raise DomainError("cover does not reach the region's radius")
    if radius == cover.outer_radius:
        return cover
    if radius <= cover.ring.span[0]:
        raise DomainError("region ends before the ring starts")
    spec = [(l.interval, l.circle.arc_count, l.circle.offset) for l in cover.ring.layers if l.interval[0] < radius]
    wall = _make_wall(cover.ring.span[0], radius, spec, "s")
    flags = [f for f in cover.flags if "s=" not in f or int(f.rsplit("=", 1)[1]) < radius]
    return PlaneCover(min(cover.disc_radius, radius), wall, tuple(flags))


def plane_cohomology(region, cover=None, samples: int = 5, tol: float = 1e-10) -> CohomologyReport:
    """Čech cohomology of a disc ``{s < r}`` or an annulus in the plane.

    ``region`` is a :class:`Band` with ``m=0, k=1``, an :class:`Annulus`, or
    ``None`` to take the union of ``cover``.  The origin disc carries no
    flat sections at all, so the circle ``s = 0`` never contributes.
    """
    if isinstance(region, Annulus):
        if cover is None:
            cover = build_ring(region.inner, region.outer)
        if not isinstance(cover, BrickWallCover) or cover.span != (region.inner, region.outer):
            raise DomainError("annulus needs a ring cover spanning it")
        return _cover_cohomology(cover, region.inner, region.outer, "s", samples, tol)
    if region is None:
        if cover is None:
            raise DomainError("need a region or a cover")
        radius = cover.outer_radius
    else:
        if region.m != 0 or region.k != 1:
            raise DomainError("plane regions are bands with m=0, k=1")
        radius = region.s_radii[0]
    if cover is None:
        cover = fine_plane_cover(radius)
    cover = _restrict_plane_cover(cover, radius)
    return _cover_cohomology(cover, Fraction(0), radius, "s", samples, tol, include_lo=True)


# --------------------------------------------------------------------------
# explicit coboundary solving

@dataclass
class CoboundarySolution:
    primitive: list | None
    obstruction: tuple

    @property
    def solvable(self) -> bool:
        return self.primitive is not None


def coboundary_solve(cover, param, cochain: Sequence, degree: int = 1, tol: float = 1e-10) -> CoboundarySolution:
    """Find ``b`` with ``delta b = cochain`` at ``param`` or report the obstruction.

    The obstruction is the tuple of values of a basis of functionals that
    vanish on coboundaries but not on all cocycles (for one arc layer at an
    integer: the cyclic sum of the cochain).
    """
    cx = pointwise_complex(cover, param, tol)
    if not cx.exact_ok():
        raise DomainError("coboundary_solve needs a parameter with a small denominator")
    if len(cochain) != cx.dim(degree):
        raise DomainError(f"cochain has {len(cochain)} entries, expected {cx.dim(degree)}")
    vec = [c if not isinstance(c, (int, str)) else to_fraction(c) for c in cochain]
    nxt = cx.matrix(degree)
    if cx.dim(degree + 1):
        image = matmul(nxt, [[v] for v in vec])
        if any(row[0] for row in image):
            raise DomainError("input is not a cocycle")
    prev = cx.matrix(degree - 1) if degree > 0 else []
    ncols = cx.dim(degree - 1)
    if ncols == 0 or not prev:
        sol = None if any(vec) else []
    else:
        sol = solve(prev, vec)
    # functionals killing im(prev), independent modulo the rows of nxt
    if ncols and prev:
        transposed = [list(col) for col in zip(*prev)]
        left_null = nullspace(transposed)
    else:
        left_null = [[Fraction(int(i == j)) for i in range(cx.dim(degree))] for j in range(cx.dim(degree))]
    basis = [list(r) for r in nxt] if cx.dim(degree + 1) else []
    base_rank = rank(basis) if basis else 0
    chosen = []
    for y in left_null:
        trial = basis + [y]
        if rank(trial) > base_rank:
            basis, base_rank = trial, base_rank + 1
            chosen.append(y)
    obstruction = tuple(sum((a * b for a, b in zip(y, vec)), Fraction(0)) for y in chosen)
    return CoboundarySolution(sol, obstruction)
