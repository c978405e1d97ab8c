"""Model spaces, bands, leaves and the holonomy of the prequantum connection.

The model space is ``(R x S^1)^m x C^k`` with coordinates
``(t_j, theta_j)`` on the cylinder factors and ``(s_j, phi_j)`` on the plane
factors, symplectic form ``sum dt^dtheta + sum ds^dphi`` and potential
one-form ``Theta = sum t dtheta + sum s dphi``.

Angles are measured in *turns* (multiples of ``2*pi``) and are stored lifted,
so the winding of a loop is visible as an integer jump between its first and
last point.  Radial coordinates ``t`` and ``s`` are exact rationals wherever
Bohr-Sommerfeld membership is decided.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ParseError
from .exact import Phase, fmt, to_fraction

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ModelSpace:
    num_cylinder: int
    num_plane: int

    def __post_init__(self):
        if self.num_cylinder < 0 or self.num_plane < 0:
            raise DomainError("factor counts must be nonnegative")
        if self.num_cylinder + self.num_plane < 1:
            raise DomainError("model space needs at least one factor")

    @property
    def dimension(self) -> int:
        return 2 * (self.num_cylinder + self.num_plane)


@dataclass(frozen=True)
class Band:
    """Open band: a box of ``t`` intervals times discs ``{s_j < radius_j}``."""

    t_intervals: tuple = ()
    s_radii: tuple = ()

    def __post_init__(self):
        ivs = tuple((to_fraction(lo), to_fraction(hi)) for lo, hi in self.t_intervals)
        radii = tuple(to_fraction(r) for r in self.s_radii)
        object.__setattr__(self, "t_intervals", ivs)
        object.__setattr__(self, "s_radii", radii)
        if not ivs and not radii:
            raise ParseError("band needs at least one factor")
        for lo, hi in ivs:
            if not lo < hi:
                raise ParseError(f"empty interval ({fmt(lo)}, {fmt(hi)})")
        for r in radii:
            if r <= 0:
                raise ParseError(f"disc radius must be positive, got {fmt(r)}")

    @property
    def m(self) -> int:
        return len(self.t_intervals)

    @property
    def k(self) -> int:
        return len(self.s_radii)

    @property
    def space(self) -> ModelSpace:
        return ModelSpace(self.m, self.k)

    def contains_leaf(self, leaf: "Leaf") -> bool:
        return all(lo < t < hi for t, (lo, hi) in zip(leaf.t, self.t_intervals)) and all(
            0 <= s < r for s, r in zip(leaf.s, self.s_radii)
        )

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "t_intervals": [[fmt(lo), fmt(hi)] for lo, hi in self.t_intervals],
            "s_radii": [fmt(r) for r in self.s_radii],
        }

    @classmethod
    def from_json(cls, obj) -> "Band":
        if not isinstance(obj, dict):
            raise ParseError("band must be a JSON object")
        try:
            ivs = obj.get("t_intervals", [])
            radii = obj.get("s_radii", [])
            if any(len(iv) != 2 for iv in ivs):
                raise ParseError("each t interval needs two endpoints")
            band = cls(tuple(tuple(iv) for iv in ivs), tuple(radii))
        except TypeError as exc:
            raise ParseError(f"malformed band: {exc}") from exc
        if "m" in obj and obj["m"] != band.m:
            raise ParseError(f"m={obj['m']} but {band.m} t intervals given")
        if "k" in obj and obj["k"] != band.k:
            raise ParseError(f"k={obj['k']} but {band.k} disc radii given")
        return band


@dataclass(frozen=True)
class Leaf:
    """Fibre of constant ``(t, s)``; a torus of dimension ``m + #{s_j > 0}``."""

    t: tuple = ()
    s: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(to_fraction(x) for x in self.t))
        object.__setattr__(self, "s", tuple(to_fraction(x) for x in self.s))
        if any(x < 0 for x in self.s):
            raise DomainError("s coordinates are nonnegative")

    @property
    def torus_dimension(self) -> int:
        return len(self.t) + sum(1 for x in self.s if x > 0)

    @property
    def singular(self) -> bool:
        return any(x == 0 for x in self.s)

    @property
    def is_bohr_sommerfeld(self) -> bool:
        return all(p.is_one for p in holonomy_generators(self))

    def to_json(self) -> dict:
        return {"t": [fmt(x) for x in self.t], "s": [fmt(x) for x in self.s], "singular": self.singular}

    @classmethod
    def from_json(cls, obj) -> "Leaf":
        return cls(tuple(obj.get("t", [])), tuple(obj.get("s", [])))


def _integers_in_open(lo: Fraction, hi: Fraction) -> range:
    return range(math.floor(lo) + 1, math.ceil(hi))


def bs_set_in_band(band: Band) -> list[Leaf]:
    """Bohr-Sommerfeld leaves in ``band``: ``Z^m x N^k`` intersected with it.

    Leaves with some ``s_j = 0`` are included and come back with
    ``leaf.singular`` set.
    """
    t_ranges = [_integers_in_open(lo, hi) for lo, hi in band.t_intervals]
    s_ranges = [range(0, math.ceil(r)) for r in band.s_radii]
    return [
        Leaf(pt[: band.m], pt[band.m :])
        for pt in itertools.product(*t_ranges, *s_ranges)
    ]


def holonomy_generators(leaf: Leaf) -> list[Phase]:
    """Holonomy around the basic circles of the leaf, ``exp(2 pi i x)``.

    One value per cylinder factor and one per plane factor with ``s_j > 0``
    (a collapsed circle carries no loop).
    """
    return [Phase(t) for t in leaf.t] + [Phase(s) for s in leaf.s if s > 0]


# --------------------------------------------------------------------------
# loops, gauges and surfaces

@dataclass(frozen=True)
class LoopPoint:
    """A point of the model space with lifted angles (in turns)."""

    t: tuple = ()
    theta: tuple = ()
    s: tuple = ()
    phi: tuple = ()

    def __post_init__(self):
        for name in ("t", "theta", "s", "phi"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.t) != len(self.theta) or len(self.s) != len(self.phi):
            raise DomainError("each radial coordinate needs a matching angle")

    def coords(self) -> tuple:
        return self.t + self.theta + self.s + self.phi


def _is_integer(x, tol=1e-12) -> bool:
    if isinstance(x, (int, Fraction)):
        return Fraction(x).denominator == 1
    return abs(x - round(x)) <= tol


def _close(a, b, tol=1e-12) -> bool:
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a == b
    return abs(a - b) <= tol


@dataclass(frozen=True)
class DiscreteLoop:
    """Piecewise-linear path through :class:`LoopPoint` vertices.

    For a closed loop the last vertex is the first one again, up to whole
    turns in the angles; those turns are the winding numbers.
    """

    points: tuple
    closed: bool = True

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise DomainError("a loop needs at least two vertices")
        shape = (len(pts[0].t), len(pts[0].s))
        if any((len(p.t), len(p.s)) != shape for p in pts):
            raise DomainError("loop vertices live in different model spaces")

    def check_closed(self):
        if not self.closed:
            raise DomainError("loop is not closed")
        a, b = self.points[0], self.points[-1]
        ok = all(_close(x, y) for x, y in zip(a.t + a.s, b.t + b.s)) and all(
            _is_integer(y - x) for x, y in zip(a.theta + a.phi, b.theta + b.phi)
        )
        if not ok:
            raise DomainError("first and last vertex are different points")

    @property
    def winding(self) -> tuple:
        a, b = self.points[0], self.points[-1]
        return tuple(round(y - x) for x, y in zip(a.theta + a.phi, b.theta + b.phi))

    def segments(self):
        return zip(self.points[:-1], self.points[1:])


class GaugeFunction:
    """Real function ``G(t, theta, s, phi)`` (angles in turns) used as ``psi = e^{iG}``.

    The change of trivialization adds the exact form ``dG`` to the potential
    one-form.  ``G`` must be single-valued, i.e. periodic with period one in
    every angle.  ``gradient`` is optional; without it directional derivatives
    come from a five-point stencil.
    """

    def __init__(self, func: Callable, gradient: Callable | None = None, step: float = 1e-3):
        self.func = func
        self.gradient = gradient
        self.step = step

    def __call__(self, p: LoopPoint) -> float:
        return float(self.func(*(np.asarray(c, dtype=float) for c in (p.t, p.theta, p.s, p.phi))))

    def _value_at(self, coords: np.ndarray, shape) -> float:
        m, k = shape
        t, th, s, ph = coords[:m], coords[m : 2 * m], coords[2 * m : 2 * m + k], coords[2 * m + k :]
        return float(self.func(t, th, s, ph))

    def _derivative(self, x0: np.ndarray, dx: np.ndarray, tau: float, shape) -> float:
        """``d/du G(x0 + u dx)`` at ``u = tau``."""
        m, k = shape
        if self.gradient is not None:
            x = x0 + tau * dx
            parts = self.gradient(x[:m], x[m : 2 * m], x[2 * m : 2 * m + k], x[2 * m + k :])
            g = np.concatenate([np.atleast_1d(np.asarray(v, dtype=float)) for v in parts])
            return float(g @ dx)
        f = lambda u: self._value_at(x0 + u * dx, shape)  # noqa: E731
        h = self.step / max(1.0, float(np.abs(dx).max()))

        def stencil(h):
            return (-f(tau + 2 * h) + 8 * f(tau + h) - 8 * f(tau - h) + f(tau - 2 * h)) / (12 * h)

        # Richardson step on the five-point rule: error O(h^6)
        return (16 * stencil(h / 2) - stencil(h)) / 15

    def segment_integral(self, p0: LoopPoint, p1: LoopPoint, panels: int = 4, order: int = 10,
                         rtol: float = 1e-11, max_panels: int = 256) -> float:
        """``integral of dG`` along the straight segment.

        Composite Gauss-Legendre on ``panels`` panels, doubled until two
        successive estimates agree to ``rtol``.
        """
        shape = (len(p0.t), len(p0.s))
        x0 = np.array(p0.coords(), dtype=float)
        dx = np.array(p1.coords(), dtype=float) - x0
        if not dx.any():
            return 0.0
        nodes, weights = np.polynomial.legendre.leggauss(order)

        def composite(n):
            total = 0.0
            for j in range(n):
                a, b = j / n, (j + 1) / n
                for tau, w in zip(0.5 * (b - a) * nodes + 0.5 * (a + b), weights):
                    total += 0.5 * (b - a) * w * self._derivative(x0, dx, tau, shape)
            return total

        n = max(1, panels)
        prev = composite(n)
        while n < max_panels:
            n *= 2
            cur = composite(n)
            if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
                return cur
            prev = cur
        return prev


def _segment_action_turns(p0: LoopPoint, p1: LoopPoint):
    """``(1/2pi) * integral of Theta`` over a straight segment (exact for PL paths)."""
    total = 0
    for t0, t1, a0, a1 in zip(p0.t + p0.s, p1.t + p1.s, p0.theta + p0.phi, p1.theta + p1.phi):
        d = a1 - a0
        if d:
            total += (t0 + t1) * d / 2
    return total


def loop_action(loop: DiscreteLoop, gauge: GaugeFunction | None = None, panels: int = 4):
    """``integral of Theta'`` around the loop, in turns (divide radians by 2 pi).

    Exact (a Fraction) when every coordinate is rational and there is no gauge.
    """
    loop.check_closed()
    total = sum((_segment_action_turns(a, b) for a, b in loop.segments()), 0)
    if gauge is not None:
        first, last = loop.points[0], loop.points[-1]
        if abs(gauge(last) - gauge(first)) > 1e-9:
            raise DomainError("gauge function is not single-valued along the loop")
        total = float(total) + sum(gauge.segment_integral(a, b, panels) for a, b in loop.segments()) / TWO_PI
    return total


def _turns_to_unit(turns) -> complex:
    if isinstance(turns, (int, Fraction)):
        return complex(Phase(turns))
    return cmath.exp(1j * TWO_PI * turns)


def holonomy_along_loop(loop: DiscreteLoop, gauge: GaugeFunction | None = None, panels: int = 4) -> complex:
    """``exp(i * integral of Theta')`` for the (optionally gauge-transformed) potential."""
    return _turns_to_unit(loop_action(loop, gauge, panels))


def _edge_key(p: LoopPoint):
    return p.coords()


def triangle_area_turns(a: LoopPoint, b: LoopPoint, c: LoopPoint):
    """``(1/2pi) * integral of omega`` over the flat triangle ``abc``."""
    total = 0
    for x in zip(a.t + a.s, a.theta + a.phi, b.t + b.s, b.theta + b.phi, c.t + c.s, c.theta + c.phi):
        r0, g0, r1, g1, r2, g2 = x
        total += ((r1 - r0) * (g2 - g0) - (r2 - r0) * (g1 - g0)) / 2
    return total


def surface_boundary(triangles: Sequence) -> list:
    """Oriented boundary edges of a triangulated surface (interior edges cancel)."""
    count: dict = {}
    for tri in triangles:
        for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            ku, kv = _edge_key(u), _edge_key(v)
            if ku == kv:
                continue
            if count.get((kv, ku), 0) > 0:
                count[(kv, ku)] -= 1
            else:
                count[(ku, kv)] = count.get((ku, kv), 0) + 1
    return sorted(e for e, n in count.items() for _ in range(n))


def holonomy_via_area(loop: DiscreteLoop, triangles: Sequence) -> complex:
    """``exp(i * integral of omega)`` over a surface spanning ``loop``."""
    loop.check_closed()
    loop_edges = sorted(
        (_edge_key(a), _edge_key(b)) for a, b in loop.segments() if _edge_key(a) != _edge_key(b)
    )
    if surface_boundary(triangles) != loop_edges:
        raise DomainError("surface boundary does not match the loop")
    area = sum((triangle_area_turns(*tri) for tri in triangles), 0)
    return _turns_to_unit(area)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle in one ``(t_j, theta_j)`` or ``(s_j, phi_j)`` plane.

    ``radial`` and ``angular`` are ``(lo, hi)`` pairs, angles in turns; all other
    coordinates are held at ``base``.
    """

    base: LoopPoint
    kind: str
    index: int
    radial: tuple
    angular: tuple

    def corners(self) -> list[LoopPoint]:
        (r0, r1), (a0, a1) = self.radial, self.angular
        out = []
        for r, a in ((r0, a0), (r1, a0), (r1, a1), (r0, a1), (r0, a0)):
            fields = {n: list(getattr(self.base, n)) for n in ("t", "theta", "s", "phi")}
            rad, ang = ("t", "theta") if self.kind == "t" else ("s", "phi")
            fields[rad][self.index] = r
            fields[ang][self.index] = a
            out.append(LoopPoint(**{n: tuple(v) for n, v in fields.items()}))
        return out

    def loop(self) -> DiscreteLoop:
        return DiscreteLoop(tuple(self.corners()))

    def triangles(self) -> list:
        c = self.corners()
        return [(c[0], c[1], c[2]), (c[0], c[2], c[3])]


def curvature_residual(rect: Rectangle, gauge: GaugeFunction | None = None, panels: int = 4) -> float:
    """Stokes residual ``|loop integral of Theta' - area integral of omega|`` in radians."""
    loop = rect.loop()
    lhs = loop_action(loop, gauge, panels)
    rhs = sum((triangle_area_turns(*tri) for tri in rect.triangles()), 0)
    diff = lhs - rhs
    if isinstance(diff, (int, Fraction)):
        return float(abs(diff)) * TWO_PI
    return abs(float(diff)) * TWO_PI
