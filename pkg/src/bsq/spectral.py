"""Bigraded pages, page turning, and the Leray route to band cohomology.

The direct images of the sheaf of flat sections under the projection to the
action coordinates are skyscrapers, so the E_2 page of a band is computed
from lattice counts and stabilizes at once.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cech import CohomologyReport, SupportPoint
from .errors import DomainError, InconsistencyError, InvariantError, ParseError
from .exact import fmt, matmul, rank, to_fraction
from .geometry import Band


def _as_matrix(rows, shape: tuple) -> tuple:
    try:
        m = tuple(tuple(to_fraction(x) for x in row) for row in rows)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix entry: {exc}") from exc
    r, c = shape
    if len(m) != r or any(len(row) != c for row in m):
        got = (len(m), len(m[0]) if m else 0)
        raise InvariantError(f"differential has shape {got}, bidegree requires {shape}")
    return m


@dataclass(frozen=True)
class BigradedPage:
    """Page ``E_r``: dimensions at ``(p, q)`` and differentials ``d_r``.

    ``diffs[(p, q)]`` is the matrix of ``E^{p,q} -> E^{p+r, q-r+1}`` with one
    row per target basis vector.  Missing differentials are zero.
    """

    r: int
    entries: dict
    diffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 1:
            raise ParseError("page index must be a positive integer")
        entries = {}
        for (p, q), d in self.entries.items():
            if not isinstance(d, int) or d < 0:
                raise ParseError(f"dimension at {(p, q)} must be a nonnegative integer")
            if d:
                entries[(int(p), int(q))] = d
        object.__setattr__(self, "entries", entries)
        diffs = {}
        for (p, q), rows in self.diffs.items():
            src = self.dim(p, q)
            tgt = self.dim(*self.target(p, q))
            m = _as_matrix(rows, (tgt, src))
            if src and tgt and any(any(row) for row in m):
                diffs[(p, q)] = m
        object.__setattr__(self, "diffs", diffs)

    def dim(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def target(self, p: int, q: int, r: int | None = None) -> tuple:
        r = self.r if r is None else r
        return (p + r, q - r + 1)

    def diff(self, p: int, q: int) -> tuple:
        """Matrix of ``d_r`` leaving ``(p, q)`` (zero matrix if absent)."""
        if (p, q) in self.diffs:
            return self.diffs[(p, q)]
        tgt = self.dim(*self.target(p, q))
        return tuple(tuple(Fraction(0) for _ in range(self.dim(p, q))) for _ in range(tgt))

    def check(self) -> None:
        """Raise :class:`InvariantError` unless ``d_r d_r = 0`` everywhere."""
        for (p, q), m in self.diffs.items():
            nxt = self.target(p, q)
            if nxt in self.diffs:
                prod = matmul(self.diffs[nxt], m)
                if any(any(row) for row in prod):
                    raise InvariantError(f"d_{self.r} composed with itself is nonzero at {(p, q)}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** (p + q) * d for (p, q), d in self.entries.items())

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "entries": [{"p": p, "q": q, "dim": d} for (p, q), d in sorted(self.entries.items())],
            "diffs": [
                {"p": p, "q": q, "matrix": [[fmt(x) for x in row] for row in m]}
                for (p, q), m in sorted(self.diffs.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "BigradedPage":
        try:
            entries = {}
            for e in obj["entries"]:
                key = (int(e["p"]), int(e["q"]))
                if key in entries:
                    raise ParseError(f"duplicate entry {key}")
                entries[key] = e["dim"]
            diffs = {(int(d["p"]), int(d["q"])): d["matrix"] for d in obj.get("diffs", [])}
            r = obj["r"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed page: {exc}") from exc
        return cls(r, entries, diffs)


def turn_page(page: BigradedPage, next_diffs: dict | None = None) -> BigradedPage:
    """``E_{r+1}^{p,q} = ker d_r / im d_r``; new differentials default to zero."""
    page.check()
    ranks = {key: rank([list(row) for row in m]) for key, m in page.diffs.items()}
    new = {}
    for (p, q), d in page.entries.items():
        out = ranks.get((p, q), 0)
        src = (p - page.r, q + page.r - 1)
        inc = ranks.get(src, 0)
        new[(p, q)] = d - out - inc
    if any(v < 0 for v in new.values()):
        raise InconsistencyError("negative dimension after turning the page")
    return BigradedPage(page.r + 1, new, next_diffs or {})


def _bidegree_pairs(page: BigradedPage, r_min: int):
    keys = list(page.entries)
    for a, b in itertools.product(keys, keys):
        rr = b[0] - a[0]
        if rr >= r_min and b[1] == a[1] - rr + 1:
            yield a, b, rr


def is_stable(page: BigradedPage) -> bool:
    """No differential on this or any later page can be nonzero."""
    if page.diffs:
        return False
    return next(_bidegree_pairs(page, page.r), None) is None


def total_degree_dims(page: BigradedPage) -> dict:
    if not is_stable(page):
        raise DomainError("total degrees are read off a stable page only")
    out: dict = {}
    for (p, q), d in page.entries.items():
        out[p + q] = out.get(p + q, 0) + d
    return dict(sorted(out.items()))


# --------------------------------------------------------------------------
# skyscrapers and direct images

@dataclass(frozen=True)
class SkyscraperSheafModel:
    support: tuple
    towers: tuple

    def __post_init__(self):
        support = tuple(tuple(to_fraction(x) for x in (p if isinstance(p, (tuple, list)) else (p,))) for p in self.support)
        towers = tuple(int(t) for t in self.towers)
        if len(support) != len(towers):
            raise DomainError("one tower per support point")
        if len(set(support)) != len(support):
            raise DomainError("support points must be distinct")
        if any(t < 1 for t in towers):
            raise DomainError("tower dimensions are at least 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "towers", towers)


def _in_region(point: tuple, region) -> bool:
    intervals = region.t_intervals if isinstance(region, Band) else region
    if len(intervals) != len(point):
        raise DomainError("region and support have different dimensions")
    return all(to_fraction(lo) < x < to_fraction(hi) for x, (lo, hi) in zip(point, intervals))


def skyscraper_cohomology(model: SkyscraperSheafModel, region) -> dict:
    """``H^0`` is the sum of towers over support points inside ``region``."""
    return {0: sum(t for p, t in zip(model.support, model.towers) if _in_region(p, region))}


@dataclass(frozen=True)
class DirectImageTable:
    m: int
    k: int

    def __post_init__(self):
        if self.m < 0 or self.k < 0 or self.m + self.k < 1:
            raise DomainError("need m, k >= 0 with m + k >= 1")

    def degrees(self) -> range:
        return range(self.m + self.k + 1)

    def stalk_dim(self, q: int, point: Sequence) -> int:
        """Stalk of ``R^q`` at a point of the base ``R^m`` (after the plane factors)."""
        if self.k > 0 or q != self.m:
            return 0
        return int(all(to_fraction(x).denominator == 1 for x in point))

    def skyscraper(self, q: int, band: Band) -> SkyscraperSheafModel:
        """``R^q`` restricted to the band, as a skyscraper model."""
        if self.k > 0 or q != self.m:
            return SkyscraperSheafModel((), ())
        pts = _lattice_points(band.t_intervals)
        return SkyscraperSheafModel(tuple(pts), (1,) * len(pts))


def direct_image_table(m: int, k: int) -> DirectImageTable:
    return DirectImageTable(m, k)


def _lattice_points(intervals) -> list:
    axes = [range(math.floor(lo) + 1, math.ceil(hi)) for lo, hi in intervals]
    return [tuple(Fraction(x) for x in p) for p in itertools.product(*axes)]


def e2_page(band: Band) -> BigradedPage:
    table = direct_image_table(band.m, band.k)
    entries = {}
    for q in table.degrees():
        for p, d in skyscraper_cohomology(table.skyscraper(q, band), band).items():
            if d:
                entries[(p, q)] = d
    return BigradedPage(2, entries)


def band_cohomology_leray(band: Band) -> CohomologyReport:
    """Band cohomology from the E_2 page of the projection to the action coordinates."""
    page = e2_page(band)
    if not is_stable(page):
        raise InconsistencyError("the E_2 page of a band should be stable")
    dims = total_degree_dims(page)
    support = []
    if band.k == 0 and dims.get(band.m):
        support = [SupportPoint("t", p, band.m, 1) for p in _lattice_points(band.t_intervals)]
    return CohomologyReport.from_dims(dims, max(1, band.m + band.k), support)
