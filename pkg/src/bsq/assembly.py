"""Cut bands into pieces holding at most one Bohr-Sommerfeld leaf and glue the answers.

Gluing uses only the split Mayer-Vietoris sequence: when the overlap of two
opens has no cohomology, the cohomology of the union is the direct sum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .cech import CohomologyReport, band_cohomology, split_windows
from .errors import DomainError
from .exact import fmt
from .geometry import Band


class MayerVietorisError(DomainError):
    """The overlap has cohomology, so the sequence does not split."""


@dataclass(frozen=True)
class BandDecomposition:
    band: Band
    pieces: tuple  # Bands, in product (row-major) order over the per-axis splits
    axis_pieces: tuple  # per axis: tuple of (lo, hi)
    axis_overlaps: tuple  # per axis: tuple of (lo, hi)

    @property
    def leaf_counts(self) -> tuple:
        return tuple(_lattice_count(p.t_intervals) for p in self.pieces)

    def overlaps(self) -> list:
        """Overlap bands of consecutive pieces along each axis (the full band elsewhere)."""
        out = []
        for axis, windows in enumerate(self.axis_overlaps):
            for w in windows:
                iv = list(self.band.t_intervals)
                iv[axis] = w
                out.append(Band(iv, self.band.s_radii))
        return out

    def to_json(self) -> dict:
        return {
            "band": self.band.to_json(),
            "axes": [
                {
                    "pieces": [[fmt(a), fmt(b)] for a, b in pieces],
                    "overlaps": [[fmt(a), fmt(b)] for a, b in overl],
                }
                for pieces, overl in zip(self.axis_pieces, self.axis_overlaps)
            ],
            "leaves": list(self.leaf_counts),
        }


def _lattice_count(intervals) -> int:
    n = 1
    for lo, hi in intervals:
        n *= max(0, math.ceil(hi) - math.floor(lo) - 1)
    return n


def _split_axis(lo: Fraction, hi: Fraction, splits) -> tuple:
    if splits is None:
        # one cut halfway between each pair of consecutive leaves
        ints = range(math.floor(lo) + 1, math.ceil(hi))
        splits = [Fraction(2 * j + 1, 2) for j in ints[:-1]]
    windows = split_windows(lo, hi, splits)
    starts = [lo] + [a for a, _ in windows]
    ends = [b for _, b in windows] + [hi]
    return tuple(zip(starts, ends)), tuple(windows)


def decompose_band(band: Band, bs_points: Sequence | None = None, splits: Sequence | None = None) -> BandDecomposition:
    """Split every t-axis halfway between consecutive leaves (or at ``splits``, one list per axis).

    Overlap windows never contain an integer, so no leaf is shared between
    pieces.  ``bs_points``, when given, must be the leaves of the band.
    """
    for lo, hi in band.t_intervals:
        if lo.denominator == 1 or hi.denominator == 1:
            raise DomainError(f"band endpoint at an integer: ({fmt(lo)}, {fmt(hi)})")
    if band.m == 0:
        raise DomainError("nothing to decompose: the band has no t-axis")
    if splits is not None and len(splits) != band.m:
        raise DomainError("need one list of split points per t-axis")
    axis_pieces, axis_overlaps = [], []
    for axis, (lo, hi) in enumerate(band.t_intervals):
        pieces, windows = _split_axis(lo, hi, None if splits is None else splits[axis])
        axis_pieces.append(pieces)
        axis_overlaps.append(windows)
    pieces = tuple(Band(list(ivs), band.s_radii) for ivs in itertools.product(*axis_pieces))
    dec = BandDecomposition(band, pieces, tuple(axis_pieces), tuple(axis_overlaps))
    if bs_points is not None:
        expected = _lattice_count(band.t_intervals) * math.prod(math.ceil(r) for r in band.s_radii)
        if len(bs_points) != expected:
            raise DomainError("bs_points do not match the band")
    return dec


def mv_assemble(left: CohomologyReport, right: CohomologyReport, overlap: CohomologyReport) -> CohomologyReport:
    """Direct sum of the two reports, allowed only over an acyclic overlap."""
    if not overlap.is_zero:
        raise MayerVietorisError(
            f"overlap cohomology {list(overlap.H)} is nonzero; the connecting map is not handled"
        )
    top = max(len(left.H), len(right.H)) - 1
    dims = {q: left.dim(q) + right.dim(q) for q in range(top + 1)}
    return CohomologyReport.from_dims(dims, top, left.support + right.support)


def _default_solver(band: Band) -> CohomologyReport:
    if band.m == 1 and band.k == 0:
        return band_cohomology(band)
    from .spectral import band_cohomology_leray

    return band_cohomology_leray(band)


def assemble(decomposition: BandDecomposition, solver: Callable | None = None) -> CohomologyReport:
    """Glue piece reports axis by axis with :func:`mv_assemble`.

    ``solver`` maps a band to its report (default: the brick-wall engine on
    cylinder bands, the Leray route otherwise).
    """
    solver = solver or _default_solver
    band = decomposition.band

    def fold(intervals: list, axis: int) -> CohomologyReport:
        if axis == band.m:
            return solver(Band(intervals, band.s_radii))
        acc = None
        for piece, window in zip(decomposition.axis_pieces[axis], (None,) + decomposition.axis_overlaps[axis]):
            ivs = list(intervals)
            ivs[axis] = piece
            rep = fold(ivs, axis + 1)
            if acc is None:
                acc = rep
            else:
                ovs = list(intervals)
                ovs[axis] = window
                acc = mv_assemble(acc, rep, solver(Band(ovs, band.s_radii)))
        return acc

    return fold(list(band.t_intervals), 0)


def decompose_and_assemble(band: Band, splits: Sequence | None = None, solver: Callable | None = None):
    dec = decompose_band(band, splits=splits)
    return dec, assemble(dec, solver)
