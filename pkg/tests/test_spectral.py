import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bsq.cech import band_cohomology
from bsq.errors import DomainError, InvariantError
from bsq.exact import matmul, nullspace, rank
from bsq.geometry import Band
from bsq.spectral import (
    BigradedPage,
    SkyscraperSheafModel,
    band_cohomology_leray,
    direct_image_table,
    e2_page,
    is_stable,
    skyscraper_cohomology,
    total_degree_dims,
    turn_page,
)

from oracles import lattice_points_in_box


def test_zero_differentials_keep_dimensions():
    page = BigradedPage(2, {(0, 0): 2, (1, 1): 3})
    nxt = turn_page(page)
    assert nxt.entries == page.entries and nxt.r == 3


def test_single_row_is_stable_fixed_point():
    page = BigradedPage(2, {(0, 2): 3, (1, 2): 1, (4, 2): 2})
    assert is_stable(page)
    assert turn_page(page).entries == page.entries


def test_full_rank_pair_cancels():
    page = BigradedPage(2, {(0, 1): 2, (2, 0): 2}, {(0, 1): [[1, 2], [3, 4]]})
    assert not is_stable(page)
    assert turn_page(page).entries == {}


def test_stability_examples():
    assert is_stable(BigradedPage(2, {}))
    assert not is_stable(BigradedPage(2, {(0, 1): 1, (2, 0): 1}, {(0, 1): [[1]]}))
    # zero d_2 but a d_3 could still act
    assert not is_stable(BigradedPage(2, {(0, 2): 1, (3, 0): 1}))
    assert is_stable(BigradedPage(4, {(0, 2): 1, (3, 0): 1}))


def test_total_degree_examples():
    assert total_degree_dims(BigradedPage(2, {(0, 3): 5})) == {3: 5}
    assert total_degree_dims(BigradedPage(2, {})) == {}
    assert total_degree_dims(BigradedPage(5, {(0, 1): 2, (1, 0): 3})) == {1: 5}
    with pytest.raises(DomainError):
        total_degree_dims(BigradedPage(2, {(0, 1): 1, (2, 0): 1}, {(0, 1): [[1]]}))


def test_dd_nonzero_rejected():
    page = BigradedPage(2, {(0, 2): 1, (2, 1): 1, (4, 0): 1}, {(0, 2): [[1]], (2, 1): [[1]]})
    with pytest.raises(InvariantError):
        turn_page(page)


def test_bad_shape_rejected():
    with pytest.raises(InvariantError):
        BigradedPage(2, {(0, 1): 2, (2, 0): 1}, {(0, 1): [[1]]})


def test_page_json_round_trip():
    page = BigradedPage(2, {(0, 1): 2, (2, 0): 2}, {(0, 1): [[1, 0], [F(1, 2), 0]]})
    obj = page.to_json()
    assert obj["entries"][0] == {"p": 0, "q": 1, "dim": 2}
    assert BigradedPage.from_json(obj) == page


def test_skyscraper_examples():
    m = SkyscraperSheafModel([2], [1])
    assert skyscraper_cohomology(m, [(F(3, 2), F(5, 2))]) == {0: 1}
    assert skyscraper_cohomology(m, [(F(5, 2), F(7, 2))]) == {0: 0}
    m3 = SkyscraperSheafModel([1, 2, 3], [1, 1, 1])
    assert skyscraper_cohomology(m3, [(F(1, 2), F(7, 2))]) == {0: 3}
    with pytest.raises(DomainError):
        SkyscraperSheafModel([1, 1], [1, 1])


def test_direct_image_examples():
    t = direct_image_table(1, 0)
    assert [t.stalk_dim(q, (2,)) for q in range(3)] == [0, 1, 0]
    assert t.stalk_dim(1, (F(1, 2),)) == 0
    t2 = direct_image_table(2, 0)
    assert t2.stalk_dim(2, (1, -3)) == 1 and t2.stalk_dim(1, (1, -3)) == 0
    t11 = direct_image_table(1, 1)
    assert all(t11.stalk_dim(q, (1,)) == 0 for q in range(4))


def test_leray_examples():
    r = band_cohomology_leray(Band([(F(1, 2), F(5, 2)), (F(1, 2), F(3, 2))]))
    assert r.H == (0, 0, 2)
    assert band_cohomology_leray(Band([(F(1, 2), F(7, 2))], [F(5, 2)])).is_zero
    b = Band([(F(1, 3), F(17, 4))])
    assert band_cohomology_leray(b) == band_cohomology(b)


def test_e2_page_is_single_entry():
    page = e2_page(Band([(F(1, 2), F(5, 2)), (F(1, 2), F(7, 2))]))
    assert page.entries == {(0, 2): 6}


def _random_page(rng):
    """Random page with d_r d_r = 0 built chain by chain."""
    r = int(rng.integers(2, 4))
    entries, diffs = {}, {}
    for _ in range(int(rng.integers(1, 4))):
        p0, q0 = int(rng.integers(-3, 4)), int(rng.integers(0, 5))
        chain = [(p0 + i * r, q0 - i * (r - 1)) for i in range(int(rng.integers(1, 4)))]
        if any(c in entries for c in chain):
            continue
        dims = [int(rng.integers(0, 4)) for _ in chain]
        for c, d in zip(chain, dims):
            entries[c] = d
        prev = None
        for i in range(len(chain) - 1):
            a, b = dims[i], dims[i + 1]
            if a == 0 or b == 0:
                prev = None
                continue
            m = [[F(int(x)) for x in row] for row in rng.integers(-2, 3, size=(b, a))]
            if prev is not None:
                # rows of m must lie in the left kernel of the previous map
                basis = nullspace([list(row) for row in zip(*prev)])
                if basis:
                    coeffs = rng.integers(-2, 3, size=(b, len(basis)))
                    m = [[sum(F(int(c)) * v[j] for c, v in zip(crow, basis)) for j in range(a)] for crow in coeffs]
                else:
                    m = [[F(0)] * a for _ in range(b)]
            diffs[chain[i]] = m
            prev = m
    return BigradedPage(r, entries, diffs)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_turn_page_conserves_euler_characteristic(seed):
    page = _random_page(np.random.default_rng(seed))
    page.check()
    nxt = turn_page(page)
    assert nxt.euler_characteristic() == page.euler_characteristic()
    for key, d in nxt.entries.items():
        assert d <= page.dim(*key)


@settings(max_examples=50)
@given(st.dictionaries(st.integers(-5, 5), st.integers(1, 6), max_size=6), st.integers(2, 5))
def test_single_row_pages_are_stable(cols, r):
    page = BigradedPage(r, {(p, 3): d for p, d in cols.items()})
    assert is_stable(page)
    assert turn_page(page).entries == page.entries


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_skyscraper_h0_is_tower_sum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    pts = {tuple(int(x) for x in rng.integers(-4, 5, size=n)) for _ in range(int(rng.integers(0, 8)))}
    pts = sorted(pts)
    towers = [int(x) for x in rng.integers(1, 5, size=len(pts))]
    model = SkyscraperSheafModel(pts, towers)
    region = []
    for _ in range(n):
        lo = F(int(rng.integers(-10, 10)), 2) + F(1, 4)
        region.append((lo, lo + F(int(rng.integers(1, 12)), 2)))
    want = sum(t for p, t in zip(pts, towers) if all(lo < x < hi for x, (lo, hi) in zip(p, region)))
    got = skyscraper_cohomology(model, region)
    assert got == {0: want}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_leray_equals_lattice_count(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    ivs = []
    for _ in range(m):
        lo = F(int(rng.integers(-12, 12)), 3) + F(1, 6)
        ivs.append((lo, lo + F(int(rng.integers(1, 10)), 3)))
    r = band_cohomology_leray(Band(ivs))
    assert r.dim(m) == len(lattice_points_in_box(ivs))
    assert all(r.dim(q) == 0 for q in range(len(r.H)) if q != m)
