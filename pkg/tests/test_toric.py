import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from bsq.errors import DomainError, ParseError
from bsq.toric import (
    DelzantPolytope,
    delzant_validate,
    enumerate_lattice_points,
    quantize,
    transform,
)

from oracles import brute_lattice, unimodular


def interval(k):
    return DelzantPolytope(1, (((1,), k), ((-1,), 0)))


def test_interval_example():
    rep = enumerate_lattice_points(interval(4))
    assert rep.interior_points == ((1,), (2,), (3,))
    assert rep.boundary_points == ((0,), (4,))
    assert (rep.real_dim, rep.kahler_dim) == (3, 5)


def test_simplex_example():
    rep = enumerate_lattice_points(DelzantPolytope.simplex(2, 3))
    assert rep.kahler_dim == 10
    assert rep.interior_points == ((1, 1),)


def test_unit_square_has_no_interior():
    rep = enumerate_lattice_points(DelzantPolytope.box([0, 0], [1, 1]))
    assert rep.real_dim == 0 and rep.kahler_dim == 4


def test_quantize_examples():
    assert quantize(interval(7)) == {"real_dim": 6, "kahler_dim": 8, "discrepancy": 2}
    assert quantize(DelzantPolytope.box([0, 0], [2, 2])) == {"real_dim": 1, "kahler_dim": 9, "discrepancy": 8}
    assert quantize(DelzantPolytope.simplex(3, 4)) == {"real_dim": 1, "kahler_dim": 35, "discrepancy": 34}


def test_thin_box_not_full_dimensional():
    with pytest.raises(DomainError):
        quantize(DelzantPolytope.box([0, 0], [3, 0]))


def test_unbounded_rejected():
    with pytest.raises(DomainError):
        enumerate_lattice_points(DelzantPolytope(2, (((1, 0), 3), ((-1, 0), 0))))


def test_empty_rejected():
    with pytest.raises(DomainError):
        enumerate_lattice_points(DelzantPolytope(1, (((1,), 0), ((-1,), -1))))


def test_parse_errors():
    with pytest.raises(ParseError):
        DelzantPolytope.from_json({"n": 2, "halfspaces": [{"u": [1], "c": "1"}]})
    with pytest.raises(ParseError):
        DelzantPolytope.from_json({"n": 1, "halfspaces": [{"u": [0], "c": "1"}]})
    with pytest.raises(ParseError):
        DelzantPolytope.from_json({"n": 1, "halfspaces": [{"u": [1.5], "c": "1"}]})
    p = DelzantPolytope.box([0, 0], [3, 3])
    assert DelzantPolytope.from_json(p.to_json()) == p


def test_validate_examples():
    assert delzant_validate(DelzantPolytope.simplex(2, 1)) == []
    assert delzant_validate(DelzantPolytope.box([0, 0], [1, 1])) == []
    bad = DelzantPolytope(2, (((2, 0), 2), ((0, 1), 1), ((-1, 0), 0), ((0, -1), 0)))
    diags = delzant_validate(bad)
    assert any("not primitive" in d for d in diags)


def test_validate_flags_non_unimodular_vertex():
    # triangle with a vertex cone spanned by (1, 2) and (-1, 0): determinant 2
    p = DelzantPolytope(2, (((-1, 0), 0), ((0, -1), 0), ((1, 2), 4)))
    assert any("determinant" in d for d in delzant_validate(p))


@pytest.mark.parametrize("k", range(1, 51))
def test_dilation_family(k):
    rep = enumerate_lattice_points(interval(k))
    assert rep.real_dim == k - 1 and rep.kahler_dim == k + 1


def _random_delzant(rng, n):
    kind = rng.random()
    if n == 1 or kind < 0.35:
        lows = [rng.randint(-3, 3) for _ in range(n)]
        return DelzantPolytope.box(lows, [a + rng.randint(1, 6) for a in lows])
    if kind < 0.6:
        return DelzantPolytope.simplex(n, rng.randint(1, 6))
    if n == 2:
        # Hirzebruch trapezoid: x >= 0, 0 <= y <= b, x + a y <= c with c > a b
        a, b = rng.randint(0, 3), rng.randint(1, 3)
        c = a * b + rng.randint(1, 4)
        return DelzantPolytope(2, (((-1, 0), 0), ((0, -1), 0), ((0, 1), b), ((1, a), c)))
    # simplex times interval
    s, h = rng.randint(1, 4), rng.randint(1, 4)
    return DelzantPolytope(3, (((-1, 0, 0), 0), ((0, -1, 0), 0), ((1, 1, 0), s), ((0, 0, -1), 0), ((0, 0, 1), h)))


def test_random_polytopes_are_delzant():
    rng = random.Random(5)
    for _ in range(30):
        p = _random_delzant(rng, rng.randint(1, 3))
        assert delzant_validate(p) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_membership_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    p = _random_delzant(rng, n)
    A = unimodular(rng, n)
    p = transform(p, A, [rng.randint(-3, 3) for _ in range(n)])
    rep = enumerate_lattice_points(p)
    interior, boundary = brute_lattice(p.halfspaces, n)
    assert sorted(rep.interior_points) == interior
    assert sorted(rep.boundary_points) == boundary


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_unimodular_and_translation_invariance(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    p = _random_delzant(rng, n)
    base = quantize(p)
    A = unimodular(rng, n)
    b = [rng.randint(-5, 5) for _ in range(n)]
    assert quantize(transform(p, A, b)) == base
    assert quantize(transform(p, [[int(i == j) for j in range(n)] for i in range(n)], b)) == base
    assert delzant_validate(transform(p, A)) == []


def test_transform_rejects_non_unimodular():
    with pytest.raises(DomainError):
        transform(interval(3), [[2]])


def test_rational_offsets():
    p = DelzantPolytope(1, (((1,), F(7, 2)), ((-1,), F(1, 3))))
    rep = enumerate_lattice_points(p)
    assert rep.interior_points == ((0,), (1,), (2,), (3,))
    assert rep.boundary_points == ()


def test_parallel_slabs_agree():
    p = DelzantPolytope.simplex(3, 20)
    assert enumerate_lattice_points(p, jobs=4) == enumerate_lattice_points(p, jobs=1)


def test_candidate_limit(monkeypatch):
    from bsq import toric

    monkeypatch.setattr(toric, "MAX_CANDIDATES", 100)
    with pytest.raises(DomainError):
        enumerate_lattice_points(DelzantPolytope.box([0, 0], [20, 20]))
