"""Exact arithmetic: rationals, unit phases and cyclotomic numbers.

All coboundary matrices in this package have entries of the form
``c * exp(2*pi*i * t * w)`` with ``c, w`` small integers and ``t`` rational.
For ``t = p/q`` every such entry lies in the cyclotomic field Q(zeta_q), so
ranks can be decided exactly by Gaussian elimination over that field.

Elements of Q(zeta_q) are stored in the power basis ``1, zeta, ...,
zeta^(d-1)`` with ``d = phi(q)``.  For ``q <= 2`` the field is Q itself and
plain :class:`fractions.Fraction` values are used instead.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .errors import NumericalRankError, ParseError

#: above this field degree ranks are computed numerically (certified SVD)
MAX_EXACT_DEGREE = 40


# --------------------------------------------------------------------------
# rationals

def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are rejected: exactness is the point.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise ParseError(f"not a rational: {value!r}")


def fmt(value: Fraction) -> str:
    """Canonical ``p/q`` text form (integers print without a denominator)."""
    return str(Fraction(value))


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator strictly inside ``(lo, hi)``.

    Stern-Brocot descent; used to pick cheap sample parameters.
    """
    if not lo < hi:
        raise ValueError("empty interval")
    fl = math.floor(lo)
    if fl + 1 < hi:
        # an integer fits; take the one closest to zero
        if lo < 0 < hi:
            return Fraction(0)
        return Fraction(fl + 1) if lo >= 0 else Fraction(math.ceil(hi) - 1)
    # both inside (fl, fl+1]; recurse on reciprocals of the fractional parts
    a, b = lo - fl, hi - fl
    if a == 0:
        # (fl, fl + b) with b <= 1: 1/n form
        n = math.floor(1 / b) + 1
        return fl + Fraction(1, n)
    inner = simplest_between(1 / b, 1 / a)
    return fl + 1 / inner


# --------------------------------------------------------------------------
# unit phases

class Phase:
    """The unit complex number ``exp(2*pi*i*turns)`` with exact rational turns."""

    __slots__ = ("turns",)

    def __init__(self, turns):
        self.turns = to_fraction(turns) % 1

    @property
    def is_one(self) -> bool:
        return self.turns == 0

    def __complex__(self) -> complex:
        if self.turns == 0:
            return 1 + 0j
        if self.turns == Fraction(1, 2):
            return -1 + 0j
        return cmath.exp(2j * math.pi * float(self.turns))

    def __mul__(self, other):
        if isinstance(other, Phase):
            return Phase(self.turns + other.turns)
        return NotImplemented

    def conjugate(self) -> "Phase":
        return Phase(-self.turns)

    def __eq__(self, other):
        if isinstance(other, Phase):
            return self.turns == other.turns
        if isinstance(other, (int, Fraction)):
            return other == 1 and self.is_one or other == -1 and self.turns == Fraction(1, 2)
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(("Phase", self.turns))

    def __repr__(self):
        return f"Phase({fmt(self.turns)})"

    def to_json(self) -> dict:
        return {"arg": fmt(self.turns)}


# --------------------------------------------------------------------------
# cyclotomic numbers

@lru_cache(maxsize=None)
def _cyclotomic(order: int):
    """Degree and the table of ``x^k mod Phi_order`` for small ``k``."""
    from sympy import Poly, Symbol, cyclotomic_poly

    x = Symbol("x")
    coeffs = [int(c) for c in Poly(cyclotomic_poly(order, x), x).all_coeffs()[::-1]]
    d = len(coeffs) - 1
    table = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(max(order, 2 * d - 1)):
        table.append(tuple(cur))
        carry = cur[-1]
        cur = [0] + cur[:-1]
        if carry:
            cur = [c - carry * coeffs[i] for i, c in enumerate(cur)]
    return d, tuple(table)


def field_degree(order: int) -> int:
    """Euler phi of ``order`` (the degree of Q(zeta_order))."""
    n, result, p = order, order, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


class CycloNumber:
    """Element of Q(zeta_order), ``zeta = exp(2*pi*i/order)``, ``order >= 3``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, order: int, exponent: int, coeff=1) -> "CycloNumber":
        d, table = _cyclotomic(order)
        c = Fraction(coeff)
        return cls(order, (c * v for v in table[exponent % order]))

    @classmethod
    def constant(cls, order: int, value) -> "CycloNumber":
        d, _ = _cyclotomic(order)
        return cls(order, (Fraction(value),) + (Fraction(0),) * (d - 1))

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            if other.order != self.order:
                raise ValueError("mixing cyclotomic fields of different order")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.constant(self.order, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloNumber(self.order, (a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.order, (-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloNumber(self.order, (a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.order, (a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d, table = _cyclotomic(self.order)
        conv = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        conv[i + j] += a * b
        out = list(conv[:d])
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                for i, v in enumerate(table[k]):
                    if v:
                        out[i] += c * v
        return CycloNumber(self.order, out)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        d, table = _cyclotomic(self.order)
        # columns: self * x^j, solve M y = e_0
        cols = [(self * CycloNumber(self.order, table[j])).coeffs for j in range(d)]
        rows = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        reduced, pivots = rref(rows)
        return CycloNumber(self.order, (reduced[i][d] for i in range(d)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.order, (a / other for a in self.coeffs))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.order)
        return complex(sum(complex(float(c)) * z**k for k, c in enumerate(self.coeffs)))

    def __repr__(self):
        terms = [f"{fmt(c)}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CycloNumber[{self.order}](" + (" + ".join(terms) or "0") + ")"


def root_of_unity_power(turns: Fraction):
    """``exp(2*pi*i*turns)`` as an exact field element (Fraction or CycloNumber)."""
    turns = Fraction(turns) % 1
    q = turns.denominator
    if q == 1:
        return Fraction(1)
    if q == 2:
        return Fraction(-1)
    return CycloNumber.monomial(q, turns.numerator)


def as_complex(value) -> complex:
    return complex(value)


# --------------------------------------------------------------------------
# exact linear algebra over any field with Python number operators

def _is_zero(x) -> bool:
    return not x


def rref(rows):
    """Reduced row echelon form.  Returns ``(rows, pivot_columns)``.

    Works for Fractions and CycloNumbers alike; the input is not modified.
    """
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if not _is_zero(m[i][c]):
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        inv = p.inverse() if isinstance(p, CycloNumber) else Fraction(1) / p
        m[r] = [x * inv if not _is_zero(x) else x for x in m[r]]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b if not _is_zero(b) else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None):
    """Basis of the right kernel, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols or 0)] for j in range(ncols or 0)]
    ncols = len(rows[0])
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs):
    """One solution ``x`` of ``rows @ x = rhs`` or ``None`` when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][ncols]
    return x


def matmul(a, b):
    """Exact product of two list-of-rows matrices."""
    if not a or not b:
        inner_cols = len(b[0]) if b else 0
        return [[Fraction(0)] * inner_cols for _ in a]
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def numeric_rank(matrix: np.ndarray, tol: float = 1e-10) -> int:
    """Rank from singular values, refusing when the spectrum has no clear gap.

    Every singular value must sit either below ``tol`` or above ``1e3 * tol``
    (relative to the largest one); otherwise :class:`NumericalRankError`.
    """
    if matrix.size == 0:
        return 0
    sv = np.linalg.svd(matrix, compute_uv=False)
    scale = max(1.0, float(sv[0]))
    small = sv <= tol * scale
    ambiguous = (~small) & (sv < 1e3 * tol * scale)
    if ambiguous.any():
        raise NumericalRankError(f"singular values {sv[ambiguous]} inside the uncertainty band")
    return int((~small).sum())
