"""Exact Pfaffians of skew-symmetric rational matrices.

Two independent algorithms are provided: a cubic skew-symmetric elimination
(the fast path) and a memoized recursive expansion (the oracle).  On top of
those, :func:`augmented_pfaffian` evaluates Pfaffians whose index lists mix
moment indices with the special symbols z, lambda, mu; the special rows are
expanded away first, so the elimination kernel only ever sees numbers.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Protocol, Sequence, Union

from .algebra import Polynomial, Rational, RationalLike, rat
from .errors import IndexOutOfBudget


class Special(enum.Enum):
    """Non-monomial Pfaffian indices."""

    MU = "mu"
    LAMBDA = "lambda"
    ZVAR = "z"


MU = Special.MU
LAMBDA = Special.LAMBDA
ZVAR = Special.ZVAR

AugmentedIndex = Union[int, Special]


class SkewMatrix:
    """Even-dimensional skew-symmetric matrix; only the upper triangle is free.

    The lower triangle and diagonal are implied, so skew-symmetry is
    structural rather than a runtime invariant.
    """

    __slots__ = ("dimension", "_upper")

    def __init__(self, dimension: int, upper: Callable[[int, int], RationalLike]):
        if dimension % 2 != 0 or dimension < 0:
            raise ValueError("SkewMatrix dimension must be even and nonnegative")
        self.dimension = dimension
        self._upper = tuple(
            tuple(rat(upper(i, j)) for j in range(i + 1, dimension))
            for i in range(dimension)
        )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[RationalLike]]) -> "SkewMatrix":
        """Build from a full square array; only the upper triangle is read."""
        return SkewMatrix(len(rows), lambda i, j: rows[i][j])

    def entry(self, i: int, j: int) -> Rational:
        if i == j:
            return Fraction(0)
        if i < j:
            return self._upper[i][j - i - 1]
        return -self._upper[j][i - j - 1]

    def to_rows(self) -> list[list[Rational]]:
        m = self.dimension
        return [[self.entry(i, j) for j in range(m)] for i in range(m)]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SkewMatrix)
            and self.dimension == other.dimension
            and self._upper == other._upper
        )

    def __hash__(self) -> int:
        return hash((self.dimension, self._upper))


def _height(q: Rational) -> int:
    return max(abs(q.numerator), q.denominator)


def pfaffian(matrix: SkewMatrix) -> Rational:
    """Pfaffian via skew-symmetric elimination, O(m^3) field operations.

    The matrix is reduced by congruence transformations to a direct sum of
    2x2 blocks whose off-diagonal entries multiply into the Pfaffian; row
    and column swaps each flip the sign.  Dimension 0 gives 1.
    """
    m = matrix.dimension
    if m == 0:
        return Fraction(1)
    a = matrix.to_rows()
    sign = 1
    result = Fraction(1)
    for k in range(0, m - 1, 2):
        pivot_row = -1
        best = -1
        for i in range(k + 1, m):
            if a[k][i] != 0:
                h = _height(a[k][i])
                if h > best:
                    best = h
                    pivot_row = i
        if pivot_row < 0:
            # row k is zero in the remaining block
            return Fraction(0)
        if pivot_row != k + 1:
            a[k + 1], a[pivot_row] = a[pivot_row], a[k + 1]
            for row in a:
                row[k + 1], row[pivot_row] = row[pivot_row], row[k + 1]
            sign = -sign
        pivot = a[k][k + 1]
        result *= pivot
        for i in range(k + 2, m):
            if a[k][i] == 0:
                continue
            f = a[k][i] / pivot
            for j in range(k, m):
                a[i][j] -= f * a[k + 1][j]
            for j in range(k, m):
                a[j][i] -= f * a[j][k + 1]
    return sign * result


def pfaffian_expand(matrix: SkewMatrix) -> Rational:
    """Pfaffian by recursive last-index expansion with memoized minors.

    Independent of :func:`pfaffian`; kept as the cross-check oracle.
    """

    entry = matrix.entry

    @lru_cache(maxsize=None)
    def rec(indices: tuple[int, ...]) -> Rational:
        if not indices:
            return Fraction(1)
        if len(indices) == 2:
            return entry(indices[0], indices[1])
        last = indices[-1]
        rest = indices[:-1]
        total = Fraction(0)
        for k, idx in enumerate(rest):
            coeff = entry(idx, last)
            if coeff == 0:
                continue
            minor = rest[:k] + rest[k + 1 :]
            total += (-1) ** k * coeff * rec(minor)
        return total

    return rec(tuple(range(matrix.dimension)))


class MomentTable(Protocol):
    """Anything exposing skew moments s_{ij}; satisfied by SkewMoments."""

    max_index: int

    def entry(self, i: int, j: int) -> Rational: ...


def numeric_pfaffian(moments: MomentTable, indices: Sequence[int]) -> Rational:
    """Pfaffian of the skew matrix picked out by an ordered monomial index list."""
    for i in indices:
        if i > moments.max_index:
            raise IndexOutOfBudget(
                f"moment index {i} exceeds table budget {moments.max_index}"
            )
    if len(indices) % 2 != 0:
        raise ValueError("index list must have even length")
    idx = tuple(indices)
    return pfaffian(SkewMatrix(len(idx), lambda u, v: moments.entry(idx[u], idx[v])))


def _special_element(i: int, tag: Special, mu: Rational, lam: Rational) -> Polynomial:
    if tag is ZVAR:
        return Polynomial.monomial(i)
    if tag is LAMBDA:
        return Polynomial.constant(lam**i)
    return Polynomial.constant(mu**i)


def augmented_pfaffian(
    moments: MomentTable,
    indices: Sequence[AugmentedIndex],
    mu: RationalLike = 0,
    lam: RationalLike = 0,
) -> Polynomial:
    """Pfaffian over indices mixing moments with the special symbols z, lambda, mu.

    Element rules: Pf(i,j)=s_ij, Pf(i,z)=z^i, Pf(i,lambda)=lambda^i,
    Pf(i,mu)=mu^i, and any pairing of two special symbols is 0.  The result
    is a Polynomial in z (constant when z is absent).  Each special symbol
    may appear at most once.
    """
    mu = rat(mu)
    lam = rat(lam)
    idx = list(indices)
    if len(idx) % 2 != 0:
        raise ValueError("index list must have even length")
    specials = [i for i in idx if isinstance(i, Special)]
    if len(specials) != len(set(specials)):
        raise ValueError("each special index may appear at most once")
    for i in idx:
        if isinstance(i, int) and i > moments.max_index:
            raise IndexOutOfBudget(
                f"moment index {i} exceeds table budget {moments.max_index}"
            )

    def expand(items: tuple[AugmentedIndex, ...]) -> Polynomial:
        special_pos = [p for p, v in enumerate(items) if isinstance(v, Special)]
        if not special_pos:
            ints = [v for v in items if isinstance(v, int)]
            return Polynomial.constant(numeric_pfaffian(moments, ints))
        # move the last special index to the end, then expand along it
        pos = special_pos[-1]
        tag = items[pos]
        rest = items[:pos] + items[pos + 1 :]
        move_sign = (-1) ** (len(items) - 1 - pos)
        total = Polynomial.zero()
        for k, other in enumerate(rest):
            if isinstance(other, Special):
                continue  # special-special element is 0
            elem = _special_element(other, tag, mu, lam)
            minor = rest[:k] + rest[k + 1 :]
            term = elem * expand(minor)
            if k % 2 == 1:
                term = -term
            total = total + term
        return total.scale(move_sign)

    return expand(tuple(idx))
