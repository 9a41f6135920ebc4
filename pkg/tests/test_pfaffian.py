from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from skewflow.algebra import Polynomial
from skewflow.errors import IndexOutOfBudget
from skewflow.moments import DiscreteMeasure, SkewMoments, from_discrete_symplectic
from skewflow.pfaffian import (
    LAMBDA,
    MU,
    ZVAR,
    SkewMatrix,
    augmented_pfaffian,
    numeric_pfaffian,
    pfaffian,
    pfaffian_expand,
)

rationals = st.fractions(
    min_value=-10, max_value=10, max_denominator=6
)


def skew_from_upper(dim, values):
    it = iter(values)
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            v = next(it)
            rows[i][j] = v
            rows[j][i] = -v
    return SkewMatrix.from_rows(rows)


def skew_matrices(dim):
    count = dim * (dim - 1) // 2
    return st.lists(rationals, min_size=count, max_size=count).map(
        lambda vals: skew_from_upper(dim, vals)
    )


def exact_determinant(rows):
    """Fraction Gaussian elimination; independent of the Pfaffian code."""
    a = [row[:] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


class TestBaseCases:
    def test_dimension_zero_is_one(self):
        empty = SkewMatrix.from_rows([])
        assert pfaffian(empty) == 1
        assert pfaffian_expand(empty) == 1

    def test_two_by_two(self):
        m = skew_from_upper(2, [Fraction(7, 3)])
        assert pfaffian(m) == Fraction(7, 3)
        assert pfaffian_expand(m) == Fraction(7, 3)

    def test_four_by_four_matching_formula(self):
        vals = [Fraction(x) for x in (2, 3, 5, 7, 11, 13)]
        s01, s02, s03, s12, s13, s23 = vals
        m = skew_from_upper(4, vals)
        expected = s01 * s23 - s02 * s13 + s03 * s12
        assert pfaffian(m) == expected
        assert pfaffian_expand(m) == expected

    def test_singular_matrix(self):
        rows = [[Fraction(0)] * 4 for _ in range(4)]
        assert pfaffian(SkewMatrix.from_rows(rows)) == 0


class TestCrossChecks:
    @settings(max_examples=30, deadline=None)
    @given(skew_matrices(6))
    def test_two_algorithms_agree(self, m):
        assert pfaffian(m) == pfaffian_expand(m)

    @settings(max_examples=20, deadline=None)
    @given(skew_matrices(8))
    def test_square_is_determinant(self, m):
        assert pfaffian(m) ** 2 == exact_determinant(m.to_rows())


def _table(seed=5, size=9):
    from skewflow.moments import from_random

    return from_random(seed, size, 6)


class TestIndexedPfaffians:
    @settings(max_examples=25, deadline=None)
    @given(st.permutations(list(range(6))))
    def test_antisymmetry_under_index_permutation(self, perm):
        table = _table()
        base = numeric_pfaffian(table, range(6))
        sign = _permutation_sign(perm)
        assert numeric_pfaffian(table, perm) == sign * base

    def test_repeated_index_vanishes(self):
        table = _table()
        assert numeric_pfaffian(table, [0, 1, 2, 2]) == 0

    @settings(max_examples=25, deadline=None)
    @given(rationals.filter(lambda c: c != 0), st.integers(0, 5))
    def test_row_scaling(self, c, k):
        # scaling row and column k of the underlying matrix scales Pf by c
        table = _table()
        idx = list(range(6))

        class Scaled:
            max_index = table.max_index

            def entry(self, i, j):
                v = table.entry(i, j)
                if i == k:
                    v *= c
                if j == k:
                    v *= c
                return v

        assert numeric_pfaffian(Scaled(), idx) == c * numeric_pfaffian(table, idx)

    def test_budget_enforced(self):
        with pytest.raises(IndexOutOfBudget):
            numeric_pfaffian(_table(size=5), [0, 1, 2, 6])


def _permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


SYMPLECTIC = from_discrete_symplectic(DiscreteMeasure([1, 2], [1, 1]), 6)


class TestAugmented:
    def test_single_monomial_row(self):
        assert augmented_pfaffian(SYMPLECTIC, [0, ZVAR]) == Polynomial.one()

    def test_special_special_is_zero(self):
        assert augmented_pfaffian(
            SYMPLECTIC, [MU, LAMBDA], Fraction(1, 2), Fraction(3)
        ) == Polynomial.zero()

    def test_symplectic_four_index(self):
        # matching expansion: s_01 z^2 - s_02 z + s_12 = 2z^2 - 6z + 5
        result = augmented_pfaffian(SYMPLECTIC, [0, 1, 2, ZVAR])
        assert result == Polynomial([Fraction(5), Fraction(-6), Fraction(2)])

    def test_constant_rows_evaluate_parameters(self):
        mu, lam = Fraction(1, 2), Fraction(3)
        with_mu = augmented_pfaffian(SYMPLECTIC, [0, 1, 2, MU], mu, lam)
        # same expansion with mu substituted for z
        assert with_mu.degree <= 0
        assert with_mu.coefficient(0) == 2 * mu**2 - 6 * mu + 5

    def test_duplicate_special_rejected(self):
        with pytest.raises(ValueError):
            augmented_pfaffian(SYMPLECTIC, [0, ZVAR, 1, ZVAR])

    def test_agrees_with_numeric_when_no_specials(self):
        assert augmented_pfaffian(SYMPLECTIC, [0, 1, 2, 3]) == Polynomial.constant(
            numeric_pfaffian(SYMPLECTIC, [0, 1, 2, 3])
        )
