from fractions import Fraction

import pytest

from skewflow.algebra import Polynomial
from skewflow.errors import SingularConfiguration
from skewflow.moments import (
    DiscreteMeasure,
    SkewMoments,
    from_discrete_symplectic,
    from_random,
)
from skewflow.pfaffian import numeric_pfaffian
from skewflow.sops import (
    SOPFamily,
    build_family,
    normalization,
    oracle_family,
    sop_even,
    sop_odd,
    skew_product,
    verify_skew_orthogonality,
)

SYMPLECTIC = from_discrete_symplectic(DiscreteMeasure([1, 2], [1, 1]), 12)


class TestSkewProduct:
    def test_self_pairing_zero(self):
        f = Polynomial([1, -2, 3])
        assert skew_product(SYMPLECTIC, f, f) == 0

    def test_one_z(self):
        one, z = Polynomial.one(), Polynomial.variable()
        assert skew_product(SYMPLECTIC, one, z) == 2
        assert skew_product(SYMPLECTIC, z, one) == -2

    def test_bilinearity(self):
        table = from_random(3, 8)
        f1 = Polynomial([1, 2])
        f2 = Polynomial([0, -1, Fraction(1, 3)])
        g = Polynomial([5, 0, 0, 1])
        assert skew_product(table, f1 + f2, g) == skew_product(
            table, f1, g
        ) + skew_product(table, f2, g)


class TestConstruction:
    def test_even_base(self):
        assert sop_even(SYMPLECTIC, 0) == Polynomial.one()

    def test_even_pair_one(self):
        expected = Polynomial([Fraction(5, 2), Fraction(-3), Fraction(1)])
        assert sop_even(SYMPLECTIC, 1) == expected

    def test_odd_base(self):
        assert sop_odd(SYMPLECTIC, 0) == Polynomial.variable()

    def test_odd_pair_one(self):
        # Pf(0,1,3,z)/Pf(0,1) = (s_01 z^3 - s_03 z + s_13)/s_01
        s01 = SYMPLECTIC.entry(0, 1)
        s03 = SYMPLECTIC.entry(0, 3)
        s13 = SYMPLECTIC.entry(1, 3)
        expected = Polynomial(
            [s13 / s01, -s03 / s01, Fraction(0), Fraction(1)]
        )
        assert sop_odd(SYMPLECTIC, 1) == expected

    def test_monic(self):
        table = from_random(9, 11)
        for n in range(3):
            q = sop_even(table, n)
            assert q.degree == 2 * n and q.coefficient(2 * n) == 1
            q = sop_odd(table, n)
            assert q.degree == 2 * n + 1 and q.coefficient(2 * n + 1) == 1

    def test_odd_gauge_shift_preserves_relations(self):
        table = from_random(9, 11)
        family = build_family(table, 2)
        alpha = Fraction(7, 5)
        shifted = family.odd(1) + family.even(1).scale(alpha)
        for k in range(2):
            assert skew_product(table, shifted, family.even(k)) == (
                -family.norms[1] if k == 1 else 0
            )
            if k != 1:
                assert skew_product(table, shifted, family.odd(k)) == 0


class TestNormalization:
    def test_r0(self):
        assert normalization(SYMPLECTIC, 0) == 2

    def test_r1_two_oracles(self):
        direct = skew_product(
            SYMPLECTIC, sop_even(SYMPLECTIC, 1), sop_odd(SYMPLECTIC, 1)
        )
        quotient = numeric_pfaffian(SYMPLECTIC, range(4)) / numeric_pfaffian(
            SYMPLECTIC, range(2)
        )
        assert direct == quotient == Fraction(1, 2)

    def test_gauge_invariant(self):
        table = from_random(9, 11)
        family = build_family(table, 1)
        shifted = family.odd(1) + family.even(1).scale(Fraction(-4, 9))
        assert skew_product(table, family.even(1), shifted) == family.norms[1]


class TestFamily:
    def test_minimal(self):
        family = build_family(SYMPLECTIC, 0)
        assert family.polys == (Polynomial.one(), Polynomial.variable())
        assert family.norms == (Fraction(2),)

    def test_constructor_verifies(self):
        family = build_family(from_random(42, 9), 3)
        report = verify_skew_orthogonality(family, from_random(42, 9))
        assert report.passed

    def test_matches_oracle_after_gauge_projection(self):
        table = from_random(42, 9)
        family = build_family(table, 3).gauge_projected()
        oracle = oracle_family(table, 3)
        assert family.polys == oracle.polys
        assert family.norms == oracle.norms

    def test_oracle_on_symplectic(self):
        family = build_family(SYMPLECTIC, 1)
        oracle = oracle_family(SYMPLECTIC, 1)
        assert family.even(0) == oracle.even(0)
        assert family.even(1) == oracle.even(1)

    def test_singular_table_rejected_by_both(self):
        # handcraft a table whose leading 4x4 Pfaffian vanishes:
        # s01*s23 - s02*s13 + s03*s12 = 1*1 - 1*1 + 0 = 0
        entries = [
            [1, 1, 0, 0],
            [1, 1, 0],
            [1, 1],
            [1],
        ]
        table = SkewMoments(4, entries)
        with pytest.raises(SingularConfiguration):
            build_family(table, 1)
        with pytest.raises(SingularConfiguration):
            oracle_family(table, 1)

    def test_json_round_trip(self):
        family = build_family(from_random(42, 9), 2)
        again = SOPFamily.from_json(family.to_json())
        assert again.polys == family.polys
        assert again.norms == family.norms
        assert again.gauge == family.gauge


class TestVerifier:
    def test_fault_injection(self):
        table = from_random(42, 9)
        family = build_family(table, 1)
        polys = list(family.polys)
        polys[3] = polys[3] + Polynomial.monomial(2)
        broken = SOPFamily(polys, family.norms, family.gauge)
        report = verify_skew_orthogonality(broken, table)
        assert not report.passed
        failing = {c.id for c in report.failures}
        assert failing
        # only pairings that involve the perturbed q_3 may fail
        assert all("q3" in cid for cid in failing)

    def test_empty_pair_family_passes(self):
        family = build_family(SYMPLECTIC, 0)
        report = verify_skew_orthogonality(family, SYMPLECTIC)
        assert report.passed
        assert len(report.checks) == 1
