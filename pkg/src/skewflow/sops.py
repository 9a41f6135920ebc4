"""Skew orthogonal polynomial families built from moment tables.

Even-degree members come from the Pfaffian quotient Pf(0..2n, z)/Pf(0..2n-1),
odd-degree members from Pf(0..2n-1, 2n+1, z)/Pf(0..2n-1); the family records
its odd-degree gauge.  :func:`oracle_family` rebuilds the same family by an
independent exact linear solve so the two constructions can cross-validate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from .algebra import Polynomial, Rational, RationalLike, rat, rat_str
from .errors import DegreeBudgetExceeded, SingularConfiguration
from .moments import SkewMoments
from .pfaffian import ZVAR, augmented_pfaffian, numeric_pfaffian
from .report import Report

PFAFFIAN_GAUGE = "pfaffian-alpha-zero"
COEFF_GAUGE = "z2n-coefficient-zero"


def skew_product(moments: SkewMoments, f: Polynomial, g: Polynomial) -> Rational:
    """<f|g> = sum_ij f_i g_j s_ij; bilinear and skew."""
    if f.degree > moments.max_index or g.degree > moments.max_index:
        raise DegreeBudgetExceeded(
            f"skew product needs degree <= {moments.max_index}, "
            f"got {f.degree} and {g.degree}"
        )
    total = Fraction(0)
    for i, fi in enumerate(f.coeffs):
        if fi == 0:
            continue
        for j, gj in enumerate(g.coeffs):
            if gj == 0:
                continue
            total += fi * gj * moments.entry(i, j)
    return total


def _denominator(moments: SkewMoments, n: int) -> Rational:
    tau = numeric_pfaffian(moments, range(2 * n))
    if tau == 0:
        raise SingularConfiguration(
            f"denominator Pfaffian Pf(0..{2 * n - 1}) vanishes at n={n}"
        )
    return tau


def sop_even(moments: SkewMoments, n: int) -> Polynomial:
    """Monic even SOP q_2n = Pf(0..2n, z)/Pf(0..2n-1)."""
    if 2 * n > moments.max_index:
        raise DegreeBudgetExceeded(f"q_{2 * n} needs max_index >= {2 * n}")
    tau = _denominator(moments, n)
    numerator = augmented_pfaffian(moments, list(range(2 * n + 1)) + [ZVAR])
    return numerator.scale(1 / tau)


def sop_odd(moments: SkewMoments, n: int) -> Polynomial:
    """Monic odd SOP q_{2n+1} = Pf(0..2n-1, 2n+1, z)/Pf(0..2n-1), alpha_n = 0."""
    if 2 * n + 1 > moments.max_index:
        raise DegreeBudgetExceeded(f"q_{2 * n + 1} needs max_index >= {2 * n + 1}")
    tau = _denominator(moments, n)
    numerator = augmented_pfaffian(moments, list(range(2 * n)) + [2 * n + 1, ZVAR])
    return numerator.scale(1 / tau)


def normalization(moments: SkewMoments, n: int) -> Rational:
    """r_n = <q_2n | q_{2n+1}>; must be nonzero for a valid family."""
    r = skew_product(moments, sop_even(moments, n), sop_odd(moments, n))
    if r == 0:
        raise SingularConfiguration(f"normalization r_{n} vanishes")
    return r


class SOPFamily:
    """Polynomials q_0..q_{2N+1} with normalizations r_0..r_N."""

    __slots__ = ("pairs", "polys", "norms", "gauge")

    def __init__(
        self,
        polys: Sequence[Polynomial],
        norms: Sequence[RationalLike],
        gauge: str = PFAFFIAN_GAUGE,
    ):
        if len(polys) % 2 != 0 or not polys:
            raise ValueError("family must hold pairs q_2n, q_{2n+1}")
        self.pairs = len(polys) // 2 - 1
        self.polys = tuple(polys)
        self.norms = tuple(rat(r) for r in norms)
        self.gauge = gauge
        if len(self.norms) != self.pairs + 1:
            raise ValueError("need one normalization per pair")
        for n, p in enumerate(self.polys):
            if p.degree != n:
                raise ValueError(f"q_{n} has degree {p.degree}")
        if any(r == 0 for r in self.norms):
            raise SingularConfiguration("zero normalization in family")

    def even(self, n: int) -> Polynomial:
        return self.polys[2 * n]

    def odd(self, n: int) -> Polynomial:
        return self.polys[2 * n + 1]

    def gauge_projected(self) -> "SOPFamily":
        """Shift each odd member so its z^2n coefficient vanishes."""
        polys = list(self.polys)
        for n in range(self.pairs + 1):
            q_even, q_odd = polys[2 * n], polys[2 * n + 1]
            alpha = q_odd.coefficient(2 * n)
            polys[2 * n + 1] = q_odd - q_even.scale(alpha)
        return SOPFamily(polys, self.norms, COEFF_GAUGE)

    def to_json(self) -> dict[str, Any]:
        return {
            "pairs": self.pairs,
            "polys": [p.to_json() for p in self.polys],
            "norms": [rat_str(r) for r in self.norms],
            "gauge": self.gauge,
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> "SOPFamily":
        return SOPFamily(
            [Polynomial.from_json(p) for p in data["polys"]],
            [rat(r) for r in data["norms"]],
            data.get("gauge", PFAFFIAN_GAUGE),
        )


def build_family(moments: SkewMoments, pairs: int) -> SOPFamily:
    """Family q_0..q_{2*pairs+1} via the Pfaffian formulas; verified eagerly."""
    if 2 * pairs + 1 > moments.max_index:
        raise DegreeBudgetExceeded(
            f"family with {pairs} pairs needs max_index >= {2 * pairs + 1}"
        )
    polys: list[Polynomial] = []
    norms: list[Rational] = []
    for n in range(pairs + 1):
        polys.append(sop_even(moments, n))
        polys.append(sop_odd(moments, n))
        norms.append(skew_product(moments, polys[-2], polys[-1]))
        if norms[-1] == 0:
            raise SingularConfiguration(f"normalization r_{n} vanishes")
    family = SOPFamily(polys, norms, PFAFFIAN_GAUGE)
    report = verify_skew_orthogonality(family, moments)
    if not report.passed:
        first = report.failures[0]
        raise SingularConfiguration(f"constructed family fails {first.id}")
    return family


def _solve(matrix: list[list[Rational]], rhs: list[Rational]) -> list[Rational]:
    """Exact Gaussian elimination with partial (first-nonzero) pivoting."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularConfiguration("linear system for SOP oracle is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def oracle_family(moments: SkewMoments, pairs: int) -> SOPFamily:
    """Independent construction solving the defining relations degree by degree.

    Odd members use the z^2n-coefficient-zero gauge, so they may differ from
    the Pfaffian-formula family by a multiple of the even member.
    """
    if 2 * pairs + 1 > moments.max_index:
        raise DegreeBudgetExceeded(
            f"family with {pairs} pairs needs max_index >= {2 * pairs + 1}"
        )
    polys: list[Polynomial] = []
    norms: list[Rational] = []
    mono = [Polynomial.monomial(k) for k in range(2 * pairs + 2)]
    for degree in range(2 * pairs + 2):
        # q_degree = z^degree + sum_{j<degree} c_j z^j with <q|q_k> = 0
        # for k < 2*floor(degree/2); odd degrees add the gauge row c_{deg-1}=0.
        constraints: list[list[Rational]] = []
        rhs: list[Rational] = []
        lower = degree - (0 if degree % 2 == 0 else 1)
        for k in range(lower):
            row = [skew_product(moments, mono[j], polys[k]) for j in range(degree)]
            rhs.append(-skew_product(moments, mono[degree], polys[k]))
            constraints.append(row)
        if degree % 2 == 1:
            gauge_row = [Fraction(0)] * degree
            gauge_row[degree - 1] = Fraction(1)
            constraints.append(gauge_row)
            rhs.append(Fraction(0))
        if degree == 0:
            polys.append(Polynomial.one())
            continue
        coeffs = _solve(constraints, rhs)
        polys.append(Polynomial(coeffs + [Fraction(1)]))
    for n in range(pairs + 1):
        r = skew_product(moments, polys[2 * n], polys[2 * n + 1])
        if r == 0:
            raise SingularConfiguration(f"normalization r_{n} vanishes")
        norms.append(r)
    return SOPFamily(polys, norms, COEFF_GAUGE)


def verify_skew_orthogonality(family: SOPFamily, moments: SkewMoments) -> Report:
    """Check every pairing <q_a|q_b> against the defining pattern."""
    report = Report("orthogonality", {"provenance": moments.provenance})
    count = 2 * family.pairs + 2
    for a in range(count):
        for b in range(a + 1, count):
            value = skew_product(moments, family.polys[a], family.polys[b])
            if a % 2 == 0 and b % 2 == 1 and b == a + 1:
                expected = family.norms[a // 2]
            else:
                expected = Fraction(0)
            report.add(
                f"<q{a}|q{b}>",
                value == expected,
                f"lhs={rat_str(value)} rhs={rat_str(expected)}",
            )
    return report
