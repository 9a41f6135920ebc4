"""Skew-moment tables s_ij = <z^i | z^j> and their discrete time evolution.

Constructors cover generic random tables (for property sweeps) and the two
random-matrix ensemble products evaluated on exact discrete measures, so
every moment is rational.  The one-step :func:`shift` realizes the modified
product <(z-c).|(z-c).> and consumes one unit of the index budget.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .algebra import Rational, RationalLike, rat, rat_str
from .errors import DegreeBudgetExceeded
from . import pfaffian


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported measure with rational nodes and positive weights."""

    nodes: tuple[Rational, ...]
    weights: tuple[Rational, ...]

    def __init__(self, nodes: Sequence[RationalLike], weights: Sequence[RationalLike]):
        ns = tuple(rat(x) for x in nodes)
        ws = tuple(rat(w) for w in weights)
        if len(ns) != len(ws):
            raise ValueError("node count must equal weight count")
        if any(a >= b for a, b in zip(ns, ns[1:])):
            raise ValueError("nodes must be strictly increasing")
        if any(w <= 0 for w in ws):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "nodes", ns)
        object.__setattr__(self, "weights", ws)


class SkewMoments:
    """Immutable table of skew moments for 0 <= i < j <= max_index."""

    __slots__ = ("max_index", "_upper", "provenance")

    def __init__(
        self,
        max_index: int,
        entries: Sequence[Sequence[RationalLike]],
        provenance: dict[str, Any] | None = None,
    ):
        if max_index < 0:
            raise ValueError("max_index must be nonnegative")
        self.max_index = max_index
        self._upper = tuple(
            tuple(rat(entries[i][j - i - 1]) for j in range(i + 1, max_index + 1))
            for i in range(max_index + 1)
        )
        self.provenance = provenance or {"kind": "unspecified"}

    def entry(self, i: int, j: int) -> Rational:
        """s_ij with the lower triangle implied by skew-symmetry."""
        if not (0 <= i <= self.max_index and 0 <= j <= self.max_index):
            raise DegreeBudgetExceeded(
                f"moment index ({i},{j}) outside budget {self.max_index}"
            )
        if i == j:
            return Fraction(0)
        if i < j:
            return self._upper[i][j - i - 1]
        return -self._upper[j][i - j - 1]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SkewMoments)
            and self.max_index == other.max_index
            and self._upper == other._upper
        )

    def __hash__(self) -> int:
        return hash((self.max_index, self._upper))

    def shift(self, c: RationalLike) -> "SkewMoments":
        """Moment table of <(z-c).|(z-c).>; budget drops by one."""
        if self.max_index < 1:
            raise DegreeBudgetExceeded("cannot shift a table with max_index 0")
        c = rat(c)
        m = self.max_index - 1
        entries = [
            [
                self.entry(i + 1, j + 1)
                - c * self.entry(i + 1, j)
                - c * self.entry(i, j + 1)
                + c * c * self.entry(i, j)
                for j in range(i + 1, m + 1)
            ]
            for i in range(m + 1)
        ]
        prov = dict(self.provenance)
        prov["shifts"] = list(prov.get("shifts", [])) + [rat_str(c)]
        return SkewMoments(m, entries, prov)

    def scale(self, c: RationalLike) -> "SkewMoments":
        """Rescale every moment by a nonzero constant."""
        c = rat(c)
        if c == 0:
            raise ValueError("scale factor must be nonzero")
        entries = [
            [c * v for v in row] for row in self._upper
        ]
        prov = dict(self.provenance)
        prov["scaled_by"] = rat_str(c)
        return SkewMoments(self.max_index, entries, prov)

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        entries = []
        for i in range(self.max_index + 1):
            for j in range(i + 1, self.max_index + 1):
                v = self.entry(i, j)
                if v != 0:
                    entries.append([i, j, rat_str(v)])
        return {
            "max_index": self.max_index,
            "entries": entries,
            "provenance": self.provenance,
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> "SkewMoments":
        m = data["max_index"]
        table = [[Fraction(0)] * (m - i) for i in range(m + 1)]
        for i, j, v in data["entries"]:
            if not 0 <= i < j <= m:
                raise ValueError(f"bad entry index ({i},{j})")
            table[i][j - i - 1] = rat(v)
        return SkewMoments(m, table, data.get("provenance"))


def from_random(seed: int, max_index: int, bound: int = 10) -> SkewMoments:
    """Deterministic random table in generic position.

    If the leading 4x4 Pfaffian vanishes (so downstream denominators would be
    singular) the draw is retried with an incremented sub-seed; the retry
    count is recorded in the provenance.
    """
    if max_index < 1:
        raise ValueError("max_index must be at least 1")
    if bound < 1:
        raise ValueError("bound must be positive")
    for attempt in range(1000):
        rng = random.Random(seed * 1000003 + attempt)
        entries = [
            [
                Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
                for _ in range(i + 1, max_index + 1)
            ]
            for i in range(max_index + 1)
        ]
        table = SkewMoments(
            max_index,
            entries,
            {"kind": "random", "seed": seed, "bound": bound, "attempt": attempt},
        )
        if max_index < 3:
            return table
        if pfaffian.numeric_pfaffian(table, range(4)) != 0:
            return table
    raise RuntimeError("could not reach generic position")  # pragma: no cover


def from_discrete_orthogonal(measure: DiscreteMeasure, max_index: int) -> SkewMoments:
    """Orthogonal-ensemble product on a discrete measure.

    s_ij = sum_{k,l} sgn(x_k - x_l) x_k^i x_l^j w_k w_l, with sgn(0) = 0;
    evaluated as the ordered double sum over k > l.
    """
    xs, ws = measure.nodes, measure.weights
    powers = [[x**p for p in range(max_index + 1)] for x in xs]
    entries = []
    for i in range(max_index + 1):
        row = []
        for j in range(i + 1, max_index + 1):
            total = Fraction(0)
            for k in range(len(xs)):
                for l in range(k):
                    total += (
                        powers[k][i] * powers[l][j] - powers[l][i] * powers[k][j]
                    ) * ws[k] * ws[l]
            row.append(total)
        entries.append(row)
    return SkewMoments(
        max_index,
        entries,
        {
            "kind": "orthogonal",
            "nodes": [rat_str(x) for x in xs],
            "weights": [rat_str(w) for w in ws],
        },
    )


def from_discrete_symplectic(measure: DiscreteMeasure, max_index: int) -> SkewMoments:
    """Symplectic-ensemble product on a discrete measure.

    s_ij = sum_k (x_k^i (x_k^j)' - (x_k^i)' x_k^j) w_k = (j - i) m_{i+j-1}
    with power sums m_p = sum_k x_k^p w_k.
    """
    xs, ws = measure.nodes, measure.weights
    msums = [
        sum((x**p * w for x, w in zip(xs, ws)), Fraction(0))
        for p in range(2 * max_index)
    ]
    entries = [
        [(j - i) * msums[i + j - 1] for j in range(i + 1, max_index + 1)]
        for i in range(max_index + 1)
    ]
    return SkewMoments(
        max_index,
        entries,
        {
            "kind": "symplectic",
            "nodes": [rat_str(x) for x in xs],
            "weights": [rat_str(w) for w in ws],
        },
    )


def shift(moments: SkewMoments, c: RationalLike) -> SkewMoments:
    return moments.shift(c)
