"""Tau and sigma functions on the (n, s, t) lattice and the verifiers built
on top of them.

A grid holds, per site (s, t), the moment table obtained by s shifts with
parameter mu followed by t shifts with parameter lambda, and the four
Pfaffian-valued lattice functions

    tau_n    = Pf(0..2n-1)
    tauhat_n = Pf(0..2n, z)
    sigma_n  = Pf(0..2n-2, 2n) + (s*mu + t*lam) * tau_n
    sighat_n = Pf(0..2n-1, 2n+1, z) + (s*mu + t*lam) * tauhat_n

Ratios of these produce the even-degree lattice polynomials q_{2n} =
tauhat_n/tau_n, the coefficient fields of the contiguous relations, and the
phi polynomials of the extended (vector) theory.  Every verifier in this
module checks its identities by exact rational arithmetic; a failed identity
is reported, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .algebra import Polynomial, Rational, RationalLike, rat, rat_str
from .errors import DegreeBudgetExceeded, SingularConfiguration
from .moments import SkewMoments
from .pfaffian import LAMBDA, MU, ZVAR, augmented_pfaffian, numeric_pfaffian
from .report import Report
from .sops import skew_product


@dataclass(frozen=True)
class LatticeConfig:
    """Box parameters: pair index 0..pairs, site range [0,steps_s]x[0,steps_t]."""

    mu: Rational
    lam: Rational
    pairs: int
    steps_s: int
    steps_t: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", rat(self.mu))
        object.__setattr__(self, "lam", rat(self.lam))
        if self.mu == self.lam:
            raise ValueError("lattice parameters mu and lambda must differ")
        if self.pairs < 0 or self.steps_s < 0 or self.steps_t < 0:
            raise ValueError("pairs and step counts must be nonnegative")

    @property
    def required_budget(self) -> int:
        return 2 * self.pairs + self.steps_s + self.steps_t + 4

    def to_json(self) -> dict[str, Any]:
        return {
            "mu": rat_str(self.mu),
            "lambda": rat_str(self.lam),
            "pairs": self.pairs,
            "steps_s": self.steps_s,
            "steps_t": self.steps_t,
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> "LatticeConfig":
        return LatticeConfig(
            rat(data["mu"]),
            rat(data["lambda"]),
            data["pairs"],
            data["steps_s"],
            data["steps_t"],
        )


class TauGrid:
    """Exact tau/sigma data for n = 0..pairs+1 over the (s, t) box."""

    __slots__ = ("config", "base", "tables", "_tau", "_sigma", "_tauhat", "_sighat")

    def __init__(
        self,
        config: LatticeConfig,
        base: SkewMoments,
        tables: dict[tuple[int, int], SkewMoments],
        tau: dict[tuple[int, int, int], Rational],
        sigma: dict[tuple[int, int, int], Rational],
        tauhat: dict[tuple[int, int, int], Polynomial],
        sighat: dict[tuple[int, int, int], Polynomial],
    ):
        self.config = config
        self.base = base
        self.tables = tables
        self._tau = tau
        self._sigma = sigma
        self._tauhat = tauhat
        self._sighat = sighat

    # -- accessors ----------------------------------------------------

    def _key(self, n: int, s: int, t: int) -> tuple[int, int, int]:
        c = self.config
        if not (0 <= n <= c.pairs + 1 and 0 <= s <= c.steps_s and 0 <= t <= c.steps_t):
            raise IndexError(f"lattice point (n={n}, s={s}, t={t}) outside grid")
        return (n, s, t)

    def tau(self, n: int, s: int, t: int) -> Rational:
        return self._tau[self._key(n, s, t)]

    def sigma(self, n: int, s: int, t: int) -> Rational:
        return self._sigma[self._key(n, s, t)]

    def tau_hat(self, n: int, s: int, t: int) -> Polynomial:
        return self._tauhat[self._key(n, s, t)]

    def sigma_hat(self, n: int, s: int, t: int) -> Polynomial:
        return self._sighat[self._key(n, s, t)]

    def moments(self, s: int, t: int) -> SkewMoments:
        return self.tables[(s, t)]

    def q_even(self, n: int, s: int, t: int) -> Polynomial:
        """Monic even-degree lattice SOP q_{2n}^{s,t} = tauhat_n/tau_n."""
        return self.tau_hat(n, s, t).scale(1 / self.tau(n, s, t))

    def phi_even(self, n: int, s: int, t: int) -> Polynomial:
        """phi_{2n}^{s,t} = tauhat_n/sigma_n; undefined where sigma_n = 0."""
        sig = self.sigma(n, s, t)
        if sig == 0:
            raise SingularConfiguration(
                f"sigma_{n} vanishes at site ({s},{t}); phi_{2 * n} undefined"
            )
        return self.tau_hat(n, s, t).scale(1 / sig)

    def phi_odd(self, n: int, s: int, t: int) -> Polynomial:
        """phi_{2n+1}^{s,t} = sighat_n/tau_n."""
        return self.sigma_hat(n, s, t).scale(1 / self.tau(n, s, t))

    def sites(self) -> Iterator[tuple[int, int]]:
        for s in range(self.config.steps_s + 1):
            for t in range(self.config.steps_t + 1):
                yield (s, t)

    def interior_sites(self) -> Iterator[tuple[int, int]]:
        """Sites whose (s+1, t+1) neighbours are still inside the box."""
        for s in range(self.config.steps_s):
            for t in range(self.config.steps_t):
                yield (s, t)

    def degenerate(self) -> "TauGrid":
        """Copy with sigma := tau and sighat := tauhat.

        Collapses the extended (vector) theory onto the scalar one; useful
        for consistency checks of the extended-system verifiers.
        """
        return TauGrid(
            self.config,
            self.base,
            self.tables,
            self._tau,
            dict(self._tau),
            self._tauhat,
            dict(self._tauhat),
        )

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        c = self.config

        def scal(store):
            return [
                [
                    [rat_str(store[(n, s, t)]) for t in range(c.steps_t + 1)]
                    for s in range(c.steps_s + 1)
                ]
                for n in range(c.pairs + 2)
            ]

        def poly(store):
            return [
                [
                    [store[(n, s, t)].to_json() for t in range(c.steps_t + 1)]
                    for s in range(c.steps_s + 1)
                ]
                for n in range(c.pairs + 2)
            ]

        return {
            "config": c.to_json(),
            "base_moments": self.base.to_json(),
            "tau": scal(self._tau),
            "sigma": scal(self._sigma),
            "tau_hat": poly(self._tauhat),
            "sigma_hat": poly(self._sighat),
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> "TauGrid":
        config = LatticeConfig.from_json(data["config"])
        base = SkewMoments.from_json(data["base_moments"])
        tables = _shift_tables(base, config)
        tau: dict[tuple[int, int, int], Rational] = {}
        sigma: dict[tuple[int, int, int], Rational] = {}
        tauhat: dict[tuple[int, int, int], Polynomial] = {}
        sighat: dict[tuple[int, int, int], Polynomial] = {}
        for n in range(config.pairs + 2):
            for s in range(config.steps_s + 1):
                for t in range(config.steps_t + 1):
                    tau[(n, s, t)] = rat(data["tau"][n][s][t])
                    sigma[(n, s, t)] = rat(data["sigma"][n][s][t])
                    tauhat[(n, s, t)] = Polynomial.from_json(data["tau_hat"][n][s][t])
                    sighat[(n, s, t)] = Polynomial.from_json(data["sigma_hat"][n][s][t])
        return TauGrid(config, base, tables, tau, sigma, tauhat, sighat)


def _shift_tables(
    base: SkewMoments, config: LatticeConfig
) -> dict[tuple[int, int], SkewMoments]:
    """Per-site moment tables: s shifts by mu first, then t shifts by lambda."""
    tables: dict[tuple[int, int], SkewMoments] = {(0, 0): base}
    for s in range(1, config.steps_s + 1):
        tables[(s, 0)] = tables[(s - 1, 0)].shift(config.mu)
    for s in range(config.steps_s + 1):
        for t in range(1, config.steps_t + 1):
            tables[(s, t)] = tables[(s, t - 1)].shift(config.lam)
    return tables


def build_grid(moments: SkewMoments, config: LatticeConfig) -> TauGrid:
    """Populate the full box; raises on the first vanishing tau."""
    if moments.max_index < config.required_budget:
        raise DegreeBudgetExceeded(
            f"grid needs a base budget of {config.required_budget}, "
            f"got {moments.max_index}"
        )
    tables = _shift_tables(moments, config)
    tau: dict[tuple[int, int, int], Rational] = {}
    sigma: dict[tuple[int, int, int], Rational] = {}
    tauhat: dict[tuple[int, int, int], Polynomial] = {}
    sighat: dict[tuple[int, int, int], Polynomial] = {}
    for (s, t), table in tables.items():
        offset = s * config.mu + t * config.lam
        for n in range(config.pairs + 2):
            value = numeric_pfaffian(table, range(2 * n))
            if value == 0:
                raise SingularConfiguration(
                    f"tau_{n} vanishes at site ({s},{t})"
                )
            tau[(n, s, t)] = value
            tauhat[(n, s, t)] = augmented_pfaffian(
                table, list(range(2 * n + 1)) + [ZVAR]
            )
            sig_pf = (
                numeric_pfaffian(table, list(range(2 * n - 1)) + [2 * n])
                if n >= 1
                else Fraction(0)
            )
            sigma[(n, s, t)] = sig_pf + offset * value
            sighat[(n, s, t)] = augmented_pfaffian(
                table, list(range(2 * n)) + [2 * n + 1, ZVAR]
            ) + tauhat[(n, s, t)].scale(offset)
    return TauGrid(config, moments, tables, tau, sigma, tauhat, sighat)


# -- single-step Pfaffian crosschecks ----------------------------------


def crosscheck_single_step(grid: TauGrid, n: int, s: int, t: int) -> Report:
    """Compare shift-based lattice values at the three neighbours of (s, t)
    against single augmented Pfaffians over the (s, t) table.

    Twelve identities: one per quantity (tau, tauhat, sigma, sighat) and
    step direction (s+1, t+1, and the diagonal s+1,t+1).  The sigma and
    sighat identities carry a one-step bookkeeping term (mu, lambda, or
    mu+lambda times the stepped tau) on top of the plain Pfaffian.
    """
    c = grid.config
    if not (0 <= n <= c.pairs and s + 1 <= c.steps_s and t + 1 <= c.steps_t):
        raise IndexError(f"crosscheck stencil at (n={n}, s={s}, t={t}) leaves the box")
    mu, lam = c.mu, c.lam
    lm = lam - mu
    table = grid.moments(s, t)
    z_mu = Polynomial((-mu, 1))
    z_lam = Polynomial((-lam, 1))
    z_both = z_mu * z_lam

    def aug(indices) -> Polynomial:
        return augmented_pfaffian(table, indices, mu, lam)

    report = Report(
        "crosscheck",
        {"n": n, "s": s, "t": t, "provenance": grid.base.provenance},
    )
    low = list(range(2 * n))
    full = list(range(2 * n + 1))

    report.add(
        "tau:s+1",
        grid.tau(n, s + 1, t) == aug(full + [MU]).coefficient(0),
    )
    report.add(
        "tau:t+1",
        grid.tau(n, s, t + 1) == aug(full + [LAMBDA]).coefficient(0),
    )
    report.add(
        "tau:s+1,t+1",
        lm * grid.tau(n, s + 1, t + 1)
        == -aug(list(range(2 * n + 2)) + [MU, LAMBDA]).coefficient(0),
    )
    report.add(
        "tauhat:s+1",
        grid.tau_hat(n, s + 1, t) * z_mu
        == -aug(list(range(2 * n + 2)) + [MU, ZVAR]),
    )
    report.add(
        "tauhat:t+1",
        grid.tau_hat(n, s, t + 1) * z_lam
        == -aug(list(range(2 * n + 2)) + [LAMBDA, ZVAR]),
    )
    report.add(
        "tauhat:s+1,t+1",
        grid.tau_hat(n, s + 1, t + 1) * z_both.scale(lm)
        == -aug(list(range(2 * n + 3)) + [MU, LAMBDA, ZVAR]),
    )
    # sigma identities: subtract the stepped site's own (s*mu + t*lam)
    # bookkeeping down to the base site's, leaving a one-step term.
    report.add(
        "sigma:s+1",
        grid.sigma(n, s + 1, t) - (s * mu + t * lam) * grid.tau(n, s + 1, t)
        == aug(low + [2 * n + 1, MU]).coefficient(0),
    )
    report.add(
        "sigma:t+1",
        grid.sigma(n, s, t + 1) - (s * mu + t * lam) * grid.tau(n, s, t + 1)
        == aug(low + [2 * n + 1, LAMBDA]).coefficient(0),
    )
    report.add(
        "sigma:s+1,t+1",
        lm
        * (
            grid.sigma(n, s + 1, t + 1)
            - (s * mu + t * lam) * grid.tau(n, s + 1, t + 1)
        )
        == -aug(list(range(2 * n + 1)) + [2 * n + 2, MU, LAMBDA]).coefficient(0),
    )
    report.add(
        "sighat:s+1",
        (
            grid.sigma_hat(n, s + 1, t)
            - grid.tau_hat(n, s + 1, t).scale(s * mu + t * lam)
        )
        * z_mu
        == -aug(list(range(2 * n + 1)) + [2 * n + 2, MU, ZVAR]),
    )
    report.add(
        "sighat:t+1",
        (
            grid.sigma_hat(n, s, t + 1)
            - grid.tau_hat(n, s, t + 1).scale(s * mu + t * lam)
        )
        * z_lam
        == -aug(list(range(2 * n + 1)) + [2 * n + 2, LAMBDA, ZVAR]),
    )
    report.add(
        "sighat:s+1,t+1",
        (
            grid.sigma_hat(n, s + 1, t + 1)
            - grid.tau_hat(n, s + 1, t + 1).scale(s * mu + t * lam)
        )
        * z_both.scale(lm)
        == -aug(list(range(2 * n + 2)) + [2 * n + 3, MU, LAMBDA, ZVAR]),
    )
    return report


# -- scalar coefficient field ------------------------------------------


class CoefficientField:
    """A, B, C, D per interior site; A only for n >= 1."""

    __slots__ = ("config", "a", "b", "c", "d")

    def __init__(self, config, a, b, c, d):
        self.config = config
        self.a = a
        self.b = b
        self.c = c
        self.d = d


def coefficient_field(grid: TauGrid) -> CoefficientField:
    """Tau-ratio coefficients of the scalar contiguous relations."""
    c = grid.config
    ml = c.mu - c.lam
    a: dict[tuple[int, int, int], Rational] = {}
    b: dict[tuple[int, int, int], Rational] = {}
    cc: dict[tuple[int, int, int], Rational] = {}
    d: dict[tuple[int, int, int], Rational] = {}
    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            down = grid.tau(n, s + 1, t) * grid.tau(n, s, t + 1)
            up = grid.tau(n + 1, s, t) * grid.tau(n, s + 1, t + 1)
            if n >= 1:
                a[(n, s, t)] = (
                    ml * grid.tau(n + 1, s, t) * grid.tau(n - 1, s + 1, t + 1) / down
                )
            b[(n, s, t)] = ml * grid.tau(n, s, t) * grid.tau(n, s + 1, t + 1) / down
            cc[(n, s, t)] = (
                grid.tau(n + 1, s + 1, t) * grid.tau(n, s, t + 1) / (ml * up)
            )
            d[(n, s, t)] = (
                grid.tau(n + 1, s, t + 1) * grid.tau(n, s + 1, t) / (ml * up)
            )
    return CoefficientField(c, a, b, cc, d)


# -- bilinear systems ---------------------------------------------------


def verify_dckp(grid: TauGrid) -> Report:
    """The two bilinear tau/tauhat relations, exact in z at each interior site."""
    c = grid.config
    mu, lam = c.mu, c.lam
    lm = lam - mu
    z_mu = Polynomial((-mu, 1))
    z_lam = Polynomial((-lam, 1))
    z_both = z_mu * z_lam
    report = Report("dckp", {"provenance": grid.base.provenance})
    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            lhs = z_both.scale(lm * grid.tau(n + 1, s, t)) * grid.tau_hat(
                n, s + 1, t + 1
            )
            rhs = (
                z_lam.scale(grid.tau(n + 1, s + 1, t)) * grid.tau_hat(n, s, t + 1)
                - z_mu.scale(grid.tau(n + 1, s, t + 1)) * grid.tau_hat(n, s + 1, t)
                + grid.tau_hat(n + 1, s, t).scale(lm * grid.tau(n, s + 1, t + 1))
            )
            report.add(f"dckp1:n={n},s={s},t={t}", lhs == rhs)
            if n >= 1:
                lhs = grid.tau_hat(n, s, t).scale(lm * grid.tau(n, s + 1, t + 1))
                rhs = (
                    z_mu.scale(grid.tau(n, s, t + 1)) * grid.tau_hat(n, s + 1, t)
                    - z_lam.scale(grid.tau(n, s + 1, t)) * grid.tau_hat(n, s, t + 1)
                    + z_both.scale(lm * grid.tau(n + 1, s, t))
                    * grid.tau_hat(n - 1, s + 1, t + 1)
                )
                report.add(f"dckp2:n={n},s={s},t={t}", lhs == rhs)
    return report


def sample_points(
    count: int, exclude: Sequence[RationalLike] = ()
) -> list[Rational]:
    """Deterministic rational sample pool for pointwise verifications."""
    banned = {rat(x) for x in exclude}
    pool: list[Rational] = [
        Fraction(0),
        Fraction(1),
        Fraction(-1),
        Fraction(2),
        Fraction(-2),
        Fraction(1, 2),
        Fraction(-1, 3),
    ]
    odd = 3
    while len(pool) < count + len(banned):
        pool.append(Fraction(odd))
        odd += 2
    out = [x for x in pool if x not in banned]
    return out[:count]


def verify_slax(grid: TauGrid, samples: Sequence[RationalLike]) -> Report:
    """Both scalar contiguous relations, checked at every sample point."""
    c = grid.config
    pts = [rat(x) for x in samples]
    if len(set(pts)) != len(pts):
        raise ValueError("sample points must be distinct")
    if len(pts) < 2 * c.pairs + 3:
        raise ValueError(f"need at least {2 * c.pairs + 3} sample points")
    field = coefficient_field(grid)
    report = Report(
        "slax",
        {"samples": [rat_str(x) for x in pts], "provenance": grid.base.provenance},
    )
    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            q_st = grid.q_even(n, s, t)
            q_s1 = grid.q_even(n, s + 1, t)
            q_t1 = grid.q_even(n, s, t + 1)
            q_d = grid.q_even(n, s + 1, t + 1)
            q_up = grid.q_even(n + 1, s, t)
            q_prev = grid.q_even(n - 1, s + 1, t + 1) if n >= 1 else None
            b = field.b[(n, s, t)]
            cf = field.c[(n, s, t)]
            d = field.d[(n, s, t)]
            ok1 = True
            ok2 = True
            for z in pts:
                zm, zl = z - c.mu, z - c.lam
                lhs1 = zl * q_t1.eval(z) - zm * q_s1.eval(z)
                rhs1 = b * q_st.eval(z)
                if n >= 1:
                    rhs1 -= zm * zl * field.a[(n, s, t)] * q_prev.eval(z)
                ok1 = ok1 and lhs1 == rhs1
                lhs2 = zm * zl * q_d.eval(z) - q_up.eval(z)
                rhs2 = -zl * cf * q_t1.eval(z) + zm * d * q_s1.eval(z)
                ok2 = ok2 and lhs2 == rhs2
            report.add(f"slax1:n={n},s={s},t={t}", ok1)
            report.add(f"slax2:n={n},s={s},t={t}", ok2)
    return report


def verify_dpfl(field: CoefficientField) -> Report:
    """The scalar nonlinear system: additive balance plus four products."""
    c = field.config
    report = Report("dpfl", {})
    a, b, cc, d = field.a, field.b, field.c, field.d
    for s in range(c.steps_s - 1):
        for t in range(c.steps_t - 1):
            for n in range(1, c.pairs):
                report.add(
                    f"additive:n={n},s={s},t={t}",
                    a[(n, s + 1, t + 1)] - a[(n + 1, s, t)]
                    + b[(n + 1, s, t)] - b[(n, s + 1, t + 1)]
                    == cc[(n, s, t + 1)] - cc[(n, s + 1, t)]
                    + d[(n, s + 1, t)] - d[(n, s, t + 1)],
                )
    for s in range(c.steps_s - 1):
        for t in range(c.steps_t):
            for n in range(1, c.pairs + 1):
                report.add(
                    f"product-ac:n={n},s={s},t={t}",
                    a[(n, s + 1, t)] * cc[(n - 1, s + 1, t)]
                    == a[(n, s, t)] * cc[(n, s, t)],
                )
            for n in range(1, c.pairs):
                report.add(
                    f"product-bd:n={n},s={s},t={t}",
                    b[(n, s + 1, t)] * d[(n, s + 1, t)]
                    == b[(n + 1, s, t)] * d[(n, s, t)],
                )
    for s in range(c.steps_s):
        for t in range(c.steps_t - 1):
            for n in range(1, c.pairs + 1):
                report.add(
                    f"product-ad:n={n},s={s},t={t}",
                    a[(n, s, t + 1)] * d[(n - 1, s, t + 1)]
                    == a[(n, s, t)] * d[(n, s, t)],
                )
            for n in range(1, c.pairs):
                report.add(
                    f"product-bc:n={n},s={s},t={t}",
                    b[(n, s, t + 1)] * cc[(n, s, t + 1)]
                    == b[(n + 1, s, t)] * cc[(n, s, t)],
                )
    return report


# -- 2x2 matrix extension ----------------------------------------------


@dataclass(frozen=True)
class AntiDiagonal:
    """2x2 matrix with zero diagonal, stored as (upper, lower) entries."""

    upper: Rational  # row 0, column 1
    lower: Rational  # row 1, column 0

    def rows(self) -> list[list[Rational]]:
        return [[Fraction(0), self.upper], [self.lower, Fraction(0)]]

    def __add__(self, other: "AntiDiagonal") -> "AntiDiagonal":
        return AntiDiagonal(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other: "AntiDiagonal") -> "AntiDiagonal":
        return AntiDiagonal(self.upper - other.upper, self.lower - other.lower)

    def times(self, other: "AntiDiagonal") -> tuple[Rational, Rational]:
        """Product of two antidiagonal matrices, a diagonal (d00, d11)."""
        return (self.upper * other.lower, self.lower * other.upper)

    def apply(self, vec: tuple[Polynomial, Polynomial]) -> tuple[Polynomial, Polynomial]:
        return (vec[1].scale(self.upper), vec[0].scale(self.lower))


class MatrixCoefficientField:
    """Antidiagonal 2x2 coefficients of the vector contiguous relations."""

    __slots__ = ("config", "a", "b", "c", "d")

    def __init__(self, config, a, b, c, d):
        self.config = config
        self.a = a
        self.b = b
        self.c = c
        self.d = d


def matrix_coefficient_field(grid: TauGrid) -> MatrixCoefficientField:
    """Matrix coefficients per interior site.

    An entry is omitted (not stored) wherever a sigma in its denominator
    vanishes; the verifiers skip relation instances that need missing
    entries.  The origin always has sigma_0 = 0, and random tables can put
    further accidental zeros on the grid.
    """
    c = grid.config
    lm = c.lam - c.mu
    a: dict[tuple[int, int, int], AntiDiagonal] = {}
    b: dict[tuple[int, int, int], AntiDiagonal] = {}
    cc: dict[tuple[int, int, int], AntiDiagonal] = {}
    d: dict[tuple[int, int, int], AntiDiagonal] = {}

    def store(target, key, up_num, up_den, low_num, low_den):
        if up_den != 0 and low_den != 0:
            target[key] = AntiDiagonal(up_num / up_den, low_num / low_den)

    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            tdown = grid.tau(n, s + 1, t) * grid.tau(n, s, t + 1)
            sdown = grid.sigma(n, s + 1, t) * grid.sigma(n, s, t + 1)
            tup = grid.tau(n + 1, s, t) * grid.tau(n, s + 1, t + 1)
            sup = grid.sigma(n + 1, s, t) * grid.sigma(n, s + 1, t + 1)
            if n >= 1:
                store(
                    a,
                    (n, s, t),
                    lm * grid.tau(n + 1, s, t) * grid.tau(n - 1, s + 1, t + 1),
                    sdown,
                    lm * grid.sigma(n + 1, s, t) * grid.sigma(n - 1, s + 1, t + 1),
                    tdown,
                )
            store(
                b,
                (n, s, t),
                lm * grid.tau(n, s, t) * grid.tau(n, s + 1, t + 1),
                sdown,
                lm * grid.sigma(n, s, t) * grid.sigma(n, s + 1, t + 1),
                tdown,
            )
            store(
                cc,
                (n, s, t),
                grid.tau(n + 1, s + 1, t) * grid.tau(n, s, t + 1),
                lm * sup,
                grid.sigma(n + 1, s + 1, t) * grid.sigma(n, s, t + 1),
                lm * tup,
            )
            store(
                d,
                (n, s, t),
                grid.tau(n + 1, s, t + 1) * grid.tau(n, s + 1, t),
                lm * sup,
                grid.sigma(n + 1, s, t + 1) * grid.sigma(n, s + 1, t),
                lm * tup,
            )
    return MatrixCoefficientField(c, a, b, cc, d)


def verify_edckp(grid: TauGrid) -> Report:
    """The four bilinear relations coupling tau/sigma with tauhat/sighat."""
    c = grid.config
    mu, lam = c.mu, c.lam
    lm = lam - mu
    z_mu = Polynomial((-mu, 1))
    z_lam = Polynomial((-lam, 1))
    z_both = z_mu * z_lam
    report = Report("edckp", {"provenance": grid.base.provenance})
    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            if n >= 1:
                lhs = z_both.scale(lm * grid.sigma(n + 1, s, t)) * grid.tau_hat(
                    n - 1, s + 1, t + 1
                )
                rhs = (
                    z_lam.scale(grid.tau(n, s + 1, t)) * grid.sigma_hat(n, s, t + 1)
                    - z_mu.scale(grid.tau(n, s, t + 1)) * grid.sigma_hat(n, s + 1, t)
                    + grid.tau_hat(n, s, t).scale(lm * grid.sigma(n, s + 1, t + 1))
                )
                report.add(f"edckp1:n={n},s={s},t={t}", lhs == rhs)
                lhs = z_both.scale(lm * grid.tau(n + 1, s, t)) * grid.sigma_hat(
                    n - 1, s + 1, t + 1
                )
                rhs = (
                    z_lam.scale(grid.sigma(n, s + 1, t)) * grid.tau_hat(n, s, t + 1)
                    - z_mu.scale(grid.sigma(n, s, t + 1)) * grid.tau_hat(n, s + 1, t)
                    + grid.sigma_hat(n, s, t).scale(lm * grid.tau(n, s + 1, t + 1))
                )
                report.add(f"edckp2:n={n},s={s},t={t}", lhs == rhs)
            lhs = z_both.scale(lm * grid.sigma(n + 1, s, t)) * grid.tau_hat(
                n, s + 1, t + 1
            )
            rhs = (
                z_lam.scale(grid.tau(n + 1, s + 1, t)) * grid.sigma_hat(n, s, t + 1)
                - z_mu.scale(grid.tau(n + 1, s, t + 1)) * grid.sigma_hat(n, s + 1, t)
                + grid.tau_hat(n + 1, s, t).scale(lm * grid.sigma(n, s + 1, t + 1))
            )
            report.add(f"edckp3:n={n},s={s},t={t}", lhs == rhs)
            lhs = z_both.scale(lm * grid.tau(n + 1, s, t)) * grid.sigma_hat(
                n, s + 1, t + 1
            )
            rhs = (
                z_lam.scale(grid.sigma(n + 1, s + 1, t)) * grid.tau_hat(n, s, t + 1)
                - z_mu.scale(grid.sigma(n + 1, s, t + 1)) * grid.tau_hat(n, s + 1, t)
                + grid.sigma_hat(n + 1, s, t).scale(lm * grid.tau(n, s + 1, t + 1))
            )
            report.add(f"edckp4:n={n},s={s},t={t}", lhs == rhs)
    return report


def _phi_vector(
    grid: TauGrid, n: int, s: int, t: int
) -> tuple[Polynomial, Polynomial] | None:
    """Phi_n = (phi_2n, phi_2n+1), or None where sigma_n vanishes."""
    if grid.sigma(n, s, t) == 0:
        return None
    return (grid.phi_even(n, s, t), grid.phi_odd(n, s, t))


def verify_edlax(grid: TauGrid, samples: Sequence[RationalLike]) -> Report:
    """The two vector contiguous relations at sample points, plus per-site
    skew-orthogonality of the phi family.

    Relation instances touching a site where some needed sigma vanishes
    (the origin, where sigma_0 = 0 by construction) are recorded as skipped.
    """
    c = grid.config
    pts = [rat(x) for x in samples]
    if len(set(pts)) != len(pts):
        raise ValueError("sample points must be distinct")
    if len(pts) < 2 * c.pairs + 3:
        raise ValueError(f"need at least {2 * c.pairs + 3} sample points")
    field = matrix_coefficient_field(grid)
    report = Report(
        "edlax",
        {"samples": [rat_str(x) for x in pts], "provenance": grid.base.provenance},
    )

    def vec_eval(vec, z):
        return (vec[0].eval(z), vec[1].eval(z))

    for s, t in grid.interior_sites():
        for n in range(c.pairs + 1):
            tag = f"n={n},s={s},t={t}"
            phi_st = _phi_vector(grid, n, s, t)
            phi_s1 = _phi_vector(grid, n, s + 1, t)
            phi_t1 = _phi_vector(grid, n, s, t + 1)
            phi_d = _phi_vector(grid, n, s + 1, t + 1)
            phi_prev = _phi_vector(grid, n - 1, s + 1, t + 1) if n >= 1 else None
            phi_up = _phi_vector(grid, n + 1, s, t)
            if (
                phi_s1 is None
                or phi_t1 is None
                or phi_st is None
                or (n, s, t) not in field.b
                or (n >= 1 and (phi_prev is None or (n, s, t) not in field.a))
            ):
                report.skip(f"edlax1:{tag}", "sigma vanishes inside the stencil")
            else:
                ok = True
                for z in pts:
                    zm, zl = z - c.mu, z - c.lam
                    lhs = tuple(
                        zl * u - zm * v
                        for u, v in zip(vec_eval(phi_t1, z), vec_eval(phi_s1, z))
                    )
                    bterm = field.b[(n, s, t)].apply(phi_st)
                    rhs = (-bterm[0].eval(z), -bterm[1].eval(z))
                    if n >= 1:
                        extra = field.a[(n, s, t)].apply(phi_prev)
                        rhs = (
                            rhs[0] + zm * zl * extra[0].eval(z),
                            rhs[1] + zm * zl * extra[1].eval(z),
                        )
                    ok = ok and lhs == rhs
                report.add(f"edlax1:{tag}", ok)
            if (
                phi_d is None
                or phi_up is None
                or phi_t1 is None
                or phi_s1 is None
                or (n, s, t) not in field.c
                or (n, s, t) not in field.d
            ):
                report.skip(f"edlax2:{tag}", "sigma vanishes inside the stencil")
            else:
                ok = True
                cterm = field.c[(n, s, t)].apply(phi_t1)
                dterm = field.d[(n, s, t)].apply(phi_s1)
                for z in pts:
                    zm, zl = z - c.mu, z - c.lam
                    lhs = tuple(
                        zm * zl * u - v
                        for u, v in zip(vec_eval(phi_d, z), vec_eval(phi_up, z))
                    )
                    rhs = (
                        zl * cterm[0].eval(z) - zm * dterm[0].eval(z),
                        zl * cterm[1].eval(z) - zm * dterm[1].eval(z),
                    )
                    ok = ok and lhs == rhs
                report.add(f"edlax2:{tag}", ok)
    for s, t in grid.sites():
        table = grid.moments(s, t)
        phis: list[Polynomial | None] = []
        for n in range(c.pairs + 1):
            if grid.sigma(n, s, t) == 0:
                phis.append(None)
            else:
                phis.append(grid.phi_even(n, s, t))
            phis.append(grid.phi_odd(n, s, t))
        for u in range(len(phis)):
            for v in range(u + 1, len(phis)):
                tag = f"phi-orthogonality:<phi{u}|phi{v}>:s={s},t={t}"
                if phis[u] is None or phis[v] is None:
                    report.skip(tag, "phi undefined (sigma vanishes)")
                    continue
                value = skew_product(table, phis[u], phis[v])
                if u % 2 == 0 and v == u + 1:
                    expected = grid.tau(u // 2 + 1, s, t) / grid.sigma(u // 2, s, t)
                else:
                    expected = Fraction(0)
                report.add(tag, value == expected)
        monic = [
            n
            for n in range(c.pairs + 1)
            if phis[2 * n] is not None
            and phis[2 * n].coefficient(2 * n) == 1
        ]
        report.add(
            f"phi-even-defined:s={s},t={t}",
            all(p is not None for p in phis[0::2]) or (s, t) == (0, 0),
            f"monic even indices: {monic}",
        )
    return report


_EDPFL_VARIANTS = ("pattern-swapped", "pattern", "printed", "printed-swapped")


def verify_edpfl(field: MatrixCoefficientField) -> Report:
    """Matrix nonlinear system: the additive balance, then every product
    relation in four index/order variants.

    Because the coefficients are antidiagonal their products do not commute,
    so each relation is tried with both product orders on the right-hand
    side ("-swapped") and with both sets of site indices ("printed" vs the
    scalar-system "pattern").  A relation passes when at least one variant
    holds at every admissible site; the per-variant verdicts go into the
    check details.
    """
    c = field.config
    report = Report("edpfl", {})
    a, b, cc, d = field.a, field.b, field.c, field.d
    for s in range(c.steps_s - 1):
        for t in range(c.steps_t - 1):
            for n in range(1, c.pairs):
                try:
                    ok = (
                        a[(n, s + 1, t + 1)] - a[(n + 1, s, t)]
                        + b[(n + 1, s, t)] - b[(n, s + 1, t + 1)]
                        == cc[(n, s, t + 1)] - cc[(n, s + 1, t)]
                        + d[(n, s + 1, t)] - d[(n, s, t + 1)]
                    )
                except KeyError:
                    report.skip(
                        f"additive:n={n},s={s},t={t}",
                        "coefficient undefined (sigma vanishes)",
                    )
                    continue
                report.add(f"additive:n={n},s={s},t={t}", ok)

    def verdicts(instances) -> tuple[dict[str, bool], dict[str, int]]:
        out = {}
        counts = {}
        for name in _EDPFL_VARIANTS:
            insts = list(instances(name))
            counts[name] = len(insts)
            out[name] = all(
                lhs.times(x) == y.times(z) for lhs, x, y, z in insts
            )
        return out, counts

    def sites_st():
        return [
            (n, s, t)
            for s in range(c.steps_s - 1)
            for t in range(c.steps_t)
            for n in range(1, c.pairs + 1)
        ]

    def sites_ts():
        return [
            (n, s, t)
            for s in range(c.steps_s)
            for t in range(c.steps_t - 1)
            for n in range(1, c.pairs + 1)
        ]

    def add_relation(rel_id: str, instances) -> None:
        table, counts = verdicts(instances)
        if max(counts.values()) == 0:
            report.skip(rel_id, "every instance touches a singular site")
            return
        detail = " ".join(f"{k}={'pass' if v else 'fail'}" for k, v in table.items())
        ok = any(table[name] for name in table if counts[name])
        report.add(rel_id, ok, detail)

    # A-C relation; "printed" shifts the right C to (s+1, t).
    def inst_ac(variant):
        for n, s, t in sites_st():
            try:
                lhs, x = a[(n, s + 1, t)], cc[(n - 1, s + 1, t)]
                rc = cc[(n, s + 1, t)] if "printed" in variant else cc[(n, s, t)]
                ra = a[(n, s, t)]
            except KeyError:
                continue
            if "swapped" in variant:
                yield lhs, x, rc, ra
            else:
                yield lhs, x, ra, rc

    add_relation("product-ac", inst_ac)

    # A-D relation; printed and pattern indices coincide here.
    def inst_ad(variant):
        for n, s, t in sites_ts():
            try:
                lhs, x = a[(n, s, t + 1)], d[(n - 1, s, t + 1)]
                ra, rd = a[(n, s, t)], d[(n, s, t)]
            except KeyError:
                continue
            if "swapped" in variant:
                yield lhs, x, rd, ra
            else:
                yield lhs, x, ra, rd

    add_relation("product-ad", inst_ad)

    def inst_bd(variant):
        for s in range(c.steps_s - 1):
            for t in range(c.steps_t):
                for n in range(1, c.pairs):
                    try:
                        lhs, x = b[(n, s + 1, t)], d[(n, s + 1, t)]
                        rb, rd = b[(n + 1, s, t)], d[(n, s, t)]
                    except KeyError:
                        continue
                    if "swapped" in variant:
                        yield lhs, x, rd, rb
                    else:
                        yield lhs, x, rb, rd

    add_relation("product-bd", inst_bd)

    # B-C relation; "printed" replaces both C factors by D.
    def inst_bc(variant):
        for s in range(c.steps_s):
            for t in range(c.steps_t - 1):
                for n in range(1, c.pairs):
                    left = d if "printed" in variant else cc
                    try:
                        lhs, x = b[(n, s, t + 1)], left[(n, s, t + 1)]
                        rb, rl = b[(n + 1, s, t)], left[(n, s, t)]
                    except KeyError:
                        continue
                    if "swapped" in variant:
                        yield lhs, x, rl, rb
                    else:
                        yield lhs, x, rb, rl

    add_relation("product-bc", inst_bc)
    return report
