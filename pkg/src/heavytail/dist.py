"""Heavy-tailed innovation laws with exact quantiles and truncated moments.

The only family implemented is the two-sided Pareto law

    P{X > x} = p x**-alpha,   P{X < -x} = q x**-alpha,   x >= 1,

with no mass in (-1, 1). It lies in the domain of attraction of an
alpha-stable law with tail balance (p, q), and every truncated power moment
has a closed form, so the Karamata asymptotics become exact ratios.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._streams import SeedLike, make_rng

__all__ = [
    "DomainError",
    "TailBalancedLaw",
    "TruncationWindow",
    "TruncatedMoments",
    "cdf",
    "survival",
    "quantile",
    "star_quantile",
    "sample",
    "partial_moment",
    "centering_integral",
    "truncated_moments",
    "karamata_asymptote",
    "truncation_window",
]

FAMILIES = ("TwoSidedPareto",)


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


@dataclass(frozen=True)
class TailBalancedLaw:
    alpha: float
    p: float = 0.5
    family: str = "TwoSidedPareto"

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise DomainError("alpha must lie in (0,2)")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError("p must lie in [0,1]")
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def is_symmetric(self) -> bool:
        return self.p == 0.5

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TailBalancedLaw":
        return cls(alpha=float(data["alpha"]), p=float(data.get("p", 0.5)),
                   family=data.get("family", "TwoSidedPareto"))


@dataclass(frozen=True)
class TruncationWindow:
    """Cut points ``a_n < 0 < b_n`` with ``b_n = F^{<-}(1 - m_n/n)``."""

    a_n: float
    b_n: float
    m_n: float
    n: int

    def __post_init__(self):
        if not self.a_n < 0.0 < self.b_n:
            raise DomainError("window must satisfy a_n < 0 < b_n")
        if not 1.0 <= self.m_n <= self.n:
            raise DomainError("m_n must lie in [1, n]")


@dataclass(frozen=True)
class TruncatedMoments:
    mu: float
    sigma2: float
    mu_plus: float
    mu_minus: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def cdf(law: TailBalancedLaw, x):
    x = np.asarray(x, dtype=float)
    a = law.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        left = law.q * np.abs(x) ** -a
        right = 1.0 - law.p * x ** -a
    out = np.where(x <= -1.0, left, np.where(x < 1.0, law.q, right))
    return out[()] if out.ndim == 0 else out


def survival(law: TailBalancedLaw, x):
    """``1 - F(x)`` evaluated without cancellation in the upper tail."""
    x = np.asarray(x, dtype=float)
    a = law.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        left = 1.0 - law.q * np.abs(x) ** -a
        right = law.p * x ** -a
    out = np.where(x <= -1.0, left, np.where(x < 1.0, law.p, right))
    return out[()] if out.ndim == 0 else out


def _check_unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError("u must lie in the open interval (0,1)")
    return u


def quantile(law: TailBalancedLaw, u):
    """Left-continuous quantile ``inf{x : F(x) >= u}``.

    On the central gap, i.e. when ``u == q``, the left endpoint ``-1`` is
    returned.
    """
    u = _check_unit(u)
    a, p, q = law.alpha, law.p, law.q
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = -((q / u) ** (1.0 / a))
        upper = (p / (1.0 - u)) ** (1.0 / a)
    out = np.where(u <= q, lower, upper)
    return out[()] if out.ndim == 0 else out


def star_quantile(law: TailBalancedLaw, u):
    """Quantile of ``|X|``, whose survival function is ``x**-alpha`` on x >= 1."""
    u = _check_unit(u)
    out = (1.0 - u) ** (-1.0 / law.alpha)
    return out[()] if out.ndim == 0 else out


def sample(law: TailBalancedLaw, stream: SeedLike, count: int) -> np.ndarray:
    """I.i.d. draws by inverse transform; deterministic given the stream state."""
    if count < 0:
        raise DomainError("count must be nonnegative")
    rng = make_rng(stream)
    u = rng.random(count)
    # random() may return exactly 0, which has no finite quantile
    u = np.where(u > 0.0, u, np.nextafter(0.0, 1.0))
    if count == 0:
        return np.empty(0)
    return np.asarray(quantile(law, u), dtype=float)


def _power_integral(s: float, lo: float, hi: float) -> float:
    """``int_lo^hi y**(s-1) dy`` for 1 <= lo <= hi <= inf."""
    if hi <= lo:
        return 0.0
    if s == 0.0:
        return math.log(hi / lo) if math.isfinite(hi) else math.inf
    if math.isinf(hi):
        return -(lo ** s) / s if s < 0.0 else math.inf
    return (hi ** s - lo ** s) / s


def partial_moment(law: TailBalancedLaw, r: int, lo: float, hi: float) -> float:
    """Oriented integral ``int_lo^hi x**r dF(x)`` in closed form.

    The integral is taken over the closed interval; F has no atoms, so the
    endpoint convention is immaterial. When ``lo > hi`` the sign flips.
    """
    if lo > hi:
        return -partial_moment(law, r, hi, lo)
    a = law.alpha
    s = r - a
    total = 0.0
    if law.p > 0.0 and hi > 1.0:
        total += law.p * a * _power_integral(s, max(lo, 1.0), hi)
    if law.q > 0.0 and lo < -1.0:
        sign = -1.0 if r % 2 else 1.0
        total += sign * law.q * a * _power_integral(s, max(-hi, 1.0), -lo)
    return total


def centering_integral(law: TailBalancedLaw, n: float) -> float:
    """``int_{F^{<-}(1/n)}^{F^{<-}(1-1/n)} x dF(x)``, the centering constant."""
    if n <= 1:
        raise DomainError("n must exceed 1")
    return partial_moment(law, 1, float(quantile(law, 1.0 / n)),
                          float(quantile(law, 1.0 - 1.0 / n)))


def truncated_moments(law: TailBalancedLaw, window: TruncationWindow) -> TruncatedMoments:
    """Mean and variance of ``X 1[a_n, b_n](X)`` and the two tail means.

    ``mu_plus`` integrates over ``(b_n, F^{<-}(1-1/n))`` and ``mu_minus`` over
    ``(F^{<-}(1/n), a_n)``, both as oriented integrals so that
    ``mu + mu_plus + mu_minus`` always equals :func:`centering_integral`.
    """
    if window.b_n <= 1.0:
        raise DomainError("degenerate window: b_n must exceed 1")
    a_n, b_n, n = window.a_n, window.b_n, window.n
    mu = partial_moment(law, 1, a_n, b_n)
    second = partial_moment(law, 2, a_n, b_n)
    sigma2 = max(second - mu * mu, 0.0)
    top = float(quantile(law, 1.0 - 1.0 / n))
    bottom = float(quantile(law, 1.0 / n))
    mu_plus = partial_moment(law, 1, b_n, top)
    mu_minus = partial_moment(law, 1, bottom, a_n)
    return TruncatedMoments(mu=mu, sigma2=sigma2, mu_plus=mu_plus, mu_minus=mu_minus)


def karamata_asymptote(law: TailBalancedLaw, window: TruncationWindow) -> float:
    """Asymptotic equivalent ``alpha/(2-alpha) (a^2 F(a) + b^2 Fbar(b))`` of sigma_n^2."""
    a = law.alpha
    if a >= 2.0:
        raise DomainError("alpha = 2 is outside the heavy-tailed range")
    lo, hi = window.a_n, window.b_n
    return a / (2.0 - a) * (lo * lo * float(cdf(law, lo)) + hi * hi * float(survival(law, hi)))


def truncation_window(law: TailBalancedLaw, n: int, theta: float = 0.3) -> TruncationWindow:
    """Power-rule window ``m_n = n**theta``."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if not 0.0 < theta < 1.0:
        raise DomainError("theta must lie in (0,1)")
    m = float(n) ** theta
    u = 1.0 - m / n
    b = float(quantile(law, u))
    a = -float(star_quantile(law, u))
    if b <= 0.0:
        raise DomainError("degenerate window: no right tail mass above 1 - m_n/n")
    return TruncationWindow(a_n=a, b_n=b, m_n=m, n=int(n))
