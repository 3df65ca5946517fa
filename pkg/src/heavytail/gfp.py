"""Coefficient engine for (g,F)-processes.

FARIMA coefficients are the power-series coefficients of
``(1 - x)**-gamma * Theta(x) / Phi(x)``. Besides generating them this module
provides partial sums, diagnostics of normalized regular variation, the
centering sequence, and an oracle for the second-order expansion
``g_n ~ n**(d-1) P_m(1/n) / Gamma(d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, special

from . import dist
from .dist import DomainError, TailBalancedLaw
from .kernels import StepKernel

__all__ = [
    "UnsupportedOrder",
    "FarimaSpec",
    "CoeffSeries",
    "ExpansionOracle",
    "binomial_coeffs",
    "farima_coeffs",
    "partial_sums",
    "transfer_value",
    "expansion_oracle",
    "gamma_ratio_check",
    "expansion_residual",
    "nrv_defect",
    "increment_sup",
    "centering_sequence",
    "coefficient_kernel",
]

ROOT_TOL = 1e-8
OVERFLOW_GUARD = 1e300
MOMENT_RTOL = 1e-15
PRODUCT_LIMIT = 10 ** 7


class UnsupportedOrder(NotImplementedError):
    """Expansion order beyond the implemented closed forms."""


def _poly(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.ndim != 1 or c.size == 0:
        raise DomainError("polynomial needs at least one coefficient")
    return c


@dataclass(frozen=True)
class FarimaSpec:
    """``gamma`` with ascending coefficient lists for Theta and Phi."""

    gamma: float
    theta: tuple = (1.0,)
    phi: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(v) for v in _poly(self.theta)))
        object.__setattr__(self, "phi", tuple(float(v) for v in _poly(self.phi)))
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if abs(sum(self.theta)) == 0.0:
            raise DomainError("Theta(1) must be nonzero")
        if self.phi[0] == 0.0:
            raise DomainError("Phi(0) must be nonzero")
        roots = np.roots(self.phi[::-1]) if len(self.phi) > 1 else np.empty(0)
        if roots.size and np.min(np.abs(roots)) <= 1.0 + ROOT_TOL:
            raise DomainError("Phi must have all roots outside the closed unit disk")

    @property
    def theta_at_one(self) -> float:
        return float(sum(self.theta))

    @property
    def phi_at_one(self) -> float:
        return float(sum(self.phi))

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "theta": list(self.theta), "phi": list(self.phi)}

    @classmethod
    def from_dict(cls, data: dict) -> "FarimaSpec":
        return cls(float(data["gamma"]), tuple(data.get("theta", (1.0,))),
                   tuple(data.get("phi", (1.0,))))


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    g: np.ndarray
    gamma_hint: float | None = None
    _cumsum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("coefficient series must be a nonempty vector")
        if not np.all(np.isfinite(g)):
            raise DomainError("coefficients must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        cs = np.concatenate(([0.0], np.cumsum(g)))
        cs.setflags(write=False)
        object.__setattr__(self, "_cumsum", cs)

    @property
    def horizon(self) -> int:
        """Largest computed index N."""
        return self.g.size - 1

    def __len__(self) -> int:
        return self.g.size

    def __getitem__(self, k):
        return self.g[k]


@dataclass(frozen=True)
class ExpansionOracle:
    d: float
    m: int
    q_coeffs: tuple
    Q_coeffs: tuple
    A_moments: tuple
    P_coeffs: tuple

    def h(self, x):
        """``sum_j Q_j x**(d-1-j)``, the expansion of Gamma(x+d)/Gamma(x+1)."""
        x = np.asarray(x, dtype=float)
        return sum(Q * x ** (self.d - 1.0 - j) for j, Q in enumerate(self.Q_coeffs))

    def P(self, x):
        """Polynomial ``P_m`` with coefficients ``P_coeffs`` (ascending)."""
        x = np.asarray(x, dtype=float)
        return sum(c * x ** j for j, c in enumerate(self.P_coeffs))


def _binomial_log(d: float, N: int) -> np.ndarray:
    k = np.arange(N + 1, dtype=float)
    logabs = special.gammaln(k + d) - special.gammaln(k + 1) - special.gammaln(d)
    sign = special.gammasgn(k + d) * special.gammasgn(d)
    with np.errstate(over="ignore"):
        return sign * np.exp(logabs)


def binomial_coeffs(d: float, N: int) -> CoeffSeries:
    """Coefficients of ``(1 - x)**-d`` up to order N."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    if d <= 0 and float(d).is_integer():
        raise DomainError("d must not be a nonpositive integer")
    if d > 0 and float(d).is_integer() and N + d < 2 ** 20:
        # g_k = prod_{1 <= j < d} (k + j)/j is computed exactly in integers
        k = np.arange(N + 1, dtype=float)
        g = np.ones(N + 1)
        for j in range(1, int(d)):
            g = g * (k + j) / j
        return CoeffSeries(g, gamma_hint=float(d))
    k = np.arange(N, dtype=float)
    ratios = (k + d) / (k + 1.0)
    g = np.concatenate(([1.0], np.cumprod(ratios)))
    if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > OVERFLOW_GUARD:
        g = _binomial_log(d, N)
        if not np.all(np.isfinite(g)):
            raise OverflowError("binomial coefficients overflow double precision")
    return CoeffSeries(g, gamma_hint=float(d))


def farima_coeffs(spec: FarimaSpec, N: int) -> CoeffSeries:
    """Series coefficients of ``(1-x)**-gamma Theta(x)/Phi(x)`` to order N."""
    b = binomial_coeffs(spec.gamma, N).g
    if spec.theta == (1.0,) and spec.phi == (1.0,):
        return CoeffSeries(b, gamma_hint=spec.gamma)
    num = np.convolve(b, spec.theta)[: N + 1]
    g = signal.lfilter([1.0], spec.phi, num)
    return CoeffSeries(g, gamma_hint=spec.gamma)


def partial_sums(coeffs: CoeffSeries, x):
    """``g_[0,x) = sum_{0 <= i < x} g_i``; vectorized in ``x``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    count = np.ceil(x).astype(np.int64)
    if np.any(count > coeffs.g.size):
        raise IndexError("x lies beyond the computed horizon")
    out = coeffs._cumsum[count]
    return out[()] if out.ndim == 0 else out


def transfer_value(spec: FarimaSpec, x: float) -> float:
    """The generating function ``(1-x)**-gamma Theta(x)/Phi(x)`` at ``|x| < 1``."""
    th = np.polynomial.polynomial.polyval(x, spec.theta)
    ph = np.polynomial.polynomial.polyval(x, spec.phi)
    return float((1.0 - x) ** -spec.gamma * th / ph)


def _series_power(c: np.ndarray, d: float, order: int) -> np.ndarray:
    """Coefficients of ``c(t)**d`` for ``c_0 = 1``."""
    out = np.zeros(order + 1)
    out[0] = 1.0
    for n in range(1, order + 1):
        acc = 0.0
        for k in range(1, n + 1):
            acc += ((d + 1.0) * k - n) * c[k] * out[n - k]
        out[n] = acc / n
    return out


def _q_series(d: float, order: int) -> np.ndarray:
    """Taylor coefficients q_j of ``(t / (1 - e^{-t}))**d``.

    Computed from the Bernoulli series of ``t/(e^t - 1)`` raised to the power
    d, followed by the sign flip ``t -> -t``.
    """
    bern = np.array([special.bernoulli(order)[j] / math.factorial(j) for j in range(order + 1)])
    g = _series_power(bern, d, order)
    return np.array([(-1.0) ** j * g[j] for j in range(order + 1)])


def _falling(x: float, p: int) -> float:
    out = 1.0
    for i in range(p):
        out *= x - i
    return out


def _a_series(spec: FarimaSpec, horizon: int | None = None) -> np.ndarray:
    """Coefficients of ``A = Theta/Phi`` truncated once the tail is negligible."""
    th, ph = np.asarray(spec.theta), np.asarray(spec.phi)
    if ph.size == 1:
        return th / ph[0]
    horizon = horizon or 256
    while True:
        impulse = np.zeros(horizon)
        impulse[: th.size] = th
        a = signal.lfilter([1.0], ph, impulse)
        k = np.arange(horizon, dtype=float)
        weight = np.abs(a) * np.maximum(k, 1.0) ** 2
        if weight[-1] < MOMENT_RTOL * max(np.sum(weight), 1e-300):
            # trim the negligible tail
            mask = weight >= MOMENT_RTOL * np.sum(weight) * 1e-3
            last = int(np.nonzero(mask)[0][-1]) if mask.any() else 0
            return a[: max(last + 1, th.size)]
        horizon *= 2
        if horizon > 1 << 22:
            raise DomainError("A-series does not decay fast enough")


def expansion_oracle(spec: FarimaSpec, d: float | None = None, m: int = 1) -> ExpansionOracle:
    """Expansion of the coefficients of ``(1 - x)**-d A(x)`` with ``A = Theta/Phi``.

    Returns the q_j, Q_j and A-moments as well as the polynomial ``P_m`` with
    ``g_n = n**(d-1) (P_m(1/n) + o(n**-m)) / Gamma(d)``. For ``m = 1``,
    ``P_1(x) = A(1) + (d-1)((d/2)A(1) - A'(1)) x``.
    """
    d = spec.gamma if d is None else float(d)
    if d <= 1.0:
        raise DomainError("the expansion requires d > 1")
    if m < 1:
        raise DomainError("m must be at least 1")
    if m > 2:
        raise UnsupportedOrder("expansion implemented only for m in {1, 2}")
    q = _q_series(d, m)
    Q = np.array([_falling(d - 1.0, j) * q[j] for j in range(m + 1)])
    a = _a_series(spec)
    k = np.arange(a.size, dtype=float)
    moments = np.array([np.sum(k ** p * a) for p in range(m + 1)])
    # coefficient of x^j collects A_k (k/n)^p against Q_{j-p}
    P = []
    for j in range(m + 1):
        c = 0.0
        for p in range(j + 1):
            c += ((-1.0) ** p / math.factorial(p)) * moments[p] * Q[j - p] \
                * _falling(d - 1.0 - (j - p), p)
        P.append(c)
    return ExpansionOracle(d=d, m=m, q_coeffs=tuple(q), Q_coeffs=tuple(Q),
                           A_moments=tuple(moments), P_coeffs=tuple(P))


def _gamma_ratio(d: float, k: float) -> float:
    """``Gamma(k+d)/Gamma(k+1)``.

    For integer k this is ``Gamma(d) prod_{j<k} (1 + (d-1)/(j+1))`` with the
    logarithms summed exactly; forming ``k + d`` in floating point would
    otherwise cost about ``k eps log k`` in relative accuracy.
    """
    if float(k).is_integer() and float(d).is_integer() and d >= 1:
        return float(math.prod(k + j for j in range(1, int(d))))
    if float(k).is_integer() and k <= PRODUCT_LIMIT:
        j = np.arange(int(k), dtype=float)
        return float(special.gamma(d) * math.exp(math.fsum(np.log1p((d - 1.0) / (j + 1.0)))))
    return float(np.exp(special.gammaln(k + d) - special.gammaln(k + 1.0)))


def gamma_ratio_check(d: float, m: int, k) -> tuple:
    """``(Gamma(k+d)/Gamma(k+1), h_m(k))``."""
    if m > 2:
        raise UnsupportedOrder("expansion implemented only for m in {1, 2}")
    if m < 1:
        raise DomainError("m must be at least 1")
    karr = np.asarray(k, dtype=float)
    if np.any(karr < 1):
        raise DomainError("k must be at least 1")
    exact = np.array([_gamma_ratio(d, float(v)) for v in karr.ravel()]).reshape(karr.shape)
    q = _q_series(d, m)
    Q = [_falling(d - 1.0, j) * q[j] for j in range(m + 1)]
    approx = sum(Qj * karr ** (d - 1.0 - j) for j, Qj in enumerate(Q))
    if karr.ndim == 0:
        return float(exact), float(approx)
    return exact, approx


def expansion_residual(spec: FarimaSpec, d: float | None, m: int, n,
                       coeffs: CoeffSeries | None = None):
    """``e_m(n) = (g_n - n**(d-1) P_m(1/n) / Gamma(d)) / n**(d-1-m)``."""
    oracle = expansion_oracle(spec, d, m)
    d = oracle.d
    n = np.asarray(n)
    top = int(np.max(n))
    if coeffs is None:
        coeffs = farima_coeffs(spec, top)
    if top > coeffs.horizon:
        raise IndexError("n lies beyond the computed horizon")
    nf = n.astype(float)
    pred = sum(c * nf ** (d - 1.0 - j) for j, c in enumerate(oracle.P_coeffs)) / special.gamma(d)
    out = (coeffs.g[n] - pred) / nf ** (d - 1.0 - m)
    return out[()] if np.ndim(out) == 0 else out


def nrv_defect(coeffs: CoeffSeries, gamma: float) -> np.ndarray:
    """``d_n = n (g_{n+1}/g_n - 1) - (gamma - 1)`` for n = 1..N-1.

    Entries where ``g_n = 0`` are NaN.
    """
    g = coeffs.g
    if g.size < 3:
        return np.empty(0)
    n = np.arange(1, g.size - 1, dtype=float)
    cur, nxt = g[1:-1], g[2:]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * (nxt / cur - 1.0) - (gamma - 1.0)
    out[cur == 0.0] = np.nan
    return out


def increment_sup(coeffs: CoeffSeries, r: int, n: int | None = None) -> float:
    """``Omega_n(r) = max_{0 <= j <= n-r} |g_{j+r} - g_j|``."""
    n = coeffs.horizon if n is None else int(n)
    if not 0 <= r <= n:
        raise DomainError("r must lie in [0, n]")
    if n > coeffs.horizon:
        raise IndexError("n lies beyond the computed horizon")
    if r == 0:
        return 0.0
    g = coeffs.g[: n + 1]
    return float(np.max(np.abs(g[r:] - g[:-r])))


def centering_sequence(law: TailBalancedLaw, coeffs: CoeffSeries, n: int) -> np.ndarray:
    """``c_{n,k} = g_[0,k) C_n`` for k = 0..n with C_n the central mean."""
    if n > coeffs.g.size:
        raise IndexError("n lies beyond the computed horizon")
    c = dist.centering_integral(law, n)
    return coeffs._cumsum[: n + 1] * c


def coefficient_kernel(coeffs: CoeffSeries, n: int, normalize: bool = False) -> StepKernel:
    """Step kernel with grid values ``g_i`` (or ``n g_i / g_[0,n)``) for i = 0..n."""
    if n > coeffs.horizon:
        raise IndexError("n lies beyond the computed horizon")
    values = np.array(coeffs.g[: n + 1])
    if normalize:
        total = coeffs._cumsum[n]
        if total == 0.0:
            raise DomainError("g_[0,n) vanishes; cannot normalize")
        values = n * values / total
    return StepKernel(values)
