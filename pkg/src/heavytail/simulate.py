"""Path simulation, the middle/extreme decomposition and LePage series.

Paths live on the grid ``i/n``, ``0 <= i <= n``:

    S_bar(i/n) = sum_{1 <= j <= i} kbar((i - j)/n) X_j,
    s_bar(i/n) = C_n sum_{0 <= l < i} kbar(l/n),

with ``C_n`` the mean of X restricted to ``[F^{<-}(1/n), F^{<-}(1-1/n)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from . import dist
from ._streams import SeedLike, make_rng, seed_sequence
from .dist import DomainError, TailBalancedLaw, TruncatedMoments, TruncationWindow
from .kernels import InterpKernel, LimitKernel, StepKernel

__all__ = [
    "PathBundle",
    "Decomposition",
    "LePagePath",
    "kernel_grid",
    "causal_convolve",
    "simulate_path",
    "path_from_innovations",
    "decompose",
    "identity_residual",
    "middle_values",
    "middle_variance",
    "lepage_series",
    "lepage_levy",
    "fractional_levy",
    "levy_drift",
    "strict_part",
    "scaling_check",
    "rescaled_process",
    "path_table",
]

METHODS = ("direct", "fft")
ATOM_CHUNK = 4096
DEFAULT_DEPTH = 1e4


def kernel_grid(kernel, n: int) -> np.ndarray:
    """Weights ``kbar(l/n)`` for l = 0..n-1."""
    if isinstance(kernel, (StepKernel, InterpKernel)) and kernel.n == n:
        return np.array(kernel.values[:n], dtype=float)
    v = np.asarray(kernel(np.arange(n) / n), dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("kernel is not finite on the grid; sample it first")
    return v


def causal_convolve(v: np.ndarray, x: np.ndarray, method: str = "direct") -> np.ndarray:
    """``y_i = sum_{1 <= j <= i} v[i-j] x_j`` for i = 1..len(x)."""
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}")
    m = x.size
    if m == 0:
        return np.empty(0)
    if method == "fft":
        return signal.fftconvolve(v[:m], x)[:m]
    return np.convolve(v[:m], x)[:m]


@dataclass(eq=False)
class PathBundle:
    n: int
    innovations: np.ndarray
    s_bar: np.ndarray
    center: np.ndarray
    law: TailBalancedLaw
    kernel: object = field(repr=False)
    weights: np.ndarray = field(repr=False, default=None)
    method: str = "direct"

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @property
    def centered(self) -> np.ndarray:
        return self.s_bar - self.center


@dataclass(eq=False)
class Decomposition:
    middle: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    window: TruncationWindow
    moments: TruncatedMoments

    @property
    def n(self) -> int:
        return self.window.n

    @property
    def total(self) -> np.ndarray:
        return self.middle + self.upper + self.lower


def path_from_innovations(law: TailBalancedLaw, kernel, innovations,
                          method: str = "direct") -> PathBundle:
    x = np.asarray(innovations, dtype=float)
    n = x.size
    if n < 1:
        raise DomainError("n must be at least 1")
    v = kernel_grid(kernel, n)
    s_bar = np.concatenate(([0.0], causal_convolve(v, x, method)))
    c_n = dist.centering_integral(law, n) if n > 1 else 0.0
    center = np.concatenate(([0.0], c_n * np.cumsum(v)))
    return PathBundle(n=n, innovations=x, s_bar=s_bar, center=center, law=law,
                      kernel=kernel, weights=v, method=method)


def simulate_path(law: TailBalancedLaw, kernel, n: int, seed: SeedLike,
                  method: str = "direct") -> PathBundle:
    """Draw ``X_1..X_n`` from ``law`` and build the weighted partial-sum path.

    ``method="direct"`` convolves exactly in O(n^2); ``"fft"`` is the fast
    option for Monte Carlo loops.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    x = dist.sample(law, make_rng(seed), n)
    return path_from_innovations(law, kernel, x, method)


def decompose(bundle: PathBundle, window: TruncationWindow) -> Decomposition:
    """Split ``S_bar - s_bar`` into middle, upper and lower parts.

    middle = sum_j kbar((i-j)/n) (X_j 1[a,b](X_j) - mu_n)
    upper  = sum_j kbar((i-j)/n) X_j 1(X_j > b) - mu_plus sum_l kbar(l/n)
    lower  = sum_j kbar((i-j)/n) X_j 1(X_j < a) - mu_minus sum_l kbar(l/n)
    """
    if window.n != bundle.n:
        raise DomainError("window and path use different n")
    mom = dist.truncated_moments(bundle.law, window)
    if mom.sigma2 <= 0.0:
        raise DomainError("degenerate window: sigma_n = 0")
    x, v, method = bundle.innovations, bundle.weights, bundle.method
    hi = x > window.b_n
    lo = x < window.a_n
    mid = ~(hi | lo)
    cv = np.concatenate(([0.0], np.cumsum(v)))

    def part(values):
        return np.concatenate(([0.0], causal_convolve(v, values, method)))

    middle = part(np.where(mid, x, 0.0) - mom.mu)
    upper = part(np.where(hi, x, 0.0)) - mom.mu_plus * cv
    lower = part(np.where(lo, x, 0.0)) - mom.mu_minus * cv
    return Decomposition(middle=middle, upper=upper, lower=lower, window=window, moments=mom)


def identity_residual(bundle: PathBundle, dec: Decomposition) -> np.ndarray:
    """Pointwise ``|middle + upper + lower - (S_bar - s_bar)| / (1 + |S_bar - s_bar|)``."""
    target = bundle.centered
    return np.abs(dec.total - target) / (1.0 + np.abs(target))


def middle_values(dec: Decomposition) -> np.ndarray:
    """``M_n(i/n)``: the middle part divided by ``sqrt(n) sigma_n``."""
    if dec.moments.sigma2 <= 0.0:
        raise DomainError("degenerate window: sigma_n = 0")
    return dec.middle / (math.sqrt(dec.n) * dec.moments.sigma)


def middle_variance(kernel, n: int) -> float:
    """``n^-1 sum_{1<=i<=n} kbar(1 - i/n)**2``, the variance of ``M_n(1)``."""
    v = kernel_grid(kernel, n)
    return float(np.sum(v * v) / n)


def _compensator_rate(alpha: float, depth: float) -> float:
    """``int_1^depth w**(-1/alpha) dw``; ``log(depth)`` at alpha = 1."""
    if alpha == 1.0:
        return math.log(depth)
    return alpha / (alpha - 1.0) * (depth ** (1.0 - 1.0 / alpha) - 1.0)


def _atoms(w_rng: np.random.Generator, v_rng: np.random.Generator, depth: float):
    """Arrival times ``W_i <= depth`` with marks ``V_i``.

    Both streams are consumed in fixed chunks so the atoms below a smaller
    depth are a prefix of those below a larger one.
    """
    ws, vs = [], []
    last = 0.0
    while True:
        w = last + np.cumsum(w_rng.standard_exponential(ATOM_CHUNK))
        v = v_rng.random(ATOM_CHUNK)
        keep = w <= depth
        ws.append(w[keep])
        vs.append(v[keep])
        if not keep[-1]:
            break
        last = w[-1]
    return np.concatenate(ws), np.concatenate(vs)


def _check_levy(alpha: float, p: float, q: float, depth: float):
    if not 0.0 < alpha < 2.0:
        raise DomainError("alpha must lie in (0,2)")
    if p < 0 or q < 0 or not math.isclose(p + q, 1.0, abs_tol=1e-12):
        raise DomainError("p and q must be nonnegative with p + q = 1")
    if depth < 1.0:
        raise DomainError("depth must be at least 1")


@dataclass(eq=False)
class LePagePath:
    """Truncated LePage series for both signs of the jumps.

    ``atoms_plus`` and ``atoms_minus`` are ``(V, W)`` arrays with ``W``
    increasing. ``values`` holds ``L = p^{1/a} L+ + q^{1/a} L-`` on ``grid``.
    """

    alpha: float
    p: float
    q: float
    depth: float
    atoms_plus: tuple
    atoms_minus: tuple
    grid: np.ndarray

    def _one_side(self, atoms) -> np.ndarray:
        v, w = atoms
        jumps = w ** (-1.0 / self.alpha)
        order = np.argsort(v, kind="stable")
        csum = np.concatenate(([0.0], np.cumsum(jumps[order])))
        idx = np.searchsorted(v[order], self.grid, side="right")
        return csum[idx] - _compensator_rate(self.alpha, self.depth) * self.grid

    @property
    def plus(self) -> np.ndarray:
        """``L+`` on the grid."""
        return self._one_side(self.atoms_plus)

    @property
    def minus(self) -> np.ndarray:
        """``L-`` on the grid; a negated copy of ``L+`` built from the second stream."""
        return -self._one_side(self.atoms_minus)

    @property
    def values(self) -> np.ndarray:
        a = self.alpha
        return self.p ** (1.0 / a) * self.plus + self.q ** (1.0 / a) * self.minus


def lepage_series(alpha: float, p: float, q: float, depth: float, grid, seed: SeedLike) -> LePagePath:
    _check_levy(alpha, p, q, depth)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any((grid < 0) | (grid > 1)):
        raise DomainError("grid must lie in [0,1]")
    root = seed_sequence(seed) if not isinstance(seed, np.random.Generator) \
        else np.random.SeedSequence(seed.integers(2 ** 63))
    s_wp, s_vp, s_wm, s_vm = root.spawn(4)
    w, v = _atoms(np.random.default_rng(s_wp), np.random.default_rng(s_vp), depth)
    wm, vm = _atoms(np.random.default_rng(s_wm), np.random.default_rng(s_vm), depth)
    return LePagePath(alpha=alpha, p=p, q=q, depth=float(depth),
                      atoms_plus=(v, w), atoms_minus=(vm, wm), grid=grid)


def lepage_levy(alpha: float, p: float, q: float, depth: float, grid, seed: SeedLike) -> np.ndarray:
    """Stable Levy process ``L`` on ``grid`` from a truncated LePage series.

    ``L+(s) = sum_{W_i <= depth} 1{V_i <= s} W_i^{-1/alpha} - c(depth) s`` with
    ``c(depth) = int_1^depth w^{-1/alpha} dw``, and ``L- `` an independent
    negated copy.
    """
    return lepage_series(alpha, p, q, depth, grid, seed).values


def _convolve_atoms(k: LimitKernel, alpha: float, depth: float, atoms, grid: np.ndarray) -> np.ndarray:
    v, w = atoms
    jumps = w ** (-1.0 / alpha)
    out = np.empty(grid.size)
    block = max(1, 2 ** 22 // max(v.size, 1))
    for start in range(0, grid.size, block):
        t = grid[start:start + block]
        kv = np.asarray(k(t[:, None] - v[None, :]), dtype=float)
        out[start:start + block] = kv @ jumps
    return out - _compensator_rate(alpha, depth) * np.asarray(k.integral(grid), dtype=float)


def fractional_levy(k: LimitKernel, alpha: float, p: float, q: float, depth: float,
                    grid, seed: SeedLike) -> np.ndarray:
    """``(k * dL)(t) = int_0^t k(t - s) dL(s)`` on ``grid`` from the LePage atoms.

    Uses exactly the atoms of :func:`lepage_series` for the same seed, so
    ``Constant(1)`` reproduces :func:`lepage_levy`.
    """
    path = lepage_series(alpha, p, q, depth, grid, seed)
    if k.kind == "constant" and k.c == 0.0:
        return np.zeros(path.grid.size)
    plus = _convolve_atoms(k, alpha, depth, path.atoms_plus, path.grid)
    minus = -_convolve_atoms(k, alpha, depth, path.atoms_minus, path.grid)
    return p ** (1.0 / alpha) * plus + q ** (1.0 / alpha) * minus


def levy_drift(alpha: float, p: float, q: float) -> float:
    """Linear drift of ``L`` for alpha != 1: ``alpha/(alpha-1)(p^{1/a} - q^{1/a})``."""
    if alpha == 1.0:
        raise DomainError("alpha = 1 has a t log t term instead of a linear drift")
    return alpha / (alpha - 1.0) * (p ** (1.0 / alpha) - q ** (1.0 / alpha))


def strict_part(alpha: float, p: float, q: float, t, values):
    """``L_0(t)``: ``L(t)`` minus its drift, strictly self-similar of index 1/alpha.

    For alpha = 1 the removed term is ``(p - q) t log t``.
    """
    t = np.asarray(t, dtype=float)
    if alpha == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            shift = np.where(t > 0, (p - q) * t * np.log(np.where(t > 0, t, 1.0)), 0.0)
    else:
        shift = levy_drift(alpha, p, q) * t
    return np.asarray(values) - shift


def scaling_check(alpha: float, p: float, q: float, t: float, reps: int, seed: SeedLike,
                  depth: float = DEFAULT_DEPTH) -> tuple:
    """Independent samples of ``L_0(t)`` and of ``t^{1/alpha} L_0(1)``."""
    if not 0.0 < t <= 1.0:
        raise DomainError("t must lie in (0,1]")
    if reps < 1:
        raise DomainError("reps must be at least 1")
    base = int(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    at_t = np.empty(reps)
    at_one = np.empty(reps)
    for i in range(reps):
        lt = lepage_levy(alpha, p, q, depth, [t], seed_sequence(base, 0, i))[0]
        l1 = lepage_levy(alpha, p, q, depth, [1.0], seed_sequence(base, 1, i))[0]
        at_t[i] = strict_part(alpha, p, q, t, lt)
        at_one[i] = t ** (1.0 / alpha) * strict_part(alpha, p, q, 1.0, l1)
    return at_t, at_one


def rescaled_process(bundle: PathBundle) -> np.ndarray:
    """``(S_bar - s_bar)(i/n) / F_*^{<-}(1 - 1/n)`` for i = 0..n."""
    n = bundle.n
    scale = float(dist.star_quantile(bundle.law, 1.0 - 1.0 / n)) if n > 1 else 1.0
    return bundle.centered / scale


def path_table(bundle: PathBundle, dec: Decomposition | None = None) -> dict:
    """Columns ``t, S_bar, center, middle, upper, lower, rescaled`` (plus residual)."""
    cols = {"t": bundle.grid, "S_bar": bundle.s_bar, "center": bundle.center}
    if dec is not None:
        cols.update(middle=dec.middle, upper=dec.upper, lower=dec.lower)
    cols["rescaled"] = rescaled_process(bundle)
    if dec is not None:
        cols["residual"] = identity_residual(bundle, dec)
    return cols
