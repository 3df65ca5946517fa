"""Discrete and limit kernels, and their moduli of continuity.

A discrete kernel is given by its values on the grid ``i/n``, ``0 <= i <= n``.
:class:`StepKernel` is the cadlag step function through these values and
:class:`InterpKernel` the piecewise-linear interpolation. Both vanish outside
``[0, 1]``. :class:`LimitKernel` holds the continuous limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .dist import DomainError

__all__ = [
    "StepKernel",
    "InterpKernel",
    "LimitKernel",
    "ModulusReport",
    "evaluate",
    "sampled_kernel",
    "discrete_modulus",
    "continuous_modulus",
    "fractional_modulus_closed_form",
    "fit_modulus_exponent",
    "jump_quadratic_mean",
    "sup_distance",
    "kernel_to_dict",
    "kernel_from_dict",
]

EXHAUSTIVE_LIMIT = 4096


def _grid_index(t: np.ndarray, n: int) -> np.ndarray:
    """``floor(n t)``, made exact at grid points ``j/n`` computed by division."""
    idx = np.floor(t * n).astype(np.int64)
    idx = np.where((idx + 1) / n <= t, idx + 1, idx)
    idx = np.where(idx / n > t, idx - 1, idx)
    return idx


@dataclass(eq=False)
class StepKernel:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise DomainError("a step kernel needs at least two grid values")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("kernel values must be finite")

    @property
    def n(self) -> int:
        return self.values.size - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = self.n
        idx = _grid_index(t, n)
        inside = (t >= 0.0) & (t <= 1.0)
        out = np.where(inside, self.values[np.clip(idx, 0, n)], 0.0)
        return out[()] if out.ndim == 0 else out


@dataclass(eq=False)
class InterpKernel:
    base: StepKernel

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = self.n
        v = self.base.values
        idx = np.clip(_grid_index(t, n), 0, n)
        frac = t * n - idx
        nxt = np.minimum(idx + 1, n)
        val = v[idx] + frac * (v[nxt] - v[idx])
        # grid points i/n formed by division sit within rounding of an integer
        val = np.where(np.abs(frac) < 1e-9, v[idx], val)
        out = np.where((t >= 0.0) & (t <= 1.0), val, 0.0)
        return out[()] if out.ndim == 0 else out

    @classmethod
    def from_values(cls, values) -> "InterpKernel":
        return cls(StepKernel(values))


@dataclass(eq=False)
class LimitKernel:
    """Continuous kernel on ``[0, 1]``.

    ``kind`` is ``"fractional"`` (``gamma t**(gamma-1)``), ``"constant"`` or
    ``"tabulated"`` (linear interpolation of ``table`` on a uniform grid).
    """

    kind: str
    gamma: float | None = None
    c: float | None = None
    table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "fractional":
            if self.gamma is None or self.gamma <= 0:
                raise DomainError("fractional kernel needs gamma > 0")
        elif self.kind == "constant":
            if self.c is None:
                raise DomainError("constant kernel needs c")
        elif self.kind == "tabulated":
            self.table = np.asarray(self.table, dtype=float)
            if self.table.ndim != 1 or self.table.size < 2:
                raise DomainError("tabulated kernel needs at least two values")
        else:
            raise DomainError(f"unknown limit kernel kind {self.kind!r}")

    @classmethod
    def fractional(cls, gamma: float) -> "LimitKernel":
        return cls("fractional", gamma=float(gamma))

    @classmethod
    def constant(cls, c: float) -> "LimitKernel":
        return cls("constant", c=float(c))

    @classmethod
    def tabulated(cls, table) -> "LimitKernel":
        return cls("tabulated", table=table)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= 1.0)
        if self.kind == "fractional":
            g = self.gamma
            with np.errstate(divide="ignore", invalid="ignore"):
                val = g * np.where(inside, t, 1.0) ** (g - 1.0)
        elif self.kind == "constant":
            val = np.full(t.shape, self.c)
        else:
            m = self.table.size - 1
            val = np.interp(t * m, np.arange(m + 1), self.table)
        out = np.where(inside, val, 0.0)
        return out[()] if out.ndim == 0 else out

    def integral(self, t):
        """``int_0^t k(u) du`` for ``0 <= t <= 1``."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        if self.kind == "fractional":
            out = t ** self.gamma
        elif self.kind == "constant":
            out = self.c * t
        else:
            m = self.table.size - 1
            grid = np.linspace(0.0, 1.0, m + 1)
            cum = integrate.cumulative_trapezoid(self.table, grid, initial=0.0)
            out = np.interp(t, grid, cum)
        return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ModulusReport:
    r: float
    delta: float
    value: float


def evaluate(kernel, t):
    """Evaluate any kernel; zero outside its support."""
    return kernel(t)


def sampled_kernel(k: LimitKernel, n: int) -> InterpKernel:
    """Interpolating kernel through ``k(i/n)``; a non-finite value at 0 is replaced by 0."""
    values = np.asarray(k(np.arange(n + 1) / n), dtype=float)
    values[~np.isfinite(values)] = 0.0
    return InterpKernel(StepKernel(values))


def _extended_grid(kernel, n: int) -> np.ndarray:
    # values u[j] = kernel(j/n) for j = -n..n
    j = np.arange(-n, n + 1)
    return np.asarray(kernel(j / n), dtype=float)


def discrete_modulus(kernel, r: int, delta: float) -> ModulusReport:
    """Discrete modulus of continuity by exhaustive scan over grid pairs.

    Computes the sup over ``0 <= p <= q <= p + n delta <= n`` of
    ``n^-1 sum_{1<=i<=n} |k((q-i)/n) - k((p-i)/n)|^r``. Only grid values
    enter, so a step kernel and its interpolation give identical results.
    Above ``n = 4096`` the lags and offsets are scanned with a stride.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0,1)")
    if r < 1 or int(r) != r:
        raise DomainError("r must be a positive integer")
    n = kernel.n
    u = _extended_grid(kernel, n)
    max_lag = int(math.floor(n * delta * (1.0 + 1e-12)))
    stride = 1 if n <= EXHAUSTIVE_LIMIT else int(math.ceil(n / EXHAUSTIVE_LIMIT))
    best = 0.0
    for lag in range(0, max_lag + 1, stride):
        # d[j + n] = |u[j+lag] - u[j]|^r for j in [-n, n-lag]
        d = np.abs(u[lag:] - u[: u.size - lag]) ** r
        cs = np.concatenate(([0.0], np.cumsum(d)))
        p = np.arange(0, n - lag + 1, stride)
        # window j in [p-n, p-1] maps to positions [p, p+n-1] of d
        sums = cs[p + n] - cs[p]
        best = max(best, float(sums.max()))
    return ModulusReport(r=r, delta=delta, value=best / n)


def _cumulative_simpson(f: np.ndarray, h: float) -> np.ndarray:
    """Composite Simpson integrals from 0 to each even node."""
    pairs = h / 3.0 * (f[:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    return np.concatenate(([0.0], np.cumsum(pairs)))


def continuous_modulus(k: LimitKernel, r: float, delta: float,
                       grid: int = 256, panels: int = 2 ** 12) -> ModulusReport:
    """Grid sup of ``int_0^1 |k(t-u) - k(s-u)|^r du`` over ``0 <= t - s <= delta``.

    ``s`` runs over a uniform grid of ``grid`` cells and the lag ``t - s``
    over the even nodes of the quadrature mesh.

    With ``v = s - u`` the integral splits as
    ``int_0^s |k(v+h) - k(v)|^r dv + int_0^h |k(w)|^r dw`` where ``h = t - s``,
    so a single cumulative Simpson pass per lag covers every ``s`` at once.
    """
    if grid < 16:
        raise DomainError("grid must be at least 16")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0,1)")
    panels = max(panels, 2 * grid)
    panels += panels % 2
    step = panels // grid
    if step % 2:
        panels = grid * (step + 1)
        step += 1
    fine = np.linspace(0.0, 1.0, panels + 1)
    h = 1.0 / panels
    kv = np.asarray(k(fine), dtype=float)
    kv[~np.isfinite(kv)] = 0.0
    # int_0^x |k|^r at even nodes, with |k|^r integrable at 0
    head = _cumulative_simpson(np.abs(kv) ** r, h)
    best = 0.0
    # lags run over even fine nodes so that the lag sets are nested in delta
    max_shift = int(math.floor(panels * delta * (1.0 + 1e-12))) // 2 * 2
    for shift in range(0, max_shift + 1, 2):
        shifted = np.concatenate((kv[shift:], np.zeros(shift)))
        body = _cumulative_simpson(np.abs(shifted - kv) ** r, h)
        # s on the coarse grid with s + lag <= 1
        s_nodes = np.arange(0, (panels - shift) // step + 1) * step
        vals = body[s_nodes // 2] + head[shift // 2]
        best = max(best, float(vals.max()))
    return ModulusReport(r=r, delta=delta, value=best)


def fractional_modulus_closed_form(gamma: float, delta: float) -> float:
    """Exact sup of the continuous ``r = 2`` modulus of ``gamma t**(gamma-1)``.

    The sup is attained at ``s = 1 - delta`` because the integral is
    nondecreasing in ``s``; integer ``gamma`` is integrated exactly.
    """
    if gamma <= 1.0:
        raise DomainError("closed form requires gamma > 1")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0,1)")
    e = 1.0 - delta
    lead = (1.0 + e ** (2 * gamma - 1)) / (2 * gamma - 1)
    if float(gamma).is_integer():
        g1 = int(gamma) - 1
        cross = sum(math.comb(g1, j) * delta ** (g1 - j) * e ** (j + gamma) / (j + gamma)
                    for j in range(g1 + 1))
    else:
        cross, _ = integrate.quad(lambda v: (delta + v) ** (gamma - 1) * v ** (gamma - 1),
                                  0.0, e, epsabs=1e-15, epsrel=1e-13, limit=200)
    return gamma * gamma * (lead - 2.0 * cross)


def fit_modulus_exponent(kernel, r: int, deltas) -> tuple[float, float]:
    """Least-squares fit of ``modulus(delta) = c delta**(1+eps)``; returns ``(c, eps)``."""
    deltas = np.asarray(deltas, dtype=float)
    vals = np.array([discrete_modulus(kernel, r, d).value for d in deltas])
    keep = vals > 0
    if keep.sum() < 2:
        return 0.0, math.inf
    slope, icpt = np.polyfit(np.log(deltas[keep]), np.log(vals[keep]), 1)
    return float(math.exp(icpt)), float(slope - 1.0)


def jump_quadratic_mean(kernel) -> float:
    v = kernel.values
    return float(np.sum(np.diff(v) ** 2) / kernel.n)


def sup_distance(kernel, k, resolution: int = 8) -> float:
    """Max of ``|k_n - k|`` over a grid ``resolution`` times finer than ``1/n``.

    Points where either kernel is not finite (``t = 0`` for a fractional
    kernel with gamma < 1) are skipped.
    """
    n = getattr(kernel, "n", 256)
    t = np.linspace(0.0, 1.0, resolution * n + 1)
    diff = np.abs(np.asarray(kernel(t), dtype=float) - np.asarray(k(t), dtype=float))
    diff = diff[np.isfinite(diff)]
    return float(diff.max()) if diff.size else 0.0


def kernel_to_dict(kernel) -> dict:
    if isinstance(kernel, InterpKernel):
        return {"type": "interp", "n": kernel.n, "values": kernel.values.tolist()}
    if isinstance(kernel, StepKernel):
        return {"type": "step", "n": kernel.n, "values": kernel.values.tolist()}
    if isinstance(kernel, LimitKernel):
        if kernel.kind == "fractional":
            return {"type": "fractional", "gamma": kernel.gamma}
        if kernel.kind == "constant":
            return {"type": "constant", "c": kernel.c}
        return {"type": "tabulated", "values": kernel.table.tolist()}
    raise TypeError(f"not a kernel: {kernel!r}")


def kernel_from_dict(data: dict):
    kind = data["type"]
    if kind == "interp":
        return InterpKernel(StepKernel(data["values"]))
    if kind == "step":
        return StepKernel(data["values"])
    if kind == "fractional":
        return LimitKernel.fractional(data["gamma"])
    if kind == "constant":
        return LimitKernel.constant(data["c"])
    if kind == "tabulated":
        return LimitKernel.tabulated(data["values"])
    raise DomainError(f"unknown kernel type {kind!r}")
