"""Point patterns of rescaled paths, the Poisson limit pattern and extremes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dist
from ._streams import SeedLike, seed_sequence
from .dist import DomainError
from .simulate import PathBundle, rescaled_process

__all__ = [
    "PointPattern",
    "extract_pattern",
    "sample_limit_pattern",
    "count_rectangle",
    "expected_count",
    "max_functional",
    "extreme_cdf",
    "pattern_to_rows",
]

DEFAULT_FLOOR = 0.05


@dataclass(eq=False)
class PointPattern:
    t: np.ndarray
    y: np.ndarray
    floor: float

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.t.shape != self.y.shape:
            raise DomainError("t and y must have the same length")
        if np.any((self.t < 0) | (self.t > 1)):
            raise DomainError("times must lie in [0,1]")
        if np.any(np.abs(self.y) <= self.floor):
            raise DomainError("points must lie beyond the magnitude floor")

    def __len__(self) -> int:
        return self.t.size


def extract_pattern(bundle: PathBundle, floor: float = DEFAULT_FLOOR) -> PointPattern:
    """Points ``(i/n, r_i)`` of the rescaled path with ``|r_i| > floor``."""
    if floor <= 0:
        raise DomainError("floor must be positive")
    r = rescaled_process(bundle)
    keep = np.abs(r) > floor
    return PointPattern(t=bundle.grid[keep], y=r[keep], floor=floor)


def _stream_points(rng: np.random.Generator, alpha: float, scale: float, kappa: np.ndarray,
                   floor: float, depth: float):
    """Points ``(V_j, scale kappa_i W_j^{-1/alpha})`` with magnitude above ``floor``."""
    top = scale * np.max(np.abs(kappa)) if kappa.size else 0.0
    if top <= 0.0:
        return np.empty(0), np.empty(0)
    # once top W^{-1/alpha} <= floor no later arrival can contribute
    w_stop = min(depth, (top / floor) ** alpha)
    ts, ys = [], []
    w = 0.0
    while True:
        w += rng.standard_exponential()
        if w > w_stop:
            break
        v = rng.random()
        mags = scale * kappa * w ** (-1.0 / alpha)
        keep = np.abs(mags) > floor
        ts.append(np.full(int(keep.sum()), v))
        ys.append(mags[keep])
    if not ts:
        return np.empty(0), np.empty(0)
    return np.concatenate(ts), np.concatenate(ys)


def sample_limit_pattern(kappa, alpha: float, p: float, q: float, depth: float,
                         floor: float, seed: SeedLike) -> PointPattern:
    """Draw the limit pattern restricted to magnitudes above ``floor``.

    Positive arrivals ``(V_j, W_j)`` carry marks ``p^{1/a} kappa_i W_j^{-1/a}``
    and negative ones ``-q^{1/a} kappa_i W'_j^{-1/a}``; every ``kappa_i``
    shares the same arrival.
    """
    k = np.asarray(getattr(kappa, "g", kappa), dtype=float)
    if floor <= 0:
        raise DomainError("floor must be positive")
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if not 0.0 < alpha < 2.0:
        raise DomainError("alpha must lie in (0,2)")
    root = seed_sequence(seed)
    s_plus, s_minus = root.spawn(2)
    tp, yp = _stream_points(np.random.default_rng(s_plus), alpha, p ** (1 / alpha), k, floor, depth)
    tm, ym = _stream_points(np.random.default_rng(s_minus), alpha, q ** (1 / alpha), k, floor, depth)
    return PointPattern(t=np.concatenate((tp, tm)), y=np.concatenate((yp, -ym)), floor=floor)


def count_rectangle(pattern: PointPattern, t0: float, t1: float, x: float,
                    side: str = "upper") -> int:
    """Points with ``t0 <= t <= t1`` and ``y > x`` (``side="lower"``: ``y < -x``)."""
    if t0 > t1:
        raise DomainError("t0 must not exceed t1")
    if x < pattern.floor:
        raise DomainError("x must be at least the pattern floor")
    inside = (pattern.t >= t0) & (pattern.t <= t1)
    if side == "upper":
        hit = pattern.y > x
    elif side == "lower":
        hit = pattern.y < -x
    else:
        raise DomainError("side must be 'upper' or 'lower'")
    return int(np.count_nonzero(inside & hit))


def expected_count(kappa, alpha: float, p: float, q: float, t: float, x: float,
                   side: str = "upper") -> float:
    """Mean number of limit points in ``[0,t] x (x, inf)``.

    Equals ``t x^{-a} (p sum_{k_i>0} k_i^a + q sum_{k_i<0} |k_i|^a)``; the
    lower side swaps p and q.
    """
    k = np.asarray(getattr(kappa, "g", kappa), dtype=float)
    pos = float(np.sum(k[k > 0] ** alpha))
    neg = float(np.sum((-k[k < 0]) ** alpha))
    if side == "lower":
        p, q = q, p
    return t * x ** -alpha * (p * pos + q * neg)


def max_functional(obj) -> float:
    """Largest rescaled value ``max_i (S_i - c_{n,i}) / F_*^{<-}(1-1/n)``.

    For a pattern, the largest mark (``-inf`` when empty).
    """
    if isinstance(obj, PointPattern):
        return float(obj.y.max()) if len(obj) else -math.inf
    return float(np.max(rescaled_process(obj)))


def extreme_cdf(alpha: float, p: float, g_max: float, x):
    """``exp(-p x^{-alpha} g_max^alpha)``, the law of ``p^{1/a} g_max W_1^{-1/a}``."""
    if g_max <= 0:
        raise DomainError("g_max must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    out = np.exp(-p * x ** -alpha * g_max ** alpha)
    return out[()] if out.ndim == 0 else out


def pattern_to_rows(pattern: PointPattern) -> list:
    order = np.lexsort((pattern.y, pattern.t))
    return [(float(pattern.t[i]), float(pattern.y[i])) for i in order]
