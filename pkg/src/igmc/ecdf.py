"""Step-function CDFs and distances between distribution functions.

All distances are computed from the breakpoints of the step function, so
step-vs-step L1 is exact and KS is evaluated only where the supremum can
be attained.
"""

from __future__ import annotations

import math
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from igmc.errors import EmptyDomain, EmptySampleSet, InvalidAlpha, QuadratureFailure

__all__ = [
    "EmpiricalCdf",
    "ReferenceCdf",
    "l1_distance_step_step",
    "l1_distance_step_ref",
    "ks_distance",
    "dkw_band",
]


@runtime_checkable
class ReferenceCdf(Protocol):
    """Anything callable as a monotone CDF on scalars.

    Optional extras picked up by the metrics when present:

    * ``left_limit(t)`` -- value of ``F(t-)``; defaults to ``F(t)``
      (continuous CDFs).
    * ``integral(a, b)`` -- exact integral of the CDF over ``[a, b]``;
      adaptive Simpson is used otherwise.
    """

    def __call__(self, t: float) -> float: ...


class EmpiricalCdf:
    """Right-continuous step CDF.

    Parameters
    ----------
    breakpoints : sorted, strictly increasing jump locations
    cumulative : CDF value at and after each breakpoint; strictly
        increasing and ending at exactly 1
    """

    __slots__ = ("breakpoints", "cumulative")

    def __init__(self, breakpoints: Sequence[float], cumulative: Sequence[float]):
        b = np.asarray(breakpoints, dtype=float)
        c = np.asarray(cumulative, dtype=float)
        if b.ndim != 1 or b.shape != c.shape or b.size == 0:
            raise ValueError("breakpoints and cumulative must be equal-length non-empty vectors")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(c) <= 0) or c[0] <= 0 or c[-1] != 1.0:
            raise ValueError("cumulative must increase strictly to exactly 1")
        b.setflags(write=False)
        c.setflags(write=False)
        self.breakpoints = b
        self.cumulative = c

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> EmpiricalCdf:
        x = np.asarray(samples, dtype=float)
        if x.size == 0:
            raise EmptySampleSet("ECDF of no samples")
        values, counts = np.unique(x, return_counts=True)
        # integer cumsum then one division keeps the last value exactly 1
        return cls(values, np.cumsum(counts) / x.size)

    @classmethod
    def from_weights(cls, points: Sequence[float], weights: Sequence[float]) -> EmpiricalCdf:
        """Step CDF of a discrete distribution; zero-weight atoms are dropped."""
        p = np.asarray(points, dtype=float)
        w = np.asarray(weights, dtype=float)
        order = np.argsort(p, kind="stable")
        p, w = p[order], w[order]
        keep = w > 0
        p, w = p[keep], w[keep]
        c = np.cumsum(w)
        c = c / c[-1]
        c[-1] = 1.0
        return cls(p, c)

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.breakpoints[0]), float(self.breakpoints[-1]))

    def __len__(self) -> int:
        return self.breakpoints.size

    def __call__(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = np.where(idx >= 0, self.cumulative[np.maximum(idx, 0)], 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def left_limit(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="left") - 1
        out = np.where(idx >= 0, self.cumulative[np.maximum(idx, 0)], 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        pts, vals = _pieces(self, a, b)
        return math.fsum(v * (pts[i + 1] - pts[i]) for i, v in enumerate(vals))

    def __eq__(self, other):
        return (
            isinstance(other, EmpiricalCdf)
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.cumulative, other.cumulative)
        )

    def __repr__(self) -> str:
        return f"EmpiricalCdf(steps={len(self)}, support={self.support})"


def _check_domain(domain: tuple[float, float]) -> tuple[float, float]:
    lo, hi = float(domain[0]), float(domain[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise EmptyDomain(f"domain {domain!r} is empty or unbounded")
    return lo, hi


def _pieces(f: EmpiricalCdf, lo: float, hi: float) -> tuple[list[float], list[float]]:
    """Split [lo, hi] into maximal intervals on which f is constant."""
    b = f.breakpoints
    inner = b[(b > lo) & (b < hi)]
    pts = [lo, *inner.tolist(), hi]
    vals = [f(lo)] + f.cumulative[np.searchsorted(b, inner)].tolist()
    return pts, vals


def l1_distance_step_step(f: EmpiricalCdf, g: EmpiricalCdf, domain: tuple[float, float]) -> float:
    """Exact integral of |f - g| over ``domain`` by merging breakpoints."""
    lo, hi = _check_domain(domain)
    bps = np.union1d(f.breakpoints, g.breakpoints)
    pts = np.concatenate(([lo], bps[(bps > lo) & (bps < hi)], [hi]))
    left = pts[:-1]
    diff = np.abs(f(left) - g(left))
    return math.fsum((diff * np.diff(pts)).tolist())


def _simpson(g, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = g(lm), g(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    if depth <= 0:
        raise QuadratureFailure(f"adaptive Simpson did not reach tol={tol:g} on [{a}, {b}]")
    return _simpson(g, a, m, fa, flm, fm, left, tol / 2, depth - 1) + _simpson(
        g, m, b, fm, frm, fb, right, tol / 2, depth - 1
    )


def _integrate_cdf(g, a: float, b: float, tol: float, max_depth: int = 50) -> float:
    if b <= a:
        return 0.0
    exact = getattr(g, "integral", None)
    if exact is not None:
        return exact(a, b)
    fa, fm, fb = g(a), g(0.5 * (a + b)), g(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson(g, a, b, fa, fm, fb, whole, tol, max_depth)


def _crossing(g, c: float, a: float, b: float) -> float:
    """Point in [a, b] where the monotone g passes level c (bisection)."""
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if g(m) < c:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def l1_distance_step_ref(
    f: EmpiricalCdf,
    g: ReferenceCdf,
    domain: tuple[float, float],
    tol: float = 1e-6,
) -> float:
    """Integral of |f - g| over ``domain`` to absolute accuracy ``tol``.

    On each constant piece ``f = c`` the integrand ``|c - g(t)|`` is
    monotone on either side of the single crossing ``g(t) = c``, which is
    located by bisection; the two halves are then integrated in closed
    form when ``g`` exposes ``integral`` and by adaptive Simpson otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = _check_domain(domain)
    pts, vals = _pieces(f, lo, hi)
    width = hi - lo
    terms = []
    for i, c in enumerate(vals):
        a, b = pts[i], pts[i + 1]
        piece_tol = tol * (b - a) / width / 2.0
        ga, gb = g(a), g(b)
        if gb <= c:
            terms.append(c * (b - a) - _integrate_cdf(g, a, b, piece_tol))
        elif ga >= c:
            terms.append(_integrate_cdf(g, a, b, piece_tol) - c * (b - a))
        else:
            t = _crossing(g, c, a, b)
            terms.append(c * (t - a) - _integrate_cdf(g, a, t, piece_tol / 2))
            terms.append(_integrate_cdf(g, t, b, piece_tol / 2) - c * (b - t))
    return max(math.fsum(terms), 0.0)


def ks_distance(f: EmpiricalCdf, g: ReferenceCdf) -> float:
    """Supremum of |f - g| over the real line.

    Between breakpoints f is constant and g monotone, so the supremum is a
    one-sided limit at some breakpoint; both sides are checked.
    """
    left = getattr(g, "left_limit", None) or g
    best = 0.0
    prev = 0.0
    for t, c in zip(f.breakpoints.tolist(), f.cumulative.tolist()):
        best = max(best, abs(prev - float(left(t))), abs(c - float(g(t))))
        prev = c
    return best


def dkw_band(n: int, alpha: float) -> float:
    """Half-width eps with Pr(sup|F_n - F| > eps) <= alpha (Massart's constant)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha!r}")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))
