"""Large-N behaviour of SO(N) volumes along ``rho(l1) = l1 |1><1| + (1 - l1)/(N - 1) (1 - |1><1|)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectra import Spectrum

DEFAULT_LEVEL = 1e-4
QUAD_RTOL = 1e-10
WEIGHTINGS = ("uniform", "volume")


class NumericFailure(ArithmeticError):
    """Root bracketing, monotonicity or quadrature convergence failed."""


@dataclass(frozen=True)
class MarginalFamily:
    N: int
    lambda1: float

    def spectrum(self) -> Spectrum:
        return Spectrum(marginal_spectrum(self.N, self.lambda1))


def marginal_spectrum(n: int, lambda1: float) -> np.ndarray:
    rest = (1.0 - lambda1) / (n - 1)
    return np.concatenate([[lambda1], np.full(n - 1, rest)])


def _check(n: int, lambda1: float) -> float:
    if n < 3:
        raise ValueError("N must be at least 3")
    lo = 1.0 / n
    if not (lo - 1e-12 <= lambda1 <= 1.0 + 1e-12):
        raise ValueError(f"lambda1={lambda1!r} outside [1/{n}, 1]")
    return min(max(lambda1, lo), 1.0)


def vnorm_marginal(n: int, lambda1: float) -> float:
    """Normalized pair-sum-product volume along the marginal family, in log space."""
    x = _check(n, lambda1)
    if x >= 1.0:
        return 0.0
    rest = (1.0 - x) / (n - 1)
    log_v = (0.5 * (n - 1) * math.log(x + rest)
             + 0.25 * (n - 1) * (n - 2) * math.log(2.0 * rest)
             - 0.25 * n * (n - 1) * math.log(2.0 / n))
    return min(math.exp(log_v), 1.0)


def svn_marginal(n: int, lambda1: float) -> float:
    """Normalized von Neumann entropy of the marginal spectrum."""
    x = _check(n, lambda1)
    h = -x * math.log(x) if x > 0 else 0.0
    if x < 1.0:
        h -= (1.0 - x) * math.log((1.0 - x) / (n - 1))
    return min(max(h / math.log(n), 0.0), 1.0)


def adaptive_simpson(func: Callable[[float], float], a: float, b: float,
                     rtol: float = QUAD_RTOL, max_depth: int = 60, panels: int = 64) -> float:
    """Recursive Simpson with the halving test ``|S(a,m) + S(m,b) - S(a,b)| <= 15 eps``.

    ``eps`` starts at ``rtol`` times a composite-Simpson estimate of the whole
    integral and is split between halves as the recursion descends.
    """
    if b == a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    fx = {}

    def f(x: float) -> float:
        if x not in fx:
            fx[x] = func(x)
        return fx[x]

    mids = 0.5 * (edges[:-1] + edges[1:])
    rough = [(e1 - e0) / 6.0 * (f(e0) + 4 * f(m) + f(e1))
             for e0, m, e1 in zip(edges[:-1], mids, edges[1:])]
    scale = abs(math.fsum(rough))
    if scale == 0.0:
        return 0.0
    eps_total = rtol * scale

    pieces: list[float] = []
    for (e0, e1), whole in zip(zip(edges[:-1], edges[1:]), rough):
        stack = [(e0, e1, whole, eps_total * (e1 - e0) / (b - a), 0)]
        while stack:
            lo, hi, s_whole, eps, depth = stack.pop()
            mid = 0.5 * (lo + hi)
            lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
            left = (mid - lo) / 6.0 * (f(lo) + 4 * f(lm) + f(mid))
            right = (hi - mid) / 6.0 * (f(mid) + 4 * f(rm) + f(hi))
            delta = left + right - s_whole
            if abs(delta) <= 15.0 * eps or mid in (lo, hi):
                pieces.append(left + right + delta / 15.0)
            elif depth >= max_depth:
                raise NumericFailure(f"adaptive Simpson did not converge on [{lo}, {hi}]")
            else:
                stack.append((mid, hi, right, 0.5 * eps, depth + 1))
                stack.append((lo, mid, left, 0.5 * eps, depth + 1))
    return math.fsum(pieces)


def is_nonincreasing(n: int, points: int = 1000) -> bool:
    xs = np.linspace(1.0 / n, 1.0, points)
    vals = np.array([vnorm_marginal(n, x) for x in xs])
    return bool(np.all(np.diff(vals) <= 1e-12))


def find_lambda1_star(n: int, level: float = DEFAULT_LEVEL) -> float:
    """The ``l1`` where the normalized volume falls to ``level``.

    Bisection runs to floating-point resolution, which is well below the
    ``1e-12`` bracket width and keeps the residual small even where the curve
    is steep near ``l1 = 1``.
    """
    if not is_nonincreasing(n):
        raise NumericFailure(f"normalized volume curve for N={n} is not monotone")
    lo, hi = 1.0 / n, 1.0
    g_lo = vnorm_marginal(n, lo) - level
    g_hi = vnorm_marginal(n, hi) - level
    if not (g_lo > 0 > g_hi):
        raise NumericFailure(f"level {level!r} is not bracketed on [1/{n}, 1]")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if vnorm_marginal(n, mid) - level > 0:
            lo = mid
        else:
            hi = mid
    # pick the bracket end with the smaller residual
    return lo if abs(vnorm_marginal(n, lo) - level) <= abs(vnorm_marginal(n, hi) - level) else hi


def _check_star(n: int, lambda1_star: float) -> None:
    if not (1.0 / n < lambda1_star <= 1.0):
        raise ValueError(f"lambda1_star={lambda1_star!r} outside (1/{n}, 1]")


def mass_ratio(n: int, lambda1_star: float) -> float:
    """Share of the integrated normalized volume lying in ``[1/N, lambda1_star]``."""
    _check_star(n, lambda1_star)
    v = lambda x: vnorm_marginal(n, x)
    total = adaptive_simpson(v, 1.0 / n, 1.0)
    if lambda1_star == 1.0:
        return 1.0
    return adaptive_simpson(v, 1.0 / n, lambda1_star) / total


def avg_svn_tail(n: int, lambda1_star: float, weighting: str = "uniform") -> float:
    """Mean normalized entropy over ``l1`` in ``[1/N, lambda1_star]``, either
    uniform in ``l1`` or weighted by the normalized volume."""
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    lo = 1.0 / n
    if lambda1_star == lo:
        return svn_marginal(n, lo)
    _check_star(n, lambda1_star)
    s = lambda x: svn_marginal(n, x)
    if weighting == "uniform":
        return adaptive_simpson(s, lo, lambda1_star) / (lambda1_star - lo)
    v = lambda x: vnorm_marginal(n, x)
    return (adaptive_simpson(lambda x: s(x) * v(x), lo, lambda1_star)
            / adaptive_simpson(v, lo, lambda1_star))


def centroid(n: int) -> float:
    """``int l1 V dl1 / int V dl1`` over ``[1/N, 1]``."""
    v = lambda x: vnorm_marginal(n, x)
    return (adaptive_simpson(lambda x: x * v(x), 1.0 / n, 1.0)
            / adaptive_simpson(v, 1.0 / n, 1.0))


@dataclass(frozen=True)
class AsymptoticsReport:
    N: int
    lambda1_star: float
    mass_ratio: float
    avg_svn_uniform: float
    avg_svn_volume_weighted: float


def asymptotics_report(n: int, level: float = DEFAULT_LEVEL) -> AsymptoticsReport:
    star = find_lambda1_star(n, level)
    return AsymptoticsReport(
        n, star, mass_ratio(n, star),
        avg_svn_tail(n, star, "uniform"), avg_svn_tail(n, star, "volume"),
    )
