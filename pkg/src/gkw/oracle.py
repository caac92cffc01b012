"""Independent numerical checks: adaptive quadrature, finite-difference
derivatives, and Monte Carlo order-statistic means.

Nothing in here knows about the series expansions it is used to verify;
the only shared code is the exact density layer in ``core``.  Keeping
this separation honest is what makes agreement between the two routes
meaningful.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import core

__all__ = [
    "QuadResult",
    "adaptive_quad",
    "fd_grad",
    "fd_hess",
    "mc_order_stat_mean",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _panel(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


@dataclass(frozen=True)
class QuadResult:
    """Value of an integral plus an a-posteriori error estimate.

    ``reliable`` is False when the subdivision budget ran out before the
    requested tolerance was met; the value is still the best available.
    """

    value: float
    err_estimate: float
    subdivisions: int
    reliable: bool

    def __float__(self) -> float:
        return self.value


def adaptive_quad(f, lo: float, hi: float, tol: float = 1e-10,
                  max_subdiv: int = 2000) -> QuadResult:
    """Integrate f over (lo, hi) by adaptive Gauss-Legendre bisection.

    The integrand is called on arrays of nodes.  Panels are kept in a
    priority queue keyed on local error (|whole - (left + right)| after
    one trial split), and the worst panel is split until the summed
    error drops below ``tol`` or the subdivision cap is reached.
    Endpoint integrable singularities are resolved by the geometric
    refinement this induces near the offending endpoint.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"bad interval ({lo}, {hi})")
    counter = itertools.count()

    def make(a: float, c: float, whole: float):
        m = 0.5 * (a + c)
        left = _panel(f, a, m)
        right = _panel(f, m, c)
        err = abs(whole - (left + right))
        return (-err, next(counter), a, c, whole, left, right)

    heap = [make(lo, hi, _panel(f, lo, hi))]
    stuck = []  # panels too narrow to split further (their error stays counted)
    n_split = 0
    heap_err = -heap[0][0]
    stuck_err = 0.0
    while n_split < max_subdiv and heap and heap_err + stuck_err > tol:
        item = heapq.heappop(heap)
        neg_err, _, a, c, _, left, right = item
        heap_err += neg_err
        m = 0.5 * (a + c)
        if not (a < m < c):
            # midpoint indistinguishable from an endpoint in float64;
            # keep the panel and its residual error on the books
            stuck.append(item)
            stuck_err += -neg_err
            continue
        for child in (make(a, m, left), make(m, c, right)):
            heapq.heappush(heap, child)
            heap_err += -child[0]
        n_split += 1
    total_err = sum(-item[0] for item in heap) + sum(-item[0] for item in stuck)
    value = sum(item[5] + item[6] for item in heap + stuck)
    return QuadResult(
        value=value,
        err_estimate=total_err,
        subdivisions=n_split,
        reliable=total_err <= tol,
    )


def fd_grad(f, x, h_rel: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function of a vector.

    Step per coordinate is h_rel * max(1, |x_i|).  Raises if the
    function comes back non-finite at a probe point, naming the
    coordinate, since silently returning NaN derivatives has a habit of
    burying the actual failure several layers up.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = h_rel * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fp, fm = f(xp), f(xm)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise ValueError(
                f"non-finite evaluation while differencing coordinate {i} "
                f"(f+={fp!r}, f-={fm!r})"
            )
        g[i] = (fp - fm) / (2.0 * h)
    return g


def fd_hess(f, x, h_rel: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian (symmetric by construction)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.empty((n, n))
    hs = np.array([h_rel * max(1.0, abs(xi)) for xi in x])
    f0 = f(x)
    if not math.isfinite(f0):
        raise ValueError(f"non-finite evaluation at the expansion point: {f0!r}")
    for i in range(n):
        xp, xm = x.copy(), x.copy()
        xp[i] += hs[i]
        xm[i] -= hs[i]
        fp, fm = f(xp), f(xm)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise ValueError(f"non-finite evaluation while differencing coordinate {i}")
        H[i, i] = (fp - 2.0 * f0 + fm) / hs[i] ** 2
    for i in range(n):
        for j in range(i + 1, n):
            xpp, xpm, xmp, xmm = x.copy(), x.copy(), x.copy(), x.copy()
            xpp[[i, j]] += [hs[i], hs[j]]
            xpm[i] += hs[i]
            xpm[j] -= hs[j]
            xmp[i] -= hs[i]
            xmp[j] += hs[j]
            xmm[[i, j]] -= [hs[i], hs[j]]
            vals = [f(xpp), f(xpm), f(xmp), f(xmm)]
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(
                    f"non-finite evaluation while differencing coordinates ({i}, {j})"
                )
            H[i, j] = H[j, i] = (vals[0] - vals[1] - vals[2] + vals[3]) / (
                4.0 * hs[i] * hs[j]
            )
    return H


def mc_order_stat_mean(theta: core.Params, i: int, n: int, r: float,
                       n_rep: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of E[X_{i:n}^r] with its standard error.

    Draws n_rep independent samples of size n, sorts each, and averages
    the r-th power of the i-th smallest value.  Returns (mean, se).
    """
    if not (1 <= i <= n):
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    draws = core.sample(theta, n_rep * n, seed).reshape(n_rep, n)
    draws.sort(axis=1)
    vals = draws[:, i - 1] ** r
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n_rep))
    return mean, se
