"""Maximum-likelihood estimation for the generalized Kumaraswamy family.

Fitting works on any of the named sub-model patterns: the free
parameters are log-transformed (delta as log(delta + 1e-10) so the
boundary delta = 0 stays reachable), and a BFGS iteration with Armijo
backtracking climbs the log-likelihood from a small moment-matched
multi-start grid.  The score vector and observed information matrix are
analytic, written in compensated log-space forms so that observations
far into either tail do not overflow the intermediate products; both
are certified against finite differences in the test suite.

Standard errors come from the inverse of the observed information
restricted to the free coordinates, and nested models are compared with
the usual likelihood-ratio chi-square.  A delta estimate that lands on
its lower wall is reported as exactly 0 with a boundary flag; LR
p-values are still the plain chi-square recipe, which is conservative
for such boundary nulls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core, specfun
from .core import _PARAM_NAMES, Params, SubModel, SUBMODELS
from .specfun import log1mexp

__all__ = [
    "EstimationError",
    "Dataset",
    "FitOptions",
    "FitResult",
    "LrTestResult",
    "log_likelihood",
    "score",
    "observed_info",
    "default_init",
    "start_grid",
    "fit",
    "fit_family",
    "std_errors",
    "lr_test",
]

_PARAM_IDX = {n: i for i, n in enumerate(_PARAM_NAMES)}
_DELTA_EPS = 1e-10
_WALL = 30.0
_DELTA_WALL = math.log(_DELTA_EPS)


class EstimationError(RuntimeError):
    """Raised when a dataset cannot support the requested estimation."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """An observed sample on the open unit interval.

    Values exactly at 0 or 1 are rejected, not nudged; shrink the data
    explicitly first if it contains endpoints.  ``source`` is free-text
    provenance carried along for reports.
    """

    values: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size < 1:
            raise ValueError("dataset must contain at least one value")
        bad = np.flatnonzero(~(np.isfinite(v) & (v > 0.0) & (v < 1.0)))
        if bad.size:
            shown = ", ".join(str(int(i)) for i in bad[:8])
            more = "" if bad.size <= 8 else f" and {bad.size - 8} more"
            raise ValueError(
                f"values must lie strictly inside (0, 1); offending index "
                f"{shown}{more}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings for :func:`fit`.

    ``grad_tol`` is relative: iteration stops when the sup-norm of the
    log-parameter gradient drops below grad_tol * max(1, |loglik|).
    ``coord_scale`` rescales the optimizer's internal coordinates (it
    seeds the initial inverse-Hessian guess); the maximizer itself must
    not depend on it, which the tests exercise.
    """

    max_iter: int = 500
    grad_tol: float = 1e-6
    coord_scale: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.max_iter, int) and self.max_iter >= 1):
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        for name in ("grad_tol", "coord_scale"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite real, got {v!r}")


@dataclass(frozen=True)
class FitResult:
    """Outcome of one maximum-likelihood fit.

    ``grad_norm`` is the sup-norm of the score at ``theta_hat`` in the
    optimizer's log-parameter coordinates, projected at active walls
    (a gradient pointing into a wall counts as zero there).
    ``std_errors`` follows ``submodel.free_names`` order and is None
    when the fit failed or the restricted information matrix is not
    positive definite.  ``boundary`` names free parameters that ended
    on a transformation wall; delta on its lower wall is reported as
    exactly 0.
    """

    submodel: SubModel
    theta_hat: Params
    loglik: float
    std_errors: np.ndarray | None
    converged: bool
    iterations: int
    grad_norm: float
    boundary: tuple[str, ...] = ()


@dataclass(frozen=True)
class LrTestResult:
    """Likelihood-ratio comparison of a nested pair of fits."""

    statistic_w: float
    df: int
    p_value: float
    null_model: SubModel
    alt_model: SubModel


# ----------------------------------------------------------------------
# Log-likelihood, score, observed information.
# ----------------------------------------------------------------------


def log_likelihood(theta: Params, data: Dataset) -> float:
    """Sum of the log-density over the sample (may be -inf)."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        terms = core.log_pdf(theta, data.values)
    return float(np.sum(terms))


def _parts(theta: Params, x: np.ndarray):
    """Per-observation log-space building blocks shared by score/info.

    Everything downstream is assembled as exp(sum of logs) so that a
    large magnitude in one factor (say |log x| for a datum near zero)
    cancels inside the exponent instead of overflowing a product.
    """
    a, b, g, d, l = theta.as_tuple()
    lx = np.log(x)
    s = a * lx                       # log x^alpha            (< 0)
    la = log1mexp(s)                 # log(1 - x^alpha)       (< 0)
    bla = b * la
    ly = log1mexp(bla)               # log y                  (< 0)
    lly = l * ly
    lu = log1mexp(lly)               # log(1 - y^lambda)      (< 0)
    llx = np.log(-lx)                # log|log x|
    lla = np.log(-la)
    return lx, s, la, bla, ly, lly, lu, llx, lla


def score(theta: Params, data: Dataset) -> np.ndarray:
    """Analytic gradient of the log-likelihood in parameter order.

    Exact derivative of the log-density sum; components belonging to a
    structurally absent term (gamma*lambda = 1, delta = 0) are assembled
    without evaluating that term, so the zero coefficient never
    multiplies an overflowing factor.
    """
    a, b, g, d, l = theta.as_tuple()
    n = data.n
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lx, s, la, bla, ly, lly, lu, llx, lla = _parts(theta, data.values)
        gl1 = g * l - 1.0
        lb = math.log(b)

        u_alpha = n / a + float(np.sum(lx))
        u_beta = n / b + float(np.sum(la))
        if b != 1.0:
            # d/d alpha of (beta-1) log(1-x^alpha):  -(beta-1) x^alpha log x / (1-x^alpha)
            u_alpha -= (b - 1.0) * float(np.sum(-np.exp(s - la + llx)))
        if gl1 != 0.0:
            r_a = -np.exp(lb + s + (b - 1.0) * la - ly + llx)   # (dy/d alpha)/y
            r_b = np.exp(bla - ly + lla)                        # (dy/d beta)/y
            u_alpha += gl1 * float(np.sum(r_a))
            u_beta += gl1 * float(np.sum(r_b))
        if d != 0.0:
            va = -np.exp(lb + (l - 1.0) * ly - lu + s + (b - 1.0) * la + llx)
            vb = np.exp((l - 1.0) * ly - lu + bla + lla)
            u_alpha -= d * l * float(np.sum(va))
            u_beta -= d * l * float(np.sum(vb))

        u_gamma = -n * (specfun.digamma(g) - specfun.digamma(g + d + 1.0)) + l * float(
            np.sum(ly)
        )
        u_delta = -n * (specfun.digamma(d + 1.0) - specfun.digamma(g + d + 1.0)) + float(
            np.sum(lu)
        )
        u_lam = n / l + g * float(np.sum(ly))
        if d != 0.0:
            q = -np.exp(lly - lu + np.log(-ly))                 # y^l log y / (1-y^l)
            u_lam -= d * float(np.sum(q))
    return np.array([u_alpha, u_beta, u_gamma, u_delta, u_lam])


def observed_info(theta: Params, data: Dataset) -> np.ndarray:
    """Observed information J = -(Hessian of the log-likelihood), 5x5.

    Symmetric by construction.  Entries touching gamma and delta only
    through the beta-function normalizer are data-free trigamma terms;
    everything else is assembled from the same log-space blocks as the
    score.
    """
    a, b, g, d, l = theta.as_tuple()
    n = data.n
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lx, s, la, bla, ly, lly, lu, llx, lla = _parts(theta, data.values)
        gl1 = g * l - 1.0
        lb = math.log(b)
        t = np.exp(s)
        A = -np.expm1(s)
        lly_m = np.log(-ly)

        # First-derivative ratios reused in the products below.
        r_a = -np.exp(lb + s + (b - 1.0) * la - ly + llx)
        r_b = np.exp(bla - ly + lla)
        va = -np.exp(lb + (l - 1.0) * ly - lu + s + (b - 1.0) * la + llx)
        vb = np.exp((l - 1.0) * ly - lu + bla + lla)
        q = -np.exp(lly - lu + lly_m)

        H = np.zeros((5, 5))
        H[0, 0] = -n / a**2
        H[1, 1] = -n / b**2
        H[4, 4] = -n / l**2
        if b != 1.0:
            H[0, 0] -= (b - 1.0) * float(np.sum(np.exp(s - 2.0 * la + 2.0 * llx)))
        H[0, 1] = float(np.sum(np.exp(s - la + llx)))
        if gl1 != 0.0:
            curv = A - (b - 1.0) * t
            raa = b * curv * np.exp(s + (b - 2.0) * la - ly + 2.0 * llx)
            rab = -(1.0 + b * la) * np.exp(s + (b - 1.0) * la - ly + llx)
            rbb = -np.exp(bla - ly + 2.0 * lla)
            H[0, 0] += gl1 * float(np.sum(raa - r_a**2))
            H[0, 1] += gl1 * float(np.sum(rab - r_a * r_b))
            H[1, 1] += gl1 * float(np.sum(rbb - r_b**2))
        if d != 0.0:
            curv = A - (b - 1.0) * t
            base1 = (l - 2.0) * ly - lu                # v'(y) first piece
            base2 = 2.0 * (l - 1.0) * ly - 2.0 * lu    # v'(y) second piece
            com_a = 2.0 * lb + 2.0 * llx + 2.0 * s + 2.0 * (b - 1.0) * la
            com_ab = lb + s + (2.0 * b - 1.0) * la + llx + lla
            com_b = 2.0 * bla + 2.0 * lla
            vy_ya2 = (l - 1.0) * np.exp(com_a + base1) + l * np.exp(com_a + base2)
            vy_yayb = -(l - 1.0) * np.exp(com_ab + base1) - l * np.exp(com_ab + base2)
            vy_yb2 = (l - 1.0) * np.exp(com_b + base1) + l * np.exp(com_b + base2)
            v_yaa = b * curv * np.exp((l - 1.0) * ly - lu + s + (b - 2.0) * la + 2.0 * llx)
            v_yab = -(1.0 + b * la) * np.exp((l - 1.0) * ly - lu + s + (b - 1.0) * la + llx)
            v_ybb = -np.exp((l - 1.0) * ly - lu + bla + 2.0 * lla)
            H[0, 0] -= d * l * float(np.sum(vy_ya2 + v_yaa))
            H[0, 1] -= d * l * float(np.sum(vy_yayb + v_yab))
            H[1, 1] -= d * l * float(np.sum(vy_yb2 + v_ybb))
            H[4, 4] -= d * float(np.sum(np.exp(lly - 2.0 * lu + 2.0 * lly_m)))

        H[0, 2] = l * float(np.sum(r_a))
        H[1, 2] = l * float(np.sum(r_b))
        H[0, 3] = -l * float(np.sum(va))
        H[1, 3] = -l * float(np.sum(vb))
        H[0, 4] = g * float(np.sum(r_a))
        H[1, 4] = g * float(np.sum(r_b))
        if d != 0.0:
            # d(lambda v)/d lambda = v (1 + lambda log y / (1 - y^lambda))
            one_plus = 1.0 - np.exp(math.log(l) + lly_m - lu)
            H[0, 4] -= d * float(np.sum(va * one_plus))
            H[1, 4] -= d * float(np.sum(vb * one_plus))

        tg = specfun.trigamma(g + d + 1.0)
        H[2, 2] = -n * (specfun.trigamma(g) - tg)
        H[3, 3] = -n * (specfun.trigamma(d + 1.0) - tg)
        H[2, 3] = n * tg
        H[2, 4] = float(np.sum(ly))
        H[3, 4] = -float(np.sum(q))

        J = -(H + np.triu(H, 1).T)
    return J


# ----------------------------------------------------------------------
# Starting points.
# ----------------------------------------------------------------------


def default_init(data: Dataset, sub: SubModel) -> Params:
    """Moment-matched starting point projected onto the sub-model.

    Matches a beta distribution to the sample mean and variance to seed
    gamma and delta (alpha, beta, lambda start at 1), then overwrites
    the pattern's pinned coordinates.
    """
    if data.n < 2:
        raise ValueError("default_init needs at least two observations")
    m = float(np.mean(data.values))
    s2 = float(np.var(data.values))
    if s2 == 0.0:
        raise EstimationError("zero sample variance: all values are identical")
    c = max(m * (1.0 - m) / s2 - 1.0, 0.1)
    start = Params(
        alpha=1.0,
        beta=1.0,
        gamma=max(m * c, 0.05),
        delta=max((1.0 - m) * c - 1.0, 0.0),
        lam=1.0,
    )
    return _project(sub, start)


def start_grid(data: Dataset, sub: SubModel) -> list[Params]:
    """Multi-start lattice used by :func:`fit` when no init is given.

    The moment-matched centre plus two jittered copies with every free
    parameter scaled by 0.5 and by 2.  The jitter is deterministic, so
    repeated fits of the same data are reproducible.
    """
    centre = default_init(data, sub)
    rng = np.random.default_rng(20240817)
    out = [centre]
    vec = np.array(centre.as_tuple())
    free = [_PARAM_IDX[nm] for nm in sub.free_names]
    for scale in (0.5, 2.0):
        jit = np.exp(0.05 * rng.standard_normal(len(free)))
        v = vec.copy()
        v[free] = v[free] * scale * jit
        out.append(Params(*v))
    return out


def _project(sub: SubModel, theta: Params) -> Params:
    """Overwrite the pattern's pinned coordinates, keep the rest."""
    vals = dict(zip(_PARAM_NAMES, theta.as_tuple()))
    vals.update(sub.fixed_dict)
    return Params(**vals)


# ----------------------------------------------------------------------
# The optimizer: BFGS on log-parameters with wall projection.
# ----------------------------------------------------------------------


def _walls(free_idx: list[int]) -> tuple[np.ndarray, np.ndarray]:
    lower = np.full(len(free_idx), -_WALL)
    for j, i in enumerate(free_idx):
        if i == _PARAM_IDX["delta"]:
            lower[j] = _DELTA_WALL       # exp(wall) - eps == 0: delta = 0 reachable
    upper = np.full(len(free_idx), _WALL)
    return lower, upper


def _phi_to_value(phi: float, i: int) -> float:
    if i == _PARAM_IDX["delta"]:
        return max(math.exp(phi) - _DELTA_EPS, 0.0)
    return math.exp(phi)


def _value_to_phi(v: float, i: int) -> float:
    if i == _PARAM_IDX["delta"]:
        return math.log(v + _DELTA_EPS)
    return math.log(v)


def _make_objective(data: Dataset, sub: SubModel, free_idx: list[int], fixed: np.ndarray):
    """Return phi -> (negative loglik, gradient), None gradient on failure."""

    def val_grad(phi: np.ndarray):
        vec = fixed.copy()
        for j, i in enumerate(free_idx):
            vec[i] = _phi_to_value(float(phi[j]), i)
        try:
            theta = Params(*vec)
        except ValueError:
            return math.inf, None
        ll = log_likelihood(theta, data)
        if not math.isfinite(ll):
            return math.inf, None
        full = score(theta, data)
        g = np.empty(len(free_idx))
        for j, i in enumerate(free_idx):
            scale = vec[i] + _DELTA_EPS if i == _PARAM_IDX["delta"] else vec[i]
            g[j] = -full[i] * scale
        if np.any(np.isnan(g)):
            return -ll, None
        # An infinite component still points somewhere useful; cap it so
        # the line search can follow it to the wall.
        return -ll, np.clip(g, -1e30, 1e30)

    return val_grad


def _project_grad(g: np.ndarray, phi: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Zero descent components blocked by an active wall (minimizing)."""
    gp = g.copy()
    gp[(phi <= lower + 1e-9) & (gp > 0.0)] = 0.0
    gp[(phi >= upper - 1e-9) & (gp < 0.0)] = 0.0
    return gp


def _bfgs(val_grad, phi0, lower, upper, *, gtol: float, max_iter: int, h0: float):
    """Minimize val_grad over the box via BFGS with Armijo backtracking.

    Returns (phi, F, grad-or-None, iterations, converged).  Steps are
    clipped to the box; the convergence test uses the wall-projected
    gradient so a maximum pinned on a wall still counts as converged.
    """
    phi = np.clip(np.asarray(phi0, dtype=float), lower, upper)
    F, g = val_grad(phi)
    if g is None:
        return phi, F, None, 0, False
    k = phi.size
    H = np.eye(k) * h0 * h0
    it = 0
    converged = False
    while True:
        gp = _project_grad(g, phi, lower, upper)
        if float(np.max(np.abs(gp))) <= gtol * max(1.0, abs(F)):
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        moved = False
        for attempt in (0, 1):
            p = -(H @ g) if attempt == 0 else -gp
            if attempt == 0 and float(p @ g) >= 0.0:
                continue                      # H lost descent; use steepest
            step = 1.0
            for _ in range(40):
                cand = np.clip(phi + step * p, lower, upper)
                d = cand - phi
                if not np.any(d):
                    break
                Fc, gc = val_grad(cand)
                slope = float(d @ g)
                ok = (Fc <= F + 1e-4 * slope) if slope < 0.0 else (Fc < F)
                if gc is not None and ok:
                    yv = gc - g
                    sy = float(d @ yv)
                    if sy > 1e-10 * float(np.linalg.norm(d) * np.linalg.norm(yv)):
                        rho = 1.0 / sy
                        V = np.eye(k) - rho * np.outer(d, yv)
                        H = V @ H @ V.T + rho * np.outer(d, d)
                    phi, F, g = cand, Fc, gc
                    moved = True
                    break
                step *= 0.5
            if moved:
                break
            H = np.eye(k) * h0 * h0           # curvature reset before retry
        if not moved:
            break                             # both line searches exhausted
    return phi, F, g, it, converged


def fit(
    data: Dataset,
    sub: SubModel | str,
    init: Params | None = None,
    opts: FitOptions | None = None,
    *,
    extra_starts: tuple[Params, ...] = (),
) -> FitResult:
    """Maximize the log-likelihood over the sub-model's free parameters.

    Runs BFGS on log-transformed coordinates from the moment-matched
    multi-start grid (or from ``init`` when given), keeps the best run
    (ties broken by start order), and reports the result even when the
    gradient test was not met, flagged ``converged=False``.
    ``extra_starts`` appends additional starting points; each start is
    projected onto the sub-model's fixed pattern first.

    Parameters
    ----------
    data : Dataset
    sub : SubModel or registry key such as ``"Kw"``
    init : optional Params, replaces the default start grid
    opts : optional FitOptions
    """
    if isinstance(sub, str):
        sub = SUBMODELS[sub]
    opts = opts if opts is not None else FitOptions()
    if data.n < sub.free_count + 1:
        raise ValueError(
            f"{sub.name} has {sub.free_count} free parameters; need at least "
            f"{sub.free_count + 1} observations, got {data.n}"
        )
    if float(np.ptp(data.values)) == 0.0:
        raise EstimationError("degenerate sample: all values are identical")

    starts = [init] if init is not None else start_grid(data, sub)
    starts = [_project(sub, p) for p in [*starts, *extra_starts]]
    free_idx = [_PARAM_IDX[nm] for nm in sub.free_names]
    fixed = np.array(starts[0].as_tuple())
    lower, upper = _walls(free_idx)
    objective = _make_objective(data, sub, free_idx, fixed)

    best = None
    for si, p in enumerate(starts):
        phi0 = np.array([_value_to_phi(p.as_tuple()[i], i) for i in free_idx])
        phi, F, g, it, conv = _bfgs(
            objective, phi0, lower, upper,
            gtol=opts.grad_tol, max_iter=opts.max_iter, h0=opts.coord_scale,
        )
        key = (F, si)
        if best is None or key < best[0]:
            best = (key, phi, it, conv)
    (_, _), phi, iterations, _ = best

    # A run that stalls on the flat plateau a few transformed units short
    # of a wall is still a boundary estimate for reporting purposes.
    vec = fixed.copy()
    boundary = []
    di = _PARAM_IDX["delta"]
    for j, i in enumerate(free_idx):
        vec[i] = _phi_to_value(float(phi[j]), i)
        if phi[j] <= lower[j] + 5.0 or phi[j] >= upper[j] - 5.0:
            boundary.append(_PARAM_NAMES[i])
            if i == di and phi[j] <= lower[j] + 5.0:
                vec[i] = 0.0                  # the wall value is exactly zero
    theta_hat = Params(*vec)

    loglik = log_likelihood(theta_hat, data)
    grad_norm = math.inf
    if math.isfinite(loglik):
        full = score(theta_hat, data)
        g_phi = np.empty(len(free_idx))
        for j, i in enumerate(free_idx):
            scale = vec[i] + _DELTA_EPS if i == di else vec[i]
            g_phi[j] = full[i] * scale
        g_phi = np.where(np.isnan(g_phi), np.inf, g_phi)
        phi_hat = np.array([_value_to_phi(vec[i], i) for i in free_idx])
        grad_norm = float(np.max(np.abs(_project_grad(-g_phi, phi_hat, lower, upper))))
    converged = grad_norm <= opts.grad_tol * max(1.0, abs(loglik))

    result = FitResult(
        submodel=sub,
        theta_hat=theta_hat,
        loglik=loglik,
        std_errors=None,
        converged=converged,
        iterations=iterations,
        grad_norm=grad_norm,
        boundary=tuple(boundary),
    )
    if converged:
        ses = _se_from_info(observed_info(theta_hat, data), free_idx)
        if ses is not None:
            result = FitResult(
                submodel=sub, theta_hat=theta_hat, loglik=loglik,
                std_errors=ses, converged=converged, iterations=iterations,
                grad_norm=grad_norm, boundary=tuple(boundary),
            )
    return result


def fit_family(data: Dataset, names: tuple[str, ...] | None = None) -> dict[str, FitResult]:
    """Fit several sub-models, warm-starting richer ones from nested fits.

    Models are fitted in increasing order of free-parameter count; every
    completed fit whose pattern is a restriction of a later model is
    added to that model's start list.  This makes the maximized
    log-likelihoods respect the nesting order by construction (a warm
    start can only be improved on).  Returns results keyed by model
    name, in fitting order.
    """
    chosen = list(names) if names is not None else list(SUBMODELS)
    subs = sorted((SUBMODELS[nm] for nm in chosen), key=lambda m: (m.free_count, m.name))
    results: dict[str, FitResult] = {}
    for sub in subs:
        warm = tuple(
            r.theta_hat
            for nm, r in results.items()
            if SUBMODELS[nm].nests_within(sub) and math.isfinite(r.loglik)
        )
        results[sub.name] = fit(data, sub, extra_starts=warm)
    return results


# ----------------------------------------------------------------------
# Standard errors and likelihood-ratio tests.
# ----------------------------------------------------------------------


def _se_from_info(info: np.ndarray, free_idx: list[int]) -> np.ndarray | None:
    """Square roots of the inverse information diagonal on free coords.

    None when the restricted matrix has non-finite entries or is not
    positive definite -- no numbers are fabricated for a singular fit.
    """
    block = np.asarray(info, dtype=float)[np.ix_(free_idx, free_idx)]
    if not np.all(np.isfinite(block)):
        return None
    try:
        np.linalg.cholesky(block)
    except np.linalg.LinAlgError:
        return None
    inv = np.linalg.inv(block)
    diag = np.diag(inv)
    if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
        return None
    return np.sqrt(diag)


def std_errors(fit_result: FitResult, data: Dataset) -> np.ndarray | None:
    """Wald standard errors for the free parameters of a converged fit.

    Ordered like ``fit_result.submodel.free_names``.  Returns None when
    the information matrix restricted to the free coordinates is
    singular or indefinite.
    """
    if not fit_result.converged:
        raise ValueError("standard errors require a converged fit")
    free_idx = [_PARAM_IDX[nm] for nm in fit_result.submodel.free_names]
    return _se_from_info(observed_info(fit_result.theta_hat, data), free_idx)


def lr_test(null_fit: FitResult, alt_fit: FitResult) -> LrTestResult:
    """Likelihood-ratio chi-square for a properly nested pair of fits.

    The null sub-model must be a restriction of the alternative.  The
    statistic w = 2(l_alt - l_null) is clamped at zero (a tiny negative
    value is optimizer noise); the p-value is the upper chi-square tail
    with df equal to the difference in free parameter counts.
    """
    null_sub, alt_sub = null_fit.submodel, alt_fit.submodel
    if not null_sub.nests_within(alt_sub):
        raise ValueError(f"{null_sub.name} is not nested within {alt_sub.name}")
    w = max(2.0 * (alt_fit.loglik - null_fit.loglik), 0.0)
    df = alt_sub.free_count - null_sub.free_count
    p = specfun.reg_upper_inc_gamma(df / 2.0, w / 2.0)
    return LrTestResult(
        statistic_w=w,
        df=df,
        p_value=min(max(p, 0.0), 1.0),
        null_model=null_sub,
        alt_model=alt_sub,
    )
