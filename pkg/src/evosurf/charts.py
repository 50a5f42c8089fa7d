"""Parametrized evolving-surface charts and closest-point projection.

A chart is a smooth map R(ξ¹, ξ², t) → ℝ³ over a rectangular parameter
domain.  Charts are the single source of geometry in this library: every
derivative downstream (tangents, curvature, material velocity) is produced
by evaluating the chart map on second-order jets, never by finite
differences.

Conventions
-----------
* ``map`` must be *jet-polymorphic*: it is called with plain floats/arrays
  or with :class:`evosurf.jets.Jet` values in any argument slot and must be
  written in terms of the polymorphic helpers in :mod:`evosurf.jets`
  (``sin``, ``stack``, arithmetic, …).
* The unit normal convention is n = g₁×g₂ / ‖g₁×g₂‖ with g_α = ∂_αR; the
  optional closed-form ``normal`` map must reproduce exactly that vector
  (it is cross-checked whenever a frame is built).  A closed form is only
  *required* when the normal itself has to be differentiated twice, e.g.
  for divergences of curvature-bearing tensors.
* ``velocity`` optionally gives the material velocity v̄(ξ,t) in closed
  form; it must equal ∂R/∂t and is cross-checked against the time slot of
  the position jet.
* Axes may be periodic (their period is the domain span).  ``margin``
  excludes a strip at each non-singular chart edge from sampling so tests
  stay away from coordinate degeneracies (e.g. sphere poles).
"""

from __future__ import annotations

import dataclasses
from collections import OrderedDict
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import jets as J
from .errors import (
    DomainError,
    ImmersionError,
    ProjectionAmbiguityError,
    ProjectionConvergenceError,
)

__all__ = [
    "Chart",
    "ClosestPointResult",
    "chart_state",
    "position_jet",
    "closest_point",
    "seed_grid",
    "param_grid",
    "interior_samples",
    "reparametrize",
]


@dataclasses.dataclass(frozen=True)
class Chart:
    """An evolving parametrized surface patch.

    Parameters
    ----------
    name : str
        Identifier used in reports and cache keys.
    map : callable
        ``map(ξ¹, ξ², t) -> (..., 3)`` position, jet-polymorphic.
    domain : ((lo1, hi1), (lo2, hi2))
        Parameter rectangle.
    periodic : (bool, bool)
        Periodicity per axis; periodic coordinates are wrapped into the
        domain instead of range-checked.
    margin : (float, float)
        Strip excluded from sampling at each end of the respective axis.
    normal : callable, optional
        Closed-form unit normal ``(ξ¹, ξ², t) -> (..., 3)`` matching the
        g₁×g₂ orientation.
    velocity : callable, optional
        Closed-form material velocity v̄(ξ,t) = ∂R/∂t.
    eps_imm : float
        Immersion margin: ‖g₁×g₂‖ below this raises ``ImmersionError``.
    scale : float
        Characteristic length; finite-difference steps and projection
        tolerances are expressed relative to it.
    reach_hint : float
        Radius of a tubular neighborhood inside which the closest-point
        projection is expected to be single-valued.  Not computed from the
        geometry — configured per surface.
    """

    name: str
    map: Callable
    domain: tuple[tuple[float, float], tuple[float, float]]
    periodic: tuple[bool, bool] = (False, False)
    margin: tuple[float, float] = (0.0, 0.0)
    normal: Optional[Callable] = None
    velocity: Optional[Callable] = None
    eps_imm: float = 1e-6
    scale: float = 1.0
    reach_hint: float = 1.0

    def wrap(self, p):
        """Fold periodic coordinates into the domain; range-check the rest.

        Accepts and returns an array of shape (..., 2).  Raises
        ``DomainError`` when a non-periodic coordinate leaves its interval
        (beyond a 1e-9·span slack).
        """
        p = np.array(p, dtype=float, copy=True)
        for a in (0, 1):
            lo, hi = self.domain[a]
            if self.periodic[a]:
                p[..., a] = np.mod(p[..., a] - lo, hi - lo) + lo
            else:
                slack = 1e-9 * (hi - lo)
                x = p[..., a]
                if np.any(x < lo - slack) or np.any(x > hi + slack):
                    bad = x[(x < lo - slack) | (x > hi + slack)]
                    raise DomainError(
                        f"chart {self.name!r}: coordinate {a + 1} value "
                        f"{float(np.ravel(bad)[0]):.6g} outside [{lo}, {hi}]"
                    )
                p[..., a] = np.clip(x, lo, hi)
        return p

    def clamp(self, p):
        """Like :meth:`wrap` but clamps instead of raising (solver use)."""
        p = np.array(p, dtype=float, copy=True)
        for a in (0, 1):
            lo, hi = self.domain[a]
            if self.periodic[a]:
                p[..., a] = np.mod(p[..., a] - lo, hi - lo) + lo
            else:
                p[..., a] = np.clip(p[..., a], lo, hi)
        return p


def chart_state(chart: Chart, xi1, xi2, t, order: int = 2, check: bool = True):
    """Wrap/check parameters, build jet variables, evaluate the map.

    Returns ``(v1, v2, vt, pos)``: the three variable jets over (ξ¹, ξ², t)
    and the position jet.  The variables are handed back so callers can
    evaluate *further* closed forms (normals, velocities, fields) in the
    same differentiation frame as the position.
    """
    p = chart.wrap(np.stack(np.broadcast_arrays(
        np.asarray(xi1, float), np.asarray(xi2, float)), axis=-1))
    v1, v2, vt = J.variables([p[..., 0], p[..., 1], np.asarray(t, float)], order=order)
    pos = chart.map(v1, v2, vt)
    if check:
        if not np.all(np.isfinite(pos.value)):
            raise DomainError(f"chart {chart.name!r}: non-finite position")
        if order >= 1:
            cr = np.cross(pos.grad[..., 0], pos.grad[..., 1])
            nrm = np.linalg.norm(cr, axis=-1)
            if np.any(nrm < chart.eps_imm):
                raise ImmersionError(
                    f"chart {chart.name!r}: ‖g₁×g₂‖ = {float(np.min(nrm)):.3e} "
                    f"below immersion margin {chart.eps_imm:.1e}"
                )
    return v1, v2, vt, pos


def position_jet(chart: Chart, xi1, xi2, t, order: int = 2, check: bool = True):
    """Evaluate the chart map as a jet over the three variables (ξ¹, ξ², t).

    Returns a Jet whose value has shape (..., 3); ``grad[..., i, a]`` holds
    ∂_a R_i with a ∈ {ξ¹, ξ², t}.  With ``check`` the result is guarded for
    finiteness (→ ``DomainError``) and for the immersion condition
    ‖g₁×g₂‖ ≥ eps_imm (→ ``ImmersionError``).
    """
    return chart_state(chart, xi1, xi2, t, order=order, check=check)[3]


def param_grid(chart: Chart, n1: int, n2: int, extra: float = 0.0):
    """Cell-centred parameter grid respecting margins, shape (n1·n2, 2).

    Periodic axes tile the full period; non-periodic axes inset by the
    chart margin plus ``extra``.
    """
    axes = []
    for a, n in ((0, n1), (1, n2)):
        lo, hi = chart.domain[a]
        if chart.periodic[a]:
            axes.append(lo + (hi - lo) * (np.arange(n) + 0.5) / n)
        else:
            m = chart.margin[a] + extra
            axes.append(lo + m + (hi - lo - 2 * m) * (np.arange(n) + 0.5) / n)
    A, B = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.stack([A.ravel(), B.ravel()], axis=-1)


def interior_samples(chart: Chart, n: int, rng: np.random.Generator, extra: float = 0.0):
    """Uniform random parameters in the margin-respecting interior, (n, 2)."""
    out = np.empty((n, 2))
    for a in (0, 1):
        lo, hi = chart.domain[a]
        m = (0.0 if chart.periodic[a] else chart.margin[a] + extra)
        out[:, a] = rng.uniform(lo + m, hi - m, size=n)
    return out


# --------------------------------------------------------------------------
# closest-point projection
# --------------------------------------------------------------------------

class ClosestPointResult(NamedTuple):
    """Foot-point data: π = x − d·n(ξ*) with (x − π) ∥ n."""

    params: np.ndarray    # ξ* — (2,) or (N, 2)
    foot: np.ndarray      # π — (3,) or (N, 3)
    distance: np.ndarray  # signed d, positive on the +n side
    normal: np.ndarray    # n(ξ*)
    iterations: np.ndarray


_SEED_CACHE: OrderedDict = OrderedDict()
_SEED_CACHE_MAX = 64


def seed_grid(chart: Chart, t: float, res: int = 64):
    """Cached (params, positions) of a coarse chart grid at time t."""
    key = (id(chart), chart.name, float(t), int(res))
    hit = _SEED_CACHE.get(key)
    if hit is not None:
        _SEED_CACHE.move_to_end(key)
        return hit[1], hit[2]
    params = param_grid(chart, res, res)
    pts = np.asarray(chart.map(params[:, 0], params[:, 1], float(t)), float)
    _SEED_CACHE[key] = (chart, params, pts)  # keep chart alive so id() stays unique
    while len(_SEED_CACHE) > _SEED_CACHE_MAX:
        _SEED_CACHE.popitem(last=False)
    return params, pts


def _pos2(chart: Chart, p, t, order=2):
    """Position jet in the two surface variables only (t frozen)."""
    v1, v2 = J.variables([p[..., 0], p[..., 1]], order=order)
    return chart.map(v1, v2, float(t))


def _solve2(H, g):
    """Batched 2×2 solve H δ = -g with explicit determinant; returns (δ, ok)."""
    det = H[..., 0, 0] * H[..., 1, 1] - H[..., 0, 1] * H[..., 1, 0]
    tr = H[..., 0, 0] + H[..., 1, 1]
    ok = (det > 1e-300) & (tr > 0.0)
    d = np.where(ok, det, 1.0)
    d0 = (-g[..., 0] * H[..., 1, 1] + g[..., 1] * H[..., 0, 1]) / d
    d1 = (-g[..., 1] * H[..., 0, 0] + g[..., 0] * H[..., 1, 0]) / d
    return np.stack([d0, d1], axis=-1), ok


def closest_point(
    chart: Chart,
    x,
    t: float = 0.0,
    *,
    seed=None,
    grid_res: int = 64,
    tol: float = 1e-12,
    maxiter: int = 50,
    ambiguity_check: Optional[bool] = None,
) -> ClosestPointResult:
    """Project ambient points onto Γ(t) by damped Newton on ½‖x − R(ξ)‖².

    The iteration uses the exact Hessian JᵀJ + (R−x)·∂²R from second-order
    jets, falling back to a Levenberg-damped Gauss–Newton step when that
    matrix is indefinite.  Seeds come from the best node of a cached
    ``grid_res``² chart grid, or from ``seed`` (same leading shape as
    ``x``) for warm starts, e.g. neighbouring finite-difference stencil
    points.

    Convergence criterion: ‖P(ξ)(x − π)‖ ≤ tol·scale (first-order
    optimality of the foot point).  Failure raises
    ``ProjectionConvergenceError`` carrying the best iterate.

    With ``ambiguity_check`` (default: on exactly when no ``seed`` is
    given), grid nodes far from the winning seed whose distance to x ties
    it are re-solved; a second foot at equal distance (within 1e-9·scale)
    raises ``ProjectionAmbiguityError``.
    """
    x = np.asarray(x, float)
    single = x.ndim == 1
    X = x.reshape(-1, 3)
    N = X.shape[0]
    if ambiguity_check is None:
        ambiguity_check = seed is None

    competitors = None
    if seed is not None:
        p = chart.clamp(np.asarray(seed, float).reshape(-1, 2))
        if p.shape[0] != N:
            raise ValueError("seed must match the number of query points")
    else:
        gp, gx = seed_grid(chart, t, grid_res)
        p = np.empty((N, 2))
        if ambiguity_check:
            competitors = [None] * N
        # chunk the (N, M) distance matrix to bound memory
        step = max(1, int(4e6) // max(1, gx.shape[0]))
        for i0 in range(0, N, step):
            blk = slice(i0, min(N, i0 + step))
            D2 = ((X[blk, None, :] - gx[None, :, :]) ** 2).sum(-1)
            ib = np.argmin(D2, axis=1)
            p[blk] = gp[ib]
            if ambiguity_check:
                _screen_competitors(chart, D2, ib, gp, grid_res,
                                    competitors, i0)

    tol_eff = max(tol * chart.scale, 1e-15)
    lam = np.zeros(N)
    iters = np.zeros(N, dtype=int)
    active = np.ones(N, dtype=bool)
    f_cur = 0.5 * ((np.asarray(chart.map(p[:, 0], p[:, 1], float(t)), float) - X) ** 2).sum(-1)

    for _ in range(maxiter):
        if not active.any():
            break
        ia = np.nonzero(active)[0]
        pos = _pos2(chart, p[ia], t)
        r = pos.value - X[ia]
        Jm = pos.grad                       # (n, 3, 2)
        Hm = pos.hess_matrix()              # (n, 3, 2, 2)
        g = np.einsum("nia,ni->na", Jm, r)
        JtJ = np.einsum("nia,nib->nab", Jm, Jm)
        H = JtJ + np.einsum("ni,niab->nab", r, Hm)

        # first-order optimality ‖P r‖ = √(gᵀ (JᵀJ)⁻¹ g)
        c, ok_m = _solve2(JtJ, g)
        if not ok_m.all():
            raise ImmersionError(
                f"chart {chart.name!r}: metric became singular during projection")
        prn = np.sqrt(np.maximum(0.0, -(c * g).sum(-1)))
        done = prn <= tol_eff
        if done.any():
            active[ia[done]] = False
            ia = ia[~done]
            if ia.size == 0:
                continue
            keep = ~done
            g, JtJ, H = g[keep], JtJ[keep], H[keep]
        iters[ia] += 1

        # Damped Newton: shift H just past positive definite (plus the LM
        # multiplier) so the step never follows an indefinite model.  Plain
        # Gauss–Newton is NOT a safe fallback here — for |d|·curvature ≥ 1
        # (e.g. points near a symmetry axis) it overshoots and oscillates.
        s = 0.5 * (JtJ[..., 0, 0] + JtJ[..., 1, 1])
        htr = H[..., 0, 0] + H[..., 1, 1]
        hdet = H[..., 0, 0] * H[..., 1, 1] - H[..., 0, 1] * H[..., 1, 0]
        eigmin = 0.5 * (htr - np.sqrt(np.maximum(0.0, htr * htr - 4.0 * hdet)))
        shift = np.maximum(0.0, -eigmin) + (1e-9 + lam[ia]) * s
        delta, okH = _solve2(H + shift[:, None, None] * np.eye(2), g)
        delta = np.where(okH[:, None], delta, -g / s[:, None])

        # Backtracking line search on the plain objective.  Near the foot
        # point the attainable decrease underflows the float resolution of
        # f, so a tiny full Newton step with positive-definite H is trusted
        # up to the evaluation noise of f itself (it contracts
        # quadratically; rejecting it would stall the iteration).
        alpha = np.ones(len(ia))
        improved = np.zeros(len(ia), dtype=bool)
        p_new = p[ia].copy()
        auto = okH & (np.linalg.norm(delta, axis=-1) <= 1e-6 * chart.scale)
        f_noise = 1e-13 * chart.scale**2
        for _bt in range(7):
            trial = chart.clamp(p[ia] + alpha[:, None] * delta)
            fv = 0.5 * ((np.asarray(chart.map(trial[:, 0], trial[:, 1], float(t)), float)
                         - X[ia]) ** 2).sum(-1)
            better = ~improved & ((fv < f_cur[ia])
                                  | (auto & (fv <= f_cur[ia] + f_noise)))
            p_new[better] = trial[better]
            f_cur[ia[better]] = fv[better]
            improved |= better
            if improved.all():
                break
            auto &= False
            alpha[~improved] *= 0.5
        p[ia] = np.where(improved[:, None], p_new, p[ia])
        lam[ia] = np.where(improved, lam[ia] / 3.0, np.maximum(lam[ia] * 10.0, 1e-6))

    if active.any():
        bad = np.nonzero(active)[0]
        err = ProjectionConvergenceError(
            f"chart {chart.name!r}: {bad.size} projection(s) failed to reach "
            f"optimality {tol_eff:.1e} in {maxiter} iterations",
            best={"params": p[bad], "points": X[bad]},
        )
        raise err

    res = _finish(chart, p, X, t, iters)

    if competitors is not None and any(c is not None for c in competitors):
        _resolve_ambiguity(chart, X, t, res, competitors, tol)

    if single:
        return ClosestPointResult(res.params[0], res.foot[0],
                                  res.distance[0], res.normal[0],
                                  res.iterations[0])
    return res


def _finish(chart, p, X, t, iters):
    if chart.normal is not None:
        n = np.asarray(chart.normal(p[:, 0], p[:, 1], float(t)), float)
        foot = np.asarray(chart.map(p[:, 0], p[:, 1], float(t)), float)
    else:
        pos = _pos2(chart, p, t, order=1)
        foot = pos.value
        cr = np.cross(pos.grad[..., 0], pos.grad[..., 1])
        n = cr / np.linalg.norm(cr, axis=-1, keepdims=True)
    d = ((X - foot) * n).sum(-1)
    return ClosestPointResult(p, foot, d, n, iters)


def _screen_competitors(chart, D2, ib, gp, res, competitors, offset):
    """Mark grid nodes that tie the winning seed but sit far away on the grid."""
    M = D2.shape[1]
    slack = 1e-3 * chart.scale
    dbest = np.sqrt(D2[np.arange(D2.shape[0]), ib])
    close = D2 <= (dbest[:, None] + slack) ** 2
    if not close.any():
        return
    cells = np.stack(np.unravel_index(np.arange(M), (res, res)), axis=-1)
    min_sep = max(4, res // 8)
    for i in np.nonzero(close.sum(1) > 1)[0]:
        cb = cells[ib[i]]
        cand = np.nonzero(close[i])[0]
        dc = np.abs(cells[cand] - cb[None, :])
        for a in (0, 1):
            if chart.periodic[a]:
                dc[:, a] = np.minimum(dc[:, a], res - dc[:, a])
        far = cand[dc.max(axis=1) >= min_sep]
        if far.size:
            # remember the closest far-away tie as the competitor seed
            j = far[np.argmin(D2[i, far])]
            competitors[offset + i] = gp[j]


def _resolve_ambiguity(chart, X, t, res, competitors, tol):
    for i, cseed in enumerate(competitors):
        if cseed is None:
            continue
        try:
            alt = closest_point(chart, X[i], t, seed=cseed,
                                tol=tol, ambiguity_check=False)
        except ProjectionConvergenceError:
            continue
        sep = np.linalg.norm(alt.foot - res.foot[i])
        if sep > 1e-5 * chart.scale and \
                abs(abs(alt.distance) - abs(res.distance[i])) <= 1e-9 * chart.scale:
            raise ProjectionAmbiguityError(
                f"chart {chart.name!r}: point {X[i]} has two closest-point "
                f"feet at equal distance {abs(res.distance[i]):.6g} "
                f"(separation {sep:.3g})"
            )


def reparametrize(chart: Chart, diffeo: Callable, domain, *, name: Optional[str] = None,
                  periodic=(False, False), margin=(0.0, 0.0)) -> Chart:
    """Precompose a chart with a parameter-space diffeomorphism.

    ``diffeo(η¹, η²) -> (ξ¹, ξ²)`` must be jet-polymorphic and
    time-independent, so the reparametrized chart traces the same material
    trajectories (v̄ is attached to fixed parameters).  Used by the
    invariance tests: geometric quantities must not care which parameters
    the surface came from.
    """
    def newmap(e1, e2, tt):
        x1, x2 = diffeo(e1, e2)
        return chart.map(x1, x2, tt)

    newnormal = None
    if chart.normal is not None:
        def newnormal(e1, e2, tt, _n=chart.normal):
            x1, x2 = diffeo(e1, e2)
            return _n(x1, x2, tt)

    newvelocity = None
    if chart.velocity is not None:
        def newvelocity(e1, e2, tt, _v=chart.velocity):
            x1, x2 = diffeo(e1, e2)
            return _v(x1, x2, tt)

    return Chart(
        name=name or chart.name + "~reparam",
        map=newmap,
        domain=tuple(tuple(map(float, iv)) for iv in domain),
        periodic=tuple(periodic),
        margin=tuple(margin),
        normal=newnormal,
        velocity=newvelocity,
        eps_imm=chart.eps_imm,
        scale=chart.scale,
        reach_hint=chart.reach_hint,
    )
