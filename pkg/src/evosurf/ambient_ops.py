"""Surface differential operators built through the ambient embedding.

Everything in this module works in Cartesian coordinates.  A field that
lives on the surface is extended to a tubular neighbourhood by composing
it with the closest-point projection (a constant-normal extension: the
extension is constant along surface normals).  Ambient partial
derivatives of the extension are then approximated by central finite
differences, and tangential operators are recovered by projecting with
``P = I − n nᵀ`` at the evaluation point.

The finite differencing is deliberately *not* routed through the
forward-mode jets that power :mod:`evosurf.curv_ops` — no chain rule
through the parametrisation, no shared derivative code.  The two operator
families meet only at the surface itself, which is what makes their
agreement a meaningful consistency check rather than a tautology.

Cost model: every stencil point requires its own closest-point solve,
warm-seeded from the centre's parameters.  Those solves dominate, so they
are performed once per :class:`ExtensionStencil` and shared by all fields
and operators evaluated on that stencil.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import sabotage
from .charts import Chart, closest_point
from .errors import DomainError
from .geometry import SurfacePoint, value_of

__all__ = [
    "ExtensionStencil",
    "ambient_gradient",
    "ambient_jacobian",
    "grad_hat_scalar",
    "covderiv_hat",
    "div_hat_vector",
    "div_hat_tensor",
    "div_hat_tensor_of_transpose",
    "shape_from_normal",
    "pressure_pair_gradient",
]

# Stencil offsets come in (+, −) pairs along each ambient axis.
_SIGNS = (1.0, -1.0)


class ExtensionStencil:
    """Closest-point feet of a central-difference stencil.

    For each evaluation point ``x₀ = R(ξ)`` on the surface, the six
    ambient offsets ``x₀ ± h eⱼ`` are projected back onto the surface.
    The feet are stored as one batched :class:`SurfacePoint` (leading
    axis = stencil slot) so that any number of fields can be evaluated
    on them without re-solving.

    Parameters
    ----------
    chart:
        Surface parametrisation.
    params:
        Parameter pairs of the evaluation points, shape ``(..., 2)``.
    t:
        Time at which the surface is frozen.
    h:
        Finite-difference step.  Defaults to ``1e-4 × chart.scale``.
    center:
        Optional pre-built :class:`SurfacePoint` at ``params`` (saves a
        jet evaluation when the caller already has one).
    richardson:
        When true, an inner ``h/2`` stencil is solved as well and every
        difference quotient is Richardson-extrapolated, upgrading the
        truncation error from O(h²) to O(h⁴).
    """

    def __init__(
        self,
        chart: Chart,
        params: np.ndarray,
        t: float = 0.0,
        h: float | None = None,
        *,
        center: SurfacePoint | None = None,
        richardson: bool = False,
    ):
        params = np.asarray(params, dtype=float)
        if params.shape[-1] != 2:
            raise ValueError("params must have shape (..., 2)")
        if h is None:
            h = 1e-4 * chart.scale
        h = float(h)
        if not 0.0 < h < chart.reach_hint:
            raise DomainError(
                f"step h={h:g} leaves the certified tubular neighbourhood "
                f"(reach ≈ {chart.reach_hint:g}) of chart {chart.name!r}"
            )
        self.chart = chart
        self.t = float(t)
        self.h = h
        self.steps: tuple[float, ...] = (h, 0.5 * h) if richardson else (h,)
        self.batch = params.shape[:-1]

        if center is None:
            center = SurfacePoint(chart, params[..., 0], params[..., 1], t)
        self.center = center
        x0 = value_of(center.pos)

        # One offset slot per (step, axis, sign), ordered so slot
        # 6·s + 2·j + (0 for +, 1 for −) belongs to step s, axis j.
        offsets = np.array(
            [sg * step * np.eye(3)[j] for step in self.steps for j in range(3) for sg in _SIGNS]
        )
        k = offsets.shape[0]
        x = x0[np.newaxis] + offsets.reshape((k,) + (1,) * len(self.batch) + (3,))
        seed = np.broadcast_to(params, (k,) + self.batch + (2,))

        res = closest_point(
            chart,
            x.reshape(-1, 3),
            t,
            seed=np.ascontiguousarray(seed.reshape(-1, 2)),
        )
        foot_params = res.params.reshape((k,) + self.batch + (2,))
        self.d = res.distance.reshape((k,) + self.batch)
        worst = float(np.abs(self.d).max()) if self.d.size else 0.0
        if worst > chart.reach_hint:
            raise DomainError(
                f"stencil point lies {worst:g} from chart {chart.name!r}, "
                f"outside the certified tubular neighbourhood "
                f"(reach ≈ {chart.reach_hint:g})"
            )
        # Batched foot point: geometry for all stencil slots at once.
        self.feet = SurfacePoint(chart, foot_params[..., 0], foot_params[..., 1], t)

    # -- evaluation ---------------------------------------------------

    def values(self, field: Callable, extension: str = "constant") -> np.ndarray:
        """Extension values at every stencil slot.

        ``extension="constant"`` evaluates ``f(π(x))``;
        ``"quadratic_bump"`` multiplies by ``1 + d(x)²``, a different
        extension with the same restriction to the surface.  Operator
        values must agree between the two up to the O(h²) truncation
        error — a direct probe of extension independence.
        """
        v = value_of(field(self.feet))
        if extension == "quadratic_bump":
            fac = 1.0 + self.d**2
            v = v * fac.reshape(fac.shape + (1,) * (v.ndim - fac.ndim))
        elif extension != "constant":
            raise ValueError(f"unknown extension rule {extension!r}")
        return v

    def values_with_distance(self, fn: Callable) -> np.ndarray:
        """Evaluate ``fn(foot_point, signed_distance)`` at every slot.

        Used for composite extensions such as ``p∘π + d·(p¹∘π)`` whose
        off-surface behaviour is part of what is being tested.
        """
        return value_of(fn(self.feet, self.d))

    def diff(self, vals: np.ndarray) -> np.ndarray:
        """Central difference quotients along the ambient axes.

        ``vals`` has the stencil slot as leading axis; the result drops
        it and appends the derivative axis **last**: for vector values
        ``D[..., i, j] ≈ ∂uᵢ/∂xⱼ``.
        """
        vals = np.asarray(vals, dtype=float)
        out: np.ndarray | None = None
        for si, step in enumerate(self.steps):
            blk = vals[6 * si : 6 * si + 6]
            d = np.stack([(blk[2 * j] - blk[2 * j + 1]) / (2.0 * step) for j in range(3)], axis=-1)
            out = d if out is None else (4.0 * d - out) / 3.0
        assert out is not None
        return out

    def gradient(self, field: Callable, extension: str = "constant") -> np.ndarray:
        """Raw (unprojected) ambient derivative of the extension."""
        return self.diff(self.values(field, extension))


def _projector(st: ExtensionStencil) -> np.ndarray:
    return value_of(st.center.projector)


def ambient_gradient(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """∇̂φᵉ — ambient gradient of the extended scalar, shape (..., 3)."""
    return st.gradient(field, extension)


def ambient_jacobian(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """∇̂uᵉ — ambient Jacobian of the extended vector, (..., 3, 3)."""
    return st.gradient(field, extension)


def grad_hat_scalar(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """Tangential gradient via the embedding: P ∇̂φᵉ."""
    g = st.gradient(field, extension)
    return np.einsum("...ij,...j->...i", _projector(st), g)


def covderiv_hat(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """Covariant directional derivative via the embedding: P ∇̂uᵉ P."""
    jac = st.gradient(field, extension)
    p = _projector(st)
    return np.einsum("...ij,...jk,...kl->...il", p, jac, p)


def div_hat_vector(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """Surface divergence via the embedding: tr(P ∇̂uᵉ P)."""
    return np.einsum("...ii->...", covderiv_hat(field, st, extension=extension))


def _rowwise_div(jac3: np.ndarray, p: np.ndarray) -> np.ndarray:
    # jac3[..., i, k, j] = ∂ T_ik / ∂x_j ; row i is the vector (T_i0, T_i1, T_i2)
    # and its contribution is tr(P · Jac(row_i) · P).
    return np.einsum("...ab,...ibc,...ca->...i", p, jac3, p)


def div_hat_tensor(field, st: ExtensionStencil, *, extension: str = "constant") -> np.ndarray:
    """Row-wise surface divergence of a tensor field via the embedding.

    Component ``i`` is the embedded surface divergence of row ``i`` of
    the extended tensor.
    """
    jac3 = st.gradient(field, extension)
    return _rowwise_div(jac3, _projector(st))


def div_hat_tensor_of_transpose(
    field, st: ExtensionStencil, *, extension: str = "constant"
) -> np.ndarray:
    """The embedded counterpart of the curvilinear tensor divergence.

    The curvilinear divergence contracts the derivative index against
    the *first* tensor slot, the row-wise embedded divergence against
    the second — so matching them requires transposing the argument:
    this computes ``div̂_Γ(Tᵀ)``.  The ``drop_tensor_transpose``
    sabotage switch skips the transpose, which must break the
    comparison for any non-symmetric tensor.
    """
    jac3 = st.gradient(field, extension)
    if not sabotage.enabled("drop_tensor_transpose"):
        jac3 = np.swapaxes(jac3, -3, -2)
    return _rowwise_div(jac3, _projector(st))


def shape_from_normal(st: ExtensionStencil) -> np.ndarray:
    """Extended Weingarten map: B = −P ∇̂nᵉ P.

    The normal is extended like any other field (n∘π) and differenced;
    no exact normal derivatives enter.
    """
    jac = st.gradient(lambda sp: sp.normal)
    p = _projector(st)
    return -np.einsum("...ij,...jk,...kl->...il", p, jac, p)


def pressure_pair_gradient(p_field, p1_field, st: ExtensionStencil) -> np.ndarray:
    """Ambient gradient of the first-order extension p∘π + d·(p¹∘π).

    Its limit on the surface is ∇_Γ p + p¹ n: the tangential part comes
    from the leading term, the normal part from differentiating the
    signed distance.  Returned unprojected, shape (..., 3).
    """
    vals = st.values_with_distance(
        lambda sp, d: value_of(p_field(sp)) + d * value_of(p1_field(sp))
    )
    return st.diff(vals)
