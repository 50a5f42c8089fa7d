"""Truncated Taylor (forward-mode) arithmetic of order one and two.

This is the single exact-derivative source in the kernel.  Every chart map and
every field evaluator is an ordinary Python function built from the
operations in this module; calling it with :func:`variables` as inputs yields
values together with exact first and second partials.  Finite differences
appear nowhere in this layer -- they live in the ambient-operator module and
in the test oracles, on purpose, so the two derivative sources stay
independent.

Conventions
-----------
* A :class:`Jet` carries ``value`` (any array shape ``S``), ``grad`` of shape
  ``S + (nv,)`` and, for order-2 jets, ``hess`` of shape ``S + (nv*(nv+1)//2,)``.
  ``nv`` is the number of independent variables; the kernel mostly uses
  ``nv = 3`` for (xi1, xi2, t) and (xi1, xi2, zeta).
* The Hessian is stored as the packed upper triangle, pairs ordered
  ``(0,0), (0,1), ..., (0,nv-1), (1,1), ...``.  Storage makes symmetry exact;
  ``hess_matrix()`` unpacks on demand.
* Binary operations between jets of different order degrade to the lower
  order.  Plain numbers/arrays are treated as constants.
* Everything broadcasts like numpy over the value shape: batched evaluation
  is just passing array-valued variables.
* The module-level ``sin``/``cos``/... wrappers fall back to numpy for
  non-jet inputs, so the same map function serves three purposes: fast plain
  evaluation, order-1 jets (e.g. inside the closest-point solver) and full
  order-2 jets.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = [
    "Jet", "variables", "constant", "asjet", "partial",
    "sin", "cos", "exp", "log", "sqrt",
    "stack", "jsum", "dot", "cross", "outer", "matvec", "matmul",
    "transpose2", "trace2", "norm",
]


def _pair_layout(nv: int):
    """Index bookkeeping for the packed upper triangle with ``nv`` variables.

    Returns (ii, jj, pidx) where ii/jj are the row/column of each packed slot
    and pidx[i, j] is the packed slot of the (i, j) entry.
    """
    ii, jj = [], []
    pidx = np.empty((nv, nv), dtype=np.intp)
    k = 0
    for i in range(nv):
        for j in range(i, nv):
            ii.append(i)
            jj.append(j)
            pidx[i, j] = pidx[j, i] = k
            k += 1
    return np.array(ii, dtype=np.intp), np.array(jj, dtype=np.intp), pidx


_LAYOUTS: dict[int, tuple] = {}


def _layout(nv: int):
    lay = _LAYOUTS.get(nv)
    if lay is None:
        lay = _LAYOUTS[nv] = _pair_layout(nv)
    return lay


def _npairs(nv: int) -> int:
    return nv * (nv + 1) // 2


class Jet:
    """Value with exact first (and optionally second) partial derivatives."""

    __slots__ = ("value", "grad", "hess")

    # make numpy defer to our __radd__ etc. instead of broadcasting into
    # object arrays
    __array_ufunc__ = None

    def __init__(self, value, grad, hess=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = None if hess is None else np.asarray(hess, dtype=float)
        ev = self.value.shape + (self.nv,)
        if self.grad.shape != ev:
            self.grad = np.broadcast_to(self.grad, ev)
        if self.hess is not None:
            eh = self.value.shape + (_npairs(self.nv),)
            if self.hess.shape != eh:
                self.hess = np.broadcast_to(self.hess, eh)

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------
    @property
    def nv(self) -> int:
        return self.grad.shape[-1]

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    @property
    def shape(self):
        return self.value.shape

    def hess_matrix(self) -> np.ndarray:
        """Unpack the Hessian to full ``S + (nv, nv)`` (exactly symmetric)."""
        if self.hess is None:
            raise ValueError("order-1 jet has no Hessian")
        _, _, pidx = _layout(self.nv)
        return self.hess[..., pidx]

    def lower(self) -> "Jet":
        """Drop to order 1 (shares arrays)."""
        return Jet.__new__(Jet)._init_raw(self.value, self.grad, None)

    def _init_raw(self, value, grad, hess):
        self.value = value
        self.grad = grad
        self.hess = hess
        return self

    def __repr__(self):
        return (f"Jet(order={self.order}, nv={self.nv}, "
                f"shape={self.value.shape}, value={self.value!r})")

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        ext = key + (slice(None),)
        return Jet(self.value[key], self.grad[ext],
                   None if self.hess is None else self.hess[ext])

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            h = None
            if self.hess is not None and other.hess is not None:
                h = self.hess + other.hess
            return Jet(self.value + other.value, self.grad + other.grad, h)
        c = np.asarray(other, dtype=float)
        return Jet(self.value + c, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.grad,
                   None if self.hess is None else -self.hess)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            v = self.value * other.value
            g = (self.grad * other.value[..., None]
                 + self.value[..., None] * other.grad)
            h = None
            if self.hess is not None and other.hess is not None:
                ii, jj, _ = _layout(self.nv)
                h = (self.hess * other.value[..., None]
                     + self.value[..., None] * other.hess
                     + self.grad[..., ii] * other.grad[..., jj]
                     + self.grad[..., jj] * other.grad[..., ii])
            return Jet(v, g, h)
        c = np.asarray(other, dtype=float)
        cc = c[..., None]
        return Jet(self.value * c, self.grad * cc,
                   None if self.hess is None else self.hess * cc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        p = float(p)
        v = self.value
        return self._chain(v ** p, p * v ** (p - 1.0),
                           p * (p - 1.0) * v ** (p - 2.0))

    def _reciprocal(self):
        r = 1.0 / self.value
        return self._chain(r, -r * r, 2.0 * r * r * r)

    def _chain(self, f0, f1, f2):
        """Apply a scalar function with given value/1st/2nd derivative arrays."""
        g = self.grad * f1[..., None]
        h = None
        if self.hess is not None:
            ii, jj, _ = _layout(self.nv)
            h = (self.hess * f1[..., None]
                 + self.grad[..., ii] * self.grad[..., jj] * f2[..., None])
        return Jet(f0, g, h)

    # elementary functions -------------------------------------------------
    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(c, -s, -c)

    def exp(self):
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def log(self):
        v = self.value
        return self._chain(np.log(v), 1.0 / v, -1.0 / (v * v))

    def sqrt(self):
        r = np.sqrt(self.value)
        f1 = 0.5 / r
        return self._chain(r, f1, -0.5 * f1 / self.value)


# ----------------------------------------------------------------------
# constructors
# ----------------------------------------------------------------------

def variables(values: Sequence, order: int = 2) -> list[Jet]:
    """Promote ``values`` (scalars or broadcastable arrays) to independent
    jet variables.  ``variables([x1, x2, t])`` gives three jets with
    ``nv = 3`` and one-hot gradients."""
    nv = len(values)
    out = []
    for k, val in enumerate(values):
        v = np.asarray(val, dtype=float)
        g = np.zeros(v.shape + (nv,))
        g[..., k] = 1.0
        h = np.zeros(v.shape + (_npairs(nv),)) if order == 2 else None
        out.append(Jet(v, g, h))
    return out


def constant(x, nv: int, order: int = 2) -> Jet:
    v = np.asarray(x, dtype=float)
    g = np.zeros(v.shape + (nv,))
    h = np.zeros(v.shape + (_npairs(nv),)) if order == 2 else None
    return Jet(v, g, h)


def asjet(x, like: Jet) -> Jet:
    """Lift ``x`` to a constant jet matching ``like``'s nv and order."""
    if isinstance(x, Jet):
        return x
    return constant(x, like.nv, like.order)


def partial(f: Jet, k: int):
    """Exact partial derivative along variable ``k``.

    An order-2 jet yields an order-1 jet of the derivative (so the result
    can be differentiated once more); an order-1 jet yields the plain value
    array of the derivative.
    """
    if f.hess is None:
        return f.grad[..., k]
    _, _, pidx = _layout(f.nv)
    rows = pidx[k]                      # packed slots of (k, mu) for all mu
    return Jet(f.grad[..., k], f.hess[..., rows], None)


# ----------------------------------------------------------------------
# polymorphic helpers (Jet or plain numpy)
# ----------------------------------------------------------------------

def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else np.sqrt(x)


def _norm_axis(axis: int, ndim: int) -> int:
    return axis + ndim if axis < 0 else axis


def stack(parts, axis: int = -1):
    """Stack jets (or arrays) along an axis of the *value* shape.

    Parts broadcast against each other first, so scalars mix freely with
    batched jets."""
    if not any(isinstance(p, Jet) for p in parts):
        return np.stack(np.broadcast_arrays(*parts), axis=axis)
    proto = next(p for p in parts if isinstance(p, Jet))
    parts = [asjet(p, proto) for p in parts]
    shape = np.broadcast_shapes(*(p.value.shape for p in parts))
    nv, npr = proto.nv, _npairs(proto.nv)
    ax = _norm_axis(axis, len(shape) + 1)
    v = np.stack([np.broadcast_to(p.value, shape) for p in parts], axis=ax)
    g = np.stack([np.broadcast_to(p.grad, shape + (nv,)) for p in parts], axis=ax)
    h = None
    if all(p.hess is not None for p in parts):
        h = np.stack([np.broadcast_to(p.hess, shape + (npr,)) for p in parts], axis=ax)
    return Jet(v, g, h)


def jsum(x, axis: int = -1):
    """Sum over an axis of the value shape."""
    if not isinstance(x, Jet):
        return np.sum(x, axis=axis)
    ax = _norm_axis(axis, x.value.ndim)
    return Jet(x.value.sum(axis=ax), x.grad.sum(axis=ax),
               None if x.hess is None else x.hess.sum(axis=ax))


def dot(a, b, axis: int = -1):
    return jsum(a * b, axis=axis)


def norm(a, axis: int = -1):
    return sqrt(dot(a, a, axis=axis))


def cross(a, b):
    """Cross product over a trailing length-3 axis."""
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.cross(a, b)
    if not isinstance(a, Jet):
        a = asjet(a, b)
    c = [a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
         a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
         a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]]
    return stack(c, axis=-1)


def outer(a, b):
    """Outer product ``a_i b_j`` over trailing axes -> (..., n, m)."""
    if isinstance(a, Jet) or isinstance(b, Jet):
        return a[..., :, None] * b[..., None, :] if isinstance(a, Jet) \
            else np.asarray(a)[..., :, None] * b[..., None, :]
    return np.asarray(a)[..., :, None] * np.asarray(b)[..., None, :]


def matvec(a, x):
    """Matrix times vector over trailing axes: (..., n, m) @ (..., m)."""
    if isinstance(a, Jet) or isinstance(x, Jet):
        xa = x[..., None, :] if isinstance(x, Jet) else np.asarray(x)[..., None, :]
        return jsum(a * xa, axis=-1)
    return np.einsum("...nm,...m->...n", a, x)


def matmul(a, b):
    """Matrix product over trailing axes: (..., n, k) @ (..., k, m)."""
    if isinstance(a, Jet) or isinstance(b, Jet):
        aa = a[..., :, :, None] if isinstance(a, Jet) else np.asarray(a)[..., :, :, None]
        bb = b[..., None, :, :] if isinstance(b, Jet) else np.asarray(b)[..., None, :, :]
        return jsum(aa * bb, axis=-2)
    return a @ b


def transpose2(a):
    """Swap the two trailing value axes."""
    if not isinstance(a, Jet):
        return np.swapaxes(a, -2, -1)
    nd = a.value.ndim
    v = np.swapaxes(a.value, nd - 2, nd - 1)
    g = np.swapaxes(a.grad, nd - 2, nd - 1)
    h = None if a.hess is None else np.swapaxes(a.hess, nd - 2, nd - 1)
    return Jet(v, g, h)


def trace2(a):
    """Trace over the two trailing (square) value axes."""
    n = (a.value.shape[-1] if isinstance(a, Jet) else np.asarray(a).shape[-1])
    out = a[..., 0, 0]
    for i in range(1, n):
        out = out + a[..., i, i]
    return out
