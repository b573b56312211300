"""Truncated second-order Taylor jets over batches of points.

A :class:`Jet` carries the value of a (possibly tensor-valued) quantity at a
batch of points together with its first and second partial derivatives with
respect to ``nvars`` chart coordinates.  Derivative axes are stored *in front*
of the value axes::

    value: (B, *S)
    grad:  (nvars, B, *S)
    hess:  (nvars, nvars, B, *S)

so that indexing, broadcasting and einsum on the value axes carry over to the
derivative arrays unchanged.  ``grad`` or ``hess`` may be ``None`` when that
order is not known (for example after :meth:`Jet.derivative`, which consumes
one order).  Every operation propagates the smallest known order.
"""

from __future__ import annotations

import string

import numpy as np

__all__ = [
    "Jet",
    "JetScalar",
    "seed",
    "as_jet",
    "exp",
    "log",
    "sqrt",
    "sin",
    "cos",
    "einsum",
    "stack",
    "inv",
    "value_of",
]


def _pad(d: np.ndarray, lead: int, shape: tuple) -> np.ndarray:
    """Reshape a derivative array so its value axes right-align with ``shape``."""
    vshape = d.shape[lead:]
    extra = len(shape) - len(vshape)
    if extra <= 0:
        return d
    return d.reshape(d.shape[:lead] + (1,) * extra + vshape)


class Jet:
    """Value plus first and second derivatives, batched and tensor-valued."""

    __slots__ = ("value", "grad", "hess", "nvars")
    __array_priority__ = 1000

    def __init__(self, value, grad=None, hess=None, nvars=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = None if grad is None else np.asarray(grad, dtype=float)
        self.hess = None if hess is None else np.asarray(hess, dtype=float)
        if self.grad is None and self.hess is not None:
            self.hess = None
        if nvars is None:
            if self.grad is None:
                raise ValueError("nvars is required when grad is unknown")
            nvars = self.grad.shape[0]
        self.nvars = int(nvars)

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        return cls(
            value,
            np.zeros((nvars,) + value.shape),
            np.zeros((nvars, nvars) + value.shape),
        )

    # -- shape helpers ------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def order(self) -> int:
        if self.grad is None:
            return 0
        return 1 if self.hess is None else 2

    def __len__(self) -> int:
        return len(self.value)

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, nvars={self.nvars}, order={self.order})"

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        grad = None if self.grad is None else self.grad[(slice(None),) + key]
        hess = None if self.hess is None else self.hess[(slice(None), slice(None)) + key]
        return Jet(self.value[key], grad, hess, self.nvars)

    def transpose(self, *axes) -> "Jet":
        axes = tuple(axes)
        grad = None if self.grad is None else self.grad.transpose((0,) + tuple(a + 1 for a in axes))
        hess = None if self.hess is None else self.hess.transpose(
            (0, 1) + tuple(a + 2 for a in axes)
        )
        return Jet(self.value.transpose(axes), grad, hess, self.nvars)

    def swapaxes(self, a: int, b: int) -> "Jet":
        axes = list(range(self.ndim))
        axes[a], axes[b] = axes[b], axes[a]
        return self.transpose(*axes)

    def sum(self, axis: int) -> "Jet":
        axis = axis % self.ndim
        grad = None if self.grad is None else self.grad.sum(axis=axis + 1)
        hess = None if self.hess is None else self.hess.sum(axis=axis + 2)
        return Jet(self.value.sum(axis=axis), grad, hess, self.nvars)

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        grad = None if self.grad is None else self.grad.reshape((self.nvars,) + shape)
        hess = None if self.hess is None else self.hess.reshape((self.nvars, self.nvars) + shape)
        return Jet(self.value.reshape(shape), grad, hess, self.nvars)

    def truncate(self, order: int) -> "Jet":
        """Forget derivatives above ``order``."""
        grad = self.grad if order >= 1 else None
        hess = self.hess if order >= 2 else None
        return Jet(self.value, grad, hess, self.nvars)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError(f"jet variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Jet.constant(other, self.nvars)

    def __add__(self, other) -> "Jet":
        o = self._coerce(other)
        value = self.value + o.value
        grad = hess = None
        if self.grad is not None and o.grad is not None:
            grad = _pad(self.grad, 1, value.shape) + _pad(o.grad, 1, value.shape)
            if self.hess is not None and o.hess is not None:
                hess = _pad(self.hess, 2, value.shape) + _pad(o.hess, 2, value.shape)
        return Jet(value, grad, hess, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        grad = None if self.grad is None else -self.grad
        hess = None if self.hess is None else -self.hess
        return Jet(-self.value, grad, hess, self.nvars)

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Jet":
        o = self._coerce(other)
        value = self.value * o.value
        shape = value.shape
        grad = hess = None
        if self.grad is not None and o.grad is not None:
            ga, gb = _pad(self.grad, 1, shape), _pad(o.grad, 1, shape)
            grad = ga * o.value + self.value * gb
            if self.hess is not None and o.hess is not None:
                cross = ga[:, None] * gb[None, :]
                hess = (
                    _pad(self.hess, 2, shape) * o.value
                    + self.value * _pad(o.hess, 2, shape)
                    + cross
                    + np.swapaxes(cross, 0, 1)
                )
        return Jet(value, grad, hess, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, p: float) -> "Jet":
        v = self.value
        return self._chain(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def reciprocal(self) -> "Jet":
        v = self.value
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def _chain(self, f0, f1, f2) -> "Jet":
        """Apply an elementwise function given its value and first two derivatives."""
        grad = hess = None
        if self.grad is not None:
            grad = f1 * self.grad
            if self.hess is not None:
                hess = f1 * self.hess + f2 * self.grad[:, None] * self.grad[None, :]
        return Jet(f0, grad, hess, self.nvars)

    # -- calculus -----------------------------------------------------------
    def derivative(self) -> "Jet":
        """Jet of the partial derivatives; a new trailing axis indexes the variable."""
        if self.grad is None:
            raise ValueError("derivative of a jet whose gradient is unknown")
        value = np.moveaxis(self.grad, 0, -1)
        grad = None if self.hess is None else np.moveaxis(self.hess, 1, -1)
        return Jet(value, grad, None, self.nvars)

    def compose(self, inner: "Jet") -> "Jet":
        """Re-express derivatives through an inner map.

        ``self`` holds derivatives with respect to coordinates ``u`` evaluated at
        ``u = inner.value``; ``inner`` (shape ``(B, nvars_self)``) holds derivatives
        of ``u`` with respect to new variables.  Returns the jet of the composite.
        """
        if inner.shape[-1] != self.nvars:
            raise ValueError("inner map dimension does not match jet variables")
        grad = hess = None
        if self.grad is not None and inner.grad is not None:
            # inner.grad: (l, B, a) ; self.grad: (a, B, ...)
            grad = np.einsum("aB...,lBa->lB...", self.grad, inner.grad)
            if self.hess is not None and inner.hess is not None:
                hess = np.einsum(
                    "abB...,lBa,mBb->lmB...", self.hess, inner.grad, inner.grad
                ) + np.einsum("aB...,lmBa->lmB...", self.grad, inner.hess)
        return Jet(self.value, grad, hess, inner.nvars)


JetScalar = Jet


def seed(points) -> Jet:
    """Independent coordinate jets at a batch of points of shape ``(B, d)``."""
    points = np.asarray(points, dtype=float)
    B, d = points.shape
    grad = np.broadcast_to(np.eye(d)[:, None, :], (d, B, d)).copy()
    return Jet(points, grad, np.zeros((d, d, B, d)), d)


def as_jet(x, nvars: int) -> Jet:
    return x if isinstance(x, Jet) else Jet.constant(x, nvars)


def value_of(x) -> np.ndarray:
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.value)
        return x._chain(e, e, e)
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        v = x.value
        return x._chain(np.log(v), 1.0 / v, -1.0 / v**2)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Jet):
        r = np.sqrt(x.value)
        return x._chain(r, 0.5 / r, -0.25 / r**3)
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        return x._chain(s, c, -s)
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        return x._chain(c, -s, -c)
    return np.cos(x)


def _free_letters(spec: str, k: int) -> str:
    used = set(spec)
    free = [c for c in string.ascii_uppercase if c not in used]
    return "".join(free[:k])


def einsum(spec: str, a, b):
    """Two-operand einsum with the product rule applied to jet operands."""
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(spec, a, b)
    nvars = a.nvars if isinstance(a, Jet) else b.nvars
    a = as_jet(a, nvars)
    b = as_jet(b, nvars)
    if a.nvars != b.nvars:
        raise ValueError("jet variable count mismatch")
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    Y, Z = _free_letters(spec, 2)
    value = np.einsum(spec, a.value, b.value)
    grad = hess = None
    if a.grad is not None and b.grad is not None:
        grad = np.einsum(f"{Z}{sa},{sb}->{Z}{out}", a.grad, b.value) + np.einsum(
            f"{sa},{Z}{sb}->{Z}{out}", a.value, b.grad
        )
        if a.hess is not None and b.hess is not None:
            hess = (
                np.einsum(f"{Y}{Z}{sa},{sb}->{Y}{Z}{out}", a.hess, b.value)
                + np.einsum(f"{sa},{Y}{Z}{sb}->{Y}{Z}{out}", a.value, b.hess)
                + np.einsum(f"{Y}{sa},{Z}{sb}->{Y}{Z}{out}", a.grad, b.grad)
                + np.einsum(f"{Z}{sa},{Y}{sb}->{Y}{Z}{out}", a.grad, b.grad)
            )
    return Jet(value, grad, hess, nvars)


def stack(items, axis: int):
    """Stack along a value axis; plain arrays are promoted to constant jets."""
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.stack(items, axis=axis)
    nvars = jets[0].nvars
    items = [as_jet(x, nvars) for x in items]
    shape = np.broadcast_shapes(*(x.shape for x in items))
    nd = len(shape) + 1
    axis = axis % nd
    value = np.stack([np.broadcast_to(x.value, shape) for x in items], axis=axis)
    grad = hess = None
    if all(x.grad is not None for x in items):
        grad = np.stack(
            [np.broadcast_to(x.grad, (nvars,) + shape) for x in items], axis=axis + 1
        )
        if all(x.hess is not None for x in items):
            hess = np.stack(
                [np.broadcast_to(x.hess, (nvars, nvars) + shape) for x in items],
                axis=axis + 2,
            )
    return Jet(value, grad, hess, nvars)


def inv(a):
    """Matrix inverse over the last two value axes."""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    ainv = np.linalg.inv(a.value)
    grad = hess = None
    if a.grad is not None:
        # d(A^-1) = -A^-1 dA A^-1
        t = np.einsum("...ij,k...jl->k...il", ainv, a.grad)
        grad = -np.einsum("k...il,...lm->k...im", t, ainv)
        if a.hess is not None:
            # d2(A^-1)_kl = A^-1 (dA_k A^-1 dA_l + dA_l A^-1 dA_k - d2A_kl) A^-1
            s = np.einsum("...ij,k...jl->k...il", ainv, a.grad)  # A^-1 dA_k
            prod = np.einsum("k...ij,l...jm->kl...im", s, s)
            inner = prod + np.swapaxes(prod, 0, 1) - np.einsum(
                "...ij,kl...jm->kl...im", ainv, a.hess
            )
            hess = np.einsum("kl...ij,...jm->kl...im", inner, ainv)
    return Jet(ainv, grad, hess, a.nvars)
