"""Pointwise tensor fields and the calculus operators acting on them.

Every field stores a coefficient function ``fn(x)`` in chart coordinates.  The
argument ``x`` is either a ``(B, D)`` array of points or a coordinate
:class:`~lckhopf.jets.Jet`; coefficient functions must be written with
operations that accept both (see :mod:`lckhopf.jets`).  Derivatives of
coefficients are then taken by evaluating on seeded jets, so each derived
operator consumes one order of the second-order jet budget.

On the cylinder chart, forms, brackets and Lie derivatives are computed from the
ambient coefficients.  This is legitimate because the vector fields involved are
tangent along ``R x S^{2n-1}`` and only tangent vectors are ever fed to the
results.  Metric connection data, which needs an honest coordinate system, is
computed in the local parametrisation returned by
:meth:`~lckhopf.charts.Chart.local_parametrization`.

Alternation convention (used throughout)::

    (a ^ b)(X, Y)      = 1/2 (a(X) b(Y) - a(Y) b(X))
    da(X, Y)           = 1/2 (X a(Y) - Y a(X) - a([X, Y]))
    (t ^ w)(X, Y, Z)   = 1/3 (t(X) w(Y, Z) + t(Y) w(Z, X) + t(Z) w(X, Y))
    dw                 = 1/3 cyclic sum of the coordinate derivatives
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as J
from .charts import Chart, ChartPoint, SmoothMap, TangentVector
from .jets import Jet

__all__ = [
    "Field",
    "ScalarField",
    "VectorField",
    "DifferentialForm",
    "BilinearField",
    "MetricField",
    "EndomorphismField",
    "ComplexStructureField",
    "partials",
    "constant_field",
    "wedge",
    "exterior_derivative",
    "interior_product",
    "pullback",
    "bracket",
    "apply_endomorphism",
    "lie_derivative_metric",
    "lie_derivative_form",
    "lie_derivative_endomorphism",
    "raise_index",
    "lower_index",
    "local_coordinates",
    "local_metric",
    "christoffel",
    "covariant_derivative_oneform",
    "covariant_derivative_metric",
]


# -- helpers ---------------------------------------------------------------------

def partials(fn: Callable, x):
    """Partial derivatives of ``fn`` at ``x``; a trailing axis indexes the variable.

    For a jet argument the result is a jet (one order lower than ``fn``'s output
    on seeded input), obtained by the chain rule through ``x``'s derivatives.
    """
    if isinstance(x, Jet):
        inner = J.as_jet(fn(J.seed(x.value)), x.shape[-1])
        return inner.derivative().compose(x)
    inner = J.as_jet(fn(J.seed(x)), x.shape[-1])
    return inner.derivative().value


def _tr(a, *axes):
    return a.transpose(*axes) if isinstance(a, Jet) else np.transpose(a, axes)


def _swap(a):
    return a.swapaxes(1, 2) if isinstance(a, Jet) else np.swapaxes(a, 1, 2)


def _eye_like(x, d: int) -> np.ndarray:
    return np.broadcast_to(np.eye(d), (len(x), d, d))


def _as_points(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return p.array()
    return np.atleast_2d(np.asarray(p, dtype=float))


def _as_vectors(v) -> np.ndarray:
    if isinstance(v, TangentVector):
        return v.array()
    return np.atleast_2d(np.asarray(v, dtype=float))


def constant_field(value) -> Callable:
    """Coefficient function returning a constant array at every point."""
    value = np.asarray(value, dtype=float)
    return lambda x: np.broadcast_to(value, (len(x),) + value.shape).copy()


# -- field types -------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    """Base class: a chart and a coefficient function ``fn(x)``."""

    chart: Chart
    fn: Callable
    name: str = ""

    def coeffs(self, x):
        return self.fn(x)

    def at(self, points) -> np.ndarray:
        """Plain coefficient values at a batch of points."""
        return np.asarray(J.value_of(self.fn(_as_points(points))))

    def _like(self, fn: Callable, name: str):
        return type(self)(self.chart, fn, name)

    def __add__(self, other):
        return self._like(lambda x: self.fn(x) + other.fn(x), f"({self.name}+{other.name})")

    def __sub__(self, other):
        return self._like(lambda x: self.fn(x) - other.fn(x), f"({self.name}-{other.name})")

    def __neg__(self):
        return self._like(lambda x: -self.fn(x), f"-{self.name}")

    def __mul__(self, c):
        if isinstance(c, Field):
            return _scale(c, self)
        return self._like(lambda x: self.fn(x) * float(c), f"{c}*{self.name}")

    __rmul__ = __mul__


class ScalarField(Field):
    """Smooth function; coefficient shape ``(B,)``."""

    def evaluate(self, points) -> np.ndarray:
        return self.at(points)


class VectorField(Field):
    """Vector field; coefficient shape ``(B, D)``."""

    def evaluate(self, points) -> np.ndarray:
        return self.at(points)


@dataclass(frozen=True)
class DifferentialForm(Field):
    """k-form with antisymmetric coefficients of shape ``(B,) + (D,) * k``."""

    degree: int = 1

    def _like(self, fn, name):
        return DifferentialForm(self.chart, fn, name, self.degree)

    def evaluate(self, points, *vectors) -> np.ndarray:
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form needs {self.degree} vectors")
        c = self.at(points)
        for v in vectors:
            c = np.einsum("bi...,bi->b...", c, _as_vectors(v))
        return c


class BilinearField(Field):
    """Covariant 2-tensor; coefficient shape ``(B, D, D)``."""

    def evaluate(self, points, X, Y) -> np.ndarray:
        return np.einsum("bij,bi,bj->b", self.at(points), _as_vectors(X), _as_vectors(Y))

    def matrix(self, points) -> np.ndarray:
        return self.at(points)


class MetricField(BilinearField):
    """Riemannian metric (positive on tangent vectors)."""


class EndomorphismField(Field):
    """(1,1)-tensor; ``(JX)^i = J^i_j X^j``, coefficient shape ``(B, D, D)``."""

    def apply(self, points, X) -> np.ndarray:
        return np.einsum("bij,bj->bi", self.at(points), _as_vectors(X))

    evaluate = apply


class ComplexStructureField(EndomorphismField):
    """Almost complex structure."""


def _scale(f: Field, field: Field) -> Field:
    if isinstance(f, DifferentialForm) and f.degree != 0:
        raise ValueError("only functions (0-forms) can scale a field")

    def fn(x):
        s = f.fn(x)
        c = field.fn(x)
        shape = (len(x),) + (1,) * (J.value_of(c).ndim - 1)
        return c * s.reshape(shape)

    return field._like(fn, f"{f.name}*{field.name}")


# -- exterior algebra -----------------------------------------------------------------

def _as_form(f) -> DifferentialForm:
    if isinstance(f, DifferentialForm):
        return f
    if isinstance(f, ScalarField):
        return DifferentialForm(f.chart, f.fn, f.name, 0)
    raise TypeError("expected a differential form")


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    """Exterior product with the 1/2-alternation convention (degrees 0+k, 1+1, 1+2)."""
    alpha, beta = _as_form(alpha), _as_form(beta)
    if alpha.chart != beta.chart:
        raise ValueError("forms live on different charts")
    if alpha.degree == 0 or beta.degree == 0:
        f, other = (alpha, beta) if alpha.degree == 0 else (beta, alpha)
        return _scale(f, other)
    if (alpha.degree, beta.degree) == (2, 1):
        return wedge(beta, alpha)
    if (alpha.degree, beta.degree) == (1, 1):
        def fn(x):
            t = J.einsum("bi,bj->bij", alpha.fn(x), beta.fn(x))
            return (t - _swap(t)) * 0.5

        return DifferentialForm(alpha.chart, fn, f"{alpha.name}^{beta.name}", 2)
    if (alpha.degree, beta.degree) == (1, 2):
        def fn(x):
            t = J.einsum("bi,bjk->bijk", alpha.fn(x), beta.fn(x))
            return (t + _tr(t, 0, 3, 1, 2) + _tr(t, 0, 2, 3, 1)) * (1.0 / 3.0)

        return DifferentialForm(alpha.chart, fn, f"{alpha.name}^{beta.name}", 3)
    raise ValueError(f"wedge of degrees {alpha.degree} and {beta.degree} not supported")


def exterior_derivative(alpha) -> DifferentialForm:
    """d of a 0-, 1- or 2-form from jet derivatives of its coefficients."""
    alpha = _as_form(alpha)
    k = alpha.degree
    if k == 0:
        fn = lambda x: partials(alpha.fn, x)
    elif k == 1:
        def fn(x):
            p = partials(alpha.fn, x)  # p[b, j, i] = d_i alpha_j
            return (_swap(p) - p) * 0.5
    elif k == 2:
        def fn(x):
            p = partials(alpha.fn, x)  # p[b, j, k, i] = d_i w_jk
            return (_tr(p, 0, 3, 1, 2) + _tr(p, 0, 2, 3, 1) + p) * (1.0 / 3.0)
    else:
        raise ValueError("exterior derivative is implemented for degrees 0, 1, 2")
    return DifferentialForm(alpha.chart, fn, f"d{alpha.name}", k + 1)


def interior_product(X: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """``(i_X a)(Y, ...) = a(X, Y, ...)``."""
    if alpha.degree < 1:
        raise ValueError("interior product of a function is zero by convention")
    fn = lambda x: J.einsum("bi,bi...->b...", X.fn(x), alpha.fn(x))
    return DifferentialForm(alpha.chart, fn, f"i({X.name}){alpha.name}", alpha.degree - 1)


def pullback(f: SmoothMap, alpha):
    """``(f^* a)(p; X...) = a(f(p); f_* X, ...)`` for forms and bilinear fields."""
    if isinstance(alpha, (ScalarField, DifferentialForm)):
        degree = alpha.degree if isinstance(alpha, DifferentialForm) else 0
    elif isinstance(alpha, BilinearField):
        degree = 2
    else:
        raise TypeError("pullback needs a form or a bilinear field")

    def fn(x):
        c = alpha.fn(f.fn(x))
        if degree == 0:
            return c
        df = partials(f.fn, x)  # (B, D', D)
        c = J.einsum("bi...,bij->b...j", c, df)
        if degree >= 2:
            c = J.einsum("bi...j,bik->b...jk", c, df)
        if degree >= 3:
            c = J.einsum("bi...jk,bil->b...jkl", c, df)
        return c

    name = f"{f.name}^*{alpha.name}"
    if isinstance(alpha, DifferentialForm):
        return DifferentialForm(f.source, fn, name, degree)
    return type(alpha)(f.source, fn, name)


# -- vector field calculus ---------------------------------------------------------------

def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i``."""

    def fn(x):
        return J.einsum("bij,bj->bi", partials(Y.fn, x), X.fn(x)) - J.einsum(
            "bij,bj->bi", partials(X.fn, x), Y.fn(x)
        )

    return VectorField(X.chart, fn, f"[{X.name},{Y.name}]")


def apply_endomorphism(Jf: EndomorphismField, X: VectorField) -> VectorField:
    fn = lambda x: J.einsum("bij,bj->bi", Jf.fn(x), X.fn(x))
    return VectorField(X.chart, fn, f"{Jf.name}{X.name}")


def lie_derivative_metric(X: VectorField, g: BilinearField) -> BilinearField:
    """``(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k``."""

    def fn(x):
        G = g.fn(x)
        px = partials(X.fn, x)  # px[b, k, i] = d_i X^k
        return (
            J.einsum("bijk,bk->bij", partials(g.fn, x), X.fn(x))
            + J.einsum("bkj,bki->bij", G, px)
            + J.einsum("bik,bkj->bij", G, px)
        )

    return BilinearField(g.chart, fn, f"L({X.name}){g.name}")


def lie_derivative_form(X: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """Lie derivative of a 1- or 2-form via the coordinate formula."""

    def fn(x):
        a = alpha.fn(x)
        px = partials(X.fn, x)
        out = J.einsum("bi...k,bk->bi...", partials(alpha.fn, x), X.fn(x))
        if alpha.degree == 1:
            return out + J.einsum("bk,bki->bi", a, px)
        return out + J.einsum("bkj,bki->bij", a, px) + J.einsum("bik,bkj->bij", a, px)

    if alpha.degree not in (1, 2):
        raise ValueError("lie_derivative_form supports degrees 1 and 2")
    return DifferentialForm(alpha.chart, fn, f"L({X.name}){alpha.name}", alpha.degree)


def lie_derivative_endomorphism(X: VectorField, Jf: EndomorphismField) -> EndomorphismField:
    """``(L_X J)Y = [X, JY] - J[X, Y]`` in coordinates."""

    def fn(x):
        Jm = Jf.fn(x)
        px = partials(X.fn, x)  # px[b, i, k] = d_k X^i
        return (
            J.einsum("bijk,bk->bij", partials(Jf.fn, x), X.fn(x))
            - J.einsum("bkj,bik->bij", Jm, px)
            + J.einsum("bik,bkj->bij", Jm, px)
        )

    return EndomorphismField(Jf.chart, fn, f"L({X.name}){Jf.name}")


# -- metric duality ----------------------------------------------------------------------

def raise_index(g: BilinearField, sigma: DifferentialForm) -> VectorField:
    """Tangent vector ``sigma^#`` with ``g(sigma^#, Y) = sigma(Y)`` for tangent ``Y``.

    Solves ``(P g P + I - P) v = P sigma`` with ``P`` the tangent projector, which
    is invertible even though ``g`` is only meaningful on tangent vectors.
    """
    chart = g.chart

    def fn(x):
        P = chart.projector(x)
        G = g.fn(x)
        M = J.einsum("bij,bjk->bik", J.einsum("bij,bjk->bik", P, G), P) + (
            _eye_like(x, chart.dim) - P
        )
        rhs = J.einsum("bij,bj->bi", P, sigma.fn(x))
        return J.einsum("bij,bj->bi", J.inv(M), rhs)

    return VectorField(chart, fn, f"{sigma.name}#")


def lower_index(g: BilinearField, X: VectorField) -> DifferentialForm:
    fn = lambda x: J.einsum("bij,bi->bj", g.fn(x), X.fn(x))
    return DifferentialForm(g.chart, fn, f"{X.name}_flat", 1)


# -- Levi-Civita data in local coordinates ------------------------------------------------

def local_coordinates(chart: Chart, points) -> Jet:
    """Jet of the local parametrisation at ``u = 0`` (``nvars = 2n``).

    Its first derivative is the orthonormal frame ``chart.tangent_basis(points)``,
    so all connection data below is expressed in that frame at the base points.
    """
    points = _as_points(points)
    param = chart.local_parametrization(points)
    return param(J.seed(np.zeros((len(points), chart.manifold_dim))))


def local_metric(g: BilinearField, points) -> Jet:
    """First-order jet of the metric matrix in local coordinates."""
    x = local_coordinates(g.chart, points)
    E = x.derivative()  # (B, D, m)
    G = g.fn(x)
    return J.einsum("bia,bic->bac", E, J.einsum("bij,bjc->bic", G, E))


def christoffel(g: BilinearField, points) -> np.ndarray:
    """``Gamma[b, k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)``."""
    Gu = local_metric(g, points)
    G = Gu.value
    cond = np.linalg.cond(G)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e12):
        raise np.linalg.LinAlgError("metric matrix is singular at a sample point")
    dG = Gu.derivative().value  # dG[b, i, j, k] = d_k g_ij
    # lower[b, l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    lower = (
        np.einsum("bjli->blij", dG)
        + np.einsum("bilj->blij", dG)
        - np.einsum("bijl->blij", dG)
    )
    return 0.5 * np.einsum("bkl,blij->bkij", np.linalg.inv(G), lower)


def covariant_derivative_oneform(g: BilinearField, sigma: DifferentialForm, points) -> np.ndarray:
    """``(nabla sigma)[b, i, j] = d_i sigma_j - Gamma^k_ij sigma_k`` (local frame)."""
    x = local_coordinates(g.chart, points)
    E = x.derivative()
    su = J.einsum("bi,bia->ba", sigma.fn(x), E)
    dsigma = np.swapaxes(su.derivative().value, 1, 2)  # [b, i, j] = d_i sigma_j
    gamma = christoffel(g, points)
    return dsigma - np.einsum("bkij,bk->bij", gamma, su.value)


def covariant_derivative_metric(g: BilinearField, points) -> np.ndarray:
    """``(nabla g)[b, k, i, j]``; identically zero for the Levi-Civita connection."""
    Gu = local_metric(g, points)
    G = Gu.value
    dG = np.einsum("bijk->bkij", Gu.derivative().value)
    gamma = christoffel(g, points)
    return (
        dG
        - np.einsum("blki,blj->bkij", gamma, G)
        - np.einsum("blkj,bil->bkij", gamma, G)
    )
