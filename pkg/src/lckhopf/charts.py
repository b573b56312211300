"""Charts on the two model spaces, the map H between them, and smooth maps.

Two charts are used throughout:

``CYLINDER``
    R x S^{2n-1} in ambient coordinates ``(t, x_1, y_1, ..., x_n, y_n)`` with the
    constraint ``|w| = 1``.  Tangent vectors carry a ``t`` component and ambient
    sphere components orthogonal to ``w``.

``PUNCTURED_CN``
    C^n - {0} with real coordinates ``(x_1, y_1, ..., x_n, y_n)``.

Complex structure convention: ``J0`` acts on each ``(x_j, y_j)`` pair by the
matrix ``[[0, 1], [-1, 0]]`` (multiplication by ``-i``).  With this choice the
standard contact form ``sum x dy - y dx`` has positive Levi form and the
Kaehler form ``2 d(e^t eta_A)`` is positive for the cylinder complex structure;
``H(t, z) = (e^{a_j t} z_j)`` is then holomorphic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .jets import Jet

__all__ = [
    "ChartKind",
    "Chart",
    "ChartPoint",
    "TangentVector",
    "HopfData",
    "SmoothMap",
    "RootFindingError",
    "mult_i_matrix",
    "j0_matrix",
    "to_real",
    "to_complex",
    "map_H",
    "map_H_inverse",
    "H_map",
    "H_inverse_map",
    "pushforward",
    "cylinder",
    "punctured",
]

SPHERE_TOL = 1e-12
TANGENT_TOL = 1e-10


class RootFindingError(RuntimeError):
    """The scalar root solve inside ``map_H_inverse`` did not converge."""


class ChartKind(enum.Enum):
    CYLINDER = "cylinder"
    PUNCTURED_CN = "punctured_cn"


def mult_i_matrix(n: int) -> np.ndarray:
    """Real matrix of multiplication by ``i`` on interleaved coordinates."""
    m = np.zeros((2 * n, 2 * n))
    for j in range(n):
        m[2 * j + 1, 2 * j] = 1.0
        m[2 * j, 2 * j + 1] = -1.0
    return m


def j0_matrix(n: int) -> np.ndarray:
    """The standard complex structure ``[[0, 1], [-1, 0]]`` on each pair."""
    return -mult_i_matrix(n)


def to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def _householder_complement(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``w^perp`` for unit rows ``w``; shape ``(B, m, m-1)``."""
    B, m = w.shape
    e1 = np.zeros(m)
    e1[0] = 1.0
    sign = np.where(w[:, 0] >= 0, 1.0, -1.0)
    v = w + sign[:, None] * e1
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    H = np.eye(m)[None] - 2.0 * v[:, :, None] * v[:, None, :]
    return H[:, :, 1:]


@dataclass(frozen=True)
class Chart:
    """One of the two model charts for complex dimension ``n``."""

    kind: ChartKind
    n: int

    @property
    def dim(self) -> int:
        """Number of chart coordinates."""
        return 2 * self.n + 1 if self.kind is ChartKind.CYLINDER else 2 * self.n

    @property
    def manifold_dim(self) -> int:
        return 2 * self.n

    def validate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.dim:
            raise ValueError(f"{self.kind.value} points need {self.dim} coordinates")
        if self.kind is ChartKind.CYLINDER:
            err = np.abs(np.linalg.norm(points[:, 1:], axis=1) - 1.0)
            if np.any(err > SPHERE_TOL):
                raise ValueError("cylinder point is off the unit sphere (|w| != 1)")
        elif np.any(np.sum(points**2, axis=1) <= 0.0):
            raise ValueError("point of C^n - {0} must be nonzero")
        return points

    # -- tangent spaces -----------------------------------------------------
    def tangent_basis(self, points: np.ndarray) -> np.ndarray:
        """Euclidean-orthonormal basis of each tangent space, ``(B, dim, 2n)``."""
        points = np.atleast_2d(points)
        B = len(points)
        if self.kind is ChartKind.PUNCTURED_CN:
            return np.broadcast_to(np.eye(self.dim), (B, self.dim, self.dim)).copy()
        basis = np.zeros((B, self.dim, self.manifold_dim))
        basis[:, 0, 0] = 1.0
        basis[:, 1:, 1:] = _householder_complement(points[:, 1:])
        return basis

    def sphere_basis(self, points: np.ndarray) -> np.ndarray:
        """Basis of the ``S^{2n-1}`` factor's tangent space (cylinder only)."""
        if self.kind is not ChartKind.CYLINDER:
            raise ValueError("sphere_basis is only defined on the cylinder chart")
        return self.tangent_basis(points)[:, :, 1:]

    def projector(self, x):
        """Tangent projector at points; accepts arrays or coordinate jets."""
        if self.kind is ChartKind.PUNCTURED_CN:
            eye = np.eye(self.dim)
            if isinstance(x, Jet):
                return Jet.constant(np.broadcast_to(eye, (len(x), self.dim, self.dim)), x.nvars)
            return np.broadcast_to(eye, (len(x), self.dim, self.dim)).copy()
        w = x[:, 1:]
        r2 = J.einsum("bi,bi->b", w, w)
        outer = J.einsum("bi,bj->bij", w, w)
        eye = np.zeros((self.dim, self.dim))
        eye[0, 0] = 1.0
        sub = np.eye(2 * self.n)
        rows = []
        for i in range(self.dim):
            row = []
            for j in range(self.dim):
                if i == 0 or j == 0:
                    row.append(np.full(len(x), eye[i, j]))
                else:
                    row.append(sub[i - 1, j - 1] - outer[:, i - 1, j - 1] / r2)
            rows.append(J.stack(row, axis=-1))
        return J.stack(rows, axis=-2)

    def project(self, points: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("bij,bj->bi", self.projector(np.atleast_2d(points)), v)

    def local_parametrization(self, points: np.ndarray) -> Callable:
        """Map ``u -> x`` from R^{2n} onto a neighbourhood of each base point.

        Its Jacobian at ``u = 0`` is :meth:`tangent_basis`.
        """
        points = np.atleast_2d(points)
        if self.kind is ChartKind.PUNCTURED_CN:
            return lambda u: u + points
        basis = self.tangent_basis(points)[:, 1:, 1:]

        def param(u):
            w = points[:, 1:] + J.einsum("bij,bj->bi", basis, u[:, 1:])
            r = J.sqrt(J.einsum("bi,bi->b", w, w))
            t = u[:, 0] + points[:, 0]
            return J.stack([t] + [w[:, i] / r for i in range(2 * self.n)], axis=-1)

        return param

    # -- sampling -----------------------------------------------------------
    def sample(self, rng: np.random.Generator, count: int, t_range: float = 2.0) -> np.ndarray:
        """Seeded sample points: uniform ``t`` and normalised Gaussian ``w``."""
        if self.kind is ChartKind.CYLINDER:
            t = rng.uniform(-t_range, t_range, size=count)
            w = rng.standard_normal((count, 2 * self.n))
            w /= np.linalg.norm(w, axis=1, keepdims=True)
            return np.column_stack([t, w])
        w = rng.standard_normal((count, 2 * self.n))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        radius = np.exp(rng.uniform(-t_range, t_range, size=count))
        return w * radius[:, None]

    def sample_tangent(self, rng: np.random.Generator, points: np.ndarray) -> np.ndarray:
        basis = self.tangent_basis(points)
        coeffs = rng.standard_normal((len(points), self.manifold_dim))
        return np.einsum("bij,bj->bi", basis, coeffs)


def cylinder(n: int) -> Chart:
    return Chart(ChartKind.CYLINDER, n)


def punctured(n: int) -> Chart:
    return Chart(ChartKind.PUNCTURED_CN, n)


@dataclass(frozen=True)
class ChartPoint:
    chart: ChartKind
    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.chart is ChartKind.CYLINDER:
            if len(coords) < 5 or len(coords) % 2 == 0:
                raise ValueError("cylinder coordinates are (t, w_1..w_2n) with n >= 2")
            if abs(math.hypot(*coords[1:]) - 1.0) > SPHERE_TOL:
                raise ValueError("cylinder point is off the unit sphere (|w| != 1)")
        else:
            if len(coords) < 4 or len(coords) % 2:
                raise ValueError("C^n coordinates are (x_1, y_1, ..., x_n, y_n) with n >= 2")
            if sum(c * c for c in coords) <= 0.0:
                raise ValueError("point of C^n - {0} must be nonzero")

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    @property
    def chart_obj(self) -> Chart:
        return Chart(self.chart, self.n)

    def array(self) -> np.ndarray:
        return np.asarray(self.coords)[None, :]


@dataclass(frozen=True)
class TangentVector:
    base: ChartPoint
    components: tuple

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != len(self.base.coords):
            raise ValueError("components length must equal the chart dimension")
        if self.base.chart is ChartKind.CYLINDER:
            w = np.asarray(self.base.coords[1:])
            if abs(float(np.dot(comps[1:], w))) > TANGENT_TOL:
                raise ValueError("sphere components must be tangent: <v_w, w> = 0")

    def array(self) -> np.ndarray:
        return np.asarray(self.components)[None, :]


@dataclass(frozen=True)
class HopfData:
    """Parameters ``(n, a, s, c)`` of a primary Hopf manifold and its spectrum."""

    n: int
    a: tuple
    s: float
    c: tuple = field(default=None)

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        c = self.c if self.c is not None else (1.0,) * self.n
        c = tuple(complex(x) for x in c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", float(self.s))
        if self.n < 2:
            raise ValueError("n must be at least 2 (complex dimension >= 2)")
        if len(a) != self.n or len(c) != self.n:
            raise ValueError("a and c must have n entries")
        if a[0] <= 0:
            raise ValueError("a must be positive: 0 < a_1")
        if any(x > y for x, y in zip(a, a[1:])):
            raise ValueError("a must be sorted: 0 < a_1 <= a_2 <= ... <= a_n")
        if self.s <= 0:
            raise ValueError("s must be positive")
        if any(abs(abs(z) - 1.0) > 1e-12 for z in c):
            raise ValueError("c must be a vector of unit complex numbers (|c_j| = 1)")

    @property
    def lam(self) -> np.ndarray:
        """Spectrum ``lambda_j = e^{-a_j s} c_j`` of the deck generator."""
        return np.exp(-np.asarray(self.a) * self.s) * np.asarray(self.c)

    @property
    def a_real(self) -> np.ndarray:
        """``a`` repeated for each real coordinate pair."""
        return np.repeat(np.asarray(self.a), 2)


@dataclass(frozen=True)
class SmoothMap:
    """A smooth map between charts given by a coordinate formula.

    ``fn`` must accept either a ``(B, dim)`` array or a coordinate :class:`Jet`
    and return the image coordinates of the same kind.
    """

    source: Chart
    target: Chart
    fn: Callable
    name: str = "map"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(J.value_of(self.fn(np.atleast_2d(points))))

    def local(self, points: np.ndarray) -> Jet:
        points = np.atleast_2d(points)
        out = self.fn(J.seed(points))
        return J.as_jet(out, self.source.dim)

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        """``(B, target.dim, source.dim)`` Jacobian matrices."""
        return self.local(points).derivative().value

    def then(self, other: "SmoothMap") -> "SmoothMap":
        """Composite ``other o self``."""
        return SmoothMap(self.source, other.target, lambda x: other.fn(self.fn(x)),
                         f"{other.name}*{self.name}")

    @classmethod
    def identity(cls, chart: Chart) -> "SmoothMap":
        return cls(chart, chart, lambda x: x, "id")


def _as_points(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return p.array()
    return np.atleast_2d(np.asarray(p, dtype=float))


# -- the biholomorphism H ------------------------------------------------------

def _H_fn(hopf: HopfData):
    ar = hopf.a_real

    def fn(x):
        scale = J.exp(x[:, 0:1] * ar)
        return x[:, 1:] * scale

    return fn


def _solve_t(hopf: HopfData, q: np.ndarray, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Unique ``t`` with ``sum_j e^{-2 a_j t} |q_j|^2 = 1`` (bisection, then Newton)."""
    a = np.asarray(hopf.a)
    m2 = np.abs(to_complex(q)) ** 2
    if np.any(m2.sum(axis=1) <= 0):
        raise ValueError("map_H_inverse needs q != 0")

    def F(t):
        return (m2 * np.exp(-2.0 * a * t[:, None])).sum(axis=1) - 1.0

    def dF(t):
        return (-2.0 * a * m2 * np.exp(-2.0 * a * t[:, None])).sum(axis=1)

    ell = 0.5 * np.log(m2.sum(axis=1))
    lo = np.minimum(ell / a[0], ell / a[-1])
    hi = np.maximum(ell / a[0], ell / a[-1])
    # F is decreasing: F(lo) >= 0 >= F(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = F(mid)
        lo = np.where(fm > 0, mid, lo)
        hi = np.where(fm > 0, hi, mid)
        if np.all(hi - lo < 1e-6):
            break
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = F(t)
        t = t - r / dF(t)
        if np.all(np.abs(r) < tol):
            return t  # one extra step polishes to rounding level
    raise RootFindingError("map_H_inverse: t root solve did not converge")


def _H_inverse_fn(hopf: HopfData):
    a = np.asarray(hopf.a)
    ar = hopf.a_real

    def fn(q):
        t0 = _solve_t(hopf, J.value_of(q))
        if not isinstance(q, Jet):
            z = q * np.exp(-ar * t0[:, None])
            return np.column_stack([t0, z])
        # Newton steps in jet arithmetic lift t(q) to second order
        t = Jet.constant(t0, q.nvars)
        m2 = q[:, 0::2] * q[:, 0::2] + q[:, 1::2] * q[:, 1::2]
        for _ in range(3):
            e = J.exp(t[:, None] * (-2.0 * a))
            F = (m2 * e).sum(axis=1) - 1.0
            dF = (m2 * e * (-2.0 * a)).sum(axis=1)
            t = t - F / dF
        z = q * J.exp(t[:, None] * (-ar))
        return J.stack([t] + [z[:, i] for i in range(2 * hopf.n)], axis=-1)

    return fn


def H_map(hopf: HopfData) -> SmoothMap:
    return SmoothMap(cylinder(hopf.n), punctured(hopf.n), _H_fn(hopf), "H")


def H_inverse_map(hopf: HopfData) -> SmoothMap:
    return SmoothMap(punctured(hopf.n), cylinder(hopf.n), _H_inverse_fn(hopf), "H^-1")


def map_H(hopf: HopfData, p):
    """``H(t, z) = (e^{a_1 t} z_1, ..., e^{a_n t} z_n)``.

    Accepts a :class:`ChartPoint` (returns one) or a ``(B, 2n+1)`` array.
    """
    out = H_map(hopf)(_as_points(p))
    if isinstance(p, ChartPoint):
        return ChartPoint(ChartKind.PUNCTURED_CN, tuple(out[0]))
    return out


def map_H_inverse(hopf: HopfData, q):
    """Inverse of :func:`map_H`; solves for ``t`` then rescales ``q`` onto the sphere."""
    out = H_inverse_map(hopf)(_as_points(q))
    if isinstance(q, ChartPoint):
        coords = out[0].copy()
        coords[1:] /= np.linalg.norm(coords[1:])
        return ChartPoint(ChartKind.CYLINDER, tuple(coords))
    return out


def pushforward(f: SmoothMap, v, base=None):
    """Jacobian-vector product ``f_* v``.

    With a :class:`TangentVector` returns a :class:`TangentVector` at ``f(p)``;
    with arrays ``(base, v)`` returns ``(f(base), Df v)``.
    """
    if isinstance(v, TangentVector):
        pts = v.base.array()
        img = f(pts)
        comps = np.einsum("bij,bj->bi", f.jacobian(pts), v.array())[0]
        coords = img[0]
        if f.target.kind is ChartKind.CYLINDER:
            coords = coords.copy()
            coords[1:] /= np.linalg.norm(coords[1:])
            comps = comps.copy()
            comps[1:] -= np.dot(comps[1:], coords[1:]) * coords[1:]
        return TangentVector(ChartPoint(f.target.kind, tuple(coords)), tuple(comps))
    base = np.atleast_2d(base)
    return f(base), np.einsum("bij,bj->bi", f.jacobian(base), np.atleast_2d(v))
