"""Explicit l.c.K. structure on R x S^{2n-1} and the group actions on it.

All objects are built with closed-form coefficients in ambient cylinder
coordinates ``x = (t, w)``, so jets of them carry full second derivatives::

    eta_0   = sum_j x_j dy_j - y_j dx_j           covector (0, i w)
    A       = (0, i D_a w)                         eta_0(A) = sum a_j |z_j|^2
    eta_A   = eta_0 / sum a_j |z_j|^2
    N = xi  = d/dt
    J_A     : N -> -A,  A -> N,  J_0 on Null(eta_A)
    Omega_A = 2 d(e^t eta_A)       = 2 e^t (dt ^ eta_A + d eta_A)
    omega~  = 2 e^{-t} Omega_A     = 4 (dt ^ eta_A + d eta_A)
    g~(X,Y) = omega~(J_A X, Y)
    theta   = -dt

``H(t, z) = (e^{a_j t} z_j)`` maps ``(J_A, J_0)``-holomorphically onto
C^n - {0}; ``J_0`` is the structure of :func:`~lckhopf.charts.j0_matrix`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import jets as J
from .charts import (
    Chart,
    ChartKind,
    ChartPoint,
    HopfData,
    SmoothMap,
    H_inverse_map,
    H_map,
    cylinder,
    j0_matrix,
    mult_i_matrix,
    punctured,
)
from .tensors import (
    ComplexStructureField,
    DifferentialForm,
    MetricField,
    ScalarField,
    VectorField,
    constant_field,
    exterior_derivative,
)

__all__ = [
    "HopfStructure",
    "DeckKind",
    "DeckGroupElement",
    "build_eta0",
    "build_etaA",
    "build_A",
    "build_JA",
    "build_J0",
    "build_forms_and_metric",
    "group_action",
    "complex_to_real_matrix",
    "conjugated_diagonal",
    "deck_on_cylinder",
    "theorem_A_rescale",
    "reeb_rotation",
]


def _embedding(n: int) -> np.ndarray:
    """``(2n+1, 2n)`` matrix placing sphere components after the ``t`` slot."""
    E = np.zeros((2 * n + 1, 2 * n))
    E[1:, :] = np.eye(2 * n)
    return E


def _e0(n: int) -> np.ndarray:
    e = np.zeros(2 * n + 1)
    e[0] = 1.0
    return e


class _Coeffs:
    """Closed-form coefficient functions shared by the builders."""

    def __init__(self, data: HopfData):
        n = data.n
        self.n = n
        self.ar = data.a_real
        self.I = mult_i_matrix(n)
        self.J0 = j0_matrix(n)
        self.E = _embedding(n)
        self.e0 = _e0(n)

    def lift(self, v):
        return J.einsum("ai,bi->ba", self.E, v)

    def lift2(self, m):
        return J.einsum("bij,cj->bic", J.einsum("ai,bij->baj", self.E, m), self.E)

    def eta0_w(self, x):
        return J.einsum("ij,bj->bi", self.I, x[:, 1:])

    def weight(self, x):
        w = x[:, 1:]
        return (w * w * self.ar).sum(axis=1)

    def etaA_w(self, x):
        return self.eta0_w(x) / self.weight(x)[:, None]

    def A_w(self, x):
        return J.einsum("ij,bj->bi", self.I, x[:, 1:] * self.ar)

    def d_etaA_w(self, x):
        # d(eta_0 / f) = d eta_0 / f - df ^ eta_0 / f^2, with d eta_0 = -I
        f = self.weight(x)
        eta0 = self.eta0_w(x)
        df = x[:, 1:] * (2.0 * self.ar)
        t = J.einsum("bi,bj->bij", df, eta0)
        dfeta = (t - t.swapaxes(1, 2) if isinstance(t, J.Jet) else t - np.swapaxes(t, 1, 2)) * 0.5
        minus_I = np.broadcast_to(-self.I, (len(x),) + self.I.shape)
        return minus_I * (1.0 / f)[:, None, None] - dfeta * (1.0 / (f * f))[:, None, None]

    def dt_wedge_etaA(self, x):
        eta = self.lift(self.etaA_w(x))
        t = J.einsum("i,bj->bij", self.e0, eta)
        return (t - (t.swapaxes(1, 2) if isinstance(t, J.Jet) else np.swapaxes(t, 1, 2))) * 0.5

    def omega_tilde(self, x):
        return (self.dt_wedge_etaA(x) + self.lift2(self.d_etaA_w(x))) * 4.0

    def OmegaA(self, x):
        scale = J.exp(x[:, 0]) * 2.0
        return (self.dt_wedge_etaA(x) + self.lift2(self.d_etaA_w(x))) * scale[:, None, None]

    def JA(self, x):
        eta = self.etaA_w(x)
        A = self.A_w(x)
        inner = np.eye(2 * self.n) - J.einsum("bi,bj->bij", A, eta)
        block = J.einsum("ij,bjk->bik", self.J0, inner)
        top = J.einsum("i,bj->bij", self.e0, self.lift(eta))
        left = J.einsum("bi,j->bij", self.lift(A), self.e0)
        return top - left + self.lift2(block)

    def g_tilde(self, x):
        return J.einsum("bki,bkj->bij", self.JA(x), self.omega_tilde(x))


@dataclass(frozen=True)
class HopfStructure:
    """Every explicit object of the construction for one parameter set."""

    data: HopfData
    chart: Chart
    eta0: DifferentialForm
    etaA: DifferentialForm
    A: VectorField
    N: VectorField
    xi: VectorField
    JA: ComplexStructureField
    OmegaA: DifferentialForm
    omega_tilde: DifferentialForm
    g_tilde: MetricField
    theta: DifferentialForm
    t: ScalarField
    J0: ComplexStructureField = field(repr=False)

    @property
    def H(self) -> SmoothMap:
        return H_map(self.data)

    @property
    def H_inverse(self) -> SmoothMap:
        return H_inverse_map(self.data)

    def d_etaA(self) -> DifferentialForm:
        """Closed-form ``d eta_A`` (independent of :func:`exterior_derivative`)."""
        c = _Coeffs(self.data)
        return DifferentialForm(self.chart, lambda x: c.lift2(c.d_etaA_w(x)), "d_etaA", 2)


def build_eta0(n: int) -> DifferentialForm:
    """Standard contact form ``sum x_j dy_j - y_j dx_j`` on the sphere factor."""
    if n < 2:
        raise ValueError("n must be at least 2")
    c = _Coeffs(HopfData(n, (1.0,) * n, 1.0))
    return DifferentialForm(cylinder(n), lambda x: c.lift(c.eta0_w(x)), "eta0", 1)


def build_etaA(data: HopfData) -> DifferentialForm:
    c = _Coeffs(data)
    return DifferentialForm(cylinder(data.n), lambda x: c.lift(c.etaA_w(x)), "etaA", 1)


def build_A(data: HopfData) -> VectorField:
    """Reeb field of ``eta_A``: generator of ``z_j -> e^{i a_j u} z_j``."""
    c = _Coeffs(data)
    return VectorField(cylinder(data.n), lambda x: c.lift(c.A_w(x)), "A")


def build_JA(data: HopfData) -> ComplexStructureField:
    c = _Coeffs(data)
    return ComplexStructureField(cylinder(data.n), c.JA, "JA")


def build_J0(n: int) -> ComplexStructureField:
    return ComplexStructureField(punctured(n), constant_field(j0_matrix(n)), "J0")


def build_forms_and_metric(data: HopfData) -> HopfStructure:
    c = _Coeffs(data)
    chart = cylinder(data.n)
    e0 = c.e0
    return HopfStructure(
        data=data,
        chart=chart,
        eta0=build_eta0(data.n),
        etaA=build_etaA(data),
        A=build_A(data),
        N=VectorField(chart, constant_field(e0), "N"),
        xi=VectorField(chart, constant_field(e0), "xi"),
        JA=build_JA(data),
        OmegaA=DifferentialForm(chart, c.OmegaA, "OmegaA", 2),
        omega_tilde=DifferentialForm(chart, c.omega_tilde, "omega~", 2),
        g_tilde=MetricField(chart, c.g_tilde, "g~"),
        theta=DifferentialForm(chart, constant_field(-e0), "theta", 1),
        t=ScalarField(chart, lambda x: x[:, 0], "t"),
        J0=build_J0(data.n),
    )


# -- group actions -------------------------------------------------------------------

class DeckKind(enum.Enum):
    FLOW = "flow"
    TORUS = "torus"
    DECK = "deck"
    UNITARY = "unitary"


def complex_to_real_matrix(U: np.ndarray) -> np.ndarray:
    """Real ``2n x 2n`` matrix of a complex ``n x n`` matrix on interleaved coordinates."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    R = np.zeros((2 * n, 2 * n))
    R[0::2, 0::2] = U.real
    R[0::2, 1::2] = -U.imag
    R[1::2, 0::2] = U.imag
    R[1::2, 1::2] = U.real
    return R


@dataclass(frozen=True)
class DeckGroupElement:
    """``FLOW`` (t -> t + s), ``TORUS`` (z_j -> e^{i u_j} z_j), ``DECK`` (z -> Lambda^k z)
    or ``UNITARY`` (w -> U w)."""

    kind: DeckKind
    s: float = 0.0
    angles: Optional[tuple] = None
    k: int = 1
    U: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def chart_kind(self) -> ChartKind:
        return ChartKind.PUNCTURED_CN if self.kind is DeckKind.DECK else ChartKind.CYLINDER

    def as_map(self, data: HopfData) -> SmoothMap:
        n = data.n
        if self.kind is DeckKind.FLOW:
            shift = np.zeros(2 * n + 1)
            shift[0] = self.s
            return SmoothMap(cylinder(n), cylinder(n), lambda x: x + shift, f"phi_{self.s:g}")
        if self.kind is DeckKind.DECK:
            R = complex_to_real_matrix(np.diag(data.lam ** self.k))
            return SmoothMap(punctured(n), punctured(n),
                             lambda x: J.einsum("ij,bj->bi", R, x), f"gamma^{self.k}")
        if self.kind is DeckKind.TORUS:
            if self.angles is None or len(self.angles) != n:
                raise ValueError("TORUS element needs n angles")
            R = complex_to_real_matrix(np.diag(np.exp(1j * np.asarray(self.angles))))
        else:
            if self.U is None or np.shape(self.U) != (n, n):
                raise ValueError("UNITARY element needs an n x n matrix")
            R = complex_to_real_matrix(self.U)
        M = np.eye(2 * n + 1)
        M[1:, 1:] = R
        return SmoothMap(cylinder(n), cylinder(n),
                         lambda x: J.einsum("ij,bj->bi", M, x), self.kind.value)


def reeb_rotation(data: HopfData, u: float) -> DeckGroupElement:
    """Flow of ``A`` for time ``u``: ``z_j -> e^{i a_j u} z_j``."""
    return DeckGroupElement(DeckKind.TORUS, angles=tuple(np.asarray(data.a) * u))


def group_action(el: DeckGroupElement, p, data: HopfData):
    """Apply a group element to a :class:`ChartPoint` or a ``(B, D)`` array."""
    if isinstance(p, ChartPoint):
        if p.chart is not el.chart_kind:
            raise ValueError(f"{el.kind.value} acts on {el.chart_kind.value}, got {p.chart.value}")
        out = el.as_map(data)(p.array())[0]
        if p.chart is ChartKind.CYLINDER:
            out[1:] /= np.linalg.norm(out[1:])
        return ChartPoint(p.chart, tuple(out))
    pts = np.atleast_2d(p)
    if pts.shape[-1] != el.as_map(data).source.dim:
        raise ValueError(f"{el.kind.value} acts on {el.chart_kind.value} points")
    return el.as_map(data)(pts)


def conjugated_diagonal(data: HopfData, s: float, angles) -> np.ndarray:
    """Complex diagonal ``mu`` with ``H o (phi_s x psi) o H^-1 = diag(mu)``."""
    return np.exp(np.asarray(data.a) * s + 1j * np.asarray(angles))


def deck_on_cylinder(data: HopfData, k: int = 1) -> SmoothMap:
    """The deck generator ``z -> Lambda z`` seen on the cylinder: ``phi_{-s} x c``."""
    flow = DeckGroupElement(DeckKind.FLOW, s=-k * data.s).as_map(data)
    rot = DeckGroupElement(DeckKind.TORUS, angles=tuple(k * np.angle(data.c))).as_map(data)
    return flow.then(rot)


# -- rescaling recipe ---------------------------------------------------------------

def theorem_A_rescale(Omega: DifferentialForm, xi: VectorField, Jf: ComplexStructureField,
                      points=None):
    """Normalise a Kaehler form along a holomorphic homothetic flow.

    With ``s(x) = Omega(J xi, xi)`` returns ``(Theta_bar, theta_bar)`` where
    ``Theta_bar = 2 Omega / s`` and ``theta_bar = -d log s``.  When ``points`` is
    given, ``s > 0`` is verified there first.
    """
    chart = Omega.chart

    def s_fn(x):
        v = xi.fn(x)
        Jv = J.einsum("bij,bj->bi", Jf.fn(x), v)
        return J.einsum("bi,bi->b", J.einsum("bi,bij->bj", Jv, Omega.fn(x)), v)

    s = ScalarField(chart, s_fn, "s")
    if points is not None:
        vals = s.at(points)
        if np.any(vals <= 0):
            bad = int(np.argmin(vals))
            raise ValueError(f"s = Omega(J xi, xi) is not positive at sample {bad}: {vals[bad]:.3e}")

    def Theta_fn(x):
        return Omega.fn(x) * (2.0 / s_fn(x))[:, None, None]

    log_s = ScalarField(chart, lambda x: J.log(s_fn(x)), "log s")
    theta_bar = -exterior_derivative(log_s)
    return (DifferentialForm(chart, Theta_fn, "Theta_bar", 2),
            DifferentialForm(chart, theta_bar.fn, "theta_bar", 1))
