"""Hermitian data derived from a metric and an almost complex structure."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .charts import Chart, ChartKind, _householder_complement
from .tensors import (
    BilinearField,
    DifferentialForm,
    EndomorphismField,
    VectorField,
    apply_endomorphism,
    bracket,
    exterior_derivative,
    raise_index,
)

__all__ = [
    "AdaptedCoframe",
    "fundamental_form",
    "lee_form_field",
    "extract_lee_form",
    "lee_field",
    "tangent_extension",
    "nijenhuis",
    "nijenhuis_at",
    "null_basis",
    "levi_form",
    "levi_matrix",
    "contact_volume",
    "build_adapted_coframe",
]


def fundamental_form(g: BilinearField, Jf: EndomorphismField) -> DifferentialForm:
    """``omega(X, Y) = g(X, J Y)``."""
    fn = lambda x: J.einsum("bik,bkj->bij", g.fn(x), Jf.fn(x))
    return DifferentialForm(g.chart, fn, "omega", 2)


def _triples(d: int):
    idx = np.array(list(itertools.combinations(range(d), 3)))
    return idx[:, 0], idx[:, 1], idx[:, 2]


def _lee_system(omega: DifferentialForm, x):
    """Least-squares Lee form and equation residuals at ``x`` (array or jet).

    Unknown ``theta`` solves ``d omega = theta ^ omega`` on every triple of
    projected coordinate vectors.  The normal component of ``theta`` (cylinder
    chart) is pinned to zero by adding ``I - P`` to the normal matrix.
    """
    chart = omega.chart
    d = chart.dim
    P = chart.projector(x)
    W = omega.fn(x)
    dW = exterior_derivative(omega).fn(x)
    Wp = J.einsum("bai,bic->bac", J.einsum("bai,bij->baj", P, W), P)
    dWp = J.einsum("bijk,bkc->bijc", dW, P)
    dWp = J.einsum("bijc,bjd->bidc", dWp, P)
    dWp = J.einsum("bidc,bie->bedc", dWp, P)
    I, Jx, K = _triples(d)
    third = 1.0 / 3.0
    A = (
        P[:, I, :] * Wp[:, Jx, K][:, :, None]
        + P[:, Jx, :] * Wp[:, K, I][:, :, None]
        + P[:, K, :] * Wp[:, I, Jx][:, :, None]
    ) * third
    b = dWp[:, I, Jx, K]
    normal = J.einsum("bri,brj->bij", A, A) + (np.eye(d) - P)
    rhs = J.einsum("bri,br->bi", A, b)
    theta = J.einsum("bij,bj->bi", J.inv(normal), rhs)
    resid = J.einsum("bri,bi->br", A, theta) - b
    return theta, resid


def lee_form_field(omega: DifferentialForm) -> DifferentialForm:
    """The pointwise least-squares Lee form of ``omega`` as a differentiable field."""
    if omega.chart.manifold_dim < 4:
        raise ValueError("Lee form extraction needs real dimension >= 4")
    return DifferentialForm(omega.chart, lambda x: _lee_system(omega, x)[0], "theta", 1)


def extract_lee_form(omega: DifferentialForm, points):
    """Return ``(theta, residual)``: Lee covectors ``(B, D)`` and the l.c.K. residual ``(B,)``.

    The residual is the max-abs misfit of ``d omega = theta ^ omega`` over all
    coordinate triples; it certifies the l.c.K. condition when small.
    """
    points = np.atleast_2d(points)
    W = omega.at(points)
    chart = omega.chart
    E = chart.tangent_basis(points)
    Wt = np.einsum("bia,bij,bjc->bac", E, W, E)
    if np.any(np.abs(np.linalg.det(Wt)) < 1e-14):
        raise np.linalg.LinAlgError("omega is degenerate at a sample point")
    theta, resid = _lee_system(omega, points)
    return np.asarray(theta), np.abs(np.asarray(resid)).max(axis=1)


def lee_field(g: BilinearField, theta: DifferentialForm) -> VectorField:
    """``theta^#`` with ``g(X, theta^#) = theta(X)``."""
    out = raise_index(g, theta)
    return VectorField(out.chart, out.fn, f"{theta.name}#")


def tangent_extension(chart: Chart, vectors: np.ndarray) -> VectorField:
    """Vector field ``x -> P(x) v_b`` extending per-sample vectors tangentially.

    Only meaningful when evaluated on the same batch the vectors belong to.
    """
    vectors = np.atleast_2d(vectors)

    def fn(x):
        return J.einsum("bij,bj->bi", chart.projector(x), vectors)

    return VectorField(chart, fn, "X")


def nijenhuis(Jf: EndomorphismField, X: VectorField, Y: VectorField, points) -> np.ndarray:
    """``[JX, JY] - J[JX, Y] - J[X, JY] + J^2 [X, Y]`` at the points.

    The ``J^2`` form is tensorial for any endomorphism field, so the result does not
    depend on how ``X`` and ``Y`` are extended off the sample points.
    """
    JX, JY = apply_endomorphism(Jf, X), apply_endomorphism(Jf, Y)
    Jm = Jf.at(points)
    app = lambda v: np.einsum("bij,bj->bi", Jm, v)
    return (
        bracket(JX, JY).at(points)
        - app(bracket(JX, Y).at(points))
        - app(bracket(X, JY).at(points))
        + app(app(bracket(X, Y).at(points)))
    )


def nijenhuis_at(Jf: EndomorphismField, points, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Nijenhuis tensor on per-sample tangent vectors ``X``, ``Y``."""
    return nijenhuis(Jf, tangent_extension(Jf.chart, X), tangent_extension(Jf.chart, Y), points)


# -- contact data -----------------------------------------------------------------------

def _sphere_frame(chart: Chart, points) -> np.ndarray:
    if chart.kind is ChartKind.CYLINDER:
        return chart.sphere_basis(points)
    return chart.tangent_basis(points)


def null_basis(eta: DifferentialForm, points):
    """Orthonormal basis ``(B, D, 2n-2)`` of ``Null eta`` on the sphere factor and a
    unit complement ``(B, D)``."""
    points = np.atleast_2d(points)
    S = _sphere_frame(eta.chart, points)
    e = np.einsum("bi,bia->ba", eta.at(points), S)
    norm = np.linalg.norm(e, axis=1, keepdims=True)
    if np.any(norm < 1e-14):
        raise ValueError("eta vanishes on the sphere factor at a sample point")
    u = e / norm
    basis = np.einsum("bia,bac->bic", S, _householder_complement(u))
    return basis, np.einsum("bia,ba->bi", S, u)


def levi_form(eta: DifferentialForm, Jf: EndomorphismField, X, Y, points, tol: float = 1e-9):
    """``Psi(X, Y) = d eta(J X, Y)`` for ``X, Y`` in ``Null eta``."""
    points = np.atleast_2d(points)
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    ev = eta.at(points)
    for name, v in (("X", X), ("Y", Y)):
        if np.any(np.abs(np.einsum("bi,bi->b", ev, v)) > tol):
            raise ValueError(f"{name} is not in Null eta")
    deta = exterior_derivative(eta).at(points)
    JX = np.einsum("bij,bj->bi", Jf.at(points), X)
    return np.einsum("bij,bi,bj->b", deta, JX, Y)


def levi_matrix(eta: DifferentialForm, Jf: EndomorphismField, points) -> np.ndarray:
    """Levi form on an orthonormal basis of ``Null eta`` (``(B, 2n-2, 2n-2)``)."""
    basis, _ = null_basis(eta, points)
    deta = exterior_derivative(eta).at(points)
    JB = np.einsum("bij,bja->bia", Jf.at(points), basis)
    return np.einsum("bia,bij,bjc->bac", JB, deta, basis)


def contact_volume(eta: DifferentialForm, points) -> np.ndarray:
    """Determinant of the pairing of ``(eta, d eta)`` against a Null-eta adapted frame.

    Nonzero exactly where ``eta ^ (d eta)^{n-1}`` is nonzero on the sphere factor.
    """
    basis, r = null_basis(eta, points)
    ev = eta.at(points)
    deta = exterior_derivative(eta).at(points)
    m = basis.shape[-1] + 1
    Q = np.zeros((len(ev), m, m))
    Q[:, 0, 0] = np.einsum("bi,bi->b", ev, r)
    Q[:, 0, 1:] = np.einsum("bi,bia->ba", ev, basis)
    Q[:, 1:, 0] = np.einsum("bia,bij,bj->ba", basis, deta, r)
    Q[:, 1:, 1:] = np.einsum("bia,bij,bjc->bac", basis, deta, basis)
    return np.linalg.det(Q)


# -- adapted unitary coframe ------------------------------------------------------------

@dataclass(frozen=True)
class AdaptedCoframe:
    """Coframe ``{theta, theta o J, theta^alpha, conj theta^alpha}`` at a batch of points.

    Covectors are ambient (``D`` components); ``basis`` is the orthonormal tangent
    frame used to restrict them, ``gram`` the metric in that frame.  With
    ``{e_a, J e_a}`` g-orthonormal and orthogonal to ``theta^#, J theta^#``,
    ``theta^a(X) = g(X, e_a) + i g(X, J e_a)``, and ``Z_a = (e_a - i J e_a) / 2`` is
    the dual frame.
    """

    points: np.ndarray
    basis: np.ndarray
    gram: np.ndarray
    theta: np.ndarray
    theta_J: np.ndarray
    theta_alpha: np.ndarray
    frame: np.ndarray
    frame_J: np.ndarray
    lee: np.ndarray
    lee_J: np.ndarray

    @property
    def rank(self) -> int:
        return self.theta_alpha.shape[1]

    @property
    def dual_frame(self) -> np.ndarray:
        return 0.5 * (self.frame - 1j * self.frame_J)

    def matrix(self) -> np.ndarray:
        """Complex ``(B, 2n, D)`` rows ``theta, theta o J, theta^a, conj theta^a``."""
        return np.concatenate(
            [self.theta[:, None, :].astype(complex), self.theta_J[:, None, :].astype(complex),
             self.theta_alpha, self.theta_alpha.conj()],
            axis=1,
        )

    def pairing(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Bilinear ``g^{-1}(a, b)`` of ambient covectors restricted to tangent vectors."""
        ar = np.einsum("b...i,bia->b...a", a, self.basis)
        br = np.einsum("b...i,bia->b...a", b, self.basis)
        ginv = np.linalg.inv(self.gram)
        return np.einsum("b...a,bac,b...c->b...", ar, ginv, br)


def build_adapted_coframe(g: BilinearField, Jf: EndomorphismField, theta: DifferentialForm,
                          points, tol: float = 1e-8) -> AdaptedCoframe:
    """Gram-Schmidt unitary coframe adapted to the Lee form.

    Seed vectors are the chart coordinate vectors projected to the tangent
    space, in index order; the first ``n-1`` that survive projection off the
    complex span built so far are kept.
    """
    points = np.atleast_2d(points)
    chart = g.chart
    E = chart.tangent_basis(points)
    G = np.einsum("bia,bij,bjc->bac", E, g.at(points), E)
    Jm = np.einsum("bia,bij,bjc->bac", E, Jf.at(points), E)
    th = theta.at(points)
    thm = np.einsum("bi,bia->ba", th, E)
    if np.any(np.linalg.norm(thm, axis=1) < 1e-12):
        raise ValueError("theta vanishes at a sample point: adapted coframe undefined")
    lee = np.linalg.solve(G, thm[..., None])[..., 0]
    leeJ = np.einsum("bac,bc->ba", Jm, lee)
    B, m = thm.shape
    k = m // 2 - 1
    frame = np.zeros((B, k, m))
    frameJ = np.zeros((B, k, m))
    for b in range(B):
        Gb, Jb = G[b], Jm[b]
        ip = lambda u, v: u @ Gb @ v
        Q = [lee[b], leeJ[b]]
        Q = [q / np.sqrt(ip(q, q)) for q in Q]
        Q[1] = Q[1] - ip(Q[1], Q[0]) * Q[0]
        Q[1] /= np.sqrt(ip(Q[1], Q[1]))
        found = 0
        for seed in E[b]:  # rows: coordinate vectors in the tangent frame
            v = seed.copy()
            for q in Q:
                v = v - ip(v, q) * q
            nv = ip(v, v)
            if nv < tol:
                continue
            v = v / np.sqrt(nv)
            w = Jb @ v
            for q in Q:
                w = w - ip(w, q) * q
            w = w / np.sqrt(ip(w, w))
            frame[b, found], frameJ[b, found] = v, w
            Q += [v, w]
            found += 1
            if found == k:
                break
        if found < k:
            raise ValueError("could not complete the adapted frame at a sample point")
    ta = np.einsum("bac,bkc->bka", G, frame) + 1j * np.einsum("bac,bkc->bka", G, frameJ)
    lift = lambda v: np.einsum("bia,b...a->b...i", E, v)
    thetaJ = np.einsum("bi,bij->bj", th, Jf.at(points))
    return AdaptedCoframe(
        points=points,
        basis=E,
        gram=G,
        theta=th,
        theta_J=thetaJ,
        theta_alpha=lift(ta.real) + 1j * lift(ta.imag),
        frame=lift(frame),
        frame_J=lift(frameJ),
        lee=lift(lee),
        lee_J=lift(leeJ),
    )
