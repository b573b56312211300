"""Residual checks for the l.c.K. identities, and the LCR-transformation analyzer.

Every check returns :class:`CheckResult` objects whose pass flag is recomputed from
``max_residual < tolerance``.  Lower-bound requirements (positivity, margins of
negative controls) are expressed with negated quantities: a Levi form check
reports ``-min eigenvalue`` against tolerance ``0``, and a negative control that
must exceed ``10 * tol`` reports ``-observed`` against ``-10 * tol``.

Residuals of tensors are taken componentwise in the orthonormal tangent frame
:meth:`~lckhopf.charts.Chart.tangent_basis`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import jets as J
from .charts import ChartKind, HopfData, SmoothMap, j0_matrix
from .hermitian import (
    AdaptedCoframe,
    build_adapted_coframe,
    contact_volume,
    extract_lee_form,
    fundamental_form,
    lee_form_field,
    levi_matrix,
    nijenhuis_at,
)
from .hopf import (
    DeckGroupElement,
    DeckKind,
    HopfStructure,
    build_forms_and_metric,
    complex_to_real_matrix,
    conjugated_diagonal,
    theorem_A_rescale,
)
from .tensors import (
    BilinearField,
    ComplexStructureField,
    DifferentialForm,
    EndomorphismField,
    MetricField,
    ScalarField,
    VectorField,
    apply_endomorphism,
    bracket,
    constant_field,
    covariant_derivative_oneform,
    exterior_derivative,
    interior_product,
    lie_derivative_endomorphism,
    lie_derivative_metric,
    pullback,
    raise_index,
)

__all__ = [
    "CheckResult",
    "LCRDecomposition",
    "GaugedCoframe",
    "DEFAULT_TOLERANCES",
    "SUITE_NAMES",
    "sample_points",
    "check_lck",
    "check_parallel_lee",
    "check_contact_pseudohermitian",
    "reeb_field",
    "check_holomorphic_isometry",
    "check_homothety",
    "homothety_factor",
    "check_multiplicativity",
    "check_biholomorphism",
    "check_integrability",
    "check_lie_symmetries",
    "check_theorem_A",
    "analyze_lcr",
    "g_element",
    "check_perp_preservation",
    "negative_control",
    "run_suite",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    points_tested: int
    notes: str = ""
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "points": int(self.points_tested),
            "pass": self.passed,
            "notes": self.notes,
        }


def _result(name, residual, tol, npts, notes="", **extras) -> CheckResult:
    r = float(np.max(residual)) if np.size(residual) else 0.0
    return CheckResult(name, r, float(tol), int(npts), notes, extras)


def negative_control(name: str, observed: float, tol: float, npts: int, notes: str = "") -> CheckResult:
    """Pass iff ``observed > 10 * tol`` (a perturbed input must be detected)."""
    return CheckResult(name, -float(observed), -10.0 * float(tol), int(npts),
                       notes or f"sensitivity: observed {observed:.3e} must exceed {10 * tol:.1e}",
                       {"observed": float(observed)})


# -- sampling ------------------------------------------------------------------------

def sample_points(structure: HopfStructure, rng: np.random.Generator, count: int,
                  t_range: float = 2.0, max_cond: float = 1e12) -> np.ndarray:
    """Seeded cylinder samples; points with an ill-conditioned metric are redrawn."""
    chart = structure.chart
    pts = chart.sample(rng, count, t_range)
    for _ in range(10):
        E = chart.tangent_basis(pts)
        G = np.einsum("bia,bij,bjc->bac", E, structure.g_tilde.at(pts), E)
        bad = np.linalg.cond(G) > max_cond
        if not np.any(bad):
            return pts
        pts[bad] = chart.sample(rng, int(bad.sum()), t_range)
    raise RuntimeError("could not draw well-conditioned sample points")


def _frame(chart, points):
    return chart.tangent_basis(points)


def _r1(c, E):
    return np.einsum("bi,bia->ba", c, E)


def _r2(c, E):
    return np.einsum("bij,bia,bjc->bac", c, E, E)


def _maxabs(a, axes=None):
    a = np.abs(np.asarray(a))
    return a.reshape(len(a), -1).max(axis=1)


# -- l.c.K. and Lee form -------------------------------------------------------------

def check_lck(g: BilinearField, Jf: EndomorphismField, points, tol: float = 1e-7,
              name: str = "lck") -> CheckResult:
    """``d omega = theta ^ omega`` with ``d theta = 0`` for ``omega = g(., J .)``.

    ``theta`` is the least-squares Lee form; ``d theta`` is obtained by
    differentiating the least-squares solution itself through jets.
    """
    points = np.atleast_2d(points)
    omega = fundamental_form(g, Jf)
    theta, resid = extract_lee_form(omega, points)
    E = _frame(g.chart, points)
    dtheta = _maxabs(_r2(exterior_derivative(lee_form_field(omega)).at(points), E))
    total = np.maximum(resid, dtheta)
    return _result(
        name, total, tol, len(points),
        f"lck residual {resid.max():.3e}, |d theta| {dtheta.max():.3e}",
        lck_residual=float(resid.max()), dtheta_residual=float(dtheta.max()), theta=theta,
    )


def check_parallel_lee(g: BilinearField, Jf: EndomorphismField, points, tol: float = 1e-6,
                       name: str = "parallel_lee") -> CheckResult:
    """``max |nabla theta|`` for the extracted Lee form; records ``|theta|_g`` statistics."""
    points = np.atleast_2d(points)
    theta = lee_form_field(fundamental_form(g, Jf))
    nab = covariant_derivative_oneform(g, theta, points)
    th = theta.at(points)
    sharp = raise_index(g, theta).at(points)
    norm2 = np.einsum("bi,bi->b", th, sharp)
    norm = np.sqrt(np.maximum(norm2, 0.0))
    return _result(
        name, _maxabs(nab), tol, len(points),
        f"|theta|_g mean {norm.mean():.12g}, std {norm.std():.3e}",
        lee_norm_mean=float(norm.mean()), lee_norm_std=float(norm.std()),
        lee_norm_sq_mean=float(norm2.mean()),
    )


# -- contact / pseudo-Hermitian ------------------------------------------------------

def reeb_field(eta: DifferentialForm, points) -> np.ndarray:
    """Numerical Reeb field on the sphere factor: ``eta(A) = 1``, ``i_A d eta = 0``."""
    chart = eta.chart
    S = chart.sphere_basis(points) if chart.kind is ChartKind.CYLINDER else chart.tangent_basis(points)
    D = _r2(exterior_derivative(eta).at(points), S)
    e = _r1(eta.at(points), S)
    _, _, vt = np.linalg.svd(D)
    k = vt[:, -1, :]
    k = k / np.einsum("ba,ba->b", e, k)[:, None]
    return np.einsum("bia,ba->bi", S, k)


def check_contact_pseudohermitian(eta: DifferentialForm, J_on_null: EndomorphismField, points,
                                  A: Optional[VectorField] = None, tols: Optional[dict] = None,
                                  prefix: str = "contact") -> List[CheckResult]:
    """Volume pairing, Reeb identities and Levi positivity of ``(eta, J)``.

    Returns four results: ``volume`` (``|det| > vol_min``), ``reeb_eta_A``
    (``|eta(A) - 1|``), ``reeb_iA_deta`` (``|i_A d eta|``) and ``levi_positive``.
    """
    tols = {"volume": 1e-6, "reeb_eta_A": 1e-10, "reeb_iA_deta": 1e-9, "levi_positive": 0.0,
            **(tols or {})}
    points = np.atleast_2d(points)
    npts = len(points)
    vol = np.abs(contact_volume(eta, points))
    Av = A.at(points) if A is not None else reeb_field(eta, points)
    etaA = np.einsum("bi,bi->b", eta.at(points), Av)
    S = eta.chart.sphere_basis(points) if eta.chart.kind is ChartKind.CYLINDER else _frame(eta.chart, points)
    iA = np.einsum("bi,bij,bja->ba", Av, exterior_derivative(eta).at(points), S)
    L = levi_matrix(eta, J_on_null, points)
    sym = 0.5 * (L + np.swapaxes(L, 1, 2))
    mineig = np.linalg.eigvalsh(sym).min(axis=1)
    asym = _maxabs(L - np.swapaxes(L, 1, 2))
    return [
        CheckResult(f"{prefix}.volume", -float(vol.min()), -tols["volume"], npts,
                    f"min |det| {vol.min():.6g} must exceed {tols['volume']:.1e}"),
        _result(f"{prefix}.reeb_eta_A", np.abs(etaA - 1.0), tols["reeb_eta_A"], npts),
        _result(f"{prefix}.reeb_iA_deta", _maxabs(iA), tols["reeb_iA_deta"], npts),
        CheckResult(f"{prefix}.levi_positive", -float(mineig.min()), tols["levi_positive"], npts,
                    f"min Levi eigenvalue {mineig.min():.6g} must be > 0; asymmetry {asym.max():.2e}",
                    {"min_eigenvalue": float(mineig.min()), "asymmetry": float(asym.max())}),
    ]


# -- maps ----------------------------------------------------------------------------

def check_holomorphic_isometry(f: SmoothMap, g: BilinearField, Jf: EndomorphismField, points,
                               tol: float = 1e-8, name: str = "map") -> List[CheckResult]:
    """Residuals of ``f^* g - g`` and ``f_* J - J f_*`` (f maps the chart to itself)."""
    points = np.atleast_2d(points)
    E = _frame(f.source, points)
    q = f(points)
    DfE = np.einsum("bij,bja->bia", f.jacobian(points), E)
    iso = np.einsum("bia,bij,bjc->bac", DfE, g.at(q), DfE) - _r2(g.at(points), E)
    JpE = np.einsum("bij,bja->bia", Jf.at(points), E)
    hol = np.einsum("bij,bja->bia", f.jacobian(points), JpE) - np.einsum("bij,bja->bia", Jf.at(q), DfE)
    return [
        _result(f"{name}.isometry", _maxabs(iso), tol, len(points)),
        _result(f"{name}.holomorphic", _maxabs(hol), tol, len(points)),
    ]


def homothety_factor(f: SmoothMap, Omega: DifferentialForm, points) -> np.ndarray:
    """Per-point least-squares ``rho`` with ``f^* Omega ~ rho Omega``."""
    E = _frame(f.source, points)
    pulled = _r2(pullback(f, Omega).at(points), E)
    ref = _r2(Omega.at(points), E)
    return np.einsum("bac,bac->b", pulled, ref) / np.einsum("bac,bac->b", ref, ref)


def check_homothety(f: SmoothMap, Omega: DifferentialForm, rho_expected: float, points,
                    tol: float = 1e-8, name: str = "homothety") -> CheckResult:
    """Relative residual ``|f^* Omega - rho Omega| / |rho Omega|`` per point."""
    points = np.atleast_2d(points)
    E = _frame(f.source, points)
    pulled = _r2(pullback(f, Omega).at(points), E)
    ref = rho_expected * _r2(Omega.at(points), E)
    rel = _maxabs(pulled - ref) / _maxabs(ref)
    return _result(name, rel, tol, len(points), f"rho = {rho_expected:.12g}")


def check_multiplicativity(pairs: Sequence, Omega: DifferentialForm, points, tol: float = 1e-9,
                           name: str = "homothety.multiplicativity") -> CheckResult:
    """``rho(f1 o f2) = rho(f1) rho(f2)`` for each pair of maps."""
    points = np.atleast_2d(points)
    res = []
    for f1, f2 in pairs:
        r1 = homothety_factor(f1, Omega, points)
        r2 = homothety_factor(f2, Omega, points)
        r12 = homothety_factor(f2.then(f1), Omega, points)
        res.append(np.abs(r12 - r1 * r2) / np.abs(r1 * r2))
    return _result(name, np.concatenate(res), tol, len(points) * len(pairs))


def check_biholomorphism(f: SmoothMap, J_src: EndomorphismField, J_tgt: EndomorphismField,
                         points, vectors: np.ndarray, tol: float = 1e-7,
                         name: str = "biholomorphism") -> CheckResult:
    """``f_* J_src X - J_tgt f_* X`` on ``vectors`` of shape ``(B, K, D)``."""
    points = np.atleast_2d(points)
    Df = f.jacobian(points)
    JX = np.einsum("bij,bkj->bki", J_src.at(points), vectors)
    lhs = np.einsum("bij,bkj->bki", Df, JX)
    rhs = np.einsum("bij,bkj->bki", J_tgt.at(f(points)), np.einsum("bij,bkj->bki", Df, vectors))
    scale = np.maximum(_maxabs(np.einsum("bij,bkj->bki", Df, vectors)), 1.0)
    return _result(name, _maxabs(lhs - rhs) / scale, tol, len(points) * vectors.shape[1],
                   "relative to max(|f_* X|, 1)")


def check_integrability(Jf: EndomorphismField, points, X: np.ndarray, Y: np.ndarray,
                        tol: float = 1e-7, name: str = "nijenhuis") -> CheckResult:
    N = nijenhuis_at(Jf, points, X, Y)
    return _result(name, _maxabs(N), tol, len(np.atleast_2d(points)))


def check_lie_symmetries(g: BilinearField, Jf: EndomorphismField, theta: DifferentialForm,
                         points, tol: float = 1e-7, prefix: str = "symmetry") -> List[CheckResult]:
    """Lee and anti-Lee fields preserve ``g`` and ``J`` and commute."""
    points = np.atleast_2d(points)
    E = _frame(g.chart, points)
    lee = raise_index(g, theta)
    leeJ = apply_endomorphism(Jf, lee)
    out = []
    for label, X in (("lee", lee), ("anti_lee", leeJ)):
        Lg = _r2(lie_derivative_metric(X, g).at(points), E)
        LJ = np.einsum("bij,bja->bia", lie_derivative_endomorphism(X, Jf).at(points), E)
        out.append(_result(f"{prefix}.L_{label}_g", _maxabs(Lg), tol, len(points)))
        out.append(_result(f"{prefix}.L_{label}_J", _maxabs(LJ), tol, len(points)))
    out.append(_result(f"{prefix}.bracket_lee_anti_lee", _maxabs(bracket(lee, leeJ).at(points)),
                       tol, len(points)))
    return out


def check_koszul(g: BilinearField, sigma: DifferentialForm, points, tol: float = 1e-7,
                 name: str = "koszul") -> CheckResult:
    """``2 g(nabla_X sigma^#, Y) = (L_{sigma^#} g)(X, Y) + 2 d sigma(X, Y)``."""
    points = np.atleast_2d(points)
    E = _frame(g.chart, points)
    lhs = 2.0 * covariant_derivative_oneform(g, sigma, points)
    rhs = _r2(lie_derivative_metric(raise_index(g, sigma), g).at(points), E) + 2.0 * _r2(
        exterior_derivative(sigma).at(points), E)
    return _result(name, _maxabs(lhs - rhs), tol, len(points))


# -- rescaling recipe -------------------------------------------------------------------

def check_theorem_A(S: HopfStructure, points, tol: float = 1e-9, tol_scale: float = 1e-10,
                    scale: float = 3.7) -> List[CheckResult]:
    """The normalisation ``(2 Omega / s, -d log s)`` reproduces ``(omega~, -dt)``."""
    points = np.atleast_2d(points)
    E = _frame(S.chart, points)
    Tb, tb = theorem_A_rescale(S.OmegaA, S.xi, S.JA, points)
    Tc, tc = theorem_A_rescale(S.OmegaA * scale, S.xi, S.JA, points)
    Tv, tv = _r2(Tb.at(points), E), _r1(tb.at(points), E)
    w0 = points.copy()
    w0[:, 0] = 0.0
    S_sph = S.chart.sphere_basis(w0)
    i_xi = _r1(interior_product(S.xi, S.OmegaA).at(w0), S_sph) - _r1(S.etaA.at(w0), S_sph)
    n = len(points)
    return [
        _result("theorem_a.Theta_bar", _maxabs(Tv - _r2(S.omega_tilde.at(points), E)), tol, n),
        _result("theorem_a.theta_bar", _maxabs(tv - _r1(S.theta.at(points), E)), tol, n),
        _result("theorem_a.scale_invariance",
                np.maximum(_maxabs(_r2(Tc.at(points), E) - Tv), _maxabs(_r1(tc.at(points), E) - tv)),
                tol_scale, n, f"Omega -> {scale} Omega"),
        _result("theorem_a.i_xi_Omega_is_eta", _maxabs(i_xi), tol, n, "on the slice t = 0"),
    ]


# -- LCR analyzer -------------------------------------------------------------------------

@dataclass(frozen=True)
class LCRDecomposition:
    lam: np.ndarray
    U: np.ndarray
    v: np.ndarray
    residuals: Dict[str, np.ndarray]
    matrix: np.ndarray = field(repr=False)


class GaugedCoframe:
    """A coframe with rows replaced by ``G @ rows`` for a structure-group element ``G``."""

    def __init__(self, base: AdaptedCoframe, G: np.ndarray):
        self.base = base
        self.G = np.asarray(G, dtype=complex)

    def matrix(self) -> np.ndarray:
        return np.einsum("bij,bjk->bik", np.broadcast_to(self.G, (len(self.base.points),) + self.G.shape[-2:]),
                         self.base.matrix())

    def __getattr__(self, item):
        return getattr(self.base, item)


def g_element(lam, U, v) -> np.ndarray:
    """Matrix of ``(lambda, U, v)`` acting on coframe rows ``(theta, theta J, theta^a, conj)``."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    k = U.shape[0]
    G = np.zeros((2 + 2 * k, 2 + 2 * k), dtype=complex)
    G[0, 0] = 1.0
    G[1, 1] = lam
    G[2:2 + k, 1] = v
    G[2:2 + k, 2:2 + k] = np.sqrt(lam) * U
    G[2 + k:, 1] = v.conj()
    G[2 + k:, 2 + k:] = np.sqrt(lam) * U.conj()
    return G


def analyze_lcr(f: SmoothMap, coframe_field: Callable, points, target_coframe_field: Optional[Callable] = None,
                tol: float = 1e-8, name: str = "lcr"):
    """Express ``f^*`` of the coframe at ``f(p)`` in the coframe at ``p``.

    ``lambda`` comes from the anti-Lee row by metric pairing, ``v`` from its
    column and ``U`` from the ``theta^a`` block.  The check passes when the whole
    matrix equals the reconstructed structure-group element and ``U`` is unitary.
    """
    points = np.atleast_2d(points)
    Cp = coframe_field(points)
    q = f(points)
    Cq = (target_coframe_field or coframe_field)(q)
    Df = f.jacobian(points)
    pulled = np.einsum("bri,bij->brj", Cq.matrix(), Df)  # ambient covectors at p
    E = Cp.basis
    M = np.einsum("bri,bia->bra", pulled, E) @ np.linalg.inv(np.einsum("bri,bia->bra", Cp.matrix(), E))
    thJ = Cp.matrix()[:, 1, :]
    lam = (Cp.pairing(pulled[:, 1, :], thJ) / Cp.pairing(thJ, thJ)).real
    k = (M.shape[1] - 2) // 2
    sl = np.sqrt(np.abs(lam))
    a = slice(2, 2 + k)
    U = M[:, a, a] / sl[:, None, None]
    v = M[:, a, 1]
    G = np.stack([g_element(l, u, vv) for l, u, vv in zip(np.abs(lam), U, v)])
    diff = np.abs(M - G)
    unit = _maxabs(np.conj(np.swapaxes(U, 1, 2)) @ U - np.eye(k))
    residuals = {
        "f*theta": diff[:, 0, :].max(axis=1),
        "f*theta_J": diff[:, 1, :].max(axis=1),
        "f*theta_alpha": diff[:, 2:, :].reshape(len(points), -1).max(axis=1),
        "unitarity": unit,
        "lambda_positive": np.maximum(-lam, 0.0),
    }
    total = np.max(np.stack(list(residuals.values())), axis=0)
    notes = f"lambda in [{lam.min():.12g}, {lam.max():.12g}], max |v| {np.abs(v).max():.3e}"
    if np.any(lam <= 0):
        notes = "lambda <= 0: co-orientation of theta o J not preserved; " + notes
    decomp = LCRDecomposition(lam, U, v, residuals, M)
    return decomp, _result(name, total, tol, len(points), notes)


def check_perp_preservation(f: SmoothMap, g: BilinearField, Jf: EndomorphismField,
                            theta: DifferentialForm, points, tol: float = 1e-8,
                            name: str = "perp_preservation") -> CheckResult:
    """``f_*`` maps ``{theta^#, J theta^#}^perp`` into itself, commuting with ``J`` there."""
    points = np.atleast_2d(points)
    cp = build_adapted_coframe(g, Jf, theta, points)
    q = f(points)
    cq = build_adapted_coframe(g, Jf, theta, q)
    Df = f.jacobian(points)
    X = np.concatenate([cp.frame, cp.frame_J], axis=1)  # (B, 2k, D)
    fX = np.einsum("bij,bkj->bki", Df, X)
    gq = g.at(q)
    r1 = np.einsum("bki,bij,bj->bk", fX, gq, cq.lee)
    r2 = np.einsum("bki,bij,bj->bk", fX, gq, cq.lee_J)
    JX = np.einsum("bij,bkj->bki", Jf.at(points), X)
    r3 = np.einsum("bij,bkj->bki", Df, JX) - np.einsum("bij,bkj->bki", Jf.at(q), fX)
    total = np.maximum(np.maximum(_maxabs(r1), _maxabs(r2)), _maxabs(r3))
    return _result(name, total, tol, len(points))


# -- suites ---------------------------------------------------------------------------------

SUITE_NAMES = ("lck", "parallel_lee", "contact", "biholomorphism", "group_actions", "lcr", "theorem_a")

DEFAULT_TOLERANCES = {
    "lck": 1e-7,
    "lck.theta_is_minus_dt": 1e-8,
    "parallel_lee": 1e-6,
    "parallel_lee.lee_norm_constancy": 1e-8,
    "parallel_lee.lee_field_half_metric": 1e-8,
    "koszul": 1e-7,
    "symmetry": 1e-7,
    "contact.volume": 1e-6,
    "contact.reeb_eta_A": 1e-10,
    "contact.reeb_iA_deta": 1e-9,
    "biholomorphism": 1e-7,
    "nijenhuis": 1e-7,
    "JA_squared": 1e-10,
    "H_roundtrip": 1e-10,
    "homothety": 1e-8,
    "homothety.multiplicativity": 1e-9,
    "isometry": 1e-8,
    "deck.homothety": 1e-8,
    "deck.freeness": 1e-6,
    "conjugation": 1e-10,
    "lcr": 1e-8,
    "lcr.plant_recover": 1e-7,
    "perp_preservation": 1e-8,
    "theorem_a": 1e-9,
    "theorem_a.scale_invariance": 1e-10,
}


def _tols(overrides):
    t = dict(DEFAULT_TOLERANCES)
    t.update(overrides or {})
    return t


def _perturbed_metric(S: HopfStructure, eps: float) -> MetricField:
    """Hermitian but non-l.c.K. perturbation ``g + eps (a a + aJ aJ)``."""
    D = S.chart.dim
    a = np.zeros(D)
    a[1] = 1.0

    def fn(x):
        Jm = S.JA.fn(x)
        aJ = J.einsum("j,bji->bi", a, Jm)
        av = np.broadcast_to(a, (len(x), D))
        return S.g_tilde.fn(x) + (J.einsum("bi,bj->bij", av, av) + J.einsum("bi,bj->bij", aJ, aJ)) * eps

    return MetricField(S.chart, fn, "g_eps")


def _conformal_metric(S: HopfStructure, c: float) -> MetricField:
    def fn(x):
        return S.g_tilde.fn(x) * J.exp(x[:, 1] * c)[:, None, None]

    return MetricField(S.chart, fn, "e^f g")


def _j0_on_sphere(S: HopfStructure) -> ComplexStructureField:
    n = S.data.n
    M = np.zeros((2 * n + 1, 2 * n + 1))
    M[1:, 1:] = j0_matrix(n)
    return ComplexStructureField(S.chart, constant_field(M), "J0")


def suite_lck(S, rng, pts, tols):
    t = tols
    res = [check_lck(S.g_tilde, S.JA, pts, t["lck"])]
    E = _frame(S.chart, pts)
    th = res[0].extras["theta"]
    res.append(_result("lck.theta_is_minus_dt", _maxabs(_r1(th - S.theta.at(pts), E)),
                       t["lck.theta_is_minus_dt"], len(pts)))
    bad = check_lck(_perturbed_metric(S, 1e-3), S.JA, pts, t["lck"])
    res.append(negative_control("lck.negative_control", bad.max_residual, t["lck"], len(pts),
                                "perturbed Hermitian metric g + 1e-3 (a a + aJ aJ)"))
    return res


def suite_parallel_lee(S, rng, pts, tols):
    t = tols
    par = check_parallel_lee(S.g_tilde, S.JA, pts, t["parallel_lee"])
    res = [par]
    res.append(CheckResult("parallel_lee.lee_norm_constancy", par.extras["lee_norm_std"],
                           t["parallel_lee.lee_norm_constancy"], len(pts),
                           f"|theta|^2 = {par.extras['lee_norm_sq_mean']:.15g} (recorded)",
                           {"lee_norm_sq": par.extras["lee_norm_sq_mean"]}))
    half = MetricField(S.chart, lambda x: S.g_tilde.fn(x) * 0.5, "g~/2")
    sharp = raise_index(half, S.theta).at(pts)
    res.append(_result("parallel_lee.lee_field_half_metric", _maxabs(sharp + S.xi.at(pts)),
                       t["parallel_lee.lee_field_half_metric"], len(pts),
                       "theta# = -xi for the metric omega~(J., .)/2"))
    res.append(check_koszul(S.g_tilde, S.theta, pts, t["koszul"]))
    res += check_lie_symmetries(S.g_tilde, S.JA, S.theta, pts, t["symmetry"])
    bad = check_parallel_lee(_conformal_metric(S, 0.3), S.JA, pts, t["parallel_lee"])
    res.append(negative_control("parallel_lee.negative_control", bad.max_residual,
                                t["parallel_lee"], len(pts), "conformal rescaling e^{0.3 w_1} g~"))
    return res


def suite_contact(S, rng, pts, tols):
    t = tols
    ctol = {k.split(".", 1)[1]: v for k, v in t.items() if k.startswith("contact.")}
    J0 = _j0_on_sphere(S)
    res = check_contact_pseudohermitian(S.etaA, J0, pts, S.A, ctol, "contact.etaA")
    res += check_contact_pseudohermitian(S.eta0, J0, pts, None, ctol, "contact.eta0")[:1]
    res.append(CheckResult("contact.eta0.levi_positive",
                           -float(np.linalg.eigvalsh(levi_matrix(S.eta0, J0, pts)).min()), 0.0, len(pts)))
    # negative controls: an exact 1-form has no contact volume; -eta has negative Levi form
    closed = DifferentialForm(S.chart, _dw1, "dw1", 1)
    vol = np.abs(contact_volume(closed, pts)).max()
    res.append(CheckResult("contact.negative_control.closed_form", float(vol), t["contact.volume"] / 10.0,
                           len(pts), "exact 1-form d(w_1) must be flagged: max |det| < vol_min / 10"))
    flipped = levi_matrix(-S.etaA, J0, pts)
    res.append(CheckResult("contact.negative_control.flipped_eta",
                           float(np.linalg.eigvalsh(flipped).max()), 0.0, len(pts),
                           "-eta_A must have negative definite Levi form"))
    return res


def _dw1(x):
    D = J.value_of(x).shape[-1]
    e = np.zeros(D)
    e[1] = 1.0
    return np.broadcast_to(e, (len(x), D)).copy()


def suite_biholomorphism(S, rng, pts, tols):
    t = tols
    chart = S.chart
    vecs = np.stack([chart.sample_tangent(rng, pts) for _ in range(10)], axis=1)
    res = [check_biholomorphism(S.H, S.JA, S.J0, pts, vecs, t["biholomorphism"])]
    X, Y = chart.sample_tangent(rng, pts), chart.sample_tangent(rng, pts)
    res.append(check_integrability(S.JA, pts, X, Y, t["nijenhuis"]))
    E = _frame(chart, pts)
    Jm = S.JA.at(pts)
    res.append(_result("JA_squared", _maxabs(np.einsum("bij,bjk,bka->bia", Jm, Jm, E) + E),
                       t["JA_squared"], len(pts)))
    back = S.H_inverse(S.H(pts))
    res.append(_result("H_roundtrip", _maxabs(back - pts), t["H_roundtrip"], len(pts)))
    flip = np.ones(chart.dim)
    flip[2] = -1.0
    Jbad = ComplexStructureField(chart, lambda x: S.JA.fn(x) * flip[None, :, None], "J_bad")
    bad = check_integrability(Jbad, pts, X, Y, t["nijenhuis"])
    res.append(negative_control("nijenhuis.negative_control", bad.max_residual, t["nijenhuis"],
                                len(pts), "J_A with one sign flipped"))
    return res


def suite_group_actions(S, rng, pts, tols):
    t = tols
    data = S.data
    res = []
    for s in (-1.0, 0.3, 2.0):
        f = DeckGroupElement(DeckKind.FLOW, s=s).as_map(data)
        res.append(check_homothety(f, S.OmegaA, np.exp(s), pts, t["homothety"], f"homothety.flow[{s:g}]"))
    angles = tuple(rng.uniform(-np.pi, np.pi, data.n))
    psi = DeckGroupElement(DeckKind.TORUS, angles=angles).as_map(data)
    res.append(check_homothety(psi, S.OmegaA, 1.0, pts, t["homothety"], "homothety.torus"))
    E = _frame(S.chart, pts)
    res.append(_result("torus.eta_A_invariance",
                       _maxabs(_r1(pullback(psi, S.etaA).at(pts) - S.etaA.at(pts), E)),
                       t["homothety"], len(pts)))
    pairs = [
        (DeckGroupElement(DeckKind.FLOW, s=a).as_map(data), DeckGroupElement(DeckKind.FLOW, s=b).as_map(data))
        for a, b in rng.uniform(-1.0, 1.0, (10, 2))
    ]
    res.append(check_multiplicativity(pairs, S.OmegaA, pts, t["homothety.multiplicativity"]))
    res += check_holomorphic_isometry(psi, S.g_tilde, S.JA, pts, t["isometry"], "torus")
    res += check_holomorphic_isometry(DeckGroupElement(DeckKind.FLOW, s=0.3).as_map(data),
                                      S.g_tilde, S.JA, pts, t["isometry"], "flow")
    # deck generator on C^n - {0}: homothety of the pushed-forward Kaehler form
    q = S.H(pts)
    Omega_cn = pullback(S.H_inverse, S.OmegaA)
    gamma = DeckGroupElement(DeckKind.DECK, k=1).as_map(data)
    res.append(check_homothety(gamma, Omega_cn, np.exp(-data.s), q, t["deck.homothety"],
                               "deck.homothety"))
    dists = [np.linalg.norm(DeckGroupElement(DeckKind.DECK, k=k).as_map(data)(q) - q, axis=1)
             for k in (1, 2, 3)]
    dmin = float(np.min(dists))
    res.append(CheckResult("deck.freeness", -dmin, -t["deck.freeness"], len(pts),
                           f"min |gamma^k z - z| = {dmin:.3e} for k = 1, 2, 3"))
    s = float(rng.uniform(-1, 1))
    img = S.H(DeckGroupElement(DeckKind.FLOW, s=s).as_map(data).then(psi)(pts))
    mu = conjugated_diagonal(data, s, angles)
    expect = np.einsum("ij,bj->bi", complex_to_real_matrix(np.diag(mu)), q)
    res.append(_result("conjugation", _maxabs(img - expect) / _maxabs(expect), t["conjugation"], len(pts)))
    return res


def _coframe_field(S):
    return lambda p: build_adapted_coframe(S.g_tilde, S.JA, S.theta, p)


def _random_unitary(rng, k):
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def suite_lcr(S, rng, pts, tols, n_isometries: int = 20):
    t = tols
    data = S.data
    cf = _coframe_field(S)
    k = data.n - 1
    lam_err, v_err, unit_err, full = [], [], [], []
    for _ in range(n_isometries):
        psi = DeckGroupElement(DeckKind.TORUS, angles=tuple(rng.uniform(-np.pi, np.pi, data.n))).as_map(data)
        dec, chk = analyze_lcr(psi, cf, pts, tol=t["lcr"])
        lam_err.append(np.abs(dec.lam - 1.0).max())
        v_err.append(np.abs(dec.v).max())
        unit_err.append(dec.residuals["unitarity"].max())
        full.append(chk.max_residual)
    n = len(pts) * n_isometries
    res = [
        CheckResult("lcr.torus.lambda_is_1", float(max(lam_err)), t["lcr"], n),
        CheckResult("lcr.torus.v_is_0", float(max(v_err)), t["lcr"], n),
        CheckResult("lcr.torus.unitarity", float(max(unit_err)), t["lcr"], n),
        CheckResult("lcr.torus.structure_equations", float(max(full)), t["lcr"], n),
    ]
    ident = SmoothMap.identity(S.chart)
    dec, chk = analyze_lcr(ident, cf, pts, tol=t["lcr"], name="lcr.identity")
    res.append(chk)
    # plant a structure-group element on the target coframe and recover it
    lam0 = float(rng.uniform(0.5, 2.0))
    U0 = _random_unitary(rng, k)
    v0 = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    G0 = g_element(lam0, U0, v0)
    dec, chk = analyze_lcr(ident, cf, pts, lambda p: GaugedCoframe(cf(p), G0), tol=t["lcr"])
    err = max(np.abs(dec.lam - lam0).max(), np.abs(dec.U - U0).max(), np.abs(dec.v - v0).max(),
              chk.max_residual)
    res.append(CheckResult("lcr.plant_recover", float(err), t["lcr.plant_recover"], len(pts),
                           f"planted lambda = {lam0:.6g}"))
    psi = DeckGroupElement(DeckKind.TORUS, angles=tuple(rng.uniform(-np.pi, np.pi, data.n))).as_map(data)
    res.append(check_perp_preservation(psi, S.g_tilde, S.JA, S.theta, pts, t["perp_preservation"]))
    # negative controls: a holomorphic non-isometric map, and a non-unitary planted gauge
    shear = np.eye(data.n, dtype=complex)
    shear[0, -1] = 0.5
    L = complex_to_real_matrix(shear)
    lin = SmoothMap(S.H.target, S.H.target, lambda x: J.einsum("ij,bj->bi", L, x), "shear")
    f_bad = S.H.then(lin).then(S.H_inverse)
    _, chk = analyze_lcr(f_bad, cf, pts, tol=t["lcr"])
    res.append(negative_control("lcr.negative_control.shear", chk.max_residual, t["lcr"], len(pts),
                                "H^-1 o shear o H"))
    Gbad = g_element(lam0, 1.5 * U0, v0)
    _, chk = analyze_lcr(ident, cf, pts, lambda p: GaugedCoframe(cf(p), Gbad), tol=t["lcr"])
    res.append(negative_control("lcr.negative_control.non_unitary", chk.max_residual, t["lcr"],
                                len(pts), "planted U scaled by 1.5"))
    chk = check_perp_preservation(f_bad, S.g_tilde, S.JA, S.theta, pts, t["perp_preservation"])
    res.append(negative_control("perp_preservation.negative_control", chk.max_residual,
                                t["perp_preservation"], len(pts), "H^-1 o shear o H"))
    return res


def suite_theorem_a(S, rng, pts, tols):
    t = tols
    res = check_theorem_A(S, pts, t["theorem_a"], t["theorem_a.scale_invariance"])
    E = _frame(S.chart, pts)
    e_eta = DifferentialForm(S.chart, lambda x: S.etaA.fn(x) * J.exp(x[:, 0])[:, None], "e^t etaA", 1)
    d_path = 2.0 * _r2(exterior_derivative(e_eta).at(pts), E)
    ref = _r2(S.OmegaA.at(pts), E)
    res.append(_result("theorem_a.Omega_two_paths", _maxabs(d_path - ref) / _maxabs(ref), 1e-8, len(pts),
                       "2 d(e^t eta_A) by jets vs closed form"))
    return res


_SUITES = {
    "lck": suite_lck,
    "parallel_lee": suite_parallel_lee,
    "contact": suite_contact,
    "biholomorphism": suite_biholomorphism,
    "group_actions": suite_group_actions,
    "lcr": suite_lcr,
    "theorem_a": suite_theorem_a,
}


def run_suite(name: str, data: HopfData, seed: int, points: int = 100, t_range: float = 2.0,
              tol_overrides: Optional[dict] = None) -> List[CheckResult]:
    """Run one named suite on a fresh structure with its own seeded stream.

    The stream depends only on ``(seed, suite name)`` so results do not depend on
    which other suites run or in which order.
    """
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    S = build_forms_and_metric(data)
    rng = np.random.default_rng([int(seed) % 2**64, SUITE_NAMES.index(name)])
    pts = sample_points(S, rng, points, t_range)
    return _SUITES[name](S, rng, pts, _tols(tol_overrides))
