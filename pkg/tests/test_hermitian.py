import numpy as np
import pytest

from lckhopf import jets as J
from lckhopf.charts import j0_matrix, punctured
from lckhopf.hermitian import (
    build_adapted_coframe,
    contact_volume,
    extract_lee_form,
    fundamental_form,
    lee_field,
    lee_form_field,
    levi_form,
    levi_matrix,
    nijenhuis,
    nijenhuis_at,
    null_basis,
)
from lckhopf.tensors import (
    ComplexStructureField,
    DifferentialForm,
    EndomorphismField,
    MetricField,
    ScalarField,
    VectorField,
    constant_field,
    exterior_derivative,
)
from lckhopf.verify import _j0_on_sphere

CN = punctured(2)


def restrict(cov, chart, pts):
    return np.einsum("bi,bia->ba", cov, chart.tangent_basis(pts))


J0 = ComplexStructureField(CN, constant_field(j0_matrix(2)), "J0")
FLAT = MetricField(CN, constant_field(np.eye(4)), "flat")


def hopf_metric_cn():
    """|z|^{-2} times the flat metric on C^2 - {0}."""
    return MetricField(CN, lambda x: J.einsum("b,ij->bij", 1.0 / J.einsum("bi,bi->b", x, x), np.eye(4)), "hopf")


def twisted_J():
    """A non-integrable almost complex structure ``P J0 P^-1`` on R^4."""
    def fn(x):
        z = x[:, 0] * 0.0
        P = J.stack([J.stack([z + 1.0, z, x[:, 1] * 0.4, z], -1),
                     J.stack([z, z + 1.0, z, z], -1),
                     J.stack([z, z, z + 1.0, z], -1),
                     J.stack([z, z, z, z + 1.0], -1)], -2)
        return J.einsum("bij,bjk->bik", J.einsum("bij,jk->bik", P, j0_matrix(2)), J.inv(P))

    return ComplexStructureField(CN, fn, "J_twisted")


@pytest.fixture
def cn_points(rng):
    return CN.sample(rng, 30, t_range=1.0)


class TestLeeForm:
    def test_flat_kaehler_has_zero_lee_form(self, cn_points):
        theta, resid = extract_lee_form(fundamental_form(FLAT, J0), cn_points)
        assert np.max(np.abs(theta)) < 1e-13 and resid.max() < 1e-13

    def test_hopf_metric_on_cn(self, cn_points):
        # omega = omega_0 / |z|^2 has Lee form -d log |z|^2
        theta, resid = extract_lee_form(fundamental_form(hopf_metric_cn(), J0), cn_points)
        r2 = np.sum(cn_points**2, axis=1, keepdims=True)
        assert resid.max() < 1e-12
        assert np.allclose(theta, -2 * cn_points / r2, atol=1e-12)

    def test_hopf_structure_on_cylinder(self, hopf3, rng):
        pts = hopf3.chart.sample(rng, 20)
        theta, resid = extract_lee_form(fundamental_form(hopf3.g_tilde, hopf3.JA), pts)
        assert resid.max() < 1e-12
        assert np.allclose(restrict(theta, hopf3.chart, pts), restrict(hopf3.theta.at(pts), hopf3.chart, pts),
                           atol=1e-12)

    def test_conformal_change_shifts_lee_form(self, hopf2, rng):
        pts = hopf2.chart.sample(rng, 20)
        f = ScalarField(hopf2.chart, lambda x: J.sin(x[:, 1] * 1.3) + x[:, 0] * x[:, 3] * 0.5, "f")
        g2 = MetricField(hopf2.chart, lambda x: J.einsum("b,bij->bij", J.exp(f.fn(x)), hopf2.g_tilde.fn(x)), "e^f g")
        th1, _ = extract_lee_form(fundamental_form(hopf2.g_tilde, hopf2.JA), pts)
        th2, resid = extract_lee_form(fundamental_form(g2, hopf2.JA), pts)
        df = exterior_derivative(f).at(pts)
        assert resid.max() < 1e-12
        assert np.allclose(restrict(th2 - th1, hopf2.chart, pts), restrict(df, hopf2.chart, pts), atol=1e-11)

    def test_non_lck_metric_detected(self, rng):
        # f(z_2) omega_1 + omega_2 + omega_3 on C^3: d omega = df ^ omega_1 is not theta ^ omega
        cn3 = punctured(3)
        pts = cn3.sample(rng, 20, t_range=1.0)

        def fn(x):
            bump = J.einsum("b,ij->bij", x[:, 2] * x[:, 2] * 0.5 + 1.0, np.diag([1.0, 1.0, 0, 0, 0, 0]))
            return bump + np.diag([0.0, 0.0, 1.0, 1.0, 1.0, 1.0])

        J3 = ComplexStructureField(cn3, constant_field(j0_matrix(3)), "J0")
        _, resid = extract_lee_form(fundamental_form(MetricField(cn3, fn, "g"), J3), pts)
        assert resid.max() > 1e-3

    def test_every_hermitian_surface_solves_the_lee_equation(self, cn_points):
        # in real dimension 4 the residual vanishes; the l.c.K. condition is d theta = 0
        def fn(x):
            # e^{x_1 x_2} omega_1 + omega_2 has theta = x_1 dx_2, which is not closed
            bump = J.einsum("b,ij->bij", J.exp(x[:, 0] * x[:, 2]), np.diag([1.0, 1.0, 0.0, 0.0]))
            return bump + np.diag([0.0, 0.0, 1.0, 1.0])

        omega = fundamental_form(MetricField(CN, fn, "g"), J0)
        _, resid = extract_lee_form(omega, cn_points)
        assert resid.max() < 1e-12
        assert np.abs(exterior_derivative(lee_form_field(omega)).at(cn_points)).max() > 1e-3

    def test_lee_form_field_is_closed_for_lck(self, cn_points):
        theta = lee_form_field(fundamental_form(hopf_metric_cn(), J0))
        assert np.max(np.abs(exterior_derivative(theta).at(cn_points))) < 1e-11

    def test_degenerate_form_rejected(self, cn_points):
        zero = DifferentialForm(CN, constant_field(np.zeros((4, 4))), "0", 2)
        with pytest.raises(np.linalg.LinAlgError):
            extract_lee_form(zero, cn_points)

    def test_lee_field_of_hopf_structure(self, hopf2, rng):
        # theta# = -N/2 for g~, i.e. |theta|^2 = 1/2
        pts = hopf2.chart.sample(rng, 10)
        sharp = lee_field(hopf2.g_tilde, hopf2.theta).at(pts)
        assert np.allclose(sharp, -0.5 * hopf2.N.at(pts), atol=1e-12)


class TestNijenhuis:
    def test_constant_structure_is_integrable(self, cn_points, rng):
        X, Y = rng.standard_normal((2, len(cn_points), 4))
        assert np.max(np.abs(nijenhuis_at(J0, cn_points, X, Y))) < 1e-14

    def test_twisted_structure_is_not_integrable(self, cn_points, rng):
        Jt = twisted_J()
        assert np.allclose(np.einsum("bij,bjk->bik", Jt.at(cn_points), Jt.at(cn_points)), -np.eye(4))
        X, Y = rng.standard_normal((2, len(cn_points), 4))
        assert np.max(np.abs(nijenhuis_at(Jt, cn_points, X, Y))) > 1e-3

    def test_tensorial_in_arguments(self, cn_points):
        Jt = twisted_J()
        X = VectorField(CN, lambda x: J.sin(x) + x[:, ::-1] * 0.3, "X")
        Y = VectorField(CN, lambda x: x * x * 0.2 + 1.0, "Y")
        f = lambda x: J.exp(x[:, 1] * 0.5) + x[:, 0]
        fX = VectorField(CN, lambda x: J.einsum("b,bi->bi", f(x), X.fn(x)), "fX")
        lhs = nijenhuis(Jt, fX, Y, cn_points)
        rhs = f(cn_points)[:, None] * nijenhuis(Jt, X, Y, cn_points)
        assert np.allclose(lhs, rhs, atol=1e-12)
        # only the values of X at the points matter
        at_points = nijenhuis_at(Jt, cn_points, X.at(cn_points), Y.at(cn_points))
        assert np.allclose(at_points, nijenhuis(Jt, X, Y, cn_points), atol=1e-12)

    def test_antisymmetric(self, cn_points, rng):
        Jt = twisted_J()
        X, Y = rng.standard_normal((2, len(cn_points), 4))
        assert np.allclose(nijenhuis_at(Jt, cn_points, X, Y), -nijenhuis_at(Jt, cn_points, Y, X), atol=1e-12)


class TestContact:
    def test_standard_levi_form_is_identity(self, hopf2, rng):
        pts = hopf2.chart.sample(rng, 10)
        L = levi_matrix(hopf2.eta0, _j0_on_sphere(hopf2), pts)
        assert np.allclose(L, np.eye(2), atol=1e-12)

    def test_weighted_levi_form_positive(self, hopf3, rng):
        pts = hopf3.chart.sample(rng, 20)
        L = levi_matrix(hopf3.etaA, _j0_on_sphere(hopf3), pts)
        assert np.allclose(L, np.swapaxes(L, 1, 2), atol=1e-12)
        assert np.linalg.eigvalsh(L).min() > 0

    def test_levi_form_single_example(self, hopf2):
        p = np.array([[0.0, 1.0, 0.0, 0.0, 0.0]])
        e3, e4 = np.eye(5)[3][None], np.eye(5)[4][None]
        J0s = _j0_on_sphere(hopf2)
        assert np.allclose(levi_form(hopf2.eta0, J0s, e3, e3, p), 1.0)
        assert np.allclose(levi_form(hopf2.eta0, J0s, e3, e4, p), 0.0)

    def test_levi_form_rejects_vectors_outside_null(self, hopf2):
        p = np.array([[0.0, 1.0, 0.0, 0.0, 0.0]])
        with pytest.raises(ValueError, match="Null"):
            levi_form(hopf2.eta0, _j0_on_sphere(hopf2), np.eye(5)[2][None], np.eye(5)[3][None], p)

    def test_null_basis(self, hopf3, rng):
        pts = hopf3.chart.sample(rng, 10)
        basis, comp = null_basis(hopf3.etaA, pts)
        assert np.allclose(np.einsum("bi,bia->ba", hopf3.etaA.at(pts), basis), 0.0)
        assert np.allclose(np.einsum("bia,bic->bac", basis, basis), np.eye(4))
        assert np.allclose(basis[:, 0, :], 0.0) and np.allclose(comp[:, 0], 0.0)

    def test_volume(self, hopf2, rng):
        pts = hopf2.chart.sample(rng, 10)
        assert np.abs(contact_volume(hopf2.eta0, pts)).min() > 0.1
        exact = DifferentialForm(hopf2.chart, constant_field(np.eye(5)[1]), "dw1", 1)
        pts = pts[np.abs(pts[:, 1]) < 0.9]
        assert np.abs(contact_volume(exact, pts)).max() < 1e-12


class TestAdaptedCoframe:
    @pytest.fixture
    def frame(self, hopf3, rng):
        pts = hopf3.chart.sample(rng, 15)
        return hopf3, pts, build_adapted_coframe(hopf3.g_tilde, hopf3.JA, hopf3.theta, pts)

    def test_unitary_pairing(self, frame):
        _, _, cf = frame
        ta = cf.theta_alpha
        P = 0.5 * cf.pairing(ta[:, :, None, :], ta.conj()[:, None, :, :])
        assert np.allclose(P, np.eye(cf.rank), atol=1e-12)

    def test_dual_frame(self, frame):
        _, _, cf = frame
        vals = np.einsum("bki,bli->bkl", cf.theta_alpha, cf.dual_frame)
        assert np.allclose(vals, np.eye(cf.rank), atol=1e-12)

    def test_annihilates_lee_directions(self, frame):
        _, _, cf = frame
        assert np.allclose(np.einsum("bki,bi->bk", cf.theta_alpha, cf.lee), 0.0, atol=1e-12)
        assert np.allclose(np.einsum("bki,bi->bk", cf.theta_alpha, cf.lee_J), 0.0, atol=1e-12)

    def test_type_one_zero(self, frame):
        S, pts, cf = frame
        E = cf.basis
        lhs = np.einsum("bki,bij,bja->bka", cf.theta_alpha, S.JA.at(pts), E)
        rhs = 1j * np.einsum("bki,bia->bka", cf.theta_alpha, E)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_coframe_is_basis(self, frame):
        _, _, cf = frame
        M = np.einsum("bri,bia->bra", cf.matrix(), cf.basis)
        assert np.abs(np.linalg.det(M)).min() > 1e-6

    def test_zero_lee_form_rejected(self, cn_points):
        zero = DifferentialForm(CN, constant_field(np.zeros(4)), "0", 1)
        with pytest.raises(ValueError, match="theta vanishes"):
            build_adapted_coframe(FLAT, J0, zero, cn_points)


class TestMoreHermitian:
    def test_omega_restricted_to_perp(self, hopf3, rng):
        # omega = -i sum theta^a ^ conj(theta^a) on {theta#, J theta#}^perp
        pts = hopf3.chart.sample(rng, 15)
        cf = build_adapted_coframe(hopf3.g_tilde, hopf3.JA, hopf3.theta, pts)
        V = np.concatenate([cf.frame, cf.frame_J], axis=1)  # (B, 2k, D)
        omega = fundamental_form(hopf3.g_tilde, hopf3.JA).at(pts)
        lhs = np.einsum("bki,bij,blj->bkl", V, omega, V)
        ta = np.einsum("bai,bki->bak", cf.theta_alpha, V)  # theta^a on the frame vectors
        rhs = -0.5j * np.einsum("bak,bal->bkl", ta, ta.conj())
        rhs = rhs - np.swapaxes(rhs, 1, 2)
        assert np.max(np.abs(lhs - rhs)) < 1e-8

    def test_closed_perturbation_breaks_lck(self, hopf3, rng):
        # adding eps times a constant (hence closed) nondegenerate 2-form destroys d omega = theta ^ omega
        pts = hopf3.chart.sample(rng, 15)
        C = np.zeros((7, 7))
        C[1, 4], C[2, 5], C[3, 6] = 1.0, 1.0, 1.0
        C = C - C.T
        eps = 1e-3
        pert = DifferentialForm(hopf3.chart, lambda x: hopf3.omega_tilde.fn(x) + np.broadcast_to(C, (len(x), 7, 7)) * eps,
                                "omega + eps C", 2)
        _, base = extract_lee_form(hopf3.omega_tilde, pts)
        _, resid = extract_lee_form(pert, pts)
        assert base.max() < 1e-12 and resid.max() > 10 * 1e-7

    def test_fundamental_form_properties(self, hopf2, rng, cn_points):
        assert np.allclose(fundamental_form(FLAT, J0).at(cn_points), j0_matrix(2))
        pts = hopf2.chart.sample(rng, 10)
        E = hopf2.chart.tangent_basis(pts)
        W = np.einsum("bia,bij,bjc->bac", E, fundamental_form(hopf2.g_tilde, hopf2.JA).at(pts), E)
        Jm = np.einsum("bia,bij,bjc->bac", E, hopf2.JA.at(pts), E)
        assert np.allclose(np.einsum("bka,bkl,blc->bac", Jm, W, Jm), W, atol=1e-12)
        assert np.allclose(W, -np.swapaxes(W, 1, 2), atol=1e-12)

    def test_conformal_naturality_with_finite_difference_df(self, hopf3, rng):
        pts = hopf3.chart.sample(rng, 10)
        f = lambda x: J.sin(x[:, 2] * 2.0) * 0.5 + x[:, 0] * x[:, 1]
        g2 = MetricField(hopf3.chart, lambda x: J.einsum("b,bij->bij", J.exp(f(x)), hopf3.g_tilde.fn(x)), "e^f g")
        th1, _ = extract_lee_form(fundamental_form(hopf3.g_tilde, hopf3.JA), pts)
        th2, _ = extract_lee_form(fundamental_form(g2, hopf3.JA), pts)
        E = hopf3.chart.tangent_basis(pts)
        h = 1e-5
        fd = np.stack([(f(hopf3.chart.local_parametrization(pts)(h * e[None].repeat(len(pts), 0)))
                        - f(hopf3.chart.local_parametrization(pts)(-h * e[None].repeat(len(pts), 0)))) / (2 * h)
                       for e in np.eye(6)], axis=-1)
        assert np.max(np.abs(np.einsum("bi,bia->ba", th2 - th1, E) - fd)) < 1e-6

    def test_lee_field_of_zero_form(self, cn_points):
        zero = DifferentialForm(CN, constant_field(np.zeros(4)), "0", 1)
        assert np.allclose(lee_field(FLAT, zero).at(cn_points), 0.0)
