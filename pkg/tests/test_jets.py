import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lckhopf import jets as J
from lckhopf.jets import Jet


def central_grad(f, x, h=1e-6):
    cols = []
    for k in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[k] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.stack(cols)


def composite(x):
    a, b, c = x[:, 0], x[:, 1], x[:, 2]
    return J.exp(a * b) / (1.0 + c * c) + J.sin(a) * J.sqrt(b * b + 2.0) - J.log(2.0 + J.cos(c)) * a ** 3


class TestArithmetic:
    def test_gradient_matches_central_differences(self, rng):
        x = rng.uniform(-1, 1, (8, 3))
        jet = composite(J.seed(x))
        fd = central_grad(lambda y: composite(y), x)
        assert np.allclose(jet.value, composite(x))
        assert np.max(np.abs(jet.grad - fd)) < 1e-8

    def test_hessian_matches_differences_of_gradient(self, rng):
        x = rng.uniform(-1, 1, (8, 3))
        jet = composite(J.seed(x))
        fd = central_grad(lambda y: composite(J.seed(y)).grad.T, x, h=1e-5)  # (k, B, l)
        fd = np.transpose(fd, (0, 2, 1))
        assert np.max(np.abs(jet.hess - fd)) < 1e-6

    def test_hessian_symmetric(self, rng):
        jet = composite(J.seed(rng.uniform(-1, 1, (5, 3))))
        assert np.max(np.abs(jet.hess - np.swapaxes(jet.hess, 0, 1))) < 1e-12

    def test_constant_has_zero_derivatives(self):
        c = Jet.constant(np.ones((4, 2)), 3)
        assert c.grad.shape == (3, 4, 2) and not c.grad.any() and not c.hess.any()

    def test_variable_count_mismatch(self):
        with pytest.raises(ValueError):
            Jet.constant(1.0, 2) + Jet.constant(1.0, 3)

    def test_derivative_drops_an_order(self, rng):
        jet = composite(J.seed(rng.uniform(-1, 1, (3, 3))))
        d = jet.derivative()
        assert d.order == 1 and d.shape == (3, 3)
        with pytest.raises(ValueError):
            d.derivative().derivative()


class TestLinearAlgebra:
    def test_inverse_derivatives(self, rng):
        x = rng.uniform(-0.5, 0.5, (4, 2))

        def mat(y):
            a, b = y[:, 0], y[:, 1]
            rows = [J.stack([2.0 + a * b, J.sin(a)], -1), J.stack([b * b, 3.0 + J.exp(a)], -1)]
            return J.stack(rows, -2)

        inv = J.inv(mat(J.seed(x)))
        assert np.allclose(inv.value, np.linalg.inv(mat(x)))
        fd = central_grad(lambda y: np.linalg.inv(mat(y)), x)
        assert np.max(np.abs(inv.grad - fd)) < 1e-8
        fd2 = central_grad(lambda y: np.moveaxis(J.inv(mat(J.seed(y))).grad, 0, -1), x, h=1e-5)
        assert np.max(np.abs(inv.hess - np.moveaxis(fd2, -1, 1))) < 1e-6

    def test_einsum_product_rule(self, rng):
        x = rng.uniform(-1, 1, (5, 3))
        s = J.seed(x)
        out = J.einsum("bi,bi->b", s * s, s)
        assert np.allclose(out.grad, central_grad(lambda y: np.sum(y ** 3, axis=1), x), atol=1e-8)

    def test_compose_is_chain_rule(self, rng):
        x = rng.uniform(-1, 1, (4, 2))
        inner = J.stack([J.seed(x)[:, 0] * J.seed(x)[:, 1], J.exp(J.seed(x)[:, 0])], -1)
        direct = (lambda y: J.sin(y[:, 0]) * y[:, 1])
        lhs = direct(J.seed(inner.value)).compose(inner)
        rhs = direct(inner)
        assert np.allclose(lhs.grad, rhs.grad, atol=1e-12)
        assert np.allclose(lhs.hess, rhs.hess, atol=1e-12)


finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=3, max_size=3), st.floats(0.5, 3.0))
def test_chain_rule_property(xs, p):
    x = np.array([xs])
    f = lambda y: (2.5 + J.sin(y[:, 0] * y[:, 1])) ** p + y[:, 2] * J.exp(0.3 * y[:, 0])
    jet = f(J.seed(x))
    fd = central_grad(f, x, h=1e-6)
    scale = max(1.0, np.max(np.abs(fd)))
    assert np.max(np.abs(jet.grad - fd)) / scale < 1e-6
