import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surfcr import jets
from surfcr.errors import DomainError
from surfcr.jets import Jet2, eval_jet


def fd_grad(f, x, h=1e-5):
    return np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(3)])


def fd_hess(f, x, h=1e-4):
    return np.array([(fd_grad(f, x + h * e, h) - fd_grad(f, x - h * e, h)) / (2 * h)
                     for e in np.eye(3)])


# random composite expressions; every operation stays inside its domain
UNARY = [
    jets.sin, jets.cos,
    lambda u: jets.exp(0.3 * u),
    lambda u: jets.sqrt(1.0 + u * u),
    lambda u: 1.0 / (2.0 + jets.cos(u)),
    lambda u: jets.log(2.0 + jets.sin(u)),
    lambda u: u ** 3,
    lambda u: (1.5 + jets.sin(u)) ** 0.5,
]
BINARY = [
    lambda a, b: a + b,
    lambda a, b: a - b,
    lambda a, b: a * b,
    lambda a, b: a / (3.0 + jets.sin(b)),
    lambda a, b: 2.0 * a - b * 0.5,
]


def random_expression(rng, depth=3):
    if depth == 0:
        k = rng.integers(4)
        return (lambda x1, x2, x3, k=k: (x1, x2, x3, 0.7)[k])
    if rng.random() < 0.4:
        f = UNARY[rng.integers(len(UNARY))]
        a = random_expression(rng, depth - 1)
        return lambda x1, x2, x3: f(a(x1, x2, x3))
    g = BINARY[rng.integers(len(BINARY))]
    a, b = random_expression(rng, depth - 1), random_expression(rng, depth - 1)
    return lambda x1, x2, x3: g(a(x1, x2, x3), b(x1, x2, x3))


def as_float(expr):
    def f(x):
        v = expr(*x)
        return float(v.value) if isinstance(v, Jet2) else float(v)
    return f


class TestExamples:
    def test_square(self):
        j = eval_jet(lambda x1, x2, x3: x1 * x1, np.array([3.0, 0, 0]))
        assert j.value == 9.0
        np.testing.assert_array_equal(j.gradient, [6, 0, 0])
        np.testing.assert_array_equal(j.hessian, np.diag([2.0, 0, 0]))

    def test_sine_stationary(self):
        j = eval_jet(lambda x1, x2, x3: jets.sin(x2 * x3), np.array([0, 1, np.pi / 2]))
        assert j.value == pytest.approx(1.0)
        np.testing.assert_allclose(j.gradient, 0.0, atol=1e-15)

    def test_torus_level_set(self):
        from surfcr.level_surface import Torus
        t = Torus()
        x = np.array([1.5, 0, 0])
        j = eval_jet(t.level_set, x)
        assert j.value == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(j.gradient, fd_grad(t.phi, x), atol=1e-8)

    def test_constant_expression(self):
        j = eval_jet(lambda x1, x2, x3: 2.5, np.zeros((4, 3)))
        assert j.shape == (4,)
        np.testing.assert_array_equal(j.gradient, 0.0)

    def test_plain_arrays_pass_through(self):
        assert jets.sin(0.5) == np.sin(0.5)
        assert jets.sqrt(4.0) == 2.0


class TestDomain:
    x = np.array([0.0, 1.0, 2.0])

    @pytest.mark.parametrize("expr", [
        lambda x1, x2, x3: jets.sqrt(x1 - 1.0),
        lambda x1, x2, x3: jets.sqrt(x1),
        lambda x1, x2, x3: x2 / x1,
        lambda x1, x2, x3: 1.0 / x1,
        lambda x1, x2, x3: x2 / 0.0,
        lambda x1, x2, x3: jets.log(x1),
        lambda x1, x2, x3: (x1 - 1.0) ** 0.5,
        lambda x1, x2, x3: x1 ** -2,
    ])
    def test_raises(self, expr):
        with pytest.raises(DomainError):
            eval_jet(expr, self.x)


@pytest.mark.parametrize("seed", range(50))
def test_chain_rule_random_composites(seed):
    rng = np.random.default_rng(seed)
    expr = random_expression(rng)
    x = rng.uniform(-1, 1, 3)
    j = eval_jet(expr, x)
    f = as_float(expr)
    assert abs(j.value - f(x)) < 1e-14
    np.testing.assert_allclose(j.gradient, fd_grad(f, x), atol=1e-6)
    np.testing.assert_allclose(j.hessian, fd_hess(f, x), atol=1e-4)
    assert np.max(np.abs(j.hessian - j.hessian.T)) < 1e-13


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_product_and_quotient_rules(a, b, c):
    x = np.array([a, b, c])
    f = eval_jet(lambda x1, x2, x3: jets.sin(x1) + x2 * x3, x)
    g = eval_jet(lambda x1, x2, x3: 2.0 + jets.cos(x1 * x2), x)
    fg = eval_jet(lambda x1, x2, x3: (jets.sin(x1) + x2 * x3) * (2.0 + jets.cos(x1 * x2)), x)
    np.testing.assert_allclose(fg.gradient, f.value * g.gradient + g.value * f.gradient,
                               atol=1e-12)
    hess = (f.value * g.hessian + g.value * f.hessian
            + np.outer(f.gradient, g.gradient) + np.outer(g.gradient, f.gradient))
    np.testing.assert_allclose(fg.hessian, hess, atol=1e-12)
    q = eval_jet(lambda x1, x2, x3: (jets.sin(x1) + x2 * x3) / (2.0 + jets.cos(x1 * x2)), x)
    np.testing.assert_allclose(q.gradient, (f.gradient * g.value - f.value * g.gradient)
                               / g.value ** 2, atol=1e-12)


def test_batched_evaluation_matches_pointwise():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, (20, 3))
    expr = lambda x1, x2, x3: jets.exp(x1 * x2) * jets.sin(x3) - x1 ** 3
    batch = eval_jet(expr, x)
    for k in range(20):
        single = eval_jet(expr, x[k])
        assert batch.value[k] == pytest.approx(single.value, abs=1e-15)
        np.testing.assert_allclose(batch.hessian[k], single.hessian, atol=1e-15)


def test_numpy_operands_on_either_side():
    x1, x2, x3 = jets.coordinates(np.ones((5, 3)))
    arr = np.arange(5.0)
    left, right = arr * x1, x1 * arr
    np.testing.assert_array_equal(left.value, right.value)
    assert isinstance(arr - x2, Jet2) and isinstance(arr / (x3 + 1.0), Jet2)
    np.testing.assert_array_equal(jets.stack_gradients([x1, x2, x3])[0], np.eye(3))
