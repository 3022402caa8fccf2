import math

import numpy as np
import pytest

from rsma_sop.errors import ConvergenceError, DomainError
from rsma_sop.quadrature import (
    QuadratureSpec,
    adaptive_reference,
    chebyshev_b_nodes,
    chebyshev_b_weights,
    laguerre_nodes,
)


def test_chebyshev_nodes():
    np.testing.assert_allclose(chebyshev_b_nodes(1), [0.5], atol=1e-16)
    np.testing.assert_allclose(chebyshev_b_nodes(2), [0.853553, 0.146447], atol=1e-6)
    b = chebyshev_b_nodes(50)
    assert np.all((b > 0) & (b < 1))
    # sqrt(b(1-b)) weight: the rule integrates polynomials exactly
    assert np.dot(chebyshev_b_weights(40), b[:0].sum() + chebyshev_b_nodes(40) ** 3) == pytest.approx(0.25, rel=1e-3)
    with pytest.raises(DomainError):
        chebyshev_b_nodes(0)


def test_laguerre_small_orders():
    t1 = laguerre_nodes(1)
    np.testing.assert_allclose(t1.nodes, [1.0])
    np.testing.assert_allclose(t1.weights, [1.0])
    t2 = laguerre_nodes(2)
    order = np.argsort(t2.nodes)
    np.testing.assert_allclose(t2.nodes[order], [2 - math.sqrt(2), 2 + math.sqrt(2)], atol=1e-12)
    np.testing.assert_allclose(t2.weights[order], [0.853553, 0.146447], atol=1e-6)


def test_laguerre_moment_exactness():
    t = laguerre_nodes(15)
    assert np.dot(t.weights, t.nodes**29) == pytest.approx(math.factorial(29), rel=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 2.0, 5.5])
def test_generalized_laguerre_moments(alpha):
    t = laguerre_nodes(30, alpha)
    for k in (0, 3, 10):
        assert np.dot(t.weights, t.nodes**k) == pytest.approx(math.gamma(k + alpha + 1), rel=1e-11)


def test_large_order_tables_agree():
    coarse, fine = laguerre_nodes(200), laguerre_nodes(400)
    f = lambda x: 1.0 / (1.0 + x) ** 2  # noqa: E731
    assert np.dot(coarse.weights, f(coarse.nodes)) == pytest.approx(np.dot(fine.weights, f(fine.nodes)), rel=1e-7)
    big = laguerre_nodes(600)
    assert np.all(np.diff(np.sort(big.nodes)) > 0)
    assert np.exp(big.log_weights).sum() == pytest.approx(1.0, rel=1e-12)
    assert not big.nodes.flags.writeable


def test_adaptive_reference():
    assert adaptive_reference(lambda x: math.exp(-x), 0.0, math.inf, tol=1e-10) == pytest.approx(1.0, rel=1e-10)
    assert adaptive_reference(lambda x: x**3, 0.0, 1.0) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(ConvergenceError) as info:
        adaptive_reference(lambda x: 1.0 / x, 0.0, 1.0, limit=5)
    assert math.isfinite(info.value.estimate)


def test_quadrature_spec():
    q = QuadratureSpec()
    assert q.order_I == q.order_N == q.order_K == q.order_V == q.order_D == 50
    assert QuadratureSpec.uniform(7).order_D == 7
    assert q.scaled(2).order_K == 100
    with pytest.raises(DomainError):
        QuadratureSpec(order_I=0)
