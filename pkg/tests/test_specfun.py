import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from rsma_sop.errors import DomainError
from rsma_sop.specfun import (
    LaplacePowParams,
    PhiParams,
    gain_cdf,
    gain_pdf,
    gamma_upper,
    laplace_pow_integral,
    log_gamma_upper,
    log_meijer_g_2112,
    meijer_g_2112,
    phi_integral,
)

E_E1 = math.e * float(mpmath.e1(1))


def test_gamma_upper_examples():
    for x in (0.0, 0.3, 5.0):
        assert gamma_upper(1, x) == pytest.approx(math.exp(-x), rel=1e-15)
    assert gamma_upper(3, 0) == pytest.approx(2.0, rel=1e-15)
    ref, _ = integrate.quad(lambda t: t**1.5 * math.exp(-t), 1.7, np.inf, epsabs=0, epsrel=1e-13)
    assert gamma_upper(2.5, 1.7) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(DomainError):
        gamma_upper(0.0, 1.0)


def test_log_gamma_upper_survives_underflow():
    with mpmath.workdps(30):
        for a, x in [(3, 2.0), (8, 900.0), (40, 5000.0), (2.5, 4.0)]:
            assert log_gamma_upper(a, x) == pytest.approx(float(mpmath.log(mpmath.gammainc(a, x))), rel=1e-13)


def test_gain_distribution():
    x = np.linspace(0, 10, 7)
    np.testing.assert_allclose(gain_cdf(1, x), 1 - np.exp(-x), rtol=1e-14, atol=1e-16)
    assert gain_cdf(5, 0.0) == 0.0 and gain_cdf(5, 1e3) == pytest.approx(1.0)
    ref, _ = integrate.quad(lambda t: gain_pdf(4, t), 0, 3.2, epsrel=1e-13)
    assert gain_cdf(4, 3.2) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(DomainError):
        gain_pdf(0, 1.0)


def test_laplace_pow_examples():
    assert laplace_pow_integral(LaplacePowParams(1, 0, 0, 3.3)) == pytest.approx(1.0)
    assert laplace_pow_integral(LaplacePowParams(1, 0, 1, 1)) == pytest.approx(E_E1, rel=1e-10)
    assert E_E1 == pytest.approx(0.596347, abs=1e-6)
    assert laplace_pow_integral(LaplacePowParams(2, 3, 0, 0)) == pytest.approx(0.375, rel=1e-14)
    with pytest.raises(DomainError):
        LaplacePowParams(0, 0, 1, 1)


def test_phi_examples():
    assert phi_integral(PhiParams(1, 0, 0, 2.0, 0, 5.0)) == pytest.approx(1.0)
    assert phi_integral(PhiParams(1, 1, 0, 2.0, 0, 5.0)) == pytest.approx(1.0)
    assert phi_integral(PhiParams(1, 0, 1, 1, 0, 4.0)) == pytest.approx(E_E1, rel=1e-10)
    for c1, c2, c3, c4 in [(0.7, 2, 3.0, 1.5), (2.0, 0, 0.1, 4.0)]:
        assert phi_integral(PhiParams(c1, c2, c3, c4, 0.0, 2.0)) == pytest.approx(
            laplace_pow_integral(LaplacePowParams(c1, c2, c3, c4)), rel=1e-12
        )
    with pytest.raises(DomainError):
        PhiParams(1, 0.5, 1, 1, 1, 1)


@pytest.mark.parametrize("a1,b1,b2", [(0.0, 1.0, 0.0), (-2.0, 3.0, 1.0), (1.0, 2.0, 0.5), (-4.0, 6.0, 2.0)])
def test_meijer_g_matches_confluent_form(a1, b1, b2):
    # G^{2,1}_{1,2}(z | a1; b1, b2) = Gamma(b1-a1+1) Gamma(b2-a1+1) z^b1 U(b1-a1+1, b1-b2+1, z)
    with mpmath.workdps(30):
        for z in (1e-4, 0.3, 2.0, 50.0, 1e4):
            s, r = b1 - a1 + 1, b2 - a1 + 1
            ref = mpmath.gamma(s) * mpmath.gamma(r) * mpmath.power(z, b1) * mpmath.hyperu(s, b1 - b2 + 1, z)
            assert float(log_meijer_g_2112(z, a1, b1, b2)) == pytest.approx(float(mpmath.log(ref)), abs=1e-9)
            assert float(meijer_g_2112(z, a1, b1, b2)) == pytest.approx(float(ref), rel=1e-9)
