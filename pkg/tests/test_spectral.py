import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import expi, gamma

from qslcv.errors import NumericError
from qslcv.spectral import (
    SpectralParams,
    frequency_shift,
    markov_decay_rate,
    memory_kernel,
    semi_infinite_quadrature,
    spectral_density,
)

P = SpectralParams(0.1, 1.0, 10.0)


class TestParams:
    @pytest.mark.parametrize("kw", [
        dict(eta=-0.1, s=1, omega_c=10),
        dict(eta=0.1, s=0, omega_c=10),
        dict(eta=0.1, s=-1, omega_c=10),
        dict(eta=0.1, s=1, omega_c=0),
        dict(eta=math.nan, s=1, omega_c=10),
        dict(eta=0.1, s=1, omega_c=math.inf),
    ])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            SpectralParams(**kw)

    @pytest.mark.parametrize("s, regime", [(0.5, "sub-Ohmic"), (1.0, "Ohmic"), (2.0, "super-Ohmic")])
    def test_regime(self, s, regime):
        assert SpectralParams(0.1, s, 10).regime == regime

    def test_closed_system_allowed(self):
        assert SpectralParams(0.0, 1, 10).eta == 0.0


class TestSpectralDensity:
    def test_hand_values(self):
        assert spectral_density(P, 1.0) == pytest.approx(0.1 * math.exp(-0.1), rel=1e-14)
        assert spectral_density(P, 1.0) == pytest.approx(0.090484, abs=1e-6)
        assert spectral_density(P, 10.0) == pytest.approx(0.367879, abs=1e-6)

    @pytest.mark.parametrize("s", [0.3, 1.0, 2.5])
    def test_vanishes_at_ends(self, s):
        p = SpectralParams(0.2, s, 5.0)
        assert spectral_density(p, 0.0) == 0.0
        assert spectral_density(p, 5e3) < 1e-100

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValueError):
            spectral_density(P, -1e-3)

    def test_vectorized(self):
        w = np.linspace(0, 50, 11)
        out = spectral_density(P, w)
        assert out.shape == w.shape
        assert out[3] == spectral_density(P, w[3])

    @given(a=st.floats(0.01, 10), eta=st.floats(0.001, 1), s=st.floats(0.1, 4), w=st.floats(0, 100))
    def test_linear_in_eta(self, a, eta, s, w):
        p = SpectralParams(eta, s, 7.0)
        assert spectral_density(p.with_eta(a * eta), w) == pytest.approx(a * spectral_density(p, w), rel=1e-12)


def _kernel_by_quadrature(p, t):
    """Fourier integral of J done with QUADPACK's oscillatory rule (QAWF)."""
    f = lambda w: spectral_density(p, w)
    if t == 0:
        return complex(integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13)[0])
    with warnings.catch_warnings():
        # QAWF flags the w**s cusp at the origin for s < 1; the value is still fine
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(f, 0, np.inf, weight="cos", wvar=t, epsabs=1e-14, limlst=200)[0]
        im = integrate.quad(f, 0, np.inf, weight="sin", wvar=t, epsabs=1e-14, limlst=200)[0]
    return complex(re, -im)


class TestMemoryKernel:
    def test_value_at_zero(self):
        assert memory_kernel(P, 0.0) == pytest.approx(10.0 + 0j, rel=1e-14)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_zero_is_real(self, s):
        p = SpectralParams(0.2, s, 10.0)
        mu0 = memory_kernel(p, 0.0)
        assert mu0.imag == 0.0
        assert mu0.real == pytest.approx(0.2 * gamma(s + 1) * 100.0, rel=1e-13)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t", [0.0, 0.05, 0.3, 1.0, 4.0, 10.0])
    def test_matches_quadrature(self, s, t):
        p = SpectralParams(0.1, s, 10.0)
        ref = _kernel_by_quadrature(p, t)
        assert abs(memory_kernel(p, t) - ref) <= 1e-8 * abs(ref)

    def test_modulus_decreasing(self):
        t = np.linspace(0, 50, 2001)
        for s in (0.5, 1, 3):
            m = np.abs(memory_kernel(SpectralParams(0.1, s, 10), t))
            assert np.all(np.diff(m) < 0)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            memory_kernel(P, -0.1)


class TestMarkovRate:
    def test_value(self):
        assert markov_decay_rate(P) == pytest.approx(math.pi * 0.1 * math.exp(-0.1), rel=1e-14)
        assert markov_decay_rate(P) == pytest.approx(0.284263, abs=1e-6)

    def test_closed_system(self):
        assert markov_decay_rate(SpectralParams(0, 1, 10)) == 0.0

    @given(st.floats(0.001, 1), st.floats(0.001, 1))
    def test_increasing_in_eta(self, a, b):
        lo, hi = sorted((a, b))
        if hi > lo:
            assert markov_decay_rate(P.with_eta(hi)) > markov_decay_rate(P.with_eta(lo))


class TestSemiInfiniteQuadrature:
    def test_exponential(self):
        assert semi_infinite_quadrature(lambda w: math.exp(-w), 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_gaussian_moment(self):
        assert semi_infinite_quadrature(lambda w: w * math.exp(-w * w), 1.0) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 3.0])
    def test_total_spectral_weight(self, s):
        p = SpectralParams(0.1, s, 10.0)
        total = semi_infinite_quadrature(lambda w: spectral_density(p, w), p.omega_c)
        # int J = eta Gamma(s+1) omega_c**2, which is also mu(0)
        assert total == pytest.approx(0.1 * gamma(s + 1) * 100.0, rel=1e-10)
        assert total == pytest.approx(memory_kernel(p, 0.0).real, rel=1e-10)

    def test_lower_limit(self):
        assert semi_infinite_quadrature(lambda w: math.exp(-w), 1.0, lower=2.0) == pytest.approx(math.exp(-2), abs=1e-12)

    def test_non_convergence_raises(self):
        with pytest.raises(NumericError):
            semi_infinite_quadrature(lambda w: 1.0 / (1.0 + w), 1.0, limit=5)


def _shift_by_excision(p, omega, eps0=0.05, levels=5):
    """Symmetric excision of the pole, extrapolated to zero width.

    The excised integral behaves as P + c1 eps + c3 eps**3 + ..., so repeated
    Richardson steps remove the odd powers.
    """
    f = lambda w: spectral_density(p, w) / (omega - w)

    def excised(eps):
        lo = integrate.quad(f, 0, omega - eps, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        hi = integrate.quad(f, omega + eps, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        return lo + hi

    table = [excised(eps0 / 2**k) for k in range(levels)]
    for order in (1, 3, 5):
        factor = 2.0**order
        table = [(factor * b - a) / (factor - 1) for a, b in zip(table, table[1:])]
    return table[-1]


class TestFrequencyShift:
    def test_ohmic_closed_form(self):
        # w/(1 - w) = -1 + 1/(1 - w) and P int e^{-a w}/(1 - w) dw = e^{-a} Ei(a)
        expected = -0.1 * (10.0 - math.exp(-0.1) * expi(0.1))
        assert frequency_shift(P) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("omega", [0.3, 1.0, 7.0])
    def test_matches_excision(self, s, omega):
        p = SpectralParams(0.1, s, 10.0)
        assert frequency_shift(p, omega) == pytest.approx(_shift_by_excision(p, omega), abs=1e-6)

    def test_sign_for_high_cutoff(self):
        assert frequency_shift(P) < 0

    def test_closed_system(self):
        assert frequency_shift(SpectralParams(0, 1, 10)) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            frequency_shift(P, 0.0)

    @settings(max_examples=20, deadline=None)
    @given(a=st.floats(0.1, 5.0))
    def test_linear_in_eta(self, a):
        assert frequency_shift(P.with_eta(0.1 * a)) == pytest.approx(a * frequency_shift(P), rel=1e-9)
