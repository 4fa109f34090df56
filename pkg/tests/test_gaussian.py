import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm, sqrtm

from qslcv.dynamics import markov_trajectory
from qslcv.gaussian import (
    CoherentTrajectory,
    GaussianState,
    bures_angle,
    coherent_bures_angle,
    fidelity,
    quantum_fisher_information,
)
from qslcv.qsl import average_speed
from qslcv.spectral import SpectralParams

# --- truncated Fock-space oracle -------------------------------------------

DIM = 70
_A = np.diag(np.sqrt(np.arange(1, DIM)), 1).astype(complex)
_AD = _A.conj().T


def _density_matrix(alpha, r, phi, nth):
    """Displaced squeezed thermal state in a truncated Fock basis."""
    p = (nth / (1 + nth)) ** np.arange(DIM) / (1 + nth)
    rho = np.diag(p).astype(complex)
    xi = r * cmath.exp(1j * phi)
    sq = expm(0.5 * (np.conj(xi) * _A @ _A - xi * _AD @ _AD))
    disp = expm(alpha * _AD - np.conj(alpha) * _A)
    return disp @ sq @ rho @ sq.conj().T @ disp.conj().T


def _moments(rho):
    d = np.trace(rho @ _A)
    s11 = np.trace(rho @ (_A @ _AD + _AD @ _A)) - 2 * abs(d) ** 2
    s12 = np.trace(rho @ (2 * _A @ _A)) - 2 * d * d
    return GaussianState([d, np.conj(d)], [[s11, s12], [np.conj(s12), s11]])


def _uhlmann(r1, r2):
    s = sqrtm(r1)
    return float(np.real(np.trace(sqrtm(s @ r2 @ s))) ** 2)


FOCK_PAIRS = [
    ((0.5, 0.2, 0.3, 0.3), (0.1 + 0.4j, 0.1, 1.0, 0.5)),
    ((0.3, 0.0, 0.0, 0.4), (0.3, 0.0, 0.0, 0.4)),
    ((0.0, 0.3, 0.0, 0.0), (0.2j, 0.1, 2.0, 0.0)),
    ((0.4, 0.0, 0.0, 0.0), (0.1, 0.0, 0.0, 0.0)),
    ((0.2 - 0.3j, 0.25, 1.2, 0.2), (-0.1, 0.0, 0.0, 0.6)),
]


@pytest.mark.parametrize("first, second", FOCK_PAIRS)
def test_fidelity_matches_fock_space(first, second):
    r1, r2 = _density_matrix(*first), _density_matrix(*second)
    assert np.trace(r1).real == pytest.approx(1.0, abs=1e-10)
    assert fidelity(_moments(r1), _moments(r2)) == pytest.approx(_uhlmann(r1, r2), abs=1e-7)


# --- states -----------------------------------------------------------------

class TestGaussianState:
    def test_coherent(self):
        g = GaussianState.coherent(1 + 2j)
        assert g.d[1] == 1 - 2j
        assert g.is_pure

    def test_thermal_is_mixed(self):
        assert not GaussianState([0, 0], 3 * np.eye(2)).is_pure

    @pytest.mark.parametrize("d, sigma", [
        ([1, 1j], np.eye(2)),
        ([0, 0], [[1, 0.5], [0.2, 1]]),
        ([0, 0], 0.5 * np.eye(2)),
    ])
    def test_rejects_unphysical(self, d, sigma):
        with pytest.raises(ValueError):
            GaussianState(d, sigma)

    def test_immutable(self):
        g = GaussianState.coherent(1.0)
        with pytest.raises(ValueError):
            g.d[0] = 2.0


# --- fidelity and Bures angle ------------------------------------------------

cplx = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)


class TestFidelity:
    @given(a=cplx, b=cplx)
    def test_coherent_closed_form(self, a, b):
        f = fidelity(GaussianState.coherent(a), GaussianState.coherent(b))
        assert f == pytest.approx(math.exp(-abs(a - b) ** 2), abs=1e-12)

    @given(a=cplx, b=cplx, n=st.floats(0, 3))
    def test_symmetric(self, a, b, n):
        x = GaussianState([a, np.conj(a)], (1 + 2 * n) * np.eye(2))
        y = GaussianState.coherent(b)
        assert fidelity(x, y) == pytest.approx(fidelity(y, x), abs=1e-12)

    @given(a=cplx, b=cplx, phase=st.floats(0, 2 * math.pi))
    def test_global_phase_invariance(self, a, b, phase):
        rot = cmath.exp(1j * phase)
        f0 = fidelity(GaussianState.coherent(a), GaussianState.coherent(b))
        f1 = fidelity(GaussianState.coherent(a * rot), GaussianState.coherent(b * rot))
        assert f1 == pytest.approx(f0, abs=1e-12)

    def test_self_fidelity(self):
        g = GaussianState([0.3, 0.3], [[2.0, 0.4], [0.4, 2.0]])
        assert fidelity(g, g) == pytest.approx(1.0, abs=1e-12)

    def test_bures_angle_example(self):
        # |alpha - beta|^2 = 2 ln 2 gives F = 1/4 and L_B = pi/3
        a = GaussianState.coherent(0.0)
        b = GaussianState.coherent(math.sqrt(2 * math.log(2)))
        assert bures_angle(a, b) == pytest.approx(math.pi / 3, abs=1e-12)

    @given(x=st.floats(0, 50))
    def test_coherent_angle_helper(self, x):
        assert coherent_bures_angle(x) == pytest.approx(math.acos(math.exp(-x / 2)), abs=1e-7)

    def test_coherent_angle_small_argument(self):
        # acos loses all digits here; the helper does not
        assert coherent_bures_angle(1e-20) == pytest.approx(1e-10, rel=1e-12)
        assert coherent_bures_angle(1e4) == math.pi / 2
        with pytest.raises(ValueError):
            coherent_bures_angle(-1.0)


# --- quantum Fisher information ---------------------------------------------

class TestFisherInformation:
    @given(a=cplx, v=cplx)
    def test_coherent_displacement(self, a, v):
        qfi = quantum_fisher_information(GaussianState.coherent(a), [v, np.conj(v)], np.zeros((2, 2)))
        assert qfi == pytest.approx(4 * abs(v) ** 2, abs=1e-12)

    def test_noiseless_oscillator(self):
        # d = alpha e^{-it}: d_dot has modulus |alpha| so F_Q = 4 |alpha|^2
        alpha, t = 10.0, 0.37
        d = alpha * cmath.exp(-1j * t)
        qfi = quantum_fisher_information(GaussianState.coherent(d), [-1j * d, np.conj(-1j * d)], np.zeros((2, 2)))
        assert qfi == pytest.approx(4 * alpha**2, rel=1e-14)

    def test_no_motion(self):
        g = GaussianState([0.2, 0.2], 2 * np.eye(2))
        assert quantum_fisher_information(g, [0, 0], np.zeros((2, 2))) == 0.0

    def test_mixed_state_against_fidelity(self):
        # for a smooth path F_Q = lim 8 (1 - sqrt F(t, t + dt)) / dt^2
        def path(t):
            n = 0.4 + 0.3 * t
            m = 0.2 * t * cmath.exp(0.5j * t)
            d = (0.3 + t) * cmath.exp(-1j * t)
            return GaussianState([d, np.conj(d)], [[1 + 2 * n, 2 * m], [2 * np.conj(m), 1 + 2 * n]])

        t, dt = 0.4, 1e-4
        deriv = lambda attr: (getattr(path(t + dt), attr) - getattr(path(t - dt), attr)) / (2 * dt)
        qfi = quantum_fisher_information(path(t), deriv("d"), deriv("sigma"))
        finite = 8 * (1 - math.sqrt(fidelity(path(t), path(t + dt)))) / dt**2
        assert qfi == pytest.approx(finite, rel=1e-4)

    def test_ill_posed_direction_rejected(self):
        # heating a pure state leaves the manifold of states reachable by M
        with pytest.raises(ValueError):
            quantum_fisher_information(GaussianState.coherent(0.5), [0, 0], np.eye(2))

    def test_bad_displacement_rate(self):
        with pytest.raises(ValueError):
            quantum_fisher_information(GaussianState.coherent(0.5), [1, 1j], np.zeros((2, 2)))


# --- Mandelstam-Tamm chain ----------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(eta=st.floats(0.0, 0.3), tau=st.floats(0.5, 20), alpha=st.floats(0.1, 10))
def test_angle_bounded_by_path_length(eta, tau, alpha):
    traj = markov_trajectory(SpectralParams(eta, 1.0, 10.0), tau, h=0.01)
    ct = CoherentTrajectory(alpha, traj)
    angle = bures_angle(ct.state(0), ct.state(len(traj.t) - 1))
    path_length = average_speed(ct) * traj.t[-1]
    assert angle <= path_length * (1 + 1e-9) + 1e-12
