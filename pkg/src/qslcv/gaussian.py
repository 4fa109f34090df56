"""Single-mode Gaussian states in the complex (a, a^dagger) ordering.

The displacement is d = (<a>, <a^dagger>) and the covariance is
sigma_ij = Tr(rho {A_i - d_i, A_j^dagger - d_j^*}), so a coherent state has
sigma = identity. K = diag(1, -1) is the symplectic form in this ordering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AmplitudeTrajectory

K = np.diag([1.0, -1.0]).astype(complex)
PHYS_TOL = 1e-10
PINV_RCOND = 1e-12


@dataclass(frozen=True, eq=False)
class GaussianState:
    d: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=complex).reshape(2)
        sigma = np.array(self.sigma, dtype=complex).reshape(2, 2)
        if abs(d[1] - np.conj(d[0])) > PHYS_TOL * max(1.0, abs(d[0])):
            raise ValueError("displacement must have the form (d, d*)")
        scale = max(1.0, np.abs(sigma).max())
        if np.abs(sigma - sigma.conj().T).max() > PHYS_TOL * scale:
            raise ValueError("covariance matrix must be Hermitian")
        sigma = 0.5 * (sigma + sigma.conj().T)
        if np.linalg.eigvalsh(sigma + K).min() < -PHYS_TOL * scale:
            raise ValueError("covariance violates the uncertainty relation sigma + K >= 0")
        d.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def coherent(cls, alpha: complex) -> "GaussianState":
        return cls(np.array([alpha, np.conj(alpha)]), np.eye(2))

    @property
    def is_pure(self) -> bool:
        return abs(np.linalg.det(self.sigma).real - 1.0) < 1e-9


@dataclass(frozen=True, eq=False)
class CoherentTrajectory:
    """Coherent initial state alpha carried by the amplitude u(t): d_t = (alpha u, (alpha u)*)."""

    alpha: complex
    traj: AmplitudeTrajectory

    def state(self, index: int) -> GaussianState:
        return GaussianState.coherent(self.alpha * self.traj.u[index])

    @property
    def alpha_abs(self) -> float:
        return abs(self.alpha)

    @property
    def speed(self) -> np.ndarray:
        """|alpha du/dt| on the trajectory grid; equals sqrt(F_Q)/2."""
        return abs(self.alpha) * np.abs(self.traj.du)


def _det(m: np.ndarray) -> float:
    return float(np.linalg.det(m).real)


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity between two single-mode Gaussian states.

    F = 2 exp(-dd^dagger (sigma_a + sigma_b)^{-1} dd) / (sqrt(Pi + Lambda) - sqrt(Lambda)),
    with Pi = det(sigma_a + sigma_b) and
    Lambda = det(sigma_a + K) det(sigma_b + K). Lambda vanishes when either
    state is pure; small negative round-off is clipped to zero.
    """
    total = a.sigma + b.sigma
    dd = b.d - a.d
    exponent = float(np.real(dd.conj() @ np.linalg.solve(total, dd)))
    pi_ = _det(total)
    lam = max(0.0, _det(a.sigma + K) * _det(b.sigma + K))
    f = 2.0 * math.exp(-exponent) / (math.sqrt(pi_ + lam) - math.sqrt(lam))
    return min(1.0, max(0.0, f))


def bures_angle(a: GaussianState, b: GaussianState) -> float:
    """L_B = arccos(sqrt(F))."""
    return math.acos(math.sqrt(fidelity(a, b)))


def coherent_bures_angle(x: float) -> float:
    """arccos(exp(-x/2)) for x = |alpha (1 - u)|^2, accurate also for small x."""
    if x < 0:
        raise ValueError("x must be >= 0")
    return math.atan(math.sqrt(math.expm1(x))) if x < 700 else math.pi / 2


def quantum_fisher_information(state: GaussianState, d_dot, sigma_dot) -> float:
    """F_Q = 1/2 vec(sigma_dot)^dagger M^+ vec(sigma_dot) + 2 d_dot^dagger sigma^{-1} d_dot.

    M = sigma^* (x) sigma - K (x) K. For pure states M is singular; the
    pseudo-inverse is used, and a sigma_dot with a component outside the range
    of M is rejected.
    """
    d_dot = np.asarray(d_dot, dtype=complex).reshape(2)
    sigma_dot = np.asarray(sigma_dot, dtype=complex).reshape(2, 2)
    if abs(d_dot[1] - np.conj(d_dot[0])) > PHYS_TOL * max(1.0, abs(d_dot[0])):
        raise ValueError("d_dot must have the form (x, x*)")
    sigma = state.sigma
    first = 0.0
    if np.any(sigma_dot != 0):
        m = np.kron(sigma.conj(), sigma) - np.kron(K, K)
        v = sigma_dot.reshape(4, order="F")
        m_pinv = np.linalg.pinv(m, rcond=PINV_RCOND, hermitian=True)
        residual = v - m @ (m_pinv @ v)
        if np.linalg.norm(residual) > 1e-9 * max(1.0, np.linalg.norm(v)):
            raise ValueError("sigma_dot is not in the range of M; metric is ill-posed")
        first = 0.5 * float(np.real(v.conj() @ m_pinv @ v))
    second = 2.0 * float(np.real(d_dot.conj() @ np.linalg.solve(sigma, d_dot)))
    return max(0.0, first + second)
