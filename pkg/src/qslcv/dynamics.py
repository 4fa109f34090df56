"""Amplitude u(t) of the damped oscillator.

The coherent amplitude obeys the integro-differential equation

    du/dt + i omega_0 u(t) + int_0^t mu(t - t') u(t') dt' = 0,   u(0) = 1,

which is solved here on a uniform grid. The Born-Markov closed form and a
discretized-bath reference integrator live alongside the solver.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import IO, NamedTuple

import numba
import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma, gammainc, gammaincc

from .errors import NumericError
from .spectral import (
    SpectralParams,
    frequency_shift,
    markov_decay_rate,
    memory_kernel,
    spectral_density,
)

COEFF_FLOOR = 1e-12
LEAF = 128
CSV_COLUMNS = ("t", "re_u", "im_u", "abs_u", "re_du", "im_du", "Omega", "gamma")


def _frozen(a, dtype):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    """u(t) and du/dt on a uniform grid starting at t = 0."""

    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    omega_0: float = 1.0

    def __post_init__(self):
        t = _frozen(self.t, float)
        u = _frozen(self.u, complex)
        du = _frozen(self.du, complex)
        if t.ndim != 1 or t.size < 2 or u.shape != t.shape or du.shape != t.shape:
            raise ValueError("t, u, du must be 1-D arrays of equal length >= 2")
        if t[0] != 0.0:
            raise ValueError("trajectory grids start at t = 0")
        steps = np.diff(t)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
            raise ValueError("trajectory grid must be uniform")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "du", du)

    @property
    def h(self) -> float:
        return float(self.t[-1] / (self.t.size - 1))

    @property
    def tau(self) -> float:
        return float(self.t[-1])

    def __len__(self):
        return self.t.size

    @cached_property
    def coefficients(self) -> "CoefficientSeries":
        return master_equation_coefficients(self)

    @property
    def omega_t(self) -> np.ndarray:
        """Renormalized frequency, NaN past the point where |u| underflows."""
        return self.coefficients.padded(self.t.size)[0]

    @property
    def gamma_t(self) -> np.ndarray:
        """Decay rate, NaN past the point where |u| underflows."""
        return self.coefficients.padded(self.t.size)[1]


class CoefficientSeries(NamedTuple):
    t: np.ndarray
    omega: np.ndarray
    gamma: np.ndarray
    truncated: bool

    def padded(self, n: int):
        pad = n - self.t.size
        nan = np.full(pad, np.nan)
        return np.concatenate([self.omega, nan]), np.concatenate([self.gamma, nan])


def master_equation_coefficients(traj: AmplitudeTrajectory) -> CoefficientSeries:
    """Omega(t) = -Im[du/u], gamma(t) = -Re[du/u].

    The series stops at the first grid point with |u| <= 1e-12 and is then
    flagged ``truncated``.
    """
    small = np.flatnonzero(np.abs(traj.u) <= COEFF_FLOOR)
    stop = small[0] if small.size else traj.t.size
    truncated = stop < traj.t.size
    if truncated:
        warnings.warn(
            f"|u| fell below {COEFF_FLOOR:g} at t={traj.t[stop]:.6g}; "
            "master-equation coefficients truncated there",
            RuntimeWarning, stacklevel=2,
        )
    ratio = traj.du[:stop] / traj.u[:stop]
    return CoefficientSeries(traj.t[:stop], -ratio.imag, -ratio.real, truncated)


# ---------------------------------------------------------------------------
# Volterra solver

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _cell_moments(p: SpectralParams, h: float, n: int):
    """A_k = int mu(s) ds and B_k = int mu(s) (s - (k-1)h)/h ds over cells [(k-1)h, kh].

    Returned arrays are indexed by k - 1. Each cell is split so that sub-cells
    stay below a quarter of the kernel decay time 1/omega_c.
    """
    nsub = max(1, math.ceil(4.0 * h * p.omega_c))
    sub = h / nsub
    # offsets of Gauss nodes within one cell, in units of the cell
    frac = ((np.arange(nsub)[:, None] + (_GL_X + 1.0) / 2.0) * sub / h).ravel()
    wts = np.tile(_GL_W * sub / 2.0, nsub)
    lo = np.arange(n, dtype=float)[:, None] * h
    mu = memory_kernel(p, lo + frac[None, :] * h)
    A = mu @ wts
    B = mu @ (wts * frac)
    return A, B


def _weights(p: SpectralParams, h: float, n: int, rule: str):
    """Convolution weights: W[0] on u_m, W[k] on u_{m-k}, E[m] on u_0."""
    W = np.zeros(n + 1, dtype=complex)
    E = np.zeros(n + 1, dtype=complex)
    if rule == "product":
        A, B = _cell_moments(p, h, n)
        W[0] = A[0] - B[0]
        W[1:n] = B[: n - 1] + A[1:n] - B[1:n]
        E[1:] = B
    elif rule == "trapezoid":
        mu = memory_kernel(p, np.arange(n + 1) * h)
        W[0] = 0.5 * h * mu[0]
        W[1:n] = h * mu[1:n]
        E[1:] = 0.5 * h * mu[1:]
    else:
        raise ValueError(f"unknown kernel rule {rule!r}")
    return W, E


def _step_factors(p: SpectralParams, h: float, W):
    return 1.0 + 0.5 * h * (1j * p.omega_0 + W[0]), 1j * p.omega_0 + W[0]


def _solve_direct(p: SpectralParams, tau: float, n: int, rule: str) -> AmplitudeTrajectory:
    """Reference implementation: the history sum is recomputed at every step."""
    h = tau / n
    W, E = _weights(p, h, n, rule)
    Wr = W[::-1].copy()
    lhs, diag = _step_factors(p, h, W)
    u = np.empty(n + 1, dtype=complex)
    du = np.empty(n + 1, dtype=complex)
    u[0], du[0] = 1.0, -1j * p.omega_0
    for m in range(1, n + 1):
        hist = np.dot(Wr[n - m + 1 : n], u[1:m]) + E[m] * u[0]
        u[m] = (u[m - 1] + 0.5 * h * (du[m - 1] - hist)) / lhs
        du[m] = -diag * u[m] - hist
    return _finish(p, tau, n, u, du)


def _solve_fft(p: SpectralParams, tau: float, n: int, rule: str, leaf: int = LEAF) -> AmplitudeTrajectory:
    """Same recurrence as :func:`_solve_direct` with the history sum split recursively.

    Once the first half of a block [l, r) is known, its contribution to the
    history of the second half is added with one FFT convolution, so the
    total cost is O(n log^2 n). Blocks of at most ``leaf`` steps are finished
    with direct sums.
    """
    h = tau / n
    W, E = _weights(p, h, n, rule)
    Wr = W[::-1].copy()
    lhs, diag = _step_factors(p, h, W)
    u = np.empty(n + 1, dtype=complex)
    du = np.empty(n + 1, dtype=complex)
    u[0], du[0] = 1.0, -1j * p.omega_0
    H = E * u[0]

    def block(l, r):
        if r - l <= leaf:
            for m in range(l, r):
                hist = H[m] + np.dot(Wr[n - m + l : n], u[l:m])
                u[m] = (u[m - 1] + 0.5 * h * (du[m - 1] - hist)) / lhs
                du[m] = -diag * u[m] - hist
            return
        mid = (l + r) // 2
        block(l, mid)
        H[mid:r] += fftconvolve(u[l:mid], W[: r - l])[mid - l : r - l]
        block(mid, r)

    block(1, n + 1)
    return _finish(p, tau, n, u, du)


def _finish(p, tau, n, u, du) -> AmplitudeTrajectory:
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du))):
        raise NumericError(f"amplitude solver produced non-finite values (h={tau / n:g})")
    return AmplitudeTrajectory(np.arange(n + 1) * (tau / n), u, du, p.omega_0)


_METHODS = {"fft": _solve_fft, "direct": _solve_direct}


def _solve_fixed(p: SpectralParams, tau: float, n: int, rule: str, method: str = "fft") -> AmplitudeTrajectory:
    try:
        solver = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown history method {method!r}; expected one of {sorted(_METHODS)}") from None
    return solver(p, tau, n, rule)


def _free_trajectory(p: SpectralParams, tau: float, n: int) -> AmplitudeTrajectory:
    t = np.linspace(0.0, tau, n + 1)
    u = np.exp(-1j * p.omega_0 * t)
    return AmplitudeTrajectory(t, u, -1j * p.omega_0 * u, p.omega_0)


def default_step(p: SpectralParams) -> float:
    return min(0.01, 0.5 / p.omega_c)


def _n_steps(tau: float, h: float) -> int:
    return max(1, math.ceil(tau / h - 1e-9))


def solve_amplitude(
    p: SpectralParams,
    tau: float,
    h: float | str = "auto",
    *,
    rule: str = "product",
    gate_tol: float = 1e-5,
    max_refinements: int = 4,
    method: str = "fft",
) -> AmplitudeTrajectory:
    """Integrate the amplitude equation on [0, tau].

    Implicit trapezoidal stepping (the linear corrector is solved exactly) with
    a second-order discretization of the memory integral. ``rule="product"``
    integrates the closed-form kernel exactly against the piecewise-linear
    interpolant of u; ``rule="trapezoid"`` is the plain composite trapezoid.
    ``method`` picks how the history sum is evaluated: ``"fft"`` (blocked
    FFT convolution) or ``"direct"`` (one dot product per step). Both give
    the same recurrence up to round-off.

    With ``h="auto"`` the step starts at min(0.01, 0.5/omega_c) and is halved
    until solutions at h and h/2 agree to ``gate_tol`` per unit time,
    max_n |u_h - u_{h/2}| / max(1, t_n); the finer solution is returned. The
    step is adjusted so that the grid ends exactly at tau.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if p.eta == 0:
        step = default_step(p) if h == "auto" else float(h)
        return _free_trajectory(p, tau, _n_steps(tau, step))
    if h != "auto":
        h = float(h)
        if not h > 0:
            raise ValueError("step h must be positive")
        return _solve_fixed(p, tau, _n_steps(tau, h), rule, method)

    n = _n_steps(tau, default_step(p))
    coarse = _solve_fixed(p, tau, n, rule, method)
    for _ in range(max_refinements + 1):
        fine = _solve_fixed(p, tau, 2 * n, rule, method)
        drift = np.abs(coarse.u - fine.u[::2]) / np.maximum(1.0, coarse.t)
        if drift.max() < gate_tol:
            return fine
        coarse, n = fine, 2 * n
    raise NumericError(
        f"step-halving gate not met after {max_refinements} refinements: "
        f"max |du|/t = {drift.max():.3g} >= {gate_tol:g} at h = {tau / n:.3g}"
    )


# ---------------------------------------------------------------------------
# Born-Markov closed form

def markov_amplitude(p: SpectralParams, t, include_shift: bool = False):
    """u(t) = exp(-(kappa + i (omega_0 + Delta)) t); Delta dropped unless ``include_shift``."""
    rate = _markov_exponent(p, include_shift)
    out = np.exp(-rate * np.asarray(t, dtype=float))
    return out if out.ndim else complex(out)


def _markov_exponent(p: SpectralParams, include_shift: bool) -> complex:
    shift = frequency_shift(p) if include_shift else 0.0
    return markov_decay_rate(p) + 1j * (p.omega_0 + shift)


def markov_trajectory(
    p: SpectralParams, tau: float, h: float = 0.01, include_shift: bool = False
) -> AmplitudeTrajectory:
    """Born-Markov amplitude sampled on a uniform grid, with its exact derivative."""
    rate = _markov_exponent(p, include_shift)
    t = np.linspace(0.0, tau, _n_steps(tau, h) + 1)
    u = np.exp(-rate * t)
    return AmplitudeTrajectory(t, u, -rate * u, p.omega_0)


# ---------------------------------------------------------------------------
# Discretized bath

def bath_modes(
    p: SpectralParams, n_modes: int, omega_max: float, coupling: str = "bin", grading: float = 1.0
):
    """Frequencies and couplings of a finite bath on [0, omega_max].

    Bin edges are omega_max * (k / n_modes) ** grading, so ``grading > 1``
    concentrates modes at low frequency where the band edge sits.
    ``coupling="bin"`` gives each mode the exact spectral weight of its bin,
    placed at the bin centroid. ``coupling="midpoint"`` uses
    g_k = sqrt(J(w_k) dw_k) at bin centres.
    """
    if grading < 1:
        raise ValueError("grading must be >= 1")
    edges = omega_max * (np.arange(n_modes + 1) / n_modes) ** grading
    if coupling == "midpoint":
        wk = 0.5 * (edges[1:] + edges[:-1])
        return wk, np.sqrt(spectral_density(p, wk) * np.diff(edges))
    if coupling != "bin":
        raise ValueError(f"unknown coupling rule {coupling!r}")
    x = edges / p.omega_c
    a, b = x[:-1], x[1:]

    def mass(q):
        # lower tail from P, upper tail from Q to avoid cancellation
        return np.where(a < q, gammainc(q, b) - gammainc(q, a), gammaincc(q, a) - gammaincc(q, b))

    m0 = p.eta * p.omega_c**2 * gamma(p.s + 1) * mass(p.s + 1)
    m1 = p.eta * p.omega_c**3 * gamma(p.s + 2) * mass(p.s + 2)
    keep = m0 > 0
    if not np.any(keep):
        return 0.5 * (edges[1:] + edges[:-1]), np.zeros(n_modes)
    return m1[keep] / m0[keep], np.sqrt(m0[keep])


@numba.njit(cache=True)
def _rk4_interaction(w0, wk, g, h, nsteps):
    # Classic RK4 on interaction-picture amplitudes b_0 = c_0 e^{i w0 t},
    # b_k = c_k e^{i w_k t}; the free rotation is applied exactly.
    n = wk.shape[0]
    detune = wk - w0
    b = np.zeros(n, dtype=np.complex128)
    acc = np.zeros(n, dtype=np.complex128)
    kb = np.zeros(n, dtype=np.complex128)
    ph = np.ones(n, dtype=np.complex128)
    half = np.exp(-0.5j * h * detune)
    c0 = np.empty(nsteps + 1, dtype=np.complex128)
    dc0 = np.empty(nsteps + 1, dtype=np.complex128)
    norm = np.empty(nsteps + 1)
    b0 = 1.0 + 0.0j
    c0[0] = 1.0
    dc0[0] = -1j * w0
    norm[0] = 1.0
    s1 = 0.0j
    for i in range(nsteps):
        k1 = -1j * s1
        s2 = 0.0j
        for k in range(n):
            kb[k] = -1j * g[k] * np.conj(ph[k]) * b0
            acc[k] = kb[k]
            s2 += g[k] * ph[k] * half[k] * (b[k] + 0.5 * h * kb[k])
        k2 = -1j * s2
        s3 = 0.0j
        for k in range(n):
            pm = ph[k] * half[k]
            kb[k] = -1j * g[k] * np.conj(pm) * (b0 + 0.5 * h * k1)
            acc[k] += 2.0 * kb[k]
            s3 += g[k] * pm * (b[k] + 0.5 * h * kb[k])
        k3 = -1j * s3
        s4 = 0.0j
        for k in range(n):
            pm = ph[k] * half[k]
            kb[k] = -1j * g[k] * np.conj(pm) * (b0 + 0.5 * h * k2)
            acc[k] += 2.0 * kb[k]
            s4 += g[k] * pm * half[k] * (b[k] + h * kb[k])
        k4 = -1j * s4
        b0_end = b0 + h * k3
        b0 = b0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_next = (i + 1) * h
        resync = (i + 1) % 1024 == 0
        s1 = 0.0j
        nrm = b0.real * b0.real + b0.imag * b0.imag
        for k in range(n):
            pf = ph[k] * half[k] * half[k]
            kb4 = -1j * g[k] * np.conj(pf) * b0_end
            b[k] += h / 6.0 * (acc[k] + kb4)
            if resync:
                ph[k] = np.exp(-1j * detune[k] * t_next)
            else:
                ph[k] = pf
            s1 += g[k] * ph[k] * b[k]
            nrm += b[k].real * b[k].real + b[k].imag * b[k].imag
        rot = np.exp(-1j * w0 * t_next)
        c0[i + 1] = b0 * rot
        dc0[i + 1] = rot * (-1j * w0 * b0 - 1j * s1)
        norm[i + 1] = nrm
    return c0, dc0, norm


def discretized_bath_oracle(
    p: SpectralParams,
    tau: float,
    n_modes: int = 4000,
    omega_max: float | None = None,
    *,
    h: float | None = None,
    coupling: str = "bin",
    grading: float = 2.0,
    return_norm: bool = False,
):
    """Reference u(t) from the single-excitation Schroedinger equation of a finite bath.

    dc_0/dt = -i w0 c_0 - i sum_k g_k c_k,  dc_k/dt = -i w_k c_k - i g_k c_0.

    Intended as an independent check of :func:`solve_amplitude`. Bin edges
    follow omega_max * x**grading (see :func:`bath_modes`). A bath whose
    widest bin is dw revives at about t = 2 pi / dw, so ``n_modes`` must be
    at least grading * omega_max * tau / (2 pi) for the result to be
    meaningful on [0, tau].
    The default step min(0.01, 0.2/omega_max) keeps the norm drift of RK4
    near 1e-8 for tau ~ 50.
    """
    if n_modes < 100:
        raise ValueError("discretized bath needs n_modes >= 100")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if omega_max is None:
        omega_max = 20.0 * p.omega_c
    if omega_max < 10.0 * p.omega_c:
        warnings.warn("omega_max below 10 omega_c truncates the spectral density", RuntimeWarning, stacklevel=2)
    widest = omega_max * (1.0 - (1.0 - 1.0 / n_modes) ** grading)
    if 2 * math.pi / widest < tau:
        warnings.warn(
            f"bath recurrence time {2 * math.pi / widest:.4g} is shorter than tau={tau:g}",
            RuntimeWarning, stacklevel=2,
        )
    if h is None:
        h = min(0.01, 0.2 / omega_max)
    nsteps = _n_steps(tau, h)
    wk, g = bath_modes(p, n_modes, omega_max, coupling, grading)
    c0, dc0, norm = _rk4_interaction(float(p.omega_0), wk, g, tau / nsteps, nsteps)
    if not np.all(np.isfinite(c0)):
        raise NumericError("bath integration produced non-finite values")
    traj = AmplitudeTrajectory(np.linspace(0.0, tau, nsteps + 1), c0, dc0, p.omega_0)
    return (traj, norm) if return_norm else traj


# ---------------------------------------------------------------------------
# CSV export

def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def write_trajectory_csv(traj: AmplitudeTrajectory, out: IO[str], every: int = 1) -> None:
    """Write ``t, re_u, im_u, abs_u, re_du, im_du, Omega, gamma`` rows (12 significant digits)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        omega, gam = traj.omega_t, traj.gamma_t
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i in range(0, traj.t.size, every):
        u, du = traj.u[i], traj.du[i]
        writer.writerow([
            _fmt(traj.t[i]), _fmt(u.real), _fmt(u.imag), _fmt(abs(u)),
            _fmt(du.real), _fmt(du.imag), _fmt(omega[i]), _fmt(gam[i]),
        ])
