"""Ohmic-family bath: spectral density, memory kernel and derived rates.

Frequencies are measured in units of the bare oscillator frequency
``omega_0`` and times in units of ``1/omega_0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .errors import NumericError

QUAD_TOL = 1e-10
QUAD_LIMIT = 200


@dataclass(frozen=True)
class SpectralParams:
    """Bath described by J(w) = eta * w**s * omega_c**(1-s) * exp(-w/omega_c).

    ``eta = 0`` is accepted and means a closed system.
    """

    eta: float
    s: float
    omega_c: float
    omega_0: float = 1.0

    def __post_init__(self):
        for name in ("eta", "s", "omega_c", "omega_0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.eta < 0:
            raise ValueError(f"coupling eta must be >= 0, got {self.eta}")
        if self.s <= 0:
            raise ValueError(f"Ohmicity s must be > 0, got {self.s}")
        if self.omega_c <= 0:
            raise ValueError(f"cutoff omega_c must be > 0, got {self.omega_c}")
        if self.omega_0 <= 0:
            raise ValueError(f"system frequency omega_0 must be > 0, got {self.omega_0}")

    @property
    def regime(self) -> str:
        if self.s < 1:
            return "sub-Ohmic"
        if self.s == 1:
            return "Ohmic"
        return "super-Ohmic"

    @property
    def kernel_prefactor(self) -> float:
        """eta * omega_c**(1-s) * Gamma(s+1), the scale of the memory kernel."""
        return self.eta * self.omega_c ** (1.0 - self.s) * gamma(self.s + 1.0)

    def with_eta(self, eta: float) -> "SpectralParams":
        return SpectralParams(eta, self.s, self.omega_c, self.omega_0)


def spectral_density(p: SpectralParams, omega):
    """J(omega) for scalar or array ``omega >= 0``."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("spectral density is defined for omega >= 0 only")
    out = p.eta * w ** p.s * p.omega_c ** (1.0 - p.s) * np.exp(-w / p.omega_c)
    return out if out.ndim else float(out)


def memory_kernel(p: SpectralParams, t):
    """Bath correlation mu(t) = int_0^inf J(w) exp(-i w t) dw, in closed form.

    mu(t) = eta omega_c**(1-s) Gamma(s+1) (1/omega_c + i t)**(-(s+1)),
    principal branch.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ValueError("memory kernel is evaluated for t >= 0 only")
    out = p.kernel_prefactor * (1.0 / p.omega_c + 1j * tt) ** (-(p.s + 1.0))
    return out if out.ndim else complex(out)


def markov_decay_rate(p: SpectralParams) -> float:
    """kappa = pi J(omega_0)."""
    return math.pi * spectral_density(p, p.omega_0)


def semi_infinite_quadrature(
    f: Callable[[float], float],
    scale: float,
    *,
    lower: float = 0.0,
    points: Sequence[float] = (),
    tol: float = QUAD_TOL,
    limit: int = QUAD_LIMIT,
) -> float:
    """Integrate a real ``f`` over [lower, inf).

    The half line is compactified with w = lower + scale * x / (1 - x) and the
    resulting integral over x in [0, 1) is done adaptively. ``points`` are
    frequencies where ``f`` has kinks or sharp features; they become interval
    breakpoints.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def g(x):
        one_minus = 1.0 - x
        w = lower + scale * x / one_minus
        return f(w) * scale / (one_minus * one_minus)

    xs = sorted({(w - lower) / (scale + w - lower) for w in points if w > lower})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            g, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=limit,
            points=xs or None, full_output=1,
        )
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > 10 * tol * max(1.0, abs(value)):
        raise NumericError(
            f"semi-infinite quadrature did not converge: value={value:.6g}, "
            f"error estimate={abserr:.3g}, scale={scale:g}: {out[3]}"
        )
    if not math.isfinite(value):
        raise NumericError("semi-infinite quadrature produced a non-finite value")
    return value


def _finite_quadrature(f, a, b, points=(), tol=QUAD_TOL, limit=QUAD_LIMIT) -> float:
    inner = sorted({x for x in points if a < x < b})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f, a, b, epsabs=tol, epsrel=tol, limit=limit,
            points=inner or None, full_output=1,
        )
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > 10 * tol * max(1.0, abs(value)):
        raise NumericError(
            f"quadrature on [{a:g}, {b:g}] did not converge: error estimate={abserr:.3g}"
        )
    return value


def frequency_shift(p: SpectralParams, omega: float | None = None, *, tol: float = QUAD_TOL) -> float:
    """Principal value P int_0^inf J(w) / (omega - w) dw.

    Defaults to omega = omega_0. The pole is removed by subtracting J(omega) on
    the symmetric window [0, 2 omega], where the subtracted constant integrates
    to zero.
    """
    if omega is None:
        omega = p.omega_0
    if omega <= 0:
        raise ValueError("frequency shift needs omega > 0 (pole inside the integration range)")
    if p.eta == 0:
        return 0.0
    j0 = spectral_density(p, omega)

    def near(w):
        if w == omega:
            return 0.0
        return (spectral_density(p, w) - j0) / (omega - w)

    marks = [omega] + [k * p.omega_c for k in (1, 5, 20) if k * p.omega_c < 2 * omega]
    core = _finite_quadrature(near, 0.0, 2.0 * omega, points=marks, tol=tol)
    tail = semi_infinite_quadrature(
        lambda w: spectral_density(p, w) / (omega - w),
        p.omega_c, lower=2.0 * omega, tol=tol,
    )
    return core + tail
