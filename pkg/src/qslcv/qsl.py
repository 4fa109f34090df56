"""Speeds, path lengths and speed-limit ratios for a coherent state carried by u(t).

Two geometries are covered. In the Bures (Fisher-Rao) geometry the speed is
sqrt(F_Q)/2 = |alpha du/dt| and the geodesic distance is
L_B = arccos(exp(-|alpha (1 - u)|^2 / 2)). In the Wigner geometry distances
are L2 norms between Wigner functions normalized as
W(zeta) = exp(-|zeta - d|^2) / (pi/2), zeta = sqrt(2) (Re beta, Im beta),
which gives L_W = (2/sqrt(pi)) sqrt(1 - exp(-|alpha|^2 |u - 1|^2)) and a
speed 2/sqrt(pi) times the Bures speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .dynamics import _fmt, markov_trajectory
from .gaussian import CoherentTrajectory, coherent_bures_angle
from .spectral import SpectralParams, markov_decay_rate
from .spectrum import BoundState

WIGNER_FACTOR = 2.0 / math.sqrt(math.pi)
REPORT_COLUMNS = (
    "eta", "s", "omega_c", "alpha_abs", "tau",
    "v_bar", "l_b", "ratio", "v_bar_w", "l_w", "ratio_w",
)


@dataclass(frozen=True)
class QslReport:
    """Speed-limit summary at a single horizon ``tau``."""

    tau: float
    alpha_abs: float
    ell: float
    l_b: float
    v_bar: float
    ratio: float
    v_bar_w: float
    l_w: float
    ratio_w: float

    @property
    def tau_qsl(self) -> float:
        return self.ratio * self.tau

    @property
    def tau_qsl_w(self) -> float:
        return self.ratio_w * self.tau

    def csv_row(self, p: SpectralParams) -> list[str]:
        values = (p.eta, p.s, p.omega_c, self.alpha_abs, self.tau,
                  self.v_bar, self.l_b, self.ratio, self.v_bar_w, self.l_w, self.ratio_w)
        return [_fmt(v) for v in values]


@dataclass(frozen=True, eq=False)
class QslSeries:
    """Speed-limit quantities evaluated at many horizons along one trajectory."""

    tau: np.ndarray
    ell: np.ndarray
    l_b: np.ndarray
    v_bar: np.ndarray
    ratio: np.ndarray
    v_bar_w: np.ndarray
    l_w: np.ndarray
    ratio_w: np.ndarray

    def __len__(self):
        return self.tau.size


def _bures_angles(alpha_abs: float, u) -> np.ndarray:
    x = alpha_abs**2 * np.abs(1.0 - np.asarray(u)) ** 2
    return np.vectorize(coherent_bures_angle, otypes=[float])(x)


def wasserstein_closed_form(alpha: complex, u) -> np.ndarray | float:
    """L_W = (2/sqrt(pi)) sqrt(1 - exp(-|alpha|^2 |u - 1|^2))."""
    x = abs(alpha) ** 2 * np.abs(np.asarray(u) - 1.0) ** 2
    out = WIGNER_FACTOR * np.sqrt(-np.expm1(-x))
    return out if np.ndim(out) else float(out)


def _index(ct: CoherentTrajectory, tau: float) -> int:
    t = ct.traj.t
    i = int(round(tau / ct.traj.h))
    if not 0 <= i < t.size or abs(t[i] - tau) > 1e-9 * max(1.0, tau):
        raise ValueError(f"tau={tau!r} is not a point of the trajectory grid")
    return i


def average_speed(ct: CoherentTrajectory, upto: int | None = None) -> float:
    """(1/tau) int_0^tau |alpha du/dt| dt by the trapezoid rule on the solver grid."""
    stop = ct.traj.t.size if upto is None else upto + 1
    if stop < 2:
        raise ValueError("need at least two grid points to average a speed")
    t = ct.traj.t[:stop]
    return float(trapezoid(ct.speed[:stop], t) / t[-1])


def wasserstein_distance(ct: CoherentTrajectory, tau: float) -> float:
    """Wigner-function L2 distance between the initial state and the state at ``tau``."""
    return wasserstein_closed_form(ct.alpha, ct.traj.u[_index(ct, tau)])


def wigner_function(alpha_u: complex, x, y):
    """Wigner function of the coherent state |alpha_u> on the real grid zeta = (x, y).

    Normalized as in the module docstring (total integral 2). Used as an
    independent reference for :func:`wasserstein_closed_form`.
    """
    cx, cy = math.sqrt(2.0) * alpha_u.real, math.sqrt(2.0) * alpha_u.imag
    return np.exp(-((x - cx) ** 2 + (y - cy) ** 2)) / (0.5 * math.pi)


def qsl_ratio(ct: CoherentTrajectory) -> QslReport:
    """All speed-limit quantities at the final grid time of ``ct``."""
    if ct.alpha == 0:
        raise ValueError("alpha = 0 gives zero speed; the speed-limit ratio is undefined")
    tau = ct.traj.tau
    v_bar = average_speed(ct)
    if v_bar == 0:
        raise ValueError("trajectory does not move; the speed-limit ratio is undefined")
    return _report(tau, abs(ct.alpha), v_bar, ct.traj.u[-1])


qsl_report = qsl_ratio


def _report(tau: float, alpha_abs: float, v_bar: float, u_end: complex) -> QslReport:
    ell = v_bar * tau
    l_b = float(_bures_angles(alpha_abs, u_end))
    l_w = wasserstein_closed_form(alpha_abs, u_end)
    v_bar_w = WIGNER_FACTOR * v_bar
    return QslReport(
        tau=tau, alpha_abs=alpha_abs, ell=ell, l_b=l_b, v_bar=v_bar,
        ratio=l_b / ell, v_bar_w=v_bar_w, l_w=l_w, ratio_w=l_w / (v_bar_w * tau),
    )


def wigner_speed_and_ratio(ct: CoherentTrajectory) -> tuple[float, float]:
    r = qsl_ratio(ct)
    return r.v_bar_w, r.ratio_w


def qsl_series(ct: CoherentTrajectory, taus=None, *, stride: int = 1, start: float = 0.0) -> QslSeries:
    """Speed-limit quantities for every horizon in ``taus``.

    ``taus`` must be points of the trajectory grid. Without it every
    ``stride``-th grid point after ``start`` (excluding t = 0) is used. The path
    length is accumulated once with the trapezoid rule, so the cost is linear
    in the trajectory length.
    """
    t = ct.traj.t
    if taus is None:
        idx = np.arange(stride, t.size, stride)
        idx = idx[t[idx] >= start]
    else:
        idx = np.array([_index(ct, float(x)) for x in np.atleast_1d(taus)], dtype=int)
        if np.any(idx == 0):
            raise ValueError("horizons must be > 0")
    ell_all = np.concatenate([[0.0], cumulative_trapezoid(ct.speed, t)])
    tau = t[idx]
    ell = ell_all[idx]
    u = ct.traj.u[idx]
    a = abs(ct.alpha)
    l_b = _bures_angles(a, u)
    l_w = wasserstein_closed_form(a, u)
    v_bar = ell / tau
    v_bar_w = WIGNER_FACTOR * v_bar
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = l_b / ell
        ratio_w = l_w / (v_bar_w * tau)
    return QslSeries(tau, ell, l_b, v_bar, ratio, v_bar_w, np.atleast_1d(l_w), ratio_w)


def tightness_compare(ct: CoherentTrajectory, tau_grid) -> np.ndarray:
    """Rows (tau, ratio, ratio_w) on ``tau_grid``."""
    series = qsl_series(ct, tau_grid)
    return np.column_stack([series.tau, series.ratio, series.ratio_w])


# ---------------------------------------------------------------------------
# Analytic references

def noiseless_ratio(alpha_abs: float, tau, omega_0: float = 1.0):
    """arccos(exp(-|alpha|^2 (1 - cos w0 tau))) / (|alpha| w0 tau) for the closed oscillator."""
    tau = np.asarray(tau, dtype=float)
    x = 2.0 * alpha_abs**2 * (1.0 - np.cos(omega_0 * tau))
    out = np.vectorize(coherent_bures_angle, otypes=[float])(x) / (alpha_abs * omega_0 * tau)
    return out if out.ndim else float(out)


def markov_speed(p: SpectralParams, alpha_abs: float, tau: float) -> float:
    """|alpha| sqrt(kappa^2 + w0^2) (1 - e^{-kappa tau}) / (kappa tau), frequency shift dropped."""
    kappa = markov_decay_rate(p)
    root = math.hypot(kappa, p.omega_0)
    if kappa == 0:
        return alpha_abs * root
    return alpha_abs * root * -math.expm1(-kappa * tau) / (kappa * tau)


def markov_report(p: SpectralParams, alpha_abs: float, tau: float) -> QslReport:
    """Speed-limit quantities of the Born-Markov amplitude, with the speed integrated analytically."""
    u_end = markov_trajectory(p, tau, h=tau).u[-1]
    return _report(float(tau), alpha_abs, markov_speed(p, alpha_abs, tau), u_end)


def markov_limit_ratio(p: SpectralParams, alpha_abs: float) -> float:
    """Large-tau limit kappa arccos(exp(-|alpha|^2/2)) / (|alpha| sqrt(kappa^2 + w0^2))."""
    kappa = markov_decay_rate(p)
    return kappa * coherent_bures_angle(alpha_abs**2) / (alpha_abs * math.hypot(kappa, p.omega_0))


def bound_state_speed(b: BoundState, alpha_abs: float) -> float:
    """Long-time average speed |alpha Z E_b| when a bound state exists, else 0."""
    return alpha_abs * b.z * abs(b.e_b) if b.exists else 0.0


def bound_state_ratio(b: BoundState, alpha_abs: float, tau):
    """arccos(exp(-|alpha|^2 [1 + Z^2 - 2 Z cos(E_b tau)] / 2)) / (|alpha Z E_b| tau)."""
    if not b.exists:
        raise ValueError("bound-state asymptote requires an existing bound state")
    tau = np.asarray(tau, dtype=float)
    x = alpha_abs**2 * (1.0 + b.z**2 - 2.0 * b.z * np.cos(b.e_b * tau))
    out = np.vectorize(coherent_bures_angle, otypes=[float])(x) / (bound_state_speed(b, alpha_abs) * tau)
    return out if out.ndim else float(out)


def envelope_slope(tau, values, lo: float, hi: float, window: float = 2 * math.pi) -> float:
    """Log-log slope of the upper envelope of ``values`` on [lo, hi].

    The range is cut into windows of width ``window``; the maximum of each
    window is kept and a straight line is fitted to log(max) against
    log(tau_at_max). This keeps cusps of an oscillating series out of the fit.
    """
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (tau >= lo) & (tau <= hi) & np.isfinite(values) & (values > 0)
    tau, values = tau[mask], values[mask]
    bins = np.floor((tau - lo) / window).astype(int)
    xs, ys = [], []
    for k in np.unique(bins):
        sel = np.flatnonzero(bins == k)
        j = sel[np.argmax(values[sel])]
        xs.append(tau[j])
        ys.append(values[j])
    if len(xs) < 3:
        raise ValueError("too few envelope points for a slope fit; widen [lo, hi] or shrink window")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)
