"""Single-excitation spectrum: bound state, residue and long-time asymptote."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma

from .errors import NumericError
from .spectral import SpectralParams, frequency_shift, semi_infinite_quadrature, spectral_density


@dataclass(frozen=True)
class BoundState:
    exists: bool
    e_b: float = math.nan
    z: float = 0.0

    def __post_init__(self):
        if self.exists and not (self.e_b < 0 and 0 < self.z <= 1):
            raise ValueError(f"inconsistent bound state: E_b={self.e_b}, Z={self.z}")


def threshold_coupling(s: float, omega_c: float, omega_0: float = 1.0) -> float:
    """Smallest eta with a bound state: omega_0 / (omega_c Gamma(s))."""
    return omega_0 / (omega_c * gamma(s))


def has_bound_state(p: SpectralParams) -> bool:
    """Closed-form criterion omega_0 - eta omega_c Gamma(s) < 0."""
    return p.omega_0 - p.eta * p.omega_c * gamma(p.s) < 0


def static_coupling(p: SpectralParams) -> float:
    """int_0^inf J(w)/w dw by quadrature."""
    if p.eta == 0:
        return 0.0
    return semi_infinite_quadrature(
        lambda w: p.eta * w ** (p.s - 1.0) * p.omega_c ** (1.0 - p.s) * math.exp(-w / p.omega_c),
        p.omega_c,
    )


def has_bound_state_numeric(p: SpectralParams) -> bool:
    """Sign of y(0-) = omega_0 - int J(w)/w dw, with the integral done numerically."""
    return p.omega_0 - static_coupling(p) < 0


def spectral_function_y(p: SpectralParams, varpi: float) -> float:
    """y(varpi) = omega_0 - int_0^inf J(w) / (w - varpi) dw for varpi < 0."""
    if not varpi < 0:
        raise ValueError("y(varpi) is only defined below the band edge (varpi < 0)")
    if p.eta == 0:
        return p.omega_0
    gap = -varpi
    integral = semi_infinite_quadrature(
        lambda w: spectral_density(p, w) / (w + gap),
        p.omega_c, points=(gap, 10 * gap, p.omega_c),
    )
    return p.omega_0 - integral


def _residue(p: SpectralParams, e_b: float) -> float:
    weight = semi_infinite_quadrature(
        lambda w: spectral_density(p, w) / (e_b - w) ** 2,
        p.omega_c, points=(-e_b, -10 * e_b, p.omega_c),
    )
    return 1.0 / (1.0 + weight)


def find_bound_state(p: SpectralParams, *, xtol: float = 1e-12, max_doublings: int = 60) -> BoundState:
    """Locate the isolated root E_b < 0 of y(varpi) = varpi and its residue Z.

    Bisection on g(varpi) = y(varpi) - varpi, which decreases monotonically
    below the band edge. A coupling that rounds onto the threshold (root
    closer than 1e-15 to the edge) is reported as having no bound state.
    """
    if not has_bound_state(p):
        return BoundState(False)

    def g(v):
        return spectral_function_y(p, v) - v

    lo = -(p.omega_0 + p.eta * p.omega_c * gamma(p.s))
    for _ in range(max_doublings):
        if g(lo) > 0:
            break
        lo *= 2.0
    else:
        raise NumericError(f"could not bracket the bound-state energy for {p}")
    hi = -1e-15
    if g(hi) >= 0:
        # the root sits within 1e-15 of the band edge: this is the threshold
        # itself, where the pole merges into the continuum and carries no weight
        return BoundState(False)
    # tolerance is absolute for |E_b| < 1 and relative beyond
    while hi - lo > xtol * max(1.0, -hi):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    e_b = 0.5 * (lo + hi)
    return BoundState(True, float(e_b), float(_residue(p, e_b)))


# ---------------------------------------------------------------------------
# Band (branch-cut) contribution

CUT_FORMS = {"standard": 1.0, "printed": 2.0}


@lru_cache(maxsize=32)
def _shift_table(p: SpectralParams, top: float):
    """Cubic spline of the frequency shift Delta(w) on (0, top]."""
    near = np.geomspace(1e-6 * p.omega_0, 0.5 * p.omega_0, 60, endpoint=False)
    far = np.linspace(0.5 * p.omega_0, top, 600)
    nodes = np.concatenate([near, far])
    values = np.array([frequency_shift(p, w) for w in nodes])
    return CubicSpline(nodes, values), float(frequency_shift(p, 1e-9 * p.omega_0))


def _shift(p: SpectralParams, top: float, w: np.ndarray) -> np.ndarray:
    spline, at_edge = _shift_table(p, top)
    return np.where(w < 1e-6 * p.omega_0, at_edge, spline(np.maximum(w, 1e-6 * p.omega_0)))


def _cut_top(p: SpectralParams) -> float:
    # J(w)/w**2 is below ~1e-16 of its peak beyond this point
    return p.omega_c * (40.0 + 2.0 * p.s) + 4.0 * p.omega_0


def branch_cut_integral(p: SpectralParams, tau: float, form: str = "standard", *, nodes: int = 8) -> complex:
    """Band contribution int_0^inf J(w) e^{-i w tau} / ([w - w0 - Delta(w)]^2 + [c pi J(w)]^2) dw.

    ``form="standard"`` uses c = 1, the weight that follows from the boundary
    value of the resolvent; ``form="printed"`` uses c = 2. Panels are no wider
    than pi/tau so the oscillating factor is resolved; panels shrink
    geometrically towards w = 0 where J(w) ~ w**s is not smooth.
    """
    if form not in CUT_FORMS:
        raise ValueError(f"unknown branch-cut form {form!r}; expected one of {sorted(CUT_FORMS)}")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if p.eta == 0:
        return 0j
    c = CUT_FORMS[form]
    top = _cut_top(p)
    width = min(math.pi / tau if tau > 0 else math.inf, 0.02 * p.omega_0, 0.05 * p.omega_c)
    first = width
    edges = np.concatenate([
        [0.0], first * np.geomspace(1e-8, 1.0, 40)[:-1],
        np.arange(first, top, width), [top],
    ])
    edges = np.unique(edges)
    x, wq = np.polynomial.legendre.leggauss(nodes)
    a, b = edges[:-1, None], edges[1:, None]
    w = (a + (x + 1.0) * (b - a) / 2.0).ravel()
    wt = (wq * (b - a) / 2.0).ravel()
    j = spectral_density(p, w)
    denom = (w - p.omega_0 - _shift(p, top, w)) ** 2 + (c * math.pi * j) ** 2
    return complex(np.sum(wt * j * np.exp(-1j * w * tau) / denom))


def asymptotic_amplitude(
    b: BoundState,
    p: SpectralParams,
    tau: float,
    include_branch_cut: bool = False,
    form: str = "standard",
) -> complex:
    """Z e^{-i E_b tau}, plus the band contribution when ``include_branch_cut``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    pole = b.z * complex(math.cos(b.e_b * tau), -math.sin(b.e_b * tau)) if b.exists else 0j
    if include_branch_cut:
        pole += branch_cut_integral(p, tau, form)
    return pole


def numeric_threshold(s: float, omega_c: float, omega_0: float = 1.0, *, rtol: float = 1e-9) -> float:
    """Coupling at which the numerically evaluated y(0-) changes sign, by bisection in eta."""
    guess = threshold_coupling(s, omega_c, omega_0)
    lo, hi = 0.5 * guess, 2.0 * guess
    while has_bound_state_numeric(SpectralParams(lo, s, omega_c, omega_0)):
        lo *= 0.5
    while not has_bound_state_numeric(SpectralParams(hi, s, omega_c, omega_0)):
        hi *= 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if has_bound_state_numeric(SpectralParams(mid, s, omega_c, omega_0)):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
