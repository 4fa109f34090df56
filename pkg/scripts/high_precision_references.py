"""Bound-state energies and residues at 30 digits with mpmath.

These are the frozen reference values used by the test suite. The bound
state solves E = w0 - int J(w) / (w - E) dw for E < 0, and the residue is
Z = 1 / (1 + int J(w) / (w - E)^2 dw).
"""
import mpmath as mp

mp.mp.dps = 30
POINTS = [(0.12, 1, 10), (0.15, 1, 10), (0.20, 1, 10), (0.20, 0.5, 10), (0.12, 2, 10)]


def spectral_density(eta, s, wc):
    return lambda w: eta * w**s * wc ** (1 - s) * mp.e ** (-w / wc)


def bound_state(eta, s, wc, w0=1):
    eta, s, wc = mp.mpf(eta), mp.mpf(s), mp.mpf(wc)
    j = spectral_density(eta, s, wc)
    breaks = [0, 1, wc, 10 * wc, mp.inf]
    g = lambda e: w0 - mp.quad(lambda w: j(w) / (w - e), breaks) - e
    e_b = mp.findroot(g, (-5, -1e-6), solver="anderson")
    z = 1 / (1 + mp.quad(lambda w: j(w) / (w - e_b) ** 2, breaks))
    return e_b, z


if __name__ == "__main__":
    for point in POINTS:
        e_b, z = bound_state(*point)
        print(point, mp.nstr(e_b, 15), mp.nstr(z, 15))
