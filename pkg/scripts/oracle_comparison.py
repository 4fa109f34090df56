"""Memory-kernel solver against a finite discretized bath on the (eta, s) test grid.

For each point the auto-stepped solver and the bath integrator run to tau
and are compared where both grids have a node. Also prints the norm drift
of the bath integrator, which should stay near 1e-9.
"""
import argparse
import time

import numpy as np

from qslcv.dynamics import discretized_bath_oracle, solve_amplitude
from qslcv.spectral import SpectralParams


def compare(p, tau, n_modes, omega_max):
    sol = solve_amplitude(p, tau)
    start = time.perf_counter()
    orc, norm = discretized_bath_oracle(p, tau, n_modes, omega_max, return_norm=True)
    elapsed = time.perf_counter() - start
    j = np.searchsorted(orc.t, sol.t).clip(0, orc.t.size - 1)
    hit = np.abs(orc.t[j] - sol.t) < 1e-9
    return float(np.abs(sol.u[hit] - orc.u[j[hit]]).max()), float(np.abs(norm - 1).max()), sol.h, elapsed


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=50.0)
    ap.add_argument("--modes", type=int, default=4000)
    ap.add_argument("--omega-max-factor", type=float, default=20.0, help="omega_max in units of omega_c")
    a = ap.parse_args()
    print(f"{'s':>4} {'eta':>5} {'h':>9} {'max|du|':>10} {'norm drift':>10} {'oracle s':>8}")
    for s in (0.5, 1.0, 2.0):
        for eta in (0.03, 0.06, 0.12, 0.2):
            p = SpectralParams(eta, s, 10.0)
            gap, drift, h, sec = compare(p, a.tau, a.modes, a.omega_max_factor * p.omega_c)
            print(f"{s:4g} {eta:5g} {h:9.3g} {gap:10.2e} {drift:10.1e} {sec:8.1f}", flush=True)
