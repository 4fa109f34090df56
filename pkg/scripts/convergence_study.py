"""Step-size study of the memory-kernel solver.

Prints max |u_h - u_ref| over [0, tau] for a ladder of steps, the ratio
between successive errors (about 4 for a second-order scheme) and the
wall time of each solve.
"""
import argparse
import time

import numpy as np

from qslcv.dynamics import solve_amplitude
from qslcv.spectral import SpectralParams


def study(p: SpectralParams, tau: float, h0: float, levels: int, ref_level: int) -> None:
    ref = solve_amplitude(p, tau, h0 / 2**ref_level)
    previous = None
    print(f"# {p}  tau={tau}  reference h={h0 / 2**ref_level:g}")
    print(f"{'h':>10} {'max_err':>12} {'factor':>8} {'seconds':>8}")
    for k in range(levels):
        start = time.perf_counter()
        tr = solve_amplitude(p, tau, h0 / 2**k)
        elapsed = time.perf_counter() - start
        stride = (ref.t.size - 1) // (tr.t.size - 1)
        err = float(np.abs(tr.u - ref.u[::stride]).max())
        factor = f"{previous / err:8.3f}" if previous else " " * 8
        print(f"{tr.h:10.3g} {err:12.4e} {factor} {elapsed:8.2f}")
        previous = err


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.12)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--omega-c", type=float, default=10.0)
    ap.add_argument("--tau", type=float, default=20.0)
    ap.add_argument("--h0", type=float, default=0.02)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--ref-level", type=int, default=8)
    a = ap.parse_args()
    study(SpectralParams(a.eta, a.s, a.omega_c), a.tau, a.h0, a.levels, a.ref_level)
