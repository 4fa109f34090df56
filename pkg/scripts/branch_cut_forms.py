"""Pole-plus-band asymptote of u(t) for both band weights, against the solver.

The "standard" weight follows from the resolvent; the alternative doubles
J inside the denominator. The table shows |u_solver - u_asym| at a few
times and the sum rule Z + band(0), which should equal u(0) = 1.
"""
import argparse

from qslcv.dynamics import solve_amplitude
from qslcv.spectral import SpectralParams
from qslcv.spectrum import CUT_FORMS, asymptotic_amplitude, branch_cut_integral, find_bound_state

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.12)
    ap.add_argument("--tau", type=float, default=100.0)
    a = ap.parse_args()
    p = SpectralParams(a.eta, 1.0, 10.0)
    b = find_bound_state(p)
    tr = solve_amplitude(p, a.tau, 0.005)
    print(f"# {p}  E_b={b.e_b:.10g}  Z={b.z:.10g}")
    for form in CUT_FORMS:
        total = b.z + branch_cut_integral(p, 0.0, form).real
        print(f"{form}: Z + band(0) = {total:.6f}")
        for t in sorted({10.0, 20.0, 40.0, 60.0, a.tau}):
            i = int(round(t / tr.h))
            gap = abs(tr.u[i] - asymptotic_amplitude(b, p, t, include_branch_cut=True, form=form))
            print(f"  t={t:6g}  |u - u_asym| = {gap:.3e}")
