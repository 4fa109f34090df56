"""Command-line front end: ``qslcv <subcommand> [--flag value] ...``.

Every command writes CSV to ``--out`` (or standard output). The first line is
a comment echoing the effective configuration. Exit status is 0 on success,
2 for usage or validation errors and 3 when a numerical routine fails.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dynamics import (
    _fmt,
    discretized_bath_oracle,
    markov_trajectory,
    solve_amplitude,
    write_trajectory_csv,
)
from .errors import NumericError
from .gaussian import CoherentTrajectory
from .qsl import REPORT_COLUMNS, bound_state_speed, qsl_ratio, qsl_series
from .spectral import SpectralParams
from .spectrum import (
    CUT_FORMS,
    asymptotic_amplitude,
    find_bound_state,
    numeric_threshold,
    threshold_coupling,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

SWEEPABLE = ("eta", "s", "omega_c", "alpha", "tau")
FIG1_ETAS = (0.02, 0.2, 10)
FIG2_ETAS = (0.02, 0.2, 19)
FIG2_OMEGA_C = (2.0, 20.0, 19)
FIG2_OMEGA_C_ETA = 0.1
FIG3_ETAS = (0.06, 0.12)
THRESHOLD_S = (0.5, 1.0, 2.0, 3.0)
THRESHOLD_OMEGA_C = (5.0, 10.0, 20.0)


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one CLI run (defaults follow |alpha| = 10, s = 1, omega_c = 10)."""

    eta: float = 0.12
    s: float = 1.0
    omega_c: float = 10.0
    alpha: float = 10.0
    tau: float = 400.0
    step: str = "auto"
    out: str = "-"
    oracle: bool = False
    branch_cut: str = "off"
    shift: bool = False
    model: str = "exact"
    sweep: str = ""
    start: float = math.nan
    stop: float = math.nan
    count: int = 0
    every: float = 0.0
    etas: tuple = ()
    workers: int = 0
    modes: int = 4000

    def __post_init__(self):
        for name in ("s", "omega_c", "alpha", "tau"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        if not (math.isfinite(self.every) and self.every >= 0):
            raise ValueError(f"every must be >= 0, got {self.every!r}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be >= 0, got {self.eta!r}")
        if self.step != "auto":
            try:
                h = float(self.step)
            except ValueError:
                raise ValueError(f"step must be 'auto' or a positive number, got {self.step!r}") from None
            if not (math.isfinite(h) and h > 0):
                raise ValueError(f"step must be 'auto' or a positive number, got {self.step!r}")
        if self.branch_cut not in ("off", *CUT_FORMS):
            raise ValueError(f"branch-cut must be one of off, {', '.join(CUT_FORMS)}")
        if self.model not in ("exact", "markov"):
            raise ValueError("model must be 'exact' or 'markov'")
        if self.sweep and self.sweep not in SWEEPABLE:
            raise ValueError(f"sweep must be one of {', '.join(SWEEPABLE)}")
        if self.sweep:
            if not (math.isfinite(self.start) and math.isfinite(self.stop)):
                raise ValueError("a sweep needs --start and --stop")
            if self.count < 2:
                raise ValueError("sweep count must be >= 2")
        if any(not (math.isfinite(e) and e >= 0) for e in self.etas):
            raise ValueError("etas must be >= 0")
        if self.workers < 0 or self.modes < 100:
            raise ValueError("workers must be >= 0 and modes >= 100")

    @property
    def params(self) -> SpectralParams:
        return SpectralParams(self.eta, self.s, self.omega_c)

    @property
    def h(self):
        return "auto" if self.step == "auto" else float(self.step)

    def header(self) -> str:
        parts = []
        for k, v in asdict(self).items():
            if isinstance(v, tuple):
                v = ",".join(_fmt(x) for x in v)
            elif isinstance(v, float):
                v = _fmt(v)
            parts.append(f"{k}={v}")
        return "# " + " ".join(parts)

    def sweep_values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def points(self) -> list["RunConfig"]:
        """One config per sweep point (just ``self`` without a sweep)."""
        if not self.sweep:
            return [self]
        return [replace(self, sweep="", **{self.sweep: float(v)}) for v in self.sweep_values()]


# ---------------------------------------------------------------------------
# config assembly

_TYPES = {f.name: f.type for f in fields(RunConfig)}
_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, raw) -> object:
    kind = _TYPES[key]
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in _BOOL_TRUE:
            return True
        if text in _BOOL_FALSE:
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    if kind == "tuple":
        if isinstance(raw, (tuple, list)):
            return tuple(float(x) for x in raw)
        return tuple(float(x) for x in str(raw).split(",") if x.strip())
    return str(raw).strip()


def read_config_file(path: str | os.PathLike) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys use flag spelling."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _TYPES or key == "config":
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(args: argparse.Namespace, command_defaults: dict | None = None) -> RunConfig:
    """Defaults, then command defaults, then the config file, then explicit flags."""
    values = dict(command_defaults or {})
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _TYPES:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = _coerce(key, raw)
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# workers (module level so they can be pickled)

def _trajectory(cfg: RunConfig):
    p = cfg.params
    if cfg.model == "markov":
        h = 0.01 if cfg.h == "auto" else cfg.h
        return markov_trajectory(p, cfg.tau, h=h, include_shift=cfg.shift)
    if cfg.oracle:
        kw = {} if cfg.h == "auto" else {"h": cfg.h}
        return discretized_bath_oracle(p, cfg.tau, cfg.modes, 20.0 * p.omega_c, **kw)
    return solve_amplitude(p, cfg.tau, cfg.h)


def _report_row(cfg: RunConfig) -> list[str]:
    ct = CoherentTrajectory(cfg.alpha, _trajectory(cfg))
    return qsl_ratio(ct).csv_row(cfg.params)


def _bound_row(cfg: RunConfig) -> list[str]:
    p = cfg.params
    b = find_bound_state(p)
    row = [_fmt(p.eta), _fmt(p.s), _fmt(p.omega_c), str(int(b.exists)), _fmt(b.e_b), _fmt(b.z)]
    if cfg.branch_cut != "off":
        amp = asymptotic_amplitude(b, p, cfg.tau, include_branch_cut=True, form=cfg.branch_cut)
        row += [_fmt(cfg.tau), _fmt(amp.real), _fmt(amp.imag), _fmt(abs(amp))]
    return row


def _stride(cfg: RunConfig, h: float, default: float = 0.0) -> int:
    """Grid stride for sampling every ``cfg.every`` time units (0 means ``default``, or every point)."""
    every = cfg.every or default
    return max(1, round(every / h)) if every else 1


def _fig1_rows(cfg: RunConfig) -> list[list[str]]:
    ct = CoherentTrajectory(cfg.alpha, _trajectory(cfg))
    stride = _stride(cfg, ct.traj.h, default=1.0)
    series = qsl_series(ct, stride=stride)
    return [[_fmt(cfg.eta), _fmt(t), _fmt(v), _fmt(r)]
            for t, v, r in zip(series.tau, series.v_bar, series.ratio)]


def _fig2_row(cfg: RunConfig) -> list[str]:
    p = cfg.params
    ct = CoherentTrajectory(cfg.alpha, _trajectory(cfg))
    r = qsl_ratio(ct)
    b = find_bound_state(p)
    return [_fmt(p.eta), _fmt(p.omega_c), _fmt(r.v_bar), _fmt(r.ratio),
            str(int(b.exists)), _fmt(bound_state_speed(b, cfg.alpha))]


def _fig3_rows(cfg: RunConfig) -> list[list[str]]:
    ct = CoherentTrajectory(cfg.alpha, _trajectory(cfg))
    stride = _stride(cfg, ct.traj.h, default=1.0)
    series = qsl_series(ct, stride=stride)
    return [[_fmt(cfg.eta), _fmt(t), _fmt(100 * r), _fmt(100 * rw)]
            for t, r, rw in zip(series.tau, series.ratio, series.ratio_w)]


def _threshold_row(cfg: RunConfig) -> list[str]:
    numeric = numeric_threshold(cfg.s, cfg.omega_c)
    analytic = threshold_coupling(cfg.s, cfg.omega_c)
    return [_fmt(cfg.s), _fmt(cfg.omega_c), _fmt(numeric), _fmt(analytic),
            _fmt(abs(numeric - analytic) / analytic)]


def run_parallel(fn: Callable, jobs: Sequence, workers: int = 0) -> list:
    """Map ``fn`` over ``jobs`` on a process pool; results keep the job order."""
    workers = workers or os.cpu_count() or 1
    workers = min(workers, len(jobs))
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------------------
# output

@contextmanager
def _sink(target: str, suffix: str = ""):
    if target == "-":
        yield sys.stdout
        return
    path = Path(target)
    if suffix:
        path = path.with_name(f"{path.stem}{suffix}{path.suffix or '.csv'}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        yield fh


def _write_table(cfg: RunConfig, columns, rows, suffix: str = "") -> None:
    with _sink(cfg.out, suffix) as fh:
        fh.write(cfg.header() + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# commands

def cmd_evolve(cfg: RunConfig) -> None:
    traj = _trajectory(cfg)
    with _sink(cfg.out) as fh:
        fh.write(cfg.header() + "\n")
        write_trajectory_csv(traj, fh, every=_stride(cfg, traj.h))


def cmd_boundstate(cfg: RunConfig) -> None:
    columns = ["eta", "s", "omega_c", "exists", "E_b", "Z"]
    if cfg.branch_cut != "off":
        columns += ["tau", "re_u_asym", "im_u_asym", "abs_u_asym"]
    rows = [_bound_row(c) for c in cfg.points()]
    _write_table(cfg, columns, rows)


def cmd_qsl(cfg: RunConfig) -> None:
    rows = run_parallel(_report_row, cfg.points(), cfg.workers)
    _write_table(cfg, REPORT_COLUMNS, rows)


def cmd_fig1(cfg: RunConfig) -> None:
    points = cfg.points() if cfg.sweep else [
        replace(cfg, eta=float(e)) for e in np.linspace(*FIG1_ETAS)
    ]
    chunks = run_parallel(_fig1_rows, points, cfg.workers)
    _write_table(cfg, ["eta", "t", "v_bar", "ratio"], [r for c in chunks for r in c])


def cmd_fig2(cfg: RunConfig) -> None:
    columns = ["eta", "omega_c", "v_bar", "ratio", "exists", "v_bar_analytic"]
    by_eta = [replace(cfg, eta=float(e)) for e in np.linspace(*FIG2_ETAS)]
    by_wc = [replace(cfg, eta=FIG2_OMEGA_C_ETA, omega_c=float(w)) for w in np.linspace(*FIG2_OMEGA_C)]
    rows = run_parallel(_fig2_row, by_eta + by_wc, cfg.workers)
    _write_table(cfg, columns, rows[: len(by_eta)], suffix="_eta")
    _write_table(cfg, columns, rows[len(by_eta):], suffix="_omega_c")


def cmd_fig3(cfg: RunConfig) -> None:
    etas = cfg.etas or FIG3_ETAS
    chunks = run_parallel(_fig3_rows, [replace(cfg, eta=float(e)) for e in etas], cfg.workers)
    _write_table(cfg, ["eta", "tau", "ratio_x100", "ratio_w_x100"], [r for c in chunks for r in c])


def cmd_threshold(cfg: RunConfig, explicit: set) -> None:
    ss = (cfg.s,) if "s" in explicit else THRESHOLD_S
    wcs = (cfg.omega_c,) if "omega_c" in explicit else THRESHOLD_OMEGA_C
    rows = [_threshold_row(replace(cfg, s=s, omega_c=w)) for s in ss for w in wcs]
    _write_table(cfg, ["s", "omega_c", "eta_star_numeric", "eta_star_analytic", "rel_err"], rows)


COMMANDS = {
    "evolve": (cmd_evolve, "integrate u(t) and write the trajectory"),
    "boundstate": (cmd_boundstate, "bound-state energy and residue"),
    "qsl": (cmd_qsl, "speed-limit report at the horizon --tau"),
    "fig1": (cmd_fig1, "average speed and speed-limit ratio over (eta, t)"),
    "fig2": (cmd_fig2, "steady-state speed and ratio against eta and omega_c"),
    "fig3": (cmd_fig3, "Bures and Wigner ratios against tau"),
    "threshold": (cmd_threshold, "numeric against analytic threshold coupling"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--eta", type=float, help="coupling constant (default 0.12)")
    g.add_argument("--s", type=float, help="Ohmicity exponent (default 1)")
    g.add_argument("--omega-c", dest="omega_c", type=float, help="cutoff frequency (default 10)")
    g.add_argument("--alpha", type=float, help="|alpha| of the initial coherent state (default 10)")
    g.add_argument("--tau", type=float, help="time horizon (default 400)")
    g.add_argument("--model", choices=("exact", "markov"), help="amplitude model (default exact)")
    g.add_argument("--shift", action="store_const", const=True,
                   help="keep the frequency shift in the Markov amplitude")
    n = common.add_argument_group("numerics")
    n.add_argument("--step", help="time step or 'auto' (default)")
    n.add_argument("--oracle", action="store_const", const=True,
                   help="use the discretized-bath integrator instead of the memory-kernel solver")
    n.add_argument("--modes", type=int, help="bath modes for --oracle (default 4000)")
    n.add_argument("--branch-cut", dest="branch_cut", choices=("off", *CUT_FORMS),
                   help="boundstate: add the band contribution at --tau")
    s = common.add_argument_group("sweeps and output")
    s.add_argument("--sweep", choices=SWEEPABLE, help="parameter to sweep")
    s.add_argument("--start", type=float)
    s.add_argument("--stop", type=float)
    s.add_argument("--count", type=int)
    s.add_argument("--every", type=float, help="sampling interval in time for series output (0: every grid point; fig1/fig3 default 1)")
    s.add_argument("--etas", help="comma-separated couplings (fig3)")
    s.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    s.add_argument("--out", help="output file, '-' for standard output")
    s.add_argument("--config", help="file of 'key = value' lines; flags override it")

    parser = argparse.ArgumentParser(prog="qslcv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    explicit = {k for k in _TYPES if getattr(args, k, None) is not None}
    try:
        cfg = build_config(args)
        if args.config:
            explicit |= set(read_config_file(args.config))
        fn = COMMANDS[args.command][0]
        if args.command == "threshold":
            fn(cfg, explicit)
        else:
            fn(cfg)
    except NumericError as exc:
        print(f"qslcv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"qslcv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
