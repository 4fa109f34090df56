"""Regenerate every figure table through the CLI.

Usage: python scripts/reproduce_figures.py [outdir] [--quick]

``--quick`` shortens the horizon to 100 and uses a fixed step, which is
enough to eyeball the shapes in a few minutes on one core.
"""
import sys
from pathlib import Path

from qslcv.cli import main


def run(*argv):
    code = main([str(a) for a in argv])
    if code:
        raise SystemExit(f"qslcv {' '.join(map(str, argv))} exited with {code}")


def reproduce(outdir: Path, quick: bool) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    extra = ["--tau", 100, "--step", 0.01] if quick else []
    run("threshold", "--out", outdir / "threshold.csv")
    run("fig1", *extra, "--out", outdir / "fig1.csv")
    run("fig2", *extra, "--out", outdir / "fig2.csv")
    run("fig3", *extra, "--every", 0.5, "--out", outdir / "fig3.csv")
    run("boundstate", "--sweep", "eta", "--start", 0.02, "--stop", 0.4, "--count", 39,
        "--out", outdir / "boundstate.csv")


if __name__ == "__main__":
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    reproduce(Path(args[0] if args else "results"), "--quick" in sys.argv)
