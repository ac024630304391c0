"""Run the full report suite through the CLI and write every JSON report to a directory.

Usable in-process (``run_suite``) or as a script: ``python suite_runner.py OUTDIR``.
"""

import sys
from pathlib import Path

from strongmult.cli import main

SUITE = {
    "count": ["count", "--pair", "delta,e11", "--grid", "1e3,1e4,1e5", "--M", "10"],
    "count_twist": ["count", "--pair", "delta,twist(delta,-4)", "--grid", "1e3,1e4", "--M", "5"],
    "densities_S_0": ["densities", "--pair", "delta,e11", "--X", "1e5", "--selector", "S_0"],
    "densities_S_star": ["densities", "--pair", "delta,e11", "--X", "1e5", "--selector", "S_star"],
    "densities_S_upper_star": ["densities", "--pair", "delta,e11", "--X", "1e5", "--selector", "S_upper_star"],
    "sato_tate": ["sato-tate", "--pair", "cm32,delta", "--x", "1e5"],
    "majorant_check": ["majorant-check", "--M", "1-24", "--delta", "default,0.01,0.1", "--format", "json"],
    "bounds": ["bounds", "--case", "nondihedral,nondihedral", "--format", "json"],
}


def run_suite(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    codes = {}
    for name, argv in SUITE.items():
        codes[name] = main([*argv, "--out", str(outdir / f"{name}.json")])
    return codes


if __name__ == "__main__":
    codes = run_suite(sys.argv[1])
    sys.exit(max(codes.values()))
