#!/usr/bin/env python3
"""Export every bundled figure-data preset into an output directory.

Usage: python scripts/make_figure_data.py [outdir]
"""
import sys
import time
from pathlib import Path

from ptqsim.cli import PRESETS, main

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
outdir.mkdir(parents=True, exist_ok=True)

for name in sorted(PRESETS):
    target = outdir / f"{name}.csv"
    start = time.perf_counter()
    code = main(["reproduce", name, "--out", str(target)])
    if code != 0:
        sys.exit(f"preset {name} failed with exit code {code}")
    print(f"{name:7s} -> {target}  ({time.perf_counter() - start:.1f}s)")
