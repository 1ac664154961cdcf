"""Shared helpers: CLI runner, CSV parsing, acceptance-criterion reporting."""
import re
import subprocess
import sys

import numpy as np

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion."""
    match = _CRITERION.search(report.nodeid)
    if match and report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] criterion {match.group(1)}: {status}", flush=True)


def run_cli(args, timeout=300):
    """Run the CLI in a subprocess; returns CompletedProcess with text output."""
    return subprocess.run(
        [sys.executable, "-m", "ptqsim.cli", *[str(a) for a in args]],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def parse_csv(text):
    """Split a ptq-sim CSV into (meta dict, header list, column dict of str lists)."""
    meta, header, rows = {}, None, []
    lines = text.splitlines()
    assert lines[0] == "# ptq-sim v1"
    for line in lines[1:]:
        if line.startswith("# "):
            key, _, value = line[2:].partition(":")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    columns = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    return meta, header, columns


def column(columns, name):
    """Numeric column as float array; empty fields become NaN."""
    return np.array([float(v) if v else np.nan for v in columns[name]])
