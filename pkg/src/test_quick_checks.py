#!/usr/bin/env python3
"""
Quick Test Script for the Verification Suites

A fast version of the full run: a handful of random structures, the
coarsest admissible grid and one preset per command, to confirm that
everything works before starting `python src/cli.py verify --full`.

Usage:
    python test_quick_checks.py
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from cli import EXIT_OK, main as cli_main


QUICK_RUNS = [
    ("verify", ["verify", "--structures", "5", "--full"]),
    ("torsion", ["torsion", "--preset", "jet_lemma37", "--check"]),
    ("scan dP6", ["scan", "--preset", "dP6", "--check"]),
    ("scan wp112k", ["scan", "--preset", "wp112k", "--k", "5", "--check"]),
    ("betti cAp", ["betti", "--preset", "cAp", "--p", "4", "--check"]),
    ("grid", ["grid", "--n", "16", "--suite", "dirac"]),
]


def main():
    print("\n" + "=" * 70)
    print("QUICK TEST: verification suites")
    print("Running with reduced parameters for fast testing")
    print("=" * 70)

    failed = []
    for name, argv in QUICK_RUNS:
        print(f"\n--- {name}: {' '.join(argv)}")
        code = cli_main(argv + ["--quiet"])
        if code != EXIT_OK:
            failed.append((name, code))

    print("\n" + "=" * 70)
    if failed:
        for name, code in failed:
            print(f"✗ {name} exited with {code}")
    else:
        print("✓ Test complete! Every quick run passed.")
        print("If this looks good, run the full battery with:")
        print("  python src/cli.py verify --full --structures 500")
    print("=" * 70 + "\n")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
