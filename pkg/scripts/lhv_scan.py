#!/usr/bin/env python3
"""Sweep the signed-measure family for both PD entry sets and report the flip."""

from __future__ import annotations

import argparse

import numpy as np

from eprgames import lhv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=400)
    args = ap.parse_args()
    xs = np.linspace(-0.3, 0.1, args.steps + 1)
    for label, entries in (("pd1", lhv.PD_REP1), ("pd2", lhv.PD_REP2)):
        rows = lhv.scan_m13(entries, xs)
        always = all(r.ne_exists for _, r in rows)
        print(f"{label}: ne everywhere={always} flips={lhv.flip_points(rows)}")


if __name__ == "__main__":
    main()
