#!/usr/bin/env python3
"""Quantum PD equilibrium under g3 for a range of (delta, eps), closed form vs grid."""

from __future__ import annotations

import argparse
import math

from eprgames import correlation as cg
from eprgames import games as gm
from eprgames import gfunctions as gf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=1001)
    args = ap.parse_args()
    pd = gm.prisoners_dilemma()
    print("delta,eps,ne,closed_form,grid_ne")
    for delta in (0.25, 0.5, 0.75):
        for eps in (math.pi / 6, math.pi / 4, math.pi / 2):
            spec = cg.CorrelationGame(pd, gf.g3(delta, eps))
            (p,) = cg.quantum_pure_ne(spec).profiles
            grid = cg.ne_grid_search(spec, args.grid).points
            print(f"{delta},{eps:.6f},{p.p_a:.12f},{cg.g3_pd_closed_form(delta, eps):.12f},"
                  + ";".join(f"{g.p_a:.4f}" for g in grid))


if __name__ == "__main__":
    main()
