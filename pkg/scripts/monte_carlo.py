#!/usr/bin/env python3
"""Seeded Monte Carlo runs of the protocol against the analytic correlations."""

from __future__ import annotations

import argparse
import math
import time

from eprgames import correlation as cg
from eprgames import epr
from eprgames import games as gm
from eprgames import gfunctions as gf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=1_000_000)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    model = cg.CorrelationModel.named("singlet")
    pd = gm.prisoners_dilemma()
    g = gf.g1()
    ta = tb = math.pi / 3
    analytic = cg.payoff_at_angles(cg.CorrelationGame(pd, g, model), ta, tb)
    print(f"analytic <ac>={model.corr_vs_z(ta):.6f} payoffs={analytic}")
    print("seed,ac,cb,P_A,P_B,seconds")
    for seed in range(args.seeds):
        t0 = time.perf_counter()
        cfg = epr.ProtocolConfig(ta, tb, 0.5, 0.5, model, runs=args.runs, seed=seed)
        rep = epr.arbiter_report(epr.run_protocol(cfg, workers=args.workers))
        pa, pb = epr.reward(rep, pd, g)
        print(f"{seed},{rep.correlations['ac']:.5f},{rep.correlations['cb']:.5f},{pa:.4f},{pb:.4f},"
              f"{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
