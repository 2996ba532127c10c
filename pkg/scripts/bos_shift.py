#!/usr/bin/env python3
"""Where the Battle of the Sexes mixed equilibrium lands for each built-in g."""

from __future__ import annotations

from eprgames import correlation as cg
from eprgames import gfunctions as gf
from eprgames.errors import NoEquilibriumError


def main() -> None:
    print("g,p_a,p_b,theta_a,bifurcated")
    for name in sorted(gf.BUILTINS):
        g = gf.builtin(name)
        try:
            res = cg.bos_quantum_mixed_ne(2, 1, 0, g)
        except NoEquilibriumError as exc:
            print(f"{name},,,,unreachable: {exc}")
            continue
        p = res.profiles[0]
        thetas = ";".join(f"{s.theta:.6f}" for s in res.components_a)
        print(f"{name},{p.p_a:.6f},{p.p_b:.6f},{thetas},{res.bifurcated}")


if __name__ == "__main__":
    main()
