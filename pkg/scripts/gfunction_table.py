#!/usr/bin/env python3
"""Tabulate every built-in g, its effective probability under the singlet, and invertibility."""

from __future__ import annotations

import numpy as np

from eprgames import gfunctions as gf


def main() -> None:
    thetas = np.linspace(0, np.pi, 9)
    for name in sorted(gf.BUILTINS):
        g = gf.builtin(name)
        vals = g.eval(thetas)
        quantum = gf.big_G(g, -np.cos(thetas))
        print(f"{name} invertible={g.invertible()} breakpoints={[round(b, 4) for b in g.breakpoints()]}")
        print("  g:       " + " ".join(f"{v:.3f}" for v in vals))
        print("  quantum: " + " ".join(f"{v:.3f}" for v in quantum))


if __name__ == "__main__":
    main()
