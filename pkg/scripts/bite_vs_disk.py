#!/usr/bin/env python3
"""Candidate perimeters inside a flat unit disk as the volume approaches |C_1|.

Lists every candidate family (pole disk, complement annulus, boundary bite)
for volumes close to pi, showing that the pole disk stays optimal.
"""

import argparse
import math

import numpy as np

from isoprofile import _io
from isoprofile.profile import sublevel_profile_candidates
from isoprofile.surface import catalog_surface, pole_ball_volume


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--surface", default="plane")
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--fractions", type=float, nargs="*",
                    default=list(np.linspace(0.1, 0.99, 10)) + [1 - 0.01 / math.pi])
    args = ap.parse_args()

    W = catalog_surface(args.surface)
    V = pole_ball_volume(W, args.rho)
    rows = []
    for frac in args.fractions:
        v = frac * V
        val, best, cands = sublevel_profile_candidates(W, args.rho, v)
        per = {c.kind: c.perimeter for c in cands}
        rows.append((v, val, best.kind, per.get("PoleDisk"), per.get("ComplementAnnulus"),
                     per.get("BoundaryBite"), per.get("InteriorBall")))
    print(_io.dumps_csv(("v", "I", "best", "PoleDisk", "ComplementAnnulus", "BoundaryBite",
                         "InteriorBall"), rows, f"{args.surface} rho={args.rho}"), end="")


if __name__ == "__main__":
    main()
