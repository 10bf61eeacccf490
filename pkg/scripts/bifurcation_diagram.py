#!/usr/bin/env python3
"""Bifurcation-diagram dataset for the dirichlet problem on (0, pi/2).

Sweeps lambda through the critical value and records every steady state
found per value (amplitude, norm, Morse index) as CSV.  With --mu > 0 the
quadratic term is included and the sweep traces the transcritical pair
instead of the pitchfork.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from shbif.dynamics import Params
from shbif.linear_analysis import principal
from shbif.spectral import Domain
from shbif.steady import find_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.0)
    ap.add_argument("--lambda-min", type=float, default=8.5)
    ap.add_argument("--lambda-max", type=float, default=9.6)
    ap.add_argument("--steps", type=int, default=23)
    ap.add_argument("--nseeds", type=int, default=20)
    ap.add_argument("--out", default="out/bifurcation-diagram.csv")
    args = ap.parse_args()

    d = Domain.make(1, math.pi / 2, "dirichlet", grid_n=64, band=16)
    crit = principal(d).critical_modes[0]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        fh.write("lambda,state_id,critical_amplitude,l2_norm,morse_index\n")
        for lam in np.linspace(args.lambda_min, args.lambda_max, args.steps):
            lam = float(lam)
            states = find_all(d, Params(lam, args.mu),
                              n_seeds=args.nseeds, rng_seed=1,
                              dedup="exact" if args.mu == 0 else "symmetry")
            for i, s in enumerate(states):
                fh.write(f"{lam!r},{i},{s.state.coeff(crit)!r},"
                         f"{s.norm!r},{s.morse_index}\n")
            print(f"lambda={lam:.3f}: {len(states)} states")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
