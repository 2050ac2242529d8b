"""Classify every stored critical point, its partner and a ring of nearby
points, and tabulate the orbit classes per level.

    python3 scripts/orbit_census.py [--levels 8] [--ring 1e-3]
"""
import argparse
from collections import Counter

import numpy as np

from baker_lab import Model, ModelParams, eval_F
from baker_lab.dynamics import CLASSES, classify_array


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--levels", type=int, default=8)
    ap.add_argument("--ring", type=float, default=0.05, help="ring radius as a fraction of the sub-disc radius")
    ap.add_argument("--max-iter", type=int, default=60)
    args = ap.parse_args()
    model = Model(ModelParams.from_rho(2.0, j_max=args.levels)).build_all()
    t = np.exp(2j * np.pi * np.arange(16) / 16)
    for lv in model.built_levels:
        crit = np.array(lv.crit_points)
        partners = np.array([eval_F(c, model) for c in crit])
        ring = (lv.arrays["zeta"][:, None] + args.ring * lv.arrays["r"][:, None] * t[None, :]).ravel()
        for name, pts in (("critical", crit), ("partners", partners), ("rings", ring)):
            counts = Counter(CLASSES[k] for k in classify_array(pts, args.max_iter, model).ravel())
            print(f"level {lv.j} {name:9s} " + ", ".join(f"{k}: {v}" for k, v in sorted(counts.items())))


if __name__ == "__main__":
    main()
