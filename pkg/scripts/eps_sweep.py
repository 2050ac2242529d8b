"""How the selected perturbation size and the measured dilatation on the
interpolation annulus depend on K, for the level-0 model of rho = 2.

    python3 scripts/eps_sweep.py [--K 1.005 1.05 1.5 3]
"""
import argparse

from baker_lab import ModelParams, build_level
from baker_lab.local_model import interpolation_dilatation


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--K", type=float, nargs="+", default=[1.005, 1.01, 1.05, 1.2, 1.5, 2.0, 3.0])
    args = ap.parse_args()
    print(f"{'K':>8} {'(K-1)/(K+1)':>12} {'eps':>12} {'|mu| on X_0':>12} {'2 eps: |mu|':>12}")
    for K in args.K:
        params = ModelParams.from_rho(2.0, K=K)
        spec = build_level(0, params).subdiscs[0].spec
        d1 = interpolation_dilatation(spec.alpha, spec.eps, spec.eta_ratio)
        d2 = interpolation_dilatation(spec.alpha, 2 * spec.eps, spec.eta_ratio)
        print(f"{K:8.3f} {params.dilatation_bound:12.5f} {spec.eps:12.4e} {d1:12.5f} {d2:12.5f}")


if __name__ == "__main__":
    main()
