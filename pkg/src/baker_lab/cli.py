"""Command-line front end: ``baker-lab {plan,build,verify,orbit,render}``."""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time

from . import __version__
from . import modelfile
from .dynamics import iterate
from .errors import (BakerLabError, CapExceeded, EpsSearchExhausted, InvalidParameter, ModelFileError,
                     RadiusCollapse)
from .geometry import (DEFAULT_J_MAX, DEFAULT_TEICH_CONSTANT, ModelParams, choose_mu, default_base_disc,
                       teichmuller_modulus_bound)
from .tower import Model

COMPLEX_GRAMMAR = """complex numbers: a, bi, a+bi or a-bi (i or j as the imaginary unit,
whitespace allowed around the sign), e.g. '2', '-3.5e2 + 1i', '-i'"""


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi``; floats are read exactly."""
    s = "".join(text.split())
    if s[-1:] == "i":
        s = s[:-1] + "j"
    try:
        if "i" in s or not s:
            raise ValueError
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


# ---------------------------------------------------------------- commands

def cmd_plan(args) -> int:
    lam = teichmuller_modulus_bound(args.rho, args.teich_constant)
    mu = choose_mu(args.rho, args.teich_constant)
    zeta0, r0 = default_base_disc(mu)
    plan = {
        "rho": args.rho,
        "teich_constant": args.teich_constant,
        "Lambda_hat": lam,
        "mu": mu,
        "half_log_mu": math.log(mu) / 2,
        "zeta0": format_complex(zeta0),
        "r0": r0,
        "witness_annuli": [{"j": j, "R": mu**j, "outer": args.rho * mu**j} for j in range(3)],
    }
    if args.json:
        print(json.dumps(plan))
        return 0
    print(f"Lambda_hat(rho)   = {lam!r}")
    print(f"mu                = {mu!r}")
    print(f"(log mu)/2        = {math.log(mu) / 2!r}  (>= Lambda_hat)")
    print(f"base disc D_0     = D({format_complex(zeta0)}, {r0!r})")
    for w in plan["witness_annuli"]:
        print(f"witness annulus j={w['j']}: {w['R']!r} < |z| < {w['outer']!r}")
    return 0


def _params_from_args(args) -> ModelParams:
    if (args.zeta0 is None) != (args.r0 is None):
        raise InvalidParameter("--zeta0 and --r0 must be given together")
    return ModelParams.from_rho(args.rho, K=args.K, j_max=args.levels, teich_constant=args.teich_constant,
                                zeta0=args.zeta0, r0=args.r0)


def cmd_build(args) -> int:
    params = _params_from_args(args)
    model = Model(params)
    t0 = time.perf_counter()
    if not args.lazy:
        model.build_all()
    elapsed = time.perf_counter() - t0
    modelfile.save(model, args.out, lazy=args.lazy)
    n = model.n_local_models
    rel = [min(s.clearance.values()) / abs(s.centre) for lv in model.built_levels for s in lv.subdiscs]
    print(f"wrote {args.out}: levels 0..{params.j_max}{' (lazy)' if args.lazy else ''}, "
          f"{n} local models, {n} poles, min relative clearance {min(rel) if rel else float('nan'):.3e}, "
          f"built in {elapsed:.2f} s")
    print(f"fingerprint {modelfile.fingerprint(model)}")
    return 0


def cmd_verify(args) -> int:
    from .verification import verify_model

    model = modelfile.load(args.model)
    report = verify_model(model, samples=args.samples, seed=args.seed, threads=args.threads)
    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    failing = report.failing()
    for e in failing:
        print(f"FAIL {e.check}: worst={e.worst!r} {e.cmp} tol={e.tol!r} ({e.anchor})", file=sys.stderr)
    print(f"{len(report.entries) - len(failing)}/{len(report.entries)} checks passed; "
          f"fingerprint {report.fingerprint}")
    return 0 if report.passed else 1


def _lookup(model: Model, spec: str, what: str) -> complex:
    try:
        j, i = (int(x) for x in spec.split(":"))
    except ValueError as exc:
        raise InvalidParameter(f"--{what} expects LEVEL:INDEX, got {spec!r}") from exc
    lv = model.level(j)
    if what == "critical":
        return lv.crit_points[i]
    sp = lv.subdiscs[i].spec
    if not sp.pole_distinct:
        raise InvalidParameter(f"the pole of model {j}:{i} is closer to its centre than one ulp "
                               "and has no separate double representative")
    return sp.pole


def cmd_orbit(args) -> int:
    model = modelfile.load(args.model)
    starts = list(args.z or [])
    starts += [_lookup(model, s, "critical") for s in args.critical or []]
    starts += [_lookup(model, s, "pole") for s in args.pole or []]
    if not starts:
        raise InvalidParameter("give at least one --z, --critical or --pole")
    for z in starts:
        rec = iterate(z, args.n, model)
        d = rec.to_json()
        d["start_text"] = format_complex(z)
        if args.points:
            d["points"] = [rec_point(p) for p in rec.points]
        print(json.dumps(d))
    return 0


def rec_point(p: complex):
    return "inf" if math.isinf(abs(p)) else [p.real, p.imag]


def cmd_render(args) -> int:
    from .render import RenderSpec, render_array, write_image

    model = modelfile.load(args.model)
    w, h = args.px
    spec = RenderSpec(center=args.center, width=args.width, height=args.height or args.width * h / w,
                      px_width=w, px_height=h, max_iter=args.max_iter,
                      overlays=tuple(x for x in args.overlay.split(",") if x))
    img = render_array(model, spec, threads=args.threads)
    write_image(img, args.out, args.format)
    print(f"wrote {args.out} ({w}x{h})")
    return 0


def _px(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text.strip())
    if not m or int(m.group(1)) < 1 or int(m.group(2)) < 1:
        raise argparse.ArgumentTypeError("resolution must look like 400x300")
    return int(m.group(1)), int(m.group(2))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="baker-lab", description=__doc__, epilog=COMPLEX_GRAMMAR,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"baker-lab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="print mu, Lambda_hat and the default base disc for a ratio rho")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--teich-constant", type=float, default=DEFAULT_TEICH_CONSTANT)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("build", help="construct the model and write a model file", epilog=COMPLEX_GRAMMAR)
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--K", type=float, default=1.5)
    p.add_argument("--levels", type=int, default=DEFAULT_J_MAX, help="level cap j_max (>= 1)")
    p.add_argument("--teich-constant", type=float, default=DEFAULT_TEICH_CONSTANT)
    p.add_argument("--zeta0", type=parse_complex, default=None)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--lazy", action="store_true", help="store parameters only; levels are built on use")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run every audit; exit status 0 iff all pass")
    p.add_argument("model")
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="iterate F and print JSON lines", epilog=COMPLEX_GRAMMAR)
    p.add_argument("model")
    p.add_argument("--z", type=parse_complex, action="append")
    p.add_argument("--critical", action="append", metavar="LEVEL:INDEX")
    p.add_argument("--pole", action="append", metavar="LEVEL:INDEX")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--points", action="store_true", help="include the whole orbit")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("render", help="classification image (PPM P6, or PNG with Pillow)", epilog=COMPLEX_GRAMMAR)
    p.add_argument("model")
    p.add_argument("--out", required=True)
    p.add_argument("--center", type=parse_complex, default=0j)
    p.add_argument("--width", type=float, default=2400.0)
    p.add_argument("--height", type=float, default=None)
    p.add_argument("--px", type=_px, default=(400, 400))
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--overlay", default="discs,subdiscs,critical",
                   help="comma list from discs,subdiscs,annuli,witness,critical")
    p.add_argument("--format", choices=("ppm", "png"), default=None)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EpsSearchExhausted, RadiusCollapse) as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return 3
    except (InvalidParameter, ModelFileError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BakerLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
