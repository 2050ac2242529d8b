"""Render a few windows of the default model: the first two discs, a close
view of D_0 with its sub-disc, and the witness annuli near the origin.

    python3 scripts/render_default.py [--out-dir renders] [--px 600]
"""
import argparse
from pathlib import Path

from baker_lab import Model, ModelParams
from baker_lab.render import RenderSpec, render_array, write_image


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default="renders")
    ap.add_argument("--px", type=int, default=600)
    ap.add_argument("--format", choices=("ppm", "png"), default="ppm")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = Model(ModelParams.from_rho(2.0)).build_all()
    P = model.params
    c0, r0 = P.disc(0)
    s0 = model.level(0).subdiscs[0]
    views = {
        "skeleton": RenderSpec(center=0j, width=2.2 * P.mu, height=2.2 * P.mu, overlays=("discs", "annuli")),
        "disc0": RenderSpec(center=c0, width=2.4 * r0, height=2.4 * r0, overlays=("discs", "subdiscs", "critical")),
        "subdisc0": RenderSpec(center=s0.centre, width=2.4 * s0.radius, height=2.4 * s0.radius,
                               overlays=("subdiscs", "critical")),
        "witness": RenderSpec(center=0j, width=5.0, height=5.0, overlays=("witness",)),
    }
    for name, spec in views.items():
        spec = RenderSpec(**{**spec.__dict__, "px_width": args.px, "px_height": args.px})
        path = out / f"{name}.{args.format}"
        write_image(render_array(model, spec), path, args.format)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
