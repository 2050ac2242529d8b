"""Classification images of the plane under F.

Each pixel centre is iterated and coloured by its orbit class. The
attracting basins of the critical 2-cycles are far below pixel size (F
expands by roughly ``mu*alpha**2/eps`` next to a cycle point), so stored
critical points are drawn as an overlay coloured by their own orbit class.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import CLASSES, CAP, ESCAPING, PERIOD2, POLE, UNDECIDED, classify_array, iterate
from .errors import InvalidParameter
from .tower import Model
from .verification import n_threads

OVERLAYS = ("discs", "subdiscs", "annuli", "witness", "critical")

CLASS_COLOURS = {
    ESCAPING: (40, 90, 200),
    PERIOD2: (240, 200, 40),
    POLE: (200, 30, 30),
    CAP: (110, 110, 110),
    UNDECIDED: (0, 0, 0),
}
OVERLAY_COLOURS = {
    "discs": (255, 255, 255),
    "subdiscs": (255, 120, 0),
    "annuli": (120, 220, 255),
    "witness": (60, 200, 90),
}


@dataclass(frozen=True)
class RenderSpec:
    center: complex = 0j
    width: float = 2400.0
    height: float = 2400.0
    px_width: int = 400
    px_height: int = 400
    max_iter: int = 60
    overlays: tuple[str, ...] = ("discs", "subdiscs", "critical")
    colours: dict = field(default_factory=lambda: dict(CLASS_COLOURS))

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0 and math.isfinite(self.width) and math.isfinite(self.height)):
            raise InvalidParameter("window extents must be positive and finite")
        if not (self.px_width > 0 and self.px_height > 0):
            raise InvalidParameter("resolution must be positive")
        if self.max_iter < 1:
            raise InvalidParameter("max_iter must be >= 1")
        bad = set(self.overlays) - set(OVERLAYS)
        if bad:
            raise InvalidParameter(f"unknown overlays {sorted(bad)}; choose from {OVERLAYS}")

    @property
    def pixel_size(self) -> float:
        return max(self.width / self.px_width, self.height / self.px_height)

    def row_coords(self, rows) -> np.ndarray:
        """Pixel-centre coordinates for the given rows (row 0 at the top)."""
        x = self.center.real - self.width / 2 + (np.arange(self.px_width) + 0.5) * (self.width / self.px_width)
        y = self.center.imag + self.height / 2 - (np.asarray(rows) + 0.5) * (self.height / self.px_height)
        return x[None, :] + 1j * y[:, None]


def classify_rows(model: Model, spec: RenderSpec, rows) -> np.ndarray:
    return classify_array(spec.row_coords(rows), spec.max_iter, model)


def _ring(z: np.ndarray, centre: complex, radius: float, tol: float) -> np.ndarray:
    return np.abs(np.abs(z - centre) - radius) <= tol


def render_array(model: Model, spec: RenderSpec, threads: int | None = None) -> np.ndarray:
    """RGB image as a ``(px_height, px_width, 3)`` uint8 array."""
    threads = threads or n_threads()
    chunk = max(1, spec.px_height // (4 * threads))
    blocks = [range(i, min(i + chunk, spec.px_height)) for i in range(0, spec.px_height, chunk)]
    # levels are built up front so workers only read
    model.build_all()
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(lambda rows: classify_rows(model, spec, rows), blocks))
    cls = np.concatenate(parts, axis=0)
    lut = np.array([spec.colours[c] for c in CLASSES], dtype=np.uint8)
    img = lut[cls]
    _draw_overlays(img, model, spec)
    return img


def _draw_overlays(img: np.ndarray, model: Model, spec: RenderSpec) -> None:
    z = spec.row_coords(range(spec.px_height))
    tol = spec.pixel_size * 0.75
    P = model.params
    mu = P.mu
    if "annuli" in spec.overlays or "witness" in spec.overlays:
        for j in range(P.j_max + 1):
            if "annuli" in spec.overlays:
                for rad in (mu**j, mu ** (j + 0.5)):
                    img[_ring(z, 0j, rad, tol)] = OVERLAY_COLOURS["annuli"]
            if "witness" in spec.overlays:
                for rad in (mu**j, P.rho * mu**j):
                    img[_ring(z, 0j, rad, tol)] = OVERLAY_COLOURS["witness"]
    if "discs" in spec.overlays:
        for j in range(P.j_max + 1):
            c, r = P.disc(j)
            img[_ring(z, c, r, tol)] = OVERLAY_COLOURS["discs"]
    if "subdiscs" in spec.overlays:
        for lv in model.built_levels:
            for s in lv.subdiscs:
                if s.radius >= spec.pixel_size:
                    img[_ring(z, s.centre, s.radius, tol)] = OVERLAY_COLOURS["subdiscs"]
                    img[_ring(z, s.centre, s.eta, tol)] = OVERLAY_COLOURS["subdiscs"]
    if "critical" in spec.overlays:
        x0 = spec.center.real - spec.width / 2
        y0 = spec.center.imag + spec.height / 2
        for lv in model.built_levels:
            for c in lv.crit_points:
                col = int(math.floor((c.real - x0) / (spec.width / spec.px_width)))
                row = int(math.floor((y0 - c.imag) / (spec.height / spec.px_height)))
                if 0 <= row < spec.px_height and 0 <= col < spec.px_width:
                    img[row, col] = spec.colours[iterate(c, spec.max_iter, model).classification]


def encode_ppm(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def write_image(img: np.ndarray, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = (fmt or ("png" if path.suffix.lower() == ".png" else "ppm")).lower()
    if fmt == "ppm":
        path.write_bytes(encode_ppm(img))
    elif fmt == "png":
        try:
            from PIL import Image
        except ImportError as exc:  # optional dependency
            raise InvalidParameter("PNG output needs Pillow (pip install baker-lab[png])") from exc
        Image.fromarray(img, "RGB").save(path, format="PNG")
    else:
        raise InvalidParameter(f"unknown image format {fmt!r}")
