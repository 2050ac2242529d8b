import numpy as np
import pytest

from baker_lab import InvalidParameter
from baker_lab.dynamics import CLASSES, ESCAPING, PERIOD2, classify_array
from baker_lab.render import CLASS_COLOURS, RenderSpec, encode_ppm, render_array


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        RenderSpec(width=0)
    with pytest.raises(InvalidParameter):
        RenderSpec(px_width=0)
    with pytest.raises(InvalidParameter):
        RenderSpec(overlays=("nope",))
    with pytest.raises(InvalidParameter):
        RenderSpec(max_iter=0)


def test_pixel_centres():
    spec = RenderSpec(center=1 + 1j, width=4, height=2, px_width=4, px_height=2)
    z = spec.row_coords(range(2))
    assert z[0, 0] == complex(-0.5, 1.5)
    assert z[1, 3] == complex(2.5, 0.5)


def test_witness_annulus_pixels_escape(default_model):
    # window straddling the witness annulus 1024 < |z| < 2048 on the negative axis
    spec = RenderSpec(center=-1536 + 0j, width=1000, height=1000, px_width=40, px_height=40, overlays=())
    z = spec.row_coords(range(40))
    cls = classify_array(z, 60, default_model)
    inside = (np.abs(z) > 1024) & (np.abs(z) < 2048)
    assert inside.sum() > 100
    assert np.all(cls[inside] == CLASSES.index(ESCAPING))


def test_critical_overlay_shows_cycle_colour(default_model):
    c = default_model.level(0).crit_points[0]
    spec = RenderSpec(center=c, width=2.0, height=2.0, px_width=9, px_height=9, overlays=("critical",))
    img = render_array(default_model, spec, threads=2)
    assert tuple(img[4, 4]) == CLASS_COLOURS[PERIOD2]


def test_render_threads_do_not_change_pixels(small_model):
    spec = RenderSpec(center=-181 + 0j, width=200, height=100, px_width=30, px_height=17,
                      overlays=("discs", "subdiscs", "annuli", "witness", "critical"))
    a = render_array(small_model, spec, threads=1)
    b = render_array(small_model, spec, threads=4)
    assert a.shape == (17, 30, 3) and a.dtype == np.uint8
    assert np.array_equal(a, b)
    assert encode_ppm(a) == encode_ppm(b)
