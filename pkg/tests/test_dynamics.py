import math

import numpy as np
import pytest

from baker_lab import eval_F, iterate, verify_superattracting
from baker_lab.dynamics import (CAP, CLASSES, ESCAPING, PERIOD2, POLE, UNDECIDED, check_forward_images,
                                classify_array, contraction_ratio, eval_F_array, local_contraction_scale)
from baker_lab.errors import CapExceeded
from baker_lab.local_model import is_infinite


def test_eval_F_examples(default_model):
    mu = default_model.params.mu
    assert eval_F(1, default_model) == mu
    assert eval_F(default_model.params.zeta0, default_model) == 0
    spec = default_model.level(0).subdiscs[0].spec
    assert spec.pole_distinct
    assert is_infinite(eval_F(spec.pole, default_model))


def test_eval_F_beyond_cap_raises(small_model):
    c, r = small_model.params.disc(5)
    with pytest.raises(CapExceeded):
        eval_F(c, small_model)


def test_iterate_escaping_exact(default_model):
    mu = default_model.params.mu
    rec = iterate(2, 20, default_model)
    assert rec.classification == ESCAPING
    assert all(p == 2 * mu**n for n, p in enumerate(rec.points))
    assert abs(rec.final) > mu**default_model.params.j_max


def test_anchor_orbit(default_model):
    rec = iterate(default_model.params.zeta0, 10, default_model)
    assert rec.points[:3] == [default_model.params.zeta0, 0, 0]
    assert rec.classification == PERIOD2
    assert rec.cycle == (0, 0)


def test_pole_terminates(default_model):
    spec = default_model.level(1).subdiscs[1].spec
    rec = iterate(spec.pole, 10, default_model)
    assert rec.classification == POLE
    assert rec.iterations == 1


@pytest.mark.parametrize("j", range(8))
def test_critical_points_are_period_two(default_model, j):
    for c in default_model.level(j).crit_points:
        omega = eval_F(c, default_model)
        assert abs(eval_F(omega, default_model) - c) <= 1e-9 * max(1.0, abs(c))
        rec = iterate(c, 10, default_model)
        assert rec.classification == PERIOD2
        assert rec.cycle == (c, omega)


@pytest.mark.parametrize("j", range(7))
def test_superattraction_levels_up_to_six(default_model, j):
    for c in default_model.level(j).crit_points:
        rep = verify_superattracting(c, default_model)
        assert rep.passed, rep
        assert rep.partner_exact
        assert 0.2 <= rep.ratio <= 5.0


def test_superattraction_needs_stored_critical_point(default_model):
    c = default_model.level(2).crit_points[3]
    rep = verify_superattracting(c, default_model, steps=(1e-3, 1e-4), strict=True)
    assert rep.passed
    with pytest.raises(KeyError):
        verify_superattracting(c + rep.scale, default_model)


def test_conformal_point_fails_quadratic_test(default_model):
    P = default_model.params
    c, r = P.disc(1)
    # a V_1 point well away from the two sub-discs
    z = c + 0.9 * r * 1j
    assert default_model.region_of(z, 1) == "V"
    ratio = contraction_ratio(z, default_model, h0=1e-3 * r)
    # q(h) scales like 1/h for a conformal point: ratio near 10, outside [0.2, 5]
    assert ratio == pytest.approx(10.0, rel=1e-3)


def test_critical_point_passes_plain_contraction(default_model):
    c = default_model.level(0).crit_points[0]
    h0 = local_contraction_scale(default_model, 0, 0)
    ratio = contraction_ratio(c, default_model, h0)
    assert 0.2 <= ratio <= 5.0


def test_forward_images_level0(default_model):
    rep = check_forward_images(0, 4, 10_000, default_model, seed=0)
    assert rep.passed, rep.violations[:3]


def test_forward_images_respects_cap(small_model):
    with pytest.raises(CapExceeded):
        check_forward_images(1, 3, 10, small_model)


def test_gap_orbit_is_undecided(default_model):
    # left half-plane, off the skeleton annuli and off every disc
    P = default_model.params
    z = -math.sqrt(P.mu) * 1.01 * np.exp(0.3j)
    assert default_model.locate(z) is None
    rec = iterate(z, 50, default_model)
    assert rec.classification == UNDECIDED
    # orbits in the gap overflow long before 200 steps; that is not a pole
    rec = iterate(z, 200, default_model)
    assert rec.classification == UNDECIDED
    assert classify_array(np.array([z]), 200, default_model)[0] == CLASSES.index(UNDECIDED)


def test_cap_exceeded_orbit(small_model):
    c, _ = small_model.params.disc(5)
    assert iterate(c, 5, small_model).classification == CAP


def test_eval_F_array_matches_scalar(default_model):
    P = default_model.params
    rng = np.random.default_rng(11)
    pts = []
    for j in range(P.j_max + 1):
        lv = default_model.level(j)
        a = lv.arrays
        k = rng.integers(len(lv.subdiscs), size=400)
        s = np.sqrt(rng.uniform(size=400)) * 1.2
        pts.append(a["zeta"][k] + a["r"][k] * s * np.exp(2j * np.pi * rng.uniform(size=400)))
        c, r = P.disc(j)
        pts.append(c + r * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100)))
    pts.append(rng.normal(size=200) * 1e4 + 1j * rng.normal(size=200) * 1e4)
    z = np.concatenate(pts)
    arr = eval_F_array(z, default_model)
    ref = np.array([eval_F(complex(x), default_model) for x in z])
    assert np.array_equal(arr, ref)


def test_classify_array_agrees_with_iterate(default_model):
    P = default_model.params
    rng = np.random.default_rng(3)
    lv = default_model.level(1)
    a = lv.arrays
    z = np.concatenate([
        rng.uniform(-3 * P.mu, 3 * P.mu, 300) + 1j * rng.uniform(-3 * P.mu, 3 * P.mu, 300),
        np.array(default_model.level(2).crit_points),
        a["zeta"][0] + a["r"][0] * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100)),
        np.array([P.zeta0, 2, a["pole"][1]]),
    ])
    got = classify_array(z, 40, default_model)
    want = [CLASSES.index(iterate(complex(x), 40, default_model).classification) for x in z]
    assert got.tolist() == want


def test_orbit_record_json(default_model):
    spec = default_model.level(0).subdiscs[0].spec
    d = iterate(spec.pole, 3, default_model).to_json()
    assert d["classification"] == POLE and d["final"] == "inf"
    d = iterate(default_model.level(0).crit_points[0], 5, default_model).to_json()
    assert len(d["cycle"]) == 2
