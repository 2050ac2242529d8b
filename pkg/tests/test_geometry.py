import math

import numpy as np
import pytest

from baker_lab.errors import InvalidParameter
from baker_lab.geometry import (DEFAULT_TEICH_CONSTANT, ModelParams, RoundAnnulus, choose_mu, default_base_disc,
                                placement_problems, teichmuller_modulus_bound, u0_contains, u0_mask)


def brute_u0(z, mu, jmax=60):
    if z.real >= 0:
        return True
    return any(mu**j <= abs(z) <= mu ** (j + 0.5) for j in range(jmax))


# the defining union puts 1 <= |z| <= 2 inside U0 and 2 < |z| < 4 (where D_0 sits) outside it
@pytest.mark.parametrize("z,expected", [(1 + 5j, True), (-1.5 + 0j, True), (-3 + 0j, False), (-0.5 + 0j, False),
                                        (-4 + 0j, True)])
def test_u0_contains_examples(z, expected):
    assert u0_contains(z, 4.0) is expected
    assert brute_u0(z, 4.0) is expected


def test_u0_contains_matches_brute_force_scan():
    rng = np.random.default_rng(1)
    for mu in (4.0, 16.0, 1024.0):
        mod = np.exp(rng.uniform(-3, 6 * math.log(mu), 3000))
        z = mod * np.exp(1j * rng.uniform(0, 2 * np.pi, 3000))
        mine = [u0_contains(complex(x), mu) for x in z]
        assert mine == [brute_u0(complex(x), mu) for x in z]
        assert list(u0_mask(z, mu)) == mine


def test_u0_boundaries_are_closed():
    mu = 1024.0
    for j in range(5):
        assert u0_contains(complex(-(mu**j)), mu)
        assert u0_contains(complex(-(mu ** (j + 0.5))), mu)
        assert not u0_contains(complex(-(mu ** (j + 0.5)) * (1 + 1e-12)), mu)
    assert u0_contains(1j * 0.0 + 0.0, mu)
    assert not u0_contains(-0.5 + 0j, mu)


def test_u0_near_overflow():
    assert u0_contains(complex(-1.7e308), 1024.0)
    with pytest.raises(InvalidParameter):
        u0_contains(complex(-math.inf), 1024.0)


def test_modulus_bound_examples():
    assert teichmuller_modulus_bound(2.0) == pytest.approx(math.log(32.0), abs=1e-15)
    assert teichmuller_modulus_bound(2.0) == pytest.approx(3.4657, abs=1e-4)
    rhos = np.linspace(1.001, 50, 200)
    vals = [teichmuller_modulus_bound(r) for r in rhos]
    assert all(v > math.log(r) for v, r in zip(vals, rhos))
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("rho", [1.0, 0.5, -2.0])
def test_rho_must_exceed_one(rho):
    with pytest.raises(InvalidParameter):
        teichmuller_modulus_bound(rho)
    with pytest.raises(InvalidParameter):
        choose_mu(rho)


def test_choose_mu_default_is_1024():
    # exp(2 log 32) = 32**2
    assert choose_mu(2.0) == 1024.0
    assert DEFAULT_TEICH_CONSTANT == math.log(16.0)


def test_choose_mu_defining_inequality_and_monotone():
    rhos = np.linspace(1.01, 40, 300)
    mus = [choose_mu(r) for r in rhos]
    for r, mu in zip(rhos, mus):
        assert math.log(mu) / 2 >= teichmuller_modulus_bound(r)
        assert math.sqrt(mu) >= r
    assert all(b > a for a, b in zip(mus, mus[1:]))


def test_default_base_disc_mu16():
    zeta0, r0 = default_base_disc(16.0)
    assert zeta0 == -8 + 0j
    assert r0 == 2.0


@pytest.mark.parametrize("mu", [4.0, 16.0, 1024.0, 1e6])
def test_default_base_disc_placement(mu):
    zeta0, r0 = default_base_disc(mu)
    t = np.linspace(0, 2 * np.pi, 2048)
    edge = zeta0 + r0 * np.exp(1j * t)
    assert np.all(edge.real < 0)
    assert np.all(np.abs(edge) > math.sqrt(mu))
    assert np.all(np.abs(edge) < mu)
    assert not np.any(u0_mask(edge, mu))


def test_model_params_rejects_bad_values():
    mu = 1024.0
    z0, r0 = default_base_disc(mu)
    good = dict(mu=mu, rho=2.0, K=1.5, zeta0=z0, r0=r0)
    ModelParams(**good)
    for key, bad in [("mu", 1.0), ("rho", 1.0), ("K", 1.0), ("r0", 0.0), ("j_max", 0)]:
        with pytest.raises(InvalidParameter):
            ModelParams(**{**good, key: bad})
    with pytest.raises(InvalidParameter, match="sqrt"):
        ModelParams(**{**good, "r0": 1.05 * (abs(z0) - math.sqrt(mu))})
    with pytest.raises(InvalidParameter):
        ModelParams.from_rho(2.0, zeta0=-100 + 0j)


def test_unvalidated_params_report_problems():
    mu = 1024.0
    z0, _ = default_base_disc(mu)
    P = ModelParams(mu=mu, rho=2.0, K=1.5, zeta0=z0, r0=170.0, validate=False)
    assert placement_problems(P)


def test_disc_chain_avoids_annuli_and_is_disjoint(default_params):
    P = default_params
    mu = P.mu
    for j in range(P.j_max + 1):
        c, r = P.disc(j)
        assert abs(c) - r > mu ** (j + 0.5)
        assert abs(c) + r < mu ** (j + 1)
        c1, r1 = P.disc(j + 1)
        assert abs(c1) - r1 > abs(c) + r


def test_skeleton_annulus_samples(default_params):
    P = default_params
    rng = np.random.default_rng(3)
    for j in range(P.j_max + 1):
        mod = P.mu ** (j + rng.uniform(0, 0.5, 500))
        z = mod * np.exp(1j * rng.uniform(0, 2 * np.pi, 500))
        assert np.all(u0_mask(z, P.mu))
        assert np.all(P.disc_level_array(z) == -1)


def test_f0_maps_u0_into_u0(default_params):
    mu = default_params.mu
    rng = np.random.default_rng(5)
    z = np.exp(rng.uniform(-5, 25, 20000)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 20000))
    z = z[u0_mask(z, mu)][:10000]
    assert z.size == 10000
    assert np.all(u0_mask(mu * z, mu))


def test_disc_level_lookup(default_params):
    P = default_params
    for j in range(P.j_max + 1):
        c, r = P.disc(j)
        assert P.disc_level(c) == j
        assert P.disc_level(c + 0.999 * r) == j
        assert P.disc_level(c + 1.001 * r) is None
    assert P.disc_level(1 + 0j) is None
    assert P.disc_level(0j) is None
    z = np.array([P.disc(3)[0], 1.0, P.disc(0)[0] + 1j])
    assert list(P.disc_level_array(z)) == [3, -1, 0]


def test_round_annulus():
    A = RoundAnnulus(1024.0, 2.0)
    assert A.outer == 2048.0
    assert A.modulus == math.log(2.0)
    assert A.contains(-1500 + 0j) and not A.contains(1024 + 0j)
    with pytest.raises(InvalidParameter):
        RoundAnnulus(1.0, 1.0)
