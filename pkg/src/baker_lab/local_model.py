"""Single-disc surgery: a rational local model glued into ``f0`` on a round disc.

On ``Delta = D(zeta, r)`` write ``z = zeta + r*w``. In these unit coordinates
the modified map is ``mu * r * Phi(w) + mu * zeta`` where

* ``Phi(w) = w + eps / (w - p)`` on ``|w| <= eta/r`` (meromorphic piece,
  ``p = -eps/alpha``), and
* ``Phi(s*u) = lam(s) * u + (1 - lam(s)) * Phi(eta/r * u)`` on the annulus,
  the linear interpolation along each radius, ``lam = (s - eta/r)/(1 - eta/r)``.

Expanding the interpolation gives ``Phi(w) = w + (1 - lam) * E(u)`` with
``E(u) = eps/(eta/r * u - p)``, so the map equals ``f0`` plus a correction
which vanishes identically on ``|w| = 1``. All evaluators use that form; it
is algebraically the same map and keeps glueing exact in floating point.

Unit-coordinate quantities (``Phi``, its Beltrami coefficient, critical
points) are independent of where the disc sits in the plane, which is what
makes audits of deep levels possible in double precision.
"""
from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import EpsSearchExhausted, InvalidParameter, NearPole

INF = complex(math.inf, 0.0)

FD_STEP = 1e-5
BELTRAMI_SAFETY = 1e-3
N_THETA = 512
N_RADIAL = 64


def is_infinite(v: complex) -> bool:
    return cmath.isinf(v)


@dataclass(frozen=True)
class LocalModelSpec:
    zeta: complex
    r: float
    eta: float
    theta: float
    a: complex
    alpha: complex
    eps: float
    p: complex
    mu: float

    @property
    def eta_ratio(self) -> float:
        return self.eta / self.r

    @property
    def b(self) -> complex:
        """``a - mu*zeta``; equals ``mu * r * alpha``."""
        return self.a - self.mu * self.zeta

    @property
    def pole(self) -> complex:
        """Double representative of the pole in plane coordinates.

        Deep in the tower ``r*p`` is below half an ulp of ``zeta`` and this
        rounds to the centre itself; the centre then keeps its finite
        image ``a`` (see :func:`g_eval`).
        """
        return self.zeta + self.r * self.p

    @property
    def pole_distinct(self) -> bool:
        return self.pole != self.zeta

    def critical_unit(self) -> tuple[complex, complex]:
        s = math.sqrt(self.eps)
        return self.p + s, self.p - s

    def critical_value_unit(self) -> tuple[complex, complex]:
        s = 2.0 * math.sqrt(self.eps)
        return self.p + s, self.p - s


def make_spec(zeta: complex, r: float, eta: float, theta: float, a: complex, mu: float, eps: float) -> LocalModelSpec:
    zeta, a = complex(zeta), complex(a)
    alpha = (a - mu * zeta) / (mu * r)
    if alpha == 0:
        raise InvalidParameter("target a equals f0(zeta)")
    return LocalModelSpec(zeta=zeta, r=float(r), eta=float(eta), theta=float(theta), a=a,
                          alpha=alpha, eps=float(eps), p=-eps / alpha, mu=float(mu))


def phi_eval(spec: LocalModelSpec, w: complex) -> complex:
    """``w + eps*alpha/(alpha*w + eps)``; the pole maps to :data:`INF`."""
    if w == spec.p:
        return INF
    den = spec.alpha * w + spec.eps
    if den == 0:
        return INF
    return w + spec.alpha * (spec.eps / den)


def phi_derivative(spec: LocalModelSpec, w: complex) -> complex:
    return 1.0 - spec.eps / (w - spec.p) ** 2


def g_eval(spec: LocalModelSpec, z: complex) -> complex:
    """The glued local map at a plane point of the closed disc."""
    w = (z - spec.zeta) / spec.r
    s = abs(w)
    er = spec.eta_ratio
    if s <= er:
        den = spec.alpha * w + spec.eps
        if den == 0 or (z == spec.pole and spec.pole_distinct):
            return INF
        return spec.mu * z + spec.b * (spec.eps / den)
    if s >= 1.0:
        return spec.mu * z
    lam = (s - er) / (1.0 - er)
    den = spec.alpha * (er * (w / s)) + spec.eps
    return spec.mu * z + (1.0 - lam) * (spec.b * (spec.eps / den))


def cdiv(a, b) -> np.ndarray:
    """Elementwise complex division with the same rounding as Python's
    ``complex.__truediv__`` (Smith's method), so that vectorised and scalar
    evaluation agree bit for bit."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    big = np.abs(br) >= np.abs(bi)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(big, bi / br, br / bi)
        denom = np.where(big, br + bi * ratio, br * ratio + bi)
        re = np.where(big, ar + ai * ratio, ar * ratio + ai) / denom
        im = np.where(big, ai - ar * ratio, ai * ratio - ar) / denom
    return _cplx(re, im)


def _cplx(re, im) -> np.ndarray:
    out = np.empty(np.broadcast(re, im).shape, dtype=complex)
    out.real = re
    out.imag = im
    return out


def _rdiv(a: np.ndarray, x) -> np.ndarray:
    """Complex array over real array, rounded as ``complex / float``."""
    return _cplx(a.real / x, a.imag / x)


def g_eval_array(z, zeta, r, eta_ratio, alpha, eps, b, mu, pole) -> np.ndarray:
    """Vectorised :func:`g_eval` with per-point model parameters (broadcast).

    Pass ``pole = nan`` for models whose pole representative is the centre.
    """
    z = np.asarray(z, dtype=complex)
    w = _rdiv(z - zeta, r)
    # libm hypot, as used by abs(complex); np.abs rounds differently
    s = np.hypot(w.real, w.imag)
    inner = s <= eta_ratio
    with np.errstate(divide="ignore", invalid="ignore"):
        den_in = alpha * w + eps
        corr_in = b * cdiv(eps, den_in)
        u = np.where(s > 0, _rdiv(w, np.where(s > 0, s, 1.0)), 1.0)
        lam = (s - eta_ratio) / (1.0 - eta_ratio)
        den_an = alpha * (eta_ratio * u) + eps
        corr_an = (1.0 - lam) * (b * cdiv(eps, den_an))
    corr = np.where(inner, corr_in, np.where(s >= 1.0, 0.0, corr_an))
    out = mu * z + corr
    hit = inner & ((den_in == 0) | (z == pole))
    return np.where(hit, INF, out)


def unit_map(w, alpha, eps, eta_ratio) -> np.ndarray:
    """``Phi`` in unit coordinates, vectorised; parameters broadcast against w."""
    w = np.asarray(w, dtype=complex)
    s = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        e_in = alpha * (eps / (alpha * w + eps))
        u = np.where(s > 0, _rdiv(w, np.where(s > 0, s, 1.0)), 1.0)
        lam = np.clip((s - eta_ratio) / (1.0 - eta_ratio), 0.0, 1.0)
        e_an = (1.0 - lam) * (alpha * (eps / (alpha * (eta_ratio * u) + eps)))
    return w + np.where(s <= eta_ratio, e_in, e_an)


def critical_data(spec: LocalModelSpec) -> tuple[complex, complex, complex, complex]:
    """Critical points and values ``(c1, c2, v1, v2)`` in plane coordinates.

    The values are *defined* as images of the stored points under
    :func:`g_eval`, so evaluating the glued map at ``c_k`` reproduces
    ``v_k`` bit for bit.
    """
    w1, w2 = spec.critical_unit()
    c1 = spec.zeta + spec.r * w1
    c2 = spec.zeta + spec.r * w2
    return c1, c2, g_eval(spec, c1), g_eval(spec, c2)


def critical_values_closed_form(spec: LocalModelSpec) -> tuple[complex, complex]:
    v1, v2 = spec.critical_value_unit()
    return spec.mu * (spec.zeta + spec.r * v1), spec.mu * (spec.zeta + spec.r * v2)


def critical_offset_image(spec: LocalModelSpec, k: int, delta):
    """``g(c_k + delta) - g(c_k)`` without cancellation.

    Uses ``Phi(w) - Phi(w_c) = (w - w_c)**2 / (w - p)``, valid on the
    meromorphic piece. ``k`` is 0 for ``p + sqrt(eps)``, 1 for ``p - sqrt(eps)``.
    """
    root = math.sqrt(spec.eps) * (1.0 if k == 0 else -1.0)
    return spec.mu * delta * delta / (spec.r * root + delta)


def centre_offset_image(spec: LocalModelSpec, delta):
    """``g(zeta + delta) - a`` without cancellation (meromorphic piece)."""
    w = delta / spec.r
    return spec.mu * delta * (1.0 - spec.alpha**2 / (spec.alpha * w + spec.eps))


def wirtinger(f, z, h):
    """Central-difference estimates of ``(d f, dbar f)`` with step ``h``."""
    z = np.asarray(z, dtype=complex)
    h = np.asarray(h, dtype=float)
    zp, zm = z + h, z - h
    zq, zr = z + 1j * h, z - 1j * h
    # divide by the realised stencil width (exact), not the nominal 2h
    fx = (f(zp) - f(zm)) / (2 * (zp - zm).real)
    fy = (f(zq) - f(zr)) / (2j * (zq - zr).imag)
    return fx + fy, fx - fy


def beltrami_at(f, z, h: float, poles=()):
    """Central-difference Beltrami coefficient ``dbar f / d f``.

    ``f`` must accept (and broadcast over) numpy arrays when ``z`` is an
    array. Raises :class:`NearPole` if a stencil point is within ``10*h``
    of one of ``poles``.
    """
    z = np.asarray(z, dtype=complex)
    h = np.asarray(h, dtype=float)
    for q in poles:
        if np.any(np.abs(z - q) - h < 10 * h):
            raise NearPole(f"stencil within 10h of pole {q!r}")
    fz, fzb = wirtinger(f, z, h)
    mu = fzb / fz
    return mu[()] if mu.ndim == 0 else mu


def interpolation_dilatation(alpha, eps, eta_ratio, n_theta=N_THETA, n_radial=N_RADIAL, h=FD_STEP) -> float:
    """Max sampled ``|mu|`` of ``Phi`` on a polar grid of the open annulus."""
    s = np.linspace(eta_ratio + 4 * h, 1.0 - 4 * h, n_radial)
    t = (np.arange(n_theta) + 0.5) * (2 * np.pi / n_theta)
    w = (s[:, None] * np.exp(1j * t)[None, :]).ravel()
    mu = beltrami_at(lambda x: unit_map(x, alpha, eps, eta_ratio), w, h)
    return float(np.max(np.abs(mu)))


def epsilon_checks(spec: LocalModelSpec, K: float, *, n_theta=N_THETA, n_radial=N_RADIAL,
                   h=FD_STEP, safety=BELTRAMI_SAFETY, dilatation=True) -> dict[str, tuple[float, float, bool]]:
    """The five acceptance checks for a candidate perturbation.

    Returns ``{name: (measured, limit, passed)}``. The dilatation check is
    the expensive one and is skipped when ``dilatation`` is false or an
    earlier check already failed.
    """
    er = spec.eta_ratio
    theta_u = spec.theta / (spec.mu * spec.r)
    root = math.sqrt(spec.eps)
    p = spec.p
    out = {}
    pts = [p, p + root, p - root, p + 2 * root, p - 2 * root]
    m = max(abs(x) for x in pts)
    out["singular_points_inside"] = (m, er / 2, m < er / 2)
    m = max(abs(p + 2 * root), abs(p - 2 * root))
    out["critical_value_clearance"] = (m, theta_u / 2, m < theta_u / 2)

    t = np.arange(n_theta) * (2 * np.pi / n_theta)
    w = er * np.exp(1j * t)
    vals = w + spec.alpha * (spec.eps / (spec.alpha * w + spec.eps))
    a = np.abs(vals)
    ok = bool(np.all(a > theta_u) and np.all(a < 1.0))
    worst = float(max(theta_u / a.min(), a.max()))
    out["inner_circle_values"] = (worst, 1.0, ok)

    steps = np.angle(np.roll(vals, -1) / vals)
    winding = steps.sum() / (2 * np.pi)
    ok = bool(np.all(steps > 0) and abs(winding - 1.0) < 1e-9)
    out["inner_circle_simple"] = (float(winding), 1.0, ok)

    if dilatation and all(v[2] for v in out.values()):
        bound = (K - 1) / (K + 1) - safety
        d = interpolation_dilatation(spec.alpha, spec.eps, er, n_theta, n_radial, h)
        out["interpolation_dilatation"] = (d, bound, d <= bound)
    return out


def select_epsilon(zeta: complex, r: float, eta: float, theta: float, a: complex, mu: float, K: float,
                   **check_kw) -> LocalModelSpec:
    """Halve ``eps`` from a scale-aware start until every check passes."""
    if not 0 < eta < r:
        raise InvalidParameter("need 0 < eta < r")
    if not 0 < theta < mu * eta:
        raise InvalidParameter("need 0 < theta < mu*eta")
    if abs(complex(a) - mu * complex(zeta)) <= mu * r:
        raise InvalidParameter("target a lies in f0(Delta)")
    er = eta / r
    alpha = (complex(a) - mu * complex(zeta)) / (mu * r)
    eps = (er * abs(alpha) / 4) * min(1.0, er / 4)
    floor = 10 * sys.float_info.epsilon * er**2
    while eps >= floor:
        spec = make_spec(zeta, r, eta, theta, a, mu, eps)
        res = epsilon_checks(spec, K, **check_kw)
        wants_dilatation = check_kw.get("dilatation", True)
        if all(v[2] for v in res.values()) and (not wants_dilatation or "interpolation_dilatation" in res):
            return spec
        eps /= 2
    raise EpsSearchExhausted(f"no admissible eps above {floor!r} (K={K!r})")
