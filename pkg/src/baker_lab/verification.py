"""Whole-model audit.

Every check produces one :class:`CheckEntry` with the worst sampled (or
computed) value, the tolerance and the comparison that must hold. Sampling
is seeded per check from ``(seed, crc32(check name))``, so entries do not
depend on evaluation order and the report is byte-for-byte reproducible.

Checks that concern one local model run in its unit coordinates
``w = (z - zeta)/r``. The plane map is ``mu*r*Phi(w) + mu*zeta`` there, so
Beltrami coefficients, glueing defects (relative to ``mu*r``) and
separation statements carry over unchanged, while deep levels stay
resolvable in double precision.
"""
from __future__ import annotations

import hashlib
import json
import math
import operator
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .dynamics import (CLASSES, ESCAPING, check_forward_images, classify_array, eval_F, eval_F_array,
                       verify_superattracting)
from .geometry import placement_problems, teichmuller_modulus_bound, u0_contains, u0_mask
from .local_model import (FD_STEP, epsilon_checks, phi_derivative, phi_eval, unit_map,
                          wirtinger)
from .modelfile import fingerprint, params_to_dict
from .tower import LevelData, Model, clearance_terms, region_array

DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 0
FD_MARGIN = 1e-4
CONFORMAL_TOL = 1e-8
MEROMORPHIC_TOL = 1e-6
GLUE_TOL = 1e-12
N_BOUNDARY = 512
JACOBIAN_FLOOR = 0.1

_CMP = {"<=": operator.le, "<": operator.lt, ">=": operator.ge, ">": operator.gt, "==": operator.eq}


@dataclass
class CheckEntry:
    check: str
    anchor: str
    samples: int
    worst: float
    tol: float
    cmp: str = "<="
    passed: bool = field(init=False)

    def __post_init__(self):
        self.worst = float(self.worst)
        self.tol = float(self.tol)
        self.passed = bool(not math.isnan(self.worst) and _CMP[self.cmp](self.worst, self.tol))

    def to_dict(self) -> dict:
        return {"check": self.check, "anchor": self.anchor, "samples": int(self.samples),
                "worst": _num(self.worst), "tol": _num(self.tol), "cmp": self.cmp, "pass": self.passed}


def _num(x: float):
    return x if math.isfinite(x) else repr(x)


@dataclass
class VerificationReport:
    entries: list[CheckEntry]
    seed: int
    samples: int
    fingerprint: str
    params: dict

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failing(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def entry(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.check == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"fingerprint": self.fingerprint, "seed": self.seed, "samples": self.samples,
                "params": self.params,
                "summary": {"checks": len(self.entries), "failed": len(self.failing()), "pass": self.passed},
                "checks": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"


def check_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def n_threads() -> int:
    try:
        n = int(os.environ.get("BAKER_LAB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


# ---------------------------------------------------------------- sampling

def _annulus_unit(rng, n, inner, outer):
    """Area-uniform points of ``inner < |w| < outer`` (arrays broadcast)."""
    s = np.sqrt(rng.uniform(0.0, 1.0, n) * (outer**2 - inner**2) + inner**2)
    return s * np.exp(1j * rng.uniform(0.0, 2 * np.pi, n))


def sample_v(level: LevelData, params, n: int, rng, near: bool = True) -> np.ndarray:
    """Points of ``V_j``: half uniform on D_j, half in rings around sub-discs."""
    centre, radius = params.disc(level.j)
    a = level.arrays
    out = np.empty(0, dtype=complex)
    while out.size < n:
        m = n - out.size + 16
        z = centre + radius * _annulus_unit(rng, m, 0.0, 1.0)
        if near:
            k = rng.integers(len(level.subdiscs), size=m)
            ring = a["zeta"][k] + a["r"][k] * _annulus_unit(rng, m, 1.0, 3.0)
            z = np.where(np.arange(m) % 2 == 0, z, ring)
        keep = (level.locate_array(z) < 0) & (np.abs(z - centre) < radius)
        out = np.concatenate([out, z[keep]])
    return out[:n]


def sample_u0(params, n: int, rng) -> np.ndarray:
    """Points of U0: half on the skeleton annuli, half in the right half-plane."""
    mu, jm = params.mu, params.j_max
    h = n // 2
    j = rng.integers(0, jm + 1, size=h)
    mod = mu ** (j + rng.uniform(0.0, 0.5, h))
    ann = mod * np.exp(1j * rng.uniform(0.0, 2 * np.pi, h))
    mod = np.exp(rng.uniform(math.log(1e-3), (jm + 1) * math.log(mu), n - h))
    half = mod * np.exp(1j * rng.uniform(-np.pi / 2, np.pi / 2, n - h))
    return np.concatenate([ann, half])


def _unit_params(level: LevelData, k: np.ndarray):
    a = level.arrays
    return a["alpha"][k], a["eps"][k], a["eta_ratio"][k], a["p"][k]


# ---------------------------------------------------------------- annuli

def audit_annuli(model: Model) -> list[CheckEntry]:
    """Analytic checks on the skeleton annuli and the disc chain (no sampling)."""
    P = model.params
    mu, jm = P.mu, P.j_max
    out = []
    margins = []
    for j in range(jm + 2):
        c, r = P.disc(j)
        margins.append(min((abs(c) - r) / mu ** (j + 0.5) - 1.0, 1.0 - (abs(c) + r) / mu ** (j + 1),
                           -(c.real + r) / r))
    worst = min(margins)
    if placement_problems(P):
        worst = min(worst, -1.0)
    out.append(CheckEntry("annuli.discs_avoid_skeleton",
                          "each D_j lies in Re z < 0 strictly between |z| = mu^(j+1/2) and |z| = mu^(j+1)",
                          jm + 2, worst, 0.0, ">"))
    gaps = []
    for j in range(jm + 1):
        c0, r0 = P.disc(j)
        c1, r1 = P.disc(j + 1)
        gaps.append((abs(c1) - r1) / (abs(c0) + r0) - 1.0)
    out.append(CheckEntry("annuli.discs_disjoint", "|zeta_(j+1)| - r_(j+1) > |zeta_j| + r_j",
                          jm + 1, min(gaps), 0.0, ">"))
    lam = teichmuller_modulus_bound(P.rho, P.teich_constant)
    out.append(CheckEntry("annuli.modulus", "skeleton annulus modulus (log mu)/2 >= log rho + C",
                          1, math.log(mu) / 2, lam, ">="))
    out.append(CheckEntry("annuli.witness_ratio", "witness annuli mu^j < |z| < rho mu^j fit: sqrt(mu) >= rho",
                          1, math.sqrt(mu), P.rho, ">="))
    bad = 0
    for j in range(jm + 1):
        for z in (-(mu**j), -(mu**j) * P.rho, -(mu ** (j + 0.5))):
            if not u0_contains(complex(z), mu) or P.disc_level(complex(z)) is not None:
                bad += 1
    out.append(CheckEntry("annuli.in_u0", "closed skeleton and witness annuli lie in U0 and meet no D_i",
                          3 * (jm + 1), bad, 0, "=="))
    return out


# ---------------------------------------------------------------- dilatation

def _dilatation_x(level, n, rng):
    m = len(level.subdiscs)
    k = rng.integers(m, size=n)
    al, ep, er, _ = _unit_params(level, k)
    h = FD_STEP
    w = _annulus_unit(rng, n, er + 2 * h, 1.0 - 2 * h)
    fz, fzb = wirtinger(lambda x: unit_map(x, al, ep, er), w, h)
    return np.abs(fzb / fz), np.abs(fz) - np.abs(fzb)


def _dilatation_inner(level, n, rng):
    """Samples of the meromorphic pieces, a fifth of them clustered near
    the pole. The stencil shrinks with the distance to the pole so that it
    never comes within ``10*h`` of it; points whose Jacobian degenerates
    (within ``1e-3*sqrt(eps)`` of a critical point) are re-drawn."""
    m = len(level.subdiscs)
    ws, ks = [], []
    got = 0
    while got < n:
        b = n - got + 16
        k = rng.integers(m, size=b)
        al, ep, er, p = _unit_params(level, k)
        w = _annulus_unit(rng, b, 0.0, er - 2 * FD_STEP)
        near = p + 4 * np.sqrt(ep) * _annulus_unit(rng, b, 0.0, 1.0)
        w = np.where((np.arange(b) % 5 == 0) & (np.abs(near) < er - 2 * FD_STEP), near, w)
        root = np.sqrt(ep)
        ok = ((np.abs(w - p) > 1e-4 * er) & (np.abs(w - p - root) > 1e-3 * root)
              & (np.abs(w - p + root) > 1e-3 * root))
        ws.append(w[ok])
        ks.append(k[ok])
        got += int(ok.sum())
    w = np.concatenate(ws)[:n]
    k = np.concatenate(ks)[:n]
    al, ep, er, p = _unit_params(level, k)
    h = FD_STEP * np.minimum(1.0, np.abs(w - p))
    assert np.all(np.abs(w - p) - h >= 10 * h)
    fz, fzb = wirtinger(lambda x: x + al * (ep / (al * x + ep)), w, h)
    return np.abs(fzb / fz)


def _dilatation_plane(model, z, h):
    fz, fzb = wirtinger(lambda x: eval_F_array(x, model), z, h)
    return np.abs(fzb / fz), (np.abs(fz) - np.abs(fzb)) / model.params.mu


def _dilatation_v(model, level, n, rng):
    P = model.params
    z = sample_v(level, P, 4 * n, rng, near=False)
    a = level.arrays
    _, i = level._tree.query(np.c_[z.real, z.imag])
    d = np.abs(z - a["zeta"][i]) - a["r"][i]
    _, rj = P.disc(level.j)
    h = FD_STEP * np.minimum(rj, d / 2)
    ok = h >= 1e-9 * np.abs(z)
    z, h = z[ok][:n], h[ok][:n]
    return _dilatation_plane(model, z, h)


def audit_dilatation(model: Model, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                     levels=None) -> list[CheckEntry]:
    """Sampled Beltrami coefficients of F on X_j, the meromorphic pieces, V_j and U0,
    and the Jacobian floor used for critical-set completeness."""
    P = model.params
    levels = range(P.j_max + 1) if levels is None else levels
    k = P.dilatation_bound
    out = []
    floor = math.inf
    nfloor = 0
    for j in levels:
        lv = model.level(j)
        name = f"level{j}.dilatation.X"
        mu_x, jac = _dilatation_x(lv, samples, check_rng(seed, name))
        out.append(CheckEntry(name, "|mu_F| <= (K-1)/(K+1) on the interpolation annuli X_j",
                              samples, mu_x.max(), k + FD_MARGIN))
        floor, nfloor = min(floor, jac.min()), nfloor + jac.size
        name = f"level{j}.dilatation.inner"
        mu_i = _dilatation_inner(lv, samples, check_rng(seed, name))
        out.append(CheckEntry(name, "F is meromorphic on each D(omega, eta) away from its pole",
                              samples, mu_i.max(), MEROMORPHIC_TOL))
        name = f"level{j}.dilatation.V"
        mu_v, jac = _dilatation_v(model, lv, samples, check_rng(seed, name))
        out.append(CheckEntry(name, "F = f0 is conformal on V_j", mu_v.size, mu_v.max(), CONFORMAL_TOL))
        floor, nfloor = min(floor, jac.min()), nfloor + jac.size
    name = "u0.dilatation"
    z = sample_u0(P, samples, check_rng(seed, name))
    mu_u, jac = _dilatation_plane(model, z, FD_STEP * np.abs(z))
    out.append(CheckEntry(name, "F = f0 is conformal on U0", samples, mu_u.max(), CONFORMAL_TOL))
    floor, nfloor = min(floor, jac.min()), nfloor + jac.size
    out.append(CheckEntry("critical.completeness",
                          "(|dF| - |dbar F|)/scale bounded away from 0 on V_j, X_j and U0, so all critical "
                          "points lie in the meromorphic pieces", nfloor, floor, JACOBIAN_FLOOR, ">"))
    return out


# ---------------------------------------------------------------- per level

def _pairwise_min_distance(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    tree = cKDTree(np.c_[z.real, z.imag])
    d, _ = tree.query(np.c_[z.real, z.imag], k=2)
    return float(d[:, 1].min())


def _child_terms(j, model, lv):
    P = model.params
    if j + 1 <= P.j_max and j + 1 < len(model.built_levels):
        return [s.clearance for s in model.level(j + 1).subdiscs]
    return clearance_terms(j + 1, P, np.array(lv.crit_values), lv)


def audit_level(j: int, model: Model, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> list[CheckEntry]:
    """Structure, hypotheses (A)-(C), glueing, critical identities, period-2
    orbits and the forward-image properties of level j."""
    P = model.params
    mu = P.mu
    lv = model.level(j)
    a = lv.arrays
    m = len(lv.subdiscs)
    has_next = j < P.j_max
    out = []
    pre = f"level{j}."

    want = 1 if j == 0 else 2**j
    out.append(CheckEntry(pre + "count", "#Omega_j = 2^j (one centre at level 0)", 1, m, want, "=="))
    out.append(CheckEntry(pre + "critical_count", "two critical points per local model", 1,
                          len(lv.crit_points), 2 * want, "=="))

    centre, radius = P.disc(j)
    worst = float(np.max((np.abs(a["zeta"] - centre) + a["r"]) / radius))
    out.append(CheckEntry(pre + "subdiscs_inside", "each closed sub-disc lies in the interior of D_j",
                          m, worst, 1.0, "<"))
    if m > 1:
        zz = a["zeta"]
        d = np.abs(zz[:, None] - zz[None, :]) / (a["r"][:, None] + a["r"][None, :])
        np.fill_diagonal(d, np.inf)
        worst = float(d.min())
    else:
        worst = math.inf
    out.append(CheckEntry(pre + "subdiscs_disjoint", "|omega - omega'| > rho + rho' for distinct sub-discs",
                          m * (m - 1) // 2, worst, 1.0, ">"))

    # (A), (B), (C) for Omega_(j+1)
    cv = np.array(lv.crit_values)
    nc, nr = P.disc(j + 1)
    out.append(CheckEntry(pre + "hypA", "Omega_(j+1) lies in D_(j+1)", cv.size,
                          float(np.max(np.abs(cv - nc)) / nr), 1.0, "<"))
    out.append(CheckEntry(pre + "hypB.distinct", "h_j is injective on C_j: Omega_(j+1) has 2^(j+1) distinct points",
                          cv.size, _pairwise_min_distance(cv) / nr, 0.0, ">"))
    bound = 4 * mu * a["r"] * np.sqrt(a["eps"])
    sib = np.abs(cv[0::2] - cv[1::2])
    out.append(CheckEntry(pre + "hypB.sibling_bound", "|v_1 - v_2| = 4 mu r sqrt(eps) for each local model",
                          m, float(np.max(np.abs(sib / bound - 1.0))), 1e-2))
    terms = _child_terms(j, model, lv)
    worst = min(min(t["parent_theta"], t["parent_disc"], t["cousins"]) for t in terms) / nr
    out.append(CheckEntry(pre + "hypC.analytic",
                          "analytic distance from Omega_(j+1) to the closure of h_j(W_j) is positive",
                          len(terms), worst, 0.0, ">"))
    name = pre + "hypC.sampled"
    rng = check_rng(seed, name)
    per = max(8, samples // m)
    t = rng.uniform(0, 2 * np.pi, per)
    worst = math.inf
    rho_child = np.array([min(x.values()) / 3 for x in terms])
    for i, s in enumerate(lv.subdiscs):
        sp = s.spec
        vals = unit_map(sp.eta_ratio * np.exp(1j * t), sp.alpha, sp.eps, sp.eta_ratio)
        for q in (0, 1):
            cu = (s.crit_values[q] - mu * sp.zeta) / (mu * sp.r)
            gap = np.abs(vals - cu).min() - rho_child[2 * i + q] / (mu * sp.r)
            worst = min(worst, float(gap))
    out.append(CheckEntry(name, "h_j(boundary circles of W_j) avoids the closed discs around Omega_(j+1)",
                          per * m, worst, 0.0, ">"))

    # glueing
    tt = np.arange(N_BOUNDARY) * (2 * np.pi / N_BOUNDARY)
    e = np.exp(1j * tt)[None, :]
    col = {k: v[:, None] for k, v in a.items()}
    worst = float(np.max(np.abs(unit_map(e, col["alpha"], col["eps"], col["eta_ratio"]) - e)))
    zb = centre + radius * np.exp(1j * tt)
    worst = max(worst, float(np.max(np.abs(eval_F_array(zb, model) - mu * zb)) / (mu * radius)))
    out.append(CheckEntry(pre + "glueing.outer",
                          "h_j = f0 on each sub-disc boundary (relative to mu r) and on the boundary of D_j",
                          N_BOUNDARY * (m + 1), worst, GLUE_TOL))
    w = col["eta_ratio"] * e
    s_ = np.abs(w)
    e_in = col["alpha"] * (col["eps"] / (col["alpha"] * w + col["eps"]))
    e_an = col["alpha"] * (col["eps"] / (col["alpha"] * (col["eta_ratio"] * (w / s_)) + col["eps"]))
    out.append(CheckEntry(pre + "glueing.inner",
                          "meromorphic and interpolating pieces agree on |z - omega| = eta (relative to mu r)",
                          N_BOUNDARY * m, float(np.max(np.abs(e_in - e_an))), GLUE_TOL))

    # critical data
    worst_d = worst_v = 0.0
    mismatch = 0
    for s in lv.subdiscs:
        sp = s.spec
        for q, wc in enumerate(sp.critical_unit()):
            worst_d = max(worst_d, abs(phi_derivative(sp, wc)))
            target = sp.critical_value_unit()[q]
            worst_v = max(worst_v, abs(phi_eval(sp, wc) - target) / abs(target))
            if eval_F(s.crit_points[q], model) != s.crit_values[q]:
                mismatch += 1
    out.append(CheckEntry(pre + "critical.derivative", "Phi'(p +- sqrt(eps)) = 0", 2 * m, worst_d, GLUE_TOL))
    out.append(CheckEntry(pre + "critical.value", "Phi(p +- sqrt(eps)) = p +- 2 sqrt(eps) (relative)",
                          2 * m, worst_v, GLUE_TOL))
    out.append(CheckEntry(pre + "critical.stored", "F(c) reproduces the stored critical value exactly",
                          2 * m, mismatch, 0, "=="))

    # perturbation checks (i)-(iv); (v) is the X_j dilatation audit
    res = [epsilon_checks(s.spec, P.K, dilatation=False) for s in lv.subdiscs]
    for key, anchor in (("singular_points_inside", "pole, critical points and values within eta/2"),
                        ("critical_value_clearance", "critical values within theta/2 of f0(omega)"),
                        ("inner_circle_values", "theta < |h_j - f0(omega)| < mu r on |z - omega| = eta"),
                        ("inner_circle_simple", "h_j(|z - omega| = eta) is simple with winding number 1")):
        worst = max(r_[key][0] / r_[key][1] for r_ in res)
        ok = all(r_[key][2] for r_ in res)
        cmp = "<" if key != "inner_circle_simple" else "<="
        if key == "inner_circle_simple":
            worst = max(abs(r_[key][0] - 1.0) for r_ in res) if ok else math.inf
            out.append(CheckEntry(pre + "eps." + key, anchor, m, worst, 1e-9, cmp))
        else:
            out.append(CheckEntry(pre + "eps." + key, anchor, m, worst if ok else max(worst, 1.0), 1.0, cmp))

    # F = f0 on V_j; h_j(W_j) inside V_(j+1)
    name = pre + "V_equals_f0"
    zv = sample_v(lv, P, samples, check_rng(seed, name))
    bad = int(np.count_nonzero(eval_F_array(zv, model) != mu * zv))
    out.append(CheckEntry(name, "h_j(z) = f0(z) exactly on V_j", samples, bad, 0, "=="))

    name = pre + "injective.X"
    rng = check_rng(seed, name)
    k = rng.integers(m, size=samples)
    al, ep, er, _ = _unit_params(lv, k)
    w1 = _annulus_unit(rng, samples, er, 1.0)
    step = np.exp(rng.uniform(math.log(1e-6), 0.0, samples)) * np.exp(1j * rng.uniform(0, 2 * np.pi, samples))
    w2 = w1 + step
    ok = (np.abs(w2) > er) & (np.abs(w2) < 1.0)
    w1, w2, al, ep, er = w1[ok], w2[ok], al[ok], ep[ok], er[ok]
    ratio = np.abs(unit_map(w1, al, ep, er) - unit_map(w2, al, ep, er)) / np.abs(w1 - w2)
    img = np.abs(unit_map(w1, al, ep, er))
    worst = float(ratio.min()) if np.all(img < 1.0) else 0.0
    out.append(CheckEntry(name, "h_j is injective on W_j: sampled pairs in X_j have distinct images inside f0(Delta)",
                          int(ok.sum()), worst, 0.0, ">"))

    if has_next:
        nxt = model.level(j + 1)
        name = pre + "W_into_V_next"
        rng = check_rng(seed, name)
        zw = np.concatenate([sample_v(lv, P, samples // 2, rng),
                             _x_plane(lv, samples - samples // 2, rng)])
        code = region_array(eval_F_array(zw, model), nxt, P)
        out.append(CheckEntry(name, "h_j(W_j) lies in V_(j+1)", samples, int(np.count_nonzero(code != 0)), 0, "=="))

        name = pre + "period2.residual"
        reps = [verify_superattracting(c, model) for c in lv.crit_points]
        worst = max(r.residual / max(1.0, abs(r.c)) for r in reps)
        out.append(CheckEntry(name, "F(F(c)) = c for every critical point c of level j (relative)",
                              len(reps), worst, 1e-9))
        worst = max(abs(math.log(r.ratio)) if r.ratio > 0 and math.isfinite(r.ratio) else math.inf for r in reps)
        out.append(CheckEntry(pre + "period2.quadratic",
                              "q(1e-4 s)/q(1e-3 s) in [1/5, 5] for q(h) = |F^2(c+h) - c|/h^2 (log of ratio)",
                              len(reps), worst, math.log(5.0)))
        name = pre + "forward_images"
        n = P.j_max - j
        rep = check_forward_images(j, n, samples, model, rng=check_rng(seed, name))
        out.append(CheckEntry(name, f"F^n(X_j) lies in V_(j+n) for n = 1..{n}", samples, len(rep.violations), 0, "=="))
    if j == 0:
        z0 = P.zeta0
        worst = abs(eval_F(z0, model)) + abs(eval_F(eval_F(z0, model), model))
        out.append(CheckEntry(pre + "anchor_orbit", "F(zeta_0) = 0 and F(0) = 0", 2, worst, 0.0, "<="))
    return out


def _x_plane(level, n, rng):
    a = level.arrays
    k = rng.integers(len(level.subdiscs), size=n)
    w = _annulus_unit(rng, n, a["eta_ratio"][k], 1.0)
    return a["zeta"][k] + a["r"][k] * w


# ---------------------------------------------------------------- global

def audit_u0(model: Model, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> list[CheckEntry]:
    P = model.params
    name = "u0.invariance"
    z = sample_u0(P, samples, check_rng(seed, name))
    fz = eval_F_array(z, model)
    bad = (fz != P.mu * z) | ~u0_mask(P.mu * z, P.mu)
    cls = classify_array(z, 2, model)
    bad |= cls != CLASSES.index(ESCAPING)
    return [CheckEntry(name, "F(z) = mu z exactly on U0, F(U0) lies in U0 and orbits escape", samples,
                       int(np.count_nonzero(bad)), 0, "==")]


def audit_poles(model: Model) -> list[CheckEntry]:
    P = model.params
    count = 0
    bad = 0
    for lv in model.built_levels[: P.j_max + 1]:
        for s in lv.subdiscs:
            count += 1
            if not abs(s.spec.p) < s.spec.eta_ratio:
                bad += 1
    return [CheckEntry("poles.count", "one pole per local model: 2^(j_max+1) - 1 poles in total",
                       count, count - bad, 2 ** (P.j_max + 1) - 1, "==")]


def verify_model(model: Model, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                 threads: int | None = None) -> VerificationReport:
    """Run every audit on a model built through ``j_max``."""
    P = model.params
    model.build_all()
    jobs = [lambda: audit_annuli(model)]
    jobs += [lambda j=j: audit_level(j, model, samples, seed) for j in range(P.j_max + 1)]
    jobs += [lambda: audit_dilatation(model, samples, seed), lambda: audit_u0(model, samples, seed),
             lambda: audit_poles(model)]
    with ThreadPoolExecutor(max_workers=threads or n_threads()) as ex:
        parts = list(ex.map(lambda f: f(), jobs))
    entries = [e for part in parts for e in part]
    names = [e.check for e in entries]
    assert len(names) == len(set(names)), "duplicate check names"
    return VerificationReport(entries=entries, seed=int(seed), samples=int(samples),
                              fingerprint=fingerprint(model), params=params_to_dict(P))


def report_digest(report: VerificationReport) -> str:
    return hashlib.sha256(report.to_json().encode()).hexdigest()
