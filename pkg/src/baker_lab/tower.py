"""Level-by-level construction of the maps ``h_j`` on the discs ``D_j``.

Level 0 has a single critical "value" ``zeta_0`` whose model sends it to 0.
Each local model contributes two critical points and two critical values;
the critical values of level j become the sub-disc centres of level j+1,
and the model on that sub-disc sends its centre back to the critical point
it came from. Critical point ``2*i + s`` of level j (``s = 0`` for
``p + sqrt(eps)``) is paired by index with sub-disc ``2*i + s`` of level
j+1, so the bookkeeping never relies on geometric matching.
"""
from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import CapExceeded, RadiusCollapse
from .geometry import ModelParams, cabs
from .local_model import LocalModelSpec, critical_data, make_spec, select_epsilon

RADIUS_COLLAPSE_FACTOR = 1e3 * sys.float_info.epsilon


@dataclass(frozen=True)
class SubDisc:
    index: int
    spec: LocalModelSpec
    parent: int | None
    clearance: dict
    crit_points: tuple[complex, complex]
    crit_values: tuple[complex, complex]

    @property
    def centre(self) -> complex:
        return self.spec.zeta

    @property
    def radius(self) -> float:
        return self.spec.r

    @property
    def eta(self) -> float:
        return self.spec.eta

    @property
    def theta(self) -> float:
        return self.spec.theta


@dataclass(frozen=True)
class LevelData:
    j: int
    subdiscs: tuple[SubDisc, ...]
    back_targets: tuple[complex, ...] = field(repr=False)

    @property
    def omegas(self) -> list[complex]:
        return [s.centre for s in self.subdiscs]

    @property
    def crit_points(self) -> list[complex]:
        return [c for s in self.subdiscs for c in s.crit_points]

    @property
    def crit_values(self) -> list[complex]:
        return [v for s in self.subdiscs for v in s.crit_values]

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        """Per-sub-disc parameters as arrays, for vectorised evaluation."""
        sp = [s.spec for s in self.subdiscs]
        return {
            "zeta": np.array([s.zeta for s in sp]),
            "r": np.array([s.r for s in sp]),
            "eta_ratio": np.array([s.eta_ratio for s in sp]),
            "eta": np.array([s.eta for s in sp]),
            "alpha": np.array([s.alpha for s in sp]),
            "eps": np.array([s.eps for s in sp]),
            "b": np.array([s.b for s in sp]),
            "pole": np.array([s.pole if s.pole_distinct else complex(np.nan, np.nan) for s in sp]),
            "p": np.array([s.p for s in sp]),
        }

    @cached_property
    def _tree(self) -> cKDTree:
        z = self.arrays["zeta"]
        return cKDTree(np.c_[z.real, z.imag])

    def locate(self, z: complex) -> int | None:
        """Index of the closed sub-disc containing ``z``, if any."""
        _, i = self._tree.query((z.real, z.imag))
        s = self.subdiscs[i]
        return int(i) if abs(z - s.centre) <= s.radius else None

    def locate_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.size == 0:
            return np.zeros(z.shape, dtype=np.int64)
        _, idx = self._tree.query(np.c_[z.real.ravel(), z.imag.ravel()])
        idx = idx.reshape(z.shape)
        a = self.arrays
        inside = cabs(z - a["zeta"][idx]) <= a["r"][idx]
        return np.where(inside, idx, -1)


def _nearest_other(points: np.ndarray) -> np.ndarray:
    if len(points) < 2:
        return np.full(len(points), np.inf)
    tree = cKDTree(np.c_[points.real, points.imag])
    d, _ = tree.query(np.c_[points.real, points.imag], k=2)
    return d[:, 1]


def _disc_gaps(prev: LevelData) -> np.ndarray:
    """For each sub-disc of ``prev``, the distance to the nearest other one."""
    a = prev.arrays
    m = len(prev.subdiscs)
    if m < 2:
        return np.full(m, np.inf)
    gap = np.abs(a["zeta"][:, None] - a["zeta"][None, :]) - a["r"][:, None] - a["r"][None, :]
    np.fill_diagonal(gap, np.inf)
    return gap.min(axis=1)


def clearance_terms(j: int, params: ModelParams, omegas: np.ndarray, prev: LevelData | None) -> list[dict]:
    """The quantities whose minimum (over three) sets each sub-disc radius.

    For ``j > 0`` the parent terms bound the distance from ``omega`` to the
    closure of ``h_{j-1}(W_{j-1})``: the interpolation annulus of the parent
    maps outside ``D(f0(zeta*), theta*)``, ``f0(V_{j-1})`` lies outside
    ``f0(Delta*)``, and the other parents' images stay inside their own
    ``f0(Delta')``.
    """
    centre, radius = params.disc(j)
    sib = _nearest_other(omegas)
    out = []
    gaps = _disc_gaps(prev) if prev is not None else None
    for k, w in enumerate(omegas):
        t = {"siblings": float(sib[k]), "boundary": float(radius - abs(w - centre))}
        if prev is not None:
            par = prev.subdiscs[k // 2]
            t["parent_theta"] = par.theta / 2
            t["parent_disc"] = params.mu * par.radius - abs(w - params.mu * par.centre)
            t["cousins"] = float(params.mu * gaps[k // 2])
        out.append(t)
    return out


def choose_subdisc_radius(terms: dict) -> float:
    return min(terms.values()) / 3.0


@dataclass(frozen=True)
class Mutation:
    """Deliberate defects for negative controls."""

    eps_factor: float = 1.0
    swap_targets_level: int | None = None


def build_level(j: int, params: ModelParams, prev: LevelData | None = None,
                mutation: Mutation | None = None, **check_kw) -> LevelData:
    if (j == 0) != (prev is None):
        raise ValueError("level 0 is built without a predecessor; level j > 0 needs level j-1")
    if j == 0:
        omegas = [params.zeta0]
        targets = [0j]
    else:
        omegas = prev.crit_values
        targets = prev.crit_points
    if mutation is not None and mutation.swap_targets_level == j and len(targets) >= 2:
        targets = [targets[1], targets[0]] + list(targets[2:])
    om = np.array(omegas, dtype=complex)
    terms = clearance_terms(j, params, om, prev)
    subdiscs = []
    for k, (w, a, t) in enumerate(zip(omegas, targets, terms)):
        rho = choose_subdisc_radius(t)
        if not rho >= RADIUS_COLLAPSE_FACTOR * abs(w):
            raise RadiusCollapse(j, k, rho, abs(w))
        eta = rho / 2
        theta = params.mu * eta / 2
        spec = select_epsilon(w, rho, eta, theta, a, params.mu, params.K, **check_kw)
        if mutation is not None and mutation.eps_factor != 1.0:
            spec = make_spec(w, rho, eta, theta, a, params.mu, spec.eps * mutation.eps_factor)
        c1, c2, v1, v2 = critical_data(spec)
        subdiscs.append(SubDisc(index=k, spec=spec, parent=None if prev is None else k // 2,
                                clearance=t, crit_points=(c1, c2), crit_values=(v1, v2)))
    return LevelData(j=j, subdiscs=tuple(subdiscs), back_targets=tuple(targets))


class Model:
    """The map F on the plane, with levels materialised on first use.

    Level construction is serialised by a lock; built levels are immutable.
    """

    def __init__(self, params: ModelParams, levels=(), mutation: Mutation | None = None, check_kw=None):
        self.params = params
        self.mutation = mutation
        self.check_kw = dict(check_kw or {})
        self._levels: list[LevelData] = list(levels)
        self._lock = threading.Lock()

    @property
    def built_levels(self) -> list[LevelData]:
        return list(self._levels)

    def level(self, j: int) -> LevelData:
        if j > self.params.j_max:
            raise CapExceeded(j, self.params.j_max)
        if j < len(self._levels):
            return self._levels[j]
        with self._lock:
            while len(self._levels) <= j:
                n = len(self._levels)
                prev = self._levels[-1] if n else None
                self._levels.append(build_level(n, self.params, prev, self.mutation, **self.check_kw))
        return self._levels[j]

    def build_all(self) -> "Model":
        self.level(self.params.j_max)
        return self

    def locate(self, z: complex) -> tuple[int, int | None] | None:
        """``(j, i)`` for sub-disc i of level j, ``(j, None)`` for the rest of D_j."""
        j = self.params.disc_level(z)
        if j is None:
            return None
        return j, self.level(j).locate(z)

    def region_of(self, z: complex, j: int) -> str:
        return region_of(z, self.level(j), self.params)

    def find_critical(self, c: complex) -> tuple[int, int]:
        """``(j, k)`` such that ``c`` is stored critical point k of level j."""
        loc = self.locate(c)
        if loc is not None and loc[1] is not None:
            j, i = loc
            pts = self.level(j).subdiscs[i].crit_points
            for s in (0, 1):
                if pts[s] == c:
                    return j, 2 * i + s
        raise KeyError(f"{c!r} is not a stored critical point")

    @property
    def n_local_models(self) -> int:
        return sum(len(lv.subdiscs) for lv in self._levels)


def region_of(z: complex, level: LevelData, params: ModelParams) -> str:
    """``'V'``, ``'X'`` (interpolation annulus), ``'inner'`` or ``'outside'``."""
    centre, radius = params.disc(level.j)
    if abs(z - centre) > radius:
        return "outside"
    i = level.locate(z)
    if i is None:
        return "V"
    s = level.subdiscs[i]
    return "inner" if abs(z - s.centre) <= s.eta else "X"


def region_array(z: np.ndarray, level: LevelData, params: ModelParams) -> np.ndarray:
    """Vectorised :func:`region_of` as codes 0=V, 1=X, 2=inner, 3=outside."""
    z = np.asarray(z, dtype=complex)
    centre, radius = params.disc(level.j)
    idx = level.locate_array(z)
    a = level.arrays
    d = cabs(z - a["zeta"][np.maximum(idx, 0)])
    eta = a["eta"][np.maximum(idx, 0)]
    code = np.where(idx < 0, 0, np.where(d <= eta, 2, 1))
    return np.where(cabs(z - centre) > radius, 3, code)
