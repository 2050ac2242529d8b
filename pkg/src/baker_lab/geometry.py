"""Plane geometry of the construction.

The map being modified is the expansion ``f0(z) = mu * z``. Its forward
invariant skeleton ``U0`` is the closed right half-plane together with the
round annuli ``mu**j <= |z| <= mu**(j + 1/2)`` for ``j >= 0``. The discs
``D_j = mu**j * D_0`` sit in the left half-plane between consecutive annuli.

Moduli of round annuli use ``log(outer / inner)`` (no 2*pi factor).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter

DEFAULT_TEICH_CONSTANT = math.log(16.0)
DEFAULT_J_MAX = 8


def teichmuller_modulus_bound(rho: float, teich_constant: float = DEFAULT_TEICH_CONSTANT) -> float:
    """Upper bound ``log(rho) + C`` for the Teichmueller annulus threshold.

    Any over-estimate is admissible: it only enlarges ``mu``.
    """
    if not rho > 1:
        raise InvalidParameter(f"rho must be > 1, got {rho!r}")
    if not teich_constant > 0:
        raise InvalidParameter(f"teich_constant must be > 0, got {teich_constant!r}")
    return math.log(rho) + teich_constant


def choose_mu(rho: float, teich_constant: float = DEFAULT_TEICH_CONSTANT) -> float:
    """Expansion factor whose skeleton annuli have modulus at least the bound."""
    bound = teichmuller_modulus_bound(rho, teich_constant)
    mu = math.exp(2.0 * bound)
    # exp may round down; the defining inequality must hold in floating point
    while math.log(mu) / 2.0 < bound:
        mu = math.nextafter(mu, math.inf)
    return mu


def default_base_disc(mu: float) -> tuple[complex, float]:
    if not mu > 1:
        raise InvalidParameter(f"mu must be > 1, got {mu!r}")
    m34 = mu**0.75
    zeta0 = complex(-m34, 0.0)
    r0 = 0.5 * min(mu - m34, m34 - math.sqrt(mu))
    return zeta0, r0


def u0_contains(z: complex, mu: float) -> bool:
    """Membership in the invariant skeleton U0 (closed set)."""
    if not cmath.isfinite(z):
        raise InvalidParameter(f"u0_contains needs a finite point, got {z!r}")
    if z.real >= 0:
        return True
    a = abs(z)
    if a < 1.0:
        return False
    j0 = int(math.floor(math.log(a) / math.log(mu)))
    for j in (j0 - 1, j0, j0 + 1):
        if j < 0:
            continue
        try:
            lo = mu**j
        except OverflowError:
            continue
        try:
            hi = mu ** (j + 0.5)
        except OverflowError:
            hi = math.inf
        if lo <= a <= hi:
            return True
    return False


def cabs(z) -> np.ndarray:
    """``|z|`` rounded like ``abs(complex)`` (libm hypot); ``np.abs`` may
    differ in the last bit, which matters for boundary membership."""
    z = np.asarray(z, dtype=complex)
    return np.hypot(z.real, z.imag)


def u0_mask(z: np.ndarray, mu: float) -> np.ndarray:
    """Vectorised :func:`u0_contains`."""
    z = np.asarray(z, dtype=complex)
    a = cabs(z)
    out = z.real >= 0
    with np.errstate(divide="ignore"):
        j0 = np.floor(np.log(np.where(a > 0, a, 1.0)) / math.log(mu))
    with np.errstate(over="ignore", invalid="ignore"):
        for dj in (-1, 0, 1):
            j = j0 + dj
            ok = (j >= 0) & (a >= 1.0)
            jj = np.where(ok, j, 0.0)
            out |= ok & (mu**jj <= a) & (a <= mu ** (jj + 0.5))
    return out


@dataclass(frozen=True)
class RoundAnnulus:
    """``{z : inner < |z| < ratio * inner}``."""

    inner: float
    ratio: float

    def __post_init__(self):
        if not (self.inner > 0 and self.ratio > 1):
            raise InvalidParameter("round annulus needs inner > 0 and ratio > 1")

    @property
    def outer(self) -> float:
        return self.inner * self.ratio

    @property
    def modulus(self) -> float:
        return math.log(self.ratio)

    def contains(self, z: complex) -> bool:
        return self.inner < abs(z) < self.outer


@dataclass(frozen=True)
class ModelParams:
    """Global construction parameters.

    ``validate=False`` skips the placement checks; it exists so that loaders
    and negative controls can represent models which the audits must reject.
    """

    mu: float
    rho: float
    K: float
    zeta0: complex
    r0: float
    j_max: int = DEFAULT_J_MAX
    teich_constant: float = DEFAULT_TEICH_CONSTANT
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "zeta0", complex(self.zeta0))
        if not self.validate:
            return
        if not self.mu > 1:
            raise InvalidParameter(f"mu must be > 1, got {self.mu!r}")
        if not self.rho > 1:
            raise InvalidParameter(f"rho must be > 1, got {self.rho!r}")
        if not self.K > 1:
            raise InvalidParameter(f"K must be > 1, got {self.K!r}")
        if not self.r0 > 0:
            raise InvalidParameter(f"r0 must be > 0, got {self.r0!r}")
        if int(self.j_max) != self.j_max or self.j_max < 1:
            raise InvalidParameter(f"j_max must be an integer >= 1, got {self.j_max!r}")
        problems = placement_problems(self)
        if problems:
            raise InvalidParameter("; ".join(problems))

    @classmethod
    def from_rho(
        cls,
        rho: float,
        K: float = 1.5,
        j_max: int = DEFAULT_J_MAX,
        teich_constant: float = DEFAULT_TEICH_CONSTANT,
        zeta0: complex | None = None,
        r0: float | None = None,
    ) -> "ModelParams":
        mu = choose_mu(rho, teich_constant)
        if (zeta0 is None) != (r0 is None):
            raise InvalidParameter("zeta0 and r0 must be given together")
        if zeta0 is None:
            zeta0, r0 = default_base_disc(mu)
        return cls(mu=mu, rho=rho, K=K, zeta0=zeta0, r0=r0, j_max=j_max, teich_constant=teich_constant)

    @property
    def dilatation_bound(self) -> float:
        """``(K - 1) / (K + 1)``, the admissible sup of the Beltrami coefficient."""
        return (self.K - 1.0) / (self.K + 1.0)

    def disc(self, j: int) -> tuple[complex, float]:
        """Centre and radius of ``D_j = f0**j (D_0)``."""
        s = self.mu**j
        return self.zeta0 * s, self.r0 * s

    def disc_level(self, z: complex) -> int | None:
        """Index j with ``z`` in the closed disc D_j, or None.

        Levels are not capped here; the caller decides what lies beyond j_max.
        """
        a = abs(z)
        if a == 0 or not math.isfinite(a):
            return None
        j0 = int(round(math.log(a / abs(self.zeta0)) / math.log(self.mu)))
        for j in (j0, j0 - 1, j0 + 1):
            if j < 0:
                continue
            c, r = self.disc(j)
            if math.isfinite(r) and abs(z - c) <= r:
                return j
        return None

    def disc_level_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`disc_level`; -1 marks points outside every D_j."""
        z = np.asarray(z, dtype=complex)
        a = cabs(z)
        good = np.isfinite(a) & (a > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            j0 = np.round(np.log(np.where(good, a, 1.0) / abs(self.zeta0)) / math.log(self.mu))
        out = np.full(z.shape, -1, dtype=np.int64)
        with np.errstate(over="ignore", invalid="ignore"):
            for dj in (1, -1, 0):
                j = j0 + dj
                ok = good & (j >= 0)
                jj = np.where(ok, j, 0.0)
                scale = self.mu**jj
                ok &= np.isfinite(self.r0 * scale)
                inside = ok & (cabs(z - self.zeta0 * scale) <= self.r0 * scale)
                out = np.where(inside, jj.astype(np.int64), out)
        return out

    def skeleton_annulus(self, j: int) -> RoundAnnulus:
        return RoundAnnulus(self.mu**j, math.sqrt(self.mu))

    def witness_annulus(self, j: int) -> RoundAnnulus:
        return RoundAnnulus(self.mu**j, self.rho)


def placement_problems(params: ModelParams) -> list[str]:
    """Violations of the base-disc placement rule (empty when valid).

    D_0 must lie in ``{Re z < 0, sqrt(mu) < |z| < mu}``; scaling by ``mu**j``
    then keeps every D_j off the skeleton annuli and off the other discs.
    """
    mu, c, r = params.mu, params.zeta0, params.r0
    out = []
    if not c.real + r < 0:
        out.append("base disc meets the closed right half-plane")
    if not abs(c) - r > math.sqrt(mu):
        out.append("base disc meets |z| <= sqrt(mu)")
    if not abs(c) + r < mu:
        out.append("base disc meets |z| >= mu")
    return out
