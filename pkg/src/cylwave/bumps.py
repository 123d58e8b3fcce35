"""Smooth cutoff functions: C-infinity ramps, plateau bumps and the dyadic
Littlewood-Paley profile.

Every cutoff is built from the classical mollifier ``exp(-1/s)``, so the
functions are smooth, exactly 1 on their plateaus and exactly 0 off their
supports.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


def _psi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, monotone in between."""
    s = np.asarray(s, dtype=float)
    a = _psi(s)
    b = _psi(1.0 - s)
    return a / (a + b)


def ramp_down(x, start, stop):
    """Smooth function equal to 1 for x <= start and 0 for x >= stop."""
    if not stop > start:
        raise ConfigurationError("ramp requires stop > start")
    return 1.0 - smooth_step((np.asarray(x, dtype=float) - start) / (stop - start))


@dataclass(frozen=True)
class SmoothBump:
    """Plateau bump: 0 outside [lo, hi], 1 on [plateau_lo, plateau_hi]."""

    lo: float
    plateau_lo: float
    plateau_hi: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.plateau_lo <= self.plateau_hi < self.hi):
            raise ConfigurationError(
                f"bump needs lo < plateau_lo <= plateau_hi < hi, got {self}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        up = smooth_step((x - self.lo) / (self.plateau_lo - self.lo))
        down = 1.0 - smooth_step((x - self.plateau_hi) / (self.hi - self.plateau_hi))
        return up * down

    def widened(self, factor: float) -> "SmoothBump":
        """Same plateau, transition layers scaled by ``factor``."""
        return SmoothBump(
            self.plateau_lo - factor * (self.plateau_lo - self.lo),
            self.plateau_lo,
            self.plateau_hi,
            self.plateau_hi + factor * (self.hi - self.plateau_hi),
        )


@dataclass(frozen=True)
class SmoothRamp:
    """chi_1-type cutoff: 1 on (-inf, eps], 0 on [2 eps, inf)."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")

    def __call__(self, x):
        return ramp_down(x, self.epsilon, 2.0 * self.epsilon)


@dataclass(frozen=True)
class LPProfile:
    """Dyadic Littlewood-Paley bump ``chi(l) = phi(l/2) - phi(l)``.

    ``phi`` equals 1 on [0, 1] and 0 beyond ``ramp_end``; the dyadic sum
    over ``chi(2**-j l)`` telescopes to exactly 1 for every l > 0.  With the
    default ``ramp_end = 5/4`` the support is [1, 5/2] and the plateau
    [5/4, 2].
    """

    ramp_end: float = 1.25

    def __post_init__(self):
        if not 1.0 < self.ramp_end < 2.0:
            raise ConfigurationError("ramp_end must lie in (1, 2)")

    def phi(self, lam):
        return ramp_down(lam, 1.0, self.ramp_end)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.phi(lam / 2.0) - self.phi(lam)

    @property
    def support(self) -> tuple[float, float]:
        return 1.0, 2.0 * self.ramp_end

    def widened(self, factor: float) -> "LPProfile":
        return LPProfile(1.0 + factor * (self.ramp_end - 1.0))

    def active_scales(self, lam_min: float, lam_max: float) -> range:
        """All j with chi(2**-j l) possibly nonzero for l in [lam_min, lam_max]."""
        lo, hi = self.support
        j_lo = int(np.floor(np.log2(lam_min / hi))) - 1
        j_hi = int(np.ceil(np.log2(lam_max / lo))) + 1
        return range(j_lo, j_hi + 1)
