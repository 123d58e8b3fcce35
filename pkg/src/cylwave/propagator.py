"""Exact linear wave flow in the eigenbasis, Duhamel integration and
Strichartz bookkeeping.

Each coefficient of the eigenbasis evolves as a harmonic oscillator with
frequency mu = sqrt(lambda), so the homogeneous flow is exact for any step.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .bumps import LPProfile
from .errors import ConfigurationError, DomainError, ShapeError
from .field import (DomainGrid, SpectralField, field_lebesgue_norm, mixed_norm,
                    random_field, sobolev_norm)


@dataclass(frozen=True)
class WaveState:
    u: SpectralField
    v: SpectralField
    t: float = 0.0

    def __post_init__(self):
        if self.u.grid is not self.v.grid:
            raise ShapeError("u and v must share a grid")
        if not (np.all(np.isfinite(self.u.c)) and np.all(np.isfinite(self.v.c))):
            raise DomainError("non-finite coefficients in wave state")

    @property
    def grid(self) -> DomainGrid:
        return self.u.grid

    @classmethod
    def at_rest(cls, u: SpectralField, t: float = 0.0):
        return cls(u, SpectralField.zeros(u.grid), t)

    def linear_energy(self) -> float:
        """0.5 * sum(lambda |c_u|^2 + |c_v|^2)."""
        return 0.5 * (sobolev_norm(self.u, 1.0) ** 2 + self.v.l2() ** 2)


def frequencies(grid: DomainGrid):
    """mu = sqrt(lambda) on active entries and 1 on masked ones (their data is 0)."""
    return np.sqrt(np.where(grid.active[None], grid.lam, 1.0))


def flow_coefficients(cu, cv, mu, dt):
    c, s = np.cos(mu * dt), np.sin(mu * dt)
    return c * cu + (s / mu) * cv, -mu * s * cu + c * cv


def propagate(s: WaveState, dt: float) -> WaveState:
    mu = frequencies(s.grid)
    cu, cv = flow_coefficients(s.u.c, s.v.c, mu, dt)
    return WaveState(SpectralField(s.grid, cu), SpectralField(s.grid, cv), s.t + dt)


def trajectory(s: WaveState, times):
    """States at the given absolute times, each computed directly from ``s``."""
    return [propagate(s, float(t) - s.t) for t in times]


def duhamel(s0: WaveState, forcing, T: float, n_steps: int) -> WaveState:
    """Solve u_tt - Delta u = F from ``s0`` over [t0, t0 + T].

    ``forcing`` is a callable ``t -> SpectralField`` (sampled at step
    midpoints), a sequence of ``n_steps`` midpoint samples, or a sequence of
    ``n_steps + 1`` samples at the step nodes.  Midpoint samples use the
    interaction-picture midpoint rule, node samples the trapezoid rule; both
    are second order and exact when F vanishes.
    """
    if n_steps < 1:
        raise DomainError("need at least one step")
    dt = T / n_steps
    g = s0.grid
    mu = frequencies(g)
    if callable(forcing):
        mode = "mid"
        sample = lambda n: forcing(s0.t + (n + 0.5) * dt)  # noqa: E731
    else:
        seq = list(forcing)
        if len(seq) == n_steps:
            mode = "mid"
        elif len(seq) == n_steps + 1:
            mode = "node"
        else:
            raise ShapeError(
                f"forcing has {len(seq)} samples, expected {n_steps} or {n_steps + 1}")
        sample = seq.__getitem__
    for F in ([] if callable(forcing) else seq):
        if F.grid is not g:
            raise ShapeError("forcing sampled on a different grid")
    cu, cv = s0.u.c, s0.v.c
    zero = np.zeros_like(cu)
    if mode == "node":
        f_prev = sample(0).c
    for n in range(n_steps):
        cu, cv = flow_coefficients(cu, cv, mu, dt)
        if mode == "mid":
            du, dv = flow_coefficients(zero, sample(n).c, mu, 0.5 * dt)
            cu, cv = cu + dt * du, cv + dt * dv
        else:
            f_next = sample(n + 1).c
            du, dv = flow_coefficients(zero, f_prev, mu, dt)
            cu = cu + 0.5 * dt * du
            cv = cv + 0.5 * dt * (dv + f_next)
            f_prev = f_next
    return WaveState(SpectralField(g, cu), SpectralField(g, cv), s0.t + T)


# -- admissibility ----------------------------------------------------------

def _exact(x):
    """Fraction for integers/rationals, float otherwise; inf passes through."""
    if isinstance(x, (Rational, Fraction)):
        return Fraction(x)
    x = float(x)
    if np.isinf(x):
        return x
    return Fraction(int(x)) if x.is_integer() else x


def _recip(x):
    if isinstance(x, float) and np.isinf(x):
        return 0
    return 1 / x


@dataclass(frozen=True)
class StrichartzTriple:
    q: object
    r: object
    beta: object

    def __post_init__(self):
        iq, ir = _recip(self.q), _recip(self.r)
        if iq > Fraction(3, 4) * (Fraction(1, 2) - ir):
            raise ConfigurationError(f"(q, r) = ({self.q}, {self.r}) is not admissible")
        expected = 3 * (Fraction(1, 2) - ir) - iq
        if abs(float(expected) - float(self.beta)) > 1e-12:
            raise ConfigurationError(f"beta must be {expected}, got {self.beta}")


def admissible(q, r):
    """The triple (q, r, beta) if 1/q <= 3/4 (1/2 - 1/r), else None.

    Integer and Fraction inputs are handled in exact arithmetic.
    """
    q, r = _exact(q), _exact(r)
    if not (q > 2) or not (r >= 2):
        raise DomainError("need q in (2, inf] and r in [2, inf]")
    iq, ir = _recip(q), _recip(r)
    if iq > Fraction(3, 4) * (Fraction(1, 2) - ir):
        return None
    return StrichartzTriple(q, r, 3 * (Fraction(1, 2) - ir) - iq)


def inhomogeneous_beta(q_dual, r_dual):
    """beta determined by the forcing exponents: 3 (1/2 - 1/r') - 1/q' + 2."""
    q_dual, r_dual = _exact(q_dual), _exact(r_dual)
    if not (1 <= q_dual <= 2 and 1 <= r_dual <= 2):
        raise DomainError("dual exponents must lie in [1, 2]")
    return 3 * (Fraction(1, 2) - _recip(r_dual)) - _recip(q_dual) + 2


def validate_inhomogeneous(triple: StrichartzTriple, q_dual=1, r_dual=2):
    """Check that a triple is compatible with the forcing space L^q' L^r'."""
    b = inhomogeneous_beta(q_dual, r_dual)
    if abs(float(b) - float(triple.beta)) > 1e-12:
        raise ConfigurationError(
            f"triple beta {triple.beta} does not match forcing exponents "
            f"(q'={q_dual}, r'={r_dual}) which give {b}")
    return True


# -- empirical Strichartz ratios -------------------------------------------

def strichartz_ratio(data: WaveState, triple: StrichartzTriple, T: float, n_t: int = 33,
                     pad: int = 2) -> float:
    """||u||_{L^q(0,T; L^r)} / (||u0||_{H^beta} + ||u1||_{H^(beta-1)}) on a uniform grid."""
    beta = float(triple.beta)
    denom = sobolev_norm(data.u, beta) + sobolev_norm(data.v, beta - 1.0)
    if denom == 0:
        raise DomainError("zero initial data")
    times = data.t + np.linspace(0.0, T, n_t)
    norms = [field_lebesgue_norm(s.u, float(triple.r), pad) for s in trajectory(data, times)]
    return mixed_norm(norms, float(triple.q), T) / denom


def localized_grid(h: float, K: int = 8, period_factor: float = 16.0, N: int = 16):
    """Torus of side ``period_factor * h`` so the lattice scales with the frequency."""
    L = period_factor * h
    return DomainGrid.build(K=K, L_y=L, L_z=L, N_y=N, N_z=N)


def localized_data(grid: DomainGrid, h: float, rng, profile: LPProfile = LPProfile()):
    """Random real data with spectrum in the dyadic shell sqrt(lambda) ~ 1/h."""
    mu = frequencies(grid)
    env = np.where(grid.active[None], profile(h * mu), 0.0)
    if not np.any(env > 0):
        raise ConfigurationError(f"no lattice frequencies in the shell at h={h}")
    u0 = random_field(grid, rng, env)
    u1 = random_field(grid, rng, env * mu)
    return WaveState(u0, u1)


def strichartz_sweep(js=range(3, 8), q=5, r=10, samples=4, seed=0, K=8,
                     period_factor=16.0, N=16, time_factor=8.0, n_t=33):
    """Rows (j, h, q, r, beta, ratio, T, n_t); ratio is the max over samples."""
    triple = admissible(q, r)
    if triple is None:
        raise ConfigurationError(f"({q}, {r}) is not admissible")
    rows = []
    for j in js:
        h = 2.0 ** (-j)
        grid = localized_grid(h, K, period_factor, N)
        rng = np.random.default_rng([seed, j])
        T = time_factor * h
        ratio = max(strichartz_ratio(localized_data(grid, h, rng), triple, T, n_t)
                    for _ in range(samples))
        rows.append((j, h, float(triple.q), float(triple.r), float(triple.beta), ratio, T, n_t))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "h", "q", "r", "beta", "ratio", "T", "n_t"])
    for j, h, q, r, beta, ratio, T, n_t in rows:
        w.writerow([j] + [f"{v:.12g}" for v in (h, q, r, beta, ratio, T)] + [n_t])
    return buf.getvalue()
