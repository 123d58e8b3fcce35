"""Frequency-localized Green functions of the wave equation with a point
source at (a, 0, 0), their sup norms near the boundary and the bounds they
are compared against.

The Green function is synthesised directly from the mode sum

    G(t, x, y, z) = (1 / (L_y L_z)) sum_{eta, zeta, k} w cos(t sqrt(lambda))
                    e_k(x, eta) e_k(a, eta) exp(i (y eta + z zeta))

on a periodic (eta, zeta) lattice.  The weight ``w`` is chi(h sqrt(lambda))
for the localized function and additionally chi_0 * chi_1 for the
tangential parametrix.  Every weight has compact support, so for each eta
the number of contributing modes is known exactly and truncating the k sum
there loses nothing.

The function is even in t, y and z; sums run over eta > 0 with cosines.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import fft as sfft

from .airy import zero_table
from .bumps import SmoothBump, SmoothRamp, ramp_down
from .errors import ConfigurationError, DomainError, RegimeMismatchError, UnderResolvedError
from .halfline import mode_values

DEFAULT_CHI = SmoothBump(0.5, 1.0, 2.0, 2.5)
DEFAULT_CHI0 = SmoothBump(0.5, 0.75, 1.5, 2.0)
DEFAULT_PERIOD = 4.0


@dataclass(frozen=True)
class CutoffProfile:
    """chi on h sqrt(lambda); chi0 on h^2 (eta^2 + zeta^2); chi1 ramp on
    omega_k h^2 |eta|^(4/3) with parameter epsilon."""

    chi: SmoothBump = DEFAULT_CHI
    chi0: SmoothBump = DEFAULT_CHI0
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")

    @property
    def chi1(self) -> SmoothRamp:
        return SmoothRamp(self.epsilon)

    def widened(self, factor: float) -> "CutoffProfile":
        """Transition layers of chi and chi0 scaled by ``factor``."""
        return replace(self, chi=self.chi.widened(factor), chi0=self.chi0.widened(factor))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GreenRequest:
    a: float
    h: float
    t: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray = field(default_factory=lambda: np.zeros(1))
    t_limit: float = 1.0

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise DomainError("source distance a must lie in (0, 1]")
        if not 0 < self.h <= 1:
            raise DomainError("frequency scale h must lie in (0, 1]")
        if not abs(self.t) <= self.t_limit:
            raise DomainError(f"|t| must not exceed {self.t_limit}")
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), float)))
        if np.any(self.x < 0):
            raise DomainError("evaluation points need x >= 0")


class GreenSynthesizer:
    """Precomputed (eta, zeta, k) weights for one frequency scale.

    ``kind`` is ``"localized"`` (chi only) or ``"parametrix"``
    (chi * chi0 * chi1).  ``eta_weight`` multiplies every fiber by a
    function of the scaled |eta| (used for the region split) and
    ``direction`` = (delta, width) restricts zeta / |(eta, zeta)| to a
    smooth window around delta.
    """

    def __init__(self, h, profile: CutoffProfile = CutoffProfile(), kind="parametrix",
                 L_y=DEFAULT_PERIOD, L_z=DEFAULT_PERIOD, K_override=None,
                 eta_weight=None, direction=None):
        if kind not in ("localized", "parametrix"):
            raise ConfigurationError(f"unknown Green function kind {kind!r}")
        if not 0 < h <= 1:
            raise DomainError("frequency scale h must lie in (0, 1]")
        self.h, self.profile, self.kind = float(h), profile, kind
        self.L_y, self.L_z = float(L_y), float(L_z)
        if 2 * np.pi * h / min(L_y, L_z) >= 0.25:
            raise UnderResolvedError("lattice too coarse for the frequency shell (need 2 pi h / L < 1/4)")
        chi, chi0, chi1 = profile.chi, profile.chi0, profile.chi1
        rmax = chi.hi / h
        if kind == "parametrix":
            rmax = min(rmax, math.sqrt(chi0.hi) / h)
        d_eta, d_zeta = 2 * np.pi / L_y, 2 * np.pi / L_z
        n_max = int(np.floor(rmax / d_eta))
        m_max = int(np.floor(rmax / d_zeta))
        zeta_all = d_zeta * np.arange(-m_max, m_max + 1)
        if n_max < 1:
            raise UnderResolvedError("no eta lattice points inside the frequency shell")
        # exact mode cutoff per fiber
        etas = d_eta * np.arange(1, n_max + 1)
        budget = (rmax ** 2 - etas ** 2) / etas ** (4.0 / 3.0)
        if kind == "parametrix":
            budget = np.minimum(budget, 2 * profile.epsilon / (h ** 2 * etas ** (4.0 / 3.0)))
        K_need = self._count_modes(budget)
        self.K_cutoff = int(K_need.max())
        if K_override is not None:
            if K_override < self.K_cutoff:
                raise UnderResolvedError(
                    f"K={K_override} truncates the mode sum, the support needs K={self.K_cutoff}")
        self.K = self.K_cutoff if K_override is None else int(K_override)
        table = zero_table(max(self.K, 1))
        self.table = table
        self.blocks = []
        for eta, Kn in zip(etas, K_need):
            if Kn == 0:
                continue
            s = h * eta
            ew = 1.0 if eta_weight is None else float(eta_weight(s))
            if ew == 0.0:
                continue
            om = table.omega[:Kn]
            lam = eta ** 2 + zeta_all[None, :] ** 2 + om[:, None] * eta ** (4.0 / 3.0)
            w = chi(h * np.sqrt(lam))
            if kind == "parametrix":
                w = w * chi0(h ** 2 * (eta ** 2 + zeta_all ** 2))[None, :]
                w = w * chi1(om * h ** 2 * eta ** (4.0 / 3.0))[:, None]
            if direction is not None:
                delta, width = direction
                cosang = zeta_all / np.hypot(eta, zeta_all)
                w = w * ramp_down(np.abs(cosang - delta), width, 2 * width)[None, :]
            w = w * ew
            cols = np.nonzero(np.any(w != 0, axis=0))[0]
            rows = np.nonzero(np.any(w != 0, axis=1))[0]
            if len(cols) == 0:
                continue
            kk = rows.max() + 1
            self.blocks.append((eta, kk, zeta_all[cols], w[:kk][:, cols],
                                np.sqrt(lam[:kk][:, cols])))

    def _count_modes(self, budget):
        budget = np.maximum(budget, 0.0)
        # generous upper bound from the asymptotic zero law, then exact count
        guess = int(1.1 * budget.max() ** 1.5 / (1.5 * np.pi)) + 16
        om = zero_table(guess).omega
        counts = np.searchsorted(om, budget, side="right")
        if counts.max() >= guess:
            raise RuntimeError("mode count estimate too small")
        return counts

    @property
    def n_pairs(self) -> int:
        return int(sum(b[1] for b in self.blocks))

    @property
    def n_terms(self) -> int:
        return int(sum(b[3].size for b in self.blocks))

    def fiber_sums(self, t, z):
        """W_n[k, iz] = sum_zeta w cos(t sqrt(lambda)) cos(zeta z)."""
        z = np.atleast_1d(np.asarray(z, float))
        out = []
        for eta, kk, zeta, w, mu in self.blocks:
            cz = np.cos(np.outer(zeta, z))
            out.append((w * np.cos(t * mu)) @ cz)
        return out

    def source_products(self, x, a):
        """P_n[ix, k] = e_k(x, eta) e_k(a, eta)."""
        x = np.atleast_1d(np.asarray(x, float))
        out = []
        for eta, kk, *_ in self.blocks:
            ks = np.arange(1, kk + 1)
            ex = mode_values(ks, eta, x, self.table)
            ea = mode_values(ks, eta, np.array([a]), self.table)[:, 0]
            out.append((ex * ea[:, None]).T)
        return out

    def evaluate(self, a, t, x, y, z=(0.0,), products=None):
        """G on the tensor grid x * y * z, shape (len(x), len(y), len(z))."""
        y = np.atleast_1d(np.asarray(y, float))
        z = np.atleast_1d(np.asarray(z, float))
        P = products if products is not None else self.source_products(x, a)
        W = self.fiber_sums(t, z)
        nx = P[0].shape[0] if P else len(np.atleast_1d(x))
        V = np.zeros((len(self.blocks), nx, len(z)))
        for i, (Pn, Wn) in enumerate(zip(P, W)):
            V[i] = Pn @ Wn
        etas = np.array([b[0] for b in self.blocks])
        cy = np.cos(np.outer(etas, y))                           # (n_eta, ny)
        G = np.einsum("nxz,ny->xyz", V, cy, optimize=True)
        return G * (2.0 / (self.L_y * self.L_z))


def green_localized(req: GreenRequest, prof: CutoffProfile = CutoffProfile(),
                    K_override=None, L=DEFAULT_PERIOD):
    syn = GreenSynthesizer(req.h, prof, "localized", L, L, K_override)
    return syn.evaluate(req.a, req.t, req.x, req.y, req.z)


def green_parametrix(req: GreenRequest, prof: CutoffProfile = CutoffProfile(),
                     K_override=None, L=DEFAULT_PERIOD):
    syn = GreenSynthesizer(req.h, prof, "parametrix", L, L, K_override)
    return syn.evaluate(req.a, req.t, req.x, req.y, req.z)


# -- regime decomposition ---------------------------------------------------

@dataclass(frozen=True)
class RegionSplit:
    """Smooth partition of the scaled |eta| axis into eps0 / dyadic / c0 pieces."""

    a: float
    c0: float
    eps0: float
    boundaries: tuple
    labels: tuple

    @staticmethod
    def _phi(s, B):
        return ramp_down(np.asarray(s, float) / B, 1.0, 2.0)

    def piece(self, label):
        i = self.labels.index(label)
        B = self.boundaries
        if i == 0:
            return lambda s: self._phi(s, B[0])
        if i == len(self.labels) - 1:
            return lambda s: 1.0 - self._phi(s, B[-1])
        return lambda s: self._phi(s, B[i]) - self._phi(s, B[i - 1])

    def weights(self, s):
        return {lab: self.piece(lab)(s) for lab in self.labels}

    @property
    def dyadic_m(self):
        return [int(lab[7:-1]) for lab in self.labels if lab.startswith("dyadic")]


def region_split(a, c0=1.0, eps0=0.05) -> RegionSplit:
    """Pieces |eta| <~ eps0 sqrt(a), |eta| ~ 2^m sqrt(a) for eps0 <= 2^m sqrt(a) <= c0,
    and |eta| >~ c0 (|eta| in units of 1/h).

    The ramps are telescoping so the weights sum to exactly 1.  The
    lowest dyadic piece also absorbs the interval between eps0 sqrt(a) and
    the first dyadic shell.
    """
    if not 0 < eps0 < c0:
        raise ConfigurationError("region split needs 0 < eps0 < c0")
    if not a > 0:
        raise DomainError("a must be positive")
    ra = math.sqrt(a)
    m_lo = math.ceil(math.log2(eps0 / ra) - 1e-12)
    m_hi = math.floor(math.log2(c0 / ra) + 1e-12)
    if m_hi < m_lo:
        raise ConfigurationError(f"no dyadic m with {eps0} <= 2^m sqrt(a) <= {c0} at a={a}")
    bounds = [eps0 * ra] + [2 ** (m + 0.5) * ra for m in range(m_lo, m_hi)] + [c0]
    labels = ["eps0"] + [f"dyadic({m})" for m in range(m_lo, m_hi + 1)] + ["c0"]
    return RegionSplit(a, c0, eps0, tuple(bounds), tuple(labels))


# -- bounds -----------------------------------------------------------------

def bound_disp(h, t):
    """h^-3 min{1, (h/|t|)^(3/4)} (constant 1)."""
    t = abs(t)
    if t == 0:
        return h ** -3.0
    return h ** -3.0 * min(1.0, (h / t) ** 0.75)


def _two_branch(a, base, eps, eps_prime, first, second, what):
    if not 0 < eps_prime < eps < 1.0 / 7.0:
        raise ConfigurationError("need 0 < eps' < eps < 1/7")
    lo = base ** (2.0 / 3.0 * (1 - eps))
    hi = base ** (2.0 / 3.0 * (1 - eps_prime))
    in_first = a <= lo
    in_second = a >= hi
    if in_first and in_second:
        return min(first(), second())
    if in_first:
        return first()
    if in_second:
        return second()
    raise RegimeMismatchError(f"a={a:.4g} falls between the two branches of {what} "
                              f"({lo:.4g} < a < {hi:.4g})")


def gamma(t, h, a, eps=0.1, eps_prime=0.05):
    r = h / t
    return _two_branch(a, h, eps, eps_prime,
                       lambda: r ** (1 / 3),
                       lambda: r ** 0.5 + a ** 0.125 * h ** 0.25, "gamma")


def gamma_m(t, h, a, m, eps=0.1, eps_prime=0.05):
    r = h / t
    s = 2.0 ** m * math.sqrt(a)
    return _two_branch(a, h / s, eps, eps_prime,
                       lambda: r ** (1 / 3) * s ** (1 / 3),
                       lambda: min(r ** 0.5, s * abs(math.log(s))) + a ** 0.125 * h ** 0.25 * s ** 0.75,
                       f"gamma_{m}")


def bound_regime(h, t, a, regime, eps=0.1, eps_prime=0.05):
    """Raw (C = 1) bound for one piece of the split.

    ``regime`` is ``"c0"``, ``"dyadic(m)"`` or ``"eps0"``; ``"disp"`` gives
    the overall bound.  Times outside [h, 1] are outside every piece's
    stated range.
    """
    if regime == "disp":
        return bound_disp(h, t)
    t = abs(t)
    if not h <= t <= 1:
        raise RegimeMismatchError(f"t={t:.4g} outside [h, 1] = [{h:.4g}, 1]")
    pre = h ** -3.0 * (h / t) ** 0.5
    if regime == "c0":
        return pre * gamma(t, h, a, eps, eps_prime)
    if regime.startswith("dyadic(") and regime.endswith(")"):
        return pre * gamma_m(t, h, a, int(regime[7:-1]), eps, eps_prime)
    if regime == "eps0":
        return pre * min((h / t) ** 0.5, math.sqrt(a) * abs(math.log(a)))
    raise ConfigurationError(f"unknown regime {regime!r}")


def caustic_times(a, delta=0.0, N_max=1, C=1.0):
    """t_N = 4 N sqrt(a (1 + a) / (1 - delta^2)) for N = 1..N_max."""
    if not abs(delta) < 1:
        raise DomainError("need |delta| < 1")
    if not a > 0:
        raise DomainError("a must be positive")
    if N_max > math.ceil(C / math.sqrt(a)):
        raise DomainError(f"N_max={N_max} exceeds ceil(C / sqrt(a)) = {math.ceil(C / math.sqrt(a))}")
    base = 4.0 * math.sqrt(a * (1 + a) / (1 - delta ** 2))
    return [N * base for N in range(1, N_max + 1)]


def quantized_return_time(h, a, scale=1.0):
    """Return time of the gliding wave at frequency eta = scale / h built
    from the actual Airy zero spacing instead of its asymptotic law.

    The two modes whose turning points omega_k |eta|^(-2/3) straddle ``a``
    rephase after 4 pi sqrt(1 + a) / (|eta|^(1/3) (omega_{k+1} - omega_k)).
    This tends to caustic_times(a)[0] as h -> 0; for a^(3/2) / h of order
    ten the discrete spacing shifts it by ten percent or more.
    """
    if not (0 < h <= 1 and a > 0):
        raise DomainError("need 0 < h <= 1 and a > 0")
    eta = scale / h
    e23 = eta ** (2.0 / 3.0)
    target = a * e23
    K = int(1.2 * target ** 1.5 / (1.5 * math.pi)) + 8
    om = zero_table(K).omega
    k = int(np.argmin(np.abs(om[:-1] - target)))
    return 4 * math.pi * math.sqrt(1 + a) / (eta ** (1.0 / 3.0) * (om[k + 1] - om[k]))


# -- sup-norm measurement ---------------------------------------------------

@dataclass
class DispersiveSample:
    h: float
    a: float
    t: float
    sup_norm: float
    bound_disp: float
    regime: str = "loc"
    delta: float = 0.0
    N: int | None = None
    K: int = 0
    refinement: tuple = ()
    grid_id: str = ""

    @property
    def ratio(self):
        return self.sup_norm / self.bound_disp


def nested_levels(n_finest, levels):
    """Index strides of nested grids, coarsest first."""
    return [2 ** (levels - 1 - i) for i in range(levels)]


class RegionProbe:
    """Sup norm of G over {0 <= x <= a} x {|y|, |z| <= R(t)}.

    G is even in y and z, so on the lattice each x-slice is a 2-d type-I
    cosine transform of the folded coefficients; this gives the whole
    (y, z) patch at spacing ``dx_factor * h`` in one pass.  Grids are nested
    (every coarse level is a subset of the finest), so the refinement
    sequence of maxima is nondecreasing by construction.
    """

    def __init__(self, synth: GreenSynthesizer, a, dx_factor=0.25, levels=3):
        self.synth, self.a, self.levels = synth, float(a), levels
        h = synth.h
        step = 2 ** (levels - 1)
        n = step
        while a / n > dx_factor * h:
            n *= 2
        self.x = np.linspace(0.0, a, n + 1)
        self.products = synth.source_products(self.x, self.a)
        # transform sizes: N/2 + 1 points with spacing L/N <= dx_factor * h
        self.N = [step * 2 * int(np.ceil(L / (dx_factor * h) / (2 * step)))
                  for L in (synth.L_y, synth.L_z)]
        d_eta = 2 * np.pi / synth.L_y
        d_zeta = 2 * np.pi / synth.L_z
        self.n_idx = [int(round(b[0] / d_eta)) for b in synth.blocks]
        self.m_idx = []
        for b in synth.blocks:
            m = np.rint(b[2] / d_zeta).astype(int)
            self.m_idx.append(m)
        if max(self.n_idx) >= self.N[0] // 2 or max(int(m.max()) for m in self.m_idx) >= self.N[1] // 2:
            raise UnderResolvedError("probe grid does not resolve the lattice frequencies")
        self.dy = synth.L_y / self.N[0]
        self.dz = synth.L_z / self.N[1]

    def y_grid(self, t, speed=1.2, pad=8.0):
        Y = speed * abs(t) + pad * self.synth.h
        step = 2 ** (self.levels - 1)
        n = int(np.ceil(Y / self.dy / step)) * step
        return self.dy * np.arange(n + 1)

    def _extent(self, t, d, N, speed=1.2, pad=8.0):
        step = 2 ** (self.levels - 1)
        R = speed * abs(t) + pad * self.synth.h
        n = int(np.ceil(R / d / step)) * step
        return min(n, N // 2) + 1

    def sample(self, t):
        """Maxima of |G| on the nested grids, coarsest first."""
        syn = self.synth
        W = [w * np.cos(t * mu) for (_, _, _, w, mu) in syn.blocks]
        ny = self._extent(t, self.dy, self.N[0])
        nz = self._extent(t, self.dz, self.N[1])
        strides = nested_levels(len(self.x), self.levels)
        best = np.zeros(len(strides))
        Mz = self.N[1] // 2 + 1
        My = self.N[0] // 2 + 1
        D = np.zeros((len(self.x), My, Mz))
        for n, m, Pn, Wn in zip(self.n_idx, self.m_idx, self.products, W):
            keep = m >= 0
            D[:, n, m[keep]] = Pn @ Wn[:, keep]
        scale = 1.0 / (syn.L_y * syn.L_z)
        for ix in range(len(self.x)):
            G = np.abs(sfft.dctn(D[ix], type=1)[:ny, :nz]) * scale
            for li, stride in enumerate(strides):
                if ix % stride == 0:
                    best[li] = max(best[li], G[::stride, ::stride].max())
        return [float(b) for b in best]

    def sample_plane(self, t, z=0.0):
        """Max of |G| over x <= a, |y| <= R(t) in the single plane z."""
        y = self.y_grid(t)
        G = np.abs(self.synth.evaluate(self.a, t, self.x, y, [z], products=self.products))
        return float(G.max())


def sup_norm_region(req: GreenRequest, prof: CutoffProfile = CutoffProfile(),
                    kind="parametrix", L=DEFAULT_PERIOD, levels=3) -> DispersiveSample:
    """Measured max |G| over x <= a with a refinement report.

    The region is {0 <= x <= a} x {|y|, |z| <= 1.2 |t| + 8 h}; the request's
    point arrays are not used.  Grids are nested with spacing h/4 at the
    finest level.
    """
    syn = GreenSynthesizer(req.h, prof, kind, L, L)
    probe = RegionProbe(syn, req.a, levels=levels)
    sups = probe.sample(req.t)
    return DispersiveSample(req.h, req.a, req.t, sups[-1], bound_disp(req.h, req.t),
                            regime="loc" if kind == "parametrix" else "full",
                            K=syn.K, refinement=tuple(sups))


# -- sweeps -------------------------------------------------------------------

def sweep_a_values(h):
    return [h ** (2 / 3) / 2, h ** (2 / 3), 2 * h ** (2 / 3), 0.25]


def dispersive_sweep(hs=(2 ** -4, 2 ** -5, 2 ** -6, 2 ** -7), n_t=16,
                     prof: CutoffProfile = CutoffProfile(), L=DEFAULT_PERIOD, levels=3,
                     a_values=sweep_a_values, progress=None, ts=None):
    """DispersiveSample list over h, a in a_values(h) and t.

    ``ts`` defaults to n_t log-spaced times in [h, 1]; a callable is
    called with h.
    """
    out = []
    for h in hs:
        syn = GreenSynthesizer(h, prof, "parametrix", L, L)
        probes = [RegionProbe(syn, a, levels=levels) for a in a_values(h)]
        times = np.geomspace(h, 1.0, n_t) if ts is None else (ts(h) if callable(ts) else ts)
        for t in times:
            t = float(t)
            for p in probes:
                sups = p.sample(t)
                out.append(DispersiveSample(h, p.a, float(t), sups[-1], bound_disp(h, t),
                                            K=syn.K, refinement=tuple(sups),
                                            grid_id=f"L{L:g}-x{len(p.x)}-dy{p.dy:.6g}"))
            if progress:
                progress(h, t)
    return out


@dataclass
class EnvelopeFit:
    C: float                  # max ratio: every sample lies under C * bound
    C_lsq: float              # exp(mean log ratio)
    argmax: DispersiveSample
    per_h: dict


def fit_envelope(samples) -> EnvelopeFit:
    ratios = np.array([s.ratio for s in samples])
    if np.any(ratios <= 0):
        raise DomainError("sup norms must be positive to fit an envelope")
    i = int(np.argmax(ratios))
    per_h = {}
    for s in samples:
        per_h[s.h] = max(per_h.get(s.h, 0.0), s.ratio)
    return EnvelopeFit(float(ratios[i]), float(np.exp(np.mean(np.log(ratios)))), samples[i], per_h)


def sweep_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "a", "t", "delta", "regime", "sup_norm", "bound", "ratio", "K", "grid_id"])
    for s in samples:
        w.writerow([f"{s.h:.12g}", f"{s.a:.12g}", f"{s.t:.12g}", f"{s.delta:.12g}", s.regime,
                    f"{s.sup_norm:.12g}", f"{s.bound_disp:.12g}", f"{s.ratio:.12g}", s.K,
                    s.grid_id])
    return buf.getvalue()


def caustic_profile(h, a, ts, delta=0.0, epsilon=0.3, L=8.0, levels=2,
                    prof: CutoffProfile | None = None, width=0.15):
    """Sup norm over x <= a in the plane z = delta t at each time of ``ts``.

    For delta != 0 the zeta / |(eta, zeta)| direction is windowed around delta.
    """
    prof = prof or CutoffProfile(epsilon=epsilon)
    direction = None if delta == 0 else (delta, width)
    syn = GreenSynthesizer(h, prof, "parametrix", L, L, direction=direction)
    probe = RegionProbe(syn, a, levels=levels)
    return np.array([probe.sample_plane(t, z=delta * t) for t in ts])


def local_maxima(values):
    v = np.asarray(values)
    return [i for i in range(1, len(v) - 1) if v[i] >= v[i - 1] and v[i] >= v[i + 1]]
