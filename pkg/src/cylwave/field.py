"""Functions on [0, x_max] x T(L_y) x T(L_z) in the half-line/Fourier basis.

A real field is stored through coefficients ``c[k, n_y, n_z]`` (numpy FFT
ordering in the two periodic directions) of the orthonormal basis

    B_{k,n,m}(x, y, z) = e_k(x, eta_n) exp(i (eta_n y + zeta_m z)) / sqrt(L_y L_z)

so the coefficient l2 norm equals the L2 norm of the field, and the
Dirichlet form of -Delta is ``sum lambda |c|**2``.  The eta = 0 column and
the Nyquist rows are excluded; data must have zero mean in y.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .airy import zero_table
from .bumps import LPProfile
from .errors import DomainError, ShapeError
from .halfline import HalfLineGrid, mode_values, required_x_max

DEFAULT_PERIOD = 2 * np.pi * 2 ** 4


def _lattice(L, N):
    n = np.fft.fftfreq(N, d=1.0 / N)
    return 2 * np.pi * n / L, n.astype(int)


@dataclass(eq=False)
class DomainGrid:
    halfline: HalfLineGrid
    L_y: float
    L_z: float
    N_y: int
    N_z: int
    K: int
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name in ("N_y", "N_z"):
            n = getattr(self, name)
            if n < 4 or n % 2:
                raise DomainError(f"{name} must be an even integer >= 4")
        if not (self.L_y > 0 and self.L_z > 0):
            raise DomainError("periods must be positive")
        self.table = zero_table(self.K)
        self.eta, n_y = _lattice(self.L_y, self.N_y)
        self.zeta, n_z = _lattice(self.L_z, self.N_z)
        ok_y = (n_y != 0) & (np.abs(n_y) < self.N_y // 2)
        ok_z = np.abs(n_z) < self.N_z // 2
        self.active = ok_y[:, None] & ok_z[None, :]
        self.abs_n = np.abs(n_y)
        eta_min = 2 * np.pi / self.L_y
        if self.halfline.x_max < required_x_max(self.K, eta_min, self.table) * (1 - 1e-12):
            from .errors import TruncationError
            raise TruncationError("half-line grid does not hold K modes at the smallest eta")
        # modal tables indexed by |n|; rows 0 and N_y/2 (masked) stay zero
        nx = self.halfline.size
        n_unique = self.N_y // 2
        self.E = np.zeros((n_unique + 1, self.K, nx))
        self.dE = np.zeros((n_unique + 1, self.K, nx))
        ks = np.arange(1, self.K + 1)
        for j in range(1, n_unique):
            e, de = mode_values(ks, 2 * np.pi * j / self.L_y, self.halfline.nodes,
                                self.table, derivative=True)
            self.E[j], self.dE[j] = e, de
        om = self.table.omega[:, None, None]
        lam = (self.eta[None, :, None] ** 2 + self.zeta[None, None, :] ** 2
               + om * np.abs(self.eta)[None, :, None] ** (4.0 / 3.0))
        self.lam = np.where(self.active[None], lam, np.inf)

    @classmethod
    def build(cls, K=20, L_y=DEFAULT_PERIOD, L_z=DEFAULT_PERIOD, N_y=16, N_z=16,
              n_gauss=16, nodes_per_wavelength=12.0):
        eta_min = 2 * np.pi / L_y
        eta_max = 2 * np.pi * (N_y // 2 - 1) / L_y
        hl = HalfLineGrid.for_modes(K, eta_min, eta_max, n_gauss=n_gauss,
                                    nodes_per_wavelength=nodes_per_wavelength)
        return cls(hl, float(L_y), float(L_z), int(N_y), int(N_z), int(K))

    @property
    def shape(self):
        return (self.K, self.N_y, self.N_z)

    @property
    def sample_shape(self):
        return (self.halfline.size, self.N_y, self.N_z)

    @property
    def lam_active(self):
        return self.lam[:, self.active]

    def y_nodes(self, pad=1):
        return np.arange(self.N_y * pad) * self.L_y / (self.N_y * pad)

    def z_nodes(self, pad=1):
        return np.arange(self.N_z * pad) * self.L_z / (self.N_z * pad)

    def cell_weights(self, pad=1):
        dy = self.L_y / (self.N_y * pad)
        dz = self.L_z / (self.N_z * pad)
        return self.halfline.weights[:, None, None] * (dy * dz)

    @property
    def volume(self):
        return self.halfline.x_max * self.L_y * self.L_z

    def _E_full(self, table):
        key = ("full", id(table))
        if key not in self._cache:
            self._cache[key] = table[self.abs_n]
        return self._cache[key]

    def describe(self) -> dict:
        hl = self.halfline
        return {"x_max": hl.x_max, "panel_width": hl.panel_width, "n_gauss": hl.n_gauss,
                "L_y": self.L_y, "L_z": self.L_z, "N_y": self.N_y, "N_z": self.N_z,
                "K": self.K}

    @classmethod
    def from_description(cls, d: dict):
        hl = HalfLineGrid.from_panels(d["x_max"], d["panel_width"], d["n_gauss"])
        return cls(hl, d["L_y"], d["L_z"], d["N_y"], d["N_z"], d["K"])


class SpectralField:
    """Immutable-by-convention value type: coefficients plus grid reference."""

    __slots__ = ("grid", "c")

    def __init__(self, grid: DomainGrid, c):
        c = np.asarray(c, dtype=complex)
        if c.shape != grid.shape:
            raise ShapeError(f"coefficient shape {c.shape} != {grid.shape}")
        self.grid = grid
        self.c = c

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def _check(self, other):
        if other.grid is not self.grid:
            raise ShapeError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.c + other.c)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.c - other.c)

    def __mul__(self, alpha):
        return SpectralField(self.grid, self.c * alpha)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.c)

    def l2(self):
        return float(np.sqrt(np.sum(np.abs(self.c) ** 2)))

    def multiply(self, m):
        """Apply a spectral multiplier given as an array over (k, n_y, n_z)."""
        m = np.where(self.grid.active[None], m, 0.0)
        return SpectralField(self.grid, self.c * m)


def hermitian_symmetrize(grid: DomainGrid, c):
    """Project coefficients onto those of real fields: c(-n, -m) = conj c(n, m)."""
    flipped = np.conj(np.roll(c[:, ::-1, ::-1], 1, axis=(1, 2)))
    return np.where(grid.active[None], 0.5 * (c + flipped), 0.0)


def random_field(grid: DomainGrid, rng, envelope=None):
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if envelope is not None:
        c = c * envelope
    return SpectralField(grid, hermitian_symmetrize(grid, c))


def _spectral_to_x(S: SpectralField, derivative=False):
    """V[i, n, m] = sum_k c[k, n, m] e_k(x_i, eta_n)."""
    g = S.grid
    E = g._E_full(g.dE if derivative else g.E)            # (N_y, K, nx)
    V = np.matmul(E.transpose(0, 2, 1), S.c.transpose(1, 0, 2))   # (N_y, nx, N_z)
    return V.transpose(1, 0, 2)


def _x_to_spectral(g: DomainGrid, V):
    Ew = g._E_full(g.E) * g.halfline.weights               # (N_y, K, nx)
    c = np.matmul(Ew, V.transpose(1, 0, 2))                # (N_y, K, N_z)
    return np.where(g.active[None], c.transpose(1, 0, 2), 0.0)


def _embed(V, P_y, P_z):
    nx, N_y, N_z = V.shape
    out = np.zeros((nx, P_y, P_z), dtype=complex)
    iy = np.fft.fftfreq(N_y, 1.0 / N_y).astype(int) % P_y
    iz = np.fft.fftfreq(N_z, 1.0 / N_z).astype(int) % P_z
    out[:, iy[:, None], iz[None, :]] = V
    return out


def _extract(W, N_y, N_z):
    _, P_y, P_z = W.shape
    iy = np.fft.fftfreq(N_y, 1.0 / N_y).astype(int) % P_y
    iz = np.fft.fftfreq(N_z, 1.0 / N_z).astype(int) % P_z
    return W[:, iy[:, None], iz[None, :]]


def inverse(S: SpectralField, pad: int = 1, real: bool = True, part="u"):
    """Samples on the (optionally oversampled) grid.

    ``part`` selects the field (``"u"``) or one of its derivatives
    (``"dx"``, ``"dy"``, ``"dz"``).
    """
    g = S.grid
    V = _spectral_to_x(S, derivative=(part == "dx"))
    if part == "dy":
        V = V * (1j * g.eta)[None, :, None]
    elif part == "dz":
        V = V * (1j * g.zeta)[None, None, :]
    P_y, P_z = g.N_y * pad, g.N_z * pad
    if pad != 1:
        V = _embed(V, P_y, P_z)
    u = np.fft.ifft2(V, axes=(1, 2)) * (P_y * P_z / np.sqrt(g.L_y * g.L_z))
    return u.real if real else u


def forward(grid: DomainGrid, samples, pad: int = 1) -> SpectralField:
    samples = np.asarray(samples)
    P_y, P_z = grid.N_y * pad, grid.N_z * pad
    expected = (grid.halfline.size, P_y, P_z)
    if samples.shape != expected:
        raise ShapeError(f"samples shape {samples.shape} != {expected}")
    U = np.fft.fft2(samples, axes=(1, 2)) * (np.sqrt(grid.L_y * grid.L_z) / (P_y * P_z))
    if pad != 1:
        U = _extract(U, grid.N_y, grid.N_z)
    return SpectralField(grid, _x_to_spectral(grid, U))


def evaluate_tensor(S: SpectralField, xs, ys, zs, part="u"):
    """Field values on an arbitrary tensor grid, shape (len(xs), len(ys), len(zs))."""
    g = S.grid
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    ks = np.arange(1, g.K + 1)
    n_unique = g.N_y // 2
    Ex = np.zeros((n_unique + 1, g.K, len(xs)))
    for j in range(1, n_unique):
        e = mode_values(ks, 2 * np.pi * j / g.L_y, xs, g.table, derivative=(part == "dx"))
        Ex[j] = e[1] if part == "dx" else e
    c = S.c
    if part == "dy":
        c = c * (1j * g.eta)[None, :, None]
    elif part == "dz":
        c = c * (1j * g.zeta)[None, None, :]
    V = np.matmul(Ex[g.abs_n].transpose(0, 2, 1), c.transpose(1, 0, 2))  # (N_y, nx, N_z)
    Fy = np.exp(1j * np.outer(ys, g.eta))                                 # (ny, N_y)
    Fz = np.exp(1j * np.outer(g.zeta, zs))                                # (N_z, nz)
    out = np.einsum("yn,nxm,mz->xyz", Fy, V, Fz, optimize=True)
    return (out / np.sqrt(g.L_y * g.L_z)).real


class PointEvaluator:
    """Field and derivative values at fixed scattered points.

    The half-line modes and Fourier factors at the points are computed once,
    so repeated evaluation along a trajectory is a sequence of small matrix
    products.
    """

    def __init__(self, grid: DomainGrid, x, y, z):
        g = self.grid = grid
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        z = np.asarray(z, dtype=float).ravel()
        if not (len(x) == len(y) == len(z)):
            raise ShapeError("point coordinate arrays differ in length")
        if np.any(x < 0):
            raise DomainError("points need x >= 0")
        self.size = len(x)
        ks = np.arange(1, g.K + 1)
        n_unique = g.N_y // 2
        self.E = np.zeros((n_unique + 1, g.K, len(x)))
        self.dE = np.zeros_like(self.E)
        for j in range(1, n_unique):
            self.E[j], self.dE[j] = mode_values(ks, 2 * np.pi * j / g.L_y, x, g.table,
                                                derivative=True)
        self.Yn = np.exp(1j * np.outer(g.eta, y))            # (N_y, P)
        self.Zm = np.exp(1j * np.outer(g.zeta, z))           # (N_z, P)
        self.rows = [n for n in range(g.N_y) if g.active[n].any()]

    def __call__(self, S: SpectralField, parts=("u",)):
        g = self.grid
        if S.grid is not g:
            raise ShapeError("field lives on a different grid")
        acc = {p: np.zeros(self.size, dtype=complex) for p in parts}
        for n in self.rows:
            e, de = self.E[g.abs_n[n]], self.dE[g.abs_n[n]]
            Z = S.c[:, n, :] @ self.Zm                       # (K, P)
            base = self.Yn[n]
            if "u" in parts or "dy" in parts:
                ue = np.sum(Z * e, axis=0) * base
                if "u" in parts:
                    acc["u"] += ue
                if "dy" in parts:
                    acc["dy"] += 1j * g.eta[n] * ue
            if "dx" in parts:
                acc["dx"] += base * np.sum(Z * de, axis=0)
            if "dz" in parts:
                Zz = (S.c[:, n, :] * (1j * g.zeta)[None, :]) @ self.Zm
                acc["dz"] += base * np.sum(Zz * e, axis=0)
        s = 1.0 / np.sqrt(g.L_y * g.L_z)
        return {p: (acc[p] * s).real for p in parts}


def evaluate_points(S: SpectralField, x, y, z, parts=("u",)):
    """Field (and derivative) values at scattered points; returns a dict."""
    return PointEvaluator(S.grid, x, y, z)(S, parts)


def frac_laplacian(S: SpectralField, s: float) -> SpectralField:
    """Apply (-Delta)^(s/2): multiply each coefficient by lambda^(s/2)."""
    g = S.grid
    m = np.where(g.active[None], np.where(np.isfinite(g.lam), g.lam, 1.0) ** (s / 2.0), 0.0)
    return S.multiply(m)


def sobolev_norm(S: SpectralField, beta: float) -> float:
    """Homogeneous norm (sum lambda^beta |c|^2)^(1/2)."""
    g = S.grid
    lam = g.lam[:, g.active]
    return float(np.sqrt(np.sum(lam ** beta * np.abs(S.c[:, g.active]) ** 2)))


def lp_project(S: SpectralField, j: int, profile: LPProfile = LPProfile()) -> SpectralField:
    g = S.grid
    root = np.sqrt(np.where(np.isfinite(g.lam), g.lam, 0.0))
    return S.multiply(profile(2.0 ** (-j) * root))


def lp_scales(S: SpectralField, profile: LPProfile = LPProfile()) -> range:
    root = np.sqrt(S.grid.lam_active)
    return profile.active_scales(root.min(), root.max())


def sobolev_norm_lp(S: SpectralField, beta: float, profile: LPProfile = LPProfile()) -> float:
    """Littlewood-Paley form (sum_j 4^(j beta) ||chi(2^-j sqrt(-Delta)) u||^2)^(1/2)."""
    total = 0.0
    for j in lp_scales(S, profile):
        total += 2.0 ** (2 * j * beta) * lp_project(S, j, profile).l2() ** 2
    return float(np.sqrt(total))


def square_function(S: SpectralField, profile: LPProfile = LPProfile(), pad: int = 1):
    """Grid samples of (sum_j |chi(2^-j sqrt(-Delta)) u|^2)^(1/2)."""
    acc = 0.0
    for j in lp_scales(S, profile):
        acc = acc + inverse(lp_project(S, j, profile), pad=pad) ** 2
    return np.sqrt(acc)


def lebesgue_norm(values, r: float, weights) -> float:
    """Quadrature L^r norm; ``r = inf`` gives the max over nodes."""
    if not r >= 1:
        raise DomainError("Lebesgue exponent must satisfy r >= 1")
    a = np.abs(np.asarray(values))
    if np.isinf(r):
        return float(a.max()) if a.size else 0.0
    m = a.max() if a.size else 0.0
    if m == 0:
        return 0.0
    # scale out the maximum so large exponents cannot overflow
    return float(m * np.sum(weights * (a / m) ** r) ** (1.0 / r))


def field_lebesgue_norm(S: SpectralField, r: float, pad: int = 2) -> float:
    return lebesgue_norm(inverse(S, pad=pad), r, S.grid.cell_weights(pad))


def mixed_norm(spatial_norms, q: float, T: float) -> float:
    """L^q in time of a sequence of spatial norms on a uniform grid of [0, T].

    Composite trapezoid rule for finite q, max for q = inf.
    """
    a = np.asarray(spatial_norms, dtype=float)
    if a.size == 0:
        raise DomainError("empty trajectory")
    if not q >= 1:
        raise DomainError("time exponent must satisfy q >= 1")
    if np.isinf(q):
        return float(a.max())
    if a.size == 1:
        return float(a[0] * T ** (1.0 / q))
    dt = T / (a.size - 1)
    w = np.full(a.size, dt)
    w[0] = w[-1] = dt / 2
    return float(np.sum(w * a ** q) ** (1.0 / q))


def dirichlet_form_quadrature(S: SpectralField, pad: int = 2, flat: bool = False) -> float:
    """Grid quadrature of |d_x u|^2 + (1 + x)|d_y u|^2 + |d_z u|^2.

    ``flat=True`` drops the metric weight (1 + x) -> 1.
    """
    g = S.grid
    w = g.cell_weights(pad)
    x = 0.0 if flat else g.halfline.nodes[:, None, None]
    ux = inverse(S, pad, part="dx")
    uy = inverse(S, pad, part="dy")
    uz = inverse(S, pad, part="dz")
    return float(np.sum(w * (ux ** 2 + (1 + x) * uy ** 2 + uz ** 2)))


def dirichlet_form(S: SpectralField) -> float:
    return sobolev_norm(S, 1.0) ** 2


# -- snapshot serialisation -------------------------------------------------

MAGIC = b"CYLWFLD1"
_HEADER = np.dtype([("magic", "S8"), ("version", "<u4"), ("dims", "<i8", (3,)),
                    ("L_y", "<f8"), ("L_z", "<f8"), ("x_max", "<f8"), ("K", "<i8")])


def save_field(S: SpectralField, path) -> None:
    """Write the flat binary layout plus a JSON sidecar ``<path>.json``."""
    path = Path(path)
    g = S.grid
    head = np.zeros((), dtype=_HEADER)
    head["magic"] = MAGIC
    head["version"] = 1
    head["dims"] = g.shape
    head["L_y"], head["L_z"], head["x_max"], head["K"] = g.L_y, g.L_z, g.halfline.x_max, g.K
    body = np.ascontiguousarray(S.c, dtype="<c16")
    _atomic_write(path, head.tobytes() + body.tobytes())
    side = {"format": "cylwave-field", "version": 1, "layout": "row-major c[k][n_y][n_z]",
            "dtype": "complex128-le", "ordering": "numpy fftfreq", "grid": g.describe()}
    _atomic_write(Path(str(path) + ".json"),
                  (json.dumps(side, indent=2, sort_keys=True) + "\n").encode())


def load_field(path, grid: DomainGrid | None = None) -> SpectralField:
    path = Path(path)
    raw = path.read_bytes()
    head = np.frombuffer(raw[:_HEADER.itemsize], dtype=_HEADER)[0]
    if head["magic"] != MAGIC:
        raise ShapeError("not a cylwave field snapshot")
    if grid is None:
        side = json.loads(Path(str(path) + ".json").read_text())
        grid = DomainGrid.from_description(side["grid"])
    dims = tuple(int(d) for d in head["dims"])
    if dims != grid.shape:
        raise ShapeError(f"snapshot dims {dims} do not match grid {grid.shape}")
    c = np.frombuffer(raw[_HEADER.itemsize:], dtype="<c16").reshape(dims).copy()
    return SpectralField(grid, c)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)
