"""Dirichlet eigenbasis of -d^2/dx^2 + (1 + x) eta^2 + zeta^2 on the half line.

For eta != 0 the eigenfunctions are shifted, rescaled Airy functions

    e_k(x, eta) = f_k |eta|^(1/3) k^(-1/6) Ai(|eta|^(2/3) x - omega_k)

with eigenvalues eta^2 + zeta^2 + omega_k |eta|^(4/3).  Functions on the half
line are represented by samples on a composite Gauss-Legendre grid that is
truncated past the last turning point, where every retained mode has
decayed below quadrature accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .airy import AiryZeroTable, ai_eval, zero_table
from .errors import DomainError, TruncationError, UnderResolvedError

TRUNCATION_MARGIN = 8.0
MIN_NODES_PER_WAVELENGTH = 8


def _check_eta(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(eta == 0):
        raise DomainError("the eta = 0 fiber is degenerate (continuous spectrum)")
    return eta


@dataclass(frozen=True, eq=False)
class HalfLineGrid:
    """Composite Gauss-Legendre quadrature on [0, x_max]."""

    x_max: float
    nodes: np.ndarray
    weights: np.ndarray
    panel_width: float
    n_gauss: int

    @classmethod
    def from_panels(cls, x_max: float, panel_width: float, n_gauss: int = 16):
        if not (x_max > 0 and panel_width > 0):
            raise DomainError("x_max and panel_width must be positive")
        n_panels = max(1, int(np.ceil(x_max / panel_width - 1e-12)))
        edges = np.linspace(0.0, x_max, n_panels + 1)
        g, gw = np.polynomial.legendre.leggauss(n_gauss)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * g[None, :]).ravel()
        weights = (half[:, None] * gw[None, :]).ravel()
        for arr in (nodes, weights):
            arr.setflags(write=False)
        return cls(float(x_max), nodes, weights, float(x_max / n_panels), n_gauss)

    @classmethod
    def for_modes(cls, K: int, eta_min: float, eta_max: float | None = None,
                  table: AiryZeroTable | None = None, n_gauss: int = 16,
                  nodes_per_wavelength: float = 12.0,
                  margin: float = TRUNCATION_MARGIN):
        """Grid holding modes 1..K for every |eta| in [eta_min, eta_max].

        The truncation point sits ``margin`` Airy units past the turning point
        of mode K at the smallest |eta|; the panel width is set from the
        shortest local wavelength, which belongs to mode K at the largest |eta|.
        """
        table = table if table is not None else zero_table(K)
        if K > table.size:
            raise DomainError("K exceeds the zero table")
        eta_min = abs(float(eta_min))
        eta_max = eta_min if eta_max is None else abs(float(eta_max))
        _check_eta(eta_min)
        om = table.omega[K - 1]
        x_max = (om + margin) / eta_min ** (2.0 / 3.0)
        wavelength = 2 * np.pi / (np.sqrt(om) * eta_max ** (1.0 / 3.0))
        panel = wavelength * n_gauss / nodes_per_wavelength
        grid = cls.from_panels(x_max, min(panel, x_max), n_gauss)
        grid.check_resolution(K, eta_max, table)
        return grid

    @property
    def size(self) -> int:
        return len(self.nodes)

    def check_resolution(self, K, eta_max, table=None):
        table = table if table is not None else zero_table(K)
        wavelength = 2 * np.pi / (np.sqrt(table.omega[K - 1]) * abs(eta_max) ** (1.0 / 3.0))
        spacing = self.panel_width / self.n_gauss
        if wavelength / spacing < MIN_NODES_PER_WAVELENGTH:
            raise UnderResolvedError(
                f"grid resolves the shortest wavelength with {wavelength / spacing:.1f} "
                f"nodes, need {MIN_NODES_PER_WAVELENGTH}")

    def integrate(self, f):
        """Quadrature along the last axis."""
        return np.asarray(f) @ self.weights

    def inner(self, f, g):
        return self.integrate(np.conj(f) * g)


@dataclass
class ModeCoefficients:
    eta: float
    zeta: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.ndim != 1 or len(self.coeffs) < 1:
            raise DomainError("need a non-empty 1-d coefficient vector")
        if not np.all(np.isfinite(self.coeffs)):
            raise DomainError("coefficients must be finite")

    @property
    def K(self) -> int:
        return len(self.coeffs)


def eigenvalue(k, eta, zeta, table: AiryZeroTable):
    """lambda_k(eta, zeta) = eta^2 + zeta^2 + omega_k |eta|^(4/3)."""
    k = np.asarray(k)
    if np.any(k < 1) or np.any(k > table.size):
        raise DomainError("mode index outside the zero table")
    eta = _check_eta(eta)
    om = table.omega[k - 1]
    return eta ** 2 + np.asarray(zeta, dtype=float) ** 2 + om * np.abs(eta) ** (4.0 / 3.0)


def mode_values(k, eta, x, table: AiryZeroTable, derivative: bool = False):
    """Eigenfunction samples, shape ``(len(k), len(x))``.

    ``f_k k^(-1/6)`` is folded into ``1/|Ai'(-omega_k)|``.  With
    ``derivative=True`` also returns d/dx e_k on the same points.
    """
    k = np.atleast_1d(np.asarray(k))
    eta = float(_check_eta(eta))
    x = np.asarray(x, dtype=float)
    s = abs(eta) ** (2.0 / 3.0)
    arg = s * x[None, :] - table.omega[k - 1][:, None]
    a, ap = ai_eval(arg)
    scale = (abs(eta) ** (1.0 / 3.0) * table.inv_abs_ai_prime[k - 1])[:, None]
    if derivative:
        return scale * a, scale * s * ap
    return scale * a


def required_x_max(k, eta, table, margin=TRUNCATION_MARGIN):
    return (table.omega[int(np.max(k)) - 1] + margin) / abs(eta) ** (2.0 / 3.0)


def mode_eval(k: int, eta: float, grid: HalfLineGrid, table: AiryZeroTable):
    """Samples of e_k(., eta) on the grid nodes."""
    if k < 1 or k > table.size:
        raise DomainError("mode index outside the zero table")
    _check_eta(eta)
    if grid.x_max < required_x_max(k, eta, table) * (1 - 1e-12):
        raise TruncationError(
            f"x_max={grid.x_max:.4g} does not clear the turning point of mode {k} "
            f"at eta={eta:.4g} (need {required_x_max(k, eta, table):.4g})")
    return mode_values([k], eta, grid.nodes, table)[0]


def _basis(K, eta, grid, table):
    if K > table.size:
        raise DomainError(f"K={K} exceeds the zero table size {table.size}")
    if grid.x_max < required_x_max(K, eta, table) * (1 - 1e-12):
        raise TruncationError(f"grid too short for {K} modes at eta={eta}")
    return mode_values(np.arange(1, K + 1), eta, grid.nodes, table)


def project(f, eta, zeta, K, grid: HalfLineGrid, table: AiryZeroTable) -> ModeCoefficients:
    """c_k = <f, e_k(., eta)> by quadrature."""
    f = np.asarray(f)
    if f.shape != grid.nodes.shape:
        raise DomainError("samples must live on the grid nodes")
    E = _basis(K, eta, grid, table)
    return ModeCoefficients(float(eta), float(zeta), E @ (grid.weights * f))


def synthesize(coeffs: ModeCoefficients, grid: HalfLineGrid, table: AiryZeroTable):
    E = _basis(coeffs.K, coeffs.eta, grid, table)
    return coeffs.coeffs @ E


def gram_matrix(K, eta, grid, table):
    E = _basis(K, eta, grid, table)
    return (E * grid.weights) @ E.T
