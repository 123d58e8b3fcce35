import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylwave.bumps import LPProfile
from cylwave.errors import DomainError, ShapeError, TruncationError
from cylwave.field import (DomainGrid, SpectralField, dirichlet_form, dirichlet_form_quadrature,
                           evaluate_points, evaluate_tensor, field_lebesgue_norm, forward,
                           frac_laplacian, inverse, lebesgue_norm, load_field, lp_project,
                           lp_scales, mixed_norm, random_field, save_field, sobolev_norm,
                           sobolev_norm_lp, square_function)
from cylwave.halfline import HalfLineGrid


def smooth(grid, rng, decay=4.0):
    lam = np.where(grid.active[None], grid.lam, 0.0)
    return random_field(grid, rng, np.where(grid.active[None], np.exp(-lam / decay), 0.0))


def test_round_trip_and_parseval(small_grid, rng):
    S = random_field(small_grid, rng)
    vals = inverse(S)
    back = forward(small_grid, vals)
    assert np.max(np.abs(back.c - S.c)) < 1e-10
    quad = math.sqrt(np.sum(small_grid.cell_weights() * vals ** 2))
    assert quad == pytest.approx(S.l2(), rel=1e-8)


def test_masked_entries_stay_zero(small_grid, rng):
    S = random_field(small_grid, rng)
    assert np.all(S.c[:, ~small_grid.active] == 0)
    assert np.all(np.isinf(small_grid.lam[:, ~small_grid.active]))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31))
def test_energy_form_identity(small_grid, seed):
    S = smooth(small_grid, np.random.default_rng(seed))
    spectral = dirichlet_form(S)
    assert dirichlet_form_quadrature(S) == pytest.approx(spectral, rel=1e-6)


def test_lp_partition_sums_to_one(small_grid):
    prof = LPProfile()
    root = np.sqrt(small_grid.lam_active)
    total = sum(prof(2.0 ** -j * root) for j in prof.active_scales(root.min(), root.max()))
    assert np.max(np.abs(total - 1)) < 1e-10


def test_lp_projections_reassemble(small_grid, rng):
    S = random_field(small_grid, rng)
    parts = [lp_project(S, j) for j in lp_scales(S)]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    assert (total - S).l2() < 1e-10 * S.l2()


def test_lp_sobolev_norm_is_equivalent(small_grid, rng):
    S = random_field(small_grid, rng)
    ratio = sobolev_norm_lp(S, 1.0) / sobolev_norm(S, 1.0)
    assert 0.25 < ratio < 4.0


def test_square_function_comparable_in_l2(small_grid, rng):
    S = random_field(small_grid, rng)
    sq = square_function(S)
    w = small_grid.cell_weights()
    # in L2 the square function is comparable to the field (almost orthogonal blocks)
    assert lebesgue_norm(sq, 2, w) == pytest.approx(S.l2(), rel=0.5)


def test_frac_laplacian_powers(small_grid, rng):
    S = random_field(small_grid, rng)
    a = frac_laplacian(frac_laplacian(S, 0.3), 0.7)
    assert (a - frac_laplacian(S, 1.0)).l2() < 1e-12 * frac_laplacian(S, 1.0).l2()
    assert sobolev_norm(S, 1.0) ** 2 == pytest.approx(dirichlet_form(S))


def test_point_and_tensor_evaluation_agree(small_grid, rng):
    S = smooth(small_grid, rng)
    xs, ys, zs = np.array([0.0, 0.4, 2.0]), np.array([0.3, 5.0]), np.array([1.1])
    T = evaluate_tensor(S, xs, ys, zs)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    P = evaluate_points(S, X.ravel(), Y.ravel(), Z.ravel())["u"]
    assert np.allclose(P, T.ravel(), atol=1e-13)
    assert np.all(np.abs(T[0]) < 1e-13)       # Dirichlet boundary


def test_tensor_evaluation_matches_grid_synthesis(small_grid, rng):
    S = smooth(small_grid, rng)
    g = small_grid
    xs = g.halfline.nodes[:5]
    T = evaluate_tensor(S, xs, g.y_nodes(), g.z_nodes())
    assert np.allclose(T, inverse(S)[:5], atol=1e-12)


def test_derivatives_by_difference(small_grid, rng):
    S = smooth(small_grid, rng)
    p = (np.array([0.7]), np.array([1.3]), np.array([2.1]))
    d = evaluate_points(S, *p, parts=("dx", "dy", "dz"))
    h = 1e-6
    for i, key in enumerate(("dx", "dy", "dz")):
        plus = [c.copy() for c in p]
        minus = [c.copy() for c in p]
        plus[i] += h
        minus[i] -= h
        fd = (evaluate_points(S, *plus)["u"] - evaluate_points(S, *minus)["u"]) / (2 * h)
        assert d[key][0] == pytest.approx(fd[0], abs=1e-7)


def test_lebesgue_norms(small_grid, rng):
    w = small_grid.cell_weights()
    ones = np.ones(small_grid.sample_shape)
    vol = float(np.sum(w * ones))
    assert lebesgue_norm(ones, 4, w) == pytest.approx(vol ** 0.25)
    assert lebesgue_norm(-3 * ones, math.inf, w) == 3
    with pytest.raises(DomainError):
        lebesgue_norm(ones, 0.5, w)
    S = random_field(small_grid, rng)
    assert field_lebesgue_norm(S, 2) == pytest.approx(S.l2(), rel=1e-10)


def test_lebesgue_norm_survives_huge_values(small_grid):
    w = small_grid.cell_weights()
    v = np.full(small_grid.sample_shape, 1e200)
    assert np.isfinite(lebesgue_norm(v, 10, w))


def test_mixed_norm():
    assert mixed_norm([2.0, 2.0, 2.0], 5, 1.0) == pytest.approx(2.0)
    assert mixed_norm([1.0, 3.0, 2.0], math.inf, 1.0) == 3.0
    with pytest.raises(DomainError):
        mixed_norm([], 2, 1.0)


def test_field_arithmetic_checks_grid(small_grid, rng):
    other = DomainGrid.build(K=4, L_y=4 * math.pi, L_z=4 * math.pi, N_y=8, N_z=8)
    with pytest.raises(ShapeError):
        random_field(small_grid, rng) + SpectralField.zeros(other)
    with pytest.raises(ShapeError):
        SpectralField(small_grid, np.zeros((2, 2, 2)))


def test_short_halfline_grid_rejected(small_grid):
    hl = HalfLineGrid.from_panels(2.0, 0.5)
    with pytest.raises(TruncationError):
        DomainGrid(hl, small_grid.L_y, small_grid.L_z, 8, 8, 6)


def test_save_load_round_trip(small_grid, rng, tmp_path):
    S = random_field(small_grid, rng)
    path = tmp_path / "snap.bin"
    save_field(S, path)
    assert (tmp_path / "snap.bin.json").exists()
    back = load_field(path)
    assert np.array_equal(back.c, S.c)
    assert back.grid.describe() == small_grid.describe()
    assert not list(tmp_path.glob("*.tmp"))


def test_load_rejects_foreign_file(tmp_path, small_grid):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"x" * 200)
    with pytest.raises(ShapeError):
        load_field(p, small_grid)
