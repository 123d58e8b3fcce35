"""The x-direction building block: Airy zeros and the Dirichlet eigenfunctions
of -d^2/dx^2 + (1 + x) eta^2 on the half-line.

Prints the first zeros against their asymptotic law, then checks that the
normalised modes e_k(x, eta) are orthonormal under the Gauss panel quadrature
for a few values of eta.
"""
import numpy as np

from cylwave.airy import ai, asymptotic_zero, zero_table
from cylwave.halfline import HalfLineGrid, gram_matrix, mode_values

K = 20
table = zero_table(K)
k = np.arange(1, K + 1)

print(" k    omega_k          (3 pi k / 2)^(2/3)   k * rel.err   |Ai(-omega_k)|")
for kk, om, asy in zip(k, table.omega, asymptotic_zero(k)):
    print(f"{kk:2d}  {om:16.12f}  {asy:16.12f}  {kk * abs(om / asy - 1):10.4f}    {abs(ai(-om)):.1e}")

print("\nGram defect max |<e_j, e_k> - delta_jk| for K = 20:")
for eta in (0.5, 1.0, 2.0, 8.0):
    grid = HalfLineGrid.for_modes(K, eta, table=table)
    G = gram_matrix(K, eta, grid, table)
    print(f"  eta = {eta:4.1f}: {np.max(np.abs(G - np.eye(K))):.2e}   ({grid.size} nodes, x_max = {grid.nodes[-1]:.1f})")

# the modes are squeezed towards the boundary as |eta| grows
x = np.linspace(0, 3, 7)
print("\ne_1(x, eta) on x = 0, 0.5, ..., 3")
for eta in (1.0, 4.0, 16.0):
    print(f"  eta = {eta:4.1f}:", " ".join(f"{v:8.4f}" for v in mode_values([1], eta, x, table)[0]))
