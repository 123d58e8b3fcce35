"""Spectral laboratory for the wave equation on the half space x >= 0 with
the convex model Laplacian d_x^2 + (1 + x) d_y^2 + d_z^2 and periodic (y, z).

Modules: ``airy`` (Airy function and zeros), ``halfline`` (Dirichlet
eigenbasis of the fiber operators), ``field`` (spectral fields, transforms,
norms), ``propagator`` (exact linear flow, Strichartz bookkeeping),
``green`` (frequency-localized Green functions and dispersive bounds),
``nlw`` (quintic wave solver and light-cone diagnostics), ``cli``.
"""
__version__ = "0.1.0"
