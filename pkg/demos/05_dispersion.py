"""Spin-wave dispersion on a chain and a square lattice."""

import numpy as np

from neelgen import build_lattice, magnon_dispersion

chain = magnon_dispersion(build_lattice("chain", [16]))
for q, w in zip(chain.momenta[:, 0], chain.omega):
    print(f"q = {q:6.3f}   omega = {w:6.3f}   2|sin q| = {2 * abs(np.sin(q)):6.3f}")

sq = build_lattice("square", [8, 8])
table = magnon_dispersion(sq)
print(f"\nsquare 8x8: omega at q=0 {table.omega[sq.momentum_index([0, 0])]:.2e}, "
      f"at Q {table.omega[sq.momentum_index(sq.Q)]:.2e}, max {table.omega.max():.3f}")
