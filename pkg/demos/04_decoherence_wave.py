"""The decoherence wave: magnon estimate versus exact dynamics.

The magnon kernel ``G(r, t)`` starts as a spike of height 1/4 at the measured
site and spreads with the spin-wave velocity ``2J``. The exact Green function
on a small chain is printed alongside for comparison.
"""

import numpy as np

from neelgen import HamiltonianSpec, branch_pair, build_lattice, build_psi_m, decoherence_kernel, exact_green
from neelgen.dynamics import front_position

lat = build_lattice("chain", [64])
r = np.arange(-31, 33)
times = np.arange(0, 17, 2.0)
field = decoherence_kernel(lat, r, times)
peak = front_position(field)
edge = front_position(field, "leading_edge")
print("   t   2t   peak |r|   half-max edge")
for t, p, e in zip(times, peak, edge):
    print(f"{t:4.0f} {2 * t:4.0f}   {p:8.0f}   {e:13.0f}")

N = 10
small = build_lattice("chain", [N])
psi = branch_pair(build_psi_m(small, N // 2), 0).plus_branch
exact = exact_green(HamiltonianSpec(small), psi, range(N // 2 + 1), [0.5, 1.0, 2.0])
print("\nexact |G(r, t)| on N=10, rows t = 0.5, 1, 2")
print(np.round(np.abs(exact.values), 4))
