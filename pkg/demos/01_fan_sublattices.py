"""Measuring one spin of the easy-plane TRS state.

Before the measurement every site is fully unpolarized. Measuring ``s^x`` on
site 0 collapses the state into a "fan": every other spin picks up a
polarization of about 1/4 along x, with the sign alternating between the two
sublattices, while y and z stay exactly zero.
"""

import numpy as np

from neelgen import branch_pair, build_lattice, build_psi_m
from neelgen.observables import bloch_map

N = 12
lat = build_lattice("chain", [N])
psi = build_psi_m(lat, N // 2)

print("Bloch vectors before measurement (max |b|):", np.abs(bloch_map(psi, lat)).max())

pair = branch_pair(psi, 0)
print(f"outcome probabilities: p+ = {pair.p_plus:.6f}, p- = {pair.p_minus:.6f}")

# Follow the +1/2 outcome.
post = pair.plus_branch / np.sqrt(pair.p_plus)
sx = bloch_map(post, lat)[:, 0] / 2
print("\nsite   eta   <s^x>")
for j in range(N):
    print(f"{j:4d}  {lat.eta[j]:+d}   {sx[j]:+.4f}")

others = (sx * lat.eta)[1:]
print(f"\nmean staggered <s^x> off the measured site: {others.mean():.4f}"
      f"  (N/(4(N-1)) = {N / (4 * (N - 1)):.4f}, large-N value 0.25)")
