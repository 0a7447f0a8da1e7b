"""A cascade of random single-site measurements pins the antiferromagnetic axis.

The easy-plane state has a sharp total ``S_z`` and a completely undetermined
in-plane axis. Every measurement spreads ``S_z`` a little more; as the spread
grows the axis direction becomes sharper, which shows up as a growing
anisotropy ratio ``|K^{--}(Q)| / K^{+-}(Q)``.
"""

import numpy as np

from neelgen import build_lattice, build_psi_m, run_cascades

N = 10
lat = build_lattice("chain", [N])
trajs = run_cascades(build_psi_m(lat, N // 2), lat, "random", N, n_trajectories=40, seed=1)

dsz = np.mean([[s.sz_std for s in t.steps] for t in trajs], axis=0)
ratio = np.mean([[s.axis_anisotropy for s in t.steps] for t in trajs], axis=0)

print("step   Delta S_z   axis ratio")
for k in range(N):
    print(f"{k + 1:4d}   {dsz[k]:9.3f}   {ratio[k]:10.3f}")
