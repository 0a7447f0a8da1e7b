"""Local measurement of time-reversal-symmetric antiferromagnetic states.

Brute-force state-vector tools for spin-1/2 lattices: TRS ansatz states,
projective ``s^x`` measurements and cascades, correlators and order
parameters, magnon dispersion and exact post-measurement dynamics.
"""

from .lattice import LatticeError, LatticeSpec, build_lattice, fourier_exchange, ordering_vector
from .state import apply_fourier_op, apply_site_op, inner, norm, sector_decompose
from .trs import build_easy_axis, build_ferro, build_psi_m, default_weight_profile
from .measurement import (
    branch_pair,
    decompose_onto_trs,
    measure_sx,
    run_cascade,
    run_cascades,
    trs_coefficients,
)
from .observables import (
    axis_diagnostics,
    correlator,
    site_bloch,
    site_entropy,
    staggered_order,
    structure_factor,
    sz_moments,
)
from .dynamics import (
    HamiltonianSpec,
    decoherence_kernel,
    evolve,
    exact_green,
    hamiltonian_apply,
    magnon_dispersion,
)

__version__ = "0.1.0"
