"""Time-reversal-symmetric (TRS) antiferromagnetic ansatz states.

The easy-plane family is

    |Psi_M> = [N^M (N-M)! / (M! N!)]^{1/2} (S^-_Q)^M |0>,   S = 1/2,

where ``|0>`` is the fully polarized (all up) state. Expanding the power gives
equal-magnitude amplitudes on every configuration with ``M`` down spins, with
sign ``prod_{j down} eta_j``; the normalized amplitude is
``prod eta_j / sqrt(C(N, M))``.

The easy-axis state is a superposition ``sum u_M |Psi_M>`` over even ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec
from .state import apply_fourier_op, basis_state, popcounts


def build_ferro(lattice: LatticeSpec) -> np.ndarray:
    N = lattice.n_sites
    return basis_state(N, (1 << N) - 1)


def psi_m_log_prefactor(N: int, M: int) -> float:
    """Log of the normalization ``[N^M (N-M)! / (M! N!)]^{1/2}``."""
    return 0.5 * (M * math.log(N) + math.lgamma(N - M + 1) - math.lgamma(M + 1) - math.lgamma(N + 1))


def _check_m(N: int, M: int) -> None:
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside 0..{N}")


def _sublattice_mask(lattice: LatticeSpec) -> int:
    return sum(1 << j for j, e in enumerate(lattice.eta) if e < 0)


def build_psi_m(lattice: LatticeSpec, M: int, method: str = "fill") -> np.ndarray:
    """Normalized ``|Psi_M>``.

    ``method="fill"`` writes the amplitudes combinatorially; ``"ladder"``
    applies ``S^-_Q`` ``M`` times to the ferromagnet and multiplies by the
    prefactor (evaluated in log space). Both give the same vector.
    """
    N = lattice.n_sites
    _check_m(N, M)
    if method == "ladder":
        psi = build_ferro(lattice)
        for _ in range(M):
            psi = apply_fourier_op(psi, lattice, lattice.Q, "S-")
        # (S^-_Q)^M |0> has amplitudes M! N^{-M/2}; this keeps the product finite.
        return psi * math.exp(psi_m_log_prefactor(N, M))
    if method != "fill":
        raise ValueError(f"unknown method {method!r}")

    full = (1 << N) - 1
    idx = np.arange(1 << N, dtype=np.uint64)
    in_sector = popcounts(N) == N - M
    # Each down spin on the eta = -1 sublattice contributes a factor -1.
    odd_down = np.bitwise_count(~idx & np.uint64(full) & np.uint64(_sublattice_mask(lattice)))
    sign = 1.0 - 2.0 * (odd_down & 1)
    amp = math.exp(-0.5 * (math.lgamma(N + 1) - math.lgamma(M + 1) - math.lgamma(N - M + 1)))
    return np.where(in_sector, sign * amp, 0.0).astype(complex)


def trs_family(lattice: LatticeSpec) -> list[np.ndarray]:
    """``[|Psi_0>, ..., |Psi_N>]``."""
    return [build_psi_m(lattice, M) for M in range(lattice.n_sites + 1)]


@dataclass(frozen=True)
class EasyAxisWeights:
    """Amplitudes ``u`` indexed directly by ``M`` (zero for odd ``M``)."""

    u: np.ndarray
    center: float
    sigma: float

    @property
    def n_sites(self) -> int:
        return len(self.u) - 1


def default_weight_profile(N: int, sigma: float | None = None) -> EasyAxisWeights:
    """Gaussian weights ``u_M ~ exp(-(M - N/2)^2 / (4 sigma^2))`` on even ``M``.

    ``u_M**2`` is therefore a Gaussian of width ``sigma`` centred on the
    antiferromagnetic sector ``M = N/2``. ``sigma`` defaults to ``sqrt(N)/4``.
    """
    if N % 2:
        raise ValueError(f"N must be even, got {N}")
    if sigma is None:
        sigma = math.sqrt(N) / 4.0
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    M = np.arange(N + 1)
    log_u = -((M - N / 2.0) ** 2) / (4.0 * sigma**2)
    log_u = np.where(M % 2 == 0, log_u, -np.inf)
    u = np.exp(log_u - log_u.max())
    u /= np.linalg.norm(u)
    return EasyAxisWeights(u=u, center=N / 2.0, sigma=float(sigma))


def build_easy_axis(lattice: LatticeSpec, weights: EasyAxisWeights) -> np.ndarray:
    """Normalized ``sum_M u_M |Psi_M>`` over even ``M``."""
    N = lattice.n_sites
    u = np.asarray(weights.u, dtype=float)
    if len(u) != N + 1:
        raise ValueError(f"weights cover M=0..{len(u) - 1}, lattice needs 0..{N}")
    if np.any(u[1::2] != 0):
        raise ValueError("easy-axis weights must vanish on odd M")
    if np.any(u < 0):
        raise ValueError("easy-axis weights must be non-negative")
    psi = np.zeros(1 << N, dtype=complex)
    for M in np.flatnonzero(u):
        psi += u[M] * build_psi_m(lattice, int(M))
    return psi / np.linalg.norm(psi)
