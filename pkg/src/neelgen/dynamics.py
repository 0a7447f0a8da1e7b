"""Magnon dispersion, the analytic decoherence-wave kernel and exact evolution.

The Hamiltonian is the isotropic (optionally XXZ) Heisenberg model

    H = sum_{j<k} J_jk (s+_j s-_k + s-_j s+_k + 2 dz s^z_j s^z_k) + N D / 4

with antiferromagnetic ``J_jk > 0``. In momentum space, with the ``J_q``
convention of :mod:`neelgen.lattice` (maximum at ``Q``),

    H = - sum_q J_q (S+_q S-_{-q} + dz S^z_q S^z_{-q}) + N D / 4.

``D`` is the single-ion term ``D sum_j (s^z_j)^2``, a constant for spin 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.signal import argrelmax

from .lattice import LatticeSpec, fourier_exchange
from .state import apply_fourier_op, apply_site_op, n_sites_of, popcounts

MAX_EXACT_SITES = 16


@dataclass(frozen=True)
class DispersionTable:
    momenta: np.ndarray
    omega: np.ndarray


def magnon_dispersion(lattice: LatticeSpec) -> DispersionTable:
    """``omega_q = sqrt((J_Q - J_q)(J_Q - J_{q-Q}))`` on the full grid."""
    JQ = lattice.J_Q
    q = lattice.momenta
    Jq = lattice.exchange_q
    Jshift = np.array([fourier_exchange(lattice, np.mod(k - lattice.Q, 2 * np.pi)) for k in q])
    rad = (JQ - Jq) * (JQ - Jshift)
    if np.any(rad < -1e-12):
        bad = int(np.argmin(rad))
        raise ValueError(f"negative radicand {rad[bad]:.3g} at q={q[bad].tolist()}; inconsistent Q")
    return DispersionTable(q.copy(), np.sqrt(np.clip(rad, 0.0, None)))


def group_velocity(lattice: LatticeSpec, samples: int = 4096) -> float:
    """Max ``|d omega / dq|`` along the first axis, from the continuum form of ``omega``.

    Evaluated by central differences of the closed-form ``J_q`` on a fine
    line, not restricted to the lattice grid.
    """
    dim = lattice.dim
    Q = lattice.Q

    def omega(k: np.ndarray) -> np.ndarray:
        def Jq(kk):
            return -sum(J * np.cos(kk @ np.asarray(d, float)) for d, J in lattice.couplings)
        JQ = lattice.J_Q
        return np.sqrt(np.clip((JQ - Jq(k)) * (JQ - Jq(k - Q)), 0.0, None))

    t = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    k = np.zeros((samples, dim))
    k[:, 0] = t
    h = 1e-6
    e = np.zeros(dim)
    e[0] = h
    return float(np.max(np.abs(omega(k + e) - omega(k - e)) / (2 * h)))


@dataclass(frozen=True)
class WaveField:
    """``values[t, r]`` sampled at ``times[t]`` and ``displacements[r]``."""

    displacements: np.ndarray
    times: np.ndarray
    values: np.ndarray


def decoherence_kernel(lattice: LatticeSpec, displacements, times, method: str = "direct") -> WaveField:
    """Magnon estimate ``G(r, t) = (4N)^{-1} sum_q exp(i q r - i omega_q t)``.

    ``method="direct"`` sums over the Brillouin zone; ``"fft"`` evaluates the
    whole real-space grid per time with an inverse FFT and picks the requested
    displacements.
    """
    disp = np.atleast_2d(np.asarray(displacements, dtype=np.int64))
    if lattice.dim == 1 and disp.shape[0] == 1 and disp.shape[1] != 1:
        disp = disp.T
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    N = lattice.n_sites
    omega = magnon_dispersion(lattice).omega
    if method == "direct":
        phase_r = np.exp(1j * disp @ lattice.momenta.T)
        phase_t = np.exp(-1j * np.outer(times, omega))
        values = phase_t @ phase_r.T / (4 * N)
    elif method == "fft":
        shape = lattice.linear_sizes
        red = np.mod(disp, np.asarray(shape))
        flat = np.ravel_multi_index(tuple(red.T), shape)
        values = np.empty((len(times), len(disp)), dtype=complex)
        for i, t in enumerate(times):
            grid = np.fft.ifftn(np.exp(-1j * omega * t).reshape(shape))
            values[i] = grid.ravel()[flat] / 4
    else:
        raise ValueError(f"unknown method {method!r}")
    return WaveField(disp, times, values)


def front_position(field: WaveField, method: str = "peak") -> np.ndarray:
    """Distance of the wave front from the origin at every time.

    ``"peak"`` returns ``|r|`` at the maximum of ``|G|``; ``"leading_edge"``
    returns the largest ``|r|`` where ``|G|`` still reaches half the maximum.
    Distances are Euclidean norms of the stored displacement vectors.
    """
    dist = np.linalg.norm(field.displacements, axis=1)
    amp = np.abs(field.values)
    if method == "peak":
        return dist[np.argmax(amp, axis=1)]
    if method == "leading_edge":
        out = np.empty(len(amp))
        for i, row in enumerate(amp):
            out[i] = dist[row >= 0.5 * row.max()].max()
        return out
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class HamiltonianSpec:
    lattice: LatticeSpec
    delta_z: float = 1.0
    D: float = 0.0

    @cached_property
    def bonds(self) -> list[tuple[int, int, float]]:
        """``(j, k, J_jk)`` with ``j < k`` and nonzero ``J_jk``."""
        Jm = self.lattice.bond_matrix
        if not np.allclose(Jm, Jm.T):
            raise ValueError("bond matrix is not symmetric")
        j, k = np.nonzero(np.triu(Jm, 1))
        return [(int(a), int(b), float(Jm[a, b])) for a, b in zip(j, k)]

    @property
    def constant(self) -> float:
        return self.lattice.n_sites * self.D / 4.0


def _bits(N: int) -> np.ndarray:
    return np.arange(1 << N, dtype=np.int64)


def hamiltonian_apply(h: HamiltonianSpec, state: np.ndarray) -> np.ndarray:
    """``H|state>`` in real space, matrix-free."""
    N = n_sites_of(state)
    if N != h.lattice.n_sites:
        raise ValueError(f"state has N={N}, Hamiltonian has N={h.lattice.n_sites}")
    idx = _bits(N)
    out = h.constant * state.astype(complex)
    for j, k, J in h.bonds:
        bj = (idx >> j) & 1
        bk = (idx >> k) & 1
        same = bj == bk
        out += (0.5 * h.delta_z * J) * np.where(same, 1.0, -1.0) * state
        flipped = state[idx ^ ((1 << j) | (1 << k))]
        out += J * np.where(same, 0.0, flipped)
    return out


def hamiltonian_apply_momentum(h: HamiltonianSpec, state: np.ndarray) -> np.ndarray:
    """``H|state>`` from the momentum-space form; for cross-checking only."""
    lat = h.lattice
    out = h.constant * state.astype(complex)
    for q, Jq in zip(lat.momenta, lat.exchange_q):
        mq = np.mod(-q, 2 * np.pi)
        pm = apply_fourier_op(apply_fourier_op(state, lat, mq, "S-"), lat, q, "S+")
        zz = apply_fourier_op(apply_fourier_op(state, lat, mq, "Sz"), lat, q, "Sz")
        out -= Jq * (pm + h.delta_z * zz)
    return out


def energy(h: HamiltonianSpec, state: np.ndarray) -> float:
    return float(np.vdot(state, hamiltonian_apply(h, state)).real / np.vdot(state, state).real)


def sector_hamiltonian(h: HamiltonianSpec, n_up: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense real ``H`` restricted to basis states with ``n_up`` up spins.

    Returns ``(members, H_block)`` with ``members`` the sorted basis indices.
    """
    N = h.lattice.n_sites
    members = np.flatnonzero(popcounts(N) == n_up)
    dim = len(members)
    H = np.zeros((dim, dim))
    H[np.diag_indices(dim)] = h.constant
    rows = np.arange(dim)
    for j, k, J in h.bonds:
        bj = (members >> j) & 1
        bk = (members >> k) & 1
        same = bj == bk
        H[rows, rows] += (0.5 * h.delta_z * J) * np.where(same, 1.0, -1.0)
        src = rows[~same]
        dst = np.searchsorted(members, members[src] ^ ((1 << j) | (1 << k)))
        H[dst, src] += J
    return members, H


@dataclass
class Propagator:
    """Cached per-sector eigendecomposition of ``H`` for exact evolution."""

    h: HamiltonianSpec
    _sectors: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        N = self.h.lattice.n_sites
        if N > MAX_EXACT_SITES:
            raise ValueError(f"exact evolution supports N <= {MAX_EXACT_SITES}, got N={N}")

    def sector(self, n_up: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if n_up not in self._sectors:
            members, H = sector_hamiltonian(self.h, n_up)
            w, V = np.linalg.eigh(H)
            self._sectors[n_up] = (members, w, V)
        return self._sectors[n_up]

    def _active(self, state: np.ndarray) -> list[int]:
        N = self.h.lattice.n_sites
        w = np.bincount(popcounts(N), weights=np.abs(state) ** 2, minlength=N + 1)
        return [n for n in range(N + 1) if w[n] > 0]

    def evolve_many(self, state: np.ndarray, times) -> np.ndarray:
        """``exp(-i H t)|state>`` for every ``t``; shape ``(len(times), 2**N)``."""
        N = n_sites_of(state)
        if N != self.h.lattice.n_sites:
            raise ValueError(f"state has N={N}, Hamiltonian has N={self.h.lattice.n_sites}")
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.zeros((len(times), state.size), dtype=complex)
        for n in self._active(state):
            members, w, V = self.sector(n)
            c = V.T @ state[members]
            out[:, members] = (np.exp(-1j * np.outer(times, w)) * c) @ V.T
        return out

    def evolve(self, state: np.ndarray, t: float) -> np.ndarray:
        return self.evolve_many(state, [t])[0]


_PROPAGATORS: dict[HamiltonianSpec, Propagator] = {}


def propagator(h: HamiltonianSpec) -> Propagator:
    """Shared ``Propagator`` for ``h`` (eigendecompositions are cached)."""
    if h not in _PROPAGATORS:
        _PROPAGATORS[h] = Propagator(h)
    return _PROPAGATORS[h]


def evolve(h: HamiltonianSpec, state: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)|state>`` by sector-wise exact diagonalization."""
    return propagator(h).evolve(state, t)


def exact_green(h: HamiltonianSpec, state: np.ndarray, sites, times) -> WaveField:
    """``G(r_j0, t) = <s+_j(t) s-_0> - <s+_j s-_0>`` for a normalized state.

    Computed as ``<psi(t)| s+_j |phi(t)>`` with ``psi(t) = U(t)|psi>`` and
    ``phi(t) = U(t) s-_0 |psi>``. The returned displacements are ``r_j - r_0``.
    """
    lat = h.lattice
    sites = [int(j) for j in np.atleast_1d(sites)]
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    psi = state / np.linalg.norm(state)
    prop = propagator(h)
    psi_t = prop.evolve_many(psi, times)
    phi_t = prop.evolve_many(apply_site_op(psi, 0, "s-"), times)
    values = np.empty((len(times), len(sites)), dtype=complex)
    for c, j in enumerate(sites):
        raised = np.array([apply_site_op(v, j, "s+") for v in phi_t])
        values[:, c] = np.einsum("ti,ti->t", psi_t.conj(), raised)
    equal_time = np.array([np.vdot(psi, apply_site_op(apply_site_op(psi, 0, "s-"), j, "s+")) for j in sites])
    values -= equal_time
    disp = lat.positions[sites] - lat.positions[0]
    return WaveField(disp, times, values)


def minimal_image(lattice: LatticeSpec, displacements: np.ndarray) -> np.ndarray:
    """Shortest periodic representative of each displacement vector."""
    L = np.asarray(lattice.linear_sizes)
    d = np.mod(np.asarray(displacements), L)
    return np.where(d > L // 2, d - L, d)


def first_peak_times(field: WaveField, rel_floor: float = 1e-6) -> np.ndarray:
    """Time of the first local maximum of ``|G|`` for each displacement column.

    Local maxima below ``rel_floor`` times the column maximum are ignored as
    numerical noise. ``nan`` when a column has no qualifying maximum.
    """
    amp = np.abs(field.values)
    out = np.full(amp.shape[1], math.nan)
    for c in range(amp.shape[1]):
        col = amp[:, c]
        peaks = argrelmax(col)[0]
        peaks = peaks[col[peaks] > rel_floor * col.max()]
        if len(peaks):
            out[c] = field.times[peaks[0]]
    return out
