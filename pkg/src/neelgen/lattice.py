"""Bipartite periodic lattices, exchange kernels and the ordering vector.

Sign convention
---------------
Real-space couplings ``J(delta) > 0`` are antiferromagnetic. The Fourier
kernel carries an overall minus sign,

    J_q = - sum_delta J(delta) cos(q . delta),

so that antiferromagnetic order appears at the *maximum* of ``J_q``
(``max_q J_q = J_Q``). Most textbooks use the opposite sign; every formula in
this package (dispersion, Hamiltonian in momentum space) is written for the
convention above.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

GEOMETRIES = ("chain", "square", "hypercubic")

# Tolerance for deciding whether a wavevector sits on the discrete grid.
_GRID_TOL = 1e-9


class LatticeError(ValueError):
    """Raised for inconsistent lattice definitions."""


def nearest_neighbor_couplings(dim: int, J: float = 1.0) -> dict[tuple[int, ...], float]:
    """Return ``{+e_a: J, -e_a: J}`` for every axis of a ``dim``-dimensional lattice."""
    out = {}
    for a in range(dim):
        e = [0] * dim
        e[a] = 1
        out[tuple(e)] = J
        e[a] = -1
        out[tuple(e)] = J
    return out


@dataclass(frozen=True)
class LatticeSpec:
    """Immutable periodic hypercubic lattice with an exchange coupling set.

    Sites are enumerated row-major over ``linear_sizes`` (last coordinate runs
    fastest); site ``j`` is stored in bit ``j`` of a basis bitmask.
    """

    geometry: str
    linear_sizes: tuple[int, ...]
    couplings: tuple[tuple[tuple[int, ...], float], ...]

    @property
    def dim(self) -> int:
        return len(self.linear_sizes)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.linear_sizes))

    @cached_property
    def positions(self) -> np.ndarray:
        """Integer site coordinates, shape ``(N, dim)``."""
        grids = np.indices(self.linear_sizes).reshape(self.dim, -1).T
        return np.ascontiguousarray(grids, dtype=np.int64)

    @cached_property
    def momenta(self) -> np.ndarray:
        """Brillouin-zone grid ``q_a = 2 pi n_a / L_a``, shape ``(N, dim)``."""
        n = np.indices(self.linear_sizes).reshape(self.dim, -1).T
        return 2.0 * np.pi * n / np.asarray(self.linear_sizes, dtype=float)

    @cached_property
    def exchange_q(self) -> np.ndarray:
        """``J_q`` on every grid momentum, in ``momenta`` order."""
        return np.array([_fourier_sum(self.couplings, q) for q in self.momenta])

    @cached_property
    def Q(self) -> np.ndarray:
        return ordering_vector(self)

    @cached_property
    def J_Q(self) -> float:
        return fourier_exchange(self, self.Q)

    @cached_property
    def eta(self) -> np.ndarray:
        """Sublattice signs ``exp(i Q . r_j)`` as an integer array of +-1."""
        phase = self.positions @ self.Q
        return np.rint(np.cos(phase)).astype(np.int64)

    @property
    def coordination(self) -> int:
        """Number of displacement vectors with nonzero coupling."""
        return sum(1 for _, J in self.couplings if J != 0.0)

    @cached_property
    def bond_matrix(self) -> np.ndarray:
        """Dense ``J_jk`` with periodic images of each displacement summed."""
        N = self.n_sites
        L = np.asarray(self.linear_sizes)
        index = {tuple(r): i for i, r in enumerate(self.positions)}
        Jmat = np.zeros((N, N))
        for j, r in enumerate(self.positions):
            for delta, J in self.couplings:
                k = index[tuple(np.mod(r + np.asarray(delta), L))]
                Jmat[j, k] += J
        return Jmat

    def momentum_index(self, q: Sequence[float]) -> int:
        """Position of ``q`` in ``momenta`` (after reduction mod 2 pi)."""
        n = _grid_integers(self, q)
        L = np.asarray(self.linear_sizes)
        n = np.mod(n, L)
        return int(np.ravel_multi_index(tuple(n), self.linear_sizes))

    def displacement_index(self, r: Sequence[int]) -> int:
        """Site index of the (periodically reduced) displacement ``r`` from site 0."""
        r = np.mod(np.asarray(r, dtype=np.int64), self.linear_sizes)
        return int(np.ravel_multi_index(tuple(r), self.linear_sizes))

    def summary(self) -> dict:
        return {
            "geometry": self.geometry,
            "linear_sizes": list(self.linear_sizes),
            "N": self.n_sites,
            "Q": [float(x) for x in self.Q],
            "J_Q": float(self.J_Q),
            "z": self.coordination,
        }

    def fingerprint(self) -> str:
        """Stable hash of the defining data (geometry, sizes, couplings)."""
        payload = {
            "geometry": self.geometry,
            "linear_sizes": list(self.linear_sizes),
            "couplings": [[list(d), J] for d, J in self.couplings],
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _fourier_sum(couplings, q) -> float:
    q = np.asarray(q, dtype=float)
    return -float(sum(J * np.cos(q @ np.asarray(d, dtype=float)) for d, J in couplings))


def _grid_integers(lattice: LatticeSpec, q) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (lattice.dim,):
        raise LatticeError(f"wavevector must have {lattice.dim} components, got {q.shape}")
    x = q * np.asarray(lattice.linear_sizes) / (2.0 * np.pi)
    n = np.rint(x)
    if np.any(np.abs(x - n) > _GRID_TOL):
        raise LatticeError(f"wavevector {q.tolist()} is not on the momentum grid")
    return n.astype(np.int64)


def build_lattice(
    geometry: str,
    linear_sizes: Sequence[int],
    couplings: Mapping[Sequence[int], float] | None = None,
) -> LatticeSpec:
    """Validate a periodic lattice definition and return a ``LatticeSpec``.

    ``couplings`` maps displacement vectors to exchange values and must contain
    both ``delta`` and ``-delta`` with equal values. ``None`` means
    nearest-neighbour ``J = 1``.
    """
    if geometry not in GEOMETRIES:
        raise LatticeError(f"unknown geometry {geometry!r}; expected one of {GEOMETRIES}")
    sizes = tuple(int(L) for L in linear_sizes)
    if not sizes:
        raise LatticeError("linear_sizes must not be empty")
    expected_dim = {"chain": 1, "square": 2}.get(geometry)
    if expected_dim is not None and len(sizes) != expected_dim:
        raise LatticeError(f"{geometry} needs {expected_dim} linear size(s), got {len(sizes)}")
    for L in sizes:
        if L < 2 or L % 2:
            raise LatticeError(f"linear sizes must be even and >= 2, got {L}")

    if couplings is None:
        couplings = nearest_neighbor_couplings(len(sizes))
    coup = {tuple(int(c) for c in d): float(J) for d, J in dict(couplings).items()}
    if not coup:
        raise LatticeError("coupling set is empty")
    for d, J in coup.items():
        if len(d) != len(sizes):
            raise LatticeError(f"displacement {d} has wrong dimension for sizes {sizes}")
        if not any(d):
            raise LatticeError("on-site coupling is not allowed")
        neg = tuple(-c for c in d)
        if neg not in coup or coup[neg] != J:
            raise LatticeError(f"couplings not symmetric under negation at {d}")

    lat = LatticeSpec(geometry, sizes, tuple(sorted(coup.items())))
    # Force the derived quantities so an invalid coupling set fails here.
    _ = lat.eta
    return lat


def fourier_exchange(lattice: LatticeSpec, q: Sequence[float]) -> float:
    """``J_q = -sum_delta J(delta) cos(q . delta)``; ``q`` must lie on the grid."""
    _grid_integers(lattice, q)
    return _fourier_sum(lattice.couplings, q)


def ordering_vector(lattice: LatticeSpec) -> np.ndarray:
    """Grid wavevector maximizing ``J_q`` among those with ``2Q`` reciprocal.

    Candidates have every component in ``{0, pi}``; ties resolve to the
    lexicographically smallest. Raises ``LatticeError`` when the global maximum
    of ``J_q`` is not commensurate, or when the resulting sublattices are not
    balanced (e.g. ``Q = 0`` for a ferromagnetic coupling set).
    """
    candidates = [np.array(c, dtype=float) for c in itertools.product((0.0, np.pi), repeat=lattice.dim)]
    values = [_fourier_sum(lattice.couplings, c) for c in candidates]
    best = max(values)
    tol = 1e-12 * max(1.0, abs(best))
    Q = next(c for c, v in zip(candidates, values) if v >= best - tol)

    global_max = float(np.max(lattice.exchange_q))
    if global_max > best + tol:
        raise LatticeError(
            f"maximum of J_q ({global_max:.6g}) is not at a commensurate wavevector; "
            "coupling set is not bipartite-ordered"
        )
    eta = np.rint(np.cos(lattice.positions @ Q)).astype(np.int64)
    if eta.sum() != 0:
        raise LatticeError(f"ordering vector {Q.tolist()} does not split the lattice into equal sublattices")
    return Q
