"""Dense spin-1/2 state vectors with matrix-free operator application.

A state on ``N`` sites is a complex numpy array of length ``2**N``. Bit ``j``
of the basis index set means spin ``j`` is up (``s^z_j = +1/2``). Operators are
applied by viewing the array as ``(2**(N-1-j), 2, 2**j)`` so that the middle
axis is the spin at site ``j``; no operator matrix is ever built here.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .lattice import LatticeSpec

MAX_SITES = 24
SITE_OPS = ("s+", "s-", "sz", "sx", "sy")
FOURIER_OPS = ("S+", "S-", "Sz")

_DUMP_MAGIC = b"NEELSTV\x00"
_DUMP_VERSION = 1
_DUMP_HEADER = struct.Struct("<8sII")


def n_sites_of(state: np.ndarray) -> int:
    """Number of sites encoded by a state array; raises if length is not ``2**N``."""
    size = state.shape[-1] if state.ndim else 0
    N = size.bit_length() - 1
    if size < 1 or (1 << N) != size:
        raise ValueError(f"state length {size} is not a power of two")
    if N > MAX_SITES:
        raise ValueError(f"N={N} exceeds the cap of {MAX_SITES} sites")
    return N


def basis_state(n_sites: int, mask: int) -> np.ndarray:
    psi = np.zeros(1 << n_sites, dtype=complex)
    psi[mask] = 1.0
    return psi


def random_state(n_sites: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=1 << n_sites) + 1j * rng.normal(size=1 << n_sites)
    return psi / np.linalg.norm(psi)


@lru_cache(maxsize=None)
def popcounts(n_sites: int) -> np.ndarray:
    """Number of up spins of every basis index (read-only, cached)."""
    pc = np.bitwise_count(np.arange(1 << n_sites, dtype=np.uint64)).astype(np.int64)
    pc.setflags(write=False)
    return pc


def total_sz(n_sites: int) -> np.ndarray:
    """Eigenvalue of total ``S_z`` on every basis index."""
    return popcounts(n_sites) - n_sites / 2.0


def product_state(thetas, phis) -> np.ndarray:
    """Product of single-site states ``cos(t/2)|up> + exp(i p) sin(t/2)|down>``."""
    psi = np.ones(1, dtype=complex)
    for t, p in zip(thetas, phis):
        site = np.array([np.exp(1j * p) * np.sin(t / 2), np.cos(t / 2)])
        # New sites enter as the most significant bit.
        psi = np.kron(site, psi)
    return psi


def rotate_z(state: np.ndarray, angle: float) -> np.ndarray:
    """Global rotation ``exp(-i angle S_z) |state>``."""
    N = n_sites_of(state)
    return state * np.exp(-1j * angle * total_sz(N))


def _check_site(N: int, site: int) -> None:
    if not 0 <= site < N:
        raise IndexError(f"site {site} out of range for N={N}")


def apply_site_op(state: np.ndarray, site: int, op: str) -> np.ndarray:
    """Return ``op_site |state>`` for ``op`` in ``s+, s-, sz, sx, sy``.

    The result is not renormalized.
    """
    N = n_sites_of(state)
    _check_site(N, site)
    v = state.reshape(-1, 2, 1 << site)
    out = np.zeros_like(v, dtype=complex)
    if op == "s+":
        out[:, 1] = v[:, 0]
    elif op == "s-":
        out[:, 0] = v[:, 1]
    elif op == "sz":
        out[:, 1] = 0.5 * v[:, 1]
        out[:, 0] = -0.5 * v[:, 0]
    elif op == "sx":
        out[:, 1] = 0.5 * v[:, 0]
        out[:, 0] = 0.5 * v[:, 1]
    elif op == "sy":
        out[:, 1] = -0.5j * v[:, 0]
        out[:, 0] = 0.5j * v[:, 1]
    else:
        raise ValueError(f"unknown site operator {op!r}; expected one of {SITE_OPS}")
    return out.reshape(state.shape)


def fourier_phases(lattice: LatticeSpec, q) -> np.ndarray:
    """``exp(i q . r_j)`` for every site; ``q`` is validated against the grid."""
    lattice.momentum_index(q)
    return np.exp(1j * (lattice.positions @ np.asarray(q, dtype=float)))


def apply_fourier_op(state: np.ndarray, lattice: LatticeSpec, q, op: str) -> np.ndarray:
    """Return ``S^op_q |state>`` with ``S_q = N^{-1/2} sum_j exp(i q r_j) s_j``."""
    if op not in FOURIER_OPS:
        raise ValueError(f"unknown Fourier operator {op!r}; expected one of {FOURIER_OPS}")
    N = n_sites_of(state)
    if N != lattice.n_sites:
        raise ValueError(f"state has N={N}, lattice has N={lattice.n_sites}")
    phases = fourier_phases(lattice, q)
    site_op = {"S+": "s+", "S-": "s-", "Sz": "sz"}[op]
    out = np.zeros_like(state, dtype=complex)
    for j in range(N):
        out += phases[j] * apply_site_op(state, j, site_op)
    return out / np.sqrt(N)


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_pair(a, b)
    return complex(np.vdot(a, b))


def norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_pair(a, b)
    return a + b


def scale(a: np.ndarray, c: complex) -> np.ndarray:
    return c * a


def sector_decompose(state: np.ndarray, tol: float = 0.0) -> list[tuple[float, float]]:
    """List of ``(S_z, weight)`` for every total-``S_z`` sector with weight > ``tol``.

    Weights are squared norms of the popcount-filtered amplitudes and sum to
    ``norm(state)**2``.
    """
    N = n_sites_of(state)
    w = np.bincount(popcounts(N), weights=np.abs(state) ** 2, minlength=N + 1)
    return [(n_up - N / 2.0, float(w[n_up])) for n_up in range(N, -1, -1) if w[n_up] > tol]


@dataclass(frozen=True)
class SzSectorView:
    """Basis indices with a fixed number of up spins."""

    n_sites: int
    sector_sz: float
    members: np.ndarray

    @classmethod
    def of(cls, n_sites: int, sector_sz: float) -> "SzSectorView":
        n_up = n_sites / 2.0 + sector_sz
        if n_up != int(n_up) or not 0 <= n_up <= n_sites:
            raise ValueError(f"no S_z={sector_sz} sector for N={n_sites}")
        members = np.flatnonzero(popcounts(n_sites) == int(n_up))
        return cls(n_sites, float(sector_sz), members)

    def restrict(self, state: np.ndarray) -> np.ndarray:
        return state[self.members]

    def embed(self, amplitudes: np.ndarray) -> np.ndarray:
        out = np.zeros(1 << self.n_sites, dtype=complex)
        out[self.members] = amplitudes
        return out


def save_state(path: str | Path, state: np.ndarray, metadata: dict | None = None) -> None:
    """Write ``state`` as a little-endian binary dump plus a JSON sidecar.

    Binary layout: 8-byte magic, uint32 version, uint32 N, then ``2**N``
    (real, imag) float64 pairs. The sidecar lives at ``<path>.json``.
    """
    path = Path(path)
    N = n_sites_of(state)
    with open(path, "wb") as fh:
        fh.write(_DUMP_HEADER.pack(_DUMP_MAGIC, _DUMP_VERSION, N))
        fh.write(np.ascontiguousarray(state, dtype="<c16").tobytes())
    meta = {"n_sites": N, "version": _DUMP_VERSION}
    meta.update(metadata or {})
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_state(path: str | Path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _DUMP_HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, N = _DUMP_HEADER.unpack_from(raw)
    if magic != _DUMP_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != _DUMP_VERSION:
        raise ValueError(f"{path}: unsupported dump version {version}")
    body = raw[_DUMP_HEADER.size:]
    if len(body) != 16 << N:
        raise ValueError(f"{path}: expected {16 << N} payload bytes, found {len(body)}")
    state = np.frombuffer(body, dtype="<c16").astype(complex)
    sidecar = Path(str(path) + ".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    return state, meta
