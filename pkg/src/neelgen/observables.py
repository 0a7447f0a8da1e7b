"""Correlation functions, single-site Bloch vectors and order parameters.

Every function accepts either a pure state (a numpy array, normalized on the
fly) or an ensemble given as a sequence of ``(weight, state)`` pairs whose
weights sum to one. Ensemble values are convex combinations of the
normalized-member expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .lattice import LatticeSpec
from .state import apply_site_op, fourier_phases, n_sites_of, total_sz

Ensemble = Sequence[tuple[float, np.ndarray]]
StateLike = Union[np.ndarray, Ensemble]

LABELS = ("+", "-", "z", "x", "y")
_ADJOINT = {"+": "-", "-": "+", "z": "z", "x": "x", "y": "y"}
_SITE = {"+": "s+", "-": "s-", "z": "sz", "x": "sx", "y": "sy"}


def _members(obj: StateLike) -> list[tuple[float, np.ndarray]]:
    if isinstance(obj, np.ndarray):
        nrm = np.linalg.norm(obj)
        if nrm == 0:
            raise ValueError("zero-norm state")
        return [(1.0, obj / nrm)]
    members = []
    for w, psi in obj:
        nrm = np.linalg.norm(psi)
        if w == 0:
            continue
        if nrm == 0:
            raise ValueError("zero-norm ensemble member with nonzero weight")
        members.append((float(w), psi / nrm))
    total = sum(w for w, _ in members)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"ensemble weights sum to {total}, expected 1")
    return members


def branch_ensemble(pair) -> list[tuple[float, np.ndarray]]:
    """Ensemble ``[(p+, plus), (p-, minus)]`` from a ``BranchPair``."""
    total = pair.p_plus + pair.p_minus
    out = []
    for p, psi in ((pair.p_plus, pair.plus_branch), (pair.p_minus, pair.minus_branch)):
        if p > 0:
            out.append((p / total, psi))
    return out


def _check_label(label: str) -> None:
    if label not in LABELS:
        raise ValueError(f"unknown component label {label!r}; expected one of {LABELS}")


def _apply_fourier_component(psi: np.ndarray, phases: np.ndarray, label: str) -> np.ndarray:
    out = np.zeros_like(psi, dtype=complex)
    for j, ph in enumerate(phases):
        out += ph * apply_site_op(psi, j, _SITE[label])
    return out / math.sqrt(len(phases))


@dataclass(frozen=True)
class CorrelatorResult:
    q: tuple[float, ...]
    alpha: str
    beta: str
    value: complex


def correlator(obj: StateLike, lattice: LatticeSpec, alpha: str, beta: str, q) -> CorrelatorResult:
    """``K^{alpha beta}(q) = <S^alpha_q S^beta_{-q}>`` by direct Fourier-operator application."""
    _check_label(alpha)
    _check_label(beta)
    q = np.asarray(q, dtype=float).reshape(lattice.dim)
    ph = fourier_phases(lattice, q)
    total = 0j
    for w, psi in _members(obj):
        right = _apply_fourier_component(psi, ph.conj(), beta)
        left = _apply_fourier_component(psi, ph.conj(), _ADJOINT[alpha])
        total += w * np.vdot(left, right)
    return CorrelatorResult(tuple(float(x) for x in q), alpha, beta, complex(total))


def correlation_matrix(psi: np.ndarray, alpha: str, beta: str) -> np.ndarray:
    """``C_jk = <psi| s^alpha_j s^beta_k |psi>`` for a normalized pure state."""
    _check_label(alpha)
    _check_label(beta)
    N = n_sites_of(psi)
    left = np.array([apply_site_op(psi, j, _SITE[_ADJOINT[alpha]]) for j in range(N)])
    right = np.array([apply_site_op(psi, k, _SITE[beta]) for k in range(N)])
    return left.conj() @ right.T


def structure_factor(obj: StateLike, lattice: LatticeSpec, alpha: str, beta: str) -> np.ndarray:
    """``K^{alpha beta}(q)`` on the whole momentum grid (``lattice.momenta`` order).

    Built from the real-space correlation matrix, so it is independent of
    ``correlator``'s operator path.
    """
    P = np.exp(1j * lattice.momenta @ lattice.positions.T)
    out = np.zeros(len(P), dtype=complex)
    for w, psi in _members(obj):
        C = correlation_matrix(psi, alpha, beta)
        out += w * np.einsum("qj,jk,qk->q", P, C, P.conj())
    return out / lattice.n_sites


def reduced_density_matrix(psi: np.ndarray, site: int) -> np.ndarray:
    """Single-site density matrix in the ``(up, down)`` basis (not trace-normalized)."""
    N = n_sites_of(psi)
    if not 0 <= site < N:
        raise IndexError(f"site {site} out of range for N={N}")
    v = psi.reshape(-1, 2, 1 << site)
    up, dn = v[:, 1, :], v[:, 0, :]
    r_ud = np.vdot(dn, up)
    return np.array([[np.vdot(up, up), r_ud], [np.conj(r_ud), np.vdot(dn, dn)]])


@dataclass(frozen=True)
class SiteBlochVector:
    site: int
    b: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b))


def _bloch_from_rho(rho: np.ndarray) -> np.ndarray:
    r = rho / np.trace(rho).real
    return np.array([2 * r[0, 1].real, -2 * r[0, 1].imag, (r[0, 0] - r[1, 1]).real])


def site_bloch(obj: StateLike, site: int) -> SiteBlochVector:
    """``b = (2<s^x>, 2<s^y>, 2<s^z>)`` at ``site``."""
    b = np.zeros(3)
    for w, psi in _members(obj):
        b += w * _bloch_from_rho(reduced_density_matrix(psi, site))
    return SiteBlochVector(site, b)


def bloch_map(obj: StateLike, lattice: LatticeSpec) -> np.ndarray:
    """Bloch vectors of every site, shape ``(N, 3)``."""
    return np.array([site_bloch(obj, j).b for j in range(lattice.n_sites)])


def staggered_order(obj: StateLike, lattice: LatticeSpec, exclude_site: int | None = 0,
                    outcome_sign: float = 1.0) -> float:
    """Sublattice-weighted mean of ``2<s^x_j>``.

    With ``exclude_site`` set, that (measured) site is left out and the sign is
    referred to its sublattice; ``outcome_sign`` flips the result for a ``-1/2``
    outcome. A Neel state along ``+x`` on the ``eta = +1`` sublattice gives 1.
    """
    bx = bloch_map(obj, lattice)[:, 0]
    eta = lattice.eta
    if exclude_site is None:
        return float(np.sign(outcome_sign) * np.mean(eta * bx))
    keep = np.arange(lattice.n_sites) != exclude_site
    ref = eta[exclude_site] * np.sign(outcome_sign)
    return float(ref * np.mean(eta[keep] * bx[keep]))


def sz_moments(obj: StateLike) -> tuple[float, float]:
    """Mean and standard deviation of total ``S_z``."""
    members = [(w, np.abs(psi) ** 2, total_sz(n_sites_of(psi))) for w, psi in _members(obj)]
    mean = sum(w * float(p @ sz) for w, p, sz in members)
    # two-pass variance: exact zero for sector eigenstates
    var = sum(w * float(p @ (sz - mean) ** 2) for w, p, sz in members)
    return mean, math.sqrt(var)


@dataclass(frozen=True)
class AxisDiagnostics:
    k_pm: float
    k_mm: complex
    ratio: float
    angle: float


def axis_diagnostics(obj: StateLike, lattice: LatticeSpec) -> AxisDiagnostics:
    """AFM-axis pinning from ``K^{+-}(Q)`` and ``K^{--}(Q)``.

    ``ratio = |K^{--}| / K^{+-}`` is 0 for an x-y rotation-invariant state and
    approaches 1 for a fully pinned axis. The in-plane axis angle is
    ``-arg(K^{--}(Q)) / 2`` in ``(-pi/2, pi/2]``, so that an active rotation by
    ``theta`` about z shifts it by ``+theta``.
    """
    k_pm = correlator(obj, lattice, "+", "-", lattice.Q).value.real
    if k_pm < 1e-14:
        raise ValueError("K^{+-}(Q) vanishes; no antiferromagnetic correlations")
    k_mm = correlator(obj, lattice, "-", "-", lattice.Q).value
    angle = -0.5 * math.atan2(k_mm.imag, k_mm.real)
    if angle <= -math.pi / 2:
        angle += math.pi
    return AxisDiagnostics(k_pm, k_mm, abs(k_mm) / k_pm, angle + 0.0)


def site_entropy(state: np.ndarray, site: int) -> float:
    """Von Neumann entropy (bits) of one site of a pure state."""
    if not isinstance(state, np.ndarray):
        raise ValueError("site_entropy needs a pure state, not an ensemble")
    rho = reduced_density_matrix(state, site)
    lam = np.linalg.eigvalsh(rho / np.trace(rho).real)
    lam = lam[lam > 1e-15]
    return float(max(-(lam * np.log2(lam)).sum(), 0.0))
