"""Projective single-site measurement of ``s^x`` and measurement cascades.

The post-measurement mixed state is carried as an ensemble of pure branches
``W^{+-}|psi>`` with ``W^{+-} = 1/2 +- s^x_j``; no density matrix is formed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lattice import LatticeSpec
from .observables import axis_diagnostics, staggered_order, sz_moments
from .state import apply_fourier_op, apply_site_op, n_sites_of
from .trs import build_psi_m

DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class BranchPair:
    plus_branch: np.ndarray
    minus_branch: np.ndarray
    p_plus: float
    p_minus: float


def branch_pair(state: np.ndarray, site: int) -> BranchPair:
    """Unnormalized images ``(1/2 +- s^x_site)|state>`` and their squared norms."""
    sx = apply_site_op(state, site, "sx")
    plus = 0.5 * state + sx
    minus = 0.5 * state - sx
    return BranchPair(plus, minus, float(np.vdot(plus, plus).real), float(np.vdot(minus, minus).real))


def measure_sx(state: np.ndarray, site: int, rng: np.random.Generator) -> tuple[float, np.ndarray, float]:
    """Sample an ``s^x_site`` outcome with Born probabilities.

    Returns ``(outcome, collapsed_state, probability)`` where ``outcome`` is
    ``+0.5`` or ``-0.5`` and the collapsed state is normalized.
    """
    pair = branch_pair(state, site)
    total = pair.p_plus + pair.p_minus
    if pair.p_plus < DEGENERATE_TOL and pair.p_minus < DEGENERATE_TOL:
        raise ValueError("both measurement branches vanish; degenerate input state")
    if rng.random() < pair.p_plus / total:
        outcome, branch, p = 0.5, pair.plus_branch, pair.p_plus
    else:
        outcome, branch, p = -0.5, pair.minus_branch, pair.p_minus
    return outcome, branch / math.sqrt(p), p / total


@dataclass(frozen=True)
class TrsCoefficients:
    N: int
    M: int
    alpha: float
    gamma: float


def alpha_coefficient(N: int, M: int) -> float:
    """``sqrt(M (N - M + 1) / N^2)``; zero at ``M = 0`` and ``M = N + 1``."""
    if not 0 <= M <= N + 1:
        raise ValueError(f"alpha undefined for M={M}, N={N}")
    return math.sqrt(M * (N - M + 1) / N**2)


def gamma_coefficient(N: int, M: int) -> float:
    """``sqrt(M (M - 1) / ((N - M + 1)(N - M + 2)))``; zero for ``M < 2``."""
    if not 0 <= M <= N:
        raise ValueError(f"gamma undefined for M={M}, N={N}")
    return math.sqrt(M * (M - 1) / ((N - M + 1) * (N - M + 2)))


def trs_coefficients(N: int, M: int) -> TrsCoefficients:
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside 0..{N}")
    return TrsCoefficients(N, M, alpha_coefficient(N, M), gamma_coefficient(N, M))


def coherent_weight_closed_form(N: int, M: int) -> float:
    """Squared norm of the coherent part of ``W^{+-}|Psi_M>`` from the alpha formulas."""
    a_lo = alpha_coefficient(N, M)
    a_hi = alpha_coefficient(N, M + 1)
    return 0.25 * (1.0 + a_lo**2 + a_hi**2)


def incoherent_part_closed_form(lattice: LatticeSpec, M: int, outcome: float = 0.5) -> np.ndarray:
    """``+-(2 sqrt N)^{-1} sum_{q != Q} S^-_q (|Psi_M> - gamma_M |Psi_{M-2}>)``.

    The finite-``q`` part of ``W^{+-}|Psi_M>`` after a measurement at site 0.
    """
    N = lattice.n_sites
    base = build_psi_m(lattice, M)
    if M >= 2:
        base = base - gamma_coefficient(N, M) * build_psi_m(lattice, M - 2)
    iQ = lattice.momentum_index(lattice.Q)
    out = np.zeros_like(base)
    for i, q in enumerate(lattice.momenta):
        if i != iQ:
            out += apply_fourier_op(base, lattice, q, "S-")
    return math.copysign(1.0, outcome) * out / (2.0 * math.sqrt(N))


@dataclass(frozen=True)
class TrsDecomposition:
    coherent_coeffs: dict[int, complex]
    incoherent_norm_sq: float
    total_norm_sq: float

    @property
    def coherent_norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coherent_coeffs.values()))


def decompose_onto_trs(branch: np.ndarray, lattice: LatticeSpec, site: int = 0,
                       family: Sequence[np.ndarray] | None = None) -> TrsDecomposition:
    """Project a measurement branch onto ``{|Psi_M'>}`` and report the residual.

    Only measurements at site 0 are accepted: the phases of the expansion are
    referred to ``r_0 = 0``.
    """
    if site != 0:
        raise ValueError("TRS decomposition is defined for a measurement at site 0 only")
    N = n_sites_of(branch)
    if N != lattice.n_sites:
        raise ValueError(f"branch has N={N}, lattice has N={lattice.n_sites}")
    if family is None:
        family = [build_psi_m(lattice, M) for M in range(N + 1)]
    coeffs = {M: complex(np.vdot(psi, branch)) for M, psi in enumerate(family)}
    total = float(np.vdot(branch, branch).real)
    residual = branch - sum(c * family[M] for M, c in coeffs.items())
    return TrsDecomposition(coeffs, float(np.vdot(residual, residual).real), total)


@dataclass(frozen=True)
class CascadeStep:
    step: int
    site: int
    outcome: float
    prob: float
    sz_mean: float
    sz_std: float
    staggered_x: float
    axis_anisotropy: float

    def as_record(self) -> dict:
        return {
            "step": self.step,
            "site": self.site,
            "outcome": self.outcome,
            "prob": self.prob,
            "sz_mean": self.sz_mean,
            "sz_std": self.sz_std,
            "staggered_x": self.staggered_x,
            "axis_anisotropy": self.axis_anisotropy,
        }


@dataclass
class MeasurementTrajectory:
    seed: int | None
    steps: list[CascadeStep] = field(default_factory=list)
    final_state: np.ndarray | None = field(default=None, repr=False)


def parse_schedule(spec: str | Sequence[int]) -> str | list[int]:
    """Accept ``"random"``, ``"roundrobin"``, ``"explicit:0,3,5"`` or a site list."""
    if not isinstance(spec, str):
        return [int(s) for s in spec]
    if spec in ("random", "roundrobin"):
        return spec
    if spec.startswith("explicit:"):
        items = [s for s in spec[len("explicit:"):].split(",") if s.strip()]
        if not items:
            raise ValueError("explicit schedule needs at least one site")
        return [int(s) for s in items]
    raise ValueError(f"unknown schedule {spec!r}")


def _snapshot(state: np.ndarray, lattice: LatticeSpec) -> tuple[float, float, float, float]:
    mean, std = sz_moments(state)
    stag = staggered_order(state, lattice, exclude_site=None)
    try:
        ratio = axis_diagnostics(state, lattice).ratio
    except ValueError:
        ratio = float("nan")
    return mean, std, stag, ratio


def run_cascade(
    state: np.ndarray,
    lattice: LatticeSpec,
    schedule: str | Sequence[int],
    n_steps: int,
    rng: np.random.Generator | int,
) -> MeasurementTrajectory:
    """Measure ``s^x`` on ``n_steps`` sites in sequence, recording observables.

    ``rng`` may be a generator or an integer seed. Sites come from the
    schedule: uniformly random, round-robin from site 0, or an explicit list
    (cycled if shorter than ``n_steps``).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    if seed is not None:
        rng = np.random.default_rng(int(seed))
    N = lattice.n_sites
    sched = parse_schedule(schedule)
    if isinstance(sched, list):
        for s in sched:
            if not 0 <= s < N:
                raise IndexError(f"schedule site {s} out of range for N={N}")

    traj = MeasurementTrajectory(seed=None if seed is None else int(seed))
    psi = state
    for k in range(n_steps):
        if sched == "random":
            site = int(rng.integers(N))
        elif sched == "roundrobin":
            site = k % N
        else:
            site = sched[k % len(sched)]
        outcome, psi, prob = measure_sx(psi, site, rng)
        traj.steps.append(CascadeStep(k + 1, site, outcome, prob, *_snapshot(psi, lattice)))
    traj.final_state = psi
    return traj


def run_cascades(
    state: np.ndarray,
    lattice: LatticeSpec,
    schedule: str | Sequence[int],
    n_steps: int,
    n_trajectories: int,
    seed: int,
    threads: int = 1,
) -> list[MeasurementTrajectory]:
    """Independent trajectories; trajectory ``i`` is seeded with ``seed + i``.

    Results come back in trajectory order regardless of ``threads``.
    """
    seeds = [seed + i for i in range(n_trajectories)]

    def one(s: int) -> MeasurementTrajectory:
        return run_cascade(state, lattice, schedule, n_steps, s)

    if threads <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, seeds))
