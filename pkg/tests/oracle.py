"""Dense Kronecker-product operators used as an independent brute-force oracle.

Nothing here touches the package's matrix-free kernels: every operator is an
explicit ``2**N x 2**N`` matrix, with site ``j`` sitting at Kronecker slot
``N-1-j`` so that bit ``j`` of the basis index is spin ``j`` (1 = up).
"""

import numpy as np

# single-site matrices in the (down, up) basis
S_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
S_MINUS = S_PLUS.T.copy()
S_Z = np.diag([-0.5, 0.5]).astype(complex)
S_X = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
S_Y = 0.5 * np.array([[0, 1j], [-1j, 0]], dtype=complex)
SINGLE = {"s+": S_PLUS, "s-": S_MINUS, "sz": S_Z, "sx": S_X, "sy": S_Y}


def site_matrix(N, j, op):
    m = SINGLE[op] if isinstance(op, str) else op
    return np.kron(np.kron(np.eye(1 << (N - 1 - j)), m), np.eye(1 << j))


def fourier_matrix(N, positions, q, op):
    phases = np.exp(1j * positions @ np.atleast_1d(q))
    return sum(phases[j] * site_matrix(N, j, op) for j in range(N)) / np.sqrt(N)


def heisenberg_matrix(bond_matrix, delta_z=1.0):
    """``sum_{j<k} J_jk (s+s- + s-s+ + 2 dz szsz)`` as a dense matrix."""
    N = len(bond_matrix)
    H = np.zeros((1 << N, 1 << N), dtype=complex)
    for j in range(N):
        for k in range(j + 1, N):
            J = bond_matrix[j, k]
            if J == 0:
                continue
            H += J * (site_matrix(N, j, "s+") @ site_matrix(N, k, "s-")
                      + site_matrix(N, j, "s-") @ site_matrix(N, k, "s+")
                      + 2 * delta_z * site_matrix(N, j, "sz") @ site_matrix(N, k, "sz"))
    return H


def psi_m_by_enumeration(N, eta, M):
    """Brute-force TRS amplitude: loop over configurations, product of signs."""
    from math import comb

    v = np.zeros(1 << N, dtype=complex)
    for mask in range(1 << N):
        down = [j for j in range(N) if not (mask >> j) & 1]
        if len(down) == M:
            v[mask] = np.prod([eta[j] for j in down]) if down else 1.0
    return v / np.sqrt(comb(N, M))


def expectation(psi, op_matrix):
    return np.vdot(psi, op_matrix @ psi) / np.vdot(psi, psi)
