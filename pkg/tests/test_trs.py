import numpy as np
import pytest

from neelgen import build_easy_axis, build_lattice, build_psi_m, default_weight_profile
from neelgen.state import apply_fourier_op, sector_decompose
from neelgen.trs import EasyAxisWeights, psi_m_log_prefactor, trs_family
from oracle import psi_m_by_enumeration


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_fill_matches_enumeration_and_ladder(N):
    lat = build_lattice("chain", [N])
    for M in range(N + 1):
        fill = build_psi_m(lat, M)
        np.testing.assert_allclose(fill, psi_m_by_enumeration(N, lat.eta, M), atol=1e-14)
        np.testing.assert_allclose(build_psi_m(lat, M, method="ladder"), fill, atol=1e-12)


def test_family_is_orthonormal_square_lattice():
    lat = build_lattice("square", [4, 2])
    fam = np.array(trs_family(lat))
    np.testing.assert_allclose(fam.conj() @ fam.T, np.eye(9), atol=1e-13)


def test_psi_m_lies_in_one_sector():
    lat = build_lattice("chain", [10])
    assert sector_decompose(build_psi_m(lat, 3), tol=1e-20) == [(2.0, pytest.approx(1.0))]


def test_lowering_connects_neighbours():
    # S^-_Q |Psi_M> = sqrt((M+1)(N-M)/N) |Psi_{M+1}>
    N = 8
    lat = build_lattice("chain", [N])
    for M in range(N):
        lowered = apply_fourier_op(build_psi_m(lat, M), lat, lat.Q, "S-")
        np.testing.assert_allclose(lowered, np.sqrt((M + 1) * (N - M) / N) * build_psi_m(lat, M + 1), atol=1e-13)


def test_log_prefactor_large_n_is_finite():
    assert np.isfinite(psi_m_log_prefactor(256, 128))


def test_invalid_m_and_method():
    lat = build_lattice("chain", [4])
    with pytest.raises(ValueError):
        build_psi_m(lat, 5)
    with pytest.raises(ValueError):
        build_psi_m(lat, 1, method="magic")


def test_default_weights():
    w = default_weight_profile(16)
    assert w.sigma == pytest.approx(1.0)
    assert np.linalg.norm(w.u) == pytest.approx(1.0)
    assert not w.u[1::2].any()
    assert np.argmax(w.u) == 8
    np.testing.assert_allclose(w.u, w.u[::-1])
    with pytest.raises(ValueError):
        default_weight_profile(7)
    with pytest.raises(ValueError):
        default_weight_profile(8, sigma=0.0)


def test_easy_axis_state_and_validation():
    lat = build_lattice("chain", [8])
    w = default_weight_profile(8)
    psi = build_easy_axis(lat, w)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    expected = sum(w.u[M] * build_psi_m(lat, M) for M in range(9))
    np.testing.assert_allclose(psi, expected / np.linalg.norm(expected))
    bad = w.u.copy()
    bad[3] = 0.1
    with pytest.raises(ValueError):
        build_easy_axis(lat, EasyAxisWeights(bad, 4, 1))
    with pytest.raises(ValueError):
        build_easy_axis(lat, EasyAxisWeights(w.u[:-1], 4, 1))
    with pytest.raises(ValueError):
        build_easy_axis(lat, EasyAxisWeights(-w.u, 4, 1))
