import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelgen import (
    axis_diagnostics,
    branch_pair,
    build_lattice,
    build_psi_m,
    correlator,
    site_bloch,
    site_entropy,
    staggered_order,
    structure_factor,
    sz_moments,
)
from neelgen.observables import branch_ensemble, correlation_matrix, reduced_density_matrix
from neelgen.state import product_state, random_state, rotate_z
from oracle import expectation, fourier_matrix, site_matrix

LABEL_OPS = {"+": "s+", "-": "s-", "z": "sz", "x": "sx", "y": "sy"}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from("+-zxy"), st.sampled_from("+-zxy"))
def test_correlator_matches_dense_oracle(seed, a, b):
    rng = np.random.default_rng(seed)
    lat = build_lattice("chain", [4])
    psi = random_state(4, rng)
    K = structure_factor(psi, lat, a, b)
    for i, q in enumerate(lat.momenta):
        Sa = fourier_matrix(4, lat.positions, q, LABEL_OPS[a])
        Sb = fourier_matrix(4, lat.positions, -q, LABEL_OPS[b])
        ref = np.vdot(psi, Sa @ Sb @ psi)
        assert correlator(psi, lat, a, b, q).value == pytest.approx(ref, abs=1e-13)
        assert K[i] == pytest.approx(ref, abs=1e-13)


def test_correlation_matrix_and_unknown_label():
    psi = random_state(3, np.random.default_rng(5))
    C = correlation_matrix(psi, "z", "x")
    ref = expectation(psi, site_matrix(3, 1, "sz") @ site_matrix(3, 2, "sx"))
    assert C[1, 2] == pytest.approx(ref)
    with pytest.raises(ValueError):
        correlation_matrix(psi, "w", "z")


def test_ensemble_is_convex_combination():
    lat = build_lattice("chain", [6])
    rng = np.random.default_rng(6)
    a, b = random_state(6, rng), random_state(6, rng)
    mix = correlator([(0.3, a), (0.7, 2.0 * b)], lat, "+", "-", lat.Q).value
    expected = 0.3 * correlator(a, lat, "+", "-", lat.Q).value + 0.7 * correlator(b, lat, "+", "-", lat.Q).value
    assert mix == pytest.approx(expected)
    with pytest.raises(ValueError):
        sz_moments([(0.5, a), (0.4, b)])


def test_bloch_vector_and_density_matrix():
    psi = product_state([0.7, 1.9], [0.3, -1.2])
    b = site_bloch(psi, 1).b
    expected = [np.sin(1.9) * np.cos(-1.2), np.sin(1.9) * np.sin(-1.2), np.cos(1.9)]
    np.testing.assert_allclose(b, expected, atol=1e-14)
    assert site_bloch(psi, 1).length == pytest.approx(1.0)
    assert np.trace(reduced_density_matrix(psi, 0)).real == pytest.approx(1.0)
    with pytest.raises(IndexError):
        reduced_density_matrix(psi, 2)


def test_entropy_consistent_with_bloch_length():
    rng = np.random.default_rng(7)
    for _ in range(10):
        psi = random_state(5, rng)
        r = site_bloch(psi, 3).length
        lam = np.array([(1 + r) / 2, (1 - r) / 2])
        lam = lam[lam > 0]
        assert site_entropy(psi, 3) == pytest.approx(-(lam * np.log2(lam)).sum(), abs=1e-12)
    assert site_entropy(product_state([1.0], [0.0]), 0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        site_entropy([(1.0, psi)], 0)


def test_neel_product_has_unit_staggered_order():
    lat = build_lattice("square", [2, 2])
    thetas = [np.pi / 2] * 4
    phis = [0.0 if e > 0 else np.pi for e in lat.eta]
    neel = product_state(thetas, phis)
    assert staggered_order(neel, lat) == pytest.approx(1.0)
    assert staggered_order(neel, lat, exclude_site=None) == pytest.approx(1.0)
    assert staggered_order(neel, lat, outcome_sign=-1) == pytest.approx(-1.0)


def test_sz_moments_of_sector_states():
    lat = build_lattice("chain", [8])
    mean, std = sz_moments(build_psi_m(lat, 3))
    assert (mean, std) == (pytest.approx(1.0), pytest.approx(0.0))


def test_axis_angle_follows_rotation():
    lat = build_lattice("chain", [8])
    psi = branch_pair(build_psi_m(lat, 4), 0).plus_branch
    base = axis_diagnostics(psi, lat)
    assert base.angle == 0.0
    for theta in (0.3, -0.9, 1.2):
        d = axis_diagnostics(rotate_z(psi, theta), lat)
        assert d.angle == pytest.approx(theta)
        assert d.ratio == pytest.approx(base.ratio)


def test_axis_diagnostics_rotation_invariant_state():
    lat = build_lattice("chain", [8])
    d = axis_diagnostics(build_psi_m(lat, 4), lat)
    assert d.ratio == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        axis_diagnostics(build_psi_m(lat, 0) * 0 + np.eye(256)[0], lat)


def test_branch_ensemble_weights():
    lat = build_lattice("chain", [6])
    ens = branch_ensemble(branch_pair(build_psi_m(lat, 3), 0))
    assert [w for w, _ in ens] == [pytest.approx(0.5), pytest.approx(0.5)]
