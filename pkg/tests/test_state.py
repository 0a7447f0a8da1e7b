import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelgen import build_lattice
from neelgen.state import (
    SzSectorView,
    add,
    apply_fourier_op,
    apply_site_op,
    basis_state,
    inner,
    load_state,
    n_sites_of,
    product_state,
    random_state,
    rotate_z,
    save_state,
    sector_decompose,
    total_sz,
)
from oracle import fourier_matrix, site_matrix

OPS = ("s+", "s-", "sz", "sx", "sy")


@pytest.mark.parametrize("op", OPS)
def test_site_ops_match_kron(op):
    rng = np.random.default_rng(1)
    N = 5
    psi = random_state(N, rng)
    for j in range(N):
        np.testing.assert_allclose(apply_site_op(psi, j, op), site_matrix(N, j, op) @ psi, atol=1e-14)


@pytest.mark.parametrize("op", ["S+", "S-", "Sz"])
def test_fourier_ops_match_kron(op):
    lat = build_lattice("square", [2, 2])
    psi = random_state(4, np.random.default_rng(2))
    for q in lat.momenta:
        expected = fourier_matrix(4, lat.positions, q, {"S+": "s+", "S-": "s-", "Sz": "sz"}[op]) @ psi
        np.testing.assert_allclose(apply_fourier_op(psi, lat, q, op), expected, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_spin_commutation(seed, N):
    rng = np.random.default_rng(seed)
    psi = random_state(N, rng)
    j = int(rng.integers(N))

    def comm(a, b):
        return apply_site_op(apply_site_op(psi, j, b), j, a) - apply_site_op(apply_site_op(psi, j, a), j, b)

    np.testing.assert_allclose(comm("sx", "sy"), 1j * apply_site_op(psi, j, "sz"), atol=1e-13)
    np.testing.assert_allclose(comm("s+", "s-"), 2 * apply_site_op(psi, j, "sz"), atol=1e-13)


def test_basis_bit_convention():
    psi = basis_state(3, 0b010)
    np.testing.assert_allclose(apply_site_op(psi, 1, "sz"), 0.5 * psi)
    np.testing.assert_allclose(apply_site_op(psi, 0, "sz"), -0.5 * psi)
    np.testing.assert_allclose(apply_site_op(psi, 0, "s+"), basis_state(3, 0b011))
    assert not apply_site_op(psi, 1, "s+").any()


def test_product_state_bloch_directions():
    psi = product_state([np.pi / 2, 0.0], [0.0, 0.0])
    # site 0 along +x, site 1 up
    assert np.vdot(psi, apply_site_op(psi, 0, "sx")).real == pytest.approx(0.5)
    assert np.vdot(psi, apply_site_op(psi, 1, "sz")).real == pytest.approx(0.5)


def test_rotate_z_rotates_sx_into_sy():
    psi = product_state([np.pi / 2], [0.0])
    rot = rotate_z(psi, np.pi / 2)
    assert np.vdot(rot, apply_site_op(rot, 0, "sy")).real == pytest.approx(0.5)


def test_sector_decompose_and_view():
    rng = np.random.default_rng(3)
    psi = random_state(6, rng)
    sectors = sector_decompose(psi)
    assert sum(w for _, w in sectors) == pytest.approx(1.0)
    assert [s for s, _ in sectors] == [3, 2, 1, 0, -1, -2, -3]
    view = SzSectorView.of(6, 0.0)
    assert len(view.members) == 20
    np.testing.assert_allclose(total_sz(6)[view.members], 0)
    part = view.embed(view.restrict(psi))
    assert np.linalg.norm(part) ** 2 == pytest.approx(dict(sectors)[0.0])
    with pytest.raises(ValueError):
        SzSectorView.of(6, 0.5)


def test_state_errors():
    with pytest.raises(ValueError):
        n_sites_of(np.zeros(6))
    with pytest.raises(ValueError):
        n_sites_of(np.zeros(1 << 25))
    with pytest.raises(IndexError):
        apply_site_op(basis_state(3, 0), 3, "sz")
    with pytest.raises(ValueError):
        apply_site_op(basis_state(3, 0), 0, "sw")
    with pytest.raises(ValueError):
        inner(basis_state(3, 0), basis_state(4, 0))
    with pytest.raises(ValueError):
        add(basis_state(3, 0), basis_state(2, 0))


def test_dump_round_trip(tmp_path):
    psi = random_state(7, np.random.default_rng(4))
    path = tmp_path / "psi.bin"
    save_state(path, psi, {"label": "random"})
    back, meta = load_state(path)
    np.testing.assert_array_equal(back, psi)
    assert meta == {"label": "random", "n_sites": 7, "version": 1}
    raw = path.read_bytes()
    (tmp_path / "bad.bin").write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ValueError, match="magic"):
        load_state(tmp_path / "bad.bin")
    (tmp_path / "short.bin").write_bytes(raw[:-16])
    with pytest.raises(ValueError, match="payload"):
        load_state(tmp_path / "short.bin")
