import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelgen import branch_pair, build_lattice, build_psi_m, decompose_onto_trs, measure_sx, run_cascade, run_cascades
from neelgen.measurement import (
    alpha_coefficient,
    coherent_weight_closed_form,
    gamma_coefficient,
    incoherent_part_closed_form,
    parse_schedule,
    trs_coefficients,
)
from neelgen.observables import bloch_map, site_bloch
from neelgen.state import random_state
from oracle import S_X, site_matrix


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_branches_match_projector_matrices(seed, N):
    rng = np.random.default_rng(seed)
    psi = random_state(N, rng)
    j = int(rng.integers(N))
    sx = site_matrix(N, j, S_X)
    eye = np.eye(1 << N)
    pair = branch_pair(psi, j)
    np.testing.assert_allclose(pair.plus_branch, (eye / 2 + sx) @ psi, atol=1e-14)
    np.testing.assert_allclose(pair.minus_branch, (eye / 2 - sx) @ psi, atol=1e-14)
    assert pair.p_plus + pair.p_minus == pytest.approx(1.0)


def test_measure_sx_collapses_onto_eigenstate():
    rng = np.random.default_rng(0)
    psi = random_state(5, rng)
    outcome, post, p = measure_sx(psi, 2, rng)
    assert np.linalg.norm(post) == pytest.approx(1.0)
    assert site_bloch(post, 2).b[0] == pytest.approx(2 * outcome)
    assert 0 < p <= 1


def test_singlet_collapse():
    lat = build_lattice("chain", [2])
    singlet = build_psi_m(lat, 1)
    outcome, post, p = measure_sx(singlet, 0, np.random.default_rng(1))
    assert p == pytest.approx(0.5)
    b = bloch_map(post, lat)
    np.testing.assert_allclose(b[:, 0], [2 * outcome, -2 * outcome], atol=1e-14)


def test_degenerate_state_raises():
    with pytest.raises(ValueError):
        measure_sx(np.zeros(4, dtype=complex), 0, np.random.default_rng(0))


def test_coefficient_formulas():
    assert alpha_coefficient(8, 0) == 0
    assert alpha_coefficient(8, 9) == 0
    assert alpha_coefficient(8, 4) == pytest.approx(math.sqrt(20) / 8)
    assert gamma_coefficient(8, 1) == 0
    assert gamma_coefficient(8, 4) == pytest.approx(math.sqrt(12 / 30))
    c = trs_coefficients(12, 6)
    assert (c.N, c.M) == (12, 6)
    with pytest.raises(ValueError):
        trs_coefficients(4, 5)


@pytest.mark.parametrize("N", [4, 6, 8, 10])
def test_branch_splits_into_closed_form_parts(N):
    lat = build_lattice("chain", [N])
    M = N // 2
    fam = [build_psi_m(lat, m) for m in range(N + 1)]
    for sign in (1, -1):
        pair = branch_pair(fam[M], 0)
        branch = pair.plus_branch if sign > 0 else pair.minus_branch
        coherent = 0.5 * fam[M] + sign * 0.5 * (alpha_coefficient(N, M) * fam[M - 1] + alpha_coefficient(N, M + 1) * fam[M + 1])
        inc = incoherent_part_closed_form(lat, M, 0.5 * sign)
        np.testing.assert_allclose(branch, coherent + inc, atol=1e-13)
        dec = decompose_onto_trs(branch, lat, family=fam)
        assert dec.coherent_norm_sq == pytest.approx(coherent_weight_closed_form(N, M))
        assert dec.total_norm_sq == pytest.approx(0.5)


def test_decompose_requires_site_zero_and_matching_size():
    lat = build_lattice("chain", [4])
    psi = build_psi_m(lat, 2)
    with pytest.raises(ValueError):
        decompose_onto_trs(psi, lat, site=1)
    with pytest.raises(ValueError):
        decompose_onto_trs(psi, build_lattice("chain", [6]))


def test_parse_schedule():
    assert parse_schedule("random") == "random"
    assert parse_schedule("explicit:0,3,5") == [0, 3, 5]
    assert parse_schedule((1, 2)) == [1, 2]
    for bad in ("explicit:", "sometimes"):
        with pytest.raises(ValueError):
            parse_schedule(bad)


def test_cascade_reproducible_and_thread_independent():
    lat = build_lattice("chain", [8])
    psi = build_psi_m(lat, 4)
    a = run_cascades(psi, lat, "random", 5, 4, seed=7, threads=1)
    b = run_cascades(psi, lat, "random", 5, 4, seed=7, threads=3)
    assert [[s.as_record() for s in t.steps] for t in a] == [[s.as_record() for s in t.steps] for t in b]
    single = run_cascade(psi, lat, "random", 5, 9)
    assert single.steps == a[2].steps
    assert single.seed == 9


def test_cascade_schedules():
    lat = build_lattice("chain", [6])
    psi = build_psi_m(lat, 3)
    rr = run_cascade(psi, lat, "roundrobin", 8, 0)
    assert [s.site for s in rr.steps] == [0, 1, 2, 3, 4, 5, 0, 1]
    ex = run_cascade(psi, lat, "explicit:2,4", 3, 0)
    assert [s.site for s in ex.steps] == [2, 4, 2]
    # measuring the same site twice reproduces the first outcome
    rep = run_cascade(psi, lat, [3], 4, 11)
    assert len({s.outcome for s in rep.steps}) == 1
    assert all(s.prob == pytest.approx(1.0) for s in rep.steps[1:])
    with pytest.raises(IndexError):
        run_cascade(psi, lat, [6], 1, 0)
    with pytest.raises(ValueError):
        run_cascade(psi, lat, "random", 0, 0)
