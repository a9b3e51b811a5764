import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from regop import hilsum as hs
from regop.spectral import operator_norm

TWO_PI = 2 * math.pi


def test_beta_examples():
    assert hs.beta(0) == 1
    assert hs.beta(1 / math.pi) == pytest.approx(-1, abs=1e-12)
    assert hs.beta(1 / TWO_PI) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        hs.beta(1.5)


@given(st.floats(1e-300, 1))
def test_beta_unimodular(t):
    assert abs(abs(hs.beta(t)) - 1) <= 1e-15


def test_eigensystem_examples():
    s = hs.fiber_eigensystem(0.0, 3)
    assert np.array_equal(s.eigenvalues, TWO_PI * np.arange(-3, 4))
    s = hs.fiber_eigensystem(0.5, 3)
    lam = dict(zip(s.modes, s.eigenvalues))
    assert lam[0] == 2.0 and lam[1] == pytest.approx(2 + TWO_PI)
    # beta = 1 gives the periodic spectrum back as a set
    s = hs.fiber_eigensystem(1 / TWO_PI, 3)
    assert np.allclose(s.eigenvalues, TWO_PI * (np.arange(-3, 4) + 1))


@given(st.floats(0.01, 1), st.integers(-5, 5))
def test_eigenfunctions_satisfy_boundary_condition(t, n):
    s = hs.fiber_eigensystem(t, 6)
    phi = s.eigenfunction(np.array([0.0, 1.0]))[n + 6]
    assert abs(phi[0] - hs.beta(t) * phi[1]) <= 1e-9


def test_eigenfunctions_unit_norm():
    x, w = np.polynomial.legendre.leggauss(80)
    x, w = 0.5 * (x + 1), 0.5 * w
    vals = hs.fiber_eigensystem(0.3, 4).eigenfunction(x)
    assert np.allclose(np.abs(vals) ** 2 @ w, 1.0, atol=1e-13)


@given(st.floats(0.01, 1))
def test_mu_strictly_increasing(t):
    lam = hs.fiber_eigensystem(t, 8).eigenvalues
    mu = lam / np.sqrt(1 + lam * lam)
    assert np.all(np.diff(mu) > 0)


def test_fd_oracle_examples():
    w = hs.fd_oracle(0.0, 256)
    assert abs(w[0]) <= 1e-6
    w = hs.fd_oracle(0.5, 256)
    assert np.min(np.abs(w - 2.0)) <= 0.5
    with pytest.raises(ValueError):
        hs.fd_oracle(0.5, 32)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.5, 0.8])
def test_fd_oracle_agrees_with_closed_form(t):
    err, lam_max = hs.fd_errors(t, 256)
    assert err.max() <= 10 * lam_max / 256


@pytest.mark.parametrize("t", [0.3, 0.5, 0.8])
def test_fd_oracle_first_order(t):
    e256, _ = hs.fd_errors(t, 256)
    e512, _ = hs.fd_errors(t, 512)
    assert e512.max() <= 0.6 * e256.max()


@pytest.mark.parametrize("t", [0.0, 0.04, 0.3, 0.5])
def test_overlaps_match_quadrature(t):
    # oracle: Gauss-Legendre on [0, 1] (integrand is entire, 200 nodes is exact to rounding)
    x, w = np.polynomial.legendre.leggauss(200)
    x, w = 0.5 * (x + 1), 0.5 * w
    M = 6
    g, spec = hs.overlap_matrix(t, M, pad=2)
    e = np.exp(2j * np.pi * np.outer(np.arange(-M, M + 1), x))
    phi = spec.eigenfunction(x)
    quad = (e.conj() * w) @ phi.T
    assert np.max(np.abs(g - quad)) <= 1e-12


def test_overlap_limit_value():
    # periodic fiber: phi_n = e_{-n}, so the overlaps form the flip permutation
    g, _ = hs.overlap_matrix(0.0, 3)
    assert np.allclose(g, np.fliplr(np.eye(7)), atol=1e-15)
    with pytest.raises(ValueError):
        hs.beta(5e-324)


@pytest.mark.parametrize("t", [0.5, 0.8])
def test_overlaps_nearly_unitary_on_central_block(t):
    defects = []
    for M in (64, 128, 256):
        g, _ = hs.overlap_matrix(t, M)
        gg = g.conj().T @ g
        c, h = M, M // 4
        blk = gg[c - h:c + h + 1, c - h:c + h + 1]
        defects.append(np.linalg.norm(blk - np.eye(2 * h + 1), 2))
    assert defects[0] <= 0.1
    assert defects[0] > defects[1] > defects[2]


def test_z_at_zero_is_diagonal():
    # i d/dx e_m = -2 pi m e_m, so the entry at Fourier index m is mu_{-m}
    z = np.asarray(hs.fiber_z_matrix(0.0, 10))
    m = TWO_PI * np.arange(-10, 11)
    assert np.allclose(z, np.diag(-m / np.sqrt(1 + m * m)), atol=1e-14)


@given(st.floats(0.005, 1))
def test_fiber_z_hermitian_contraction(t):
    z = np.asarray(hs.fiber_z_matrix(t, 24))
    assert hs.hermitian_residual(z) <= 1e-9
    assert operator_norm(z) < 1


def test_resonant_point_matches_periodic_fiber():
    rows = hs.discontinuity_scan([1 / TWO_PI, 1 / (2 * TWO_PI)], 64)
    assert max(r.norm_distance for r in rows) <= 0.05
    assert hs.is_resonant(1 / TWO_PI) and not hs.is_resonant(0.3)


def test_beta_periodicity_gives_same_operator():
    # 1/t - 1/t' = 2 pi
    t = 0.3
    t2 = 1 / (1 / t + TWO_PI)
    za, zb = (np.asarray(hs.fiber_z_matrix(s, 64)) for s in (t, t2))
    assert operator_norm(za - zb) <= 1e-9


def test_anti_resonant_distance_grows_with_m():
    # beta = -1: the distance creeps up with the truncation, never down
    t = 1 / (TWO_PI * 3 + math.pi)
    vals = [hs.discontinuity_scan([t], M)[0].norm_distance for M in (32, 64, 128)]
    assert vals[0] >= 1.15 and vals[0] < vals[1] < vals[2] < 2


def test_scan_rows_and_csv():
    rows = hs.discontinuity_scan([0.5, 0.25], 16)
    assert [r.t for r in rows] == [0.5, 0.25]
    text = hs.scan_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "t,M,norm_distance,hermitian_residual" and len(lines) == 3
    assert float(lines[1].split(",")[2]) == rows[0].norm_distance
    with pytest.raises(ValueError):
        hs.discontinuity_scan([0.0], 16)


def test_continuity_on_restriction():
    jumps, slopes = hs.continuity_profile(np.linspace(0.1, 1, 46), 32)
    fine_jumps, fine_slopes = hs.continuity_profile(np.linspace(0.1, 1, 91), 32)
    assert np.isfinite(slopes).all()
    assert fine_slopes.max() <= 1.5 * slopes.max()
    assert fine_jumps.max() <= 0.6 * jumps.max()


def test_fiber_family():
    fam = hs.FiberFamily.build([0.0, 0.5], 8)
    assert fam.grid == (0.0, 0.5)
    assert fam.z[0.5].dim == 17 and fam.spectra[0.0].eigenvalues[8] == 0.0
