"""Fibers of the twisted-derivative family on L2(0, 1).

For each t in [0, 1] the fiber operator is ``T_t = i d/dx`` with boundary
condition ``f(0) = beta(t) f(1)``, where ``beta(0) = 1`` and
``beta(t) = exp(i/t)`` otherwise.  Its eigenfunctions are
``phi_n(x) = exp(-i lambda_n x)`` with ``lambda_n = 1/t + 2 pi n``
(``2 pi n`` at t = 0).  The fiberwise z-transforms are assembled in the
fixed Fourier basis ``e_m(x) = exp(2 pi i m x)`` of L2(0, 1), where ``z(0)``
is diagonal.

The family ``t -> z(t)`` is norm continuous on every ``[delta, 1]`` but
jumps at ``t = 0``; :func:`discontinuity_scan` measures that jump.
"""
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .spectral import OperatorMatrix, hermitian_residual, operator_norm

__all__ = [
    "beta", "FiberSpectrum", "fiber_eigensystem", "fd_oracle", "fd_errors",
    "overlap_matrix", "fiber_z_matrix", "is_resonant", "ScanRow",
    "discontinuity_scan", "scan_to_csv", "continuity_profile", "FiberFamily",
    "CSV_COLUMNS",
]

TWO_PI = 2.0 * math.pi
CSV_COLUMNS = ("t", "M", "norm_distance", "hermitian_residual")


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"fiber parameter t must lie in [0, 1], got {t!r}")


def beta(t):
    _check_t(t)
    if t == 0:
        return 1.0 + 0.0j
    phase = 1.0 / t
    if not math.isfinite(phase):
        raise ValueError(f"t = {t!r} is too small to resolve the phase 1/t")
    return complex(np.exp(1j * phase))


def _base(t):
    _check_t(t)
    return 0.0 if t == 0 else 1.0 / t


def _center(t):
    """Eigenmode index whose eigenfunction sits closest to the constant mode."""
    return -int(round(_base(t) / TWO_PI))


@dataclass(frozen=True)
class FiberSpectrum:
    t: float
    modes: np.ndarray
    eigenvalues: np.ndarray

    def eigenfunction(self, x):
        """Values of the unit-norm eigenfunctions at points ``x`` (rows: modes)."""
        x = np.asarray(x, dtype=float)
        return np.exp(-1j * np.outer(self.eigenvalues, x))


def fiber_eigensystem(t, M, center=0):
    """Eigenvalues ``lambda_n(t)`` for ``n`` in ``center-M .. center+M``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    modes = np.arange(center - M, center + M + 1)
    return FiberSpectrum(float(t), modes, _base(t) + TWO_PI * modes)


def fd_oracle(t, P):
    """Eigenvalues of the first-order forward-difference model of ``T_t``.

    The ``P x P`` matrix is ``(i/h)(S - I)`` with ``h = 1/P`` and ``S`` the
    forward shift whose wrap-around entry carries ``conj(beta(t))`` so that
    the discrete eigenvectors satisfy the twisted boundary condition.
    Eigenvalues are returned sorted by modulus.
    """
    if P < 64:
        raise ValueError("P must be >= 64")
    h = 1.0 / P
    s = np.diag(np.ones(P - 1), 1).astype(complex)
    s[P - 1, 0] = np.conj(beta(t))
    a = (1j / h) * (s - np.eye(P))
    w = np.linalg.eigvals(a)
    return w[np.argsort(np.abs(w), kind="stable")]


def fd_errors(t, P, count=5):
    """Distance from each of the ``count`` exact eigenvalues nearest 0 to the
    finite-difference spectrum, plus the largest of those eigenvalues."""
    exact = fiber_eigensystem(t, count + 2, center=_center(t)).eigenvalues
    exact = exact[np.argsort(np.abs(exact), kind="stable")][:count]
    approx = fd_oracle(t, P)
    err = np.array([np.min(np.abs(approx - lam)) for lam in exact])
    return err, float(np.max(np.abs(exact)))


def overlap_matrix(t, M, pad=0):
    """Overlaps ``<e_m, phi_n>`` for ``m`` in ``-M..M``.

    Columns run over eigenmodes ``n`` in a window of half-width ``M + pad``
    centred where the eigenfunctions meet the low Fourier modes.  Returns
    ``(G, spectrum)``.
    """
    spec = fiber_eigensystem(t, M + pad, center=_center(t))
    m = np.arange(-M, M + 1)
    delta = spec.eigenvalues[None, :] + TWO_PI * m[:, None]
    # (1 - exp(-i d)) / (i d) = exp(-i d/2) * sin(d/2) / (d/2)
    g = np.exp(-0.5j * delta) * np.sinc(delta / TWO_PI)
    return g, spec


def fiber_z_matrix(t, M, pad=None):
    """Fiber z-transform ``sum_n mu_n |phi_n><phi_n|`` on Fourier modes ``-M..M``.

    ``mu_n = lambda_n / sqrt(1 + lambda_n^2)``.  ``pad`` widens the eigenmode
    window beyond the ``2M+1`` modes that dominate the block (default ``M``);
    the neglected modes only contribute through the slowly decaying overlap
    tails.
    """
    pad = M if pad is None else pad
    g, spec = overlap_matrix(t, M, pad)
    lam = spec.eigenvalues
    mu = lam / np.sqrt(1.0 + lam * lam)
    z = (g * mu) @ g.conj().T
    return OperatorMatrix(z, -M)


def is_resonant(t, tol=1e-9):
    """True when ``beta(t) = 1``, i.e. ``1/t`` is a multiple of ``2 pi``."""
    if t == 0:
        return True
    k = 1.0 / (TWO_PI * t)
    return abs(k - round(k)) < tol * max(1.0, k)


@dataclass(frozen=True)
class ScanRow:
    t: float
    M: int
    norm_distance: float
    hermitian_residual: float
    z_norm: float


def discontinuity_scan(t_list, M, pad=None):
    """Operator-norm distance ``||z(t) - z(0)||`` for each ``t`` in ``t_list``.

    Rows come back in the order of ``t_list``.
    """
    z0 = np.asarray(fiber_z_matrix(0.0, M, pad))
    rows = []
    for t in t_list:
        t = float(t)
        if not 0.0 < t <= 1.0:
            raise ValueError(f"scan points must lie in (0, 1], got {t!r}")
        z = np.asarray(fiber_z_matrix(t, M, pad))
        rows.append(ScanRow(t, M, operator_norm(z - z0), hermitian_residual(z),
                            operator_norm(z)))
    return rows


def scan_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(r.t), r.M, repr(r.norm_distance), repr(r.hermitian_residual)])
    return buf.getvalue()


def continuity_profile(t_grid, M, pad=None):
    """Adjacent-pair jumps of ``t -> z(t)`` on a grid inside ``(0, 1]``.

    Returns ``(jumps, slopes)`` where ``jumps[i] = ||z(t_{i+1}) - z(t_i)||``
    and ``slopes[i] = jumps[i] / |t_{i+1} - t_i|``; the largest slope is an
    empirical Lipschitz constant on the grid.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0):
        raise ValueError("continuity grid must avoid t = 0")
    zs = [np.asarray(fiber_z_matrix(t, M, pad)) for t in t_grid]
    jumps = np.array([operator_norm(b - a) for a, b in zip(zs, zs[1:])])
    slopes = jumps / np.abs(np.diff(t_grid))
    return jumps, slopes


@dataclass
class FiberFamily:
    """Fiber data on a parameter grid: eigenvalues and z-matrices per fiber."""
    grid: tuple
    M: int
    spectra: dict
    z: dict

    @classmethod
    def build(cls, grid, M, pad=None):
        grid = tuple(float(t) for t in grid)
        spectra, zs = {}, {}
        for t in grid:
            spectra[t] = fiber_eigensystem(t, M, center=_center(t))
            zs[t] = fiber_z_matrix(t, M, pad)
        return cls(grid, M, spectra, zs)
