"""Dense complex linear algebra kernel.

Hermitian eigendecomposition by cyclic Jacobi rotations, spectral functional
calculus, operator norms and least-squares distances to linear spans of
matrices.  Everything here works on plain ``numpy`` arrays; ``OperatorMatrix``
only adds the basis-index bookkeeping needed by truncated representations.
"""
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerances", "TOL", "OperatorMatrix", "LinalgError", "NotHermitianError",
    "ConvergenceError", "DimensionError", "SpectralFunctionError",
    "as_matrix", "hermitian_residual", "herm_eig", "apply_spectral_function",
    "operator_norm", "Span", "subspace_residual",
]


@dataclass(frozen=True)
class Tolerances:
    """Default tolerances; all are relative to ``max(1, ||input||)``."""
    hermitian: float = 1e-10
    eig_offdiag: float = 1e-13
    eig_max_sweeps: int = 100
    span_rank: float = 1e-12
    probe: float = 1e-8


TOL = Tolerances()


class LinalgError(ValueError):
    pass


class DimensionError(LinalgError):
    pass


class NotHermitianError(LinalgError):
    def __init__(self, asymmetry, scale):
        self.asymmetry = asymmetry
        super().__init__(
            f"matrix is not Hermitian: max|A - A^H| = {asymmetry:.3e} "
            f"(scale {scale:.3e})")


class ConvergenceError(LinalgError):
    def __init__(self, sweeps, residual):
        self.sweeps = sweeps
        self.residual = residual
        super().__init__(
            f"Jacobi iteration did not converge after {sweeps} sweeps; "
            f"off-diagonal norm {residual:.3e}")


class SpectralFunctionError(LinalgError):
    def __init__(self, eigenvalue, value):
        self.eigenvalue = eigenvalue
        super().__init__(
            f"spectral function is not finite at eigenvalue {eigenvalue!r} "
            f"(got {value!r})")


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix on ``span{e_offset, ..., e_{offset+dim-1}}``."""
    entries: np.ndarray
    basis_offset: int = 0
    hermitian: bool = field(default=False, compare=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        if self.hermitian:
            scale = max(1.0, np.linalg.norm(a, 2))
            asym = hermitian_residual(a)
            if asym > 1e-12 * scale:
                raise NotHermitianError(asym, scale)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def indices(self):
        """Basis labels of the rows (and columns)."""
        return np.arange(self.basis_offset, self.basis_offset + self.dim)

    def block(self, lo, hi):
        """Sub-block on basis labels ``lo..hi`` inclusive."""
        i, j = lo - self.basis_offset, hi - self.basis_offset + 1
        if i < 0 or j > self.dim or i >= j:
            raise DimensionError(f"labels {lo}..{hi} outside {self.indices[[0, -1]]}")
        return OperatorMatrix(self.entries[i:j, i:j], lo)


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def hermitian_residual(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _round_robin(n):
    """Tournament schedule: n-1 rounds of n/2 disjoint pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array([min(players[i], players[n - 1 - i]) for i in range(half)])
        q = np.array([max(players[i], players[n - 1 - i]) for i in range(half)])
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi(h, tol, max_sweeps):
    n = h.shape[0]
    # pad to even size with a decoupled zero row/column
    m = n + (n % 2)
    a = np.zeros((m, m), dtype=complex)
    a[:n, :n] = h
    v = np.eye(m, dtype=complex)
    rounds = _round_robin(m)
    threshold = tol * max(1.0, np.linalg.norm(h))

    def off_norm(x):
        return np.linalg.norm(x - np.diag(np.diag(x)))

    off = off_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError(sweeps, off)
        for p, q in rounds:
            apq = a[p, q]
            r = np.abs(apq)
            if not (r > 0.0).any():
                continue
            phase = np.exp(1j * np.angle(apq))
            d = (a[q, q] - a[p, p]).real
            sgn = np.where(d >= 0, 1.0, -1.0)
            theta = 0.5 * np.arctan2(2.0 * r * sgn, np.abs(d))
            c, s = np.cos(theta), np.sin(theta)
            # J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
            j10 = -s * phase.conj()
            j11 = c * phase.conj()
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c + aq * j10
            a[:, q] = ap * s + aq * j11
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = ap * c[:, None] + aq * j10.conj()[:, None]
            a[q, :] = ap * s[:, None] + aq * j11.conj()[:, None]
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c + vq * j10
            v[:, q] = vp * s + vq * j11
            a[p, q] = 0.0
            a[q, p] = 0.0
        sweeps += 1
        off = off_norm(a)
    w = np.diag(a).real[:n].copy()
    return w, v[:n, :n].copy()


def herm_eig(h, method="jacobi", tol=None):
    """Eigendecomposition ``H = U diag(w) U^H`` of a Hermitian matrix.

    Eigenvalues are returned in ascending order.  ``method="lapack"`` defers
    to ``numpy.linalg.eigh`` and is meant for large matrices where the
    rotation sweeps get slow.
    """
    tol = tol or TOL
    h = as_matrix(h, "H")
    if h.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    scale = max(1.0, np.linalg.norm(h, 2))
    asym = hermitian_residual(h)
    if asym > tol.hermitian * scale:
        raise NotHermitianError(asym, scale)
    h = 0.5 * (h + h.conj().T)
    if method == "lapack":
        w, u = np.linalg.eigh(h)
        return w, u
    if method != "jacobi":
        raise ValueError(f"unknown method {method!r}")
    w, u = _jacobi(h, tol.eig_offdiag, tol.eig_max_sweeps)
    order = np.argsort(w, kind="stable")
    return w[order], u[:, order]


def apply_spectral_function(a, f, method="jacobi"):
    """Return ``f(A) = U diag(f(w)) U^H`` for Hermitian ``A``.

    ``f`` is applied elementwise to the eigenvalue array; a non-finite value
    at any eigenvalue raises :class:`SpectralFunctionError`.
    """
    w, u = herm_eig(a, method=method)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape:
        fw = np.array([f(x) for x in w])
    bad = ~np.isfinite(fw)
    if bad.any():
        i = int(np.argmax(bad))
        raise SpectralFunctionError(float(w[i]), fw[i])
    return (u * fw) @ u.conj().T


def operator_norm(a):
    """Largest singular value."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


class Span:
    """Linear span of a list of equally shaped matrices (Frobenius geometry).

    Holds an orthonormal basis of the span so repeated distance queries are
    cheap.
    """

    def __init__(self, basis, rank_tol=None):
        basis = [np.asarray(b, dtype=complex) for b in basis]
        self.shape = basis[0].shape if basis else None
        for b in basis:
            if b.shape != self.shape:
                raise DimensionError(f"basis shapes differ: {b.shape} vs {self.shape}")
        rank_tol = TOL.span_rank if rank_tol is None else rank_tol
        if not basis:
            self.q = None
            return
        cols = np.stack([b.ravel() for b in basis], axis=1)
        u, s, _ = np.linalg.svd(cols, full_matrices=False)
        keep = s > rank_tol * max(1.0, s[0] if s.size else 0.0)
        self.q = u[:, keep]

    @property
    def rank(self):
        return 0 if self.q is None else self.q.shape[1]

    def project(self, x):
        x = np.asarray(x, dtype=complex)
        if self.q is None:
            return np.zeros_like(x)
        if x.shape != self.shape:
            raise DimensionError(f"shape {x.shape} does not match span shape {self.shape}")
        v = x.ravel()
        return (self.q @ (self.q.conj().T @ v)).reshape(x.shape)

    def residual(self, x):
        x = np.asarray(x, dtype=complex)
        return float(np.linalg.norm(x - self.project(x)))


def subspace_residual(x, basis):
    """Frobenius distance from ``x`` to ``span(basis)``."""
    x = np.asarray(x, dtype=complex)
    basis = list(basis)
    if basis and np.asarray(basis[0]).shape != x.shape:
        raise DimensionError(
            f"shape {x.shape} does not match basis shape {np.asarray(basis[0]).shape}")
    return Span(basis).residual(x)
