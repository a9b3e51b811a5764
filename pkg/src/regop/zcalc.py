"""z-transform calculus for desk-scale operators.

A regular operator ``T`` is encoded by its z-transform
``z = T (I + T^*T)^{-1/2}``; the domain of ``T`` is recovered as
``(I - z^*z)^{1/2}`` applied to the ambient algebra and the action as ``z``
applied to the same element.  Semiregular operators are modelled by finite
samples of graph pairs ``(a, Sa)``; every "dense"/"closure" statement becomes
a distance to a linear span, computed by :class:`regop.spectral.Span`.

An algebra is modelled by a list of matrices spanning it (its "basis").
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spectral import (
    TOL, DimensionError, LinalgError, Span, apply_spectral_function, as_matrix,
    operator_norm,
)

log = logging.getLogger(__name__)

__all__ = [
    "Contraction", "DomainSample", "Decomposition", "NotInGraphError",
    "z_transform", "contraction_from_z", "operator_from_z", "decompose_domain",
    "decompose_adjoint_domain", "gamma_membership", "INCLUSION_LABELS",
    "inclusion_residuals", "multiplier_residual", "center_condition_residual",
    "full_matrix_basis", "diagonal_basis", "block_diagonal_basis",
    "random_algebra_element",
]


class NotInGraphError(LinalgError):
    def __init__(self, domain_residual, action_residual):
        self.domain_residual = domain_residual
        self.action_residual = action_residual
        super().__init__(
            "not a graph element of the operator determined by z "
            f"(residuals {domain_residual:.3e}, {action_residual:.3e})")


@dataclass(frozen=True)
class Contraction:
    """A z-transform with its two defect operators.

    ``defect_right = (I - z^*z)^{1/2}`` and ``defect_left = (I - zz^*)^{1/2}``.
    """
    z: np.ndarray
    defect_right: np.ndarray
    defect_left: np.ndarray

    @property
    def dim(self):
        return self.z.shape[0]

    @property
    def adjoint(self):
        """z-transform of the adjoint operator: ``z^*`` with defects swapped."""
        return Contraction(self.z.conj().T, self.defect_left, self.defect_right)

    def invariant_residuals(self):
        z, dr, dl = self.z, self.defect_right, self.defect_left
        eye = np.eye(self.dim)
        return {
            "norm": operator_norm(z),
            "right_defect": operator_norm(dr @ dr + z.conj().T @ z - eye),
            "left_defect": operator_norm(dl @ dl + z @ z.conj().T - eye),
            "intertwining": operator_norm(z @ dr - dl @ z),
        }


def _inv_sqrt_one_plus(x):
    return 1.0 / np.sqrt(1.0 + np.clip(x, 0.0, None))


def z_transform(t):
    """Contraction ``z = T (I + T^*T)^{-1/2}`` of a square matrix ``T``.

    The defects are computed from ``T`` directly,
    ``(I - z^*z)^{1/2} = (I + T^*T)^{-1/2}`` and likewise on the left, which is
    better conditioned than taking square roots of ``I - z^*z``.
    """
    t = as_matrix(t, "T")
    tt = t.conj().T @ t
    dr = apply_spectral_function(0.5 * (tt + tt.conj().T), _inv_sqrt_one_plus)
    ttl = t @ t.conj().T
    dl = apply_spectral_function(0.5 * (ttl + ttl.conj().T), _inv_sqrt_one_plus)
    return Contraction(t @ dr, dr, dl)


def contraction_from_z(z):
    """Wrap a strict contraction, computing its defects by functional calculus."""
    z = as_matrix(z, "z")
    nrm = operator_norm(z)
    if nrm >= 1.0:
        raise LinalgError(f"z must be a strict contraction, ||z|| = {nrm!r}")
    eye = np.eye(z.shape[0])

    def root(x):
        return np.sqrt(np.clip(x, 0.0, None))

    zz = z.conj().T @ z
    dr = apply_spectral_function(eye - 0.5 * (zz + zz.conj().T), root)
    zz = z @ z.conj().T
    dl = apply_spectral_function(eye - 0.5 * (zz + zz.conj().T), root)
    return Contraction(z, dr, dl)


def _check_dim(zc, *mats):
    for m in mats:
        if np.shape(m) != zc.z.shape:
            raise DimensionError(f"shape {np.shape(m)} does not match z {zc.z.shape}")


def operator_from_z(zc, a):
    """Graph element ``((I - z^*z)^{1/2} a, z a)`` generated by ``a``."""
    a = np.asarray(a, dtype=complex)
    _check_dim(zc, a)
    return zc.defect_right @ a, zc.z @ a


@dataclass(frozen=True)
class DomainSample:
    """Graph pairs ``(a, Sa)`` of ``S`` (tag ``"D"``) or ``S^*`` (``"D_star"``)."""
    pairs: tuple
    tag: str = "D"

    def __post_init__(self):
        if self.tag not in ("D", "D_star"):
            raise ValueError(f"tag must be 'D' or 'D_star', got {self.tag!r}")

    @classmethod
    def generate(cls, zc, generators, tag="D"):
        src = zc if tag == "D" else zc.adjoint
        return cls(tuple(operator_from_z(src, c) for c in generators), tag)

    def decompose(self, zc, tol=None):
        if self.tag == "D":
            return [decompose_domain(a, sa, zc, tol) for a, sa in self.pairs]
        return [decompose_adjoint_domain(a, sa, zc, tol) for a, sa in self.pairs]


class Decomposition(NamedTuple):
    c: np.ndarray
    domain_residual: float
    action_residual: float


def _decompose(a, sa, z, d, tol):
    a = np.asarray(a, dtype=complex)
    sa = np.asarray(sa, dtype=complex)
    c = d @ a + z.conj().T @ sa
    scale = max(1.0, np.linalg.norm(c))
    r1 = float(np.linalg.norm(a - d @ c)) / scale
    r2 = float(np.linalg.norm(sa - z @ c)) / scale
    tol = TOL.probe if tol is None else tol
    if r1 > tol or r2 > tol:
        raise NotInGraphError(r1, r2)
    return Decomposition(c, r1, r2)


def decompose_domain(a, sa, zc, tol=None):
    """Find ``c`` with ``a = (I - z^*z)^{1/2} c`` and ``Sa = z c``.

    ``c = (I - z^*z)^{1/2} a + z^* Sa``.  Residuals are Frobenius norms
    relative to ``max(1, ||c||)``; above ``tol`` (default 1e-8) the pair is
    rejected with :class:`NotInGraphError`.
    """
    _check_dim(zc, a, sa)
    return _decompose(a, sa, zc.z, zc.defect_right, tol)


def decompose_adjoint_domain(a, s_star_a, zc, tol=None):
    """Adjoint twin of :func:`decompose_domain`: ``a = (I - zz^*)^{1/2} c``,
    ``S^*a = z^* c``."""
    _check_dim(zc, a, s_star_a)
    return _decompose(a, s_star_a, zc.z.conj().T, zc.defect_left, tol)


def _as_span(basis):
    return basis if isinstance(basis, Span) else Span(basis)


def gamma_membership(c, zc, algebra_basis, tol=None):
    """Test ``c`` in ``Gamma(z)``: both ``(I - z^*z)^{1/2} c`` and ``z c`` lie in
    the algebra.

    Returns ``(member, (r_defect, r_action))``; the residuals are absolute
    distances and membership compares them to ``tol * max(1, ||c||)``.
    """
    c = np.asarray(c, dtype=complex)
    _check_dim(zc, c)
    span = _as_span(algebra_basis)
    r1 = span.residual(zc.defect_right @ c)
    r2 = span.residual(zc.z @ c)
    tol = TOL.probe if tol is None else tol
    bound = tol * max(1.0, float(np.linalg.norm(c)))
    return (r1 <= bound and r2 <= bound), (r1, r2)


INCLUSION_LABELS = (
    "i: zA in cl (I-zz*)^1/2 A",
    "ii: z*A in cl (I-z*z)^1/2 A",
    "iii: Az in cl A(I-z*z)^1/2",
    "iv: Az* in cl A(I-zz*)^1/2",
    "v: z*zA in cl (I-z*z)A",
    "vi: zz*A in cl (I-zz*)A",
    "vii: A in cl (I-z*z)A",
    "viii: A in cl (I-zz*)A",
)


def random_algebra_element(algebra_basis, rng):
    """Gaussian combination of the basis, scaled to unit Frobenius norm."""
    coef = rng.normal(size=len(algebra_basis)) + 1j * rng.normal(size=len(algebra_basis))
    x = np.tensordot(coef, np.asarray(algebra_basis, dtype=complex), axes=1)
    nrm = np.linalg.norm(x)
    return x / nrm if nrm > 0 else x


def inclusion_residuals(zc, algebra_basis, samples=8, seed=0):
    """Distances for the eight inclusions, in the order of ``INCLUSION_LABELS``.

    Each entry is the largest distance, over ``samples`` random unit
    algebra elements ``a``, from the left-hand image of ``a`` to the span of
    the right-hand images of the basis.
    """
    rng = np.random.default_rng(seed)
    basis = [np.asarray(b, dtype=complex) for b in algebra_basis]
    z, dr, dl = zc.z, zc.defect_right, zc.defect_left
    zs = z.conj().T
    eye = np.eye(zc.dim)
    pr, pl = eye - zs @ z, eye - z @ zs
    spans = [
        Span([dl @ b for b in basis]),
        Span([dr @ b for b in basis]),
        Span([b @ dr for b in basis]),
        Span([b @ dl for b in basis]),
        Span([pr @ b for b in basis]),
        Span([pl @ b for b in basis]),
    ]
    spans += [spans[4], spans[5]]
    lhs = [
        lambda a: z @ a, lambda a: zs @ a, lambda a: a @ z, lambda a: a @ zs,
        lambda a: zs @ z @ a, lambda a: z @ zs @ a, lambda a: a, lambda a: a,
    ]
    worst = [0.0] * 8
    for _ in range(samples):
        a = random_algebra_element(basis, rng)
        for i in range(8):
            worst[i] = max(worst[i], spans[i].residual(lhs[i](a)))
    return tuple(worst)


def multiplier_residual(x, algebra_basis, samples=8, seed=0):
    """How far ``x`` is from multiplying the algebra into itself on both sides.

    Largest, over sampled unit algebra elements ``a``, of the distance of
    ``x a`` and ``a x`` to the algebra, divided by ``max(1, ||x a||)``.
    """
    x = np.asarray(x, dtype=complex)
    basis = [np.asarray(b, dtype=complex) for b in algebra_basis]
    if basis and basis[0].shape != x.shape:
        raise DimensionError(f"shape {x.shape} does not match basis {basis[0].shape}")
    span = Span(basis)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a = random_algebra_element(basis, rng)
        xa, ax = x @ a, a @ x
        r = max(span.residual(xa), span.residual(ax))
        worst = max(worst, r / max(1.0, float(np.linalg.norm(xa))))
    return worst


def _intersection(span_a, span_b, tol=1e-10):
    """Orthonormal vectors spanning ``span_a`` intersected with ``span_b``."""
    if span_a.rank == 0 or span_b.rank == 0:
        return np.zeros((0, 0))
    # principal vectors with cosine 1
    u, s, _ = np.linalg.svd(span_a.q.conj().T @ span_b.q)
    keep = s > 1.0 - tol
    return span_a.q @ u[:, keep]


def center_condition_residual(quotient_image_basis, center_basis, domain_image_basis,
                              tol=1e-10):
    """Check that (centre of the quotient meet the image of the domain) times
    the quotient spans the whole quotient.

    Returns the largest distance of a quotient basis element to the span of
    the products ``c a``.  Returns ``math.inf`` when the centre meets the
    domain image only in 0.
    """
    quotient = [np.asarray(b, dtype=complex) for b in quotient_image_basis]
    shape = quotient[0].shape
    for group in (center_basis, domain_image_basis):
        for b in group:
            if np.shape(b) != shape:
                raise DimensionError(f"shape {np.shape(b)} does not match quotient {shape}")
    meet = _intersection(Span(center_basis), Span(domain_image_basis), tol)
    if meet.shape[1] == 0:
        log.warning("centre and domain image intersect trivially; condition cannot hold")
        return math.inf
    cs = [meet[:, i].reshape(shape) for i in range(meet.shape[1])]
    span = Span([c @ a for c in cs for a in quotient])
    return max(span.residual(b) for b in quotient)


def full_matrix_basis(n):
    """Matrix units ``E_ij``: the full algebra ``M_n``."""
    out = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            out.append(e)
    return out


def diagonal_basis(n):
    return [u for k, u in enumerate(full_matrix_basis(n)) if k // n == k % n]


def block_diagonal_basis(sizes):
    """Matrix units inside diagonal blocks of the given sizes."""
    n = sum(sizes)
    out, start = [], 0
    for size in sizes:
        for i in range(start, start + size):
            for j in range(start, start + size):
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1.0
                out.append(e)
        start += size
    return out
