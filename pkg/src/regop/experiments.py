"""Reproducible scenario runners producing :class:`ResidualReport` objects.

Every runner takes an explicit seed and records it, so the same call returns a
report that serializes to identical text.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import algebras as alg
from . import hilsum
from .spectral import TOL, Span, operator_norm
from .zcalc import (
    NotInGraphError, block_diagonal_basis, center_condition_residual,
    decompose_adjoint_domain, decompose_domain,
    full_matrix_basis, gamma_membership, inclusion_residuals,
    multiplier_residual, operator_from_z, random_algebra_element, z_transform,
)

__all__ = [
    "Check", "ResidualReport", "run_restriction_experiment",
    "run_uniqueness_experiment", "run_theorem_pipeline", "run_ztf_suite",
    "anti_resonant_grid", "resonant_grid", "gamma_case", "MODELS",
]

MODELS = ("quantum_plane", "crossed_product", "hilsum")
# strict bound for "||z|| < 1" under the residual <= tolerance convention
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    claim: str = ""

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def to_dict(self):
        return {"name": self.name, "residual": _num(self.residual),
                "tolerance": _num(self.tolerance), "pass": self.passed,
                "claim": self.claim}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


def _unnum(x):
    return float(x) if isinstance(x, str) else x


@dataclass
class ResidualReport:
    """Named outcome of one experiment.

    Text form is JSON with keys ``experiment_name``, ``parameters``,
    ``checks`` (list of ``name``/``residual``/``tolerance``/``pass``/``claim``),
    ``verdict`` and ``passed``; non-finite residuals are written as strings.
    """
    experiment_name: str
    parameters: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    verdict: str = ""

    def add(self, name, residual, tolerance, claim=""):
        self.checks.append(Check(name, float(residual), float(tolerance), claim))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "experiment_name": self.experiment_name,
            "parameters": {k: _jsonable(v) for k, v in sorted(self.parameters.items())},
            "checks": [c.to_dict() for c in self.checks],
            "verdict": self.verdict,
            "passed": self.passed,
        }

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d):
        rep = cls(d["experiment_name"], dict(d.get("parameters", {})), [],
                  d.get("verdict", ""))
        for c in d.get("checks", []):
            rep.add(c["name"], _unnum(c["residual"]), _unnum(c["tolerance"]),
                    c.get("claim", ""))
        return rep

    @classmethod
    def from_text(cls, text):
        return cls.from_dict(json.loads(text))

    def summary_lines(self):
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            yield f"[{flag}] {self.experiment_name}/{c.name}: {c.residual:.3e} <= {c.tolerance:.1e}"


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return v


class _ZeroOperator:
    """The zero operator on the symbolic algebra, defined everywhere."""

    def in_domain(self, x):
        return True

    def __call__(self, x):
        return alg.CrossedElement.zero(x.flavor, x.J)

    def matrix(self, N):
        return np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)


def _operator(source, q):
    if source == "demo":
        return alg.MultiplicationOperator(q, power=1)
    if source == "zero":
        return _ZeroOperator()
    raise ValueError(f"unknown operator source {source!r}; expected 'demo' or 'zero'")


def _rep(x, N):
    return np.asarray(alg.represent(x, N))


def _unit(rng, shape):
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v)


def run_restriction_experiment(model="quantum_plane", operator="demo", seed=0, q=0.5,
                               J=32, N=16, samples=6, corrupt=0.0, tol=None):
    """Restriction of a semiregular operator to the compact ideal.

    Checks, in order: the domain meets the ideal in a right ideal; the
    operator maps that intersection into the ideal; graph pairs along the
    approximate identity converge inside the graph; ``D(S)K`` reaches every
    sampled element of ``D(S) n K``; the restricted operator and restricted
    adjoint pair up, ``<S^*b, a> = <b, Sa>``.  ``corrupt`` perturbs every
    image ``Sa`` fed to the last check by a random matrix of that norm.
    """
    tol = TOL.probe if tol is None else tol
    flavor = {"quantum_plane": alg.QUANTUM_PLANE,
              "crossed_product": alg.CROSSED_PRODUCT}.get(model)
    if flavor is None:
        raise ValueError(f"restriction experiment needs an algebra model, got {model!r}")
    if N > J:
        raise ValueError("N must not exceed J")
    rng = np.random.default_rng(seed)
    S = _operator(operator, q)
    support = max(1, min(J // 2, N - 4))
    kmax = 2
    domain = [alg.random_element(rng, J, flavor, kmax, support, tails=True)
              for _ in range(samples)]
    domain = [a for a in domain if S.in_domain(a)]
    dk = [alg.random_element(rng, J, flavor, kmax, support, tails=False)
          for _ in range(samples)]
    ideal = [alg.random_element(rng, J, flavor, kmax, support, tails=False)
             for _ in range(samples)]
    T = np.asarray(S.matrix(N))
    zc = z_transform(T)
    rep = ResidualReport("restriction", {
        "model": model, "operator": operator, "seed": seed, "q": q, "J": J, "N": N,
        "samples": samples, "corrupt": corrupt})

    bad = sum(not (alg.in_ideal(a * k) and S.in_domain(a * k)) for a in dk for k in ideal)
    rep.add("domain_right_ideal", bad, 0,
            "D(S) n K is a right ideal of K: a k in D(S) n K for a in D(S) n K, k in K")
    bad = sum(not alg.in_ideal(S(a)) for a in dk)
    rep.add("image_in_ideal", bad, 0, "S maps D(S) n K into K")

    ladder = list(range(support + kmax, J + 1, 4))
    worst = 0.0
    for a in domain:
        A, SA = _rep(a, N), _rep(S(a), N)
        last = alg.approximate_identity(ladder[-1], J, flavor)
        am = a * last
        gap = (np.linalg.norm(_rep(am, N) - A) + np.linalg.norm(_rep(S(am), N) - SA))
        try:
            d = decompose_domain(A, SA, zc, tol=math.inf)
            worst = max(worst, d.domain_residual, d.action_residual, gap)
        except NotInGraphError:
            worst = math.inf
    rep.add("graph_closed", worst, tol,
            "limits of graph pairs (a e_m, S(a e_m)) lie in the graph of S")

    worst = 0.0
    for a in dk:
        span = Span([_rep(a * alg.approximate_identity(m, J, flavor), N) for m in ladder])
        worst = max(worst, span.residual(_rep(a, N)))
    rep.add("core_reaches_domain", worst, tol, "D(S)K is a core for the restriction S|K")

    worst = 0.0
    for a in dk:
        A = _rep(a, N)
        SA = _rep(S(a), N)
        if corrupt:
            SA = SA + corrupt * _unit(rng, SA.shape)
        for b in dk:
            B = _rep(b, N)
            SB = T.conj().T @ B
            lhs = SB.conj().T @ A
            rhs = B.conj().T @ SA
            scale = max(1.0, np.linalg.norm(B) * np.linalg.norm(SA))
            worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    rep.add("adjoint_restriction", worst, tol,
            "(S|K)^* = S^*|K: <S^* b, a> = <b, S a> on D(S) n K")
    rep.verdict = "restriction consistent" if rep.passed else "restriction check failed"
    return rep


def _intersection_agreement(dom1, img1, dom2, img2):
    """Largest disagreement of two linear operators on the intersection of
    their domains, each given by spanning graph pairs."""
    a1 = np.stack([d.ravel() for d in dom1], axis=1)
    a2 = np.stack([d.ravel() for d in dom2], axis=1)
    b1 = np.stack([d.ravel() for d in img1], axis=1)
    b2 = np.stack([d.ravel() for d in img2], axis=1)
    stacked = np.hstack([a1, -a2])
    _, s, vh = np.linalg.svd(stacked)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    null = vh[rank:].conj().T
    if null.shape[1] == 0:
        return 0.0, 0
    alpha, beta = null[:a1.shape[1]], null[a1.shape[1]:]
    diff = b1 @ alpha - b2 @ beta
    scale = max(1.0, float(np.linalg.norm(b1 @ alpha)))
    return float(np.linalg.norm(diff)) / scale, null.shape[1]


def run_uniqueness_experiment(z_source="random", seed=0, dim=8, blocks=(3, 5), samples=6,
                              corrupt=0.0, tol=None):
    """Two extensions built from the same data on the ideal agree where both
    are defined, share their adjoint, and have domains inside ``Gamma(z)``.

    The algebra is block-diagonal (``blocks``) and ``z`` comes from a random
    block-diagonal ``T`` (``z_source="random"``) or ``T = 0``.
    """
    tol = TOL.probe if tol is None else tol
    if sum(blocks) != dim:
        raise ValueError("block sizes must add up to dim")
    rng = np.random.default_rng(seed)
    basis = block_diagonal_basis(blocks)
    if z_source == "random":
        T = random_algebra_element(basis, rng) * dim
    elif z_source == "zero":
        T = np.zeros((dim, dim), dtype=complex)
    else:
        raise ValueError(f"unknown z source {z_source!r}")
    zc = z_transform(T)
    common = [random_algebra_element(basis, rng) for _ in range(samples)]
    extra1 = [random_algebra_element(basis, rng) for _ in range(samples)]
    extra2 = [random_algebra_element(basis, rng) for _ in range(samples)]
    ext1 = [operator_from_z(zc, c) for c in common + extra1]
    ext2 = [operator_from_z(zc, c) for c in common + extra2]
    if corrupt:
        ext2 = [(a, sa + corrupt * _unit(rng, sa.shape)) for a, sa in ext2]
    rep = ResidualReport("uniqueness", {
        "z_source": z_source, "seed": seed, "dim": dim, "blocks": list(blocks),
        "samples": samples, "corrupt": corrupt})

    agree, meet_dim = _intersection_agreement(
        [a for a, _ in ext1], [s for _, s in ext1], [a for a, _ in ext2], [s for _, s in ext2])
    rep.parameters["intersection_dim"] = meet_dim
    rep.add("agree_on_intersection", agree, min(tol, 1e-9),
            "S = T on D(S) n D(T) when S|K = T|K")

    adj = [operator_from_z(zc.adjoint, d) for d in
           (random_algebra_element(basis, rng) for _ in range(samples))]
    worst = 0.0
    for ext in (ext1, ext2):
        for a, sa in ext:
            for b, sb in adj:
                lhs = sb.conj().T @ a
                rhs = b.conj().T @ sa
                scale = max(1.0, np.linalg.norm(b) * np.linalg.norm(sa))
                worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    rep.add("adjoints_equal", worst, tol, "S^* = T^*: both pair with the same adjoint graph")

    span = Span(basis)
    bad = 0
    for a, sa in ext1 + ext2:
        try:
            c = decompose_domain(a, sa, zc, tol).c
        except NotInGraphError:
            bad += 1
            continue
        ok, _ = gamma_membership(c, zc, span, tol)
        bad += not ok
    rep.add("domain_in_gamma", bad, 0,
            "every graph pair gives c in Gamma(z), so both sit inside the maximal extension")

    bad = 0
    for b, sb in adj:
        try:
            decompose_adjoint_domain(b, sb, zc, tol)
        except NotInGraphError:
            bad += 1
    rep.add("adjoint_domain_decomposes", bad, 0,
            "a = (I - zz^*)^{1/2} c and S^*a = z^* c for adjoint graph pairs")
    rep.verdict = "unique maximal extension" if rep.passed else "extensions disagree"
    return rep


def _count_quotient_failures(flavor, rng, J, pairs):
    hom = star = kernel = 0
    for _ in range(pairs):
        x = alg.random_element(rng, J, flavor, 2, J // 2, tails=True)
        y = alg.random_element(rng, J, flavor, 2, J // 2, tails=bool(rng.integers(0, 2)))
        if flavor == alg.QUANTUM_PLANE:
            phi = alg.quotient_plane
            hom += phi(x * y) != phi(x) * phi(y)
            star += phi(alg.star(x)) != phi(x).conjugate()
        else:
            phi = alg.quotient_crossed
            hom += phi(x * y) != phi(x) * phi(y)
            star += phi(alg.star(x)) != phi(x).star()
        for e in (x, y):
            image = phi(e)
            zero = image == 0 if flavor == alg.QUANTUM_PLANE else image.is_zero()
            kernel += zero != alg.in_ideal(e)
    return hom, star, kernel


def anti_resonant_grid(count=5):
    """Points ``t = 1/(2 pi k + pi)``, ``k = 1, 2, 4, ...``: ``beta(t) = -1``."""
    return [1.0 / (2 * math.pi * 2 ** i + math.pi) for i in range(count)]


def resonant_grid(count=3):
    """Points ``t = 1/(2 pi k)``: ``beta(t) = 1``."""
    return [1.0 / (2 * math.pi * k) for k in range(1, count + 1)]


def _algebra_pipeline(flavor, q, J, N, seed, samples, pairs, tol, rep):
    rng = np.random.default_rng(seed)
    S, graph = alg.demo_semiregular(J, q, power=1, flavor=flavor, samples=samples,
                                    seed=seed, support=max(1, min(J // 2, N - 4)))
    hom, star, kernel = _count_quotient_failures(flavor, rng, J, pairs)
    rep.add("quotient_multiplicative", hom, 0, "phi(xy) = phi(x) phi(y), exactly")
    rep.add("quotient_star", star, 0, "phi(x^*) = phi(x)^*, exactly")
    rep.add("kernel_is_ideal", kernel, 0, "ker phi = compact ideal (all f_k(0) = 0)")

    if flavor == alg.QUANTUM_PLANE:
        quotient = [np.eye(1, dtype=complex)]
        center = quotient
        images = [np.array([[alg.quotient_plane(a)]]) for a, _ in graph]
        rep.add("quotient_dimension", abs(Span(images).rank - 1), 0,
                "A/K is one-dimensional: the domain images span C")
    else:
        K = max(a.kmax for a, _ in graph)
        polys = [alg.quotient_crossed(a) for a, _ in graph]
        comm = sum(not (p * r - r * p).is_zero() for p in polys for r in polys)
        rep.add("quotient_commutative", comm, 0, "A/K = C(S^1) is abelian: commutators vanish")
        quotient = [alg.circle_matrix(alg.CirclePolynomial({k: 1.0}), K)
                    for k in range(-K, K + 1)]
        center = quotient
        images = [alg.circle_matrix(p, K) for p in polys]
    rep.add("center_condition", center_condition_residual(quotient, center, images), tol,
            "(Z(A/K) n pi(D(S))) A/K is total in A/K")

    T = np.asarray(S.matrix(N))
    zc = z_transform(T)
    worst = 0.0
    for a, sa in graph:
        d = decompose_domain(_rep(a, N), _rep(sa, N), zc, tol=math.inf)
        worst = max(worst, d.domain_residual, d.action_residual)
    rep.add("graph_decomposes", worst, tol, "a = (I - z^*z)^{1/2} c, S a = z c")
    basis = alg.matrix_unit_basis(N)
    zz = zc.z.conj().T @ zc.z
    rep.add("zstar_z_multiplier", multiplier_residual(zz, basis, samples=4, seed=seed), tol,
            "z^*z multiplies the algebra into itself")
    rep.add("contraction", operator_norm(zc.z), _BELOW_ONE, "||z|| < 1")


def run_theorem_pipeline(model, q=0.5, J=32, N=16, M=64, t_grid=None, seed=0, tol=None,
                         samples=6, pairs=100):
    """Regularity verdict for one of the model algebras.

    ``quantum_plane`` and ``crossed_product`` go through the quotient maps and
    the centre condition; ``hilsum`` through the fiber z-transforms, where
    ``t_grid`` (default: anti-resonant points shrinking to 0) carries the
    nonregularity witness.
    """
    tol = TOL.probe if tol is None else tol
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    rep = ResidualReport(f"theorem_pipeline:{model}", {"model": model, "seed": seed,
                                                       "tol": tol})
    if model in ("quantum_plane", "crossed_product"):
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if N > J:
            raise ValueError("N must not exceed J")
        rep.parameters.update(q=q, J=J, N=N, samples=samples, pairs=pairs)
        _algebra_pipeline(model, q, J, N, seed, samples, pairs, tol, rep)
        reason = "unital quotient" if model == "quantum_plane" else "abelian quotient"
        rep.verdict = f"regular (Corollary: {reason})" if rep.passed else "inconclusive"
        return rep

    grid = anti_resonant_grid() if t_grid is None else [float(t) for t in t_grid]
    rep.parameters.update(M=M, t_grid=grid)
    rows = hilsum.discontinuity_scan(grid, M)
    rep.add("nonregular_witness", 0.5 - min(r.norm_distance for r in rows), 0.0,
            "inf over t -> 0 of ||z(t) - z(0)|| >= 0.5: z is not norm continuous at 0")
    control = hilsum.discontinuity_scan(resonant_grid(), M)
    rep.add("resonant_control", max(r.norm_distance for r in control), 0.05,
            "beta(t) = 1 gives back the periodic fiber: z(t) = z(0)")
    rows_all = rows + control
    rep.add("fiber_hermitian", max(r.hermitian_residual for r in rows_all), 1e-9,
            "each fiber z-transform is self-adjoint")
    rep.add("fiber_contraction", max(r.z_norm for r in rows_all), _BELOW_ONE, "||z(t)|| < 1")
    coarse = np.linspace(0.1, 1.0, 46)
    fine = np.linspace(0.1, 1.0, 91)
    jc, sc = hilsum.continuity_profile(coarse, M)
    jf, sf = hilsum.continuity_profile(fine, M)
    rep.parameters.update(lipschitz_coarse=float(sc.max()), lipschitz_fine=float(sf.max()))
    rep.add("restriction_lipschitz", sf.max() / sc.max(), 1.5,
            "t -> z(t) is Lipschitz on [0.1, 1]: slope bound stable under refinement")
    rep.add("restriction_jumps_shrink", jf.max() / jc.max(), 0.6,
            "halving the grid step roughly halves the largest jump on [0.1, 1]")
    witness = rep.check("nonregular_witness").passed and rep.check("resonant_control").passed
    restricted = (rep.check("restriction_lipschitz").passed
                  and rep.check("restriction_jumps_shrink").passed)
    parts = ["nonregular witness confirmed" if witness else "nonregular witness not confirmed",
             "restriction regular" if restricted else "restriction continuity not confirmed"]
    rep.verdict = "; ".join(parts)
    return rep


def run_ztf_suite(seed=0, trials=200, max_dim=16, tol=None):
    """Randomized z-transform calculus checks: roundtrip through the graph,
    defect identities, strict contraction, eight inclusions for the full
    matrix algebra, and ``Gamma(z)`` classification on a block algebra."""
    tol = TOL.probe if tol is None else tol
    rng = np.random.default_rng(seed)
    rep = ResidualReport("ztf_suite", {"seed": seed, "trials": trials, "max_dim": max_dim,
                                       "tol": tol})
    roundtrip = inter = norm_max = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, max_dim + 1))
        T = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        zc = z_transform(T)
        res = zc.invariant_residuals()
        inter = max(inter, res["intertwining"])
        norm_max = max(norm_max, res["norm"])
        c = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a, sa = operator_from_z(zc, c)
        try:
            d = decompose_domain(a, sa, zc, tol)
            roundtrip = max(roundtrip, d.domain_residual, d.action_residual)
        except NotInGraphError as exc:
            roundtrip = max(roundtrip, exc.domain_residual, exc.action_residual)
    rep.add("roundtrip", roundtrip, tol, "a = (I - z^*z)^{1/2} c and Sa = z c recover the pair")
    rep.add("intertwining", inter, 1e-9, "z (I - z^*z)^{1/2} = (I - zz^*)^{1/2} z")
    rep.add("contraction", norm_max, _BELOW_ONE, "||z|| < 1")

    worst = 0.0
    basis8 = full_matrix_basis(8)
    for _ in range(5):
        T = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        worst = max(worst, max(inclusion_residuals(z_transform(T), basis8, 4,
                                                   int(rng.integers(2 ** 31)))))
    rep.add("eight_inclusions_full_algebra", worst, tol,
            "all eight inclusions hold exactly for M_n")

    bad = _gamma_misclassified(rng, 20, tol)
    rep.add("gamma_classification", bad, 0, "D = Gamma(z): members accepted, non-members rejected")
    rep.verdict = "z-transform calculus consistent" if rep.passed else "failures"
    return rep


def gamma_case(rng, blocks=(3, 5)):
    """One member and one non-member of ``Gamma(z)`` for a block algebra.

    The member comes from a graph pair of the operator; the non-member is a
    unit matrix orthogonal to the algebra and to its images under the
    defect and ``z`` (both preserve the off-block part).
    """
    dim = sum(blocks)
    basis = block_diagonal_basis(blocks)
    T = random_algebra_element(basis, rng) * dim
    zc = z_transform(T)
    a, sa = operator_from_z(zc, random_algebra_element(basis, rng))
    member = decompose_domain(a, sa, zc).c
    span = Span(basis + [zc.defect_right @ b for b in basis] + [zc.z @ b for b in basis])
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    x = x - span.project(x)
    outsider = x / np.linalg.norm(x)
    return zc, basis, member, outsider


def _gamma_misclassified(rng, cases, tol):
    bad = 0
    for _ in range(cases):
        zc, basis, member, outsider = gamma_case(rng)
        span = Span(basis)
        bad += not gamma_membership(member, zc, span, tol)[0]
        bad += gamma_membership(outsider, zc, span, tol)[0]
    return bad

