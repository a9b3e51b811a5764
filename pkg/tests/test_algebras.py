import numpy as np
import pytest
from hypothesis import given, strategies as st

from regop import algebras as alg
from regop.algebras import (
    CROSSED_PRODUCT as CP, QUANTUM_PLANE as QP, AlgebraError, CirclePolynomial,
    CoeffFunction, CrossedElement, approximate_identity, constant, delta, in_ideal, multiply,
    quotient_crossed, quotient_plane, random_element, represent, star,
)
from regop.zcalc import z_transform

J = 8
seeds = st.integers(0, 2 ** 32 - 1)
flavors = st.sampled_from([QP, CP])


def rand(seed, flavor, tails=True, integer=True, support=4):
    r = np.random.default_rng(seed)
    return random_element(r, J, flavor, kmax=2, support=support, tails=tails, integer=integer)


def test_coeff_function_evaluation():
    f = CoeffFunction([1, 2, 3, 4, 5], tail=7)
    assert f.J == 2 and f.at(0) == 3 and f.at(3) == 7 and f.at(-3) == 0
    assert f.shifted(1).at(0) == 4 and f.shifted(1).at(2) == 7
    assert f.shifted(-1).at(-2) == 0 and f.shifted(-1).at(0) == 2
    assert f.padded(4) == f and f.padded(4).trimmed() == f


def test_quantum_plane_rule():
    with pytest.raises(AlgebraError):
        CrossedElement({1: CoeffFunction([0, 1, 0], tail=1)}, QP)


def test_diagonal_products_are_pointwise():
    f = CoeffFunction([1, 2, 3], tail=3)
    g = CoeffFunction([4, 5, 6], tail=6)
    p = CrossedElement({0: f}, CP) * CrossedElement({0: g}, CP)
    assert p.coeff(0) == CoeffFunction([4, 10, 18], tail=18)


def test_shift_rule_separates_supports():
    p = delta(0, J, k=1) * delta(0, J, k=-1)
    assert p.coeff(0).is_zero() and not p.terms


def test_shift_rule_hand_example():
    # shift_{-1} delta_{-1} = delta_0, so the product is delta_0 at k = 0
    p = delta(-1, J, k=1) * delta(0, J, k=-1)
    assert p == delta(0, J, k=0)
    # matrix picture: e_0 -> e_{-1} -> e_0
    m = np.asarray(represent(delta(-1, J, k=1), 3)) @ np.asarray(represent(delta(0, J, k=-1), 3))
    assert np.array_equal(m, np.asarray(represent(delta(0, J), 3)))


def test_star_examples():
    f = CoeffFunction(np.arange(-J, J + 1, dtype=float), tail=J + 1.0)
    x = CrossedElement({0: f}, CP)
    assert star(x) == x
    g = CoeffFunction(np.arange(2 * J + 1) * (1 + 1j), tail=0)
    s = star(CrossedElement({1: g}, CP))
    assert list(s.terms) == [-1]
    for j in range(-J, J + 1):
        assert s.coeff(-1).at(j) == np.conj(g.at(j - 1))


@given(seeds, flavors)
def test_star_is_involution(seed, flavor):
    x = rand(seed, flavor, integer=False)
    assert star(star(x)) == x


def _triples(flavor, count, seed):
    r = np.random.default_rng(seed)
    for _ in range(count):
        yield [random_element(r, J, flavor, 2, 4, tails=True, integer=True) for _ in range(3)]


@pytest.mark.parametrize("flavor", [QP, CP])
def test_star_algebra_axioms_500_triples(flavor):
    for x, y, z in _triples(flavor, 500, 99):
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert (x + y) * z == x * z + y * z
        assert star(x * y) == star(y) * star(x)
        assert star(star(x)) == x


def test_represent_examples():
    q = 0.5
    f = CoeffFunction.from_callable(lambda p: p, q, J)
    m = np.asarray(represent(CrossedElement({0: f}, CP), 4))
    assert np.allclose(np.diag(m), q ** np.arange(-4, 5)) and np.count_nonzero(m - np.diag(np.diag(m))) == 0
    s = np.asarray(represent(constant(1.0, J, k=1), 4))
    assert np.array_equal(s, np.eye(9, k=-1))
    with pytest.raises(AlgebraError):
        represent(constant(1.0, J), J + 1)


@given(seeds, flavors)
def test_represent_is_homomorphism_on_interior(seed, flavor):
    r = np.random.default_rng(seed)
    x, y = (random_element(r, J, flavor, 2, J, tails=True) for _ in range(2))
    N = 6
    kmax = 2
    prod = np.asarray(represent(x * y, N))
    mats = np.asarray(represent(x, N)) @ np.asarray(represent(y, N))
    inner = slice(2 * kmax, 2 * N + 1 - 2 * kmax)
    assert np.max(np.abs(prod - mats)[inner, inner], initial=0) <= 1e-12


def test_quotient_plane_examples():
    assert quotient_plane(delta(0, J, flavor=QP)) == 0
    f = CoeffFunction(np.zeros(2 * J + 1), tail=3 + 4j)
    assert quotient_plane(CrossedElement({0: f}, QP)) == 3 + 4j
    with pytest.raises(AlgebraError):
        quotient_plane(delta(0, J))


def test_quotient_crossed_examples():
    assert quotient_crossed(delta(2, J, k=1)).is_zero()
    assert quotient_crossed(alg.monomial(1, J)).as_dict() == {1: 1.0}
    with pytest.raises(AlgebraError):
        quotient_crossed(delta(0, J, flavor=QP))


@given(seeds)
def test_plane_quotient_is_star_homomorphism(seed):
    r = np.random.default_rng(seed)
    x, y = (random_element(r, J, QP, 2, 4) for _ in range(2))
    assert quotient_plane(x * y) == quotient_plane(x) * quotient_plane(y)
    assert quotient_plane(star(x)) == quotient_plane(x).conjugate()


def _convolve(p, r):
    out = {}
    for a, u in p.as_dict().items():
        for b, v in r.as_dict().items():
            out[a + b] = out.get(a + b, 0) + u * v
    return out


@given(seeds)
def test_crossed_quotient_is_convolution(seed):
    x, y = rand(seed, CP), rand(seed + 1, CP)
    got = quotient_crossed(x * y).as_dict()
    want = {k: v for k, v in _convolve(quotient_crossed(x), quotient_crossed(y)).items() if v}
    assert got == want
    assert quotient_crossed(star(x)) == quotient_crossed(x).star()


@given(seeds)
def test_circle_polynomials_commute(seed):
    p, r = quotient_crossed(rand(seed, CP)), quotient_crossed(rand(seed + 7, CP))
    assert (p * r - r * p).is_zero()


def test_circle_polynomial_evaluation():
    p = CirclePolynomial({-1: 2.0, 2: 1j})
    z = np.exp(0.3j)
    assert p(z) == pytest.approx(2 / z + 1j * z ** 2)
    assert np.allclose(np.diag(alg.circle_matrix(p, 2)), p(alg.circle_points(2)))


@given(seeds, flavors)
def test_ideal_property_and_kernel(seed, flavor):
    x, k = rand(seed, flavor), rand(seed + 3, flavor, tails=False)
    assert in_ideal(k) and in_ideal(x * k) and in_ideal(k * x)
    phi = quotient_plane(x) == 0 if flavor == QP else quotient_crossed(x).is_zero()
    assert phi == in_ideal(x)


def test_in_ideal_examples():
    assert in_ideal(delta(3, J) + delta(-2, J, k=1))
    assert not in_ideal(constant(1.0, J))


def test_approximate_identity():
    e = approximate_identity(5, J)
    assert in_ideal(e) and e * e == e
    x = rand(1, CP, tails=False, support=2)
    assert x * e == x
    with pytest.raises(AlgebraError):
        approximate_identity(J + 1, J)


def test_approximate_identity_norm_table():
    x = random_element(np.random.default_rng(4), J, CP, kmax=1, support=J, tails=False)
    norms = [np.linalg.norm(np.asarray(represent(x * approximate_identity(m, J) - x, J)), 2)
             for m in range(0, J + 1)]
    assert all(b <= a + 1e-15 for a, b in zip(norms, norms[1:]))
    assert norms[-1] == 0.0 and norms[0] > 0.1


def test_demo_operator_examples():
    S = alg.MultiplicationOperator(0.5, power=-1)
    assert S(delta(0, J, flavor=QP)) == delta(0, J, flavor=QP)
    assert S(delta(2, J, flavor=QP)) == 4 * delta(2, J, flavor=QP)
    T = np.asarray(S.matrix(8))
    j = np.arange(-8, 9)
    w = 0.5 ** (-j)
    assert np.allclose(z_transform(T).z, np.diag(w / np.sqrt(1 + w * w)), atol=1e-14)


def test_demo_operator_domains():
    up, down = alg.MultiplicationOperator(0.5, 1), alg.MultiplicationOperator(0.5, -1)
    x = constant(1.0, J, flavor=QP)
    assert up.in_domain(x) and not down.in_domain(x)
    with pytest.raises(AlgebraError):
        down(x)
    assert in_ideal(up(x))
    _, pairs = alg.demo_semiregular(J, power=-1, samples=3)
    assert all(in_ideal(a) and sa == down(a) for a, sa in pairs)


@given(seeds, flavors, st.booleans())
def test_text_roundtrip(seed, flavor, integer):
    x = rand(seed, flavor, integer=integer)
    assert alg.loads(alg.dumps(x)) == x


def test_loads_rejects_garbage():
    with pytest.raises(AlgebraError):
        alg.loads("flavor crossed_product\nJ 2\n0 zero 1 2\n")
    with pytest.raises(AlgebraError):
        alg.loads("0 0 1 0\n")
