"""Symbolic models of the quantum complex plane and the crossed product.

Elements are finite sums ``sum_k (l*)^k f_k(q^N)`` acting on ``L2(Z)``, where
``l* e_j = e_{j+1}`` and ``q^N e_j = q^j e_j``.  A coefficient function lives
on ``q^Z u {0}``; it is stored by its values at ``q^j`` for ``|j| <= J`` and
its value at 0 (``tail``).  Outside the window it is 0 for ``j < -J`` (the
points ``q^j`` run off to infinity) and equal to the tail for ``j > J``.

The two flavors differ only in which tails may be nonzero:

* ``quantum_plane``: only ``f_0`` may have a nonzero tail; the quotient by
  the compacts is ``C`` via ``x -> f_0(0)``.
* ``crossed_product``: any ``f_k`` may; the quotient is ``C(S^1)`` via
  ``x -> sum_k f_k(0) zeta^k``.

Elements with all tails zero form the ideal of compact operators.

Products and adjoints use ``f(q^N) (l*)^n = (l*)^n f(q^{N+n})``.  A shift by
``n`` moves where the function stops being eventually constant, so results
are computed on a window widened by the shift and trimmed back; the model is
closed under the algebra operations and they are exact up to floating-point
rounding in the value arithmetic.  Tails are summed with :func:`math.fsum`,
which makes the quotient maps bit-exact homomorphisms.
"""
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .spectral import OperatorMatrix

__all__ = [
    "QUANTUM_PLANE", "CROSSED_PRODUCT", "FLAVORS", "AlgebraError",
    "CoeffFunction", "CrossedElement", "CirclePolynomial", "multiply", "star",
    "represent", "quotient_plane", "quotient_crossed", "in_ideal",
    "approximate_identity", "delta", "constant", "monomial", "random_element",
    "MultiplicationOperator", "demo_semiregular", "dumps", "loads",
    "circle_points", "circle_matrix", "matrix_unit_basis",
]

QUANTUM_PLANE = "quantum_plane"
CROSSED_PRODUCT = "crossed_product"
FLAVORS = (QUANTUM_PLANE, CROSSED_PRODUCT)


class AlgebraError(ValueError):
    pass


def _csum(values):
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


class CoeffFunction:
    """A function on ``q^Z u {0}``, stored on the window ``-J..J``."""

    __slots__ = ("values", "tail")

    def __init__(self, values, tail=0.0):
        values = np.array(values, dtype=complex)
        if values.ndim != 1 or values.size % 2 != 1:
            raise AlgebraError("values must have odd length 2J+1")
        values.setflags(write=False)
        self.values = values
        self.tail = complex(tail)

    @property
    def J(self):
        return self.values.size // 2

    @classmethod
    def zeros(cls, J):
        return cls(np.zeros(2 * J + 1), 0.0)

    @classmethod
    def from_callable(cls, fn, q, J, tail=None):
        """Sample ``fn`` at the points ``q^j``; ``tail`` defaults to ``fn(0)``."""
        pts = q ** np.arange(-J, J + 1, dtype=float)
        return cls([fn(p) for p in pts], fn(0.0) if tail is None else tail)

    def at(self, j):
        """Value at the point ``q^j``."""
        J = self.J
        if j > J:
            return self.tail
        if j < -J:
            return 0.0j
        return complex(self.values[j + J])

    def padded(self, J):
        """Same function on a window of half-width ``J >= self.J``."""
        extra = J - self.J
        if extra < 0:
            raise AlgebraError(f"cannot pad window {self.J} down to {J}")
        if extra == 0:
            return self
        v = np.concatenate([np.zeros(extra), self.values, np.full(extra, self.tail)])
        return CoeffFunction(v, self.tail)

    def window(self, J):
        """Values at ``q^j`` for ``|j| <= J`` (pads if needed, never truncates)."""
        return self.padded(max(J, self.J)).values[max(J, self.J) - J:max(J, self.J) + J + 1]

    def shifted(self, n):
        """The function ``q^j -> f(q^{j+n})``, with the value at 0 unchanged."""
        if n == 0:
            return self
        J = self.J + abs(n)
        v = self.padded(J).values
        if n > 0:
            out = np.concatenate([v[n:], np.full(n, self.tail)])
        else:
            out = np.concatenate([np.zeros(-n), v[:n]])
        return CoeffFunction(out, self.tail)

    def trimmed(self, J_min=0):
        """Smallest window ``>= J_min`` that represents the same function."""
        v, J = self.values, self.J
        while J > J_min and v[0] == 0 and v[-1] == self.tail:
            v = v[1:-1]
            J -= 1
        return self if J == self.J else CoeffFunction(v, self.tail)

    def conj(self):
        return CoeffFunction(self.values.conj(), self.tail.conjugate())

    def is_zero(self):
        return self.tail == 0 and not self.values.any()

    def _aligned(self, other):
        J = max(self.J, other.J)
        return self.padded(J).values, other.padded(J).values

    def __add__(self, other):
        a, b = self._aligned(other)
        return CoeffFunction(a + b, self.tail + other.tail)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return CoeffFunction(a - b, self.tail - other.tail)

    def scaled(self, c):
        return CoeffFunction(self.values * c, self.tail * c)

    def __eq__(self, other):
        if not isinstance(other, CoeffFunction):
            return NotImplemented
        if self.tail != other.tail:
            return False
        a, b = self._aligned(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __repr__(self):
        return f"CoeffFunction(J={self.J}, tail={self.tail!r})"


def _check_flavor(flavor):
    if flavor not in FLAVORS:
        raise AlgebraError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")


class CrossedElement:
    """Finite sum ``sum_k (l*)^k f_k(q^N)``; immutable.

    All coefficient functions share one window half-width ``J``.
    """

    __slots__ = ("_terms", "flavor", "J")

    def __init__(self, terms, flavor=CROSSED_PRODUCT, J=None):
        _check_flavor(flavor)
        terms = {int(k): f for k, f in dict(terms).items()}
        width = max([f.J for f in terms.values()] + [0 if J is None else J])
        clean = {}
        for k in sorted(terms):
            f = terms[k]
            if f.is_zero():
                continue
            if flavor == QUANTUM_PLANE and k != 0 and f.tail != 0:
                raise AlgebraError(
                    f"quantum-plane elements need f_k(0) = 0 for k != 0 (k={k})")
            clean[k] = f.padded(width)
        self._terms = MappingProxyType(clean)
        self.flavor = flavor
        self.J = width

    @property
    def terms(self):
        return self._terms

    @classmethod
    def zero(cls, flavor=CROSSED_PRODUCT, J=0):
        return cls({}, flavor, J)

    def coeff(self, k):
        f = self._terms.get(k)
        return CoeffFunction.zeros(self.J) if f is None else f

    @property
    def kmax(self):
        return max((abs(k) for k in self._terms), default=0)

    def with_window(self, J):
        return CrossedElement(self._terms, self.flavor, max(J, self.J))

    def trimmed(self, J_min=0):
        terms = {k: f.trimmed(J_min) for k, f in self._terms.items()}
        width = max([f.J for f in terms.values()] + [J_min])
        return CrossedElement(terms, self.flavor, width)

    def _check(self, other):
        if not isinstance(other, CrossedElement):
            raise TypeError(f"expected CrossedElement, got {type(other).__name__}")
        if other.flavor != self.flavor:
            raise AlgebraError(f"flavor mismatch: {self.flavor} vs {other.flavor}")

    def _combine(self, other, op):
        self._check(other)
        keys = sorted(set(self._terms) | set(other._terms))
        J = max(self.J, other.J)
        return CrossedElement({k: op(self.coeff(k), other.coeff(k)) for k in keys},
                              self.flavor, J)

    def __add__(self, other):
        return self._combine(other, CoeffFunction.__add__)

    def __sub__(self, other):
        return self._combine(other, CoeffFunction.__sub__)

    def __neg__(self):
        return self.scaled(-1.0)

    def scaled(self, c):
        return CrossedElement({k: f.scaled(c) for k, f in self._terms.items()},
                              self.flavor, self.J)

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self.scaled(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scaled(other)
        return NotImplemented

    @property
    def H(self):
        return star(self)

    def __eq__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        if self.flavor != other.flavor or set(self._terms) != set(other._terms):
            return False
        return all(self._terms[k] == other._terms[k] for k in self._terms)

    __hash__ = None

    def frobenius_norm(self):
        """Euclidean norm of all stored values and tails."""
        total = sum(float(np.sum(np.abs(f.values) ** 2)) + abs(f.tail) ** 2
                    for f in self._terms.values())
        return math.sqrt(total)

    def __repr__(self):
        return (f"CrossedElement(flavor={self.flavor!r}, J={self.J}, "
                f"k={sorted(self._terms)})")


def multiply(x, y):
    """Product in the algebra.

    ``((l*)^m f)((l*)^n g) = (l*)^{m+n} (f(q^{N+n}) g(q^N))``; tails multiply
    as Laurent coefficients.
    """
    x._check(y)
    width = max(x.J, y.J)
    shift = y.kmax
    W = width + shift
    parts = {}
    for m, f in x.terms.items():
        for n, g in y.terms.items():
            val = f.shifted(n).padded(W).values * g.padded(W).values
            parts.setdefault(m + n, []).append((val, f.tail * g.tail))
    terms = {}
    for k, contribs in parts.items():
        values = contribs[0][0]
        for val, _ in contribs[1:]:
            values = values + val
        tail = _csum(t for _, t in contribs)
        terms[k] = CoeffFunction(values, tail)
    return CrossedElement(terms, x.flavor, W).trimmed(width)


def star(x):
    """Adjoint: ``((l*)^k f(q^N))^* = (l*)^{-k} conj(f)(q^{N-k})``."""
    terms = {-k: f.conj().shifted(-k) for k, f in x.terms.items()}
    return CrossedElement(terms, x.flavor, x.J + x.kmax).trimmed(x.J)


def represent(x, N):
    """Matrix of ``x`` on ``span{e_-N, ..., e_N}`` (zero-padded truncation).

    Entry ``(i+k, i)`` is ``f_k(q^i)``; rows that leave the window are
    dropped, so the result is exact on interior indices only.
    """
    if N > x.J:
        raise AlgebraError(f"truncation N={N} exceeds window J={x.J}")
    size = 2 * N + 1
    mat = np.zeros((size, size), dtype=complex)
    for k, f in x.terms.items():
        if abs(k) >= size:
            continue
        vals = f.window(N)
        cols = np.arange(max(0, -k), min(size, size - k))
        mat[cols + k, cols] = vals[cols]
    return OperatorMatrix(mat, -N)


def quotient_plane(x):
    """Image in ``C`` of a quantum-plane element: ``f_0(0)``."""
    if x.flavor != QUANTUM_PLANE:
        raise AlgebraError("quotient_plane needs a quantum_plane element")
    return x.coeff(0).tail


def quotient_crossed(x):
    """Image in ``C(S^1)``: the Laurent polynomial ``sum_k f_k(0) zeta^k``."""
    if x.flavor != CROSSED_PRODUCT:
        raise AlgebraError("quotient_crossed needs a crossed_product element")
    return CirclePolynomial({k: f.tail for k, f in x.terms.items()})


def in_ideal(x):
    """True iff every coefficient vanishes at 0 (the compact operators)."""
    return all(f.tail == 0 for f in x.terms.values())


@dataclass(frozen=True)
class CirclePolynomial:
    """Laurent polynomial ``sum_k c_k zeta^k`` on the unit circle."""
    coefficients: tuple = ()

    def __init__(self, coefficients=()):
        items = dict(coefficients).items() if not isinstance(coefficients, tuple) \
            else coefficients
        clean = tuple(sorted((int(k), complex(c)) for k, c in items if c != 0))
        object.__setattr__(self, "coefficients", clean)

    def as_dict(self):
        return dict(self.coefficients)

    def __getitem__(self, k):
        return self.as_dict().get(k, 0j)

    @property
    def degree(self):
        return max((abs(k) for k, _ in self.coefficients), default=0)

    def __mul__(self, other):
        if not isinstance(other, CirclePolynomial):
            return CirclePolynomial({k: c * other for k, c in self.coefficients})
        parts = {}
        for m, a in self.coefficients:
            for n, b in other.coefficients:
                parts.setdefault(m + n, []).append(a * b)
        return CirclePolynomial({k: _csum(v) for k, v in parts.items()})

    def __add__(self, other):
        d = self.as_dict()
        for k, c in other.coefficients:
            d[k] = d.get(k, 0j) + c
        return CirclePolynomial(d)

    def __sub__(self, other):
        return self + other * (-1.0)

    def star(self):
        """Pointwise conjugate on the circle: ``zeta^k -> zeta^{-k}``."""
        return CirclePolynomial({-k: c.conjugate() for k, c in self.coefficients})

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros_like(zeta)
        for k, c in self.coefficients:
            out = out + c * zeta ** k
        return out

    def is_zero(self):
        return not self.coefficients


def circle_points(degree):
    """Enough roots of unity to separate Laurent polynomials of degree ``<= 2*degree``."""
    L = 4 * degree + 1
    return np.exp(2j * np.pi * np.arange(L) / L)


def circle_matrix(p, degree):
    """Diagonal matrix model of ``p`` in ``C(S^1)``: its values at
    :func:`circle_points`."""
    return np.diag(p(circle_points(degree)))


def _grid_values(J, support, rng, integer):
    v = np.zeros(2 * J + 1, dtype=complex)
    idx = np.arange(J - support, J + support + 1)
    if integer:
        v[idx] = rng.integers(-4, 5, idx.size) + 1j * rng.integers(-4, 5, idx.size)
    else:
        v[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    return v


def random_element(rng, J, flavor=CROSSED_PRODUCT, kmax=2, support=None, tails=True,
                   integer=False):
    """Random element with terms ``|k| <= kmax``, values supported in ``|j| <= support``.

    Gaussian values are scaled to unit :meth:`CrossedElement.frobenius_norm`;
    ``integer=True`` draws small Gaussian integers instead (left unscaled) so
    that products are computed without rounding.
    """
    _check_flavor(flavor)
    support = J if support is None else support
    if support > J:
        raise AlgebraError("support exceeds window")
    terms = {}
    for k in range(-kmax, kmax + 1):
        v = _grid_values(J, support, rng, integer)
        tail = 0j
        if tails and (flavor == CROSSED_PRODUCT or k == 0):
            if integer:
                tail = complex(int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
            else:
                tail = complex(rng.normal(), rng.normal())
        terms[k] = CoeffFunction(v, tail)
    x = CrossedElement(terms, flavor, J)
    if not integer:
        nrm = x.frobenius_norm()
        if nrm > 0:
            x = x.scaled(1.0 / nrm)
    return x


def delta(j, J, k=0, flavor=CROSSED_PRODUCT, value=1.0):
    """``(l*)^k`` times the indicator of the point ``q^j``."""
    if abs(j) > J:
        raise AlgebraError("delta point outside window")
    v = np.zeros(2 * J + 1, dtype=complex)
    v[j + J] = value
    return CrossedElement({k: CoeffFunction(v, 0.0)}, flavor, J)


def constant(c, J, k=0, flavor=CROSSED_PRODUCT):
    """``(l*)^k`` times the constant function ``c`` on the window with tail ``c``.

    Not vanishing at infinity: use as a building block for products only.
    """
    return CrossedElement({k: CoeffFunction(np.full(2 * J + 1, c), c)}, flavor, J)


def monomial(k, J, flavor=CROSSED_PRODUCT, tail=1.0):
    """``(l*)^k g(q^N)`` where ``g`` is 0 on ``q^j, j < 0`` and ``tail`` elsewhere."""
    v = np.zeros(2 * J + 1, dtype=complex)
    v[J:] = tail
    return CrossedElement({k: CoeffFunction(v, tail)}, flavor, J)


def approximate_identity(m, J, flavor=CROSSED_PRODUCT):
    """Projection onto ``span{e_j : |j| <= m}``, a compact element."""
    if m > J:
        raise AlgebraError(f"m={m} exceeds window J={J}")
    v = np.zeros(2 * J + 1, dtype=complex)
    v[J - m:J + m + 1] = 1.0
    return CrossedElement({0: CoeffFunction(v, 0.0)}, flavor, J)


def matrix_unit_basis(N):
    """Representations of ``(l*)^k delta_j`` on the window ``-N..N``: every
    matrix unit, i.e. the truncated algebra (compacts and whole algebra
    coincide at finite size)."""
    size = 2 * N + 1
    out = []
    for r in range(size):
        for c in range(size):
            e = np.zeros((size, size), dtype=complex)
            e[r, c] = 1.0
            out.append(e)
    return out


class MultiplicationOperator:
    """Left multiplication by ``q^{power N}``.

    ``(l*)^k f(q^N) -> (l*)^k q^{power (N+k)} f(q^N)``, i.e. each ``f_k`` is
    multiplied pointwise by ``q^{power (j+k)}``.  With ``power = 1`` the
    operator is unbounded where ``q^j -> infinity`` (``j -> -infinity``), every
    model element is in the domain and images vanish at 0.  With
    ``power = -1`` it blows up near the point 0 and only elements with all
    tails zero are in the domain.
    """

    def __init__(self, q=0.5, power=1):
        if not 0.0 < q < 1.0:
            raise AlgebraError(f"q must lie in (0, 1), got {q!r}")
        if power not in (1, -1):
            raise AlgebraError("power must be +1 or -1")
        self.q = q
        self.power = power

    def in_domain(self, x):
        return self.power == 1 or in_ideal(x)

    def weights(self, J, k):
        return float(self.q) ** (self.power * np.arange(-J + k, J + k + 1, dtype=float))

    def __call__(self, x):
        if not self.in_domain(x):
            raise AlgebraError("element is not in the domain of the operator")
        terms = {}
        for k, f in x.terms.items():
            # q^{j+k} f(q^j) -> 0 at the point 0 when power = 1
            terms[k] = CoeffFunction(f.values * self.weights(x.J, k), 0.0)
        return CrossedElement(terms, x.flavor, x.J)

    def matrix(self, N):
        """The operator ``q^{power N}`` on ``span{e_-N..e_N}`` (diagonal)."""
        return OperatorMatrix(np.diag(self.weights(N, 0)).astype(complex), -N,
                              hermitian=True)


def demo_semiregular(J=32, q=0.5, power=1, flavor=QUANTUM_PLANE, samples=6, seed=0,
                     kmax=2, support=None):
    """Sample graph pairs ``(a, S a)`` of ``S`` = left multiplication by
    ``q^{power N}``.

    Returns ``(S, pairs)``.  Sample elements have values on ``|j| <= support``
    (default ``J // 2``); with ``power = -1`` they are drawn from the ideal.
    """
    S = MultiplicationOperator(q, power)
    rng = np.random.default_rng(seed)
    support = J // 2 if support is None else support
    pairs = []
    for _ in range(samples):
        a = random_element(rng, J, flavor, kmax, support, tails=(power == 1))
        pairs.append((a, S(a)))
    return S, pairs


_HEADER = "# regop crossed-element v1"


def dumps(x):
    """Text form: header, ``flavor``/``J`` lines, then ``k j re im`` for each
    nonzero grid value and ``k tail re im`` for each coefficient."""
    lines = [_HEADER, f"flavor {x.flavor}", f"J {x.J}"]
    for k, f in x.terms.items():
        for j in range(-x.J, x.J + 1):
            v = f.values[j + x.J]
            if v != 0:
                lines.append(f"{k} {j} {float(v.real)!r} {float(v.imag)!r}")
        lines.append(f"{k} tail {f.tail.real!r} {f.tail.imag!r}")
    return "\n".join(lines) + "\n"


def loads(text):
    flavor, J = CROSSED_PRODUCT, None
    vals, tails = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "flavor":
                flavor = parts[1]
            elif parts[0] == "J":
                J = int(parts[1])
            else:
                k = int(parts[0])
                v = complex(float(parts[2]), float(parts[3]))
                if parts[1] == "tail":
                    tails[k] = v
                else:
                    vals.setdefault(k, {})[int(parts[1])] = v
        except (IndexError, ValueError) as exc:
            raise AlgebraError(f"line {lineno}: cannot parse {raw!r}") from exc
    if J is None:
        raise AlgebraError("missing 'J' line")
    terms = {}
    for k in set(vals) | set(tails):
        v = np.zeros(2 * J + 1, dtype=complex)
        for j, c in vals.get(k, {}).items():
            if abs(j) > J:
                raise AlgebraError(f"grid index {j} outside window {J}")
            v[j + J] = c
        terms[k] = CoeffFunction(v, tails.get(k, 0j))
    return CrossedElement(terms, flavor, J)
