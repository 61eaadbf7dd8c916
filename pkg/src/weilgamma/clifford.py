"""Clifford algebras of diagonal forms, built multiplicatively.

This module is the independent route to the two-torsion invariants: instead
of evaluating closed formulas it constructs the algebra with explicit basis
monomials, verifies the structural relations by multiplying elements, and
only then reads off classes.  Tests compare it against the formula route in
quadform.
"""

from __future__ import annotations

from .br2s import BrauerPair
from .errors import DegenerateForm, DescentError
from .localfield import hilbert_bit, square_class
from .quadform import diagonalize, reflection_factorization, coerce_gram
from ._linalg import kernel_elem


class CliffordElem:
    """Element of a Clifford algebra, as a map from basis bitmasks to scalars."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg, coeffs):
        self.alg = alg
        self.coeffs = {m: c for m, c in coeffs.items() if not c.is_zero()}

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return CliffordElem(self.alg, out)

    def __neg__(self):
        return CliffordElem(self.alg, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CliffordElem):
            other = self.alg.scalar(other)
        field = self.alg.field
        out = {}
        for s, cs in self.coeffs.items():
            for t, ct in other.coeffs.items():
                sign, scalar_mask, mask = self.alg._basis_mul(s, t)
                c = cs * ct
                if sign < 0:
                    c = -c
                m = scalar_mask
                while m:
                    low = m & -m
                    c = c * self.alg.coeff[low.bit_length() - 1]
                    m ^= low
                out[mask] = out[mask] + c if mask in out else c
        return CliffordElem(self.alg, out)

    def __rmul__(self, other):
        return self.alg.scalar(other) * self

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def scalar_part(self):
        field = self.alg.field
        return self.coeffs.get(0, field(0))

    def is_scalar(self):
        return all(m == 0 for m in self.coeffs)

    def reverse(self):
        """The transpose anti-automorphism: reverses the order of generators."""
        out = {}
        for m, c in self.coeffs.items():
            k = bin(m).count("1")
            out[m] = -c if (k * (k - 1) // 2) % 2 else c
        return CliffordElem(self.alg, out)

    def grade_involution(self):
        out = {}
        for m, c in self.coeffs.items():
            out[m] = -c if bin(m).count("1") % 2 else c
        return CliffordElem(self.alg, out)

    def commutes_with(self, other):
        return (self * other - other * self).is_zero()

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for m in sorted(self.coeffs):
            name = "".join(f"e{i + 1}" for i in range(self.alg.n) if m >> i & 1) or "1"
            terms.append(f"({self.coeffs[m]!r})*{name}")
        return " + ".join(terms)


class CliffordAlgebra:
    """Clifford algebra of the diagonal form with the given coefficients."""

    def __init__(self, field, diag):
        self.field = field
        self.coeff = [field(a) for a in diag]
        if any(a.is_zero() for a in self.coeff):
            raise DegenerateForm("Clifford algebra of a degenerate form")
        self.n = len(self.coeff)

    def _basis_mul(self, s, t):
        # moving each generator of t left through the tail of s counts swaps
        swaps = 0
        for i in range(self.n):
            if t >> i & 1:
                swaps += bin(s >> (i + 1)).count("1")
        sign = -1 if swaps % 2 else 1
        return sign, s & t, s ^ t

    def scalar(self, c):
        return CliffordElem(self, {0: self.field(c)})

    def one(self):
        return self.scalar(1)

    def generator(self, i):
        return CliffordElem(self, {1 << i: self.field(1)})

    def vector(self, coords):
        return CliffordElem(self, {1 << i: self.field(c) for i, c in enumerate(coords)})

    def basis_masks(self):
        return list(range(1 << self.n))

    def even_masks(self):
        return [m for m in self.basis_masks() if bin(m).count("1") % 2 == 0]

    def volume_element(self):
        return CliffordElem(self, {(1 << self.n) - 1: self.field(1)})


def _scalar_square_class(elem, what):
    if not elem.is_scalar():
        raise DescentError(f"{what} is not scalar")
    return square_class(elem.scalar_part())


def even_center_class(field, diag):
    """Square class of z^2 for the volume element z of an even-rank algebra.

    Commutation of z with the whole even part is verified by multiplication.
    """
    alg = CliffordAlgebra(field, diag)
    assert alg.n % 2 == 0
    z = alg.volume_element()
    for m in alg.even_masks():
        b = CliffordElem(alg, {m: field(1)})
        if not z.commutes_with(b):
            raise DescentError("volume element fails to centralize the even part")
    return _scalar_square_class(z * z, "z^2")


def quaternion_bit(field, alpha, beta):
    """Brauer bit of the quaternion algebra (alpha, beta): 0 split, 1 division.

    The algebra is division exactly when beta is not a norm from the
    quadratic etale algebra attached to alpha, which is the Hilbert symbol.
    """
    return hilbert_bit(square_class(field(alpha)), square_class(field(beta)))


def wall_via_clifford(field, diag):
    """Wall pair of an even-rank diagonal form, read off the Clifford algebra.

    Rank 2: the full algebra is the quaternion algebra on the two squares of
    the generators.  Rank 4: the algebra splits as a product of two commuting
    quaternion subalgebras found explicitly; every relation used is checked
    by multiplying the actual elements.
    """
    n = len(diag)
    alg = CliffordAlgebra(field, diag)
    first = even_center_class(field, diag)
    if n == 2:
        e1, e2 = alg.generator(0), alg.generator(1)
        if not (e1 * e2 + e2 * e1).is_zero():
            raise DescentError("generators fail to anticommute")
        a1 = _scalar_square_class(e1 * e1, "e1^2")
        a2 = _scalar_square_class(e2 * e2, "e2^2")
        return BrauerPair(first, hilbert_bit(a1, a2))
    if n == 4:
        e1, e2, e3, e4 = (alg.generator(i) for i in range(4))
        u1, u2 = e1, e2
        w1 = e1 * e2 * e3
        w2 = e1 * e2 * e4
        for x, y in ((u1, u2), (w1, w2)):
            if not (x * y + y * x).is_zero():
                raise DescentError("quaternion generators fail to anticommute")
        for x in (u1, u2):
            for y in (w1, w2):
                if not x.commutes_with(y):
                    raise DescentError("the two quaternion subalgebras do not commute")
        # the sixteen products of subalgebra basis elements must span
        b1 = [alg.one(), u1, u2, u1 * u2]
        b2 = [alg.one(), w1, w2, w1 * w2]
        rows = []
        for x in b1:
            for y in b2:
                prod = x * y
                rows.append([prod.coeffs.get(m, field(0)) for m in alg.basis_masks()])
        if kernel_elem(rows, field(0)):
            raise DescentError("subalgebra products are linearly dependent")
        alpha1 = _scalar_square_class(u1 * u1, "u1^2")
        alpha2 = _scalar_square_class(u2 * u2, "u2^2")
        beta1 = _scalar_square_class(w1 * w1, "w1^2")
        beta2 = _scalar_square_class(w2 * w2, "w2^2")
        bit = hilbert_bit(alpha1, alpha2) ^ hilbert_bit(beta1, beta2)
        return BrauerPair(first, bit)
    raise DegenerateForm("clifford route implemented for ranks 2 and 4")


def spinor_norm_oracle(field, gram, g):
    """Spinor norm of an isometry, via an explicit Clifford group lift.

    Factor g into reflections, lift each reflection vector into the Clifford
    algebra of the diagonalized form, check that twisted conjugation by the
    product really induces g, and return the class of x.reverse() * x.
    """
    from .quadform import mat_mul_field

    G = coerce_gram(field, gram)
    n = len(G)
    diag, T = diagonalize(field, gram)
    alg = CliffordAlgebra(field, diag)

    # coordinates of a vector in the orthogonal frame: solve T c = v
    Tmat = [[T[i][j] for j in range(n)] for i in range(n)]
    Tinv = _invert_field_matrix(Tmat, field)

    vectors = reflection_factorization(field, gram, g)
    x = alg.one()
    for v in vectors:
        coords = [sum((Tinv[i][j] * v[j] for j in range(n)), start=field(0))
                  for i in range(n)]
        x = x * alg.vector(coords)
    x_rev = x.reverse()
    norm = x_rev * x
    cls = _scalar_square_class(norm, "spinor norm")
    x_inv = alg.scalar(norm.scalar_part().inverse()) * x_rev
    alpha_x = x.grade_involution()
    # twisted conjugation by the lift must induce g in the orthogonal frame
    g_frame = mat_mul_field(
        mat_mul_field(Tinv, [[field(a) for a in row] for row in g], field), Tmat, field)
    for j in range(n):
        image = alpha_x * alg.generator(j) * x_inv
        expected = alg.vector([g_frame[i][j] for i in range(n)])
        if not (image - expected).is_zero():
            raise DescentError("Clifford lift does not induce the given isometry")
    return cls


def _invert_field_matrix(M, field):
    n = len(M)
    aug = [[M[i][j] for j in range(n)] + [field(1) if i == j else field(0) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        best, best_size = None, None
        for i in range(c, n):
            if not aug[i][c].is_zero():
                s = aug[i][c].pivot_size()
                if best is None or s > best_size:
                    best, best_size = i, s
        if best is None:
            raise DegenerateForm("matrix is singular")
        aug[c], aug[best] = aug[best], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]
