"""Quadratic forms over local fields and their two-torsion invariants.

Forms enter either as diagonal coefficient lists or as symmetric Gram
matrices of the bilinear form B(x, y) with Q(x) = B(x, x).  All invariants
land in square classes and cup-twisted pairs, so every computation is exact.
"""

from __future__ import annotations

from .br2s import BrauerPair, pair_zero
from .errors import DegenerateForm, InsufficientPrecision
from .localfield import hilbert_bit, square_class, square_class_one
from ._linalg import transpose


def coerce_gram(field, rows):
    """Turn a square array of numbers into FieldElem entries, checking symmetry."""
    G = [[field(x) for x in row] for row in rows]
    n = len(G)
    assert all(len(row) == n for row in G)
    for i in range(n):
        for j in range(i):
            assert (G[i][j] - G[j][i]).is_zero(), "Gram matrix must be symmetric"
    return G


def coerce_diag(field, entries):
    return [field(a) for a in entries]


def diagonalize(field, gram):
    """Diagonalize a symmetric matrix by congruence.

    Returns (diag, T) with T^t G T equal to the diagonal matrix, T invertible
    over the field.  Raises DegenerateForm when the form has a radical.
    """
    G = [row[:] for row in coerce_gram(field, gram)]
    n = len(G)
    T = [[field(1) if i == j else field(0) for j in range(n)] for i in range(n)]

    def col_op(src, dst, c):
        # add c * column src to column dst, symmetrically
        for i in range(n):
            G[i][dst] = G[i][dst] + c * G[i][src]
        for j in range(n):
            G[dst][j] = G[dst][j] + c * G[src][j]
        for i in range(n):
            T[i][dst] = T[i][dst] + c * T[i][src]

    def col_swap(i, j):
        for r in range(n):
            G[r][i], G[r][j] = G[r][j], G[r][i]
        G[i], G[j] = G[j], G[i]
        for r in range(n):
            T[r][i], T[r][j] = T[r][j], T[r][i]

    for k in range(n):
        # pick the best available diagonal pivot at or after k
        best, best_size = None, None
        for i in range(k, n):
            if not G[i][i].is_zero():
                s = G[i][i].pivot_size()
                if best is None or s > best_size:
                    best, best_size = i, s
        if best is None:
            # all diagonal entries vanish; borrow an off-diagonal entry
            pair = None
            pair_size = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if not G[i][j].is_zero():
                        s = G[i][j].pivot_size()
                        if pair is None or s > pair_size:
                            pair, pair_size = (i, j), s
            if pair is None:
                if any(not e.is_exact_zero()
                       for row in G[k:] for e in (r for r in row[k:])):
                    raise InsufficientPrecision(
                        "remaining block is zero at working precision only")
                raise DegenerateForm("form has a nonzero radical")
            i, j = pair
            col_op(j, i, field(1))  # now G[i][i] = 2 B(e_i, e_j) != 0
            best = i
        if best != k:
            col_swap(best, k)
        pivot_inv = G[k][k].inverse()
        for j in range(k + 1, n):
            if not G[k][j].is_zero():
                col_op(k, j, -G[k][j] * pivot_inv)
    diag = [G[i][i] for i in range(n)]
    return diag, T


def gram_apply(T, G):
    """T^t G T for FieldElem matrices."""
    n = len(G)
    Tt = transpose(T)
    tmp = [[sum((Tt[i][r] * G[r][j] for r in range(n)), start=G[0][0] * 0)
            for j in range(n)] for i in range(n)]
    return [[sum((tmp[i][r] * T[r][j] for r in range(n)), start=G[0][0] * 0)
             for j in range(n)] for i in range(n)]


def disc_class(field, diag):
    """Square class of the determinant of the diagonal form."""
    prod = field(1)
    for a in diag:
        prod = prod * field(a)
    if prod.is_zero():
        raise DegenerateForm("zero diagonal entry")
    return square_class(prod)


def sw_pair(field, diag):
    """The pair (determinant class, sum of pairwise cup products)."""
    classes = [square_class(field(a)) for a in diag]
    d = square_class_one(field)
    h = 0
    for i, ci in enumerate(classes):
        for cj in classes[i + 1:]:
            h ^= hilbert_bit(ci, cj)
        d = d * ci
    return BrauerPair(d, h)


def wall_pair(field, diag):
    """Hyperbolic-normalized invariant of an even-rank form.

    Additive under direct sum, zero on hyperbolic planes; the first
    component is the signed determinant class.
    """
    n = len(diag)
    if n % 2:
        raise DegenerateForm("wall_pair needs an even-rank form")
    m = n // 2
    minus_one = square_class(field(-1))
    z = BrauerPair(minus_one, 0)
    acc = pair_zero(field)
    for _ in range(m):
        acc = acc + z
    return acc - sw_pair(field, diag)


def wall_of_gram(field, gram):
    diag, _ = diagonalize(field, gram)
    return wall_pair(field, diag)


def hw_rel(field, diag_new, diag_old):
    """Relative invariant sw(new) - sw(old) for equal-rank forms."""
    assert len(diag_new) == len(diag_old)
    return sw_pair(field, diag_new) - sw_pair(field, diag_old)


def scale_diag(a, diag):
    return [a * x for x in diag]


def direct_sum(diag1, diag2):
    return list(diag1) + list(diag2)


def hyperbolic_diag(field, m):
    """m hyperbolic planes as a diagonal form."""
    out = []
    for _ in range(m):
        out.extend([field(1), field(-1)])
    return out


def reflection_factorization(field, gram, g):
    """Write an isometry g of the form into a product of reflections.

    Returns a list of vectors v_1, ..., v_m (in the given basis, each of
    nonzero length) with g equal to the composite of the reflections in
    them.  The induction fixes one anisotropic vector of an orthogonal
    basis at a time; a vector whose displacement x - g x is isotropic is
    restored by the pair of reflections in g x + x and in x.
    """
    G = coerce_gram(field, gram)
    n = len(G)
    current = [[field(x) for x in row] for row in g]
    _, T = diagonalize(field, gram)
    frame = [[T[i][k] for i in range(n)] for k in range(n)]  # orthogonal basis

    def bil(x, y):
        acc = field(0)
        for i in range(n):
            for j in range(n):
                acc = acc + x[i] * G[i][j] * y[j]
        return acc

    def apply(mat, x):
        return [sum((mat[i][j] * x[j] for j in range(n)), start=field(0)) for i in range(n)]

    def reflect_matrix(v):
        qv_inv = bil(v, v).inverse()
        mat = []
        for j in range(n):
            e = [field(1) if i == j else field(0) for i in range(n)]
            coeff = (bil(v, e) + bil(v, e)) * qv_inv
            mat.append([e[i] - coeff * v[i] for i in range(n)])
        return [[mat[j][i] for j in range(n)] for i in range(n)]

    vectors = []
    for x in frame:
        gx = apply(current, x)
        diff = [a - b for a, b in zip(x, gx)]
        if all(d.is_zero() for d in diff):
            continue
        if not bil(diff, diff).is_zero():
            # the reflection in x - g x sends g x back to x
            vectors.append(diff)
            current = mat_mul_field(reflect_matrix(diff), current, field)
        else:
            s = [a + b for a, b in zip(gx, x)]
            if bil(s, s).is_zero():
                raise InsufficientPrecision(
                    "cannot certify anisotropy of factorization vectors")
            vectors.append(s)
            vectors.append(x)
            step = mat_mul_field(reflect_matrix(s), current, field)
            current = mat_mul_field(reflect_matrix(x), step, field)
    for i in range(n):
        for j in range(n):
            target = field(1) if i == j else field(0)
            if not (current[i][j] - target).is_zero():
                raise DegenerateForm("input matrix is not an isometry of the form")
    return vectors


def mat_mul_field(A, B, field):
    n = len(A)
    m = len(B[0])
    k = len(B)
    return [[sum((A[i][t] * B[t][j] for t in range(k)), start=field(0))
             for j in range(m)] for i in range(n)]


def spinor_norm(field, gram, g):
    """Spinor norm of an isometry: product of Q(v) over a reflection factorization."""
    vectors = reflection_factorization(field, gram, g)
    G = coerce_gram(field, gram)
    n = len(G)
    acc = field(1)
    for v in vectors:
        qv = field(0)
        for i in range(n):
            for j in range(n):
                qv = qv + v[i] * G[i][j] * v[j]
        acc = acc * qv
    if acc.is_zero():
        raise InsufficientPrecision("reflection vectors lost their length")
    return square_class(acc)
