"""Exact linear algebra helpers.

Three layers: Fraction matrices (rational elimination), integer matrices
(Smith normal form with unimodular transforms), and bit matrices over F2.
A generic elimination routine also works on any entries with field-element
semantics (is_zero, pivot_size, arithmetic), which covers Galois descent
over extension algebras.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegenerateForm


def frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def identity_matrix(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)]


def mat_mul(A, B):
    """Product of matrices with Fraction or int entries."""
    n, k, m = len(A), len(B), len(B[0])
    assert all(len(r) == k for r in A)
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(A, v):
    return [sum(A[i][t] * v[t] for t in range(len(v))) for i in range(len(A))]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def mat_eq(A, B):
    return len(A) == len(B) and all(ra == rb for ra, rb in zip(A, B))


# ---------------------------------------------------------------------------
# Rational elimination
# ---------------------------------------------------------------------------


def rref_fraction(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = frac_matrix(M)
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def kernel_fraction(M):
    """Basis of the right kernel, as a list of Fraction vectors."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if rows == 0:
        return [[Fraction(i == j) for j in range(cols)] for i in range(cols)]
    R, pivots = rref_fraction(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def solve_fraction(M, b):
    """One solution of M x = b, or None when inconsistent."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    aug = [list(map(Fraction, M[i])) + [Fraction(b[i])] for i in range(rows)]
    R, pivots = rref_fraction(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][cols]
    return x


def inverse_fraction(M):
    n = len(M)
    aug = [list(map(Fraction, M[i])) + [Fraction(i == j) for j in range(n)] for i in range(n)]
    R, pivots = rref_fraction(aug)
    if pivots != list(range(n)):
        raise DegenerateForm("matrix is singular")
    return [row[n:] for row in R]


def det_fraction(M):
    A = frac_matrix(M)
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if A[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det *= A[c][c]
        inv = 1 / A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def rank_fraction(M):
    return len(rref_fraction(M)[1])


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


def smith_normal_form(M):
    """Smith normal form: returns (D, U, V) with U M V = D, U and V unimodular."""
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity_matrix(m, 1, 0)
    V = identity_matrix(n, 1, 0)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                add_row(t, i, -q)
                dirty = dirty or A[i][t] != 0
        for j in range(t + 1, n):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                add_col(t, j, -q)
                dirty = dirty or A[t][j] != 0
        if dirty:
            continue
        # divisibility: fold any entry the pivot does not divide into column t
        bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                    if A[i][j] % A[t][t]), None)
        if bad is not None:
            add_row(bad[0], t, 1)
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


def elementary_divisors(M):
    D, _, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i] != 0]


# ---------------------------------------------------------------------------
# F2 systems
# ---------------------------------------------------------------------------


def rref_f2(rows):
    """Row reduce a list of bit vectors mod 2; returns (R, pivot_columns)."""
    R = [list(r) for r in rows]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if R[i][c] & 1), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        for i in range(m):
            if i != r and R[i][c] & 1:
                R[i] = [(x ^ y) & 1 for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def solve_f2(A, b):
    """Solution of A x = b over F2 with all free variables zero, or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(A[i]) + [b[i] & 1] for i in range(m)]
    R, pivots = rref_f2(aug)
    if n in pivots:
        return None
    x = [0] * n
    for r, pc in enumerate(pivots):
        x[pc] = R[r][n]
    return x


def kernel_f2(A):
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    R, pivots = rref_f2(A)
    basis = []
    for fc in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = R[r][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Elimination over field-like entries
# ---------------------------------------------------------------------------


def kernel_elem(M, zero):
    """Right-kernel basis for entries with field-element semantics.

    Entries must support arithmetic, is_zero() and pivot_size(); pivoting
    picks the entry whose pivot_size is largest, which for nonarchimedean
    entries means the lowest valuation, keeping divisions precision-safe.
    """
    rows = [list(r) for r in M]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        best, best_size = None, None
        for i in range(r, m):
            e = rows[i][c]
            if not e.is_zero():
                s = e.pivot_size()
                if best is None or s > best_size:
                    best, best_size = i, s
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    for fc in (c for c in range(n) if c not in pivots):
        v = [zero] * n
        v[fc] = zero + 1
        for rr, pc in enumerate(pivots):
            v[pc] = zero - rows[rr][fc]
        basis.append(v)
    return basis
