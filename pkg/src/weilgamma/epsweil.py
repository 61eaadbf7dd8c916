"""Epsilon factors of quadratic characters and Weil indices of forms.

Everything here returns exact fourth roots of unity.  Numerical character
sums appear only inside small complete Gauss sums, whose phases are snapped
to the nearest fourth root with a hard residual bound; an out-of-tolerance
phase raises instead of rounding silently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .br2s import BrauerPair
from .errors import NotStabilized, SnapFailure, UnsupportedField
from .localfield import (
    AdditiveCharacter,
    hilbert,
    psi_eval,
    square_class,
    square_class_one,
)
from .quadform import wall_pair

SNAP_TOL = 1e-6


@dataclass(frozen=True)
class FourthRoot:
    """An exact fourth root of unity i^k."""

    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 4)

    def value(self):
        return (1 + 0j, 1j, -1 + 0j, -1j)[self.k]

    def __mul__(self, other):
        return FourthRoot(self.k + other.k)

    def __truediv__(self, other):
        return FourthRoot(self.k - other.k)

    def conjugate(self):
        return FourthRoot(-self.k)

    def times_sign(self, bit):
        return FourthRoot(self.k + 2 * bit)

    def __pow__(self, n):
        return FourthRoot(self.k * n)

    def __repr__(self):
        return ("1", "i", "-1", "-i")[self.k]

    @staticmethod
    def from_phase(z, tol=SNAP_TOL):
        """Snap a complex number of modulus about 1 to an exact fourth root."""
        best, residual = None, None
        for k in range(4):
            r = abs(z - (1j) ** k)
            if residual is None or r < residual:
                best, residual = k, r
        if residual > tol:
            raise SnapFailure(z, residual)
        return FourthRoot(best)


def _conductor_exponent(chi):
    """Exponent of the conductor of the quadratic character of the class chi."""
    f = chi.field
    if f.kind == "padic" and f.p == 2:
        if chi.vbit == 0 and chi.ucode == 1:
            return 0
        if chi.vbit == 0 and chi.ucode == 5:
            return 0
        if chi.vbit == 0:
            return 2  # the classes of -1 and -5
        return 3  # the classes of 2, -2, 10, -10
    return 0 if chi.vbit == 0 else 1


def is_unramified(chi):
    f = chi.field
    if f.is_archimedean:
        return True
    return _conductor_exponent(chi) == 0


def eps_quadratic(chi, psi):
    """Local epsilon factor of the quadratic character attached to chi.

    chi is a square class; psi an AdditiveCharacter on the same field.  The
    result is an exact fourth root of unity (the factor is unitary and its
    fourth power is one for quadratic characters).
    """
    f = chi.field
    assert (psi.field.kind, psi.field.p) == (f.kind, f.p)
    if f.kind == "C" or chi.is_one():
        return FourthRoot(0)
    if f.kind == "R":
        return FourthRoot(1 if psi.sign == 1 else 3)
    level = psi.level
    if is_unramified(chi):
        # value of chi at a uniformizer, raised to the level
        pi_cls = square_class(f.uniformizer())
        chi_pi = hilbert(chi, pi_cls)
        return FourthRoot(0 if chi_pi == 1 or level % 2 == 0 else 2)
    a = _conductor_exponent(chi)
    q = f.p
    total = 0j
    if f.kind == "padic":
        units = [u for u in range(1, q ** a) if u % q]
        args = [f(u).shift(level - a) for u in units]
    else:
        units = list(range(1, q))
        args = [f.t_power(level - a, [u]) for u in units]
    for x in args:
        total += hilbert(chi, square_class(x)) * psi_eval(psi, x)
    modulus = math.sqrt(q ** a) if f.kind == "padic" else math.sqrt(q)
    return FourthRoot.from_phase(total / modulus)


def eps_virtual(pair, psi):
    """Epsilon factor of the virtual representation encoded by a BrauerPair.

    The square class carries a quadratic character (the determinant of the
    virtual representation) and the bit a sign.
    """
    return eps_quadratic(pair.cls, psi).times_sign(pair.bit)


def weil_index(wall, psi):
    """Weil index attached to a hyperbolic-normalized Wall pair."""
    assert isinstance(wall, BrauerPair)
    return eps_quadratic(wall.cls, psi).times_sign(wall.bit)


def gamma_of_diag(field, diag, psi):
    """Normalized Weil index of an even-rank diagonal form."""
    return weil_index(wall_pair(field, diag), psi)


# ---------------------------------------------------------------------------
# Gauss sum oracle
# ---------------------------------------------------------------------------

_GAUSS_CACHE = {}


def _gauss_sum_padic(p, u, m):
    """G(u, m) = sum over y mod p^m of exp(2 pi i u y^2 / p^m)."""
    if m == 0:
        return 1 + 0j
    M = p ** m
    ys = np.arange(M, dtype=np.int64)
    vals = (u % M) * ((ys * ys) % M) % M
    return complex(np.exp(2j * np.pi * vals / M).sum())


def _gauss_sum_laurent(q, u, m):
    """Same sum over y in O/t^m for F_q((t)), via the residue pairing."""
    if m == 0:
        return 1 + 0j
    codes = np.arange(q ** m, dtype=np.int64)
    digits = [(codes // q ** i) % q for i in range(m)]
    acc = np.zeros(q ** m, dtype=np.int64)
    for i in range(m):
        j = m - 1 - i
        if 0 <= j < m:
            acc += digits[i] * digits[j]
    vals = (u * acc) % q
    return complex(np.exp(2j * np.pi * vals / q).sum())


def _gauss_sum(field, ucode, m):
    key = (field.kind, field.p, ucode, m)
    if key not in _GAUSS_CACHE:
        from .localfield import SquareClass

        rep = SquareClass(field, 0, ucode).rep_element()
        if field.kind == "padic":
            u = rep.unit_residue(min(rep.rel_prec(), max(m, 1)))
            val = _gauss_sum_padic(field.p, u, m)
        else:
            val = _gauss_sum_laurent(field.p, int(rep._u[0]), m)
        _GAUSS_CACHE[key] = val
    return _GAUSS_CACHE[key]


def _expected_modulus(field, m):
    # complete one-variable sums have modulus q^(m/2), except dyadically
    # where the extra ramification contributes another sqrt(2) for m >= 2
    if m == 0:
        return 1.0
    if field.kind == "padic" and field.p == 2:
        return 2.0 ** ((m + 1) / 2)
    return field.p ** (m / 2)


def _phase_at(field, entries, K):
    """Phase of the factored complete character sum at depth K."""
    phase = 1 + 0j
    for v, ucode in entries:
        m = K - v
        assert m >= 2
        g = _gauss_sum(field, ucode, m)
        mod = abs(g)
        expected = _expected_modulus(field, m)
        if not math.isclose(mod, expected, rel_tol=1e-6):
            raise NotStabilized(K, mod, expected)
        phase *= g / mod
    return phase


def gamma_oracle(field, diag, psi):
    """Weil index of a diagonal form by stabilized complete Gauss sums.

    Independent of the epsilon-factor route: the value is the phase of the
    character sum of the form over a deep enough ball, checked for
    stabilization one step deeper.  Returns a complex number of modulus 1.
    """
    if field.kind == "C":
        return 1 + 0j
    if field.kind == "R":
        phase = 0
        for a in diag:
            fr = field(a).as_fraction()
            phase += 1 if (fr > 0) == (psi.sign == 1) else -1
        return cmath.exp(1j * cmath.pi * phase / 4)
    level = psi.level
    entries = []
    for a in diag:
        e = field(a)
        v = e.valuation()
        entries.append((v, square_class(e).ucode))
    # effective exponents K = level + 2k must keep the level's parity
    base = max(max(v for v, _ in entries) + 2, level)
    K = base + ((level - base) % 2)
    p1 = _phase_at(field, entries, K)
    p2 = _phase_at(field, entries, K + 2)
    if abs(p1 - p2) > 1e-6:
        raise NotStabilized(K, p1, p2)
    return p1.conjugate() if psi.sign == -1 else p1


def gamma_oracle_raw(field, gram, psi, depth=3):
    """Direct sum over a ball for a small Gram matrix, no factoring.

    Exponentially slow; only used by tests to confirm isometry invariance
    and the factored oracle on tiny instances.
    """
    n = len(gram)
    q = field.p
    G = [[field(x) for x in row] for row in gram]
    level = psi.level
    K = depth + ((level - depth) % 2)
    std = AdditiveCharacter(field, level=0, sign=psi.sign)

    def residues():
        if field.kind == "padic":
            return [field(c) for c in range(q ** K)]
        out = []
        for code in range(q ** K):
            digits = [(code // q ** i) % q for i in range(K)]
            out.append(field.t_power(0, digits) if any(digits) else field(0))
        return out

    reps = residues()
    total = 0j
    for combo in _tuples(reps, n):
        qval = field(0)
        for i in range(n):
            for j in range(n):
                qval = qval + combo[i] * G[i][j] * combo[j]
        total += psi_eval(std, qval.shift(-K))
    mod = abs(total)
    if mod < 1e-9:
        raise NotStabilized(K, total, 0j)
    return total / mod


def _tuples(pool, n):
    if n == 0:
        yield ()
        return
    for rest in _tuples(pool, n - 1):
        for x in pool:
            yield rest + (x,)
