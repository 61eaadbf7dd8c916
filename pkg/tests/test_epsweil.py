"""Epsilon factors, Weil indices and the Gauss-sum oracle."""

import cmath
import itertools
import random

import pytest

from weilgamma.br2s import BrauerPair
from weilgamma.epsweil import (
    FourthRoot,
    eps_quadratic,
    eps_virtual,
    gamma_of_diag,
    gamma_oracle,
    gamma_oracle_raw,
    is_unramified,
    weil_index,
)
from weilgamma.errors import SnapFailure
from weilgamma.localfield import (
    AdditiveCharacter,
    hilbert,
    hilbert_bit,
    parse_field,
    square_class,
    square_class_group,
    square_class_one,
)
from weilgamma.quadform import wall_pair

R = parse_field("R")
Q2 = parse_field("Qp:2")
Q3 = parse_field("Qp:3")
Q5 = parse_field("Qp:5")
Q7 = parse_field("Qp:7")
F3T = parse_field("Fq((t)):3")
F5T = parse_field("Fq((t)):5")

NONARCH = [Q2, Q3, Q5, Q7, F3T, F5T]
LEVELS = (-1, 0, 1)


def psi(field, level=0, sign=1):
    return AdditiveCharacter(field, level=level, sign=sign)


class TestFourthRoot:
    def test_arithmetic(self):
        i = FourthRoot(1)
        assert i * i == FourthRoot(2)
        assert (i ** 3).value() == pytest.approx(-1j)
        assert (i / i) == FourthRoot(0)
        assert i.conjugate() == FourthRoot(3)
        assert i.times_sign(1) == FourthRoot(3)

    def test_snap_roundtrip(self):
        for k in range(4):
            z = FourthRoot(k).value() * cmath.exp(1e-9j)
            assert FourthRoot.from_phase(z) == FourthRoot(k)

    def test_snap_failure(self):
        with pytest.raises(SnapFailure):
            FourthRoot.from_phase(cmath.exp(0.4j))


class TestEpsilonAnchors:
    def test_trivial_character(self):
        for f in NONARCH + [R]:
            for level in LEVELS:
                assert eps_quadratic(square_class_one(f), psi(f, level)) == FourthRoot(0)

    def test_real_sign_character(self):
        assert eps_quadratic(square_class(R(-1)), psi(R, sign=1)) == FourthRoot(1)
        assert eps_quadratic(square_class(R(-1)), psi(R, sign=-1)) == FourthRoot(3)

    def test_unramified_rules(self):
        for f in NONARCH:
            for c in square_class_group(f):
                if not is_unramified(c) or c.is_one():
                    continue
                assert eps_quadratic(c, psi(f, 0)) == FourthRoot(0)
                assert eps_quadratic(c, psi(f, 1)) == FourthRoot(2)
                assert eps_quadratic(c, psi(f, -1)) == FourthRoot(2)

    def test_ramified_odd_p(self):
        # for p = 3 (mod 4) the quadratic Gauss sum is i sqrt(p), giving -i
        assert eps_quadratic(square_class(Q3(3)), psi(Q3)) == FourthRoot(3)
        assert eps_quadratic(square_class(Q7(7)), psi(Q7)) == FourthRoot(3)
        # for p = 1 (mod 4) it is sqrt(p), giving +1
        assert eps_quadratic(square_class(Q5(5)), psi(Q5)) == FourthRoot(0)

    def test_dyadic_table(self):
        vals = {
            -1: FourthRoot(1),
            -5: FourthRoot(1),
            2: FourthRoot(0),
            -2: FourthRoot(1),
        }
        for rep, expect in vals.items():
            assert eps_quadratic(square_class(Q2(rep)), psi(Q2)) == expect, rep

    def test_square_is_value_at_minus_one(self):
        for f in NONARCH + [R]:
            m1 = square_class(f(-1))
            for c in square_class_group(f):
                for level in LEVELS:
                    e = eps_quadratic(c, psi(f, level))
                    assert e * e == FourthRoot(0).times_sign(hilbert_bit(c, m1))

    def test_conjugate_character_functional_equation(self):
        # the character is real-valued, so swapping psi for its conjugate
        # conjugates the Gauss sum: eps(c, conj psi) = conj eps(c, psi),
        # and the product of the two is always 1
        for f in NONARCH:
            for c in square_class_group(f):
                for level in LEVELS:
                    e1 = eps_quadratic(c, psi(f, level))
                    e2 = eps_quadratic(c, psi(f, level, sign=-1))
                    assert e2 == e1.conjugate()
                    assert e1 * e2 == FourthRoot(0)

    def test_level_shift(self):
        for f in NONARCH:
            pi_cls = square_class(f.uniformizer())
            for c in square_class_group(f):
                for level in (-1, 0):
                    lo = eps_quadratic(c, psi(f, level))
                    hi = eps_quadratic(c, psi(f, level + 1))
                    chi_pi = hilbert_bit(c, pi_cls)
                    assert hi == lo.times_sign(chi_pi)

    def test_twisting_cocycle(self):
        # eps(c1 c2) = eps(c1) eps(c2) (-1)^(c1, c2): makes the Wall combo
        # multiplicative under direct sums
        for f in (Q2, Q3, Q5, F3T):
            for c1 in square_class_group(f):
                for c2 in square_class_group(f):
                    for level in (0, 1):
                        p = psi(f, level)
                        lhs = eps_quadratic(c1 * c2, p)
                        rhs = (eps_quadratic(c1, p) * eps_quadratic(c2, p)
                               ).times_sign(hilbert_bit(c1, c2))
                        assert lhs == rhs, (f.descriptor, c1.label(), c2.label(), level)


class TestOracleAgreement:
    def test_norm_form_anchor(self):
        # gamma of < 1, -d > against the epsilon factor of the class d
        for f in NONARCH:
            for c in square_class_group(f):
                for level in LEVELS:
                    p = psi(f, level)
                    diag = [f(1), -c.rep_element()]
                    expect = eps_quadratic(c, p).value()
                    got = gamma_oracle(f, diag, p)
                    assert abs(got - expect) < 1e-6, (f.descriptor, c.label(), level)

    def test_combo_matches_oracle_rank_two(self):
        for f in NONARCH:
            classes = square_class_group(f)
            for c1, c2 in itertools.product(classes, classes):
                p = psi(f, 0)
                diag = [c1.rep_element(), c2.rep_element()]
                expect = gamma_of_diag(f, diag, p).value()
                got = gamma_oracle(f, diag, p)
                assert abs(got - expect) < 1e-6, (f.descriptor, c1.label(), c2.label())

    def test_combo_matches_oracle_rank_four(self):
        rng = random.Random(59)
        for f in NONARCH:
            classes = square_class_group(f)
            for level in LEVELS:
                p = psi(f, level)
                for _ in range(5):
                    diag = [rng.choice(classes).rep_element() for _ in range(4)]
                    expect = gamma_of_diag(f, diag, p).value()
                    got = gamma_oracle(f, diag, p)
                    assert abs(got - expect) < 1e-6

    def test_real_fresnel(self):
        p = psi(R)
        assert abs(gamma_oracle(R, [R(1)], p) - cmath.exp(1j * cmath.pi / 4)) < 1e-12
        assert abs(gamma_oracle(R, [R(1), R(1)], p) - 1j) < 1e-12
        assert gamma_of_diag(R, [R(1), R(1)], p) == FourthRoot(1)
        assert gamma_of_diag(R, [R(1), R(-1)], p) == FourthRoot(0)

    def test_hyperbolic_is_one(self):
        for f in (Q3, Q5, F3T):
            for level in LEVELS:
                got = gamma_oracle(f, [f(1), f(-1)], psi(f, level))
                assert abs(got - 1) < 1e-9


class TestRawOracle:
    def test_matches_factored_on_diagonals(self):
        for f, diag in ((Q3, [1, 2]), (Q3, [1, 3]), (Q2, [1, 1])):
            for level in (0, 1):
                p = psi(f, level)
                gram = [[diag[0], 0], [0, diag[1]]]
                raw = gamma_oracle_raw(f, gram, p, depth=3)
                fac = gamma_oracle(f, [f(a) for a in diag], p)
                assert abs(raw - fac) < 1e-9

    def test_isometry_invariance(self):
        f = Q3
        p = psi(f, 0)
        hyperbolic = [[0, 1], [1, 0]]
        raw = gamma_oracle_raw(f, hyperbolic, p, depth=3)
        assert abs(raw - 1) < 1e-9
        # congruent Gram matrices give the same phase
        split_diag = [[2, 0], [0, -2]]
        raw2 = gamma_oracle_raw(f, split_diag, p, depth=3)
        assert abs(raw - raw2) < 1e-9

    def test_laurent_raw(self):
        f = parse_field("Fq((t)):3", precision=8)
        p = psi(f, 0)
        raw = gamma_oracle_raw(f, [[1, 0], [0, -1]], p, depth=2)
        assert abs(raw - 1) < 1e-9


class TestVirtualEpsilon:
    def test_pair_decomposition(self):
        for f in (Q3, Q2):
            for c in square_class_group(f):
                for bit in (0, 1):
                    pair = BrauerPair(c, bit)
                    for level in (0, 1):
                        p = psi(f, level)
                        expect = eps_quadratic(c, p).times_sign(bit)
                        assert eps_virtual(pair, p) == expect
                        assert weil_index(pair, p) == expect

    def test_weil_index_of_wall_difference(self):
        # the virtual epsilon of a difference of pairs is exactly the ratio
        # of the two indices: the cocycle cup term from the product cancels
        # against the cup(d2, d2) bit the negation law introduces
        for f in (Q3, Q5, Q2):
            p = psi(f, 0)
            classes = square_class_group(f)
            rng = random.Random(61)
            for _ in range(5):
                d1 = [rng.choice(classes).rep_element() for _ in range(4)]
                d2 = [rng.choice(classes).rep_element() for _ in range(4)]
                w1, w2 = wall_pair(f, d1), wall_pair(f, d2)
                ratio = gamma_of_diag(f, d1, p) / gamma_of_diag(f, d2, p)
                assert eps_virtual(w1 - w2, p) == ratio
