"""Tests for ground fields, tracked-precision elements and Hilbert symbols."""

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weilgamma.errors import InsufficientPrecision, UnsupportedField
from weilgamma.localfield import (
    AdditiveCharacter,
    FieldElem,
    GroundField,
    chi_eval,
    hilbert,
    hilbert_bit,
    is_norm_bruteforce,
    parse_field,
    psi_eval,
    square_class,
    square_class_basis,
    square_class_coords,
    square_class_group,
    square_class_one,
)

R = parse_field("R")
C = parse_field("C")
Q2 = parse_field("Qp:2")
Q3 = parse_field("Qp:3")
Q5 = parse_field("Qp:5")
Q7 = parse_field("Qp:7")
F3T = parse_field("Fq((t)):3")
F5T = parse_field("Fq((t)):5")

ALL_FIELDS = [R, C, Q2, Q3, Q5, Q7, F3T, F5T]
NONARCH = [Q2, Q3, Q5, Q7, F3T, F5T]


class TestParsing:
    def test_roundtrip(self):
        for f in ALL_FIELDS:
            assert parse_field(f.descriptor, precision=48) == f

    def test_bad_descriptor(self):
        with pytest.raises(UnsupportedField):
            parse_field("Zp:5")
        with pytest.raises(UnsupportedField):
            parse_field("Qp:6")
        with pytest.raises(UnsupportedField):
            parse_field("Fq((t)):2")

    def test_precision_floor(self):
        with pytest.raises(InsufficientPrecision):
            GroundField("padic", 5, precision=4)
        assert GroundField("padic", 5, precision=8).precision == 8

    def test_archimedean_flags(self):
        assert R.is_archimedean and C.is_archimedean
        assert not Q5.is_archimedean
        assert F3T.char == 3 and Q3.char == 0


class TestPadicArithmetic:
    def test_integer_ring_ops(self):
        a, b = Q5(37), Q5(-14)
        assert a + b == 23
        assert a * b == -518
        assert a - a == 0
        assert (a / b) * b == a

    def test_fraction_embedding(self):
        x = Q7(Fraction(3, 7))
        assert x.valuation() == -1
        assert x * 7 == 3

    def test_valuation_and_units(self):
        x = Q5(250)  # 2 * 5^3
        assert x.valuation() == 3
        assert x.unit_residue(1) == 2

    def test_cancellation_tracks_precision(self):
        a = Q5(1 + 5 ** 10)
        diff = a - Q5(1)
        assert diff.valuation() == 10
        assert diff.rel_prec() == Q5.precision - 10

    def test_inexact_zero(self):
        a = Q5(Fraction(1, 3))
        z = a - a
        assert z.is_zero() and not z.is_exact_zero()
        assert z.abs_prec() == Q5.precision
        with pytest.raises(InsufficientPrecision):
            z.valuation()
        with pytest.raises(InsufficientPrecision):
            z.inverse()

    def test_exact_zero(self):
        z = Q5.zero()
        assert z.is_exact_zero()
        assert z.valuation() == float("inf")
        assert (z * Q5(7)).is_exact_zero()
        with pytest.raises(ZeroDivisionError):
            Q5(1) / z

    def test_shift(self):
        x = Q3(2)
        assert x.shift(4) == 2 * 81
        assert x.shift(-1) * 3 == 2

    @given(st.integers(-400, 400), st.integers(-400, 400))
    def test_ring_axioms_via_int_model(self, m, n):
        a, b = Q3(m), Q3(n)
        assert a + b == m + n
        assert a * b == m * n


class TestLaurentArithmetic:
    def test_basic_ops(self):
        t = F3T.uniformizer()
        x = F3T(1) + t
        y = F3T(2) + t * t
        s = x + y  # 3 + t + t^2 collapses to t + t^2 in characteristic 3
        assert s.valuation() == 1
        assert s.unit_residue(3) == (1, 1, 0)
        assert (x * y) == F3T(2) + t * 2 + t * t + t * t * t

    def test_inverse_series(self):
        t = F5T.uniformizer()
        x = F5T(3) + t * 2 + t * t * t
        assert (x * x.inverse()) == 1
        assert (F5T(1) / (F5T(1) - t)) * (F5T(1) - t) == 1

    def test_geometric_series_digits(self):
        t = F3T.uniformizer()
        inv = (F3T(1) - t).inverse()
        assert inv.unit_residue(5) == (1, 1, 1, 1, 1)

    def test_valuation(self):
        t = F3T.uniformizer()
        x = t * t * 2
        assert x.valuation() == 2
        assert (x / t).valuation() == 1

    def test_char_p_collapses_integers(self):
        assert F3T(3).is_exact_zero()
        assert F3T(5) == F3T(2)
        with pytest.raises(UnsupportedField):
            F3T(Fraction(1, 3))

    def test_cancellation(self):
        t = F5T.uniformizer()
        x = F5T(1) + t
        z = x - x
        assert z.is_zero() and not z.is_exact_zero()


class TestArchimedean:
    def test_real_exact(self):
        x = R(Fraction(2, 3))
        assert (x * 3).as_fraction() == 2
        assert (x - x).is_exact_zero()

    def test_complex_ops(self):
        i = FieldElem(C, re=Fraction(0), im=Fraction(1))
        assert (i * i) == -1
        assert (i.inverse() * i) == 1
        assert abs((i + 1).as_complex() - (1 + 1j)) == 0


class TestSquareClasses:
    def test_group_sizes(self):
        assert len(square_class_group(C)) == 1
        assert len(square_class_group(R)) == 2
        assert len(square_class_group(Q2)) == 8
        for f in (Q3, Q5, Q7, F3T, F5T):
            assert len(square_class_group(f)) == 4

    def test_known_classes(self):
        assert square_class(Q5(4)).is_one()
        assert square_class(Q5(2)).label() == "u"
        assert square_class(Q5(5)).label() == "p"
        assert square_class(Q2(-1)).ucode == 7
        assert square_class(Q2(-5)).ucode == 3
        assert square_class(Q2(17)).is_one()
        assert square_class(R(-3)).label() == "-1"
        t = F3T.uniformizer()
        assert square_class(t).vbit == 1
        assert square_class(t * 2).label() == "u*t"

    def test_representatives_are_faithful(self):
        for f in ALL_FIELDS:
            for c in square_class_group(f):
                assert square_class(c.rep_element()) == c

    def test_group_law_matches_multiplication(self):
        for f in ALL_FIELDS:
            for c1 in square_class_group(f):
                for c2 in square_class_group(f):
                    prod = square_class(c1.rep_element() * c2.rep_element())
                    assert prod == c1 * c2

    def test_two_torsion(self):
        for f in ALL_FIELDS:
            for c in square_class_group(f):
                assert (c * c).is_one()
                assert c.inverse() == c

    def test_squares_are_trivial(self):
        for n in (3, 10, 49, 242):
            assert square_class(Q7(n * n)).is_one()
            assert square_class(Q2(n * n)).is_one()

    def test_coords_match_basis(self):
        for f in ALL_FIELDS:
            basis = square_class_basis(f)
            for c in square_class_group(f):
                acc = square_class_one(f)
                for bit, g in zip(square_class_coords(c), basis):
                    if bit:
                        acc = acc * g
                assert acc == c

    def test_low_precision_class_raises(self):
        x = FieldElem(Q2, v=0, u=3, prec=2)
        with pytest.raises(InsufficientPrecision):
            square_class(x)
        with pytest.raises(InsufficientPrecision):
            square_class(Q5(1) - Q5(1))


class TestHilbertSymbol:
    def test_against_norm_equation_bruteforce(self):
        for f in (R, Q2, Q3, Q5, Q7, F3T, F5T):
            for a in square_class_group(f):
                for b in square_class_group(f):
                    expect = is_norm_bruteforce(a, b)
                    got = hilbert(a, b) == 1
                    assert got == expect, (f.descriptor, a.label(), b.label())

    def test_symmetry_and_bilinearity(self):
        for f in (R, Q2, Q3, Q5, F3T):
            grp = square_class_group(f)
            for a in grp:
                for b in grp:
                    assert hilbert(a, b) == hilbert(b, a)
                    for c in grp:
                        assert hilbert_bit(a, b * c) == (
                            hilbert_bit(a, b) ^ hilbert_bit(a, c))

    def test_a_minus_a(self):
        minus_one = {
            R: square_class(R(-1)), Q2: square_class(Q2(-1)),
            Q3: square_class(Q3(-1)), Q5: square_class(Q5(-1)),
            Q7: square_class(Q7(-1)), F3T: square_class(F3T(-1)),
            F5T: square_class(F5T(-1)),
        }
        for f, m1 in minus_one.items():
            for a in square_class_group(f):
                assert hilbert(a, m1 * a) == 1

    def test_classical_values(self):
        assert hilbert(square_class(R(-1)), square_class(R(-1))) == -1
        assert hilbert(square_class(Q2(-1)), square_class(Q2(-1))) == -1
        assert hilbert(square_class(Q2(2)), square_class(Q2(-1))) == 1
        assert hilbert(square_class(Q3(3)), square_class(Q3(3))) == -1
        assert hilbert(square_class(Q5(5)), square_class(Q5(5))) == 1
        assert hilbert(square_class(Q3(3)), square_class(Q3(-1))) == -1

    def test_nondegeneracy(self):
        # each nontrivial class is detected by some symbol partner
        for f in (R, Q2, Q3, Q5, Q7, F3T, F5T):
            for a in square_class_group(f):
                if a.is_one():
                    continue
                assert any(hilbert(a, b) == -1 for b in square_class_group(f))

    def test_chi_eval_multiplicative(self):
        d = square_class(Q5(10))
        for m in (2, 3, 7, 10, 45):
            for n in (1, 5, 6, 14):
                lhs = chi_eval(d, Q5(m * n))
                rhs = chi_eval(d, Q5(m)) * chi_eval(d, Q5(n))
                assert lhs == rhs


class TestAdditiveCharacters:
    def test_trivial_on_integers_at_level_zero(self):
        psi = AdditiveCharacter(Q5, level=0)
        for n in (0, 1, 7, 625):
            assert psi_eval(psi, Q5(n)) == pytest.approx(1.0)

    def test_standard_value(self):
        psi = AdditiveCharacter(Q5, level=0)
        got = psi_eval(psi, Q5(Fraction(1, 5)))
        assert got == pytest.approx(cmath.exp(2j * cmath.pi / 5))
        got2 = psi_eval(psi, Q5(Fraction(2, 25)))
        assert got2 == pytest.approx(cmath.exp(2j * cmath.pi * 2 / 25))

    def test_level_shift(self):
        psi0 = AdditiveCharacter(Q3, level=0)
        psi2 = AdditiveCharacter(Q3, level=2)
        for x in (Q3(1), Q3(2), Q3(Fraction(4, 3))):
            assert psi_eval(psi2, x) == pytest.approx(psi_eval(psi0, x.shift(-2)))

    @given(st.integers(-300, 300), st.sampled_from([1, 5, 25, 125]))
    @settings(max_examples=60)
    def test_additivity_padic(self, num, den):
        psi = AdditiveCharacter(Q5, level=0)
        x, y = Q5(Fraction(num, den)), Q5(Fraction(3, 25))
        lhs = psi_eval(psi, x + y)
        rhs = psi_eval(psi, x) * psi_eval(psi, y)
        assert lhs == pytest.approx(rhs)

    def test_laurent_residue_digit(self):
        psi = AdditiveCharacter(F3T, level=0)
        t = F3T.uniformizer()
        assert psi_eval(psi, t.inverse()) == pytest.approx(cmath.exp(2j * cmath.pi / 3))
        assert psi_eval(psi, (t * t).inverse()) == pytest.approx(1.0)
        assert psi_eval(psi, F3T(2)) == pytest.approx(1.0)

    def test_real_character(self):
        psi = AdditiveCharacter(R, sign=1)
        assert psi_eval(psi, R(Fraction(1, 4))) == pytest.approx(1j)
        assert psi_eval(psi.conjugate(), R(Fraction(1, 4))) == pytest.approx(-1j)

    def test_precision_guard(self):
        psi = AdditiveCharacter(Q5, level=1)
        z = Q5(1) - Q5(1)  # O(5^48), fine at level 1
        assert psi_eval(psi, z) == pytest.approx(1.0)
        shallow = FieldElem(Q5, v=0, u=None)  # O(5^0)
        with pytest.raises(InsufficientPrecision):
            psi_eval(psi, shallow)
