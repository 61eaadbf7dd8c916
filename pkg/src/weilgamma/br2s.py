"""Pairs (square class, bit) under the cup-twisted group law.

The pair group packages a discriminant-style square class together with a
Brauer-style bit.  Addition twists the bits by the Hilbert pairing of the
two classes, which is exactly the failure of the naive componentwise sum to
respect direct sums of quadratic forms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .localfield import SquareClass, hilbert_bit, square_class_one


@dataclass(frozen=True)
class BrauerPair:
    """An element (cls, bit) of the cup-twisted extension of F2 by F*/squares."""

    cls: SquareClass
    bit: int

    def __post_init__(self):
        assert self.bit in (0, 1)

    @property
    def field(self):
        return self.cls.field

    def __add__(self, other):
        assert isinstance(other, BrauerPair) and other.field == self.field
        return BrauerPair(self.cls * other.cls,
                          self.bit ^ other.bit ^ hilbert_bit(self.cls, other.cls))

    def __neg__(self):
        return BrauerPair(self.cls, self.bit ^ hilbert_bit(self.cls, self.cls))

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return self.cls.is_one() and self.bit == 0

    def __repr__(self):
        return f"BrauerPair({self.cls.label()}, {self.bit})"


def pair_zero(field):
    return BrauerPair(square_class_one(field), 0)


def pair_sum(pairs, field):
    total = pair_zero(field)
    for p in pairs:
        total = total + p
    return total


def pair_from_class(cls, bit=0):
    return BrauerPair(cls, bit)


def all_pairs(field):
    """Every pair over the field, in a deterministic order."""
    from .localfield import square_class_group

    return [BrauerPair(c, b) for c in square_class_group(field) for b in (0, 1)]
