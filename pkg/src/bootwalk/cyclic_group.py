"""Prime-order cyclic group with real labels on its elements.

Every group of prime order p is isomorphic to Z_p, so elements are stored as
indices ``0..p-1`` and the group operation is index addition mod p.  Index 0
is the unit.  ``values[i]`` is the real increment attached to element ``i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import BadValues, NonPrimeP

Element = int


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for d in range(3, math.isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


def check_prime(p: int) -> int:
    if isinstance(p, bool) or int(p) != p or not is_prime(int(p)):
        raise NonPrimeP(f"p={p} is not prime")
    return int(p)


@dataclass(frozen=True)
class GroupSpec:
    p: int
    values: tuple

    def __post_init__(self):
        check_prime(self.p)
        if len(self.values) != self.p:
            raise BadValues(f"expected {self.p} values, got {len(self.values)}")
        if len(set(self.values)) != self.p:
            raise BadValues("values must be distinct")

    @property
    def unit(self) -> Element:
        return 0

    def element(self, i: int) -> Element:
        return i % self.p

    def value(self, a: Element) -> float:
        return self.values[a]

    def exact_values(self) -> list[Fraction]:
        """Values as exact rationals (floats convert without rounding)."""
        return [Fraction(v) for v in self.values]

    def is_rational(self) -> bool:
        return all(isinstance(v, Rational) for v in self.values)

    def integer_scaling(self) -> tuple[list[int], int]:
        """Return ``(ints, scale)`` with ``values[i] == ints[i] / scale`` exactly."""
        fr = self.exact_values()
        scale = math.lcm(*(f.denominator for f in fr))
        return [int(f * scale) for f in fr], scale

    @property
    def sigma2(self) -> float:
        return sigma2(self)


def make_group(p: int, values: Sequence) -> GroupSpec:
    p = check_prime(p)
    return GroupSpec(p, tuple(values))


def simple_group() -> GroupSpec:
    """The +/-1 walk: unit labelled +1, the other element -1."""
    return GroupSpec(2, (1, -1))


def op(a: Element, b: Element, spec: GroupSpec) -> Element:
    return (a + b) % spec.p


def inverse(a: Element, spec: GroupSpec) -> Element:
    return (-a) % spec.p


def power(a: Element, m: int, spec: GroupSpec) -> Element:
    """``a`` combined with itself ``m`` times; negative ``m`` allowed."""
    return (a * (m % spec.p)) % spec.p


def sigma2(spec: GroupSpec) -> float:
    return sum(float(v) ** 2 for v in spec.values) / spec.p


def sigma2_exact(spec: GroupSpec) -> Fraction:
    return sum(f * f for f in spec.exact_values()) / spec.p
