import math
from fractions import Fraction

import pytest

from mild.coeff import (
    INFINITY,
    CoefficientRing,
    canonical_associate,
    gcd_pid,
    is_invertible,
    residue_mod,
    rho,
)
from mild.errors import RingError

Q = CoefficientRing.rationals()
Z2 = CoefficientRing.localized(2)
Z235 = CoefficientRing.localized(2, 3, 5)


def test_rho():
    assert rho(Q) == INFINITY
    assert rho(Z2) == 3
    assert rho(CoefficientRing.localized(2, 3, 5, 7)) == 11


def test_ring_validation():
    with pytest.raises(RingError):
        CoefficientRing.localized(3)  # 2 must be inverted
    with pytest.raises(RingError):
        CoefficientRing.localized(2, 4)
    # duplicates and order normalize away
    assert CoefficientRing.localized(3, 2, 3).inverted_primes == (2, 3)


def test_membership():
    assert Z2.contains(Fraction(7, 8))
    assert not Z2.contains(Fraction(1, 3))
    assert Q.contains(Fraction(1, 3))


def test_is_invertible():
    assert is_invertible(Fraction(1, 2), Z2)
    assert not is_invertible(Fraction(3), Z2)
    assert not is_invertible(Fraction(0), Z2)
    assert not is_invertible(Fraction(0), Q)
    assert is_invertible(Fraction(-4), Z2)


def _gcd_oracle(a, b, ring):
    # factor the canonical parts and take the common prime power content
    ca, cb = int(ring.canon(a)), int(ring.canon(b))
    return Fraction(math.gcd(ca, cb))


def test_gcd_examples():
    assert gcd_pid(Fraction(6), Fraction(4), Z2) == 1
    assert gcd_pid(Fraction(3), Fraction(9), Z2) == 3
    assert gcd_pid(Fraction(0), Fraction(0), Z2) == 0
    assert gcd_pid(Fraction(5), Fraction(7), Q) == 1


def test_gcd_properties():
    vals = [Fraction(n, d) for n in range(-6, 7) for d in (1, 2, 4) if n]
    for a in vals:
        for b in vals:
            g = gcd_pid(a, b, Z2)
            assert g == _gcd_oracle(a, b, Z2)
            assert Z2.divides(g, a) and Z2.divides(g, b)
            assert g == gcd_pid(b, a, Z2)


def test_canon_idempotent():
    for x in [Fraction(6), Fraction(-9, 2), Fraction(0), Fraction(40, 16)]:
        c = canonical_associate(x, Z2)
        assert canonical_associate(c, Z2) == c
    assert canonical_associate(Fraction(-12), Z2) == 3
    assert canonical_associate(Fraction(7, 5), Z235) == 7


def test_invertible_iff_unit_canonical_associate():
    # the generator of the principal ideal (x) is the canonical unit exactly
    # for invertible x; gcd against 0 extracts that generator
    for x in [Fraction(0), Fraction(2), Fraction(3), Fraction(1, 4), Fraction(-6)]:
        lhs = is_invertible(x, Z2)
        rhs = x != 0 and gcd_pid(x, Fraction(0), Z2) == 1
        assert lhs == rhs


def test_residue_mod():
    assert residue_mod(Fraction(7), 3) == 1
    assert residue_mod(Fraction(1, 2), 3) == 2  # 1/2 = 2 mod 3
    assert residue_mod(Fraction(-1, 4), 9) == 2  # 4*2 = 8 = -1 mod 9
