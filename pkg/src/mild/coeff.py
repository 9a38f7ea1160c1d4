"""Coefficient rings: exact arithmetic in Q and in Z_S.

Z_S is the subring of Q of fractions whose denominators only involve a
finite set S of primes (the localization of Z away from S); the paper's
standing hypothesis forces 2 in S.  Scalars are `fractions.Fraction`
values and all arithmetic is exact.  Each nonzero scalar of Z_S is a unit
multiple of a unique positive integer prime to S, its *canonical
associate*; canonical associates make gcds, SNF diagonals and torsion
invariants comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import RingError

#: Explicit symbol for rho(Q): every prime is invertible.
INFINITY = math.inf

Scalar = Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_from(start: int = 2):
    """Yield primes >= start in increasing order."""
    n = max(2, start)
    while True:
        if is_prime(n):
            yield n
        n += 1


def _strip_primes(n: int, primes: tuple[int, ...]) -> int:
    n = abs(n)
    for p in primes:
        while n and n % p == 0:
            n //= p
    return n


@dataclass(frozen=True)
class CoefficientRing:
    """Q (inverted_primes is None) or Z_S (a sorted tuple of primes with 2 in it)."""

    inverted_primes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.inverted_primes is None:
            return
        primes = tuple(sorted(set(self.inverted_primes)))
        for p in primes:
            if not is_prime(p):
                raise RingError(f"{p} is not prime")
        if 2 not in primes:
            raise RingError("Z_S must invert 2 (the ring has to contain 1/2)")
        object.__setattr__(self, "inverted_primes", primes)

    @classmethod
    def rationals(cls) -> "CoefficientRing":
        return cls(None)

    @classmethod
    def localized(cls, *primes: int) -> "CoefficientRing":
        return cls(tuple(primes))

    @property
    def is_field(self) -> bool:
        return self.inverted_primes is None

    @property
    def kind(self) -> str:
        return "rationals" if self.is_field else "localized-integers"

    def contains(self, x: Fraction) -> bool:
        """True iff x in R, i.e. the denominator only involves inverted primes."""
        if self.is_field:
            return True
        return _strip_primes(x.denominator, self.inverted_primes) == 1

    def check(self, x: Fraction) -> Fraction:
        if not self.contains(x):
            raise RingError(f"{x} is not an element of {self}")
        return x

    def rho(self):
        """Least non-invertible prime, or INFINITY for Q."""
        if self.is_field:
            return INFINITY
        for p in primes_from(2):
            if p not in self.inverted_primes:
                return p

    def is_invertible(self, x: Fraction) -> bool:
        if x == 0:
            return False
        if self.is_field:
            return True
        return _strip_primes(x.numerator, self.inverted_primes) == 1

    def canon(self, x: Fraction) -> Fraction:
        """Canonical associate: 0, or the positive S-free integer part of x.

        Over Q every nonzero scalar is a unit, so canon is 1.  Idempotent.
        """
        if x == 0:
            return Fraction(0)
        if self.is_field:
            return Fraction(1)
        self.check(x)
        return Fraction(_strip_primes(x.numerator, self.inverted_primes))

    def gcd(self, a: Fraction, b: Fraction) -> Fraction:
        """A canonical generator of the ideal (a, b)."""
        if a == 0 and b == 0:
            return Fraction(0)
        if self.is_field:
            return Fraction(1)
        ca, cb = self.canon(a), self.canon(b)
        return Fraction(math.gcd(int(ca), int(cb)))

    def divides(self, a: Fraction, b: Fraction) -> bool:
        """True iff a | b in R (everything divides 0; 0 only divides 0)."""
        if a == 0:
            return b == 0
        q = b / a
        return self.contains(q)

    def __str__(self) -> str:
        if self.is_field:
            return "Q"
        return "Z invert " + " ".join(str(p) for p in self.inverted_primes)

    def to_json(self) -> dict:
        if self.is_field:
            return {"kind": "rationals"}
        return {"kind": "localized-integers", "inverted_primes": list(self.inverted_primes)}


# Spec-facing operation names; thin wrappers over the ring methods.

def rho(ring: CoefficientRing):
    return ring.rho()


def is_invertible(x: Fraction, ring: CoefficientRing) -> bool:
    return ring.is_invertible(x)


def gcd_pid(a: Fraction, b: Fraction, ring: CoefficientRing) -> Fraction:
    return ring.gcd(a, b)


def canonical_associate(x: Fraction, ring: CoefficientRing) -> Fraction:
    return ring.canon(x)


def residue_mod(x: Fraction, d: int) -> int:
    """Canonical residue of x in R/(d) = Z/d (d a positive S-free integer).

    x = a/s with s an S-unit; s is invertible mod d, so the residue is
    a * s^{-1} mod d.
    """
    if d <= 0:
        raise ValueError("modulus must be a positive integer")
    a = x.numerator % d
    s = x.denominator % d
    return (a * pow(s, -1, d)) % d


def scalar_str(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str) -> Fraction:
    return Fraction(text)
