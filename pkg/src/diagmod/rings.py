"""The computable ring class Z[S^-1]/(n) and its canonical ring maps.

A ring is a localization of the integers at a finite prime set S (or at
every prime, giving Q), optionally reduced modulo an integer n coprime to S.
Elements are stored canonically:

* modulus 0 -- a :class:`fractions.Fraction` whose denominator is a product
  of primes in S;
* modulus n > 0 -- an ``int`` in ``range(n)`` (every prime of S is a unit
  mod n, so the ring is isomorphic to Z/n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from .errors import InvalidRing, NoCanonicalMap, NotModuleFinite

ALL = "ALL"

Scalar = Union[int, Fraction]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of |n| in increasing order (empty for 0, +-1)."""
    n = abs(n)
    out = []
    p = 2
    while n > 1 and p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime-power factorization of |n| as (prime, exponent) pairs."""
    n = abs(n)
    out = []
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def parse_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not ring elements")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


@dataclass(frozen=True)
class Ring:
    """Z[S^-1]/(n); ``inverted`` is a frozenset of primes or :data:`ALL`."""

    inverted: frozenset | str = frozenset()
    modulus: int = 0

    def __post_init__(self):
        inv = self.inverted
        if inv != ALL:
            inv = frozenset(int(p) for p in inv)
            object.__setattr__(self, "inverted", inv)
            for p in inv:
                if not is_prime(p):
                    raise InvalidRing(f"{p} is not a prime")
        n = self.modulus
        if not isinstance(n, int) or n < 0:
            raise InvalidRing(f"modulus must be a nonnegative integer, got {n!r}")
        if inv == ALL:
            if n not in (0, 1):
                raise InvalidRing("the rationals admit only modulus 0 or 1")
        else:
            bad = [p for p in prime_factors(n) if p in inv]
            if bad:
                raise InvalidRing(f"modulus {n} shares primes {bad} with the inverted set")

    # -- constructors -------------------------------------------------
    @classmethod
    def integers(cls) -> "Ring":
        return cls(frozenset(), 0)

    @classmethod
    def rationals(cls) -> "Ring":
        return cls(ALL, 0)

    @classmethod
    def localization(cls, *primes: int) -> "Ring":
        return cls(frozenset(primes), 0)

    @classmethod
    def quotient(cls, n: int, inverted=()) -> "Ring":
        return cls(frozenset(inverted), n)

    # -- structure ----------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.inverted == ALL

    @property
    def is_zero(self) -> bool:
        return self.modulus == 1

    @property
    def is_domain_form(self) -> bool:
        return self.modulus == 0

    @cached_property
    def domain(self) -> "Ring":
        """The localization covering this ring (itself when modulus is 0)."""
        return Ring(self.inverted, 0)

    def inverts(self, p: int) -> bool:
        """Whether the prime ``p`` is a unit here."""
        if self.is_rational or self.is_zero:
            return True
        if p in self.inverted:
            return True
        return self.modulus > 0 and math.gcd(p, self.modulus) == 1

    def s_free(self, m: int) -> int:
        """|m| with every prime of S removed (0 stays 0)."""
        m = abs(int(m))
        if m == 0:
            return 0
        if self.is_rational:
            return 1
        for p in self.inverted:
            while m % p == 0:
                m //= p
        return m

    def is_s_smooth(self, m: int) -> bool:
        return m != 0 and self.s_free(m) == 1

    # -- elements -----------------------------------------------------
    def contains(self, x: Scalar) -> bool:
        """Whether the rational ``x`` lies in the covering localization."""
        x = parse_scalar(x)
        return self.is_s_smooth(x.denominator)

    def element(self, x) -> Scalar:
        """Canonical form of ``x`` (an int, Fraction or ``'p/q'`` string)."""
        x = parse_scalar(x)
        if self.modulus == 0:
            if not self.contains(x):
                raise ValueError(f"{x} does not lie in {self}")
            return x
        n = self.modulus
        if n == 1:
            return 0
        den = x.denominator
        if math.gcd(den, n) != 1:
            raise ValueError(f"{x} has a denominator that is not a unit in {self}")
        return (x.numerator * pow(den, -1, n)) % n

    def zero(self) -> Scalar:
        return Fraction(0) if self.modulus == 0 else 0

    def one(self) -> Scalar:
        return self.element(1)

    def lift(self, x: Scalar) -> Fraction:
        """Lift a canonical element to the covering localization."""
        return Fraction(x)

    def is_unit(self, x: Scalar) -> bool:
        if self.modulus > 0:
            return math.gcd(int(x), self.modulus) == 1
        x = Fraction(x)
        if x == 0:
            return False
        return self.s_free(x.numerator) == 1

    # -- Euclidean structure of the covering localization ---------------
    def norm(self, x: Fraction) -> int:
        """Euclidean norm on the localization: S-free part of the numerator."""
        return self.s_free(Fraction(x).numerator)

    def unit_part(self, x: Fraction) -> Fraction:
        """The unit u with x = u * norm(x); requires x != 0."""
        x = Fraction(x)
        return x / self.norm(x)

    def quo(self, y: Fraction, x: Fraction) -> Fraction:
        """A quotient q with norm(y - q x) < norm(x)."""
        if self.is_rational:
            return Fraction(y) / Fraction(x)
        if y == 0:
            return Fraction(0)
        ux, mx = self.unit_part(x), self.norm(x)
        uy, my = self.unit_part(y), self.norm(y)
        return uy * (my // mx) / ux

    def divides(self, x: Fraction, y: Fraction) -> bool:
        """x | y in the localization."""
        if x == 0:
            return y == 0
        return self.contains(Fraction(y) / Fraction(x))

    # -- presentation -------------------------------------------------
    def __str__(self) -> str:
        if self.is_rational:
            base = "Q"
        elif self.inverted:
            base = "Z[" + ",".join(f"1/{p}" for p in sorted(self.inverted)) + "]"
        else:
            base = "Z"
        return base if self.modulus == 0 else f"{base}/({self.modulus})"

    def format(self, x: Scalar) -> str:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def to_dict(self) -> dict:
        inv = ALL if self.is_rational else sorted(self.inverted)
        return {"inverted": inv, "modulus": self.modulus}

    @classmethod
    def from_dict(cls, data: dict) -> "Ring":
        inv = data.get("inverted", [])
        if isinstance(inv, str):
            if inv.upper() != ALL:
                raise InvalidRing(f"unknown inverted marker {inv!r}")
            inv = ALL
        else:
            inv = frozenset(inv)
        return cls(inv, int(data.get("modulus", 0)))


def _map_clause_failure(src: Ring, dst: Ring) -> str | None:
    if src.is_rational:
        if not (dst.is_rational or dst.is_zero):
            return f"every prime is inverted in {src} but not in {dst}"
    else:
        for p in sorted(src.inverted):
            if not dst.inverts(p):
                return f"{p} is inverted in {src} but is not a unit in {dst}"
    if src.modulus > 0:
        free = dst.s_free(src.modulus)
        ok = free == 0 if dst.modulus == 0 else free % dst.modulus == 0
        if not ok:
            return (f"{src.modulus} (S-free part {free}) does not vanish in {dst}")
    return None


@dataclass(frozen=True)
class RingMap:
    """The unique unital map between two rings of the class, when it exists."""

    source: Ring
    target: Ring

    def __post_init__(self):
        why = _map_clause_failure(self.source, self.target)
        if why is not None:
            raise NoCanonicalMap(f"no ring map {self.source} -> {self.target}: {why}")

    def __call__(self, x: Scalar) -> Scalar:
        return self.target.element(Fraction(x))

    @property
    def is_identity(self) -> bool:
        return self.source == self.target

    @property
    def is_module_finite(self) -> bool:
        t, s = self.target, self.source
        return t.modulus > 0 or t.inverted == s.inverted

    @property
    def is_flat_localization(self) -> bool:
        """Both ends are localizations of Z (modulus 0)."""
        return self.source.modulus == 0 and self.target.modulus == 0

    def lift(self, y: Scalar) -> Scalar:
        """A preimage of ``y``; module-finite maps here are surjective."""
        if not self.is_module_finite:
            raise NotModuleFinite(f"{self.source} -> {self.target} is not module-finite")
        if self.target.modulus == 0:
            return self.source.element(y)
        return self.source.element(int(y))

    def then(self, other: "RingMap") -> "RingMap":
        if other.source != self.target:
            raise ValueError("ring maps are not composable")
        return RingMap(self.source, other.target)

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


def canonical_map(src: Ring, dst: Ring) -> RingMap:
    return RingMap(src, dst)


def has_canonical_map(src: Ring, dst: Ring) -> bool:
    return _map_clause_failure(src, dst) is None
