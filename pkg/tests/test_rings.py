from __future__ import annotations

from fractions import Fraction
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diagmod.errors import InvalidRing, NoCanonicalMap
from diagmod.rings import Ring, canonical_map, factorize, has_canonical_map, prime_factors

Z = Ring.integers()
PRIMES = [2, 3, 5, 7]


def brute_force_map_exists(src: Ring, dst: Ring) -> bool:
    """Search for a unital ring map between quotient rings by enumeration.

    Both rings are finite here: ``Z[S^-1]/(n)`` with ``S`` prime to ``n`` is
    ``Z/n``.  A unital map sends 1 to 1, so it exists iff ``m * 1 == 0`` in
    the target and every inverted prime of the source is a unit there.
    """
    m, n = src.modulus, dst.modulus
    if n == 1:
        return True
    if m % n:
        return False
    return all(any(p * x % n == 1 for x in range(n)) for p in src.inverted)


@st.composite
def finite_rings(draw):
    n = draw(st.integers(1, 36))
    inv = [p for p in draw(st.sets(st.sampled_from(PRIMES), max_size=2)) if n % p]
    return Ring.quotient(n, inv)


class TestRing:
    def test_str_forms(self):
        assert str(Z) == "Z"
        assert str(Ring.rationals()) == "Q"
        assert str(Ring.localization(3, 2)) == "Z[1/2,1/3]"
        assert str(Ring.quotient(3, [2])) == "Z[1/2]/(3)"

    def test_modulus_sharing_inverted_prime_rejected(self):
        with pytest.raises(InvalidRing):
            Ring.quotient(4, [2])

    def test_non_prime_inverted_rejected(self):
        with pytest.raises(InvalidRing):
            Ring.localization(6)

    def test_element_normal_forms(self):
        R = Ring.quotient(3, [2])
        assert R.element(Fraction(1, 2)) == 2
        assert Ring.localization(2).element("3/4") == Fraction(3, 4)
        with pytest.raises(ValueError):
            Z.element(Fraction(1, 2))

    def test_zero_ring(self):
        R = Ring.quotient(1)
        assert R.is_zero and R.element(5) == 0 and R.inverts(7)

    def test_units(self):
        assert Ring.localization(2).is_unit(Fraction(4))
        assert not Ring.localization(2).is_unit(Fraction(6))
        assert Ring.quotient(4).is_unit(3) and not Ring.quotient(4).is_unit(2)

    def test_dict_round_trip(self):
        for R in (Z, Ring.rationals(), Ring.quotient(5, [2, 3])):
            assert Ring.from_dict(R.to_dict()) == R

    def test_factorize(self):
        assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
        assert prime_factors(1) == []


class TestCanonicalMaps:
    def test_z_to_z4(self):
        assert has_canonical_map(Z, Ring.quotient(4))

    def test_localized_to_z4_fails(self):
        with pytest.raises(NoCanonicalMap):
            canonical_map(Ring.localization(2), Ring.quotient(4))

    def test_z12_to_localized_z4(self):
        src, dst = Ring.quotient(12), Ring.quotient(4, [3])
        assert has_canonical_map(src, dst)
        assert brute_force_map_exists(src, dst)

    def test_rationals_only_to_rationals_or_zero(self):
        Q = Ring.rationals()
        assert has_canonical_map(Q, Q) and has_canonical_map(Q, Ring.quotient(1))
        assert not has_canonical_map(Q, Ring.localization(2, 3, 5))

    def test_module_finite(self):
        assert canonical_map(Z, Ring.quotient(4)).is_module_finite
        assert not canonical_map(Z, Ring.localization(2)).is_module_finite
        assert canonical_map(Ring.localization(2), Ring.localization(2)).is_module_finite

    def test_composition(self):
        f = canonical_map(Z, Ring.quotient(12))
        g = canonical_map(Ring.quotient(12), Ring.quotient(4))
        assert f.then(g) == canonical_map(Z, Ring.quotient(4))

    def test_lift_through_inverse(self):
        f = canonical_map(Z, Ring.quotient(3, [2]))
        assert f(Fraction(1, 2)) == 2 and f.lift(2) == 2

    @given(finite_rings(), finite_rings())
    def test_matches_enumeration(self, src, dst):
        assert has_canonical_map(src, dst) == brute_force_map_exists(src, dst)

    @given(st.integers(1, 60), st.integers(1, 60))
    def test_plain_quotients_follow_divisibility(self, m, n):
        ok = has_canonical_map(Ring.quotient(m), Ring.quotient(n))
        assert ok == (m % n == 0)
        if ok:
            assert canonical_map(Ring.quotient(m), Ring.quotient(n))(m + 1) == 1 % n
