from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagmod.complexes import (
    ChainComplex,
    ChainMap,
    cone,
    derived_base_change,
    direct_sum,
    free_resolution,
    homology,
    homology_table,
    is_cofibration,
    is_fibration,
    is_quasi_iso,
    shift,
    tor,
)
from diagmod.errors import ComplexError
from diagmod.linalg import Matrix
from diagmod.modules import FPModule
from diagmod.rings import Ring, canonical_map
from generators import random_complex, scalar_map

Z = Ring.integers()
Z4 = Ring.quotient(4)


def two_term(ring: Ring, k) -> ChainComplex:
    """``ring --k--> ring`` in degrees 1 and 0."""
    return ChainComplex.free(ring, {0: 1, 1: 1}, {1: Matrix(1, 1, [[k]])})


def inv(C: ChainComplex, n: int):
    return homology(C, n).invariants()


class TestHomology:
    def test_multiplication_by_two(self):
        C = two_term(Z, 2)
        assert inv(C, 0) == (0, (2,)) and inv(C, 1) == (0, ())

    def test_sphere(self):
        C = ChainComplex.sphere(Z, 3)
        assert homology_table(C) == {2: (0, ()), 3: (1, ()), 4: (0, ())}

    def test_over_z4(self):
        C = two_term(Z4, 2)
        assert inv(C, 0) == (0, (2,)) and inv(C, 1) == (0, (2,))

    def test_d_squared_checked(self):
        with pytest.raises(ComplexError):
            ChainComplex.free(Z, {0: 1, 1: 1, 2: 1}, {1: Matrix(1, 1, [[1]]), 2: Matrix(1, 1, [[1]])})

    def test_d_squared_modulo_relations(self):
        C = ChainComplex.free(Z4, {0: 1, 1: 1, 2: 1}, {1: Matrix(1, 1, [[2]]), 2: Matrix(1, 1, [[2]])})
        assert [inv(C, n) for n in (0, 1, 2)] == [(0, (2,)), (0, ()), (0, (2,))]

    @settings(max_examples=40)
    @given(st.integers(0, 10_000), st.integers(-3, 3), st.sampled_from([Z, Z4, Ring.localization(2)]))
    def test_shift(self, seed, k, ring):
        C = random_complex(random.Random(seed), ring)
        for n in range(C.lo - 1, C.hi + 2):
            assert inv(shift(C, k), n + k) == inv(C, n)


class TestCone:
    def test_identity_cone_acyclic(self):
        S = ChainComplex.sphere(Z, 0)
        assert cone(ChainMap.identity(S)).is_acyclic()

    def test_cone_of_zero_source(self):
        C = two_term(Z, 3)
        K = cone(ChainMap.zero(ChainComplex.zero(Z), C))
        assert homology_table(K) == homology_table(C)

    def test_cone_of_two(self):
        S = ChainComplex.sphere(Z, 0)
        K = cone(scalar_map(S, 2))
        assert inv(K, 0) == (0, (2,)) and inv(K, 1) == (0, ())

    def test_cone_of_reduction(self):
        # Z -> Z/4 is not a quasi-isomorphism: the cone keeps the kernel 4Z in degree 1.
        S = ChainComplex.sphere(Z, 0)
        T = ChainComplex.concentrated(FPModule.cyclic(Z, 4))
        K = cone(ChainMap(S, T, {0: Matrix.identity(1)}))
        assert inv(K, 1) == (1, ()) and inv(K, 0) == (0, ())

    @settings(max_examples=60)
    @given(st.integers(0, 10_000), st.sampled_from([Z, Ring.localization(3)]), st.integers(-3, 3))
    def test_euler_characteristic_ranks(self, seed, ring, k):
        C = random_complex(random.Random(seed), ring)
        f = scalar_map(C, k)

        def chi(D):
            return sum((-1) ** n * r for n, (r, _) in homology_table(D, range(-2, 6)).items())

        assert chi(cone(f)) == chi(C) - chi(C)

    @settings(max_examples=60)
    @given(st.integers(0, 10_000), st.sampled_from([Z4, Ring.quotient(12), Ring.quotient(9, [2])]), st.integers(-3, 3))
    def test_euler_characteristic_lengths(self, seed, ring, k):
        C = random_complex(random.Random(seed), ring)
        f = scalar_map(C, k)

        def chi(D):
            out = Fraction(1)
            for n, (_, factors) in homology_table(D, range(-2, 6)).items():
                order = 1
                for d in factors:
                    order *= d
                out *= Fraction(order) ** (-1) ** n
            return out

        assert chi(cone(f)) == chi(C) / chi(C)


class TestModelStructure:
    def test_identity_is_quasi_iso(self):
        C = two_term(Z, 6)
        assert is_quasi_iso(ChainMap.identity(C))

    def test_resolution_augmentation(self):
        res = free_resolution(FPModule.cyclic(Z, 2), 3)
        assert is_quasi_iso(res.augmentation)

    def test_zero_map_not_quasi_iso(self):
        S = ChainComplex.sphere(Z, 0)
        assert not is_quasi_iso(ChainMap.zero(S, S))

    def test_to_zero_is_fibration(self):
        C = two_term(Z, 2)
        assert is_fibration(ChainMap.zero(C, ChainComplex.zero(Z)))

    def test_from_zero_is_cofibration(self):
        C = two_term(Z, 2)
        assert is_cofibration(ChainMap.zero(ChainComplex.zero(Z), C))

    def test_times_two_neither(self):
        f = scalar_map(ChainComplex.sphere(Z, 0), 2)
        assert not is_fibration(f) and not is_cofibration(f)

    def test_sphere_into_disk_cofibration(self):
        S, D = ChainComplex.sphere(Z, 0), ChainComplex.disk(Z, 1)
        assert is_cofibration(ChainMap(S, D, {0: Matrix.identity(1)}))


class TestResolutions:
    def test_pid_two_term(self):
        res = free_resolution(FPModule.cyclic(Z, 2), 4)
        F = res.complex
        assert (F.lo, F.hi) == (0, 1) and F.d(1) == Matrix(1, 1, [[2]])

    def test_periodic_over_z4(self):
        res = free_resolution(FPModule.cyclic(Z4, 2), 3)
        F = res.complex
        assert (F.lo, F.hi) == (0, 3)
        assert all(F.d(k) == Matrix(1, 1, [[2]]) for k in (1, 2, 3))
        assert res.valid_through == 2

    def test_free_module(self):
        F = free_resolution(FPModule.free(Z, 2), 3).complex
        assert (F.lo, F.hi) == (0, 0) and F.ngens(0) == 2

    def test_tor_z2_z2(self):
        t = tor(FPModule.cyclic(Z, 2), canonical_map(Z, Ring.quotient(2)), 1)
        assert t.module.invariants() == (0, (2,))

    @given(st.lists(st.integers(2, 20), max_size=3), st.integers(1, 3))
    def test_tor_vanishes_along_localization(self, orders, i):
        M = FPModule.from_invariants(Z, 1, orders)
        assert tor(M, canonical_map(Z, Ring.localization(2, 5)), i).module.is_zero()

    def test_periodic_tor_over_z4(self):
        L = 5
        M = FPModule.cyclic(Z4, 2)
        f = canonical_map(Z4, Ring.quotient(2))
        for i in range(1, L):
            assert tor(M, f, i, L).module.invariants() == (0, (2,))

    def test_tor_outside_window(self):
        with pytest.raises(ValueError):
            tor(FPModule.cyclic(Z, 2), canonical_map(Z, Z4), 3, 3)

    @settings(max_examples=30)
    @given(st.lists(st.integers(2, 12), max_size=2), st.integers(0, 1))
    def test_derived_base_change_composite(self, orders, rank):
        M = FPModule.from_invariants(Z, rank, orders)
        f, g = canonical_map(Z, Ring.quotient(12)), canonical_map(Ring.quotient(12), Ring.quotient(4))
        L = 4
        Fz = free_resolution(M, L).complex
        direct = derived_base_change(Fz, f.then(g))
        two_step = derived_base_change(derived_base_change(Fz, f), g)
        for n in range(0, L - 1):
            assert inv(direct, n) == inv(two_step, n)

    def test_direct_sum(self):
        C = direct_sum(two_term(Z, 2), two_term(Z, 3))
        assert inv(C, 0) == (0, (6,))
