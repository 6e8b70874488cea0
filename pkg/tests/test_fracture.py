from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagmod.errors import InvalidSquare
from diagmod.fracture import (
    APEX,
    CORNER_P,
    CORNER_Q,
    LocalizationSquare,
    bezout_witness,
    fracture_reconstruct,
    hasse_pipeline,
    module_from_spec,
    primary_parts,
    truncation_oracle,
    verify_ring_pullback,
)
from diagmod.modules import FPModule
from diagmod.rings import Ring
from oracles import denominator_primes

SQ23 = LocalizationSquare(frozenset(), 2, 3)
SQ25 = LocalizationSquare(frozenset(), 2, 5)
Z = Ring.integers()


class TestSquare:
    def test_rings(self):
        sq = LocalizationSquare(frozenset({7}), 2, 3)
        assert sq.base == Ring.localization(7)
        assert sq.apex == Ring.localization(2, 3, 7)

    def test_invalid(self):
        with pytest.raises(InvalidSquare):
            LocalizationSquare(frozenset(), 2, 2)
        with pytest.raises(InvalidSquare):
            LocalizationSquare(frozenset({2}), 2, 3)
        with pytest.raises(InvalidSquare):
            LocalizationSquare(frozenset(), 4, 3)
        with pytest.raises(InvalidSquare):
            LocalizationSquare.from_spec({"p": 2})

    def test_spec_round_trip(self):
        spec = {"S0": [5], "p": 2, "q": 3}
        assert LocalizationSquare.from_spec(spec).to_spec() == spec

    def test_extended_diagram(self):
        rings, z = SQ23.extended_ring_diagram()
        assert rings.ring(z) == Z and rings.shape.initial_object() == z


class TestRingPullback:
    def test_sixth(self):
        w = bezout_witness(SQ23, Fraction(1), 1, 1)
        assert (w.a, w.b) == (Fraction(1, 2), Fraction(1, 3))
        assert w.alpha * 3 + w.beta * 2 == 1

    def test_tenth(self):
        w = bezout_witness(SQ25, Fraction(1), 1, 1)
        assert w.element == Fraction(1, 10)
        assert (w.a, w.b) == (Fraction(1, 2), Fraction(2, 5))

    def test_base_element(self):
        w = bezout_witness(SQ23, Fraction(7), 0, 0)
        assert (w.a, w.b) == (Fraction(7), Fraction(0))

    def test_report(self):
        rep = verify_ring_pullback(SQ23)
        assert rep.kernel_ok and rep.surjective and len(rep.witnesses) == 16

    @given(st.sampled_from([(2, 3), (3, 2), (2, 5), (5, 7), (3, 7)]), st.integers(-50, 50),
           st.integers(0, 5), st.integers(0, 5))
    def test_witnesses_recompose(self, pq, x, i, j):
        sq = LocalizationSquare(frozenset(), *pq)
        w = bezout_witness(sq, Fraction(x), i, j)
        assert w.a - w.b == w.element == Fraction(x, pq[0] ** i * pq[1] ** j)
        assert denominator_primes(w.a) <= {pq[0]} and denominator_primes(w.b) <= {pq[1]}


class TestReconstruction:
    def test_integers(self):
        rep = fracture_reconstruct(FPModule.free(Z, 1), SQ23)
        assert rep.verdict
        assert rep.holim[0] == (1, ()) and rep.holim[-1] == (0, ())

    def test_two_power_torsion(self):
        rep = fracture_reconstruct(FPModule.cyclic(Z, 4), SQ23)
        (f,) = rep.factors
        assert f.corners == {CORNER_P: [0, []], CORNER_Q: [0, [4]], APEX: [0, []]}
        assert rep.holim[0] == (0, (4,))

    def test_prime_to_both(self):
        rep = fracture_reconstruct(FPModule.cyclic(Z, 7), SQ23)
        (f,) = rep.factors
        assert all(v == [0, [7]] for v in f.corners.values())
        assert f.exact and rep.verdict

    def test_wrong_base(self):
        with pytest.raises(InvalidSquare):
            fracture_reconstruct(FPModule.free(Ring.localization(5), 1), SQ23)

    def test_primary_parts(self):
        M = FPModule.from_invariants(Z, 2, [12, 8])
        assert primary_parts(M) == (2, [(2, 2), (2, 3), (3, 1)])

    def test_module_spec(self):
        M = module_from_spec(Z, {"rank": 1, "torsion": [[2, 3], [3, 1]]})
        assert M.invariants() == (1, (24,))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2), st.lists(st.tuples(st.sampled_from([2, 3, 5, 7]), st.integers(1, 3)), max_size=3),
           st.sampled_from([(2, 3), (3, 5), (5, 2)]))
    def test_holim_recovers_module(self, rank, torsion, pq):
        M = module_from_spec(Z, {"rank": rank, "torsion": torsion})
        sq = LocalizationSquare(frozenset(), *pq)
        rep = fracture_reconstruct(M, sq)
        assert rep.verdict
        assert rep.holim[0] == M.invariants()
        assert all(v == (0, ()) for n, v in rep.holim.items() if n != 0)


class TestOracle:
    def test_integers(self):
        rep = truncation_oracle(FPModule.free(Z, 1), SQ23, 3)
        assert rep.verdict and all(c.exact for c in rep.free)

    def test_torsion_insensitive_to_bound(self):
        M = FPModule.cyclic(Z, 8)
        one, two = truncation_oracle(M, SQ23, 1), truncation_oracle(M, SQ23, 2)
        assert one.verdict == two.verdict is True

    def test_zero_module(self):
        rep = truncation_oracle(FPModule.zero(Z), SQ23, 2)
        assert rep.verdict and rep.torsion == [] and rep.free == []

    def test_bound_must_be_positive(self):
        with pytest.raises(ValueError):
            truncation_oracle(FPModule.free(Z, 1), SQ23, 0)

    def test_agreement_recorded(self):
        M = FPModule.from_invariants(Z, 1, [12])
        rep = truncation_oracle(M, SQ23, 2, reference=fracture_reconstruct(M, SQ23))
        assert rep.agrees


class TestHasse:
    def test_base_ring(self):
        rep = hasse_pipeline(SQ23, FPModule.free(Z, 1))
        assert rep.restriction and rep.kan and rep.unit and rep.verdict

    def test_z12_splits(self):
        rep = hasse_pipeline(SQ23, FPModule.cyclic(Z, 12))
        assert rep.verdict
        corners = rep.details["corners"]
        assert corners[CORNER_P] == [0, [3]] and corners[CORNER_Q] == [0, [4]] and corners[APEX] == [0, []]

    @pytest.mark.parametrize("sq", [SQ23, SQ25, LocalizationSquare(frozenset({3}), 5, 7)])
    def test_free_rank_two(self, sq):
        rep = hasse_pipeline(sq, FPModule.free(sq.base, 2))
        assert rep.verdict
        assert rep.details["corners"][APEX] == [2, []]
