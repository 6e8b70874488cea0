from __future__ import annotations

from math import gcd

from hypothesis import given
from hypothesis import strategies as st

from diagmod.complexes import ChainComplex, ChainMap, homology
from diagmod.limits import Colimit, Limit, pullback, pushout
from diagmod.linalg import Matrix
from diagmod.modules import FPModule
from diagmod.rings import Ring

Z = Ring.integers()


def S0(ring: Ring = Z) -> ChainComplex:
    return ChainComplex.sphere(ring, 0)


def times(C: ChainComplex, D: ChainComplex, k) -> ChainMap:
    return ChainMap(C, D, {0: Matrix(1, 1, [[k]])})


def inv0(C: ChainComplex):
    return homology(C, 0).invariants()


class TestPushout:
    @given(st.integers(-12, 12), st.integers(-12, 12))
    def test_two_scalars(self, a, b):
        # Z <-a- Z -b-> Z glues to Z^2/(a, -b).
        P, jX, jY = pushout(times(S0(), S0(), a), times(S0(), S0(), b))
        g = gcd(a, b)
        expected = (2, ()) if g == 0 else (1, () if g == 1 else (g,))
        assert inv0(P) == expected
        assert jX.target is P and jY.target is P

    def test_pushout_square_commutes(self):
        u, v = times(S0(), S0(), 2), times(S0(), S0(), 3)
        P, jX, jY = pushout(u, v)
        assert u.then(jX).equals(v.then(jY))


class TestPullback:
    def test_reduction_pullback(self):
        # Z/4 x_{Z/2} Z/2 over Z is Z/4.
        Z4 = ChainComplex.concentrated(FPModule.cyclic(Z, 4))
        Z2 = ChainComplex.concentrated(FPModule.cyclic(Z, 2))
        u = ChainMap(Z4, Z2, {0: Matrix.identity(1)})
        v = ChainMap.identity(Z2)
        K, pX, pY, _ = pullback(u, v)
        assert inv0(K) == (0, (4,))
        assert pX.then(u).equals(pY.then(v))

    def test_lift_is_unique_factorization(self):
        u = times(S0(), S0(), 2)
        v = times(S0(), S0(), 2)
        lim = Limit(Z, [S0(), S0(), S0()], [(0, 2, u), (1, 2, v)])
        assert inv0(lim.complex) == (1, ())
        ident = ChainMap.identity(S0())
        h = lim.lift(S0(), [ident, ident, times(S0(), S0(), 2)])
        assert h.then(lim.projection(0)).equals(ident)


class TestGeneral:
    def test_empty_colimit_and_limit(self):
        assert Colimit(Z, [], []).complex.degrees == range(0)
        assert Limit(Z, [], []).complex.degrees == range(0)

    def test_coequalizer(self):
        f, g = times(S0(), S0(), 1), times(S0(), S0(), 5)
        col = Colimit(Z, [S0(), S0()], [(0, 1, f), (0, 1, g)])
        # Z^2 modulo (-1, 1) and (-1, 5)
        assert inv0(col.complex) == (0, (4,))

    def test_equalizer(self):
        f, g = times(S0(), S0(), 2), times(S0(), S0(), 2)
        lim = Limit(Z, [S0(), S0()], [(0, 1, f), (0, 1, g)])
        assert inv0(lim.complex) == (1, ())

    def test_descend(self):
        col = Colimit(Z, [S0(), S0()], [(0, 1, times(S0(), S0(), 3))])
        T = ChainComplex.concentrated(FPModule.cyclic(Z, 3))
        m = col.descend(T, [ChainMap(S0(), T, {0: Matrix(1, 1, [[0]])}), ChainMap(S0(), T, {0: Matrix.identity(1)})])
        assert col.injection(0).then(m).equals(ChainMap.zero(S0(), T))
