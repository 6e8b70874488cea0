"""Bounded chain complexes of finitely presented modules over one ring.

Degree ``n`` holds an :class:`FPModule`; the differential ``d_n`` is a matrix
from the generators of ``C_n`` to those of ``C_{n-1}``.  Differentials only
need to be zero *as module maps*, so ``d_{n-1} d_n`` may be a nonzero matrix
whose columns are relations.

Model-category conventions (projective, bounded): weak equivalences are
quasi-isomorphisms, fibrations are degreewise surjections, and a map of
degreewise free complexes is a cofibration when every ``f_n`` is split
injective with free cokernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import ComplexError, RingMismatch, UnsupportedShape
from .linalg import Matrix, block_diag, block_matrix, hstack, solve
from .modules import (
    FPModule,
    base_change as base_change_module,
    cokernel as cokernel_module,
    kernel as kernel_over,
    kernel_of_map,
    lift_matrix,
    map_matrix,
    minimal_generators,
    reduce_matrix,
    restrict as restrict_module,
)
from .rings import Ring, RingMap


class ChainComplex:
    """A bounded complex; degrees outside ``[lo, hi]`` are zero."""

    def __init__(self, ring: Ring, modules: Mapping[int, FPModule], diffs: Mapping[int, Matrix] | None = None,
                 *, validate: bool = True):
        self.ring = ring
        diffs = dict(diffs or {})
        degs = sorted(n for n, M in modules.items() if M.ngens > 0)
        for n, M in modules.items():
            if M.ring != ring:
                raise RingMismatch(f"degree {n} lives over {M.ring}, not {ring}")
        if degs:
            self.lo, self.hi = degs[0], degs[-1]
        else:
            self.lo, self.hi = 0, -1
        self._modules = {n: modules.get(n, FPModule.zero(ring)) for n in range(self.lo, self.hi + 1)}
        self._diffs = {}
        for n in range(self.lo, self.hi + 2):
            shape = (self.ngens(n - 1), self.ngens(n))
            d = diffs.get(n)
            if d is None or d.rows == 0 or d.cols == 0:
                d = Matrix.zeros(*shape)
            if d.shape != shape:
                raise ComplexError(f"d_{n} has shape {d.shape}, expected {shape}")
            self._diffs[n] = reduce_matrix(ring, d)
        for n in diffs:
            if (n < self.lo or n > self.hi + 1) and not diffs[n].is_zero():
                raise ComplexError(f"nonzero differential d_{n} outside the window")
        if validate:
            self.validate()

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring) -> "ChainComplex":
        return cls(ring, {})

    @classmethod
    def free(cls, ring: Ring, ranks: Mapping[int, int], diffs: Mapping[int, Matrix] | None = None,
             **kw) -> "ChainComplex":
        return cls(ring, {n: FPModule.free(ring, r) for n, r in ranks.items()}, diffs, **kw)

    @classmethod
    def sphere(cls, ring: Ring, n: int, rank: int = 1) -> "ChainComplex":
        return cls.free(ring, {n: rank})

    @classmethod
    def disk(cls, ring: Ring, n: int) -> "ChainComplex":
        """``ring`` in degrees ``n`` and ``n-1`` joined by the identity."""
        return cls.free(ring, {n: 1, n - 1: 1}, {n: Matrix.identity(1)})

    @classmethod
    def concentrated(cls, M: FPModule, degree: int = 0) -> "ChainComplex":
        return cls(M.ring, {degree: M})

    # -- access -----------------------------------------------------------
    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def module(self, n: int) -> FPModule:
        return self._modules.get(n) or FPModule.zero(self.ring)

    def ngens(self, n: int) -> int:
        M = self._modules.get(n)
        return M.ngens if M is not None else 0

    def d(self, n: int) -> Matrix:
        d = self._diffs.get(n)
        if d is None:
            return Matrix.zeros(self.ngens(n - 1), self.ngens(n))
        return d

    @property
    def modules(self) -> dict[int, FPModule]:
        return dict(self._modules)

    @property
    def diffs(self) -> dict[int, Matrix]:
        return {n: d for n, d in self._diffs.items() if d.rows and d.cols}

    def is_degreewise_presented_free(self) -> bool:
        return all(M.is_presented_free() for M in self._modules.values())

    def is_degreewise_free(self) -> bool:
        return all(M.is_free() for M in self._modules.values())

    def validate(self) -> None:
        for n in range(self.lo, self.hi + 1):
            src, tgt = self.module(n), self.module(n - 1)
            d = self.d(n)
            if not tgt.is_zero_vector(d @ src.relations):
                raise ComplexError(f"d_{n} is not well defined on the relations of degree {n}")
            dd = self.d(n - 1) @ d
            if not self.module(n - 2).is_zero_vector(dd):
                raise ComplexError(f"d_{n - 1} d_{n} is not zero")

    def __repr__(self) -> str:
        parts = [f"{n}:{self.module(n).ngens}" for n in self.degrees]
        return f"ChainComplex({self.ring}, [{', '.join(parts)}])"

    # -- structural operations -------------------------------------------
    def shift(self, k: int) -> "ChainComplex":
        sign = -1 if k % 2 else 1
        mods = {n + k: M for n, M in self._modules.items()}
        diffs = {n + k: d.scale(sign) for n, d in self._diffs.items()}
        return ChainComplex(self.ring, mods, diffs, validate=False)

    def base_change(self, f: RingMap) -> "ChainComplex":
        if f.source != self.ring:
            raise RingMismatch(f"complex over {self.ring} cannot be pushed along {f}")
        mods = {n: base_change_module(M, f) for n, M in self._modules.items()}
        diffs = {n: map_matrix(f, d) for n, d in self._diffs.items()}
        return ChainComplex(f.target, mods, diffs, validate=False)

    def restrict(self, f: RingMap) -> "ChainComplex":
        if f.target != self.ring:
            raise RingMismatch(f"complex over {self.ring} cannot be restricted along {f}")
        mods = {n: restrict_module(M, f) for n, M in self._modules.items()}
        diffs = {n: lift_matrix(f, d) for n, d in self._diffs.items()}
        return ChainComplex(f.source, mods, diffs, validate=False)

    def homology(self, n: int) -> FPModule:
        return homology(self, n)

    def homology_table(self) -> dict[int, tuple[int, tuple]]:
        return homology_table(self)

    def is_acyclic(self) -> bool:
        return all(homology(self, n).is_zero() for n in self.degrees)


def shift(C: ChainComplex, k: int) -> ChainComplex:
    return C.shift(k)


def direct_sum(*complexes: ChainComplex) -> ChainComplex:
    if not complexes:
        raise ValueError("direct_sum needs at least one complex")
    ring = complexes[0].ring
    if any(C.ring != ring for C in complexes):
        raise RingMismatch("direct sum of complexes over different rings")
    lo = min(C.lo for C in complexes)
    hi = max(C.hi for C in complexes)
    mods, diffs = {}, {}
    for n in range(lo, hi + 1):
        parts = [C.module(n) for C in complexes]
        mods[n] = FPModule(ring, sum(P.ngens for P in parts),
                           block_diag([P.relations for P in parts]))
    for n in range(lo, hi + 2):
        diffs[n] = block_diag([C.d(n) for C in complexes])
    return ChainComplex(ring, mods, diffs, validate=False)


# ----------------------------------------------------------------------
# homology
# ----------------------------------------------------------------------

def cycles(C: ChainComplex, n: int) -> tuple[FPModule, Matrix]:
    """Cycles in degree ``n`` with their (domain-level) inclusion matrix."""
    return kernel_of_map(C.module(n), C.module(n - 1), C.d(n))


def homology(C: ChainComplex, n: int) -> FPModule:
    """``ker d_n / im d_{n+1}`` as a presented module over ``C.ring``."""
    Z, K = cycles(C, n)
    bounds = C.d(n + 1)
    coeffs = solve(C.ring.domain, K, bounds) if bounds.cols else Matrix.zeros(K.cols, 0)
    if coeffs is None:
        raise ComplexError(f"boundaries in degree {n} are not cycles")
    rel = hstack([Z.relations, coeffs], rows=K.cols)
    return FPModule(C.ring, K.cols, rel)


def homology_table(C: ChainComplex, degrees=None) -> dict[int, tuple[int, tuple]]:
    """``{degree: (free rank, invariant factors)}`` over the given degrees."""
    if degrees is None:
        degrees = range(C.lo - 1, C.hi + 2) if C.hi >= C.lo else range(0)
    return {n: homology(C, n).invariants() for n in degrees}


def homology_report(C: ChainComplex, degrees=None) -> list[tuple[int, int, tuple]]:
    """Nonzero homology as ``(degree, rank, invariant factors)`` triples."""
    out = []
    for n, (rank, factors) in homology_table(C, degrees).items():
        if rank or factors:
            out.append((n, rank, factors))
    return out


# ----------------------------------------------------------------------
# chain maps
# ----------------------------------------------------------------------

class ChainMap:
    """Degreewise matrices ``f_n`` from ``source`` generators to ``target`` generators."""

    def __init__(self, source: ChainComplex, target: ChainComplex, maps: Mapping[int, Matrix],
                 *, validate: bool = True):
        if source.ring != target.ring:
            raise RingMismatch(f"chain map from {source.ring} to {target.ring}")
        self.source = source
        self.target = target
        self.ring = source.ring
        lo = min(source.lo, target.lo)
        hi = max(source.hi, target.hi)
        self._maps = {}
        for n in range(lo, hi + 1):
            shape = (target.ngens(n), source.ngens(n))
            m = maps.get(n)
            if m is None or m.rows == 0 or m.cols == 0:
                m = Matrix.zeros(*shape)
            if m.shape != shape:
                raise ComplexError(f"f_{n} has shape {m.shape}, expected {shape}")
            self._maps[n] = reduce_matrix(self.ring, m)
        if validate:
            self.validate()

    @classmethod
    def identity(cls, C: ChainComplex) -> "ChainMap":
        return cls(C, C, {n: Matrix.identity(C.ngens(n)) for n in C.degrees}, validate=False)

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex) -> "ChainMap":
        return cls(source, target, {}, validate=False)

    def __getitem__(self, n: int) -> Matrix:
        m = self._maps.get(n)
        if m is None:
            return Matrix.zeros(self.target.ngens(n), self.source.ngens(n))
        return m

    @property
    def maps(self) -> dict[int, Matrix]:
        return dict(self._maps)

    @property
    def degrees(self) -> range:
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)

    def validate(self) -> None:
        S, T = self.source, self.target
        for n in self.degrees:
            f = self[n]
            if not T.module(n).is_zero_vector(f @ S.module(n).relations):
                raise ComplexError(f"f_{n} is not well defined on source relations")
            comm = T.d(n) @ f - self[n - 1] @ S.d(n)
            if not T.module(n - 1).is_zero_vector(comm):
                raise ComplexError(f"f does not commute with the differentials in degree {n}")

    def then(self, other: "ChainMap") -> "ChainMap":
        """``other ∘ self``."""
        degs = set(self.degrees) | set(other.degrees)
        return ChainMap(self.source, other.target, {n: other[n] @ self[n] for n in degs}, validate=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.degrees) | set(other.degrees)
        return ChainMap(self.source, self.target, {n: self[n] + other[n] for n in degs}, validate=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -self[n] for n in self.degrees}, validate=False)

    def equals(self, other: "ChainMap") -> bool:
        """Equality as maps of complexes (entries compared modulo target relations)."""
        degs = set(self.degrees) | set(other.degrees)
        return all(self.target.module(n).is_zero_vector(self[n] - other[n]) for n in degs)

    def is_identity_matrix(self) -> bool:
        """Every ``f_n`` is literally an identity matrix."""
        return all(self.source.ngens(n) == self.target.ngens(n) and
                   self[n] == reduce_matrix(self.ring, Matrix.identity(self.source.ngens(n)))
                   for n in self.degrees)

    def base_change(self, f: RingMap) -> "ChainMap":
        return ChainMap(self.source.base_change(f), self.target.base_change(f),
                        {n: map_matrix(f, m) for n, m in self._maps.items()}, validate=False)

    def restrict(self, f: RingMap) -> "ChainMap":
        return ChainMap(self.source.restrict(f), self.target.restrict(f),
                        {n: lift_matrix(f, m) for n, m in self._maps.items()}, validate=False)

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    return f.then(g)


def direct_sum_maps(*maps: ChainMap) -> ChainMap:
    src = direct_sum(*[m.source for m in maps])
    tgt = direct_sum(*[m.target for m in maps])
    degs = set(src.degrees) | set(tgt.degrees)
    return ChainMap(src, tgt, {n: block_diag([m[n] for m in maps]) for n in degs}, validate=False)


def cone(f: ChainMap) -> ChainComplex:
    """``cone(f)_n = C'_n + C_{n-1}`` with ``d(x, y) = (d'x + f(y), -dy)``."""
    S, T = f.source, f.target
    ring = f.ring
    lo = min(T.lo, S.lo + 1)
    hi = max(T.hi, S.hi + 1)
    mods, diffs = {}, {}
    for n in range(lo, hi + 1):
        A, B = T.module(n), S.module(n - 1)
        mods[n] = FPModule(ring, A.ngens + B.ngens, block_diag([A.relations, B.relations]))
    for n in range(lo, hi + 2):
        rs = [T.ngens(n - 1), S.ngens(n - 2)]
        cs = [T.ngens(n), S.ngens(n - 1)]
        diffs[n] = block_matrix([[T.d(n), f[n - 1]], [None, -S.d(n - 1)]], rs, cs)
    return ChainComplex(ring, mods, diffs, validate=False)


@dataclass
class QuasiIsoReport:
    verdict: bool
    cone_homology: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict


def is_quasi_iso(f: ChainMap, degrees=None) -> QuasiIsoReport:
    """Quasi-isomorphism test through the homology of the cone.

    ``degrees`` restricts the test to a window (used for truncated resolutions).
    """
    Cf = cone(f)
    table = homology_table(Cf)
    if degrees is not None:
        allowed = set(degrees)
        table = {n: v for n, v in table.items() if n in allowed}
    ok = all(rank == 0 and not factors for rank, factors in table.values())
    return QuasiIsoReport(ok, table)


def _cokernel_at(f: ChainMap, n: int) -> FPModule:
    T = f.target.module(n)
    return FPModule(f.ring, T.ngens, hstack([T.relations, f[n]], rows=T.ngens))


def is_fibration(f: ChainMap) -> bool:
    """Degreewise surjectivity."""
    return all(_cokernel_at(f, n).is_zero() for n in f.degrees)


def is_cofibration(f: ChainMap) -> bool:
    """Every ``f_n`` split injective with free cokernel (degreewise free complexes)."""
    S, T = f.source, f.target
    for n in f.degrees:
        a, b = S.module(n).free_rank(), T.module(n).free_rank()
        if a is None or b is None:
            raise UnsupportedShape(f"cofibration test needs free modules; degree {n} is not free")
        if _cokernel_at(f, n).free_rank() != b - a:
            return False
    return True


def is_trivial_cofibration(f: ChainMap) -> bool:
    return is_cofibration(f) and bool(is_quasi_iso(f))


def is_trivial_fibration(f: ChainMap) -> bool:
    return is_fibration(f) and bool(is_quasi_iso(f))


# ----------------------------------------------------------------------
# kernels and cokernels of chain maps
# ----------------------------------------------------------------------

def kernel_complex(f: ChainMap) -> tuple[ChainComplex, ChainMap]:
    """Degreewise kernel of ``f`` with its inclusion into ``f.source``."""
    S = f.source
    D = f.ring.domain
    mods, incl = {}, {}
    for n in f.degrees:
        mods[n], incl[n] = kernel_of_map(S.module(n), f.target.module(n), f[n])
    diffs = {}
    for n in f.degrees:
        if n - 1 in incl and incl[n].cols and incl[n - 1].cols:
            delta = solve(D, incl[n - 1], S.d(n) @ incl[n])
            if delta is None:
                raise ComplexError("kernel is not closed under the differential")
            diffs[n] = delta
    K = ChainComplex(f.ring, mods, diffs, validate=False)
    return K, ChainMap(K, S, {n: incl[n] for n in K.degrees}, validate=False)


def cokernel_complex(f: ChainMap) -> tuple[ChainComplex, ChainMap]:
    """Degreewise cokernel of ``f`` (presented on the target's generators)."""
    T = f.target
    mods = {n: FPModule(f.ring, T.ngens(n), hstack([T.module(n).relations, f[n]], rows=T.ngens(n)))
            for n in T.degrees}
    Q = ChainComplex(f.ring, mods, {n: T.d(n) for n in range(T.lo, T.hi + 2)}, validate=False)
    proj = ChainMap(T, Q, {n: Matrix.identity(T.ngens(n)) for n in T.degrees}, validate=False)
    return Q, proj


def factor_through_kernel(incl: ChainMap, g: ChainMap) -> ChainMap:
    """The unique ``h`` with ``incl ∘ h == g`` when ``g`` lands in the kernel."""
    D = incl.ring.domain
    maps = {}
    for n in g.degrees:
        K = incl[n]
        if g.source.ngens(n) == 0:
            continue
        # Coefficients modulo the ambient relations (g is only defined up to them).
        amb = incl.target.module(n).domain_relations
        X = solve(D, hstack([K, amb], rows=K.rows), g[n])
        if X is None:
            raise ComplexError(f"map does not factor through the kernel in degree {n}")
        maps[n] = X.select_rows(range(K.cols))
    return ChainMap(g.source, incl.source, maps, validate=False)


def simplify_complex(C: ChainComplex) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Diagonal presentations in every degree, with inverse isomorphisms."""
    from .modules import simplify

    mods, P, Q = {}, {}, {}
    for n in C.degrees:
        mods[n], P[n], Q[n] = simplify(C.module(n))
    diffs = {n: P[n - 1] @ C.d(n) @ Q[n] for n in C.degrees if n - 1 in P}
    S = ChainComplex(C.ring, mods, diffs, validate=False)
    return S, ChainMap(C, S, P, validate=False), ChainMap(S, C, Q, validate=False)


# ----------------------------------------------------------------------
# resolutions and derived base change
# ----------------------------------------------------------------------

@dataclass
class Resolution:
    complex: ChainComplex
    augmentation: ChainMap
    length: int

    @property
    def valid_through(self) -> int:
        return self.length - 1


def free_resolution(M: FPModule, length: int) -> Resolution:
    """Free resolution ``F_L -> ... -> F_0 -> M`` by iterated kernel presentation."""
    if length < 1:
        raise ValueError("resolution length must be at least 1")
    ring = M.ring
    ranks = {0: M.ngens}
    diffs = {}
    d = minimal_generators(ring, M.relations)
    for k in range(1, length + 1):
        if d.cols == 0:
            break
        ranks[k] = d.cols
        diffs[k] = d
        d = kernel_over(ring, d)
    F = ChainComplex.free(ring, ranks, diffs, validate=False)
    target = ChainComplex.concentrated(M, 0)
    aug = ChainMap(F, target, {0: Matrix.identity(M.ngens)}, validate=False)
    return Resolution(F, aug, length)


def derived_base_change(C: ChainComplex, f: RingMap) -> ChainComplex:
    """Levelwise base change of a degreewise free complex."""
    if not C.is_degreewise_presented_free():
        raise UnsupportedShape("derived base change is computed on complexes of free modules")
    return C.base_change(f)


@dataclass
class TorResult:
    module: FPModule
    degree: int
    valid_through: int


def tor(M: FPModule, f: RingMap, i: int, length: int | None = None) -> TorResult:
    """``Tor_i`` of ``M`` along ``f`` from a length-``L`` resolution (valid for i <= L-1)."""
    L = length if length is not None else i + 2
    if i > L - 1:
        raise ValueError(f"Tor_{i} is outside the validity window of a length-{L} resolution")
    res = free_resolution(M, L)
    H = homology(derived_base_change(res.complex, f), i)
    return TorResult(H, i, L - 1)
