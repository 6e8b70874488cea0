"""Finitely presented modules over Z[S^-1]/(n).

A module is ``R^g / im(relations)``.  All linear algebra is carried out over
the covering localization D = Z[S^-1]: a quotient ring's modulus n becomes the
extra relations ``n * I`` before any Smith form is taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import NotModuleFinite, RingMismatch
from .linalg import Matrix, SmithForm, hstack, image_basis, kernel_basis, smith_form, solve
from .rings import Ring, RingMap, canonical_map


def reduce_matrix(ring: Ring, A: Matrix) -> Matrix:
    """Canonical entries of ``A`` in ``ring``."""
    if ring.modulus == 0:
        for row in A.data:
            for x in row:
                if not ring.contains(x):
                    raise ValueError(f"{x} does not lie in {ring}")
        return A
    return A.map(lambda x: Fraction(ring.element(x)))


def _drop_zero_columns(A: Matrix) -> Matrix:
    keep = [j for j in range(A.cols) if any(A[i, j] for i in range(A.rows))]
    return A if len(keep) == A.cols else A.select_columns(keep)


def modulus_block(ring: Ring, rows: int) -> Matrix:
    """``n * I`` for a quotient ring, an empty block otherwise."""
    if ring.modulus == 0:
        return Matrix.zeros(rows, 0)
    return Matrix.scalar(rows, ring.modulus)


def lifted(ring: Ring, A: Matrix) -> Matrix:
    """``A`` with the modulus relations of its target appended, over the domain."""
    return hstack([A, modulus_block(ring, A.rows)], rows=A.rows)


@dataclass(frozen=True, eq=False)
class FPModule:
    """``ring^ngens`` modulo the column span of ``relations``."""

    ring: Ring
    ngens: int
    relations: Matrix = field(default=None)

    def __post_init__(self):
        rel = self.relations
        if rel is None:
            rel = Matrix.zeros(self.ngens, 0)
        if rel.rows != self.ngens:
            raise ValueError(f"relation matrix has {rel.rows} rows for {self.ngens} generators")
        rel = _drop_zero_columns(reduce_matrix(self.ring, rel))
        object.__setattr__(self, "relations", rel)

    # -- constructors -------------------------------------------------
    @classmethod
    def free(cls, ring: Ring, rank: int) -> "FPModule":
        return cls(ring, rank)

    @classmethod
    def zero(cls, ring: Ring) -> "FPModule":
        return cls(ring, 0)

    @classmethod
    def cyclic(cls, ring: Ring, order) -> "FPModule":
        return cls(ring, 1, Matrix(1, 1, [[order]]))

    @classmethod
    def from_invariants(cls, ring: Ring, rank: int, factors=()) -> "FPModule":
        g = rank + len(factors)
        rel = None
        if factors:
            data = [[Fraction(0)] * len(factors) for _ in range(g)]
            for k, d in enumerate(factors):
                data[rank + k][k] = Fraction(d)
            rel = Matrix(g, len(factors), data)
        return cls(ring, g, rel)

    # -- presentation over the domain -----------------------------------
    @cached_property
    def domain_relations(self) -> Matrix:
        return lifted(self.ring, self.relations)

    @cached_property
    def smith(self) -> SmithForm:
        return smith_form(self.ring.domain, self.domain_relations)

    @cached_property
    def _diag(self) -> tuple:
        inv = list(self.smith.invariants)
        inv += [0] * (self.ngens - len(inv))
        return tuple(inv[: self.ngens])

    def invariants(self) -> tuple[int, tuple]:
        """(free rank, invariant factors) with units dropped."""
        rank = sum(1 for d in self._diag if d == 0)
        factors = tuple(sorted(d for d in self._diag if d not in (0, 1)))
        return rank, factors

    def normal_form(self) -> tuple:
        return (self.ring, *self.invariants())

    def is_zero(self) -> bool:
        return all(d == 1 for d in self._diag)

    def free_rank(self) -> int | None:
        """The rank if the module is free over its ring, else ``None``."""
        rank, factors = self.invariants()
        n = self.ring.modulus
        if n == 0:
            return None if factors else rank
        if n == 1:
            return 0
        return len(factors) if all(d == n for d in factors) else None

    def is_free(self) -> bool:
        return self.free_rank() is not None

    def is_presented_free(self) -> bool:
        """No relations beyond those of the ring itself."""
        return self.relations.cols == 0

    def isomorphic(self, other: "FPModule") -> bool:
        return self.ring == other.ring and self.invariants() == other.invariants()

    # -- elements ---------------------------------------------------------
    def is_zero_vector(self, v: Matrix) -> bool:
        """Whether every column of ``v`` vanishes in the module."""
        if v.is_zero():
            return True
        if self.ngens == 0:
            return True
        return solve(self.ring.domain, self.domain_relations, v, self.smith) is not None

    def reduce(self, v: Matrix) -> Matrix:
        return reduce_matrix(self.ring, v)

    def __repr__(self) -> str:
        return f"FPModule({self.ring}, {describe_invariants(self)})"


def describe_invariants(M: FPModule) -> str:
    rank, factors = M.invariants()
    R = M.ring
    parts = []
    if rank:
        parts.append(str(R) if rank == 1 else f"{R}^{rank}")
    parts.extend(f"{R}/({d})" if R.modulus == 0 else f"Z/{d}" for d in factors)
    return " + ".join(parts) if parts else "0"


def module_invariants(M: FPModule) -> tuple[int, tuple]:
    return M.invariants()


# ----------------------------------------------------------------------
# maps of presented modules
# ----------------------------------------------------------------------

def is_homomorphism(A: FPModule, B: FPModule, f: Matrix) -> bool:
    """Whether the generator matrix ``f`` descends to a map ``A -> B``."""
    if f.shape != (B.ngens, A.ngens):
        return False
    return B.is_zero_vector(f @ A.relations)


def maps_equal(B: FPModule, f: Matrix, g: Matrix) -> bool:
    """Equality of two maps into ``B`` given on the same source generators."""
    return B.is_zero_vector(f - g)


def kernel(ring: Ring, f: Matrix) -> Matrix:
    """Generators (columns) of the solutions of ``f x = 0`` over ``ring``.

    Over a localization this is a basis; over a quotient ring it is a minimal
    generating set computed from the lifted system ``[f | n I]``.
    """
    D = ring.domain
    if ring.modulus == 0:
        return kernel_basis(D, f)
    full = kernel_basis(D, lifted(ring, f))
    proj = full.select_rows(range(f.cols))
    return minimal_generators(ring, proj)


def minimal_generators(ring: Ring, G: Matrix) -> Matrix:
    """A small generating set for the submodule of ``ring^rows`` spanned by ``G``."""
    D = ring.domain
    if ring.modulus == 0:
        return image_basis(D, G)
    sf = smith_form(D, lifted(ring, G))
    n = ring.modulus
    cols = []
    for k in range(sf.rank):
        d = sf.D[k, k]
        if d % n != 0:
            cols.append([x * d for x in sf.Uinv.column(k)])
    return reduce_matrix(ring, Matrix.from_columns(cols, G.rows))


def cokernel(ring: Ring, f: Matrix) -> FPModule:
    return FPModule(ring, f.rows, f)


def image(ring: Ring, f: Matrix) -> FPModule:
    """The image of ``f`` presented on the columns of ``f``."""
    return FPModule(ring, f.cols, kernel(ring, f))


def kernel_of_map(A: FPModule, B: FPModule, f: Matrix) -> tuple[FPModule, Matrix]:
    """Kernel of ``f: A -> B`` as a presented module with its inclusion into ``A``.

    The inclusion matrix ``K`` is domain-level: its columns, in ``A``'s
    generators, form a basis of ``{x : f x in relations(B)}`` over Z[S^-1].
    """
    D = A.ring.domain
    system = hstack([f, B.domain_relations], rows=B.ngens)
    full = kernel_basis(D, system)
    K = image_basis(D, full.select_rows(range(A.ngens)))
    # Relations of A lie in span(K) because f maps them into relations of B.
    C = solve(D, K, A.domain_relations)
    if C is None:
        raise ArithmeticError("map is not well defined on the source relations")
    return FPModule(A.ring, K.cols, C), K


def express_in(ring: Ring, K: Matrix, v: Matrix, relations: Matrix | None = None) -> Matrix | None:
    """Coefficients ``c`` with ``K c == v`` modulo ``relations`` (domain-level)."""
    D = ring.domain
    if relations is None or relations.cols == 0:
        X = solve(D, K, v)
        return X
    X = solve(D, hstack([K, relations], rows=K.rows), v)
    if X is None:
        return None
    return X.select_rows(range(K.cols))


# ----------------------------------------------------------------------
# change of rings
# ----------------------------------------------------------------------

def map_matrix(f: RingMap, A: Matrix) -> Matrix:
    """Push every entry along ``f``."""
    return A.map(lambda x: Fraction(f(x)))


def lift_matrix(f: RingMap, A: Matrix) -> Matrix:
    """Pull every entry back along a surjective (module-finite) ``f``."""
    return A.map(lambda x: Fraction(f.lift(x)))


def base_change(M: FPModule, f: RingMap) -> FPModule:
    if M.ring != f.source:
        raise RingMismatch(f"module over {M.ring} cannot be pushed along {f}")
    return FPModule(f.target, M.ngens, map_matrix(f, M.relations))


def restrict(M: FPModule, f: RingMap) -> FPModule:
    """View an ``f.target``-module as an ``f.source``-module (same generators)."""
    if M.ring != f.target:
        raise RingMismatch(f"module over {M.ring} cannot be restricted along {f}")
    if not f.is_module_finite:
        raise NotModuleFinite(f"{f.target} is not finitely generated over {f.source}")
    rel = hstack([lift_matrix(f, M.relations), modulus_block(f.target, M.ngens)], rows=M.ngens)
    return FPModule(f.source, M.ngens, rel)


def torsion_exponent(M: FPModule) -> int:
    rank, factors = M.invariants()
    if rank:
        return 0
    return max(factors, default=1)


def restrict_torsion(M: FPModule, f: RingMap) -> tuple[FPModule, RingMap]:
    """Restrict a torsion module along any ``f`` by factoring through ``R'/(e)``.

    ``e`` is the exponent of ``M``; the returned ring map is the module-finite
    factor ``f.source -> f.target/(e)`` used for the restriction.
    """
    if f.is_module_finite:
        return restrict(M, f), f
    e = torsion_exponent(M)
    if e == 0:
        raise NotModuleFinite(f"{M} has free part; cannot restrict along {f}")
    quot = Ring(f.target.inverted, e)
    g = canonical_map(f.source, quot)
    return restrict(base_change(M, canonical_map(f.target, quot)), g), g


def simplify(M: FPModule) -> tuple[FPModule, Matrix, Matrix]:
    """Diagonal presentation ``M'`` with mutually inverse maps ``P: M->M'``, ``Q: M'->M``."""
    sf = M.smith
    keep = [k for k in range(M.ngens) if M._diag[k] != 1]
    factors = [M._diag[k] for k in keep]
    g = len(keep)
    data = [[Fraction(0)] * g for _ in range(g)]
    for i, d in enumerate(factors):
        data[i][i] = Fraction(d)
    new = FPModule(M.ring, g, Matrix(g, g, data))
    P = reduce_matrix(M.ring, sf.U.select_rows(keep))
    Q = reduce_matrix(M.ring, sf.Uinv.select_columns(keep))
    return new, P, Q
