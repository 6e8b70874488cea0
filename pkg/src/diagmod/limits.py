"""Finite limits and colimits of complexes over a single ring.

Everything is degreewise: a colimit is the cokernel of the standard
difference map out of a direct sum, a limit the kernel of the difference map
into one.  No factorization machinery is involved.
"""

from __future__ import annotations

from typing import Sequence

from .complexes import ChainComplex, ChainMap, cokernel_complex, direct_sum, factor_through_kernel, kernel_complex
from .errors import RingMismatch
from .linalg import Matrix, hstack, vstack
from .rings import Ring

Edge = tuple  # (i, j, ChainMap nodes[i] -> nodes[j])


def _sum(ring: Ring, nodes: Sequence[ChainComplex]) -> ChainComplex:
    if not nodes:
        return ChainComplex.zero(ring)
    for C in nodes:
        if C.ring != ring:
            raise RingMismatch(f"node over {C.ring} in a diagram over {ring}")
    return direct_sum(*nodes)


def _offsets(nodes: Sequence[ChainComplex], n: int) -> list[int]:
    out, acc = [], 0
    for C in nodes:
        out.append(acc)
        acc += C.ngens(n)
    return out


def injection(nodes: Sequence[ChainComplex], total: ChainComplex, i: int) -> ChainMap:
    maps = {}
    for n in nodes[i].degrees:
        off = _offsets(nodes, n)[i]
        g = nodes[i].ngens(n)
        data = [[1 if r == off + c else 0 for c in range(g)] for r in range(total.ngens(n))]
        maps[n] = Matrix(total.ngens(n), g, data)
    return ChainMap(nodes[i], total, maps, validate=False)


def projection(nodes: Sequence[ChainComplex], total: ChainComplex, i: int) -> ChainMap:
    maps = {}
    for n in nodes[i].degrees:
        off = _offsets(nodes, n)[i]
        g = nodes[i].ngens(n)
        data = [[1 if c == off + r else 0 for c in range(total.ngens(n))] for r in range(g)]
        maps[n] = Matrix(g, total.ngens(n), data)
    return ChainMap(total, nodes[i], maps, validate=False)


def map_into_sum(source: ChainComplex, nodes: Sequence[ChainComplex], total: ChainComplex,
                 components: Sequence[ChainMap]) -> ChainMap:
    """The map ``source -> ⊕ nodes`` with the given components."""
    maps = {}
    for n in set(source.degrees) | set(total.degrees):
        blocks = [components[i][n] for i in range(len(nodes))]
        maps[n] = vstack(blocks, cols=source.ngens(n)) if blocks else Matrix.zeros(0, source.ngens(n))
    return ChainMap(source, total, maps, validate=False)


def map_out_of_sum(nodes: Sequence[ChainComplex], total: ChainComplex, target: ChainComplex,
                   components: Sequence[ChainMap]) -> ChainMap:
    maps = {}
    for n in set(total.degrees) | set(target.degrees):
        blocks = [components[i][n] for i in range(len(nodes))]
        maps[n] = hstack(blocks, rows=target.ngens(n)) if blocks else Matrix.zeros(target.ngens(n), 0)
    return ChainMap(total, target, maps, validate=False)


class Colimit:
    """Colimit of a finite diagram of complexes; presented on ``⊕ nodes``."""

    def __init__(self, ring: Ring, nodes: Sequence[ChainComplex], edges: Sequence[Edge]):
        self.ring = ring
        self.nodes = list(nodes)
        self.edges = list(edges)
        total = _sum(ring, self.nodes)
        self.sum = total
        src_nodes = [self.nodes[i] for i, _, _ in self.edges]
        if self.edges:
            src = _sum(ring, src_nodes)
            comps = []
            for k, (i, j, f) in enumerate(self.edges):
                inj_i = injection(self.nodes, total, i)
                inj_j = injection(self.nodes, total, j)
                comps.append(f.then(inj_j) + (-inj_i))
            diff = map_out_of_sum(src_nodes, src, total, comps)
            self.complex, self._proj = cokernel_complex(diff)
        else:
            self.complex = total
            self._proj = ChainMap.identity(total)

    def injection(self, i: int) -> ChainMap:
        return injection(self.nodes, self.sum, i).then(self._proj)

    def descend(self, target: ChainComplex, components: Sequence[ChainMap]) -> ChainMap:
        """The induced map out of the colimit from a compatible cocone."""
        m = map_out_of_sum(self.nodes, self.sum, target, components)
        return ChainMap(self.complex, target, m.maps, validate=False)


class Limit:
    """Limit of a finite diagram of complexes, as a kernel inside ``⊕ nodes``."""

    def __init__(self, ring: Ring, nodes: Sequence[ChainComplex], edges: Sequence[Edge]):
        self.ring = ring
        self.nodes = list(nodes)
        self.edges = list(edges)
        total = _sum(ring, self.nodes)
        self.sum = total
        if self.edges:
            tgt_nodes = [self.nodes[j] for _, j, _ in self.edges]
            tgt = _sum(ring, tgt_nodes)
            comps = []
            for k, (i, j, f) in enumerate(self.edges):
                p_i = projection(self.nodes, total, i)
                p_j = projection(self.nodes, total, j)
                comps.append(p_i.then(f) + (-p_j))
            diff = map_into_sum(total, tgt_nodes, tgt, comps)
            self.complex, self.inclusion = kernel_complex(diff)
        else:
            self.complex = total
            self.inclusion = ChainMap.identity(total)

    def projection(self, i: int) -> ChainMap:
        return self.inclusion.then(projection(self.nodes, self.sum, i))

    def lift(self, source: ChainComplex, components: Sequence[ChainMap]) -> ChainMap:
        """The induced map into the limit from a compatible cone."""
        m = map_into_sum(source, self.nodes, self.sum, components)
        return factor_through_kernel(self.inclusion, m)


def pushout(u: ChainMap, v: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """``X ⊔_Z Y`` for ``u: Z -> X``, ``v: Z -> Y`` with the two structure maps."""
    X, Y = u.target, v.target
    total = _sum(u.ring, [X, Y])
    comps = [u.then(injection([X, Y], total, 0)), -v.then(injection([X, Y], total, 1))]
    diff = comps[0] + comps[1]
    P, proj = cokernel_complex(diff)
    jX = injection([X, Y], total, 0).then(proj)
    jY = injection([X, Y], total, 1).then(proj)
    return P, jX, jY


def pullback(u: ChainMap, v: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap, ChainMap]:
    """``X ×_Z Y`` for ``u: X -> Z``, ``v: Y -> Z``; returns the projections and the inclusion."""
    X, Y = u.source, v.source
    total = _sum(u.ring, [X, Y])
    diff = projection([X, Y], total, 0).then(u) + (-projection([X, Y], total, 1).then(v))
    K, incl = kernel_complex(diff)
    pX = incl.then(projection([X, Y], total, 0))
    pY = incl.then(projection([X, Y], total, 1))
    return K, pX, pY, incl
