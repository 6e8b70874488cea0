"""Restriction, Kan extensions along full inclusions, and homotopy limits.

Left Kan extensions are slice colimits, right Kan extensions coslice limits
of restrictions.  When the slice has a terminal object (coslice an initial
one) the value is computed by the one-step formula and the general colimit
(limit) is kept alongside as a check.

The homotopy limit of an inverse diagram is the totalization of its
cosimplicial replacement over nondegenerate chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .category import (
    FiniteCategory,
    Inclusion,
    arrow_id,
    chains,
    coslice_initial,
    coslice_objects,
    slice_objects,
    slice_terminal,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    free_resolution,
    homology_table,
    is_quasi_iso,
)
from .diagrams import DiagramMap, ModuleDiagram, RingDiagram, is_degreewise_iso
from .errors import ComplexError, NotModuleFinite, RingMismatch
from .limits import Colimit, Limit
from .linalg import Matrix, block_diag, block_matrix, hstack, solve, vstack
from .modules import FPModule, lift_matrix, map_matrix, reduce_matrix
from .rings import Ring, RingMap, canonical_map

HYPOTHESES_BANNER = "ambient hypotheses (right proper, cellular, stable) assumed, not checked"
SMALLNESS_NOTE = "smallness of cells assumed, not checked"


# ----------------------------------------------------------------------
# restriction
# ----------------------------------------------------------------------

def restrict_diagram(incl: Inclusion, X: ModuleDiagram) -> ModuleDiagram:
    """``i^* X``: objectwise restriction with inherited structure maps."""
    if X.shape != incl.ambient:
        raise ValueError("diagram is not indexed by the ambient category")
    rings = X.rings.restrict_to(incl.sub)
    values = {s: X.value(s) for s in incl.sub.objects}
    structure = {a: X.structure(*a).maps for a in incl.sub.arrows}
    return ModuleDiagram(rings, values, structure, validate=False)


def restrict_diagram_map(incl: Inclusion, f: DiagramMap, source: ModuleDiagram | None = None,
                         target: ModuleDiagram | None = None) -> DiagramMap:
    X = source or restrict_diagram(incl, f.source)
    Y = target or restrict_diagram(incl, f.target)
    return DiagramMap(X, Y, {s: f[s].maps for s in incl.sub.objects}, validate=False)


# ----------------------------------------------------------------------
# left Kan extension
# ----------------------------------------------------------------------

@dataclass
class KanValue:
    """Value at one ambient object with the maps relating it to the slice."""

    complex: ChainComplex
    legs: dict            # slice object (s, t) -> ChainMap between value and the slice term
    collapsed: tuple | None = None  # the terminal/initial slice object used
    general: ChainComplex | None = None
    agrees: bool | None = None     # collapse verified against the general (co)limit


class KanExtension:
    """A Kan extension as a module diagram plus its per-object (co)cone legs."""

    def __init__(self, incl: Inclusion, diagram: ModuleDiagram, values: dict, kind: str,
                 limits: dict | None = None):
        self.incl = incl
        self.diagram = diagram
        self.values = values
        self.kind = kind
        self.limits = limits or {}  # right extensions: t -> (coslice objects, Limit)

    def __getitem__(self, t: str) -> ChainComplex:
        return self.diagram.value(t)

    def leg(self, t: str, c: tuple) -> ChainMap:
        return self.values[t].legs[c]

    def collapse_checks(self) -> dict:
        return {t: v.agrees for t, v in self.values.items() if v.collapsed is not None}


def _slice_colimit(incl: Inclusion, rings: RingDiagram, X: ModuleDiagram, t: str):
    objs = slice_objects(incl, t)
    ring = rings.ring(t)
    nodes = [X.value(s).base_change(rings.map(s, t)) for s, _ in objs]
    edges = []
    for i, (s, _) in enumerate(objs):
        for j, (u, _) in enumerate(objs):
            if i != j and incl.sub.hom(s, u):
                b = rings.map(u, t)
                m = X.structure(s, u)
                edges.append((i, j, ChainMap(nodes[i], nodes[j], {n: map_matrix(b, m[n]) for n in m.degrees},
                                             validate=False)))
    return objs, Colimit(ring, nodes, edges)


def _same_normal_form(A: ChainComplex, B: ChainComplex) -> bool:
    degs = set(A.degrees) | set(B.degrees)
    return all(A.module(n).invariants() == B.module(n).invariants() for n in degs)


def left_kan(incl: Inclusion, rings: RingDiagram, X: ModuleDiagram, *, collapse: bool = True,
             verify: bool = True) -> KanExtension:
    """``i_* X(t) = colim over D/t of a_* X(s)`` with induced structure maps.

    With ``collapse`` the value at ``t`` is ``a_* X(t_s)`` whenever ``D/t`` has
    a terminal object ``a: t_s -> t``; ``verify`` compares it with the general
    colimit in normal form.
    """
    if rings.shape != incl.ambient:
        raise ValueError("ring diagram is not indexed by the ambient category")
    if X.rings != rings.restrict_to(incl.sub):
        raise RingMismatch("diagram is not over the restricted ring diagram")
    values: dict[str, KanValue] = {}
    gens: dict[str, list] = {}  # slice objects whose summands present the value
    for t in incl.ambient.objects:
        term = slice_terminal(incl, t) if collapse else None
        objs, col = _slice_colimit(incl, rings, X, t)
        if term is not None:
            s0 = term[0]
            C = X.value(s0) if s0 == t else X.value(s0).base_change(rings.map(s0, t))
            legs = {}
            for s, _ in objs:
                m = X.structure(s, s0)
                b = rings.map(s0, t)
                legs[(s, t)] = ChainMap(col.nodes[objs.index((s, t))], C,
                                        {n: map_matrix(b, m[n]) for n in m.degrees}, validate=False)
            kv = KanValue(C, legs, term)
            if verify:
                kv.general = col.complex
                kv.agrees = _same_normal_form(C, col.complex) and _collapse_is_iso(col, objs, legs, C)
            gens[t] = [term]
        else:
            legs = {c: col.injection(k) for k, c in enumerate(objs)}
            kv = KanValue(col.complex, legs)
            gens[t] = list(objs)
        values[t] = kv
    structure = {}
    for t, t2 in incl.ambient.non_identity_arrows():
        target = values[t2]
        blocks = []
        for s, _ in gens[t]:
            blocks.append(target.legs[(s, t2)])
        C2 = target.complex
        degs = set(values[t].complex.degrees) | set(C2.degrees)
        structure[(t, t2)] = {n: hstack([b[n] for b in blocks], rows=C2.ngens(n)) if blocks
                              else Matrix.zeros(C2.ngens(n), 0) for n in degs}
    diagram = ModuleDiagram(rings, {t: v.complex for t, v in values.items()}, structure, validate=False)
    return KanExtension(incl, diagram, values, "left")


def _collapse_is_iso(col: Colimit, objs: list, legs: dict, C: ChainComplex) -> bool:
    comparison = col.descend(C, [legs[c] for c in objs])
    return is_degreewise_iso(comparison)


def left_kan_unit(ext: KanExtension, X: ModuleDiagram) -> DiagramMap:
    """``X -> i^* i_* X``; at ``s`` in D the leg of the identity slice object."""
    restricted = restrict_diagram(ext.incl, ext.diagram)
    comps = {s: ext.leg(s, (s, s)).maps for s in ext.incl.sub.objects}
    return DiagramMap(X, restricted, comps, validate=False)


def left_kan_counit(incl: Inclusion, Y: ModuleDiagram, ext: KanExtension | None = None) -> DiagramMap:
    """``i_* i^* Y -> Y`` induced by the structure maps of ``Y``."""
    ext = ext or left_kan(incl, Y.rings, restrict_diagram(incl, Y))
    comps = {}
    for t in incl.ambient.objects:
        v = ext.values[t]
        Yt = Y.value(t)
        if v.collapsed is not None:
            s0 = v.collapsed[0]
            comps[t] = Y.structure(s0, t).maps
        else:
            objs = slice_objects(incl, t)
            degs = set(v.complex.degrees) | set(Yt.degrees)
            blocks = [Y.structure(s, t) for s, _ in objs]
            comps[t] = {n: hstack([b[n] for b in blocks], rows=Yt.ngens(n)) if blocks
                        else Matrix.zeros(Yt.ngens(n), 0) for n in degs}
    return DiagramMap(ext.diagram, Y, comps, validate=False)


def left_kan_map(f: DiagramMap, ext_src: KanExtension, ext_tgt: KanExtension) -> DiagramMap:
    """``i_* f`` between two left Kan extensions."""
    incl = ext_src.incl
    rings = ext_src.diagram.rings
    comps = {}
    for t in incl.ambient.objects:
        v = ext_src.values[t]
        gens = [v.collapsed] if v.collapsed is not None else slice_objects(incl, t)
        T = ext_tgt.values[t].complex
        blocks = []
        for s, _ in gens:
            a = rings.map(s, t)
            leg = ext_tgt.leg(t, (s, t))
            blocks.append({n: leg[n] @ map_matrix(a, f[s][n]) for n in set(leg.degrees) | set(f[s].degrees)})
        degs = set(v.complex.degrees) | set(T.degrees)
        comps[t] = {n: hstack([b.get(n, Matrix.zeros(T.ngens(n), f.source.value(s).ngens(n)))
                               for b, (s, _) in zip(blocks, gens)], rows=T.ngens(n)) if blocks
                    else Matrix.zeros(T.ngens(n), 0) for n in degs}
    return DiagramMap(ext_src.diagram, ext_tgt.diagram, comps, validate=False)


# ----------------------------------------------------------------------
# right Kan extension
# ----------------------------------------------------------------------

def _restriction(rings: RingDiagram, t: str, s: str) -> RingMap:
    a = rings.map(t, s)
    if not a.is_module_finite:
        raise NotModuleFinite(f"arrow {arrow_id(t, s)}: {a.target} is not finite over {a.source}")
    return a


def _coslice_limit(incl: Inclusion, rings: RingDiagram, X: ModuleDiagram, t: str):
    objs = coslice_objects(incl, t)
    ring = rings.ring(t)
    nodes = [X.value(s).restrict(_restriction(rings, t, s)) for _, s in objs]
    edges = []
    for i, (_, s) in enumerate(objs):
        for j, (_, u) in enumerate(objs):
            if i != j and incl.sub.hom(s, u):
                b = rings.map(t, u)
                m = X.structure(s, u)
                edges.append((i, j, ChainMap(nodes[i], nodes[j], {n: lift_matrix(b, m[n]) for n in m.degrees},
                                             validate=False)))
    return objs, Limit(ring, nodes, edges)


def right_kan(incl: Inclusion, rings: RingDiagram, X: ModuleDiagram, *, collapse: bool = True,
              verify: bool = True) -> KanExtension:
    """``i_! X(t) = lim over t/D of a^* X(s)`` with induced structure maps."""
    if rings.shape != incl.ambient:
        raise ValueError("ring diagram is not indexed by the ambient category")
    if X.rings != rings.restrict_to(incl.sub):
        raise RingMismatch("diagram is not over the restricted ring diagram")
    values: dict[str, KanValue] = {}
    limits: dict[str, tuple] = {}
    for t in incl.ambient.objects:
        init = coslice_initial(incl, t) if collapse else None
        objs, lim = _coslice_limit(incl, rings, X, t)
        limits[t] = (objs, lim)
        if init is not None:
            s0 = init[1]
            C = X.value(s0) if s0 == t else X.value(s0).restrict(_restriction(rings, t, s0))
            legs = {}
            for _, s in objs:
                m = X.structure(s0, s)
                b = rings.map(t, s)
                legs[(t, s)] = ChainMap(C, lim.nodes[objs.index((t, s))],
                                        {n: lift_matrix(b, m[n]) for n in m.degrees}, validate=False)
            kv = KanValue(C, legs, init)
            if verify:
                kv.general = lim.complex
                comparison = lim.lift(C, [legs[c] for c in objs])
                kv.agrees = _same_normal_form(C, lim.complex) and is_degreewise_iso(comparison)
        else:
            legs = {c: lim.projection(k) for k, c in enumerate(objs)}
            kv = KanValue(lim.complex, legs)
        values[t] = kv
    structure = {}
    for t2, t in incl.ambient.non_identity_arrows():
        # Right-adjoint form V(t2) -> a^* V(t), then pushed to left form over R(t).
        a = rings.map(t2, t)
        src = values[t2]
        comps = [src.legs[(t2, s)] for _, s in coslice_objects(incl, t)]
        structure[(t2, t)] = _into_value(values[t], limits[t], comps, src.complex, a)
    diagram = ModuleDiagram(rings, {t: v.complex for t, v in values.items()}, structure, validate=False)
    return KanExtension(incl, diagram, values, "right", limits)


def _into_value(value: KanValue, limit_data, comps: Sequence[ChainMap], source: ChainComplex,
                a: RingMap) -> dict:
    """Matrices of ``a_* source -> value`` over ``R(t)`` from components into the coslice terms."""
    objs, lim = limit_data
    ring = a.target
    T = value.complex
    degs = set(source.degrees) | set(T.degrees)
    out = {}
    if value.collapsed is not None:
        k = objs.index(value.collapsed)
        for n in degs:
            out[n] = map_matrix(a, comps[k][n])
        return out
    D = ring.domain
    for n in degs:
        if source.ngens(n) == 0 or T.ngens(n) == 0:
            continue
        stacked = vstack([map_matrix(a, c[n]) for c in comps], cols=source.ngens(n))
        K = lim.inclusion[n]
        amb = lim.sum.module(n).domain_relations
        Xs = solve(D, hstack([K, amb], rows=K.rows), stacked)
        if Xs is None:
            raise ComplexError(f"induced map does not factor through the limit in degree {n}")
        out[n] = reduce_matrix(ring, Xs.select_rows(range(K.cols)))
    return out


def right_kan_counit(ext: KanExtension, X: ModuleDiagram) -> DiagramMap:
    """``i^* i_! X -> X``; at ``s`` in D the leg of the identity coslice object."""
    restricted = restrict_diagram(ext.incl, ext.diagram)
    comps = {s: ext.leg(s, (s, s)).maps for s in ext.incl.sub.objects}
    return DiagramMap(restricted, X, comps, validate=False)


def right_kan_unit(incl: Inclusion, Y: ModuleDiagram, ext: KanExtension | None = None) -> DiagramMap:
    """``Y -> i_! i^* Y`` induced by the adjoint structure maps of ``Y``."""
    ext = ext or right_kan(incl, Y.rings, restrict_diagram(incl, Y))
    comps = {}
    for t in incl.ambient.objects:
        objs, lim = ext.limits[t]
        legs = []
        for (_, s), node in zip(objs, lim.nodes):
            m = Y.adjoint_structure(t, s) if s != t else ChainMap.identity(Y.value(t))
            legs.append(ChainMap(Y.value(t), node, m.maps, validate=False))
        ident = canonical_map(Y.rings.ring(t), Y.rings.ring(t))
        comps[t] = _into_value(ext.values[t], (objs, lim), legs, Y.value(t), ident)
    return DiagramMap(Y, ext.diagram, comps, validate=False)


def right_kan_map(f: DiagramMap, ext_src: KanExtension, ext_tgt: KanExtension) -> DiagramMap:
    """``i_! f`` between two right Kan extensions."""
    incl = ext_src.incl
    rings = ext_src.diagram.rings
    comps = {}
    for t in incl.ambient.objects:
        objs, lim = ext_tgt.limits[t]
        src = ext_src.values[t]
        legs = []
        for k, (_, s) in enumerate(objs):
            b = rings.map(t, s)
            leg = src.legs[(t, s)]
            legs.append(ChainMap(src.complex, lim.nodes[k],
                                 {n: lift_matrix(b, f[s][n]) @ leg[n] for n in set(leg.degrees) | set(f[s].degrees)},
                                 validate=False))
        ident = canonical_map(rings.ring(t), rings.ring(t))
        comps[t] = _into_value(ext_tgt.values[t], (objs, lim), legs, src.complex, ident)
    return DiagramMap(ext_src.diagram, ext_tgt.diagram, comps, validate=False)


# ----------------------------------------------------------------------
# homotopy limits
# ----------------------------------------------------------------------

@dataclass
class Totalization:
    complex: ChainComplex
    blocks: dict  # total degree -> list of (k, chain) summands in order
    base: Ring


def _base_restriction(rings: RingDiagram, base: Ring, s: str) -> RingMap:
    f = canonical_map(base, rings.ring(s))
    if not f.is_module_finite:
        raise NotModuleFinite(f"{rings.ring(s)} (object {s!r}) is not finite over {base}")
    return f


def bk_holim(X: ModuleDiagram, base: Ring) -> Totalization:
    """Totalization of the cosimplicial replacement of ``X`` restricted to ``base``.

    ``Tot_n = ⊕_k ⊕_{k-chains σ} X(σ_k)_{n+k}`` with
    ``D = δ + (-1)^k d``; the coface ``δ^i`` deletes ``σ_i`` for ``i < k`` and
    the last one pushes forward along the final arrow.
    """
    shape = X.shape
    maps = {s: _base_restriction(X.rings, base, s) for s in shape.objects}
    restricted = {s: X.value(s).restrict(maps[s]) for s in shape.objects}
    levels = []
    k = 0
    while True:
        ch = chains(shape, k)
        if not ch:
            break
        levels.append(ch)
        k += 1
    K = len(levels) - 1
    his = [C.hi for C in restricted.values() if C.hi >= C.lo]
    los = [C.lo for C in restricted.values() if C.hi >= C.lo]
    if not his:
        return Totalization(ChainComplex.zero(base), {}, base)
    lo, hi = min(los) - K, max(his)
    blocks = {n: [(k, c) for k in range(K + 1) for c in levels[k]] for n in range(lo - 1, hi + 2)}

    def module(k, c, n):
        return restricted[c[-1]].module(n + k)

    mods, diffs = {}, {}
    for n in range(lo, hi + 1):
        parts = [module(k, c, n) for k, c in blocks[n]]
        rel = block_diag([P.relations for P in parts])
        mods[n] = FPModule(base, sum(P.ngens for P in parts), rel)

    def entry(k_src, c_src, k_dst, c_dst, n):
        """Block of D from summand (k_src, c_src) in degree n to (k_dst, c_dst) in degree n-1."""
        rows = module(k_dst, c_dst, n - 1).ngens
        cols = module(k_src, c_src, n).ngens
        if k_dst == k_src and c_dst == c_src:
            d = restricted[c_src[-1]].d(n + k_src)
            return d.scale(-1 if k_src % 2 else 1)
        if k_dst == k_src + 1:
            total = None
            for i in range(k_dst + 1):
                face = c_dst[:i] + c_dst[i + 1:]
                if face != c_src:
                    continue
                sign = -1 if i % 2 else 1
                if i < k_dst:
                    m = Matrix.identity(cols)
                else:
                    u, v = c_dst[-2], c_dst[-1]
                    struct = X.structure(u, v)[n + k_src]
                    m = lift_matrix(maps[v], struct)
                m = m.scale(sign)
                total = m if total is None else total + m
            if total is not None:
                return total
        return Matrix.zeros(rows, cols)

    for n in range(lo, hi + 2):
        src, dst = blocks[n], blocks[n - 1]
        if n - 1 < lo or n > hi:
            continue
        grid = [[entry(ks, cs, kd, cd, n) for ks, cs in src] for kd, cd in dst]
        rs = [module(kd, cd, n - 1).ngens for kd, cd in dst]
        cs_ = [module(ks, cs, n).ngens for ks, cs in src]
        diffs[n] = block_matrix(grid, rs, cs_)
    C = ChainComplex(base, mods, diffs, validate=False)
    return Totalization(C, {n: blocks[n] for n in range(lo, hi + 1)}, base)


def homotopy_pullback(f: ChainMap, g: ChainMap) -> ChainComplex:
    """``P_n = A_n ⊕ B_n ⊕ C_{n+1}``, ``d(a, b, c) = (da, db, f a - g b - dc)``."""
    if f.target.ring != g.target.ring or f.ring != g.ring:
        raise RingMismatch("homotopy pullback needs maps over one ring")
    A, B, C = f.source, g.source, f.target
    ring = f.ring
    lo = min(A.lo, B.lo, C.lo - 1)
    hi = max(A.hi, B.hi, C.hi - 1)
    mods, diffs = {}, {}
    for n in range(lo, hi + 1):
        parts = [A.module(n), B.module(n), C.module(n + 1)]
        mods[n] = FPModule(ring, sum(P.ngens for P in parts), block_diag([P.relations for P in parts]))
    for n in range(lo, hi + 2):
        rs = [A.ngens(n - 1), B.ngens(n - 1), C.ngens(n)]
        cs = [A.ngens(n), B.ngens(n), C.ngens(n + 1)]
        grid = [[A.d(n), None, None],
                [None, B.d(n), None],
                [f[n], -g[n], -C.d(n + 1)]]
        diffs[n] = block_matrix(grid, rs, cs)
    return ChainComplex(ring, mods, diffs, validate=False)


def pullback_shape_parts(shape: FiniteCategory) -> tuple[str, str, str]:
    """``(corner, corner, apex)`` of a cospan ``x -> z <- y``."""
    if len(shape.objects) != 3 or len(shape.arrows) != 2:
        raise ValueError("not a pullback (cospan) shape")
    targets = {t for _, t in shape.arrows}
    if len(targets) != 1:
        raise ValueError("not a pullback (cospan) shape")
    apex = targets.pop()
    x, y = sorted(s for s, _ in shape.arrows)
    return x, y, apex


def holim_pullback(X: ModuleDiagram, base: Ring) -> ChainComplex:
    """``homotopy_pullback`` of a cospan diagram restricted to ``base``."""
    x, y, z = pullback_shape_parts(X.shape)
    res = {s: _base_restriction(X.rings, base, s) for s in (x, y, z)}
    f = ChainMap(X.value(x).restrict(res[x]), X.value(z).restrict(res[z]),
                 {n: lift_matrix(res[z], m) for n, m in X.structure(x, z).maps.items()}, validate=False)
    g = ChainMap(X.value(y).restrict(res[y]), f.target,
                 {n: lift_matrix(res[z], m) for n, m in X.structure(y, z).maps.items()}, validate=False)
    return homotopy_pullback(f, g)


def holim_map(f: DiagramMap, base: Ring, src: Totalization | None = None,
              tgt: Totalization | None = None) -> ChainMap:
    """The map of totalizations induced by a diagram map."""
    src = src or bk_holim(f.source, base)
    tgt = tgt or bk_holim(f.target, base)
    rings = f.rings
    maps = {}
    for n, summands in src.blocks.items():
        if n not in tgt.blocks:
            continue
        blocks = []
        for k, c in summands:
            r = _base_restriction(rings, base, c[-1])
            blocks.append(lift_matrix(r, f[c[-1]][n + k]))
        maps[n] = block_diag(blocks)
    return ChainMap(src.complex, tgt.complex, maps, validate=False)


# ----------------------------------------------------------------------
# adjunctions and the cellularization checker
# ----------------------------------------------------------------------

@dataclass
class AdjunctionInstance:
    """A named adjoint pair with realized unit and counit.

    ``unit(A)`` is a map ``A -> right(left(A))``; ``counit(B)`` a map
    ``left(right(B)) -> B``.  ``left_map``/``right_map`` act on morphisms and
    ``replace`` gives a cofibrant replacement with its weak equivalence.
    """

    name: str
    left: Callable
    right: Callable
    unit: Callable
    counit: Callable
    left_map: Callable | None = None
    right_map: Callable | None = None
    replace: Callable | None = None
    notes: list = field(default_factory=list)


def base_change_adjunction(f: RingMap) -> AdjunctionInstance:
    """``(base_change, restrict)`` along a ring map, acting on complexes."""

    def right(N: ChainComplex) -> ChainComplex:
        if not f.is_module_finite:
            raise NotModuleFinite(f"{f.target} is not finite over {f.source}")
        return N.restrict(f)

    def unit(C: ChainComplex) -> ChainMap:
        UF = right(C.base_change(f))
        return ChainMap(C, UF, {n: Matrix.identity(C.ngens(n)) for n in C.degrees}, validate=False)

    def counit(N: ChainComplex) -> ChainMap:
        FU = right(N).base_change(f)
        return ChainMap(FU, N, {n: Matrix.identity(N.ngens(n)) for n in N.degrees}, validate=False)

    def left_map(g: ChainMap) -> ChainMap:
        return g.base_change(f)

    def right_map(g: ChainMap) -> ChainMap:
        return g.restrict(f)

    return AdjunctionInstance(f"base change / restriction along {f}", lambda C: C.base_change(f), right,
                              unit, counit, left_map, right_map)


def left_kan_adjunction(incl: Inclusion, rings: RingDiagram) -> AdjunctionInstance:
    """``(i_*, i^*)``: left Kan extension and restriction."""
    sub_rings = rings.restrict_to(incl.sub)

    def left(X):
        return left_kan(incl, rings, X).diagram

    def unit(X):
        return left_kan_unit(left_kan(incl, rings, X), X)

    def counit(Y):
        return left_kan_counit(incl, Y)

    def left_map(f):
        return left_kan_map(f, left_kan(incl, rings, f.source), left_kan(incl, rings, f.target))

    def right_map(f):
        return restrict_diagram_map(incl, f)

    adj = AdjunctionInstance("left Kan extension / restriction", left, lambda Y: restrict_diagram(incl, Y),
                             unit, counit, left_map, right_map)
    adj.notes.append(f"over {sub_rings.shape} inside {rings.shape}")
    return adj


def right_kan_adjunction(incl: Inclusion, rings: RingDiagram) -> AdjunctionInstance:
    """``(i^*, i_!)``: restriction and right Kan extension."""

    def right(X):
        return right_kan(incl, rings, X).diagram

    def unit(Y):
        return right_kan_unit(incl, Y)

    def counit(X):
        return right_kan_counit(right_kan(incl, rings, X), X)

    def left_map(f):
        return restrict_diagram_map(incl, f)

    def right_map(f):
        return right_kan_map(f, right_kan(incl, rings, f.source), right_kan(incl, rings, f.target))

    return AdjunctionInstance("restriction / right Kan extension", lambda Y: restrict_diagram(incl, Y), right,
                              unit, counit, left_map, right_map)


@dataclass
class CellVerdict:
    cell: str
    verdict: bool
    cone_homology: dict
    valid_through: int | None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"cell": self.cell, "verdict": self.verdict,
                "cone_homology": {str(n): [r, list(f)] for n, (r, f) in sorted(self.cone_homology.items())},
                "valid_through": self.valid_through, "notes": list(self.notes)}


@dataclass
class CellularizationReport:
    adjunction: str
    case: int
    cells: list
    verdict: bool
    banners: list = field(default_factory=lambda: [HYPOTHESES_BANNER, SMALLNESS_NOTE])

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        return {"adjunction": self.adjunction, "case": self.case, "verdict": self.verdict,
                "banners": list(self.banners), "cells": [c.to_dict() for c in self.cells]}


def _window(L: int, C: ChainComplex) -> range:
    return range(min(C.lo, 0) - 1, L)


def _qi(f, window=None):
    if isinstance(f, DiagramMap):
        table, ok = {}, True
        for s in f.shape.objects:
            rep = is_quasi_iso(f[s], window)
            ok = ok and rep.verdict
            for n, v in rep.cone_homology.items():
                if v[0] or v[1]:
                    table[(s, n)] = v
        return ok, table
    rep = is_quasi_iso(f, window)
    return rep.verdict, {n: v for n, v in rep.cone_homology.items() if v[0] or v[1]}


def check_cellularization_hypotheses(adj: AdjunctionInstance, cells: Sequence, resolution_length: int = 4,
                                     case: int = 1, names: Sequence[str] | None = None) -> CellularizationReport:
    """Derived unit (case 1) or counit (case 2) checks on each cell.

    Module cells are replaced by a free resolution of the given length; the
    verdict is then valid in degrees ``<= L - 1``.  Complex and diagram cells
    are used as given and must already be cofibrant (degreewise free).
    """
    L = resolution_length
    out = []
    for idx, cell in enumerate(cells):
        name = names[idx] if names else f"cell{idx}"
        notes = []
        valid = None
        if isinstance(cell, FPModule):
            res = free_resolution(cell, L)
            P, aug, valid = res.complex, res.augmentation, res.valid_through
            notes.append(f"free resolution of length {L}")
        else:
            P, aug = cell, None
        if case == 1:
            if isinstance(P, ChainComplex) and not P.is_degreewise_presented_free():
                notes.append("cell is not degreewise free; used as given")
            eta = adj.unit(P)
            window = range(P.lo - 1, L) if valid is not None else None
            ok, table = _qi(eta, window)
        else:
            B = ChainComplex.concentrated(cell) if isinstance(cell, FPModule) else cell
            U = adj.right(B)
            if isinstance(cell, FPModule):
                res = free_resolution(U.module(0), L)
                valid = res.valid_through
                aug = ChainMap(res.complex, U, res.augmentation.maps, validate=False)
                eps = adj.left_map(aug).then(adj.counit(B))
                ok, table = _qi(eps, range(-1, L))
                notes.append(f"right image resolved with length {L}")
            else:
                ok, table = _qi(adj.counit(B))
        out.append(CellVerdict(name, ok, table, valid, notes))
    return CellularizationReport(adj.name, case, out, all(c.verdict for c in out))

