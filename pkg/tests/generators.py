"""Random shapes, rings, complexes and diagrams shared by the test modules."""

from __future__ import annotations

import itertools
import random
from math import gcd

from diagmod.category import FiniteCategory, Inclusion, linear_extension, validate_category
from diagmod.complexes import ChainComplex, ChainMap, direct_sum
from diagmod.diagrams import DiagramMap, ModuleDiagram, RingDiagram, free_diagram
from diagmod.linalg import Matrix, block_diag
from diagmod.rings import Ring, canonical_map, has_canonical_map

Z = Ring.integers()

LOCAL_POOL = [Z, Ring.localization(2), Ring.localization(3), Ring.localization(2, 3), Ring.localization(5)]
QUOTIENT_POOL = [Ring.quotient(n) for n in (2, 3, 4, 6, 8, 9, 12, 18, 24, 36)]
MIXED_POOL = LOCAL_POOL + QUOTIENT_POOL + [Ring.quotient(3, [2]), Ring.quotient(5, [2, 3]), Ring.quotient(1)]


# ----------------------------------------------------------------------
# shapes
# ----------------------------------------------------------------------

def random_poset(rng: random.Random, n: int, density: float = 0.5) -> FiniteCategory:
    """Objects ``"0".."n-1"``; arrows only go up in index, then closed."""
    objs = [str(i) for i in range(n)]
    arrows = [(objs[i], objs[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return validate_category(objs, arrows, close=True)


def all_posets(n: int) -> list[FiniteCategory]:
    """Every poset on ``n`` objects up to isomorphism (naturally labelled, deduplicated)."""
    pairs = list(itertools.combinations(range(n), 2))
    seen, out = set(), []
    perms = list(itertools.permutations(range(n)))
    for mask in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if mask >> k & 1}
        if any((a, b) in rel and (b, c) in rel and (a, c) not in rel
               for a in range(n) for b in range(n) for c in range(n)):
            continue
        key = min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in perms)
        if key in seen:
            continue
        seen.add(key)
        objs = [str(i) for i in range(n)]
        out.append(validate_category(objs, [(str(a), str(b)) for a, b in rel]))
    return out


def random_full_inclusion(rng: random.Random, cat: FiniteCategory, min_size: int = 1) -> Inclusion:
    k = rng.randint(min_size, len(cat.objects))
    return Inclusion.of(cat, sorted(rng.sample(list(cat.objects), k)))


def topological(cat: FiniteCategory) -> list[str]:
    ext = linear_extension(cat)
    return sorted(cat.objects, key=lambda s: (ext[s], s))


# ----------------------------------------------------------------------
# rings
# ----------------------------------------------------------------------

def random_ring_diagram(rng: random.Random, cat: FiniteCategory, pool=MIXED_POOL, *,
                        finite_over: Ring | None = None) -> RingDiagram:
    """Rings chosen in topological order so that every arrow has a canonical map.

    With ``finite_over`` every ring is module-finite over that base and every
    arrow is module-finite.
    """
    rings: dict[str, Ring] = {}
    for t in topological(cat):
        preds = [rings[s] for s, u in cat.non_identity_arrows() if u == t]
        cands = [R for R in pool if all(has_canonical_map(P, R) for P in preds)]
        if finite_over is not None:
            cands = [R for R in cands if has_canonical_map(finite_over, R)
                     and canonical_map(finite_over, R).is_module_finite
                     and all(canonical_map(P, R).is_module_finite for P in preds)]
        rings[t] = rng.choice(cands) if cands else Ring.quotient(1)  # the zero ring receives every map
    return RingDiagram(cat, rings)


def random_square_rings(rng: random.Random) -> RingDiagram:
    """Module-finite rings over Z on the pullback shape ``0 -> 01 <- 1``."""
    cat = validate_category(["0", "1", "01"], [("0", "01"), ("1", "01")])
    a, b = rng.choice([0, 4, 6, 8, 12, 18]), rng.choice([0, 4, 6, 8, 12, 18])
    g = gcd(a, b)
    divs = [d for d in range(1, 37) if g == 0 or g % d == 0] + ([0] if g == 0 else [])
    c = rng.choice(divs)
    return RingDiagram(cat, {"0": Ring.quotient(a), "1": Ring.quotient(b), "01": Ring.quotient(c)})


# ----------------------------------------------------------------------
# complexes
# ----------------------------------------------------------------------

def random_complex(rng: random.Random, ring: Ring) -> ChainComplex:
    kind = rng.choice(["sphere", "disk", "koszul", "two", "sphere2"])
    n = rng.randint(0, 1)
    if kind == "sphere":
        return ChainComplex.sphere(ring, n, rng.randint(1, 2))
    if kind == "disk":
        return ChainComplex.disk(ring, n + 1)
    if kind == "koszul":
        return ChainComplex.free(ring, {n: 1, n + 1: 1}, {n + 1: Matrix(1, 1, [[rng.choice([0, 2, 3, 4, 6])]])})
    if kind == "two":
        d = Matrix(2, 2, [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)])
        return ChainComplex.free(ring, {n: 2, n + 1: 2}, {n + 1: d})
    return ChainComplex.free(ring, {0: 1, 1: 2, 2: 1},
                             {1: Matrix(1, 2, [[2, 2]]), 2: Matrix(2, 1, [[1], [-1]])})


def scalar_map(C: ChainComplex, k: int) -> ChainMap:
    return ChainMap(C, C, {n: Matrix.scalar(C.ngens(n), k) for n in C.degrees}, validate=False)


# ----------------------------------------------------------------------
# diagrams
# ----------------------------------------------------------------------

def sum_diagrams(X: ModuleDiagram, Y: ModuleDiagram) -> tuple[ModuleDiagram, DiagramMap, DiagramMap, DiagramMap, DiagramMap]:
    """``X ⊕ Y`` with injections and projections."""
    values = {s: direct_sum(X.value(s), Y.value(s)) for s in X.shape.objects}
    structure = {}
    for s, t in X.shape.non_identity_arrows():
        mx, my = X.structure(s, t), Y.structure(s, t)
        degs = set(mx.degrees) | set(my.degrees)
        structure[(s, t)] = {n: block_diag([mx[n], my[n]]) for n in degs}
    S = ModuleDiagram(X.rings, values, structure, validate=False)

    def inj(first: bool):
        comps = {}
        for s in X.shape.objects:
            a, b = X.value(s), Y.value(s)
            comps[s] = {}
            for n in S.value(s).degrees:
                ga, gb = a.ngens(n), b.ngens(n)
                top = Matrix.identity(ga) if first else Matrix.zeros(ga, gb)
                bot = Matrix.zeros(gb, ga) if first else Matrix.identity(gb)
                cols = ga if first else gb
                comps[s][n] = Matrix(ga + gb, cols, [list(r) for r in top.data] + [list(r) for r in bot.data]) \
                    if ga + gb and cols else Matrix.zeros(ga + gb, cols)
        return DiagramMap(X if first else Y, S, comps, validate=False)

    def proj(first: bool):
        i = inj(first)
        return DiagramMap(S, X if first else Y, {s: {n: m.T for n, m in i[s].maps.items()} for s in X.shape.objects},
                          validate=False)

    return S, inj(True), inj(False), proj(True), proj(False)


def random_free_diagram(rng: random.Random, rings: RingDiagram, pieces: int | None = None) -> ModuleDiagram:
    """Direct sum of one to three free diagrams ``F^s_A`` at random objects."""
    objs = list(rings.shape.objects)
    pieces = pieces or rng.randint(1, 3)
    X = None
    for _ in range(pieces):
        s = rng.choice(objs)
        F = free_diagram(rings, s, random_complex(rng, rings.ring(s)))
        X = F if X is None else sum_diagrams(X, F)[0]
    return X


def scaled_diagram(rings: RingDiagram, C: ChainComplex, k: int) -> ModuleDiagram:
    """``R(s) ⊗ C`` with structure maps ``k^(h(t) - h(s))`` for a linear extension ``h``.

    ``C`` lives over a ring mapping to every ``R(s)``.  The scalars satisfy
    the cocycle condition, so transitivity holds.
    """
    h = linear_extension(rings.shape)
    values = {s: C.base_change(canonical_map(C.ring, rings.ring(s))) for s in rings.shape.objects}
    structure = {}
    for s, t in rings.shape.non_identity_arrows():
        V = values[t]
        structure[(s, t)] = {n: Matrix.scalar(V.ngens(n), k ** (h[t] - h[s])) for n in V.degrees}
    return ModuleDiagram(rings, values, structure)


def random_scaled_diagram(rng: random.Random, rings: RingDiagram, base: Ring = Z) -> ModuleDiagram:
    return scaled_diagram(rings, random_complex(rng, base), rng.choice([1, 1, 2, 3, -1]))


def random_pullback_diagram(rng: random.Random, rings: RingDiagram | None = None) -> ModuleDiagram:
    """``X(0) -> X(01) <- X(1)`` with ``X(01) = R(01) ⊗ (A ⊕ B ⊕ W)`` and scaled inclusions."""
    rings = rings or random_square_rings(rng)
    A, B, W = (random_complex(rng, Z) for _ in range(3))
    if rng.random() < 0.3:
        W = ChainComplex.zero(Z)
    apex = direct_sum(A, B, W)
    to = {s: canonical_map(Z, rings.ring(s)) for s in rings.shape.objects}
    values = {"0": A.base_change(to["0"]), "1": B.base_change(to["1"]), "01": apex.base_change(to["01"])}
    ka, kb = rng.choice([1, 2, 3, -1, 0]), rng.choice([1, 2, 3, -1])
    shared = rng.random() < 0.3 and A.ngens(0) == B.ngens(0) and all(A.ngens(n) == B.ngens(n) for n in range(-1, 4)) \
        and all(A.d(n) == B.d(n) for n in range(-1, 4))

    def incl(block: int, C: ChainComplex, k: int):
        out = {}
        for n in apex.degrees:
            offs = [0, A.ngens(n), A.ngens(n) + B.ngens(n)]
            rows = apex.ngens(n)
            g = C.ngens(n)
            data = [[k if r == offs[block] + c else 0 for c in range(g)] for r in range(rows)]
            out[n] = Matrix(rows, g, data) if rows and g else Matrix.zeros(rows, g)
        return out

    structure = {("0", "01"): incl(0, A, ka), ("1", "01"): incl(0 if shared else 1, B, kb)}
    return ModuleDiagram(rings, values, structure)
