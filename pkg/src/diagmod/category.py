"""Finite categories with at most one morphism between any two objects.

Such a category is a finite poset: composition is forced, so a category is
stored as its object ids (strings, kept sorted) and the set of non-identity
arrows ``(source, target)``.  Every enumeration is lexicographic on ids.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    CycleDetected,
    MissingComposite,
    NonIdentityEndomorphism,
    ParallelMorphisms,
    UnknownObject,
)

DIRECT = "direct"
INVERSE = "inverse"


def arrow_id(s: str, t: str) -> str:
    return f"{s}->{t}"


@dataclass(frozen=True)
class FiniteCategory:
    objects: tuple
    arrows: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(str(o) for o in self.objects)))
        object.__setattr__(self, "arrows", frozenset((str(s), str(t)) for s, t in self.arrows))

    # -- queries -------------------------------------------------------------
    def __contains__(self, obj) -> bool:
        return obj in self._objset

    @property
    def _objset(self) -> frozenset:
        return frozenset(self.objects)

    def require(self, obj: str) -> str:
        if obj not in self._objset:
            raise UnknownObject(f"{obj!r} is not an object of this category")
        return obj

    def hom(self, s: str, t: str) -> bool:
        """Whether the hom-set ``D(s, t)`` is nonempty (identities included)."""
        return s == t or (s, t) in self.arrows

    def non_identity_arrows(self) -> list[tuple[str, str]]:
        return sorted(self.arrows)

    def arrows_into(self, t: str) -> list[tuple[str, str]]:
        self.require(t)
        return sorted(a for a in self.arrows if a[1] == t)

    def arrows_out_of(self, s: str) -> list[tuple[str, str]]:
        self.require(s)
        return sorted(a for a in self.arrows if a[0] == s)

    def generating_arrows(self) -> list[tuple[str, str]]:
        """Arrows that are not composites of two non-identity arrows."""
        out = []
        for s, t in sorted(self.arrows):
            if not any((s, u) in self.arrows and (u, t) in self.arrows for u in self.objects):
                out.append((s, t))
        return out

    def opposite(self) -> "FiniteCategory":
        return FiniteCategory(self.objects, frozenset((t, s) for s, t in self.arrows))

    def full_subcategory(self, objs: Iterable[str]) -> "FiniteCategory":
        objs = {self.require(o) for o in objs}
        return FiniteCategory(tuple(objs), frozenset(a for a in self.arrows if a[0] in objs and a[1] in objs))

    def terminal_object(self) -> str | None:
        for t in self.objects:
            if all(self.hom(s, t) for s in self.objects):
                return t
        return None

    def initial_object(self) -> str | None:
        for s in self.objects:
            if all(self.hom(s, t) for t in self.objects):
                return s
        return None

    def is_empty(self) -> bool:
        return not self.objects

    def to_dict(self) -> dict:
        return {"objects": list(self.objects), "arrows": [list(a) for a in sorted(self.arrows)]}

    def __str__(self) -> str:
        arrows = ", ".join(arrow_id(s, t) for s, t in sorted(self.arrows))
        return f"FiniteCategory({list(self.objects)}; {arrows})"


def _parse_arrow(a) -> tuple[str, str, str | None]:
    if isinstance(a, dict):
        return str(a["source"]), str(a["target"]), a.get("name")
    if isinstance(a, str):
        s, _, t = a.partition("->")
        if not _:
            raise ValueError(f"arrow {a!r} is not of the form 's->t'")
        return s.strip(), t.strip(), None
    s, t = a[0], a[1]
    name = a[2] if len(a) > 2 else None
    return str(s), str(t), name


def transitive_closure(arrows: set[tuple[str, str]]) -> set[tuple[str, str]]:
    closed = set(arrows)
    changed = True
    while changed:
        changed = False
        for s, t in list(closed):
            for u, v in list(closed):
                if t == u and (s, v) not in closed:
                    closed.add((s, v))
                    changed = True
    return closed


def validate_category(objects: Iterable, arrows: Iterable = (), *, close: bool = False) -> FiniteCategory:
    """Build a category from raw object and arrow lists.

    With ``close=True`` the arrows are generators and composites are added;
    otherwise the list must already be closed under composition.
    """
    objs = [str(o) for o in objects]
    if len(set(objs)) != len(objs):
        raise ValueError("duplicate object ids")
    objset = set(objs)
    seen: dict[tuple[str, str], str | None] = {}
    for raw in arrows:
        s, t, name = _parse_arrow(raw)
        for o in (s, t):
            if o not in objset:
                raise UnknownObject(f"arrow {arrow_id(s, t)} mentions unknown object {o!r}")
        if s == t:
            raise NonIdentityEndomorphism(f"declared endomorphism {name or arrow_id(s, t)} of {s!r}")
        if (s, t) in seen:
            raise ParallelMorphisms(f"two morphisms {s!r} -> {t!r} declared")
        seen[(s, t)] = name
    pairs = set(seen)
    if close:
        pairs = transitive_closure(pairs)
    for s, t in pairs:
        if s == t or (t, s) in pairs:
            raise NonIdentityEndomorphism(f"objects {s!r} and {t!r} map to each other")
    if not close:
        for (s, t), (u, v) in ((a, b) for a in pairs for b in pairs):
            if t == u and (s, v) not in pairs:
                raise MissingComposite(f"composite {arrow_id(s, v)} of {arrow_id(s, t)} and {arrow_id(u, v)} missing")
    return FiniteCategory(tuple(objs), frozenset(pairs))


@dataclass(frozen=True)
class LinearExtension:
    degree: dict
    direction: str

    def __getitem__(self, obj: str) -> int:
        return self.degree[obj]


def linear_extension(cat: FiniteCategory, direction: str = DIRECT) -> LinearExtension:
    """Ranks rising (direct) or falling (inverse) along non-identity arrows.

    Kahn's topological sort; ties go to the lexicographically smallest id.
    """
    if direction not in (DIRECT, INVERSE):
        raise ValueError(f"direction must be {DIRECT!r} or {INVERSE!r}")
    edges = cat.arrows if direction == DIRECT else {(t, s) for s, t in cat.arrows}
    indeg = {o: 0 for o in cat.objects}
    succ = {o: [] for o in cat.objects}
    for s, t in edges:
        indeg[t] += 1
        succ[s].append(t)
    heap = [o for o, k in indeg.items() if k == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        o = heapq.heappop(heap)
        order.append(o)
        for t in succ[o]:
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(heap, t)
    if len(order) != len(cat.objects):
        raise CycleDetected("the arrows contain a cycle")
    return LinearExtension({o: k for k, o in enumerate(order)}, direction)


def is_direct(cat: FiniteCategory, ext: LinearExtension) -> bool:
    return all(ext[s] < ext[t] for s, t in cat.arrows)


def is_inverse(cat: FiniteCategory, ext: LinearExtension) -> bool:
    return all(ext[s] > ext[t] for s, t in cat.arrows)


# ----------------------------------------------------------------------
# index categories
# ----------------------------------------------------------------------

def latching_index(cat: FiniteCategory, t: str) -> FiniteCategory:
    """Non-identity arrows into ``t``; ``(s->t) -> (u->t)`` when ``s -> u``."""
    into = cat.arrows_into(t)
    objs = [arrow_id(*a) for a in into]
    arrows = [(arrow_id(*a), arrow_id(*b)) for a in into for b in into
              if a != b and cat.hom(a[0], b[0])]
    return FiniteCategory(tuple(objs), frozenset(arrows))


def matching_index(cat: FiniteCategory, s: str) -> FiniteCategory:
    """Non-identity arrows out of ``s``; ``(s->t) -> (s->u)`` when ``t -> u``."""
    out = cat.arrows_out_of(s)
    objs = [arrow_id(*a) for a in out]
    arrows = [(arrow_id(*a), arrow_id(*b)) for a in out for b in out
              if a != b and cat.hom(a[1], b[1])]
    return FiniteCategory(tuple(objs), frozenset(arrows))


@dataclass(frozen=True)
class Inclusion:
    """A full subcategory ``sub`` of ``ambient`` (object ids shared)."""

    sub: FiniteCategory
    ambient: FiniteCategory

    def __post_init__(self):
        for o in self.sub.objects:
            self.ambient.require(o)
        expected = self.ambient.full_subcategory(self.sub.objects)
        if expected.arrows != self.sub.arrows:
            raise ValueError("inclusion is not full")

    @classmethod
    def of(cls, ambient: FiniteCategory, objects: Iterable[str]) -> "Inclusion":
        return cls(ambient.full_subcategory(objects), ambient)

    def embedding(self) -> dict:
        return {o: o for o in self.sub.objects}


def slice_objects(incl: Inclusion, t: str) -> list[tuple[str, str]]:
    """Arrows ``s -> t`` of the ambient with ``s`` in the subcategory (identity included)."""
    incl.ambient.require(t)
    return [(s, t) for s in incl.sub.objects if incl.ambient.hom(s, t)]


def coslice_objects(incl: Inclusion, t: str) -> list[tuple[str, str]]:
    incl.ambient.require(t)
    return [(t, s) for s in incl.sub.objects if incl.ambient.hom(t, s)]


def slice(incl: Inclusion, t: str) -> FiniteCategory:
    """``D/t``: objects ``s -> t`` with ``s`` in D; morphisms are factorizations."""
    objs = slice_objects(incl, t)
    arrows = [(arrow_id(*a), arrow_id(*b)) for a in objs for b in objs
              if a != b and incl.sub.hom(a[0], b[0])]
    return FiniteCategory(tuple(arrow_id(*a) for a in objs), frozenset(arrows))


def coslice(incl: Inclusion, t: str) -> FiniteCategory:
    """``t/D``: objects ``t -> s`` with ``s`` in D; ``(t->s) -> (t->u)`` when ``s -> u``."""
    objs = coslice_objects(incl, t)
    arrows = [(arrow_id(*a), arrow_id(*b)) for a in objs for b in objs
              if a != b and incl.sub.hom(a[1], b[1])]
    return FiniteCategory(tuple(arrow_id(*a) for a in objs), frozenset(arrows))


def slice_terminal(incl: Inclusion, t: str) -> tuple[str, str] | None:
    """The terminal object of ``D/t`` if one exists."""
    objs = slice_objects(incl, t)
    for a in objs:
        if all(incl.sub.hom(b[0], a[0]) for b in objs):
            return a
    return None


def coslice_initial(incl: Inclusion, t: str) -> tuple[str, str] | None:
    objs = coslice_objects(incl, t)
    for a in objs:
        if all(incl.sub.hom(a[1], b[1]) for b in objs):
            return a
    return None


def add_initial(cat: FiniteCategory, tag: str = "z") -> tuple[FiniteCategory, str]:
    """Adjoin an initial object; returns the new category and the new object's id."""
    z = tag
    while z in cat:
        z += "'"
    arrows = set(cat.arrows) | {(z, o) for o in cat.objects}
    return FiniteCategory(cat.objects + (z,), frozenset(arrows)), z


def chains(cat: FiniteCategory, k: int) -> list[tuple[str, ...]]:
    """Nondegenerate ``k``-chains ``s_0 -> ... -> s_k``, lexicographically ordered."""
    if k < 0:
        return []
    out: list[tuple[str, ...]] = []

    def extend(prefix):
        if len(prefix) == k + 1:
            out.append(tuple(prefix))
            return
        last = prefix[-1]
        for t in cat.objects:
            if (last, t) in cat.arrows:
                extend(prefix + [t])

    for s in cat.objects:
        extend([s])
    return sorted(out)

