"""Arithmetic fracture squares built from two-prime localizations.

For a base Z[S0^-1] and primes p, q outside S0 the square

    Z[S0^-1]      ->  Z[(S0+p)^-1]
       |                  |
    Z[(S0+q)^-1]  ->  Z[(S0+pq)^-1]

is a pullback of rings, and a finitely generated base module is recovered
from its three localizations.  Torsion is handled with finite presentations;
free summands need the non-finitely-generated localizations and are handled
by partial-fraction witnesses.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .category import FiniteCategory, Inclusion, add_initial
from .complexes import ChainComplex, ChainMap, homology_table, is_quasi_iso, tor
from .diagrams import ModuleDiagram, RingDiagram
from .errors import InvalidSquare, OracleDisagreement
from .kan import HYPOTHESES_BANNER, SMALLNESS_NOTE, homotopy_pullback, left_kan, left_kan_counit, restrict_diagram
from .linalg import Matrix
from .modules import FPModule, base_change, restrict_torsion
from .rings import Ring, canonical_map, factorize, is_prime

CORNER_P, CORNER_Q, APEX = "0", "1", "01"
PER_MODULE_NOTE = ("per-module derived-unit checks certify the cellularization hypotheses "
                   "for the tested cells, not the equivalence of module categories")
FLATNESS_NOTE = "localizations are flat: Tor_1 vanishes, so derived and underived base change agree"


@dataclass(frozen=True)
class LocalizationSquare:
    inverted: frozenset
    p: int
    q: int

    def __post_init__(self):
        inv = frozenset(int(x) for x in self.inverted)
        object.__setattr__(self, "inverted", inv)
        for x in (self.p, self.q):
            if not is_prime(x):
                raise InvalidSquare(f"{x} is not a prime")
            if x in inv:
                raise InvalidSquare(f"{x} is already inverted in the base")
        if self.p == self.q:
            raise InvalidSquare("the two primes must differ")

    @classmethod
    def from_spec(cls, spec: dict) -> "LocalizationSquare":
        try:
            return cls(frozenset(spec.get("S0", [])), int(spec["p"]), int(spec["q"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidSquare):
                raise
            raise InvalidSquare(f"bad square spec {spec!r}: {exc}") from exc

    def to_spec(self) -> dict:
        return {"S0": sorted(self.inverted), "p": self.p, "q": self.q}

    @property
    def base(self) -> Ring:
        return Ring(self.inverted)

    @property
    def corner_p(self) -> Ring:
        return Ring(self.inverted | {self.p})

    @property
    def corner_q(self) -> Ring:
        return Ring(self.inverted | {self.q})

    @property
    def apex(self) -> Ring:
        return Ring(self.inverted | {self.p, self.q})

    def shape(self) -> FiniteCategory:
        return FiniteCategory((CORNER_P, CORNER_Q, APEX), frozenset({(CORNER_P, APEX), (CORNER_Q, APEX)}))

    def ring_diagram(self) -> RingDiagram:
        return RingDiagram(self.shape(), {CORNER_P: self.corner_p, CORNER_Q: self.corner_q, APEX: self.apex})

    def extended_ring_diagram(self) -> tuple[RingDiagram, str]:
        """The square's ring diagram with the base adjoined as an initial object."""
        shape, z = add_initial(self.shape())
        rings = dict(self.ring_diagram().rings)
        rings[z] = self.base
        return RingDiagram(shape, rings), z

    def __str__(self) -> str:
        return f"{self.base} = {self.corner_p} x_{self.apex} {self.corner_q}"


# ----------------------------------------------------------------------
# the ring pullback
# ----------------------------------------------------------------------

@dataclass
class Witness:
    element: Fraction
    a: Fraction      # in the p-corner
    b: Fraction      # in the q-corner, with a - b == element
    alpha: int
    beta: int

    def to_dict(self) -> dict:
        return {"element": str(self.element), "a": str(self.a), "b": str(self.b),
                "alpha": self.alpha, "beta": self.beta}


def bezout_witness(square: LocalizationSquare, x: Fraction, i: int, j: int) -> Witness:
    """Split ``x / (p^i q^j)`` as ``a - b`` with ``a`` in the p-corner and ``b`` in the q-corner."""
    p, q = square.p, square.q
    pi, qj = p ** i, q ** j
    alpha = pow(qj, -1, pi) if pi > 1 else 0
    beta = (1 - alpha * qj) // pi
    assert alpha * qj + beta * pi == 1
    a = Fraction(x) * alpha / pi
    b = -Fraction(x) * beta / qj
    if i == 0 and j == 0:
        a, b, alpha, beta = Fraction(x), Fraction(0), 1, 0
    return Witness(Fraction(x) / (pi * qj), a, b, alpha, beta)


@dataclass
class PullbackReport:
    square: LocalizationSquare
    verdict: bool
    kernel_ok: bool
    surjective: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        return {"square": self.square.to_spec(), "verdict": self.verdict, "kernel": self.kernel_ok,
                "surjective": self.surjective, "witnesses": [w.to_dict() for w in self.witnesses]}


def verify_ring_pullback(square: LocalizationSquare, depth: int = 3) -> PullbackReport:
    """Check that the base is the pullback of the two corners over the apex.

    Kernel: an element of both corners has denominator free of p and q, so it
    lies in the base.  Surjectivity: every apex generator ``1/(p^i q^j)``
    (``i, j <= depth``) is a difference ``a - b`` with an explicit witness.
    """
    Rp, Rq, Rpq, R = square.corner_p, square.corner_q, square.apex, square.base
    kernel_ok = (Rp.inverted & Rq.inverted) == R.inverted
    kernel_ok = kernel_ok and not Rq.contains(Fraction(1, square.p)) and not Rp.contains(Fraction(1, square.q))
    witnesses = []
    surjective = True
    for i in range(depth + 1):
        for j in range(depth + 1):
            w = bezout_witness(square, Fraction(1), i, j)
            ok = (w.a - w.b == w.element and Rp.contains(w.a) and Rq.contains(w.b)
                  and Rpq.contains(w.element))
            surjective = surjective and ok
            witnesses.append(w)
    verdict = kernel_ok and surjective
    if not verdict:
        raise InvalidSquare(f"{square} is not a pullback of rings")
    return PullbackReport(square, verdict, kernel_ok, surjective, witnesses)


# ----------------------------------------------------------------------
# module specs
# ----------------------------------------------------------------------

def module_from_spec(base: Ring, spec: dict) -> FPModule:
    """``{rank: r, torsion: [[p, e], ...]}`` -> ``base^r ⊕ ⊕ base/(p^e)``."""
    rank = int(spec.get("rank", 0))
    orders = [int(p) ** int(e) for p, e in spec.get("torsion", [])]
    return FPModule.from_invariants(base, rank, orders)


def primary_parts(M: FPModule) -> tuple[int, list[tuple[int, int]]]:
    """Free rank and the primary cyclic factors ``(prime, exponent)`` of ``M``."""
    rank, factors = M.invariants()
    parts = []
    for d in factors:
        parts.extend(factorize(int(d)))
    return rank, sorted(parts)


# ----------------------------------------------------------------------
# reconstruction
# ----------------------------------------------------------------------

@dataclass
class FactorVerdict:
    kind: str                  # "free" or "torsion"
    prime: int | None
    exponent: int | None
    corners: dict
    exact: bool
    holim: dict
    witnesses: list = field(default_factory=list)
    rule: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "prime": self.prime, "exponent": self.exponent, "rule": self.rule,
                "corners": self.corners, "exact": self.exact,
                "holim": {str(n): [r, list(f)] for n, (r, f) in sorted(self.holim.items())},
                "witnesses": [w.to_dict() for w in self.witnesses]}


@dataclass
class FractureReport:
    square: LocalizationSquare
    module: tuple
    factors: list
    holim: dict
    flatness: dict
    verdict: bool
    notes: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        return {"square": self.square.to_spec(),
                "module": [self.module[0], list(self.module[1])],
                "verdict": self.verdict,
                "holim": {str(n): [r, list(f)] for n, (r, f) in sorted(self.holim.items())},
                "flatness": self.flatness,
                "factors": [f.to_dict() for f in self.factors],
                "notes": list(self.notes)}


def _inv(M: FPModule) -> list:
    r, f = M.invariants()
    return [r, list(f)]


def _torsion_factor(square: LocalizationSquare, r: int, e: int) -> FactorVerdict:
    R = square.base
    M = FPModule.cyclic(R, r ** e)
    pieces = {}
    for key, ring in ((CORNER_P, square.corner_p), (CORNER_Q, square.corner_q), (APEX, square.apex)):
        pieces[key] = restrict_torsion(base_change(M, canonical_map(R, ring)), canonical_map(R, ring))[0]
    A, B, C = (ChainComplex.concentrated(pieces[k]) for k in (CORNER_P, CORNER_Q, APEX))
    f = ChainMap(A, C, {0: Matrix.identity(1)}, validate=False)
    g = ChainMap(B, C, {0: Matrix.identity(1)}, validate=False)
    P = homotopy_pullback(f, g)
    table = homology_table(P, range(-2, 2))
    # The comparison M -> P is the diagonal; its exactness is the quasi-isomorphism.
    Mc = ChainComplex.concentrated(M)
    diag = ChainMap(Mc, P, {0: Matrix(P.ngens(0), 1, [[1]] * P.ngens(0))}, validate=False)
    exact = bool(is_quasi_iso(diag))
    if r == square.p:
        rule = "p-power torsion: p-corner 0, q-corner M, apex 0"
    elif r == square.q:
        rule = "q-power torsion: p-corner M, q-corner 0, apex 0"
    else:
        rule = "torsion prime to p and q: all three pieces equal M"
    return FactorVerdict("torsion", r, e, {k: _inv(v) for k, v in pieces.items()}, exact, table, rule=rule)


def _free_factor(square: LocalizationSquare, pullback: PullbackReport) -> FactorVerdict:
    R = square.base
    M = FPModule.free(R, 1)
    corners = {k: _inv(base_change(M, canonical_map(R, ring)))
               for k, ring in ((CORNER_P, square.corner_p), (CORNER_Q, square.corner_q), (APEX, square.apex))}
    exact = pullback.kernel_ok and pullback.surjective and all(c == [1, []] for c in corners.values())
    table = {n: (0, ()) for n in range(-2, 2)}
    if exact:
        table[0] = (1, ())
    return FactorVerdict("free", None, None, corners, exact, table, witnesses=pullback.witnesses[:4],
                         rule="free: kernel by denominators, cokernel by partial fractions")


def fracture_reconstruct(M: FPModule, square: LocalizationSquare, *, depth: int = 3) -> FractureReport:
    """Recover ``M`` as the homotopy pullback of its three localizations."""
    R = square.base
    if M.ring != R:
        raise InvalidSquare(f"module lives over {M.ring}, square base is {R}")
    pullback = verify_ring_pullback(square, depth)
    rank, parts = primary_parts(M)
    factors = [_free_factor(square, pullback) for _ in range(rank)]
    factors += [_torsion_factor(square, r, e) for r, e in parts]
    holim_rank = sum(f.holim[0][0] for f in factors)
    orders = [d for f in factors for d in f.holim[0][1]]
    H0 = FPModule.from_invariants(R, holim_rank, orders)
    holim = {n: (0, ()) for n in range(-2, 2)}
    holim[0] = H0.invariants()
    others_vanish = all(not f.holim[n][0] and not f.holim[n][1] for f in factors for n in f.holim if n != 0)
    flat = {}
    for key, ring in ((CORNER_P, square.corner_p), (CORNER_Q, square.corner_q), (APEX, square.apex)):
        flat[key] = tor(M, canonical_map(R, ring), 1).module.is_zero()
    verdict = (H0.invariants() == M.invariants() and others_vanish and all(f.exact for f in factors)
               and all(flat.values()))
    notes = [FLATNESS_NOTE, PER_MODULE_NOTE]
    return FractureReport(square, M.invariants(), factors, holim, flat, verdict, notes)


# ----------------------------------------------------------------------
# brute-force truncation oracle
# ----------------------------------------------------------------------

@dataclass
class WindowCheck:
    bound: int
    kernel_defect: int
    cokernel_defect: int

    @property
    def exact(self) -> bool:
        return self.kernel_defect == 0 and self.cokernel_defect == 0


@dataclass
class OracleReport:
    square: LocalizationSquare
    module: tuple
    bound: int
    torsion: list
    free: list
    verdict: bool
    agrees: bool | None = None

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        def checks(cs):
            return [{"bound": c.bound, "kernel_defect": c.kernel_defect, "cokernel_defect": c.cokernel_defect}
                    for c in cs]
        return {"square": self.square.to_spec(), "bound": self.bound, "verdict": self.verdict,
                "agrees": self.agrees,
                "torsion": [{"order": m, "checks": checks(cs)} for m, cs in self.torsion],
                "free": checks(self.free)}


def _torsion_window(m: int, p: int, q: int, units: frozenset, B: int) -> WindowCheck:
    """Enumerate ``Z/m`` localized at p, q and pq through denominators ``p^i q^j``, ``i, j <= B``.

    ``x / (p^i q^j)`` is keyed by ``x p^(K-i) q^(K-j) mod m`` with ``K`` large, which
    identifies exactly the equal fractions (multiplication by an invertible
    prime is injective, by a nilpotent one eventually zero).
    """
    if any(m % u == 0 for u in units):
        m = 1
    K = 2 * B + m.bit_length() + 1
    P, Q = p ** K, q ** K

    Mp = {x * p ** (K - i) % m for x in range(m) for i in range(B + 1)}
    Mq = {x * q ** (K - j) % m for x in range(m) for j in range(B + 1)}
    Mpq = {x * p ** (K - i) * q ** (K - j) % m for x in range(m) for i in range(B + 1) for j in range(B + 1)}
    to_apex_p = {a: a * Q % m for a in Mp}
    to_apex_q = {b: b * P % m for b in Mq}
    cq = Counter(to_apex_q.values())
    kernel_size = sum(cq[img] for img in to_apex_p.values())
    image_of_M = {(x * P % m, x * Q % m) for x in range(m)}
    kernel_defect = (kernel_size - len(image_of_M)) + (m - len(image_of_M))
    missing = set(Mpq)
    images_q = set(to_apex_q.values())
    for a in set(to_apex_p.values()):
        missing -= {(a - b) % m for b in images_q}
        if not missing:
            break
    cokernel_defect = len(missing)
    return WindowCheck(B, kernel_defect, cokernel_defect)


def _free_window(p: int, q: int, B: int) -> WindowCheck:
    """Search decompositions of apex generators and non-base kernel elements in the window."""
    cokernel_defect = 0
    for i in range(B + 1):
        for j in range(B + 1):
            target = Fraction(1, p ** i * q ** j)
            found = False
            for u in range(-p ** i * q ** j, p ** i * q ** j + 1):
                a = Fraction(u, p ** i)
                b = a - target
                if _denominator_power(b, q) is not None and _denominator_power(b, q) <= B:
                    found = True
                    break
            cokernel_defect += not found
    kernel_defect = 0
    for i in range(B + 1):
        for u in range(-p ** B, p ** B + 1):
            a = Fraction(u, p ** i)
            k = _denominator_power(a, q)
            if k is not None and a.denominator != 1:
                kernel_defect += 1
    return WindowCheck(B, kernel_defect, cokernel_defect)


def _denominator_power(x: Fraction, r: int) -> int | None:
    """``k`` if the denominator of ``x`` is exactly ``r^k``, else ``None``."""
    d, k = x.denominator, 0
    while d % r == 0:
        d //= r
        k += 1
    return k if d == 1 else None


def truncation_oracle(M: FPModule, square: LocalizationSquare, bound: int = 3, *,
                      reference: FractureReport | None = None) -> OracleReport:
    """Window enumeration independent of the closed forms; raises on disagreement."""
    if bound < 1:
        raise ValueError("truncation bound must be at least 1")
    rank, factors = M.invariants()
    p, q = square.p, square.q
    torsion = []
    for r, e in primary_parts(M)[1]:
        m = r ** e
        torsion.append((m, [_torsion_window(m, p, q, square.inverted, B) for B in (bound, bound + 1)]))
    free = [_free_window(p, q, B) for B in (bound, bound + 1)] if rank else []
    torsion_ok = all(c.exact for _, cs in torsion for c in cs)
    free_ok = not free or (free[0].exact and free[1].exact)
    verdict = torsion_ok and free_ok
    report = OracleReport(square, (rank, factors), bound, torsion, free, verdict)
    if reference is not None:
        report.agrees = reference.verdict == verdict
        if not report.agrees:
            raise OracleDisagreement(f"closed forms say {reference.verdict}, window enumeration says {verdict}")
    return report


# ----------------------------------------------------------------------
# the pipeline over the square with an adjoined base object
# ----------------------------------------------------------------------

@dataclass
class HasseReport:
    square: LocalizationSquare
    restriction: bool
    kan: bool
    unit: bool
    fracture: FractureReport
    verdict: bool
    banners: list = field(default_factory=lambda: [HYPOTHESES_BANNER, SMALLNESS_NOTE, PER_MODULE_NOTE])
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        return {"square": self.square.to_spec(), "verdict": self.verdict,
                "checks": {"restriction": self.restriction, "left_kan": self.kan, "derived_unit": self.unit},
                "details": self.details, "banners": list(self.banners),
                "fracture": self.fracture.to_dict()}


def hasse_pipeline(square: LocalizationSquare, M: FPModule) -> HasseReport:
    """Run the restriction, left Kan and derived-unit checks for ``M``."""
    verify_ring_pullback(square)
    R = square.base
    rings_plus, z = square.extended_ring_diagram()
    C = ChainComplex.concentrated(M)
    X_plus = ModuleDiagram.base_changed(rings_plus, C, R)
    X = ModuleDiagram.base_changed(square.ring_diagram(), C, R)
    incl = Inclusion.of(rings_plus.shape, [CORNER_P, CORNER_Q, APEX])
    restricted = restrict_diagram(incl, X_plus)
    restriction_ok = all(
        restricted.value(s).module(0).isomorphic(X.value(s).module(0)) for s in incl.sub.objects
    ) and all(restricted.structure(*a).equals(X.structure(*a)) for a in incl.sub.arrows)
    at_z = Inclusion.of(rings_plus.shape, [z])
    ext = left_kan(at_z, rings_plus, restrict_diagram(at_z, X_plus))
    counit = left_kan_counit(at_z, X_plus, ext)
    kan_ok = all(bool(is_quasi_iso(counit[s])) for s in incl.sub.objects)
    flat = all(tor(M, canonical_map(R, rings_plus.ring(s)), 1).module.is_zero() for s in incl.sub.objects)
    if kan_ok != (restriction_ok and flat):
        raise OracleDisagreement("left Kan check diverges from the restriction check under flatness")
    fr = fracture_reconstruct(M, square)
    details = {
        "corners": {s: _inv(X.value(s).module(0)) for s in incl.sub.objects},
        "kan_values": {s: _inv(ext[s].module(0)) for s in rings_plus.shape.objects},
        "flat": flat,
    }
    verdict = restriction_ok and kan_ok and fr.verdict
    return HasseReport(square, restriction_ok, kan_ok, fr.verdict, fr, verdict, details=details)
