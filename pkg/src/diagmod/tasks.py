"""Task registry: each manifest op maps to a handler over a built workspace.

A handler returns a :class:`TaskOutcome` whose ``result`` is JSON-ready and
deterministic, plus a ``trace`` of human-readable lines (matrices, Smith
forms, witnesses) that ``explain`` prints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .category import DIRECT, INVERSE, arrow_id, linear_extension
from .complexes import ChainComplex, free_resolution, homology_table, is_quasi_iso, tor
from .diagrams import (
    colim_decomposition,
    generating_probes,
    is_diagram_cofibration,
    is_diagram_fibration,
    latching,
    matching,
    validate_diagram,
)
from .errors import ParseError
from .fracture import (
    fracture_reconstruct,
    hasse_pipeline,
    truncation_oracle,
    verify_ring_pullback,
)
from .kan import (
    base_change_adjunction,
    bk_holim,
    check_cellularization_hypotheses,
    holim_pullback,
    left_kan,
    left_kan_unit,
    pullback_shape_parts,
    restrict_diagram,
    right_kan,
    right_kan_counit,
)
from .linalg import Matrix, smith_form
from .modules import FPModule, lifted
from .rings import Ring, canonical_map

DEFAULT_RESOLUTION_LENGTH = 4
DEFAULT_TRUNCATION_BOUND = 3


@dataclass
class Settings:
    resolution_length: int = DEFAULT_RESOLUTION_LENGTH
    truncation_bound: int = DEFAULT_TRUNCATION_BOUND
    oracle: bool = False


@dataclass
class TaskOutcome:
    verdict: bool | None  # None for purely informational tasks
    result: dict
    trace: list = field(default_factory=list)


# ----------------------------------------------------------------------
# formatting helpers
# ----------------------------------------------------------------------

def _s(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_lines(M: Matrix, indent: str = "    ") -> list[str]:
    if M.rows == 0 or M.cols == 0:
        return [f"{indent}({M.rows}x{M.cols})"]
    cells = [[_s(x) for x in row] for row in M.data]
    w = max(len(c) for row in cells for c in row)
    return [indent + "[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells]


def inv(M: FPModule) -> list:
    r, f = M.invariants()
    return [r, [int(x) for x in f]]


def table(t: dict) -> dict:
    return {str(n): [r, [int(x) for x in f]] for n, (r, f) in sorted(t.items())}


def _nonzero(t: dict) -> dict:
    return {n: v for n, v in table(t).items() if v[0] or v[1]}


def smith_lines(ring: Ring, A: Matrix, label: str) -> list[str]:
    """Smith normal form transcript of ``A`` (lifted to the domain for quotient rings)."""
    B = lifted(ring, A) if ring.modulus else A
    dom = ring.domain if ring.modulus else ring
    sf = smith_form(dom, B)
    out = [f"  {label}: {A.rows}x{A.cols} over {ring}"]
    if ring.modulus:
        out.append(f"  lifted with {ring.modulus}*I to {B.rows}x{B.cols} over {dom}")
    out += ["  U ="] + matrix_lines(sf.U) + ["  D = U A V ="] + matrix_lines(sf.D) + ["  V ="] + matrix_lines(sf.V)
    out.append(f"  invariant factors {list(sf.invariants)}, rank {sf.rank}")
    return out


def complex_lines(C: ChainComplex, label: str) -> list[str]:
    out = [f"{label} over {C.ring}, degrees {C.lo}..{C.hi}"]
    for n in C.degrees:
        out.append(f"  C_{n}: {C.module(n)!r}")
    for n in range(C.lo + 1, C.hi + 1):
        d = C.d(n)
        if d.rows and d.cols:
            out += [f"  d_{n}:"] + matrix_lines(d)
            out += smith_lines(C.ring, d, f"SNF of d_{n}")
    return out


# ----------------------------------------------------------------------
# argument access
# ----------------------------------------------------------------------

def _arg(task: dict, key: str, default=...):
    if key in task["args"]:
        return task["args"][key]
    if default is ...:
        raise ParseError(f"task {task['id']}: missing argument {key!r}")
    return default


def _opt(task: dict, settings: Settings, key: str):
    return task["options"].get(key, getattr(settings, key))


def _direction(value: str, task: dict) -> str:
    if value not in (DIRECT, INVERSE):
        raise ParseError(f"task {task['id']}: direction must be {DIRECT!r} or {INVERSE!r}")
    return value


def _base_ring(ws, task, X):
    ref = _arg(task, "base", None)
    if ref is not None:
        return ws.ring(ref, f"task {task['id']}")
    shape = X.shape
    init = shape.initial_object()
    if init is not None:
        return X.rings.ring(init)
    raise ParseError(f"task {task['id']}: argument 'base' is required for shapes without an initial object")


# ----------------------------------------------------------------------
# handlers
# ----------------------------------------------------------------------

def op_validate_category(ws, task, settings):
    cat = ws.get("categories", _arg(task, "category"), referrer=task["id"])
    ext_d = linear_extension(cat, DIRECT)
    ext_i = linear_extension(cat, INVERSE)
    result = {"objects": list(cat.objects), "arrows": [arrow_id(*a) for a in cat.non_identity_arrows()],
              "direct_degrees": dict(sorted(ext_d.degree.items())),
              "inverse_degrees": dict(sorted(ext_i.degree.items()))}
    trace = [f"{cat}", f"direct degrees: {result['direct_degrees']}", f"inverse degrees: {result['inverse_degrees']}"]
    return TaskOutcome(True, result, trace)


def op_smith(ws, task, settings):
    ring = ws.ring(_arg(task, "ring"), task["id"])
    rows = _arg(task, "matrix")
    from .manifest import _matrix, to_matrix
    rows = _matrix(rows, f"task {task['id']}.matrix")
    A = to_matrix(rows, len(rows), len(rows[0]) if rows else 0)
    M = FPModule(ring, A.rows, A)
    result = {"ring": str(ring), "cokernel": inv(M)}
    trace = ["A ="] + matrix_lines(A) + smith_lines(ring, A, "SNF")
    return TaskOutcome(None, result, trace)


def op_homology(ws, task, settings):
    C = ws.get("complexes", _arg(task, "complex"), referrer=task["id"])
    return TaskOutcome(None, {"homology": _nonzero(homology_table(C))}, complex_lines(C, _arg(task, "complex")))


def op_tor(ws, task, settings):
    where = f"task {task['id']}"
    ring = ws.ring(_arg(task, "ring"), where) if "ring" in task["args"] else None
    M = ws.module(_arg(task, "module"), where, ring)
    target = ws.ring(_arg(task, "target"), where)
    i = int(_arg(task, "degree", 1))
    L = int(_opt(task, settings, "resolution_length"))
    f = canonical_map(M.ring, target)
    T = tor(M, f, i, max(L, i + 1))
    res = free_resolution(M, max(L, i + 1))
    trace = [f"Tor_{i} along {f}", f"resolution valid through degree {res.valid_through}"]
    trace += complex_lines(res.complex, "free resolution")
    return TaskOutcome(None, {"degree": i, "tor": inv(T.module), "valid_through": T.valid_through}, trace)


def op_validate_diagram(ws, task, settings):
    name = _arg(task, "diagram")
    X = ws.get("module_diagrams", name, referrer=task["id"])
    rep = ws.validation.get(name) or validate_diagram(X)
    trace = [f"transitivity square {arrow_id(*a)} then {arrow_id(*b)} = {arrow_id(*c)}: ok"
             for a, b, c in rep.squares]
    for s in X.shape.objects:
        trace += complex_lines(X.value(s), f"X({s})")
    for (s, t), m in sorted(X.structure_maps.items()):
        for n in sorted(m.maps):
            trace += [f"structure {arrow_id(s, t)} degree {n}:"] + matrix_lines(m[n])
    return TaskOutcome(True, rep.to_dict(), trace)


def _latching_or_matching(ws, task, fn, label):
    X = ws.get("module_diagrams", _arg(task, "diagram"), referrer=task["id"])
    obj = str(_arg(task, "object"))
    data = fn(X, obj)
    C = data.complex
    result = {"object": obj, "modules": {str(n): inv(C.module(n)) for n in C.degrees},
              "homology": _nonzero(homology_table(C))}
    trace = complex_lines(C, f"{label} at {obj}")
    for n in sorted(data.canonical.maps):
        trace += [f"canonical map degree {n}:"] + matrix_lines(data.canonical[n])
    return TaskOutcome(None, result, trace)


def op_latching(ws, task, settings):
    return _latching_or_matching(ws, task, latching, "latching object")


def op_matching(ws, task, settings):
    return _latching_or_matching(ws, task, matching, "matching object")


def _corner_task(ws, task, fn, default):
    f = ws.get("diagram_maps", _arg(task, "map"), referrer=task["id"])
    structure = _direction(_arg(task, "structure", default), task)
    rep = fn(f, bool(_arg(task, "trivial", False)), structure=structure)
    trace = [f"{s}: corner {'ok' if v else 'fails'}" for s, v in sorted(rep.corner.items())]
    return TaskOutcome(rep.verdict, _jsonable(rep.to_dict()), trace)


def op_is_diagram_cofibration(ws, task, settings):
    return _corner_task(ws, task, is_diagram_cofibration, DIRECT)


def op_is_diagram_fibration(ws, task, settings):
    return _corner_task(ws, task, is_diagram_fibration, INVERSE)


def op_generating_probes(ws, task, settings):
    rd = ws.get("ring_diagrams", _arg(task, "ring_diagram"), referrer=task["id"])
    direction = _direction(_arg(task, "direction", DIRECT), task)
    window = tuple(int(x) for x in _arg(task, "window", [0, 1]))
    probes = generating_probes(rd, direction, window)
    rows, ok = [], True
    for pr in probes:
        rep = is_diagram_cofibration(pr.map, pr.trivial, structure=direction)
        ok = ok and rep.verdict
        rows.append({"family": pr.family, "object": pr.object, "degree": pr.degree, "verdict": rep.verdict})
    trace = [f"{r['family']} at {r['object']} degree {r['degree']}: {'ok' if r['verdict'] else 'fails'}"
             for r in rows]
    return TaskOutcome(ok, {"direction": direction, "probes": rows}, trace)


def op_colim_decomposition(ws, task, settings):
    rd = ws.get("ring_diagrams", _arg(task, "ring_diagram"), referrer=task["id"])
    rep = colim_decomposition(rd, int(_arg(task, "degree", 0)))
    return TaskOutcome(rep.verdict, _jsonable(rep.to_dict()), [f"{k}: {v}" for k, v in sorted(rep.objects.items())])


def _kan_task(ws, task, settings, kind):
    where = task["id"]
    incl = ws.get("inclusions", _arg(task, "inclusion"), referrer=where)
    rd = ws.get("ring_diagrams", _arg(task, "ring_diagram"), referrer=where)
    X = ws.get("module_diagrams", _arg(task, "diagram"), referrer=where)
    if X.shape != incl.sub:
        X = restrict_diagram(incl, X)
    if kind == "left":
        ext = left_kan(incl, rd, X)
        unit = left_kan_unit(ext, X)
    else:
        ext = right_kan(incl, rd, X)
        unit = right_kan_counit(ext, X)
    iso = unit.is_objectwise_quasi_iso()
    collapse = ext.collapse_checks()
    values = {t: {"modules": {str(n): inv(ext[t].module(n)) for n in ext[t].degrees},
                  "homology": _nonzero(homology_table(ext[t]))} for t in rd.shape.objects}
    trace = []
    for t in rd.shape.objects:
        v = ext.values[t]
        how = f"collapsed at {arrow_id(*v.collapsed)}" if v.collapsed else "general (co)limit"
        trace += complex_lines(ext[t], f"value at {t} ({how})")
    label = "unit" if kind == "left" else "counit"
    result = {"values": values, label: iso, "collapse": {t: v for t, v in sorted(collapse.items())}}
    verdict = iso and all(v is not False for v in collapse.values())
    return TaskOutcome(verdict, result, trace)


def op_left_kan(ws, task, settings):
    return _kan_task(ws, task, settings, "left")


def op_right_kan(ws, task, settings):
    return _kan_task(ws, task, settings, "right")


def op_restrict(ws, task, settings):
    incl = ws.get("inclusions", _arg(task, "inclusion"), referrer=task["id"])
    X = ws.get("module_diagrams", _arg(task, "diagram"), referrer=task["id"])
    Y = restrict_diagram(incl, X)
    values = {s: _nonzero(homology_table(Y.value(s))) for s in Y.shape.objects}
    return TaskOutcome(None, {"homology": values}, [])


def op_holim(ws, task, settings):
    X = ws.get("module_diagrams", _arg(task, "diagram"), referrer=task["id"])
    base = _base_ring(ws, task, X)
    T = bk_holim(X, base)
    H = homology_table(T.complex)
    result = {"base": str(base), "homology": _nonzero(H)}
    trace = complex_lines(T.complex, "totalization")
    verdict = None
    try:
        pullback_shape_parts(X.shape)
    except Exception:
        pass
    else:
        P = holim_pullback(X, base)
        HP = homology_table(P, range(min(T.complex.lo, P.lo) - 1, max(T.complex.hi, P.hi) + 2))
        HT = homology_table(T.complex, HP.keys())
        verdict = HP == HT
        result["cross_check"] = {"homotopy_pullback": _nonzero(HP), "agrees": verdict}
        trace += complex_lines(P, "homotopy pullback")
    return TaskOutcome(verdict, result, trace)


def op_cellularization(ws, task, settings):
    where = task["id"]
    adj_spec = _arg(task, "adjunction")
    if not isinstance(adj_spec, dict) or adj_spec.get("kind", "base_change") != "base_change":
        raise ParseError(f"task {where}: only base_change adjunctions are supported in manifests")
    src = ws.ring(adj_spec["source"], where)
    tgt = ws.ring(adj_spec["target"], where)
    adj = base_change_adjunction(canonical_map(src, tgt))
    case = int(_arg(task, "case", 1))
    names = [c if isinstance(c, str) else f"cell{k}" for k, c in enumerate(_arg(task, "cells"))]
    ring = src if case == 1 else tgt
    cells = [ws.module(c, where, ring) for c in _arg(task, "cells")]
    L = int(_opt(task, settings, "resolution_length"))
    rep = check_cellularization_hypotheses(adj, cells, L, case, names)
    trace = list(rep.banners) + [f"{c.cell}: {'ok' if c.verdict else 'fails'} {c.cone_homology}" for c in rep.cells]
    return TaskOutcome(rep.verdict, _jsonable(rep.to_dict()), trace)


def _square_and_module(ws, task):
    sq = ws.get("squares", _arg(task, "square"), referrer=task["id"])
    M = ws.module(_arg(task, "module"), f"task {task['id']}", sq.base)
    if M.ring != sq.base:
        raise ParseError(f"task {task['id']}: module is over {M.ring}, square base is {sq.base}")
    return sq, M


def _witness_lines(ws_list) -> list[str]:
    return [f"  {_s(w.element)} = {_s(w.a)} - ({_s(w.b)})   alpha={w.alpha} beta={w.beta}" for w in ws_list]


def op_ring_pullback(ws, task, settings):
    sq = ws.get("squares", _arg(task, "square"), referrer=task["id"])
    rep = verify_ring_pullback(sq, int(_arg(task, "depth", 3)))
    trace = [str(sq), "witnesses:"] + _witness_lines(rep.witnesses)
    return TaskOutcome(rep.verdict, rep.to_dict(), trace)


def op_fracture(ws, task, settings):
    sq, M = _square_and_module(ws, task)
    rep = fracture_reconstruct(M, sq)
    result = rep.to_dict()
    trace = [str(sq), f"module {inv(M)}"]
    for fv in rep.factors:
        label = f"{fv.prime}^{fv.exponent} " if fv.prime else ""
        trace.append(f"{fv.kind} factor {label}({fv.rule}): corners {fv.corners}")
        trace += _witness_lines(fv.witnesses)
    if _opt(task, settings, "oracle"):
        orc = truncation_oracle(M, sq, int(_opt(task, settings, "truncation_bound")), reference=rep)
        result["oracle"] = orc.to_dict()
        trace.append(f"oracle at B={orc.bound}: {'exact' if orc.verdict else 'not exact'}, agrees={orc.agrees}")
    return TaskOutcome(rep.verdict, result, trace)


def op_truncation_oracle(ws, task, settings):
    sq, M = _square_and_module(ws, task)
    ref = fracture_reconstruct(M, sq)
    orc = truncation_oracle(M, sq, int(_opt(task, settings, "truncation_bound")), reference=ref)
    trace = [f"order {m}: " + ", ".join(f"B={c.bound} ker={c.kernel_defect} coker={c.cokernel_defect}" for c in cs)
             for m, cs in orc.torsion]
    trace += [f"free: B={c.bound} ker={c.kernel_defect} coker={c.cokernel_defect}" for c in orc.free]
    return TaskOutcome(orc.verdict, orc.to_dict(), trace)


def op_hasse(ws, task, settings):
    sq, M = _square_and_module(ws, task)
    rep = hasse_pipeline(sq, M)
    result = _jsonable(rep.to_dict())
    if _opt(task, settings, "oracle"):
        orc = truncation_oracle(M, sq, int(_opt(task, settings, "truncation_bound")), reference=rep.fracture)
        result["oracle"] = orc.to_dict()
    trace = list(rep.banners) + [f"{k}: {v}" for k, v in sorted(result["checks"].items())]
    return TaskOutcome(rep.verdict, result, trace)


def op_quasi_iso(ws, task, settings):
    """Objectwise quasi-isomorphism test for a diagram map."""
    f = ws.get("diagram_maps", _arg(task, "map"), referrer=task["id"])
    per = {s: bool(is_quasi_iso(f[s])) for s in f.shape.objects}
    return TaskOutcome(all(per.values()), {"objects": per}, [])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return _s(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


OPS: dict[str, Callable] = {
    "validate_category": op_validate_category,
    "smith": op_smith,
    "homology": op_homology,
    "tor": op_tor,
    "validate_diagram": op_validate_diagram,
    "latching": op_latching,
    "matching": op_matching,
    "is_diagram_cofibration": op_is_diagram_cofibration,
    "is_diagram_fibration": op_is_diagram_fibration,
    "generating_probes": op_generating_probes,
    "colim_decomposition": op_colim_decomposition,
    "left_kan": op_left_kan,
    "right_kan": op_right_kan,
    "restrict": op_restrict,
    "holim": op_holim,
    "quasi_iso": op_quasi_iso,
    "cellularization": op_cellularization,
    "ring_pullback": op_ring_pullback,
    "fracture": op_fracture,
    "truncation_oracle": op_truncation_oracle,
    "hasse": op_hasse,
}


def run_task(ws, task: dict, settings: Settings) -> TaskOutcome:
    try:
        handler = OPS[task["op"]]
    except KeyError:
        raise ParseError(f"task {task['id']}: unknown op {task['op']!r}; known ops: {sorted(OPS)}") from None
    out = handler(ws, task, settings)
    out.result = _jsonable(out.result)
    return out
