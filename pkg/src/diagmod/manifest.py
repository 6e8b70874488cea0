"""YAML manifests: parsing, normalization and reference resolution.

A manifest is normalized into plain dicts with a fixed layout, so that
``Manifest.from_dict(m.to_dict()) == m`` for every valid manifest.  Building
turns the normalized data into engine objects, resolving names section by
section and validating every module diagram before any task runs.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from .category import FiniteCategory, Inclusion, validate_category
from .complexes import ChainComplex
from .diagrams import DiagramMap, ModuleDiagram, RingDiagram, validate_diagram
from .errors import DiagmodError, ManifestError, ManifestReferenceError, ParseError
from .fracture import LocalizationSquare
from .linalg import Matrix
from .modules import FPModule
from .rings import ALL, Ring

SCHEMA_VERSION = 1
SECTIONS = ("categories", "inclusions", "rings", "ring_diagrams", "complexes", "modules",
            "module_diagrams", "diagram_maps", "squares")

_RING_RE = re.compile(r"^(?P<base>Z|Q)(?:\[(?P<inv>[0-9/, ]*)\])?(?:/\(?(?P<mod>\d+)\)?)?$")


# ----------------------------------------------------------------------
# scalar and matrix normal forms
# ----------------------------------------------------------------------

def _scalar(x, where: str):
    try:
        if isinstance(x, bool):
            raise ValueError("booleans are not scalars")
        f = Fraction(str(x).strip()) if not isinstance(x, int) else Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {x!r} is not a rational number") from exc
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _matrix(rows, where: str, shape: tuple[int | None, int | None] = (None, None)) -> list:
    if rows is None:
        rows = []
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: a matrix is a list of rows")
    out = [[_scalar(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise ParseError(f"{where}: rows have different lengths")
    return out


def to_matrix(rows: list, nrows: int, ncols: int, where: str = "matrix") -> Matrix:
    if not rows:
        return Matrix.zeros(nrows, ncols)
    if len(rows) != nrows or len(rows[0]) != ncols:
        raise ParseError(f"{where}: matrix is {len(rows)}x{len(rows[0])}, expected {nrows}x{ncols}")
    return Matrix(nrows, ncols, rows)


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        try:
            return int(str(x))
        except ValueError as exc:
            raise ParseError(f"{where}: expected an integer, got {x!r}") from exc
    return x


def _mapping(x, where: str) -> dict:
    if x is None:
        return {}
    if not isinstance(x, dict):
        raise ParseError(f"{where}: expected a mapping")
    return x


def _list(x, where: str) -> list:
    if x is None:
        return []
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected a list")
    return x


# ----------------------------------------------------------------------
# per-section normalization
# ----------------------------------------------------------------------

def parse_ring(spec, where: str = "ring") -> dict:
    """Ring from ``{inverted, modulus}`` or a string such as ``Z[1/2]/(3)``."""
    if isinstance(spec, str):
        m = _RING_RE.match(spec.replace(" ", ""))
        if not m:
            raise ParseError(f"{where}: cannot read ring {spec!r}")
        if m.group("base") == "Q":
            inv = ALL
        else:
            inv = []
            for part in filter(None, (m.group("inv") or "").split(",")):
                if not part.startswith("1/"):
                    raise ParseError(f"{where}: inverted element {part!r} must look like 1/p")
                inv.append(int(part[2:]))
        spec = {"inverted": inv, "modulus": int(m.group("mod") or 0)}
    spec = _mapping(spec, where)
    inv = spec.get("inverted", [])
    if inv != ALL:
        inv = sorted({_int(p, f"{where}.inverted") for p in _list(inv, f"{where}.inverted")})
    out = {"inverted": inv, "modulus": _int(spec.get("modulus", 0), f"{where}.modulus")}
    try:
        Ring.from_dict(out)
    except Exception as exc:
        raise ParseError(f"{where}: {exc}") from exc
    return out


def _arrow(a, where: str) -> list:
    if isinstance(a, str):
        s, sep, t = a.partition("->")
        if not sep:
            raise ParseError(f"{where}: arrow {a!r} is not of the form 's->t'")
        return [s.strip(), t.strip()]
    if isinstance(a, dict):
        return [str(a["source"]), str(a["target"])]
    a = _list(a, where)
    if len(a) != 2:
        raise ParseError(f"{where}: an arrow is a pair")
    return [str(a[0]), str(a[1])]


def _category(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    objects = sorted(str(o) for o in _list(spec.get("objects"), f"{where}.objects"))
    arrows = sorted(_arrow(a, f"{where}.arrows[{i}]") for i, a in enumerate(_list(spec.get("arrows"), where)))
    return {"objects": objects, "arrows": arrows, "close": bool(spec.get("close", True))}


def _inclusion(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    return {"ambient": str(spec.get("ambient")),
            "objects": sorted(str(o) for o in _list(spec.get("objects"), f"{where}.objects"))}


def _ring_diagram(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    rings = _mapping(spec.get("rings"), f"{where}.rings")
    return {"category": str(spec.get("category")), "rings": {str(k): str(v) for k, v in sorted(rings.items())}}


def _module(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    ring = spec.get("ring")
    if "generators" in spec or "relations" in spec:
        g = _int(spec.get("generators", 0), f"{where}.generators")
        rel = _matrix(spec.get("relations"), f"{where}.relations")
        if rel and len(rel) != g:
            raise ParseError(f"{where}: relations need one row per generator")
        return {"ring": None if ring is None else str(ring), "generators": g, "relations": rel}
    torsion = [[_int(p, where), _int(e, where)] for p, e in _list(spec.get("torsion"), f"{where}.torsion")]
    return {"ring": None if ring is None else str(ring), "rank": _int(spec.get("rank", 0), f"{where}.rank"),
            "torsion": torsion}


def _complex(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    mods = {}
    for n, m in _mapping(spec.get("modules"), f"{where}.modules").items():
        mods[_int(n, f"{where}.modules")] = _module(m, f"{where}.modules.{n}")
    for n, r in _mapping(spec.get("free"), f"{where}.free").items():
        mods[_int(n, f"{where}.free")] = {"ring": None, "generators": _int(r, f"{where}.free.{n}"), "relations": []}
    diffs = {_int(n, f"{where}.differentials"): _matrix(d, f"{where}.differentials.{n}")
             for n, d in _mapping(spec.get("differentials"), f"{where}.differentials").items()}
    for m in mods.values():
        m.pop("ring", None)
    return {"ring": str(spec.get("ring")), "modules": dict(sorted(mods.items())), "differentials": dict(sorted(diffs.items()))}


def _degree_matrices(spec, where: str) -> dict:
    return {_int(n, where): _matrix(m, f"{where}.{n}") for n, m in sorted(_mapping(spec, where).items(),
                                                                           key=lambda kv: int(kv[0]))}


def _module_diagram(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    structure = {}
    for a, m in _mapping(spec.get("structure"), f"{where}.structure").items():
        s, t = _arrow(a, f"{where}.structure")
        structure[f"{s}->{t}"] = _degree_matrices(m, f"{where}.structure.{a}")
    values = {str(k): str(v) for k, v in _mapping(spec.get("values"), f"{where}.values").items()}
    return {"ring_diagram": str(spec.get("ring_diagram")), "values": dict(sorted(values.items())),
            "structure": dict(sorted(structure.items()))}


def _diagram_map(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    comps = {str(s): _degree_matrices(m, f"{where}.components.{s}")
             for s, m in _mapping(spec.get("components"), f"{where}.components").items()}
    return {"source": str(spec.get("source")), "target": str(spec.get("target")), "components": dict(sorted(comps.items()))}


def _square(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    try:
        return {"S0": sorted(_int(p, f"{where}.S0") for p in _list(spec.get("S0"), f"{where}.S0")),
                "p": _int(spec["p"], f"{where}.p"), "q": _int(spec["q"], f"{where}.q")}
    except KeyError as exc:
        raise ParseError(f"{where}: missing {exc}") from exc


_NORMALIZERS = {
    "categories": _category,
    "inclusions": _inclusion,
    "rings": parse_ring,
    "ring_diagrams": _ring_diagram,
    "complexes": _complex,
    "modules": _module,
    "module_diagrams": _module_diagram,
    "diagram_maps": _diagram_map,
    "squares": _square,
}


def _normalize_value(x):
    if isinstance(x, dict):
        return {str(k): _normalize_value(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_normalize_value(v) for v in x]
    return x


def _task(spec, where: str) -> dict:
    spec = _mapping(spec, where)
    if "id" not in spec or "op" not in spec:
        raise ParseError(f"{where}: a task needs 'id' and 'op'")
    return {"id": str(spec["id"]), "op": str(spec["op"]),
            "args": _normalize_value(_mapping(spec.get("args"), f"{where}.args")),
            "options": _normalize_value(_mapping(spec.get("options"), f"{where}.options"))}


# ----------------------------------------------------------------------
# the manifest
# ----------------------------------------------------------------------

@dataclass
class Manifest:
    sections: dict = field(default_factory=lambda: {k: {} for k in SECTIONS})
    tasks: list = field(default_factory=list)
    schema: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data) -> "Manifest":
        data = _mapping(data, "manifest")
        unknown = set(data) - set(SECTIONS) - {"tasks", "schema"}
        if unknown:
            raise ParseError(f"manifest: unknown sections {sorted(unknown)}")
        schema = _int(data.get("schema", SCHEMA_VERSION), "schema")
        if schema != SCHEMA_VERSION:
            raise ParseError(f"schema: unsupported version {schema}")
        sections = {}
        for name in SECTIONS:
            entries = _mapping(data.get(name), name)
            norm = _NORMALIZERS[name]
            sections[name] = {str(k): norm(v, f"{name}.{k}") for k, v in sorted(entries.items(), key=lambda kv: str(kv[0]))}
        tasks = [_task(t, f"tasks[{i}]") for i, t in enumerate(_list(data.get("tasks"), "tasks"))]
        ids = [t["id"] for t in tasks]
        dup = sorted({i for i in ids if ids.count(i) > 1})
        if dup:
            raise ParseError(f"tasks: duplicate ids {dup}")
        return cls(sections, tasks, schema)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"schema": self.schema}
        for name in SECTIONS:
            if self.sections.get(name):
                out[name] = self.sections[name]
        out["tasks"] = self.tasks
        return out

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def task(self, task_id: str) -> dict:
        from .errors import UnknownTask
        for t in self.tasks:
            if t["id"] == task_id:
                return t
        raise UnknownTask(f"no task with id {task_id!r}")


def loads(text: str) -> Manifest:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        pos = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ParseError(f"{pos}{getattr(exc, 'problem', None) or exc}") from exc
    if data is None:
        data = {}
    return Manifest.from_dict(data)


def load(path: str) -> Manifest:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return loads(text)


# ----------------------------------------------------------------------
# building engine objects
# ----------------------------------------------------------------------

@contextmanager
def _located(where: str):
    """Prefix engine errors with the manifest entry that raised them."""
    try:
        yield
    except DiagmodError as exc:
        if not isinstance(exc, ManifestError) and not getattr(exc, "where", None):
            exc.where = where
            exc.args = (f"{where}: {exc}",) + exc.args[1:]
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


class Workspace:
    """Engine objects built from a manifest, resolved by name."""

    def __init__(self, manifest: Manifest):
        self.manifest = manifest
        self._cache: dict[tuple[str, str], Any] = {}
        self.validation: dict[str, Any] = {}
        for name in SECTIONS:
            for key in manifest.sections[name]:
                self.get(name, key)
        for key in manifest.sections["module_diagrams"]:
            X = self.get("module_diagrams", key)
            with _located(f"module_diagrams.{key}"):
                self.validation[key] = validate_diagram(X)

    def get(self, section: str, key: str, *, referrer: str | None = None):
        if key not in self.manifest.sections[section]:
            who = f" (referenced from {referrer})" if referrer else ""
            raise ManifestReferenceError(f"{section}.{key} is not declared{who}")
        ck = (section, key)
        if ck not in self._cache:
            spec = self.manifest.sections[section][key]
            where = f"{section}.{key}"
            with _located(where):
                self._cache[ck] = getattr(self, f"_build_{section}")(spec, where)
        return self._cache[ck]

    def ring(self, ref, where: str) -> Ring:
        """A ring by name, or inline as a string/dict."""
        if isinstance(ref, str) and ref in self.manifest.sections["rings"]:
            return self.get("rings", ref, referrer=where)
        if isinstance(ref, (dict,)) or (isinstance(ref, str) and _RING_RE.match(ref.replace(" ", ""))):
            return Ring.from_dict(parse_ring(ref, where))
        raise ManifestReferenceError(f"rings.{ref} is not declared (referenced from {where})")

    def module(self, ref, where: str, ring: Ring | None = None) -> FPModule:
        if isinstance(ref, str):
            return self.get("modules", ref, referrer=where)
        return self._build_modules(_module(ref, where), where, ring)

    # -- builders ---------------------------------------------------------
    def _build_categories(self, spec, where):
        return validate_category(spec["objects"], [tuple(a) for a in spec["arrows"]], close=spec["close"])

    def _build_inclusions(self, spec, where):
        amb = self.get("categories", spec["ambient"], referrer=where)
        return Inclusion.of(amb, spec["objects"])

    def _build_rings(self, spec, where):
        return Ring.from_dict(spec)

    def _build_ring_diagrams(self, spec, where):
        cat = self.get("categories", spec["category"], referrer=where)
        rings = {s: self.ring(r, f"{where}.rings.{s}") for s, r in spec["rings"].items()}
        return RingDiagram(cat, rings)

    def _build_modules(self, spec, where, ring: Ring | None = None):
        if spec.get("ring") is not None:
            ring = self.ring(spec["ring"], where)
        if ring is None:
            raise ParseError(f"{where}: module needs a ring")
        if "generators" in spec:
            g = spec["generators"]
            rel = to_matrix(spec["relations"], g, len(spec["relations"][0]), where) if spec["relations"] else None
            return FPModule(ring, g, rel)
        return FPModule.from_invariants(ring, spec["rank"], [p ** e for p, e in spec["torsion"]])

    def _build_complexes(self, spec, where):
        ring = self.ring(spec["ring"], where)
        mods = {n: self._build_modules(m, f"{where}.modules.{n}", ring) for n, m in spec["modules"].items()}
        diffs = {}
        for n, rows in spec["differentials"].items():
            r, c = (mods[n - 1].ngens if n - 1 in mods else 0), (mods[n].ngens if n in mods else 0)
            diffs[n] = to_matrix(rows, r, c, f"{where}.differentials.{n}")
        return ChainComplex(ring, mods, diffs)

    def _build_module_diagrams(self, spec, where):
        rd = self.get("ring_diagrams", spec["ring_diagram"], referrer=where)
        values = {s: self.get("complexes", c, referrer=f"{where}.values.{s}") for s, c in spec["values"].items()}
        structure = {}
        for a, mats in spec["structure"].items():
            s, t = a.split("->")
            src = values.get(s)
            tgt = values.get(t)
            structure[(s, t)] = {n: to_matrix(m, tgt.ngens(n) if tgt else 0, src.ngens(n) if src else 0,
                                           f"{where}.structure.{a}.{n}") for n, m in mats.items()}
        return ModuleDiagram(rd, values, structure, validate=False)

    def _build_diagram_maps(self, spec, where):
        X = self.get("module_diagrams", spec["source"], referrer=where)
        Y = self.get("module_diagrams", spec["target"], referrer=where)
        comps = {s: {n: to_matrix(m, Y.value(s).ngens(n), X.value(s).ngens(n), f"{where}.components.{s}.{n}")
                     for n, m in mats.items()}
                 for s, mats in spec["components"].items()}
        return DiagramMap(X, Y, comps)

    def _build_squares(self, spec, where):
        return LocalizationSquare(frozenset(spec["S0"]), spec["p"], spec["q"])
