from __future__ import annotations

import itertools
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagmod.errors import ManifestReferenceError, ParseError, TransitivityViolation, UnknownTask
from diagmod.manifest import Manifest, Workspace, load, loads, parse_ring
from diagmod.rings import Ring

EXAMPLE = Path(__file__).resolve().parent.parent / "manifests" / "example.yaml"


class TestParsing:
    @pytest.mark.parametrize("text,ring", [
        ("Z", Ring.integers()),
        ("Q", Ring.rationals()),
        ("Z[1/2,1/3]", Ring.localization(2, 3)),
        ("Z/4", Ring.quotient(4)),
        ("Z[1/2]/(3)", Ring.quotient(3, [2])),
    ])
    def test_ring_strings(self, text, ring):
        assert Ring.from_dict(parse_ring(text)) == ring

    @pytest.mark.parametrize("text", ["Z[2]", "R", "Z/4x", "Z[1/4]", "Z[1/2]/(4)"])
    def test_bad_rings(self, text):
        with pytest.raises(ParseError):
            parse_ring(text)

    def test_yaml_error_has_position(self):
        with pytest.raises(ParseError, match=r"line \d+, column \d+"):
            loads("rings: {Z: Z\ntasks: [")

    def test_unknown_section(self):
        with pytest.raises(ParseError, match="unknown sections"):
            Manifest.from_dict({"widgets": {}})

    def test_schema_version(self):
        with pytest.raises(ParseError):
            Manifest.from_dict({"schema": 2})

    def test_duplicate_task_ids(self):
        tasks = [{"id": "a", "op": "smith"}, {"id": "a", "op": "smith"}]
        with pytest.raises(ParseError, match="duplicate"):
            Manifest.from_dict({"tasks": tasks})

    def test_task_needs_op(self):
        with pytest.raises(ParseError):
            Manifest.from_dict({"tasks": [{"id": "a"}]})

    def test_ragged_matrix(self):
        with pytest.raises(ParseError):
            Manifest.from_dict({"complexes": {"c": {"ring": "Z", "free": {0: 1, 1: 2}, "differentials": {1: [[1, 2], [3]]}}}})

    def test_unknown_task_id(self):
        with pytest.raises(UnknownTask):
            Manifest.from_dict({}).task("nope")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load(str(tmp_path / "absent.yaml"))


class TestWorkspace:
    def test_example_builds(self):
        ws = Workspace(load(str(EXAMPLE)))
        assert "tower_diag" in ws.validation
        assert ws.get("rings", "Z8") == Ring.quotient(8)

    def test_undeclared_reference(self):
        m = Manifest.from_dict({"ring_diagrams": {"r": {"category": "c", "rings": {"x": "base"}}},
                                "categories": {"c": {"objects": ["x"]}}})
        with pytest.raises(ManifestReferenceError, match=r"rings\.base is not declared"):
            Workspace(m)

    def test_inline_ring_spec(self):
        ws = Workspace(Manifest.from_dict({}))
        assert ws.ring("Z[1/5]", "here") == Ring.localization(5)

    def test_engine_error_located(self):
        m = Manifest.from_dict({
            "categories": {"t": {"objects": [1, 2, 3], "arrows": ["1->2", "2->3"]}},
            "rings": {"Z": "Z"},
            "ring_diagrams": {"r": {"category": "t", "rings": {"1": "Z", "2": "Z", "3": "Z"}}},
            "complexes": {"s": {"ring": "Z", "free": {0: 1}}},
            "module_diagrams": {"bad": {"ring_diagram": "r", "values": {"1": "s", "2": "s", "3": "s"},
                                        "structure": {"1->2": {0: [[1]]}, "2->3": {0: [[1]]},
                                                      "1->3": {0: [[2]]}}}},
        })
        with pytest.raises(TransitivityViolation, match="module_diagrams.bad"):
            Workspace(m)

    def test_shape_mismatch(self):
        m = Manifest.from_dict({"complexes": {"c": {"ring": "Z", "free": {0: 1, 1: 1}, "differentials": {1: [[1, 2]]}}},
                                "rings": {"Z": "Z"}})
        with pytest.raises(ParseError, match="complexes.c"):
            Workspace(m)


# ----------------------------------------------------------------------
# round trip
# ----------------------------------------------------------------------

RING_TEXT = st.sampled_from(["Z", "Q", "Z/4", "Z[1/2]", "Z[1/2,1/3]", "Z[1/5]/(3)", "Z/1"])
NAMES = st.text("abcdefgh_", min_size=1, max_size=6)
SCALARS = st.one_of(st.integers(-9, 9), st.sampled_from(["1/2", "-3/4", "5"]))


@st.composite
def categories(draw):
    n = draw(st.integers(1, 4))
    objs = [f"o{i}" for i in range(n)]
    pairs = [p for p in itertools.combinations(objs, 2) if draw(st.booleans())]
    style = draw(st.sampled_from(["str", "pair"]))
    arrows = [f"{a}->{b}" if style == "str" else [a, b] for a, b in pairs]
    return {"objects": objs, "arrows": arrows}


@st.composite
def matrices(draw):
    r, c = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    return [[draw(SCALARS) for _ in range(c)] for _ in range(r)]


@st.composite
def manifests(draw):
    data = {
        "categories": draw(st.dictionaries(NAMES, categories(), max_size=2)),
        "rings": draw(st.dictionaries(NAMES, RING_TEXT, max_size=3)),
        "modules": draw(st.dictionaries(NAMES, st.fixed_dictionaries({
            "ring": RING_TEXT, "rank": st.integers(0, 2),
            "torsion": st.lists(st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, 3)).map(list), max_size=2)}),
            max_size=2)),
        "complexes": draw(st.dictionaries(NAMES, st.fixed_dictionaries({
            "ring": RING_TEXT, "free": st.just({0: 1, 1: 1}),
            "differentials": st.fixed_dictionaries({1: st.just([[2]])})}), max_size=2)),
        "squares": draw(st.dictionaries(NAMES, st.fixed_dictionaries({
            "S0": st.lists(st.sampled_from([5, 7]), unique=True), "p": st.just(2), "q": st.just(3)}), max_size=2)),
    }
    ids = draw(st.lists(NAMES, unique=True, max_size=4))
    data["tasks"] = [{"id": i, "op": draw(st.sampled_from(["smith", "homology", "fracture"])),
                      "args": {"matrix": draw(matrices()), "ring": draw(RING_TEXT)},
                      "options": draw(st.dictionaries(st.sampled_from(["oracle", "truncation_bound"]),
                                                      st.one_of(st.booleans(), st.integers(1, 4)), max_size=2))}
                     for i in ids]
    return data


class TestRoundTrip:
    def test_example(self):
        m = load(str(EXAMPLE))
        assert loads(m.to_yaml()) == m
        assert Manifest.from_dict(m.to_dict()) == m

    @settings(max_examples=80, deadline=None)
    @given(manifests())
    def test_random(self, data):
        m = Manifest.from_dict(data)
        assert Manifest.from_dict(m.to_dict()) == m
        assert loads(m.to_yaml()) == m
        assert loads(m.to_yaml()).to_yaml() == m.to_yaml()
