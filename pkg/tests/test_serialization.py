import json

import pytest

from conftest import farthest
from core.errors import AxiomViolationError, ParseError
from schemas.graph import GraphDocument, SlotDocument
from schemas.path import CertificateDocument
from services.braid import matsumoto_transform, shortest_paths, verify_certificate
from services.coloring import global_coloring
from services.dual import midpoint_fan
from services.generators import cartan_matrix, matrix_to_document
from services.serialization import (
    certificate_from_document,
    certificate_to_document,
    coloring_to_document,
    dump_document,
    dump_graph,
    fan_from_document,
    fan_to_document,
    graph_to_document,
    load_graph,
    load_matrix,
    parse_document,
    to_dot,
)


def test_rational_coordinates_are_fractions(a2):
    doc = json.loads(dump_graph(a2))
    assert doc["backend"] == "rational"
    coords = {tuple(root["coords"]) for root in doc["roots"]}
    assert ("1/1", "0/1") in coords
    assert ("-1/1", "-1/1") in coords


def test_slots_serialise_by_kind(segment3):
    assert SlotDocument(via=3, infinite=True).model_dump() == {"via": 3, "infinite": True}
    assert SlotDocument(via=3, to=4).model_dump() == {"via": 3, "to": 4}
    doc = json.loads(dump_graph(segment3))
    infinite = [slot for vertex in doc["vertices"] for slot in vertex["slots"] if slot.get("infinite")]
    assert len(infinite) == 2


def test_rational_graph_files_round_trip_exactly(tmp_path, b2):
    path = tmp_path / "graph.json"
    path.write_text(dump_graph(b2))
    assert dump_graph(load_graph(path)) == dump_graph(b2)


def test_window_files_keep_dangling_slots(tmp_path, tail5):
    path = tmp_path / "tail.json"
    path.write_text(dump_graph(tail5))
    loaded = load_graph(path)
    assert len(loaded) == len(tail5)
    assert loaded.interior_ids() == tail5.interior_ids()
    assert loaded.vertex(5).slots[1].to is None


def test_dumps_are_deterministic(a3):
    assert dump_graph(a3) == dump_graph(a3)


def test_broken_documents(tmp_path, a2):
    with pytest.raises(ParseError):
        parse_document("{", GraphDocument)
    with pytest.raises(ParseError):
        load_graph(tmp_path / "missing.json")

    doc = graph_to_document(a2).model_dump()
    doc["roots"][0]["coords"] = ["3/1", "1/1"]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(AxiomViolationError):
        load_graph(path)
    assert load_graph(path, verify=False) is not None


def test_matrix_files(tmp_path):
    path = tmp_path / "g2.json"
    path.write_text(dump_document(matrix_to_document(cartan_matrix("G", 2))))
    assert load_matrix(path) == cartan_matrix("G", 2)


def test_certificate_documents(a3):
    w = farthest(a3)
    paths = shortest_paths(a3, a3.base, w)
    certificate = matsumoto_transform(a3, paths[0], paths[-1])
    text = dump_document(certificate_to_document(certificate))
    restored = certificate_from_document(a3, parse_document(text, CertificateDocument))
    assert restored == certificate
    assert verify_certificate(a3, restored)


def test_coloring_document(a3):
    doc = coloring_to_document(a3, global_coloring(a3))
    assert doc.witness is None
    assert doc.palette == [0, 1, 2]
    assert len(doc.edges) == 36


def test_fan_documents():
    fan, g = midpoint_fan(3)
    doc = fan_to_document(fan)
    assert doc.ambient_dim == 3
    assert [c.points for c in doc.chambers][0] == [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]]
    assert doc.open_walls == [(3, 1)]
    assert (0, 1) in doc.adjacency
    restored = fan_from_document(doc)
    assert len(restored.chambers) == 4
    assert fan_to_document(restored) == doc


def test_dot_export(segment3, a2):
    dot = to_dot(segment3)
    assert dot.startswith("digraph matsumoto {")
    assert dot.count("shape=point") == 2
    assert dot.count("dir=none") == 3
    assert "c0 " in dot

    dot = to_dot(a2)
    assert dot.count("dir=none") == 6
    assert "(1, 0)" in dot
