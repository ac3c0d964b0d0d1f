import json

import numpy as np
import pytest

from bikitaev.errors import EulerMismatch, NonManifold, ParseError, SiteInvalid, UnknownFixture
from bikitaev.lattice import (
    Edge,
    LatticeState,
    RibbonGraph,
    builtin_graph,
    graph_from_dict,
    load_graph,
    parse_graph,
    reverse_edge,
    serialize_graph,
)
from bikitaev.algebras import builtin
from bikitaev.hopf import dual


@pytest.mark.parametrize("name, chi, faces", [
    ("two_loop", 2, 2), ("triangle", 2, 2), ("sphere", 2, 2), ("seven_edge", 2, 2),
    ("torus-1x1", 0, 1), ("torus-2x1", 0, 2), ("torus-3x2", 0, 6),
])
def test_closed_fixture_topology(name, chi, faces):
    g = builtin_graph(name)
    assert g.is_closed
    assert g.euler_characteristic == chi
    assert len(g.faces) == faces
    assert all(f.closed for f in g.faces)
    # every dart lies in exactly one face
    darts = [d for f in g.faces for d in f.darts]
    assert sorted(darts) == sorted(h for e in g.edges for h in (e.source_half, e.target_half))


def test_minimal_has_boundary_and_open_face():
    g = builtin_graph("minimal")
    assert not g.is_closed
    assert g.excluded == {"es"}
    assert [f.closed for f in g.faces] == [False]


def test_torus_name_variants():
    assert builtin_graph("torus(2,1)").n_edges == builtin_graph("torus-2x1").n_edges == 4
    with pytest.raises(UnknownFixture):
        builtin_graph("klein-bottle")
    with pytest.raises(UnknownFixture):
        builtin_graph("torus-0x1")


def test_faces_follow_clockwise_successor():
    g = builtin_graph("triangle")
    for f in g.faces:
        for i, d in enumerate(f.darts):
            nxt = f.darts[(i + 1) % len(f.darts)]
            assert nxt == g.sigma(g.alpha(d))


def test_vertex_legs_start_and_orientation():
    g = builtin_graph("seven_edge")
    s = g.make_site("v", "1t", "2s")
    legs = g.vertex_legs(s)
    ids = [g.edges[k].id for k, _ in legs]
    assert ids == ["2", "4", "5", "6", "7", "1"]
    assert [t for _, t in legs] == [False, True, False, False, True, True]


def test_face_legs_start_at_corner():
    g = builtin_graph("triangle")
    s = g.make_site("v", "3t", "1s")
    legs = g.face_legs(s)
    assert g.edges[legs[0][0]].id == "3"


def test_serialization_roundtrip():
    for name in ("triangle", "minimal", "torus-2x1"):
        g = builtin_graph(name)
        g2 = parse_graph(serialize_graph(g))
        assert g2.to_dict() == g.to_dict()
        assert [f.darts for f in g2.faces] == [f.darts for f in g.faces]


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_graph("[1, 2]")
    with pytest.raises(ParseError):
        parse_graph("{bad json")
    with pytest.raises(ParseError):
        graph_from_dict({"vertices": [{"id": "v", "rotation": ["x"]}], "edges": []})
    with pytest.raises(ParseError):
        graph_from_dict({"edges": []})
    with pytest.raises(ParseError):
        graph_from_dict({"vertices": [{"id": "v", "rotation": ["a", "b"]}],
                         "edges": [{"id": "e", "source_half": "a", "target_half": "b"}],
                         "sites": [{"vertex": "w"}]})


def test_non_manifold_and_euler_errors():
    with pytest.raises(NonManifold):
        RibbonGraph({"v": ["a"], "w": ["a", "b"]}, [Edge("e", "a", "b")])
    with pytest.raises(EulerMismatch):
        RibbonGraph({"v": ["es", "et"]}, [Edge("e", "es", "et")], genus=1)


def test_site_validation():
    g = builtin_graph("triangle")
    with pytest.raises(SiteInvalid):
        g.make_site("nowhere")
    with pytest.raises(SiteInvalid):
        g.make_site("v", "2s")


def test_load_graph_from_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(serialize_graph(builtin_graph("two_loop")))
    assert load_graph(str(p)).n_edges == 2
    with pytest.raises(UnknownFixture):
        load_graph(str(tmp_path / "missing.json"))


def test_reverse_edge_applies_antipode(rng):
    g = builtin_graph("triangle")
    D, _ = dual(builtin("s3-fun"))
    psi = LatticeState(g, D, rng.normal(size=D.dim ** 3))
    g2, psi2 = reverse_edge(g, "2", psi)
    assert g2.edges[1].source_half == "2t"
    g3, psi3 = reverse_edge(g2, "2", psi2)
    np.testing.assert_allclose(psi3.coeffs, psi.coeffs)
    t, t2 = psi.coeffs.reshape(6, 6, 6), psi2.coeffs.reshape(6, 6, 6)
    np.testing.assert_allclose(t2, np.einsum("ij,ajb->aib", D.antipode, t))
