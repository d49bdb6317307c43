import json
import os
import pathlib

import networkx as nx
import pytest

import specgraph

SCHEMA = pathlib.Path(
    os.environ.get(
        "SPECGRAPH_SCHEMA",
        pathlib.Path(__file__).resolve().parents[2] / "docs" / "graph.schema.json",
    )
)


@pytest.fixture(scope="module")
def chain():
    return specgraph.extract("z + z**-1 - E", resolution=128)


def theta_document(chain):
    doc = json.loads(chain.to_json())
    node = {"dos": 1.0, "potential": -0.5}
    doc["nodes"] = [
        dict(node, id=0, pos=[-1.0, 0.0]),
        dict(node, id=1, pos=[1.0, 0.0]),
    ]
    arcs = [[[-1, 0], [0, 1], [1, 0]], [[-1, 0], [1, 0]], [[-1, 0], [0, -1], [1, 0]]]
    edges = [(0, 1, pts) for pts in arcs] + [(1, 1, [[1, 0], [1.5, 0.5], [1, 0]])]
    doc["edges"] = [
        {
            "id": k,
            "u": u,
            "v": v,
            "pts": pts,
            "point_count": len(pts),
            "weight": 1.0,
            "avg_dos": 0.0,
            "avg_potential": 0.0,
        }
        for k, (u, v, pts) in enumerate(edges)
    ]
    doc["stats"].update(node_count=2, edge_count=4, component_count=1)
    return doc


def test_hermitian_chain_is_a_single_segment(chain):
    g = specgraph.to_networkx(chain)
    assert isinstance(g, nx.MultiGraph)
    assert g.number_of_nodes() == 2
    assert g.number_of_edges() == 1
    assert sorted(d for _, d in g.degree()) == [1, 1]
    for _, data in g.nodes(data=True):
        assert abs(data["pos"].imag) < 0.05
        assert 1.8 < abs(data["pos"].real) < 2.2
    assert chain.polynomial == str(specgraph.Polynomial("z + z**-1 - E"))


def test_document_matches_schema(chain):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(SCHEMA.read_text())
    jsonschema.validate(json.loads(chain.to_json()), schema)
    jsonschema.validate(theta_document(chain), schema)


def test_json_round_trip_is_byte_identical(chain):
    text = chain.to_json()
    again = specgraph.Graph.from_json(text)
    assert again == chain
    assert again.to_json() == text


def test_graphml_keeps_parallel_edges_and_self_loops(chain, tmp_path):
    graph = specgraph.Graph.from_json(json.dumps(theta_document(chain)))
    path = tmp_path / "theta.graphml"
    path.write_text(graph.to_graphml())
    g = nx.read_graphml(path, force_multigraph=True)
    assert g.number_of_nodes() == 2
    assert g.number_of_edges() == 4
    assert nx.number_of_selfloops(g) == 1
    assert g.number_of_edges("n0", "n1") == 3


def test_enumeration_count():
    classes = specgraph.enumerate_classes(bands=1, ranges=[4, 5, 6])
    assert len(classes) == 24
    assert len({c["class_key"] for c in classes}) == 24


def test_chain_spectrum_is_real_and_bounded():
    ev = specgraph.chain_spectrum("z + z**-1 - E", cells=200)
    assert len(ev) == 200
    assert all(abs(e.imag) < 1e-9 and abs(e.real) <= 2 for e in ev)


def test_polynomial_properties():
    poly = specgraph.Polynomial("-z**-2 - E - z + z**4")
    assert (poly.p, poly.q, poly.bands) == (2, 4, 1)
    assert (poly.reciprocal().p, poly.reciprocal().q) == (4, 2)
    assert poly.reciprocal().reciprocal() == poly


def test_errors_carry_the_stage():
    with pytest.raises(specgraph.ParseError) as parse:
        specgraph.Polynomial("z + * E")
    assert parse.value.stage == "parse"
    assert parse.value.position >= 0
    with pytest.raises(specgraph.Error) as bad:
        specgraph.extract("z + 1/z")
    assert isinstance(bad.value.stage, str) and bad.value.stage
