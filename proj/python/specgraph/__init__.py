"""Open-boundary spectral graphs of one-dimensional lattice models."""

import json

from ._core import (
    SCHEMA_VERSION,
    Error,
    Graph,
    ParseError,
    Polynomial,
    chain_spectrum,
    enumerate_classes,
    extract,
    run_sweep_config,
    set_default_workers,
)

__all__ = [
    "SCHEMA_VERSION",
    "Error",
    "Graph",
    "ParseError",
    "Polynomial",
    "chain_spectrum",
    "enumerate_classes",
    "extract",
    "run_sweep_config",
    "set_default_workers",
    "to_networkx",
]


def to_networkx(graph):
    """Build a networkx MultiGraph from a Graph, a JSON string or a parsed dict.

    Node attributes: pos (complex), dos, potential. Edge keys are the edge ids;
    edge attributes: weight, point_count, avg_dos, avg_potential, pts (complex list).
    """
    import networkx as nx

    if isinstance(graph, Graph):
        graph = graph.to_json()
    doc = json.loads(graph) if isinstance(graph, str) else graph

    g = nx.MultiGraph(polynomial=doc["polynomial"])
    for n in doc["nodes"]:
        g.add_node(n["id"], pos=complex(*n["pos"]), dos=n["dos"], potential=n["potential"])
    for e in doc["edges"]:
        g.add_edge(
            e["u"],
            e["v"],
            key=e["id"],
            weight=e["weight"],
            point_count=e["point_count"],
            avg_dos=e["avg_dos"],
            avg_potential=e["avg_potential"],
            pts=[complex(*p) for p in e["pts"]],
        )
    return g
