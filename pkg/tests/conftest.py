# raagtool/tests/conftest.py

import json

import pytest

from graph_core import SimpleGraph, complete_graph, edgeless_graph, path_graph


@pytest.fixture
def free2() -> SimpleGraph:
    """Two vertices, no edge: the free group F_2."""
    return edgeless_graph(["a", "b"])


@pytest.fixture
def z2() -> SimpleGraph:
    """Two adjacent vertices: Z^2."""
    return complete_graph(["a", "b"])


@pytest.fixture
def p3() -> SimpleGraph:
    return path_graph(["a", "b", "c"])


@pytest.fixture
def p4() -> SimpleGraph:
    return path_graph(["a", "b", "c", "d"])


@pytest.fixture
def k3() -> SimpleGraph:
    return complete_graph(["a", "b", "c"])


@pytest.fixture
def graph_file(tmp_path):
    """Write a graph document and return its path."""
    def _write(vertices, edges=()):
        path = tmp_path / "graph.json"
        path.write_text(json.dumps({"vertices": list(vertices), "edges": [list(e) for e in edges]}))
        return str(path)
    return _write
