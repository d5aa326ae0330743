"""
Graph parsing, channel index and the Gamma-reduced predicate.
"""

import json

import pytest

from errors import (
    DuplicateEdgeError,
    DuplicateVertexError,
    LoopEdgeError,
    MalformedGraphError,
    UnknownVertexError,
)
from graph_core import (
    SimpleGraph,
    channel_index,
    graph_to_json,
    is_gamma_reduced,
    neighbors,
    non_commuting,
    parse_graph,
)


class TestParseGraph:
    def test_valid_document(self):
        g = parse_graph('{"vertices": ["a", "b", "c"], "edges": [["a", "b"]]}')
        assert g.vertices == ("a", "b", "c")
        assert g.adjacent("a", "b")
        assert g.adjacent("b", "a")
        assert not g.adjacent("a", "c")

    def test_edges_default_to_empty(self):
        g = parse_graph('{"vertices": ["x"]}')
        assert len(g) == 1
        assert not g.edges

    @pytest.mark.parametrize("text", ["not json", "[]", '{"edges": []}', '{"vertices": "ab"}'])
    def test_malformed(self, text):
        with pytest.raises(MalformedGraphError):
            parse_graph(text)

    def test_loop_edge(self):
        with pytest.raises(LoopEdgeError):
            parse_graph('{"vertices": ["a"], "edges": [["a", "a"]]}')

    def test_unknown_endpoint(self):
        with pytest.raises(UnknownVertexError):
            parse_graph('{"vertices": ["a"], "edges": [["a", "z"]]}')

    def test_duplicate_vertex(self):
        with pytest.raises(DuplicateVertexError):
            SimpleGraph(["a", "a"])

    def test_duplicate_edge_either_direction(self):
        with pytest.raises(DuplicateEdgeError):
            SimpleGraph(["a", "b"], [("a", "b"), ("b", "a")])

    @pytest.mark.parametrize("name", ["", "a b"])
    def test_bad_vertex_names(self, name):
        with pytest.raises(MalformedGraphError):
            SimpleGraph([name])

    def test_json_roundtrip_keeps_order(self, p4):
        doc = json.loads(graph_to_json(p4))
        assert doc["vertices"] == ["a", "b", "c", "d"]
        assert doc["edges"] == [["a", "b"], ["b", "c"], ["c", "d"]]
        assert parse_graph(graph_to_json(p4)) == p4


class TestNeighbourhoods:
    def test_neighbors_exclude_self(self, p3):
        assert neighbors(p3, "b") == frozenset({"a", "c"})
        assert "b" not in neighbors(p3, "b")

    def test_non_commuting_contains_self(self, p3):
        assert non_commuting(p3, "a") == frozenset({"a", "c"})

    def test_unknown_vertex(self, p3):
        with pytest.raises(UnknownVertexError):
            neighbors(p3, "z")


class TestChannelIndex:
    def test_p4_order(self, p4):
        idx = channel_index(p4)
        assert idx.non_edges == (("a", "c"), ("a", "d"), ("b", "d"))
        assert idx.channels_of("a") == (0, 1)
        assert idx.channels_of("b") == (2,)
        assert idx.channels_of("c") == (0,)
        assert idx.channels_of("d") == (1, 2)

    def test_adjacent_vertices_share_nothing(self, p4):
        idx = channel_index(p4)
        for e in p4.edges:
            v, w = sorted(e)
            assert idx.shared(v, w) == ()

    def test_complete_graph_has_no_channels(self, k3):
        assert len(channel_index(k3)) == 0

    def test_free_pair(self, free2):
        idx = channel_index(free2)
        assert idx.non_edges == (("a", "b"),)
        assert idx.shared("a", "b") == (0,)


class TestGammaReduced:
    def test_repeat_without_separator(self, free2):
        assert not is_gamma_reduced(free2, ["a", "a"])

    def test_separated_by_non_neighbour(self, free2):
        assert is_gamma_reduced(free2, ["a", "b", "a"])

    def test_neighbour_does_not_separate(self, z2):
        assert not is_gamma_reduced(z2, ["a", "b", "a"])

    def test_path_graph(self, p3):
        assert is_gamma_reduced(p3, ["a", "c", "a"])
        assert not is_gamma_reduced(p3, ["a", "b", "a"])
        assert is_gamma_reduced(p3, ["a", "b", "c"])

    def test_empty_and_single(self, p3):
        assert is_gamma_reduced(p3, [])
        assert is_gamma_reduced(p3, ["b"])
