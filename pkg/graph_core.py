# raagtool/graph_core.py
"""
The commutation graph and everything derived from it: neighbour sets,
the non-edge channel index and the Gamma-reduced sequence predicate.

Vertex order is the listing order of the input and drives every canonical
ordering downstream (normal forms, traces, channel layout).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ValidationError

from errors import (
    DuplicateEdgeError,
    DuplicateVertexError,
    LoopEdgeError,
    MalformedGraphError,
    UnknownVertexError,
)


# -----------------------------
# Public data shapes
# -----------------------------

class GraphDocument(BaseModel):
    """Wire shape of the graph JSON format."""
    vertices: List[str]
    edges: List[Tuple[str, str]] = []


class SimpleGraph:
    """
    Finite simple graph with a fixed vertex order.

    Backed by a frozen networkx graph; equality and hashing use the vertex
    order plus the edge set.
    """

    __slots__ = ("vertices", "position", "edges", "_nx", "_masks", "_hash")

    def __init__(self, vertices: Sequence[str], edges: Iterable[Tuple[str, str]] = ()):
        vertices = tuple(vertices)
        position: Dict[str, int] = {}
        for v in vertices:
            if not isinstance(v, str) or not v or any(ch.isspace() for ch in v):
                raise MalformedGraphError(f"invalid vertex name: {v!r}")
            if v in position:
                raise DuplicateVertexError(f"duplicate vertex: {v!r}")
            position[v] = len(position)

        edge_set = set()
        for a, b in edges:
            for endpoint in (a, b):
                if endpoint not in position:
                    raise UnknownVertexError(endpoint)
            if a == b:
                raise LoopEdgeError(f"loop edge at {a!r}")
            pair = frozenset((a, b))
            if pair in edge_set:
                raise DuplicateEdgeError(f"duplicate edge: {a!r}-{b!r}")
            edge_set.add(pair)

        graph = nx.Graph()
        graph.add_nodes_from(vertices)
        graph.add_edges_from(tuple(e) for e in edge_set)

        self.vertices: Tuple[str, ...] = vertices
        self.position: Dict[str, int] = position
        self.edges: FrozenSet[FrozenSet[str]] = frozenset(edge_set)
        self._nx = nx.freeze(graph)

        # Bit i of _masks[p] is set iff vertex i does NOT commute with vertex p
        # (every non-neighbour, p itself included).
        masks = []
        for v in vertices:
            mask = 0
            for w in vertices:
                if w == v or not graph.has_edge(v, w):
                    mask |= 1 << position[w]
            masks.append(mask)
        self._masks: Tuple[int, ...] = tuple(masks)
        self._hash = hash((self.vertices, self.edges))

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        edges = sorted(tuple(sorted(e, key=self.position.get)) for e in self.edges)
        return f"SimpleGraph(vertices={list(self.vertices)}, edges={edges})"

    @property
    def nx_graph(self) -> nx.Graph:
        return self._nx

    @property
    def noncommute_masks(self) -> Tuple[int, ...]:
        return self._masks

    def index(self, v: str) -> int:
        """Position of v in the vertex order"""
        try:
            return self.position[v]
        except (KeyError, TypeError):
            raise UnknownVertexError(v) from None

    def adjacent(self, v: str, w: str) -> bool:
        self.index(v)
        self.index(w)
        return self._nx.has_edge(v, w)

    def commute_positions(self, p: int, q: int) -> bool:
        """True iff the vertices at positions p, q are distinct and joined by an edge."""
        return not (self._masks[p] >> q) & 1


@dataclass(frozen=True)
class ChannelIndex:
    """The non-edge set F in canonical order, plus the slices F(v)."""
    non_edges: Tuple[Tuple[str, str], ...]
    per_vertex: Dict[str, Tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.non_edges)

    def channels_of(self, v: str) -> Tuple[int, ...]:
        try:
            return self.per_vertex[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def shared(self, v: str, w: str) -> Tuple[int, ...]:
        return tuple(sorted(set(self.channels_of(v)) & set(self.channels_of(w))))


# -----------------------------
# Parsing / serialization
# -----------------------------

def parse_graph(text: str) -> SimpleGraph:
    """Parse the graph JSON document into a validated SimpleGraph."""
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, TypeError) as e:
        raise MalformedGraphError(f"graph document is not valid JSON: {e}") from None
    try:
        doc = GraphDocument.model_validate(raw)
    except ValidationError as e:
        raise MalformedGraphError(f"graph document has the wrong shape: {e.error_count()} error(s)") from None
    return SimpleGraph(doc.vertices, doc.edges)


def graph_to_json(g: SimpleGraph) -> str:
    edges = sorted(
        (tuple(sorted(e, key=g.position.get)) for e in g.edges),
        key=lambda pair: (g.position[pair[0]], g.position[pair[1]]),
    )
    return json.dumps({"vertices": list(g.vertices), "edges": [list(e) for e in edges]})


def edgeless_graph(names: Sequence[str]) -> SimpleGraph:
    return SimpleGraph(names, ())


def complete_graph(names: Sequence[str]) -> SimpleGraph:
    return SimpleGraph(names, combinations(names, 2))


def path_graph(names: Sequence[str]) -> SimpleGraph:
    return SimpleGraph(names, zip(names, names[1:]))


# -----------------------------
# Derived structure
# -----------------------------

def neighbors(g: SimpleGraph, v: str) -> FrozenSet[str]:
    """N(v); never contains v."""
    g.index(v)
    return frozenset(g.nx_graph.neighbors(v))


def non_commuting(g: SimpleGraph, v: str) -> FrozenSet[str]:
    """V minus N(v); contains v itself."""
    return frozenset(g.vertices) - neighbors(g, v)


def channel_index(g: SimpleGraph) -> ChannelIndex:
    """Non-edges sorted by (min-position, max-position) with per-vertex slices."""
    pairs = []
    for a, b in nx.non_edges(g.nx_graph):
        pa, pb = g.position[a], g.position[b]
        pairs.append((a, b) if pa < pb else (b, a))
    pairs.sort(key=lambda pair: (g.position[pair[0]], g.position[pair[1]]))

    per_vertex = {v: [] for v in g.vertices}
    for i, (a, b) in enumerate(pairs):
        per_vertex[a].append(i)
        per_vertex[b].append(i)
    return ChannelIndex(tuple(pairs), {v: tuple(ix) for v, ix in per_vertex.items()})


def is_gamma_reduced(g: SimpleGraph, seq: Sequence[str]) -> bool:
    """
    True iff every repeat v_j = v_k (j < k) has some v_l in between with
    v_l not in N(v_j).
    """
    positions = [g.index(v) for v in seq]
    masks = g.noncommute_masks
    for j, pj in enumerate(positions):
        for k in range(j + 1, len(positions)):
            if positions[k] != pj:
                continue
            separated = any((masks[pj] >> positions[l]) & 1 for l in range(j + 1, k))
            if not separated:
                return False
    return True


def lex_normal_form(
    g: SimpleGraph,
    word: Sequence[Hashable],
    vertex_of: Callable[[Hashable], int],
    key: Callable[[Hashable], Tuple],
) -> Tuple[Hashable, ...]:
    """
    Lexicographically least representative of the commutation class of `word`.

    Letters whose vertices are joined by an edge may be swapped when adjacent.
    At every step the smallest letter (under `key`) that can be commuted to
    the front is emitted.
    """
    remaining = list(word)
    if len(remaining) < 2 or not g.edges:
        return tuple(remaining)
    masks = g.noncommute_masks
    full = (1 << len(g.vertices)) - 1
    out = []
    while remaining:
        blocked = 0
        best = None
        best_key = None
        for idx, letter in enumerate(remaining):
            p = vertex_of(letter)
            if not (blocked >> p) & 1:
                k = key(letter)
                if best is None or k < best_key:
                    best, best_key = idx, k
            blocked |= masks[p]
            if blocked == full:
                break
        out.append(remaining.pop(best))
    return tuple(out)


if __name__ == "__main__":
    print("=" * 60)
    print("GRAPH CORE SMOKE TEST")
    print("=" * 60)
    p4 = parse_graph('{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"],["c","d"]]}')
    print(p4)
    print(f"N(b) = {sorted(neighbors(p4, 'b'))}")
    print(f"F = {channel_index(p4).non_edges}")
    print(f"(a,c,a) reduced: {is_gamma_reduced(p4, ['a', 'c', 'a'])}")
