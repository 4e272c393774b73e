"""Graphs of groups with free or infinite dihedral vertices and infinite cyclic edges."""

from __future__ import annotations

import logging

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import networkx as nx

from gog_hhg.errors import (
    DisconnectedGraph,
    FiniteOrderAttachment,
    MalformedWord,
    RankZero,
    UnknownEdge,
    UnknownGenerator,
    UnknownVertex,
)


if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

logger = logging.getLogger(__name__)

Generator = int | str
Letter = tuple[Generator, int]
PathStep = tuple[str, int]

DIHEDRAL_GENERATORS = ("r", "s")


@dataclass(frozen=True)
class Free:
    """A free vertex group.

    Attributes:
        rank: Number of free generators, numbered from 1.
    """

    rank: int

    @property
    def generators(self) -> tuple[int, ...]:
        """Generator indices of the group."""
        return tuple(range(1, self.rank + 1))

    def __str__(self) -> str:
        """Render as in the text format.

        Returns:
            The declaration suffix.
        """
        return f"free {self.rank}"


@dataclass(frozen=True)
class Dihedral:
    """The infinite dihedral group with rotation ``r`` and reflection ``s``."""

    @property
    def generators(self) -> tuple[str, ...]:
        """Generator names of the group."""
        return DIHEDRAL_GENERATORS

    def __str__(self) -> str:
        """Render as in the text format.

        Returns:
            The declaration suffix.
        """
        return "dihedral"


VertexGroupKind = Free | Dihedral


@dataclass(frozen=True, order=True)
class VertexWord:
    """An element of one vertex group, stored exponent-compressed.

    Free words are freely reduced. Dihedral words are kept in the normal
    form ``s^e r^k`` with letters ``("s", 1)`` and ``("r", k)``.

    Attributes:
        vertex: The owning vertex id.
        letters: Pairs of generator and nonzero exponent.
    """

    vertex: str
    letters: tuple[Letter, ...] = ()

    @property
    def is_identity(self) -> bool:
        """Whether the word is empty."""
        return not self.letters

    def length(self) -> int:
        """Letter length of the word.

        Returns:
            The sum of the absolute exponents.
        """
        return sum(abs(exp) for _, exp in self.letters)

    def __str__(self) -> str:
        """Render as whitespace-separated letters.

        Returns:
            The rendered word, empty for the identity.
        """
        return " ".join(render_letter(self.vertex, gen, exp) for gen, exp in self.letters)


def render_letter(owner: str, generator: Generator, exponent: int) -> str:
    """Render one letter in the text format.

    Args:
        owner: Vertex or edge id.
        generator: Generator index or name.
        exponent: The exponent.

    Returns:
        The letter, with the exponent omitted when it is 1.
    """
    if exponent == 1:
        return f"{owner}.{generator}"
    return f"{owner}.{generator}^{exponent}"


@dataclass(frozen=True, order=True)
class EdgeRecord:
    """One edge of the graph together with its two attachments.

    The stable letter of the edge runs from ``source`` to ``target`` and
    satisfies ``t * attachment_target * t^-1 = attachment_source``.

    Attributes:
        name: Edge id.
        source: The vertex e-.
        target: The vertex e+.
        attachment_source: Image of the edge generator in the source group.
        attachment_target: Image of the edge generator in the target group.
        inverted: Whether this record is the reverse of the stored edge.
    """

    name: str
    source: str
    target: str
    attachment_source: VertexWord
    attachment_target: VertexWord
    inverted: bool = False

    def reverse(self) -> EdgeRecord:
        """Return the reverse edge.

        Returns:
            The edge with endpoints and attachments swapped.
        """
        return EdgeRecord(
            name=self.name,
            source=self.target,
            target=self.source,
            attachment_source=self.attachment_target,
            attachment_target=self.attachment_source,
            inverted=not self.inverted,
        )

    @property
    def sign(self) -> int:
        """Exponent of the stored stable letter that this record traverses."""
        return -1 if self.inverted else 1


@dataclass(frozen=True)
class GraphOfGroups:
    """A finite connected graph of groups.

    Attributes:
        vertices: Vertex id to vertex group.
        edges: Edge id to edge record, one record per edge pair.
    """

    vertices: Mapping[str, VertexGroupKind] = field(default_factory=dict)
    edges: Mapping[str, EdgeRecord] = field(default_factory=dict)

    @cached_property
    def tree(self) -> frozenset[str]:
        """The canonical spanning tree."""
        return spanning_tree(self)

    @cached_property
    def _tree_graph(self) -> nx.Graph:
        tree_graph = nx.Graph()
        tree_graph.add_nodes_from(sorted(self.vertices))
        for name in sorted(self.tree):
            edge = self.edges[name]
            tree_graph.add_edge(edge.source, edge.target, edge=name)
        return tree_graph

    def kind(self, vertex: str) -> VertexGroupKind:
        """Look up a vertex group.

        Args:
            vertex: The vertex id.

        Returns:
            The vertex group.

        Raises:
            UnknownVertex: If the vertex is not declared.
        """
        try:
            return self.vertices[vertex]
        except KeyError:
            err = f"unknown vertex {vertex!r}"
            raise UnknownVertex(err) from None

    def edge(self, name: str) -> EdgeRecord:
        """Look up an edge.

        Args:
            name: The edge id.

        Returns:
            The stored edge record.

        Raises:
            UnknownEdge: If the edge is not declared.
        """
        try:
            return self.edges[name]
        except KeyError:
            err = f"unknown edge {name!r}"
            raise UnknownEdge(err) from None

    def incident(self, vertex: str) -> list[EdgeRecord]:
        """Edges touching a vertex, in id order.

        Args:
            vertex: The vertex id.

        Returns:
            The stored records of the incident edges.
        """
        return [
            edge
            for _, edge in sorted(self.edges.items())
            if vertex in {edge.source, edge.target}
        ]

    def tree_path(self, start: str, end: str) -> tuple[PathStep, ...]:
        """Stable letters of the tree path between two vertices.

        Args:
            start: First vertex.
            end: Last vertex.

        Returns:
            Pairs of edge id and exponent, read from ``start`` to ``end``.
        """
        if start == end:
            return ()
        nodes = nx.shortest_path(self._tree_graph, start, end)
        steps = []
        for here, there in zip(nodes, nodes[1:], strict=False):
            name = self._tree_graph.edges[here, there]["edge"]
            steps.append((name, 1 if self.edges[name].source == here else -1))
        return tuple(steps)


def underlying_graph(graph: GraphOfGroups) -> nx.MultiGraph:
    """Build the underlying multigraph.

    Args:
        graph: The graph of groups.

    Returns:
        A multigraph keyed by edge id.
    """
    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(sorted(graph.vertices))
    for name, edge in sorted(graph.edges.items()):
        multigraph.add_edge(edge.source, edge.target, key=name)
    return multigraph


def build_graph(
    vertices: Mapping[str, VertexGroupKind],
    edges: Iterable[EdgeRecord],
) -> GraphOfGroups:
    """Assemble and validate a graph of groups.

    Args:
        vertices: Vertex id to vertex group.
        edges: The edge records.

    Returns:
        The validated graph.
    """
    graph = GraphOfGroups(
        vertices=dict(sorted(vertices.items())),
        edges={edge.name: edge for edge in sorted(edges)},
    )
    validate(graph)
    return graph


def validate(graph: GraphOfGroups) -> None:
    """Check every invariant of a graph of groups.

    Args:
        graph: The graph to check.

    Raises:
        DisconnectedGraph: If the graph is empty or disconnected.
        RankZero: If a free vertex has rank below one.
        UnknownVertex: If an edge names an undeclared vertex.
        MalformedWord: If an edge record names its own id inconsistently.
    """
    if not graph.vertices:
        err = "graph has no vertices"
        raise DisconnectedGraph(err)
    for vertex, kind in sorted(graph.vertices.items()):
        if isinstance(kind, Free) and kind.rank < 1:
            err = f"vertex {vertex!r} has free rank {kind.rank}"
            raise RankZero(err)
    for name, edge in sorted(graph.edges.items()):
        if edge.name != name or edge.inverted:
            err = f"edge table entry {name!r} holds record {edge.name!r}"
            raise MalformedWord(err)
        for vertex in (edge.source, edge.target):
            if vertex not in graph.vertices:
                err = f"edge {name!r} names unknown vertex {vertex!r}"
                raise UnknownVertex(err)
        check_attachment(graph, edge.source, edge.attachment_source, name)
        check_attachment(graph, edge.target, edge.attachment_target, name)
    if not nx.is_connected(underlying_graph(graph)):
        err = "underlying graph is not connected"
        raise DisconnectedGraph(err)


def check_attachment(graph: GraphOfGroups, vertex: str, word: VertexWord, edge: str) -> None:
    """Check that an attachment is a normal-form word of infinite order.

    Args:
        graph: The graph of groups.
        vertex: The vertex the attachment must live in.
        word: The attachment.
        edge: Edge id, for messages.

    Raises:
        UnknownGenerator: If the word lives in the wrong vertex or names a
            missing generator.
        MalformedWord: If the word is not in normal form.
        FiniteOrderAttachment: If the word has finite order.
    """
    if word.vertex != vertex:
        err = f"edge {edge!r}: attachment lives in {word.vertex!r}, expected {vertex!r}"
        raise UnknownGenerator(err)
    kind = graph.kind(vertex)
    for gen, exp in word.letters:
        if gen not in kind.generators:
            err = f"edge {edge!r}: vertex {vertex!r} has no generator {gen!r}"
            raise UnknownGenerator(err)
        if exp == 0:
            err = f"edge {edge!r}: zero exponent in attachment {word}"
            raise MalformedWord(err)
    if isinstance(kind, Free):
        if word.is_identity:
            err = f"edge {edge!r}: empty attachment in free vertex {vertex!r}"
            raise FiniteOrderAttachment(err)
        gens = [gen for gen, _ in word.letters]
        if any(left == right for left, right in zip(gens, gens[1:], strict=False)):
            err = f"edge {edge!r}: attachment {word} is not freely reduced"
            raise MalformedWord(err)
        return
    if len(word.letters) == 1 and word.letters[0][0] == "r":
        return
    if word.letters in {(), (("s", 1),)} or (
        len(word.letters) == 2 and word.letters[0] == ("s", 1) and word.letters[1][0] == "r"
    ):
        err = f"edge {edge!r}: attachment {word or '1'} has finite order"
        raise FiniteOrderAttachment(err)
    err = f"edge {edge!r}: dihedral attachment {word} is not in normal form"
    raise MalformedWord(err)


def spanning_tree(graph: GraphOfGroups) -> frozenset[str]:
    """Breadth-first spanning tree from the least vertex, scanning edges by id.

    Args:
        graph: A validated graph.

    Returns:
        The ids of the tree edges.
    """
    if not graph.vertices:
        return frozenset()
    root = min(graph.vertices)
    seen = {root}
    tree: set[str] = set()
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        for edge in graph.incident(vertex):
            other = edge.target if edge.source == vertex else edge.source
            if other in seen:
                continue
            seen.add(other)
            tree.add(edge.name)
            queue.append(other)
    logger.debug("Spanning tree from %s: %s", root, sorted(tree))
    return frozenset(tree)


def subgraph(graph: GraphOfGroups, vertices: Iterable[str], edges: Iterable[str]) -> GraphOfGroups:
    """Restrict a graph of groups to some of its vertices and edges.

    Args:
        graph: The graph of groups.
        vertices: Vertex ids to keep.
        edges: Edge ids to keep.

    Returns:
        The validated restriction with its own canonical tree.

    Raises:
        DisconnectedGraph: If a kept edge leaves the kept vertices or the
            restriction is disconnected.
    """
    vertex_set = set(vertices)
    edge_set = set(edges)
    for vertex in vertex_set:
        graph.kind(vertex)
    for name in sorted(edge_set):
        edge = graph.edge(name)
        if not {edge.source, edge.target} <= vertex_set:
            err = f"edge {name!r} leaves the selected vertices"
            raise DisconnectedGraph(err)
    return build_graph(
        {vertex: graph.vertices[vertex] for vertex in vertex_set},
        (graph.edges[name] for name in edge_set),
    )
