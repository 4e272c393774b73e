"""Edge classes and their conjugacy graphs."""

from __future__ import annotations

import logging

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from networkx.utils import UnionFind

from gog_hhg.balance import Node, edge_arc, resolve_attachment
from gog_hhg.model import Dihedral, EdgeRecord, Free, VertexWord, build_graph
from gog_hhg.words import (
    PathWord,
    StableLetter,
    are_equal,
    build_path,
    conjugate_path,
    vertex_path,
    vinv,
    vpow,
)


if TYPE_CHECKING:
    from collections.abc import Mapping

    from gog_hhg.model import GraphOfGroups, VertexGroupKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Occurrence:
    """One side of one edge.

    Attributes:
        edge: The edge id.
        side: ``source`` or ``target``.
    """

    edge: str
    side: Literal["source", "target"]

    def __str__(self) -> str:
        """Render as ``edge:side``.

        Returns:
            The label.
        """
        return f"{self.edge}:{self.side}"


@dataclass(frozen=True)
class EdgeClass:
    """An equivalence class of attachment occurrences.

    Attributes:
        index: Position in the canonical class order.
        members: The occurrences, sorted.
        nodes: Groupoid nodes the occurrences resolve to, sorted.
    """

    index: int
    members: tuple[Occurrence, ...]
    nodes: tuple[Node, ...]

    @property
    def edges(self) -> tuple[str, ...]:
        """Edge ids of the class, sorted."""
        return tuple(sorted({occurrence.edge for occurrence in self.members}))


@dataclass(frozen=True)
class EdgeProvenance:
    """How a derived edge sits inside the original group.

    ``source_conjugator^-1 t_e target_conjugator`` conjugates the target root
    power onto the source root power.

    Attributes:
        source_conjugator: Conjugator of the source-side attachment.
        target_conjugator: Conjugator of the target-side attachment.
    """

    source_conjugator: VertexWord
    target_conjugator: VertexWord


@dataclass(frozen=True)
class ConjugacyGraph:
    """The graph of two-ended groups attached to one edge class.

    Attributes:
        index: Index of the edge class.
        graph: The derived graph of groups.
        nodes: Derived vertex id to the original node it stands for.
        edges: Derived edge id to its provenance.
    """

    index: int
    graph: GraphOfGroups
    nodes: Mapping[str, Node]
    edges: Mapping[str, EdgeProvenance]

    def stable_image(self, original: GraphOfGroups, name: str) -> PathWord:
        """The original element a derived stable letter stands for.

        Args:
            original: The graph the class came from.
            name: The edge id.

        Returns:
            ``g-^-1 t_e g+`` based at the source vertex.
        """
        edge = original.edge(name)
        provenance = self.edges[name]
        return build_path(
            original,
            edge.source,
            (
                vinv(original, provenance.source_conjugator),
                StableLetter(name, 1),
                provenance.target_conjugator,
            ),
        )


def _occurrences(graph: GraphOfGroups) -> dict[Occurrence, Node]:
    nodes = {}
    for name, edge in sorted(graph.edges.items()):
        nodes[Occurrence(name, "source")] = resolve_attachment(graph, edge.attachment_source).node
        nodes[Occurrence(name, "target")] = resolve_attachment(graph, edge.attachment_target).node
    return nodes


def edge_classes(graph: GraphOfGroups) -> list[EdgeClass]:
    """Partition the attachment occurrences into edge classes.

    Two occurrences are linked when they are the two sides of one edge or
    their attachments are commensurable in one vertex group.

    Args:
        graph: A validated graph.

    Returns:
        The classes, ordered by their least occurrence.
    """
    nodes = _occurrences(graph)
    classes = UnionFind(sorted(nodes))
    for name in sorted(graph.edges):
        classes.union(Occurrence(name, "source"), Occurrence(name, "target"))
    by_node: defaultdict[Node, list[Occurrence]] = defaultdict(list)
    for occurrence, node in sorted(nodes.items()):
        by_node[node].append(occurrence)
    for members in by_node.values():
        classes.union(*members)
    groups = sorted(tuple(sorted(group)) for group in classes.to_sets())
    result = [
        EdgeClass(
            index=index,
            members=members,
            nodes=tuple(sorted({nodes[occurrence] for occurrence in members})),
        )
        for index, members in enumerate(groups)
    ]
    logger.debug("Found %d edge classes", len(result))
    return result


def edge_class_of(graph: GraphOfGroups, name: str) -> EdgeClass:
    """Find the class of an edge.

    Args:
        graph: A validated graph.
        name: The edge id.

    Returns:
        The class containing both sides of the edge.
    """
    graph.edge(name)
    return next(cls for cls in edge_classes(graph) if name in cls.edges)


def _derived_names(nodes: tuple[Node, ...]) -> dict[Node, str]:
    counts = Counter(node.vertex for node in nodes)
    names: dict[Node, str] = {}
    used: set[str] = set()
    seen: Counter[str] = Counter()
    for node in nodes:
        seen[node.vertex] += 1
        name = node.vertex if counts[node.vertex] == 1 else f"{node.vertex}-{seen[node.vertex]}"
        while name in used:
            name = f"{name}-{seen[node.vertex]}"
        used.add(name)
        names[node] = name
    return names


def build_conjugacy_graph(graph: GraphOfGroups, cls: EdgeClass) -> ConjugacyGraph:
    """Build the conjugacy graph of one edge class.

    Each derived vertex is the cyclic group of a root (or the whole dihedral
    vertex); each edge of the class becomes an edge whose attachments are the
    root exponents of its original attachments.

    Args:
        graph: A validated graph.
        cls: One of its edge classes.

    Returns:
        The derived graph with provenance.
    """
    names = _derived_names(cls.nodes)
    vertices: dict[str, VertexGroupKind] = {}
    for node, name in names.items():
        vertices[name] = Dihedral() if isinstance(graph.kind(node.vertex), Dihedral) else Free(1)

    def root_power(name: str, exponent: int) -> VertexWord:
        generator = "r" if isinstance(vertices[name], Dihedral) else 1
        return VertexWord(name, ((generator, exponent),))

    edges = []
    provenance = {}
    for name in cls.edges:
        arc = edge_arc(graph, graph.edge(name))
        source, target = names[arc.head], names[arc.tail]
        edges.append(
            EdgeRecord(
                name=name,
                source=source,
                target=target,
                attachment_source=root_power(source, arc.head_exponent),
                attachment_target=root_power(target, arc.tail_exponent),
            ),
        )
        provenance[name] = EdgeProvenance(
            source_conjugator=arc.head_conjugator or VertexWord(arc.head.vertex),
            target_conjugator=arc.tail_conjugator or VertexWord(arc.tail.vertex),
        )
    derived = build_graph(vertices, edges)
    logger.debug("Conjugacy graph %d: %d vertices, %d edges", cls.index, len(vertices), len(edges))
    return ConjugacyGraph(
        index=cls.index,
        graph=derived,
        nodes={name: node for node, name in names.items()},
        edges=provenance,
    )


def verify_provenance(original: GraphOfGroups, conjugacy: ConjugacyGraph) -> list[str]:
    """Re-check every derived attachment identity in the original group.

    Args:
        original: The graph the class came from.
        conjugacy: Its conjugacy graph.

    Returns:
        Failure messages; empty when everything holds.
    """
    failures = []
    for name, edge in sorted(conjugacy.graph.edges.items()):
        plus = conjugacy.nodes[edge.target]
        minus = conjugacy.nodes[edge.source]
        target_power = vpow(original, plus.root, edge.attachment_target.letters[0][1])
        source_power = vpow(original, minus.root, edge.attachment_source.letters[0][1])
        stable = conjugacy.stable_image(original, name)
        image = conjugate_path(original, stable, vertex_path(target_power))
        if not are_equal(original, image, vertex_path(source_power)):
            failures.append(
                f"edge {name}: stable letter does not conjugate {target_power} to {source_power}",
            )
    return failures
