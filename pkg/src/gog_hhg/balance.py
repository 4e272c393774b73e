"""Balance of edges and groups through a groupoid of root ratios.

Every attachment is a conjugate of a power of a canonical root in its vertex
group. The groupoid has one node per (vertex, root) and one arc per edge,
weighted by how the edge relation rescales root exponents. Dihedral nodes
also carry a sign-flipping arc, since ``s r^k s = r^-k``. A graph is balanced
when every cycle of the groupoid has weight of absolute value one.
"""

from __future__ import annotations

import logging

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

from gog_hhg import dihedral, free_words
from gog_hhg.model import Dihedral, VertexWord
from gog_hhg.words import (
    DEFAULT_NODE_CAP,
    PathWord,
    are_equal,
    conjugate_path,
    conjugator_from_moves,
    elliptic_orbit,
    pinch_membership,
    vertex_path,
    vpow,
)


if TYPE_CHECKING:
    from collections.abc import Collection, Iterable

    from gog_hhg.model import EdgeRecord, GraphOfGroups

logger = logging.getLogger(__name__)

ROOT_R = ("r", 1)


@dataclass(frozen=True, order=True)
class Node:
    """A commensurability class of cyclic subgroups inside one vertex group.

    Attributes:
        vertex: The vertex id.
        root: The canonical primitive root (``r`` for dihedral vertices).
    """

    vertex: str
    root: VertexWord

    def __str__(self) -> str:
        """Render as ``vertex:root``.

        Returns:
            The label.
        """
        return f"{self.vertex}:{self.root}"


@dataclass(frozen=True)
class Attachment:
    """An attachment written over the root of its node.

    Attributes:
        node: The node of the attachment.
        conjugator: ``g`` with ``attachment = g root^exponent g^-1``.
        exponent: Nonzero exponent.
    """

    node: Node
    conjugator: VertexWord
    exponent: int


@dataclass(frozen=True, order=True)
class Arc:
    """A weighted arc of the ratio groupoid.

    An edge arc runs from the target-side node to the source-side node: the
    edge relation sends ``root+^(n x)`` to ``root-^(m x)``, so its weight is
    ``m / n``. A flip arc is the dihedral self loop of weight -1.

    Attributes:
        kind: ``edge`` or ``flip``.
        name: The edge id, or the vertex id for flips.
        tail: Node of the target-side attachment.
        head: Node of the source-side attachment.
        tail_exponent: ``n``.
        head_exponent: ``m``.
        tail_conjugator: Conjugator of the target-side attachment.
        head_conjugator: Conjugator of the source-side attachment.
    """

    kind: Literal["edge", "flip"]
    name: str
    tail: Node
    head: Node
    tail_exponent: int = 1
    head_exponent: int = -1
    tail_conjugator: VertexWord | None = None
    head_conjugator: VertexWord | None = None

    @property
    def weight(self) -> Fraction:
        """The ratio ``m / n``."""
        return Fraction(self.head_exponent, self.tail_exponent)


@dataclass(frozen=True, order=True)
class Step:
    """An arc traversed forwards or backwards.

    Attributes:
        arc: The arc.
        forward: Whether the arc is traversed from tail to head.
    """

    arc: Arc
    forward: bool = True

    @property
    def source(self) -> Node:
        """Node the step leaves."""
        return self.arc.tail if self.forward else self.arc.head

    @property
    def target(self) -> Node:
        """Node the step enters."""
        return self.arc.head if self.forward else self.arc.tail

    @property
    def weight(self) -> Fraction:
        """Weight in the direction of travel."""
        return self.arc.weight if self.forward else 1 / self.arc.weight

    @property
    def source_exponent(self) -> int:
        """Root exponent the step consumes."""
        return self.arc.tail_exponent if self.forward else self.arc.head_exponent

    def reverse(self) -> Step:
        """Return the step travelled the other way.

        Returns:
            The reversed step.
        """
        return Step(self.arc, not self.forward)

    def label(self) -> str:
        """Render as ``e``, ``e^-1`` or ``v.s``.

        Returns:
            The label.
        """
        if self.arc.kind == "flip":
            return f"{self.arc.name}.s"
        return self.arc.name if self.forward else f"{self.arc.name}^-1"


@dataclass(frozen=True)
class RatioGroupoid:
    """Nodes and arcs of the ratio groupoid.

    Attributes:
        nodes: Nodes in canonical order.
        arcs: Edge arcs by edge id, then flip arcs by vertex.
    """

    nodes: tuple[Node, ...]
    arcs: tuple[Arc, ...]


@dataclass(frozen=True)
class Balanced:
    """Every cycle has weight of absolute value one."""

    def __str__(self) -> str:
        """Render the verdict name.

        Returns:
            ``Balanced``.
        """
        return "Balanced"


@dataclass(frozen=True)
class Unbalanced:
    """A cycle whose weight has absolute value other than one.

    Attributes:
        cycle: The steps, closing up at the source of the first.
        modulus: Product of the step weights.
    """

    cycle: tuple[Step, ...]
    modulus: Fraction

    def __str__(self) -> str:
        """Render the verdict name.

        Returns:
            ``Unbalanced``.
        """
        return "Unbalanced"


BalanceVerdict = Balanced | Unbalanced
BALANCED = Balanced()


def resolve_attachment(graph: GraphOfGroups, word: VertexWord) -> Attachment:
    """Write an attachment over its canonical root.

    Args:
        graph: The graph of groups.
        word: An infinite-order vertex word.

    Returns:
        Its node, conjugator and exponent.
    """
    if isinstance(graph.kind(word.vertex), Dihedral):
        root = VertexWord(word.vertex, (ROOT_R,))
        exponent = dihedral.to_element(word).k
        return Attachment(Node(word.vertex, root), VertexWord(word.vertex), exponent)
    data = free_words.primitive_root(word)
    return Attachment(Node(word.vertex, data.root), data.conjugator, data.exponent)


def edge_arc(graph: GraphOfGroups, edge: EdgeRecord) -> Arc:
    """Build the arc of one edge.

    Args:
        graph: The graph of groups.
        edge: The edge.

    Returns:
        The arc from the target-side node to the source-side node.
    """
    plus = resolve_attachment(graph, edge.attachment_target)
    minus = resolve_attachment(graph, edge.attachment_source)
    return Arc(
        kind="edge",
        name=edge.name,
        tail=plus.node,
        head=minus.node,
        tail_exponent=plus.exponent,
        head_exponent=minus.exponent,
        tail_conjugator=plus.conjugator,
        head_conjugator=minus.conjugator,
    )


def build_groupoid(graph: GraphOfGroups, skip: Collection[str] = frozenset()) -> RatioGroupoid:
    """Build the ratio groupoid of a graph of groups.

    Args:
        graph: A validated graph.
        skip: Edge ids left out.

    Returns:
        The groupoid.
    """
    arcs = [edge_arc(graph, edge) for name, edge in sorted(graph.edges.items()) if name not in skip]
    nodes = sorted({node for arc in arcs for node in (arc.tail, arc.head)})
    for node in nodes:
        if isinstance(graph.kind(node.vertex), Dihedral):
            arcs.append(Arc(kind="flip", name=node.vertex, tail=node, head=node))
    return RatioGroupoid(tuple(nodes), tuple(arcs))


@dataclass
class _Forest:
    """Breadth-first spanning forest with a root-exponent scale per node.

    Along a step of weight ``w`` the scale is multiplied by ``w``.

    Attributes:
        groupoid: The groupoid.
        extra: Nodes to include even when no arc touches them.
        scale: Scale per node, 1 at each component root.
        parent: Tree step entering each node.
        root: Component root per node.
        depth: Tree depth per node.
        chords: Arcs outside the forest.
    """

    groupoid: RatioGroupoid
    extra: Iterable[Node] = ()
    scale: dict[Node, Fraction] = field(default_factory=dict)
    parent: dict[Node, Step] = field(default_factory=dict)
    root: dict[Node, Node] = field(default_factory=dict)
    depth: dict[Node, int] = field(default_factory=dict)
    chords: list[Arc] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Grow the forest."""
        nodes = sorted({*self.groupoid.nodes, *self.extra})
        adjacency: dict[Node, list[Step]] = {node: [] for node in nodes}
        for arc in self.groupoid.arcs:
            adjacency[arc.tail].append(Step(arc, forward=True))
            adjacency[arc.head].append(Step(arc, forward=False))
        tree_arcs: set[Arc] = set()
        for start in nodes:
            if start in self.scale:
                continue
            self.scale[start] = Fraction(1)
            self.root[start] = start
            self.depth[start] = 0
            queue = deque([start])
            while queue:
                node = queue.popleft()
                for step in adjacency[node]:
                    if step.target in self.scale:
                        continue
                    self.scale[step.target] = self.scale[node] * step.weight
                    self.parent[step.target] = step
                    self.root[step.target] = start
                    self.depth[step.target] = self.depth[node] + 1
                    tree_arcs.add(step.arc)
                    queue.append(step.target)
        self.chords = [arc for arc in self.groupoid.arcs if arc not in tree_arcs]

    def path(self, start: Node, end: Node) -> tuple[Step, ...]:
        """Tree path between two nodes of one component.

        Args:
            start: First node.
            end: Last node.

        Returns:
            The steps from ``start`` to ``end``.
        """
        upward: list[Step] = []
        downward: list[Step] = []
        here, there = start, end
        while self.depth[here] > self.depth[there]:
            upward.append(self.parent[here].reverse())
            here = self.parent[here].source
        while self.depth[there] > self.depth[here]:
            downward.append(self.parent[there])
            there = self.parent[there].source
        while here != there:
            upward.append(self.parent[here].reverse())
            here = self.parent[here].source
            downward.append(self.parent[there])
            there = self.parent[there].source
        return (*upward, *reversed(downward))

    def cycle(self, arc: Arc) -> tuple[Step, ...]:
        """Close a chord into a cycle through the tree.

        Args:
            arc: A chord.

        Returns:
            The chord followed by the tree path back to its tail.
        """
        return (Step(arc), *self.path(arc.head, arc.tail))

    def modulus(self, arc: Arc) -> Fraction:
        """Weight of the cycle closed by a chord.

        Args:
            arc: A chord.

        Returns:
            The cycle weight.
        """
        return arc.weight * self.scale[arc.tail] / self.scale[arc.head]

    def bad_cycle(self, component: Node | None = None) -> Unbalanced | None:
        """Find a chord whose cycle weight is not of absolute value one.

        Args:
            component: Restrict to the component with this root.

        Returns:
            The first such cycle, or ``None``.
        """
        for arc in self.chords:
            if component is not None and self.root[arc.tail] != component:
                continue
            modulus = self.modulus(arc)
            if abs(modulus) != 1:
                return Unbalanced(self.cycle(arc), modulus)
        return None


def cycle_weight(cycle: Iterable[Step]) -> Fraction:
    """Multiply the weights along a cycle.

    Args:
        cycle: The steps.

    Returns:
        The product.
    """
    product = Fraction(1)
    for step in cycle:
        product *= step.weight
    return product


def group_balanced(graph: GraphOfGroups) -> BalanceVerdict:
    """Decide whether every groupoid cycle has weight of absolute value one.

    Args:
        graph: A validated graph.

    Returns:
        ``BALANCED`` or the first violating cycle.
    """
    verdict = _Forest(build_groupoid(graph)).bad_cycle()
    if verdict is None:
        logger.debug("Groupoid is balanced")
        return BALANCED
    logger.debug(
        "Unbalanced cycle %s with modulus %s",
        [step.label() for step in verdict.cycle],
        verdict.modulus,
    )
    return verdict


def edge_balanced(graph: GraphOfGroups, name: str) -> BalanceVerdict:
    """Decide whether one edge is balanced.

    The edge is checked against the groupoid of the graph without it: a bad
    cycle in the component joining its two nodes, or a connecting path whose
    ratio disagrees with the edge weight, makes it unbalanced. Edges whose
    nodes fall into different components are balanced.

    Args:
        graph: A validated graph.
        name: The edge id.

    Returns:
        ``BALANCED`` or a cycle through the edge's nodes.
    """
    arc = edge_arc(graph, graph.edge(name))
    forest = _Forest(build_groupoid(graph, skip={name}), extra=(arc.tail, arc.head))
    if forest.root[arc.tail] != forest.root[arc.head]:
        logger.debug("Edge %s joins separate components of the groupoid", name)
        return BALANCED
    verdict = forest.bad_cycle(forest.root[arc.tail])
    if verdict is not None:
        return verdict
    modulus = forest.modulus(arc)
    if abs(modulus) != 1:
        return Unbalanced((Step(arc), *forest.path(arc.head, arc.tail)), modulus)
    return BALANCED


@dataclass(frozen=True)
class OracleResult:
    """Outcome of the brute-force balance search.

    Attributes:
        status: ``unbalanced`` or ``balanced-within-bounds``.
        conjugator: ``h`` with ``h target^i h^-1 = source^j``, avoiding the edge.
        i: Power of the target attachment.
        j: Power of the source attachment.
    """

    status: Literal["unbalanced", "balanced-within-bounds"]
    conjugator: PathWord | None = None
    i: int | None = None
    j: int | None = None

    @property
    def conclusive(self) -> bool:
        """Whether the search found a witness."""
        return self.status == "unbalanced"


def brute_force_balance_oracle(
    graph: GraphOfGroups,
    name: str,
    max_syllables: int,
    max_exponent: int,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
) -> OracleResult:
    """Search for a conjugation between unequal powers of an edge's attachments.

    Conjugators are enumerated without the edge itself, exactly as the
    balance definition requires.

    Args:
        graph: A validated graph.
        name: The edge id.
        max_syllables: Most moves in a conjugator.
        max_exponent: Largest attachment power and move exponent.
        node_cap: Most states expanded per power.

    Returns:
        The first witness found, or ``balanced-within-bounds``.
    """
    edge = graph.edge(name)
    reverse = edge.reverse()
    for i in range(1, max_exponent + 1):
        start = vpow(graph, edge.attachment_target, i)
        for image, moves in elliptic_orbit(
            graph, start, max_syllables, max_exponent, node_cap=node_cap, avoid={name}
        ):
            if image.vertex != edge.source:
                continue
            j = pinch_membership(graph, reverse, image)
            if not j or abs(j) > max_exponent or abs(j) == i:
                continue
            conjugator = conjugator_from_moves(graph, image.vertex, moves)
            conjugated = conjugate_path(graph, conjugator, vertex_path(start))
            if are_equal(graph, conjugated, vertex_path(image)):
                logger.debug("Oracle found i=%d, j=%d for edge %s", i, j, name)
                return OracleResult("unbalanced", conjugator, i, j)
    return OracleResult("balanced-within-bounds")
