"""Linear parametrizations onto the infinite dihedral group and the overall verdict."""

from __future__ import annotations

import logging
import math

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

from gog_hhg.balance import Unbalanced, edge_balanced, group_balanced
from gog_hhg.certify import BSWitness, almost_bs_witness
from gog_hhg.conjugacy import ConjugacyGraph, build_conjugacy_graph, edge_classes
from gog_hhg.dihedral import (
    IDENTITY,
    REFLECTION,
    DihedralElement,
    generated_subgroup,
    subgroup_index,
)
from gog_hhg.errors import CertificateError, NotTwoEnded
from gog_hhg.model import Dihedral, Free, validate


if TYPE_CHECKING:
    from collections.abc import Mapping

    from gog_hhg.model import Generator, GraphOfGroups, VertexWord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearParametrization:
    """A homomorphism to the infinite dihedral group.

    Attributes:
        vertex_images: Vertex id to generator to image.
        stable_images: Edge id to image of its stable letter; missing edges
            map to the identity.
    """

    vertex_images: Mapping[str, Mapping[Generator, DihedralElement]]
    stable_images: Mapping[str, DihedralElement] = field(default_factory=dict)

    def image(self, word: VertexWord) -> DihedralElement:
        """Evaluate the homomorphism on a vertex word.

        Args:
            word: The word.

        Returns:
            Its image.
        """
        images = self.vertex_images.get(word.vertex, {})
        product = IDENTITY
        for gen, exp in word.letters:
            product *= images.get(gen, IDENTITY) ** exp
        return product

    def stable(self, name: str) -> DihedralElement:
        """Image of a stable letter.

        Args:
            name: The edge id.

        Returns:
            The image, the identity when unassigned.
        """
        return self.stable_images.get(name, IDENTITY)

    def as_json(self) -> dict[str, list[int]]:
        """Flatten to ``{"v.1": [eps, k], "e.t": [eps, k]}``.

        Stable letters mapped to the identity are left out.

        Returns:
            The mapping.
        """
        flat = {
            f"{vertex}.{gen}": image.as_pair()
            for vertex, images in self.vertex_images.items()
            for gen, image in images.items()
        }
        flat.update(
            {
                f"{name}.t": image.as_pair()
                for name, image in self.stable_images.items()
                if image != IDENTITY
            },
        )
        return dict(sorted(flat.items()))


@dataclass
class VerificationReport:
    """Outcome of checking a parametrization.

    Attributes:
        failures: One message per violated condition.
    """

    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """Whether every condition holds."""
        return not self.failures

    def __bool__(self) -> bool:
        """Truth value of the report.

        Returns:
            ``ok``.
        """
        return self.ok


@dataclass(frozen=True)
class Certificate:
    """A verified parametrization of one conjugacy graph.

    Attributes:
        index: Index of the edge class.
        conjugacy: The conjugacy graph.
        parametrization: Its verified parametrization.
    """

    index: int
    conjugacy: ConjugacyGraph
    parametrization: LinearParametrization


@dataclass(frozen=True)
class HHG:
    """Every conjugacy graph is linearly parametrizable.

    Attributes:
        certificates: One certificate per edge class.
    """

    certificates: tuple[Certificate, ...]


@dataclass(frozen=True)
class NotHHG:
    """Some edge is unbalanced.

    Attributes:
        edge: The unbalanced edge.
        verdict: Its unbalanced cycle.
        witness: The verified almost Baumslag-Solitar witness.
    """

    edge: str
    verdict: Unbalanced
    witness: BSWitness


Verdict = HHG | NotHHG


def _root_exponent(word: VertexWord) -> int:
    return word.letters[0][1]


def _require_two_ended(graph: GraphOfGroups) -> None:
    for vertex, kind in sorted(graph.vertices.items()):
        if isinstance(kind, Free) and kind.rank != 1:
            err = f"vertex {vertex!r} has free rank {kind.rank}"
            raise NotTwoEnded(err)


def _potentials(graph: GraphOfGroups) -> dict[str, Fraction]:
    """Rotation exponent per vertex generator along the spanning tree.

    With tree stable letters mapped to the identity each tree edge forces
    ``n P(target) = m P(source)``.

    Args:
        graph: A two-ended graph.

    Returns:
        Rational potentials, 1 at the least vertex.
    """
    root = min(graph.vertices)
    potentials = {root: Fraction(1)}
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        for edge in graph.incident(vertex):
            if edge.name not in graph.tree:
                continue
            m = _root_exponent(edge.attachment_source)
            n = _root_exponent(edge.attachment_target)
            if edge.source == vertex and edge.target not in potentials:
                potentials[edge.target] = potentials[vertex] * m / n
                queue.append(edge.target)
            elif edge.target == vertex and edge.source not in potentials:
                potentials[edge.source] = potentials[vertex] * n / m
                queue.append(edge.source)
    return potentials


def parametrize(delta: GraphOfGroups | ConjugacyGraph) -> LinearParametrization | Unbalanced:
    """Construct a verified linear parametrization.

    Args:
        delta: A graph whose vertex groups are all two-ended.

    Returns:
        The parametrization, or the unbalanced cycle that rules it out.

    Raises:
        CertificateError: If the constructed map fails its own verification.
    """
    graph = delta.graph if isinstance(delta, ConjugacyGraph) else delta
    _require_two_ended(graph)
    verdict = group_balanced(graph)
    if isinstance(verdict, Unbalanced):
        return verdict
    potentials = _potentials(graph)
    scale = math.lcm(*(value.denominator for value in potentials.values()))
    vertex_images: dict[str, dict[Generator, DihedralElement]] = {}
    for vertex, kind in sorted(graph.vertices.items()):
        rotation = DihedralElement(0, int(potentials[vertex] * scale))
        if isinstance(kind, Dihedral):
            vertex_images[vertex] = {"r": rotation, "s": REFLECTION}
        else:
            vertex_images[vertex] = {1: rotation}
    stable_images = {}
    for name, edge in sorted(graph.edges.items()):
        if name in graph.tree:
            continue
        left = _root_exponent(edge.attachment_target) * potentials[edge.target]
        right = _root_exponent(edge.attachment_source) * potentials[edge.source]
        stable_images[name] = IDENTITY if left == right else REFLECTION
    phi = LinearParametrization(vertex_images, stable_images)
    report = verify_parametrization(graph, phi)
    if not report:
        err = f"constructed parametrization fails verification: {report.failures}"
        logger.critical(err)
        raise CertificateError(err)
    return phi


def _vertex_failures(
    vertex: str,
    kind: Free | Dihedral,
    images: Mapping[Generator, DihedralElement],
) -> list[str]:
    missing = [gen for gen in kind.generators if gen not in images]
    if missing:
        return [f"vertex {vertex}: no image for {missing}"]
    if isinstance(kind, Free) and kind.rank != 1:
        return [f"vertex {vertex}: free rank {kind.rank} cannot map with finite kernel"]
    failures = []
    rotation = images["r"] if isinstance(kind, Dihedral) else images[1]
    if not rotation.is_infinite_order:
        failures.append(f"vertex {vertex}: infinite kernel, generator maps to {rotation}")
    if isinstance(kind, Dihedral):
        reflection = images["s"]
        if reflection * reflection != IDENTITY or reflection.eps != 1:
            failures.append(f"vertex {vertex}: s maps to {reflection}, not a reflection")
        if reflection * rotation * reflection != rotation.inverse():
            failures.append(f"vertex {vertex}: s r s = r^-1 fails")
    subgroup = generated_subgroup(images[gen] for gen in kind.generators)
    if subgroup is None:
        failures.append(f"vertex {vertex}: image has infinite index")
    else:
        index = subgroup_index(subgroup)
        logger.debug("Vertex %s maps onto %s of index %d", vertex, subgroup, index)
    return failures


def verify_parametrization(
    delta: GraphOfGroups | ConjugacyGraph,
    phi: LinearParametrization,
) -> VerificationReport:
    """Check a parametrization from scratch.

    Args:
        delta: The graph.
        phi: The candidate parametrization.

    Returns:
        The report; truthy when every relation and index condition holds.
    """
    graph = delta.graph if isinstance(delta, ConjugacyGraph) else delta
    report = VerificationReport()
    for vertex, kind in sorted(graph.vertices.items()):
        report.failures.extend(_vertex_failures(vertex, kind, phi.vertex_images.get(vertex, {})))
    for name, edge in sorted(graph.edges.items()):
        stable = phi.stable(name)
        if name in graph.tree and stable != IDENTITY:
            report.failures.append(f"edge {name}: tree stable letter maps to {stable}")
        target = phi.image(edge.attachment_target)
        source = phi.image(edge.attachment_source)
        if not target.is_infinite_order:
            report.failures.append(f"edge {name}: edge group maps to {target}")
        conjugated = stable * target * stable.inverse()
        if conjugated != source:
            report.failures.append(f"edge {name}: relation gives {conjugated} != {source}")
    for failure in report.failures:
        logger.debug("Verification failure: %s", failure)
    return report


def hhg_verdict(graph: GraphOfGroups) -> Verdict:
    """Decide hierarchical hyperbolicity with a certificate either way.

    Args:
        graph: A graph with free or dihedral vertices.

    Returns:
        ``HHG`` with one verified parametrization per edge class, or
        ``NotHHG`` with an unbalanced edge and a verified witness.

    Raises:
        CertificateError: If a class is unbalanced but none of its edges is.
    """
    validate(graph)
    certificates = []
    for cls in edge_classes(graph):
        conjugacy = build_conjugacy_graph(graph, cls)
        result = parametrize(conjugacy)
        if isinstance(result, LinearParametrization):
            certificates.append(Certificate(cls.index, conjugacy, result))
            continue
        logger.info("Edge class %d is unbalanced with modulus %s", cls.index, result.modulus)
        for name in cls.edges:
            verdict = edge_balanced(graph, name)
            if isinstance(verdict, Unbalanced):
                return NotHHG(name, verdict, almost_bs_witness(graph, verdict))
        err = f"edge class {cls.index} is unbalanced but all of its edges are balanced"
        logger.critical(err)
        raise CertificateError(err)
    logger.info("All %d edge classes parametrize", len(certificates))
    return HHG(tuple(certificates))
