"""Almost Baumslag-Solitar witnesses and distortion certificates.

An unbalanced groupoid cycle is turned into an element ``s`` of the original
group and a root power ``a`` with ``s a^i s^-1 = a^j``. Iterating the relation
compresses ``a^(j^k)`` into a word of length about ``2k |s| + |i|^k |a|``.
"""

from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from gog_hhg import free_words
from gog_hhg.balance import Unbalanced
from gog_hhg.errors import CertificateError, NoWitness
from gog_hhg.model import Dihedral, VertexWord
from gog_hhg.words import (
    PathWord,
    StableLetter,
    britton_reduce,
    build_path,
    concat,
    conjugate_path,
    inverse_path,
    letter_length,
    path_power,
    render,
    vertex_path,
    vinv,
    vpow,
)


if TYPE_CHECKING:
    from collections.abc import Iterable

    from gog_hhg.balance import BalanceVerdict, Step
    from gog_hhg.model import GraphOfGroups

logger = logging.getLogger(__name__)

REDUCTION_SYLLABLES = 4096


@dataclass(frozen=True)
class BSWitness:
    """Elements ``a`` and ``s`` with ``s a^i s^-1 = a^j`` and ``|i| != |j|``.

    Attributes:
        a: A power of a canonical root, as a closed path word.
        s: The conjugating element, closed at the same vertex.
        i: Exponent on the left, positive.
        j: Exponent on the right.
        transcript: Rendered Britton reduction of ``s a^i s^-1 a^-j``.
    """

    a: PathWord
    s: PathWord
    i: int
    j: int
    transcript: str = ""

    def as_json(self, graph: GraphOfGroups) -> dict[str, object]:
        """Render the witness for JSON output.

        Args:
            graph: The graph the words live in.

        Returns:
            The fields with words in the text format.
        """
        return {
            "a": render(graph, self.a),
            "s": render(graph, self.s),
            "i": self.i,
            "j": self.j,
            "transcript": self.transcript,
        }


@dataclass(frozen=True)
class DistortionRow:
    """One iterate of the witness relation.

    Attributes:
        k: Number of conjugations.
        exponent: ``j^k``.
        bound: Letter length ``2k |s| + |i|^k |a|`` of ``s^k a^(i^k) s^-k``.
        reduced: Whether the iterate was Britton-reduced rather than derived
            from its exponent chain.
    """

    k: int
    exponent: int
    bound: int
    reduced: bool = True

    @property
    def ratio(self) -> Fraction:
        """Length bound per unit of exponent."""
        return Fraction(self.bound, abs(self.exponent))


@dataclass(frozen=True)
class DistortionCertificate:
    """Verified iterates of a witness with ``|j| > |i|``.

    Attributes:
        witness: The witness, oriented so that ``|j| > |i|``.
        rows: One row per ``k``, from 1.
    """

    witness: BSWitness
    rows: tuple[DistortionRow, ...]


def _step_conjugator(graph: GraphOfGroups, step: Step) -> PathWord:
    """The element carrying the step's source root power to its target.

    Args:
        graph: The graph of groups.
        step: A groupoid step.

    Returns:
        A path word from the target vertex to the source vertex.
    """
    arc = step.arc
    if arc.kind == "flip":
        return vertex_path(VertexWord(arc.name, (("s", 1),)))
    head = arc.head_conjugator or VertexWord(arc.head.vertex)
    tail = arc.tail_conjugator or VertexWord(arc.tail.vertex)
    edge = graph.edge(arc.name)
    forward = build_path(graph, edge.source, (vinv(graph, head), StableLetter(arc.name, 1), tail))
    return forward if step.forward else inverse_path(graph, forward)


def _start_exponent(cycle: Iterable[Step]) -> int:
    """Least positive exponent that keeps every transition integral.

    Args:
        cycle: The steps.

    Returns:
        The exponent.
    """
    exponent = 1
    prefix = Fraction(1)
    for step in cycle:
        exponent = math.lcm(exponent, (prefix / step.source_exponent).denominator)
        prefix *= step.weight
    return exponent


def _transcript(graph: GraphOfGroups, a: PathWord, s: PathWord, i: int, j: int) -> str:
    left = conjugate_path(graph, s, path_power(graph, a, i))
    relation = concat(graph, left, path_power(graph, a, -j))
    return render(graph, britton_reduce(graph, relation), erase_tree=False)


def verify_witness(graph: GraphOfGroups, witness: BSWitness) -> bool:
    """Re-check a witness from scratch.

    Args:
        graph: The graph of groups.
        witness: The witness.

    Returns:
        Whether ``s a^i s^-1 a^-j`` reduces to the identity and ``|i| != |j|``.
    """
    if abs(witness.i) == abs(witness.j) or witness.a.is_empty:
        return False
    return _transcript(graph, witness.a, witness.s, witness.i, witness.j) == ""


def almost_bs_witness(graph: GraphOfGroups, unbalanced: BalanceVerdict) -> BSWitness:
    """Turn an unbalanced cycle into a verified witness.

    Args:
        graph: The graph the cycle's arcs came from.
        unbalanced: The verdict to turn into a witness.

    Returns:
        The witness, with ``gcd(i, j)`` absorbed into ``a`` and ``i > 0``.

    Raises:
        NoWitness: If the verdict is balanced.
        CertificateError: If the witness fails verification.
    """
    if not isinstance(unbalanced, Unbalanced):
        err = "a balanced graph has no almost Baumslag-Solitar witness"
        raise NoWitness(err)
    cycle = unbalanced.cycle
    start = _start_exponent(cycle)
    end = start * unbalanced.modulus
    base = cycle[0].source
    s = build_path(graph, base.vertex, (_step_conjugator(graph, step) for step in reversed(cycle)))
    common = math.gcd(start, int(end))
    i, j = start // common, int(end) // common
    a = vertex_path(vpow(graph, base.root, common))
    transcript = _transcript(graph, a, s, i, j)
    witness = BSWitness(a, s, i, j, transcript)
    if transcript or abs(i) == abs(j):
        err = f"witness s={render(graph, s)} a={render(graph, a)} does not reduce: {transcript!r}"
        logger.critical(err)
        raise CertificateError(err)
    logger.debug("Witness a=%s s=%s i=%d j=%d", render(graph, a), render(graph, s), i, j)
    return witness


def _compressing(graph: GraphOfGroups, witness: BSWitness) -> BSWitness:
    """Orient a witness so the right exponent is the larger one.

    Args:
        graph: The graph of groups.
        witness: A verified witness.

    Returns:
        The witness, or ``s^-1 a^j s = a^i`` normalized to a positive left
        exponent, with the transcript of the orientation returned.
    """
    s, i, j = witness.s, witness.i, witness.j
    if abs(j) <= abs(i):
        sign = 1 if j > 0 else -1
        s, i, j = inverse_path(graph, s), sign * j, sign * i
    return BSWitness(witness.a, s, i, j, _transcript(graph, witness.a, s, i, j))


def _written_size(graph: GraphOfGroups, a: PathWord, exponent: int) -> int:
    """Syllables of ``a^exponent`` once it is written out.

    Powers of a single-syllable core stay one syllable; other powers grow
    with the exponent.

    Args:
        graph: The graph of groups.
        a: A closed path word.
        exponent: The power.

    Returns:
        The syllable count of the power, up to the conjugator.
    """
    if len(a.syllables) == 1 and isinstance(a.syllables[0], VertexWord):
        word = a.syllables[0]
        if isinstance(graph.kind(word.vertex), Dihedral):
            return 1
        _, core = free_words.cyclic_reduce(word)
        return 1 if len(core.letters) == 1 else len(core.letters) * abs(exponent)
    return len(a.syllables) * abs(exponent)


def conjugation_chain(i: int, j: int, k: int) -> tuple[int, ...]:
    """Exponents of ``a`` while ``s`` conjugates ``a^(i^k)`` ``k`` times.

    Each conjugation turns ``a^(i m)`` into ``a^(j m)``, so the chain runs
    from ``i^k`` through ``i^(k-t) j^t`` to ``j^k``.

    Args:
        i: Left exponent of the witness.
        j: Right exponent of the witness.
        k: Number of conjugations.

    Returns:
        The ``k + 1`` exponents.
    """
    chain = [i**k]
    for _ in range(k):
        # i^(k-t) j^t is a multiple of i while t < k
        chain.append(chain[-1] // i * j)
    return tuple(chain)


def distortion_certificate(
    graph: GraphOfGroups,
    witness: BSWitness,
    depth: int,
) -> DistortionCertificate:
    """Verify ``s^k a^(i^k) s^-k = a^(j^k)`` for ``k`` up to ``depth``.

    The base relation is re-checked by Britton reduction. Iterates whose
    words stay below ``REDUCTION_SYLLABLES`` once written out are reduced as
    well; longer ones follow from the base relation through their exponent
    chain.

    Args:
        graph: The graph of groups.
        witness: A verified witness.
        depth: Largest ``k``.

    Returns:
        The certificate.

    Raises:
        CertificateError: If the base relation or some iterate fails to reduce.
    """
    oriented = _compressing(graph, witness)
    if oriented.transcript or abs(oriented.i) == abs(oriented.j):
        err = f"witness relation does not reduce: {oriented.transcript!r}"
        logger.critical(err)
        raise CertificateError(err)
    s_length = letter_length(graph, oriented.s)
    a_length = letter_length(graph, oriented.a)
    rows = []
    for k in range(1, depth + 1):
        exponent = conjugation_chain(oriented.i, oriented.j, k)[-1]
        reduced = _written_size(graph, oriented.a, exponent) <= REDUCTION_SYLLABLES
        if reduced:
            inner = path_power(graph, oriented.a, oriented.i**k)
            word = conjugate_path(graph, path_power(graph, oriented.s, k), inner)
            target = path_power(graph, oriented.a, exponent)
            if not britton_reduce(graph, concat(graph, word, inverse_path(graph, target))).is_empty:
                err = f"iterate k={k} of the witness relation does not reduce"
                logger.critical(err)
                raise CertificateError(err)
        bound = 2 * k * s_length + abs(oriented.i) ** k * a_length
        rows.append(DistortionRow(k, exponent, bound, reduced))
    logger.debug(
        "Verified %d distortion rows, %d by reduction",
        len(rows),
        sum(row.reduced for row in rows),
    )
    return DistortionCertificate(oriented, tuple(rows))
