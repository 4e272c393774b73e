"""Path words, Britton pinch reduction and bounded conjugator search.

Elements of the fundamental group are path words: vertex syllables alternating
with stable letters along a path of the underlying graph. Stable letters of
tree edges are kept in the words and only erased for display.
"""

from __future__ import annotations

import logging

from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING

from gog_hhg import dihedral, free_words
from gog_hhg.errors import MalformedWord, SearchBudgetExceeded
from gog_hhg.model import Dihedral, VertexWord, render_letter


if TYPE_CHECKING:
    from collections.abc import Collection, Iterable, Iterator

    from gog_hhg.model import EdgeRecord, Generator, GraphOfGroups, Letter, VertexGroupKind

logger = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 20000
STABLE = "t"


@dataclass(frozen=True, order=True)
class StableLetter:
    """One stable letter ``t_e`` or its inverse.

    Attributes:
        edge: The edge id.
        sign: +1 or -1.
    """

    edge: str
    sign: int

    def inverse(self) -> StableLetter:
        """Return the inverse letter.

        Returns:
            The letter with the opposite sign.
        """
        return StableLetter(self.edge, -self.sign)


Syllable = VertexWord | StableLetter


@dataclass(frozen=True)
class PathWord:
    """A path word starting at ``base``.

    Attributes:
        base: The vertex the path starts at.
        syllables: Vertex syllables and stable letters, adjacent vertex
            syllables merged.
    """

    base: str
    syllables: tuple[Syllable, ...] = ()

    @property
    def is_empty(self) -> bool:
        """Whether the word has no syllables."""
        return not self.syllables


@dataclass(frozen=True)
class RawLetter:
    """A letter as written in the text format, before path-form conversion.

    Attributes:
        owner: Vertex id, or edge id for stable letters.
        generator: Generator index, ``r``/``s``, or ``t`` for stable letters.
        exponent: The exponent.
    """

    owner: str
    generator: Generator
    exponent: int


def normalize(kind: VertexGroupKind, vertex: str, letters: Iterable[Letter]) -> VertexWord:
    """Reduce raw letters of one vertex group.

    Args:
        kind: The vertex group.
        vertex: The vertex id.
        letters: Raw letters.

    Returns:
        The freely reduced or dihedral normal-form word.
    """
    if isinstance(kind, Dihedral):
        return dihedral.normal_form(vertex, letters)
    return free_words.free_reduce(vertex, letters, rank=kind.rank)


def vmul(graph: GraphOfGroups, *words: VertexWord) -> VertexWord:
    """Multiply words of one vertex group.

    Args:
        graph: The graph of groups.
        *words: Factors, left to right; at least one.

    Returns:
        The reduced product.

    Raises:
        MalformedWord: If the factors live in different vertices.
    """
    vertex = words[0].vertex
    if any(word.vertex != vertex for word in words):
        err = f"cannot multiply words of {sorted({word.vertex for word in words})}"
        raise MalformedWord(err)
    letters = [letter for word in words for letter in word.letters]
    return normalize(graph.kind(vertex), vertex, letters)


def vinv(graph: GraphOfGroups, word: VertexWord) -> VertexWord:
    """Invert a vertex word.

    Args:
        graph: The graph of groups.
        word: The word.

    Returns:
        Its inverse in normal form.
    """
    return normalize(graph.kind(word.vertex), word.vertex, free_words.inverse_letters(word.letters))


def vpow(graph: GraphOfGroups, word: VertexWord, exponent: int) -> VertexWord:
    """Raise a vertex word to a power without expanding exponents.

    Args:
        graph: The graph of groups.
        word: The word.
        exponent: The power.

    Returns:
        The power in normal form.
    """
    if isinstance(graph.kind(word.vertex), Dihedral):
        return dihedral.to_word(word.vertex, dihedral.dpow(dihedral.to_element(word), exponent))
    return free_words.power(word, exponent)


def _push(graph: GraphOfGroups, syllables: list[Syllable], item: Syllable) -> None:
    """Append a syllable, merging vertex syllables and cancelling ``t t^-1``.

    Args:
        graph: The graph of groups.
        syllables: The syllables so far, modified in place.
        item: The syllable to append.
    """
    top = syllables[-1] if syllables else None
    if isinstance(item, VertexWord):
        if item.is_identity:
            return
        if isinstance(top, VertexWord):
            syllables.pop()
            merged = vmul(graph, top, item)
            if not merged.is_identity:
                syllables.append(merged)
            return
    elif top == item.inverse():
        syllables.pop()
        return
    syllables.append(item)


def vertex_path(word: VertexWord) -> PathWord:
    """Wrap a vertex word as a path word at its own vertex.

    Args:
        word: The vertex word.

    Returns:
        The path word.
    """
    return PathWord(word.vertex, () if word.is_identity else (word,))


def build_path(graph: GraphOfGroups, base: str, items: Iterable[Syllable | PathWord]) -> PathWord:
    """Concatenate syllables and path words into one path word.

    Args:
        graph: The graph of groups.
        base: The starting vertex.
        items: Syllables and path words, left to right.

    Returns:
        The merged path word.
    """
    syllables: list[Syllable] = []
    for item in items:
        for syllable in item.syllables if isinstance(item, PathWord) else (item,):
            _push(graph, syllables, syllable)
    return PathWord(base, tuple(syllables))


def concat(graph: GraphOfGroups, *words: PathWord) -> PathWord:
    """Concatenate path words.

    Args:
        graph: The graph of groups.
        *words: The factors, left to right; at least one.

    Returns:
        The product based at the first factor's base.
    """
    return build_path(graph, words[0].base, words)


def inverse_path(graph: GraphOfGroups, word: PathWord) -> PathWord:
    """Invert a path word.

    Args:
        graph: The graph of groups.
        word: The word.

    Returns:
        The inverse, based at the end of ``word``.
    """
    syllables = [
        vinv(graph, syllable) if isinstance(syllable, VertexWord) else syllable.inverse()
        for syllable in reversed(word.syllables)
    ]
    return PathWord(endpoint(graph, word), tuple(syllables))


def path_power(graph: GraphOfGroups, word: PathWord, exponent: int) -> PathWord:
    """Raise a closed path word to a power.

    Args:
        graph: The graph of groups.
        word: A closed path word.
        exponent: The power.

    Returns:
        The power.
    """
    if len(word.syllables) == 1 and isinstance(word.syllables[0], VertexWord):
        return vertex_path(vpow(graph, word.syllables[0], exponent))
    factor = word if exponent >= 0 else inverse_path(graph, word)
    return build_path(graph, word.base, [factor] * abs(exponent))


def endpoint(graph: GraphOfGroups, word: PathWord) -> str:
    """Follow a path word and return where it ends.

    Args:
        graph: The graph of groups.
        word: The word.

    Returns:
        The final vertex.

    Raises:
        MalformedWord: If consecutive syllables do not form a path.
    """
    current = word.base
    for syllable in word.syllables:
        if isinstance(syllable, VertexWord):
            if syllable.vertex != current:
                err = f"syllable {syllable} is not at vertex {current!r}"
                raise MalformedWord(err)
            continue
        edge = graph.edge(syllable.edge)
        start, end = (edge.source, edge.target) if syllable.sign > 0 else (edge.target, edge.source)
        if start != current:
            err = f"stable letter {render_stable(syllable)} does not start at {current!r}"
            raise MalformedWord(err)
        current = end
    return current


def render_stable(letter: StableLetter) -> str:
    """Render a stable letter in the text format.

    Args:
        letter: The letter.

    Returns:
        ``e.t`` or ``e.t^-1``.
    """
    return render_letter(letter.edge, STABLE, letter.sign)


def render(graph: GraphOfGroups, word: PathWord, *, erase_tree: bool = True) -> str:
    """Render a path word in the text format.

    Args:
        graph: The graph of groups.
        word: The word.
        erase_tree: Drop stable letters of tree edges, which are trivial.

    Returns:
        Whitespace-separated letters; empty for the identity.
    """
    parts = []
    for syllable in word.syllables:
        if isinstance(syllable, VertexWord):
            parts.append(str(syllable))
        elif not (erase_tree and syllable.edge in graph.tree):
            parts.append(render_stable(syllable))
    return " ".join(parts)


def letter_length(graph: GraphOfGroups, word: PathWord) -> int:
    """Letter length over vertex generators and non-tree stable letters.

    Args:
        graph: The graph of groups.
        word: The word.

    Returns:
        The length.
    """
    total = 0
    for syllable in word.syllables:
        if isinstance(syllable, VertexWord):
            total += syllable.length()
        elif syllable.edge not in graph.tree:
            total += 1
    return total


def _raw_start(graph: GraphOfGroups, letter: RawLetter) -> str:
    if letter.generator != STABLE:
        return letter.owner
    edge = graph.edge(letter.owner)
    return edge.source if letter.exponent > 0 else edge.target


def to_path_form(
    graph: GraphOfGroups,
    raw: Iterable[RawLetter],
    base: str | None = None,
) -> PathWord:
    """Turn a raw word into a closed path word by inserting tree stable letters.

    Args:
        graph: The graph of groups.
        raw: The letters.
        base: The base vertex; defaults to where the first letter lives.

    Returns:
        A closed path word at ``base`` equal to the raw word.

    Raises:
        MalformedWord: If the word is empty and no base is given.
    """
    letters = list(raw)
    if base is None:
        if not letters:
            err = "an empty word needs a base vertex"
            raise MalformedWord(err)
        base = _raw_start(graph, letters[0])
    graph.kind(base)
    syllables: list[Syllable] = []
    current = base

    def walk_to(vertex: str) -> None:
        for name, sign in graph.tree_path(current, vertex):
            _push(graph, syllables, StableLetter(name, sign))

    for letter in letters:
        if letter.generator == STABLE:
            edge = graph.edge(letter.owner)
            sign = 1 if letter.exponent > 0 else -1
            start, end = (edge.source, edge.target) if sign > 0 else (edge.target, edge.source)
            for _ in range(abs(letter.exponent)):
                walk_to(start)
                _push(graph, syllables, StableLetter(edge.name, sign))
                current = end
        else:
            kind = graph.kind(letter.owner)
            walk_to(letter.owner)
            current = letter.owner
            word = normalize(kind, letter.owner, [(letter.generator, letter.exponent)])
            _push(graph, syllables, word)
    walk_to(base)
    return PathWord(base, tuple(syllables))


def pinch_membership(graph: GraphOfGroups, edge: EdgeRecord, element: VertexWord) -> int | None:
    """Find ``k`` with ``element = attachment_target^k``.

    Args:
        graph: The graph of groups.
        edge: An edge record, possibly reversed.
        element: A word in the target vertex of ``edge``.

    Returns:
        The exponent, or ``None`` when ``element`` is outside the edge image.

    Raises:
        MalformedWord: If ``element`` does not live at the target vertex.
    """
    if element.vertex != edge.target:
        err = f"{element} does not live at {edge.target!r}"
        raise MalformedWord(err)
    if element.is_identity:
        return 0
    attachment = edge.attachment_target
    if isinstance(graph.kind(edge.target), Dihedral):
        value = dihedral.to_element(element)
        step = dihedral.to_element(attachment).k
        if value.eps or value.k % step:
            return None
        return value.k // step
    return free_words.power_exponent(element, attachment)


def _pinch(graph: GraphOfGroups, stack: list[Syllable], closing: StableLetter) -> VertexWord | None:
    """Resolve a pinch ending at ``closing``, popping it off the stack.

    Args:
        graph: The graph of groups.
        stack: The reduced prefix.
        closing: The incoming stable letter.

    Returns:
        The replacement vertex syllable, or ``None`` when there is no pinch.
    """
    depth = 1 if stack and isinstance(stack[-1], VertexWord) else 0
    if len(stack) <= depth:
        return None
    opening = stack[-1 - depth]
    if opening != closing.inverse():
        return None
    edge = graph.edge(closing.edge)
    oriented = edge if opening.sign > 0 else edge.reverse()
    inner = stack[-1] if depth else VertexWord(oriented.target)
    if not isinstance(inner, VertexWord):
        return None
    exponent = pinch_membership(graph, oriented, inner)
    if exponent is None:
        return None
    del stack[len(stack) - 1 - depth :]
    return vpow(graph, oriented.attachment_source, exponent)


def britton_reduce(graph: GraphOfGroups, word: PathWord) -> PathWord:
    """Remove every pinch ``t g t^-1`` with ``g`` in the edge image.

    The word is scanned left to right with a stack, so the innermost pinch
    closing leftmost is always resolved first.

    Args:
        graph: The graph of groups.
        word: A path word.

    Returns:
        An equal reduced word with no pinch.
    """
    endpoint(graph, word)
    stack: list[Syllable] = []
    pinches = 0
    for syllable in word.syllables:
        if isinstance(syllable, VertexWord):
            _push(graph, stack, syllable)
            continue
        replacement = _pinch(graph, stack, syllable)
        if replacement is None:
            stack.append(syllable)
            continue
        pinches += 1
        _push(graph, stack, replacement)
    logger.debug("Britton reduction made %d pinches, %d syllables left", pinches, len(stack))
    return PathWord(word.base, tuple(stack))


def is_trivial(graph: GraphOfGroups, word: PathWord) -> bool:
    """Decide whether a closed path word is the identity.

    Args:
        graph: The graph of groups.
        word: A closed path word.

    Returns:
        Whether it reduces to the empty word.
    """
    return britton_reduce(graph, word).is_empty


def are_equal(graph: GraphOfGroups, left: PathWord, right: PathWord) -> bool:
    """Decide whether two path words with the same ends are equal.

    Args:
        graph: The graph of groups.
        left: A path word.
        right: A path word.

    Returns:
        Whether ``left right^-1`` is trivial.

    Raises:
        MalformedWord: If the words do not share both ends.
    """
    if left.base != right.base or endpoint(graph, left) != endpoint(graph, right):
        err = "words with different ends cannot be compared"
        raise MalformedWord(err)
    return is_trivial(graph, concat(graph, left, inverse_path(graph, right)))


def conjugate_path(graph: GraphOfGroups, by: PathWord, word: PathWord) -> PathWord:
    """Conjugate ``word`` by ``by``.

    Args:
        graph: The graph of groups.
        by: A path from somewhere to the base of ``word``.
        word: A closed path word.

    Returns:
        ``by word by^-1``.
    """
    return concat(graph, by, word, inverse_path(graph, by))


def _vertex_moves(
    graph: GraphOfGroups,
    element: VertexWord,
    max_exponent: int,
) -> Iterator[tuple[Syllable, VertexWord]]:
    kind = graph.kind(element.vertex)
    for gen in kind.generators:
        for exp in range(-max_exponent, max_exponent + 1):
            letter = normalize(kind, element.vertex, [(gen, exp)])
            if letter.is_identity:
                continue
            image = vmul(graph, letter, element, vinv(graph, letter))
            if image != element:
                yield letter, image


def _stable_moves(
    graph: GraphOfGroups,
    element: VertexWord,
    avoid: Collection[str],
) -> Iterator[tuple[Syllable, VertexWord]]:
    for name, edge in sorted(graph.edges.items()):
        if name in avoid:
            continue
        for oriented in (edge, edge.reverse()):
            if oriented.target != element.vertex:
                continue
            exponent = pinch_membership(graph, oriented, element)
            if exponent is None:
                continue
            image = vpow(graph, oriented.attachment_source, exponent)
            yield StableLetter(name, oriented.sign), image


def _repeats(move: Syllable, last: Syllable | None) -> bool:
    if isinstance(move, StableLetter):
        return last == move.inverse()
    return (
        isinstance(last, VertexWord)
        and last.vertex == move.vertex
        and last.letters[0][0] == move.letters[0][0]
    )


def elliptic_orbit(  # noqa: PLR0913
    graph: GraphOfGroups,
    element: VertexWord,
    max_moves: int,
    max_exponent: int,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
    avoid: Collection[str] = frozenset(),
) -> Iterator[tuple[VertexWord, tuple[Syllable, ...]]]:
    """Enumerate conjugates of an elliptic element breadth first.

    A move conjugates by a generator power (exponent at most ``max_exponent``)
    or by a stable letter whose edge image contains the current element. Two
    consecutive moves never use the same generator or undo each other.

    Args:
        graph: The graph of groups.
        element: A nontrivial vertex word.
        max_moves: Longest move sequence explored.
        max_exponent: Largest generator exponent in a move.
        node_cap: Most states that may be expanded.
        avoid: Edge ids whose stable letters are not used.

    Yields:
        Each newly reached conjugate with its moves, first move first.

    Raises:
        SearchBudgetExceeded: If more than ``node_cap`` states are expanded.
    """
    queue: deque[tuple[VertexWord, tuple[Syllable, ...]]] = deque([(element, ())])
    seen = {element}
    expanded = 0
    while queue:
        current, moves = queue.popleft()
        yield current, moves
        if len(moves) >= max_moves:
            continue
        expanded += 1
        if expanded > node_cap:
            err = f"conjugator search expanded more than {node_cap} states"
            logger.debug(err)
            raise SearchBudgetExceeded(err)
        last = moves[-1] if moves else None
        for move, image in (
            *_vertex_moves(graph, current, max_exponent),
            *_stable_moves(graph, current, avoid),
        ):
            if image in seen or _repeats(move, last):
                continue
            seen.add(image)
            queue.append((image, (*moves, move)))


def conjugator_from_moves(graph: GraphOfGroups, base: str, moves: Iterable[Syllable]) -> PathWord:
    """Compose orbit moves into one conjugator.

    Args:
        graph: The graph of groups.
        base: Vertex of the final conjugate.
        moves: Moves, first move first.

    Returns:
        ``h`` with ``h element h^-1`` equal to the final conjugate.
    """
    return build_path(graph, base, reversed(list(moves)))


def bounded_conjugator_search(  # noqa: PLR0913
    graph: GraphOfGroups,
    x: VertexWord,
    y: VertexWord,
    max_syllables: int,
    max_exponent: int,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
    avoid: Collection[str] = frozenset(),
) -> PathWord | None:
    """Search for ``h`` with ``h x h^-1 = y`` among short conjugators.

    Args:
        graph: The graph of groups.
        x: An elliptic element.
        y: An elliptic element.
        max_syllables: Most moves in the conjugator.
        max_exponent: Largest generator exponent in a move.
        node_cap: Most states that may be expanded.
        avoid: Edge ids whose stable letters are not used.

    Returns:
        A verified conjugator, or ``None`` when none is found within bounds.
    """
    for image, moves in elliptic_orbit(
        graph, x, max_syllables, max_exponent, node_cap=node_cap, avoid=avoid
    ):
        if image != y:
            continue
        conjugator = conjugator_from_moves(graph, y.vertex, moves)
        if are_equal(graph, conjugate_path(graph, conjugator, vertex_path(x)), vertex_path(y)):
            return conjugator
        logger.warning(
            "Discarding conjugator %s that fails verification",
            render(graph, conjugator),
        )
    return None
