"""Unit tests for path words, Britton reduction and conjugator search."""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from gog_hhg.errors import MalformedWord, SearchBudgetExceeded
from gog_hhg.model import Dihedral, EdgeRecord, Free, VertexWord, build_graph
from gog_hhg.textformat import parse_word
from gog_hhg.words import (
    PathWord,
    RawLetter,
    StableLetter,
    are_equal,
    bounded_conjugator_search,
    britton_reduce,
    build_path,
    concat,
    conjugate_path,
    endpoint,
    inverse_path,
    is_trivial,
    letter_length,
    path_power,
    pinch_membership,
    render,
    to_path_form,
    vertex_path,
    vinv,
    vmul,
)


if TYPE_CHECKING:
    import random

    from collections.abc import Callable, Iterable, Iterator, Mapping

    from gog_hhg.model import GraphOfGroups

Flat = tuple[tuple[str, int], ...]


def _path(graph: GraphOfGroups, text: str, base: str | None = None) -> PathWord:
    return to_path_form(graph, parse_word(text), base)


def _tree_walk(graph: GraphOfGroups, start: str, end: str) -> PathWord:
    return PathWord(start, tuple(StableLetter(n, s) for n, s in graph.tree_path(start, end)))


def _relator(graph: GraphOfGroups, name: str) -> PathWord:
    edge = graph.edge(name)
    return build_path(
        graph,
        edge.source,
        [
            StableLetter(name, 1),
            edge.attachment_target,
            StableLetter(name, -1),
            vinv(graph, edge.attachment_source),
        ],
    )


def _random_loop(graph: GraphOfGroups, rng: random.Random, base: str, length: int) -> PathWord:
    letters = []
    for _ in range(length):
        if graph.edges and rng.random() < 0.4:
            letters.append(RawLetter(rng.choice(sorted(graph.edges)), "t", rng.choice([-1, 1])))
            continue
        vertex = rng.choice(sorted(graph.vertices))
        gen = rng.choice(graph.kind(vertex).generators)
        letters.append(RawLetter(vertex, gen, rng.choice([-1, 1]) * rng.randint(1, 3)))
    return to_path_form(graph, letters, base)


def _assert_no_pinch(graph: GraphOfGroups, word: PathWord) -> None:
    syllables = word.syllables
    for index, letter in enumerate(syllables):
        if not isinstance(letter, StableLetter):
            continue
        following = syllables[index + 1 : index + 3]
        assert following[:1] != (letter.inverse(),)
        if len(following) == 2 and following[1] == letter.inverse():
            inner = following[0]
            if isinstance(inner, VertexWord):
                edge = graph.edge(letter.edge)
                oriented = edge if letter.sign > 0 else edge.reverse()
                assert pinch_membership(graph, oriented, inner) is None, render(graph, word)


def _free(letters: Iterable[tuple[str, int]]) -> Flat:
    stack: list[tuple[str, int]] = []
    for name, sign in letters:
        if stack and stack[-1] == (name, -sign):
            stack.pop()
        else:
            stack.append((name, sign))
    return tuple(stack)


def _flat_inverse(word: Flat) -> Flat:
    return tuple((name, -sign) for name, sign in reversed(word))


def _loops_graph(rng: random.Random) -> tuple[GraphOfGroups, dict[str, Flat]]:
    """One cyclic vertex ``v`` with up to three loops and their relators as unit letters.

    Args:
        rng: Seeded random generator.

    Returns:
        The graph and the relator ``t v^n t^-1 v^-m`` of each loop.
    """
    edges = []
    relators = {}
    for index in range(rng.randint(1, 3)):
        name = f"e{index}"
        m, n = (rng.choice([-1, 1]) * rng.randint(1, 3) for _ in range(2))
        edges.append(
            EdgeRecord(name, "v", "v", VertexWord("v", ((1, m),)), VertexWord("v", ((1, n),))),
        )
        relators[name] = (
            (name, 1),
            *[("v", n // abs(n))] * abs(n),
            (name, -1),
            *[("v", -m // abs(m))] * abs(m),
        )
    return build_graph({"v": Free(1)}, edges), relators


def _rewrite_rules(relators: Mapping[str, Flat]) -> dict[Flat, list[Flat]]:
    """Replace any piece ``u`` of a cyclic relator ``u w`` by ``w^-1``, in both directions.

    Args:
        relators: Relators as unit letters.

    Returns:
        Left sides mapped to their possible right sides.
    """
    rules: defaultdict[Flat, set[Flat]] = defaultdict(set)
    for relator in relators.values():
        for cyclic in (relator, _flat_inverse(relator)):
            for turn in range(len(cyclic)):
                rotation = cyclic[turn:] + cyclic[:turn]
                for cut in range(1, len(rotation) + 1):
                    rules[rotation[:cut]].add(_flat_inverse(rotation[cut:]))
    return {left: sorted(rights) for left, rights in rules.items()}


def _rewrites(current: Flat, rules: Mapping[Flat, list[Flat]], longest: int) -> Iterator[Flat]:
    for start in range(len(current)):
        for cut in range(start + 1, min(start + longest, len(current)) + 1):
            for right in rules.get(current[start:cut], ()):
                yield _free(current[:start] + right + current[cut:])


def _rewrites_to_identity(
    word: Flat,
    rules: Mapping[Flat, list[Flat]],
    *,
    depth: int = 10,
    cap: int = 200,
) -> bool:
    """Breadth-first search for a chain of relator rewrites down to the empty word.

    Args:
        word: A freely reduced word.
        rules: The rewrite rules.
        depth: Largest number of rewrites.
        cap: Largest number of distinct words kept.

    Returns:
        Whether the empty word was reached. ``False`` proves nothing.
    """
    if not word:
        return True
    longest = max(map(len, rules))
    limit = len(word) + 4
    seen = {word}
    frontier = [word]
    for _ in range(depth):
        following = []
        for current in frontier:
            for candidate in _rewrites(current, rules, longest):
                if not candidate:
                    return True
                if len(candidate) <= limit and candidate not in seen and len(seen) < cap:
                    seen.add(candidate)
                    following.append(candidate)
        frontier = following
    return False


def _affine_image(graph: GraphOfGroups, word: Flat) -> tuple[Fraction, Fraction]:
    """Image under ``v -> x + 1`` and ``t -> (m / n) x``, a homomorphism to the affine group.

    Args:
        graph: A loops graph.
        word: The word as unit letters.

    Returns:
        Scale and shift of the affine map.
    """
    scale, shift = Fraction(1), Fraction(0)
    for name, sign in word:
        if name == "v":
            shift += scale * sign
            continue
        edge = graph.edge(name)
        ratio = Fraction(edge.attachment_source.letters[0][1], edge.attachment_target.letters[0][1])
        scale *= ratio**sign
    return scale, shift


def _random_flat(rng: random.Random, edges: list[str], syllables: int) -> Flat:
    letters: list[tuple[str, int]] = []
    for _ in range(syllables):
        name, sign = rng.choice(["v", *edges]), rng.choice([-1, 1])
        letters.extend([(name, sign)] * rng.randint(1, 4))
    return tuple(letters)


def test_to_path_form_inserts_tree_letters(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Moving between vertices walks the tree, and rendering hides the walk.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("trefoil")
    word = _path(graph, "u.1 v.1")
    assert word.base == "u"
    assert endpoint(graph, word) == "u"
    assert render(graph, word) == "u.1 v.1"
    assert render(graph, word, erase_tree=False) == "u.1 e.t v.1 e.t^-1"
    assert letter_length(graph, word) == 2


def test_empty_word_needs_a_base(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """An empty raw word has no vertex to start from.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("trefoil")
    with pytest.raises(MalformedWord):
        to_path_form(graph, [])
    assert to_path_form(graph, [], "v").is_empty


@pytest.mark.parametrize(
    ("stem", "text", "reduced"),
    (
        ("bs32", "e.t v.1^2 e.t^-1", "v.1^3"),
        ("bs32", "e.t^-1 v.1^3 e.t", "v.1^2"),
        ("bs32", "e.t^2 v.1^4 e.t^-2", "v.1^9"),
        ("bs32", "e.t v.1 e.t^-1", "e.t v.1 e.t^-1"),
        ("dihedral_mixed", "b.t d.r^-4 b.t^-1", "d.r^4"),
        ("dihedral_mixed", "b.t d.s b.t^-1", "b.t d.s b.t^-1"),
        ("dihedral_mixed", "z.1^6 d.r^-4", ""),
        ("f2_loop", "e.t v.1^6 e.t^-1", "v.2 v.1^4 v.2^-1"),
        ("trefoil", "u.1^4 v.1^-6", ""),
    ),
)
def test_britton_reduce(
    load_graph: Callable[[str], GraphOfGroups],
    stem: str,
    text: str,
    reduced: str,
) -> None:
    """Resolve pinches and leave reduced words alone.

    Args:
        load_graph: Fixture loader.
        stem: Graph fixture.
        text: The word.
        reduced: Expected rendering after reduction.
    """
    graph = load_graph(stem)
    assert render(graph, britton_reduce(graph, _path(graph, text))) == reduced


def test_pinch_membership(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Membership in an edge image, in either orientation.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("bs32")
    edge = graph.edge("e")
    assert pinch_membership(graph, edge, VertexWord("v", ((1, -6),))) == -3
    assert pinch_membership(graph, edge, VertexWord("v", ((1, 3),))) is None
    assert pinch_membership(graph, edge.reverse(), VertexWord("v", ((1, 3),))) == 1
    trefoil = load_graph("trefoil")
    with pytest.raises(MalformedWord):
        pinch_membership(trefoil, trefoil.edge("e"), VertexWord("u", ((1, 2),)))


@pytest.mark.parametrize(
    "stem",
    ("bs32", "f2_loop", "trefoil", "klein", "dihedral_mixed", "two_classes", "free_amalgam"),
)
def test_relators_are_trivial(load_graph: Callable[[str], GraphOfGroups], stem: str) -> None:
    """Every defining relation reduces to the empty word.

    Args:
        load_graph: Fixture loader.
        stem: Graph fixture.
    """
    graph = load_graph(stem)
    for name in graph.edges:
        relator = _relator(graph, name)
        assert is_trivial(graph, relator)
        assert is_trivial(graph, path_power(graph, relator, -3))


@pytest.mark.parametrize("stem", ("bs32", "f2_loop", "trefoil", "dihedral_mixed", "two_classes"))
def test_products_of_conjugated_relators(
    load_graph: Callable[[str], GraphOfGroups],
    rng: random.Random,
    stem: str,
) -> None:
    """Products of conjugated relators are trivial, and stay nontrivial after a generator.

    Args:
        load_graph: Fixture loader.
        rng: Seeded random generator.
        stem: Graph fixture.
    """
    graph = load_graph(stem)
    base = min(graph.vertices)
    generator = VertexWord(base, ((graph.kind(base).generators[0], 1),))
    for _ in range(25):
        factors = []
        for _ in range(rng.randint(1, 3)):
            name = rng.choice(sorted(graph.edges))
            source = graph.edge(name).source
            conjugator = concat(
                graph,
                _random_loop(graph, rng, base, rng.randint(0, 5)),
                _tree_walk(graph, base, source),
            )
            relator = _relator(graph, name)
            if rng.random() < 0.5:
                relator = inverse_path(graph, relator)
            factors.append(conjugate_path(graph, conjugator, relator))
        word = concat(graph, *factors)
        assert is_trivial(graph, word)
        shifted = britton_reduce(graph, concat(graph, word, vertex_path(generator)))
        assert not shifted.is_empty
        _assert_no_pinch(graph, shifted)


def test_path_power(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Powers of vertex syllables stay compressed, other powers repeat.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("bs32")
    big = path_power(graph, vertex_path(VertexWord("v", ((1, 2),))), 10**20)
    assert big.syllables == (VertexWord("v", ((1, 2 * 10**20),)),)
    word = _path(graph, "e.t v.1")
    assert are_equal(graph, path_power(graph, word, 3), concat(graph, word, word, word))
    assert are_equal(
        graph,
        path_power(graph, word, -2),
        concat(graph, inverse_path(graph, word), inverse_path(graph, word)),
    )
    assert path_power(graph, word, 0).is_empty


def test_malformed_paths(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Reject syllables off the path and products across vertices.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("trefoil")
    with pytest.raises(MalformedWord):
        endpoint(graph, PathWord("u", (VertexWord("v", ((1, 1),)),)))
    with pytest.raises(MalformedWord):
        endpoint(graph, PathWord("v", (StableLetter("e", 1),)))
    with pytest.raises(MalformedWord):
        vmul(graph, VertexWord("u", ((1, 1),)), VertexWord("v", ((1, 1),)))
    with pytest.raises(MalformedWord):
        are_equal(graph, _path(graph, "u.1"), _path(graph, "v.1"))


def test_conjugator_search_stable_move(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """One stable letter carries ``v^2`` to ``v^3``.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("bs32")
    x, y = VertexWord("v", ((1, 2),)), VertexWord("v", ((1, 3),))
    found = bounded_conjugator_search(graph, x, y, 2, 1)
    assert found is not None
    assert render(graph, found, erase_tree=False) == "e.t"
    assert bounded_conjugator_search(graph, x, y, 2, 1, avoid={"e"}) is None
    assert bounded_conjugator_search(graph, VertexWord("v", ((1, 1),)), x, 3, 2) is None


def test_conjugator_search_mixed_moves(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """A stable letter followed by a generator conjugation.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("f2_loop")
    x, y = VertexWord("v", ((1, 3),)), VertexWord("v", ((1, 2),))
    found = bounded_conjugator_search(graph, x, y, 2, 1)
    assert found is not None
    assert are_equal(graph, conjugate_path(graph, found, vertex_path(x)), vertex_path(y))


def test_conjugator_search_budget(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Exceeding the node cap raises instead of searching on.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("f2_loop")
    with pytest.raises(SearchBudgetExceeded):
        bounded_conjugator_search(
            graph,
            VertexWord("v", ((1, 1),)),
            VertexWord("v", ((2, 1),)),
            6,
            2,
            node_cap=5,
        )


def test_dihedral_vertex_products(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Dihedral syllables are kept in normal form.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("dihedral_mixed")
    assert isinstance(graph.kind("d"), Dihedral)
    product = vmul(graph, VertexWord("d", (("r", 3),)), VertexWord("d", (("s", 1),)))
    assert product == VertexWord("d", (("s", 1), ("r", -3)))
    assert vinv(graph, product) == product


@pytest.mark.parametrize("stem", ("bs32", "f2_loop", "trefoil", "dihedral_mixed", "two_classes"))
def test_reduced_words_have_no_pinch(
    load_graph: Callable[[str], GraphOfGroups],
    rng: random.Random,
    stem: str,
) -> None:
    """Britton reduction leaves no ``t g t^-1`` with ``g`` in the edge image.

    Args:
        load_graph: Fixture loader.
        rng: Seeded random generator.
        stem: Graph fixture.
    """
    graph = load_graph(stem)
    base = min(graph.vertices)
    for _ in range(100):
        word = _random_loop(graph, rng, base, rng.randint(0, 12))
        reduced = britton_reduce(graph, word)
        _assert_no_pinch(graph, reduced)
        assert are_equal(graph, word, reduced)


@pytest.mark.slow
def test_is_trivial_agrees_with_rewriting(rng: random.Random) -> None:
    """Relator rewriting and an affine image bound the word problem from both sides.

    A word that rewrites to the identity must be trivial, and a word with a
    nonidentity affine image must not be.

    Args:
        rng: Seeded random generator.
    """
    verdicts = []
    for _ in range(50):
        graph, relators = _loops_graph(rng)
        rules = _rewrite_rules(relators)
        names = sorted(relators)
        for _ in range(10):
            word = _random_flat(rng, names, rng.randint(0, 8))
            planted = rng.random() < 0.3
            if planted:
                prefix = _random_flat(rng, names, rng.randint(0, 2))
                word = prefix + relators[rng.choice(names)] + _flat_inverse(prefix)
            word = _free(word)
            letters = [
                RawLetter("v", 1, sign) if name == "v" else RawLetter(name, "t", sign)
                for name, sign in word
            ]
            path = to_path_form(graph, letters, "v")
            trivial = is_trivial(graph, path)
            if planted or _rewrites_to_identity(word, rules):
                assert trivial, word
            if _affine_image(graph, word) != (1, 0):
                assert not trivial, word
            _assert_no_pinch(graph, britton_reduce(graph, path))
            verdicts.append(trivial)
    assert len(verdicts) == 500
    assert 0 < sum(verdicts) < len(verdicts)
