"""Word algebra in free groups: reduction, roots, conjugacy and commensurability.

Words are exponent-compressed: ``a^1000`` is one syllable and is never expanded.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import TYPE_CHECKING

from gog_hhg.errors import TrivialWord, UnknownGenerator
from gog_hhg.model import VertexWord


if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from gog_hhg.model import Letter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootData:
    """A word written as a conjugate of a power of its primitive root.

    Attributes:
        root: Canonical cyclically reduced primitive root.
        conjugator: ``g`` with ``word = g root^exponent g^-1``.
        exponent: Nonzero exponent.
    """

    root: VertexWord
    conjugator: VertexWord
    exponent: int

    def reconstruct(self) -> VertexWord:
        """Rebuild the word the data was computed from.

        Returns:
            ``conjugator root^exponent conjugator^-1``, freely reduced.
        """
        return conjugate(self.conjugator, power(self.root, self.exponent))


@dataclass(frozen=True)
class Commensurability:
    """Two words over a common primitive root.

    ``u = u_conjugator root^p u_conjugator^-1`` and
    ``v = v_conjugator root^(sign q) v_conjugator^-1`` with ``p, q > 0``.

    Attributes:
        root: The common canonical root.
        u_conjugator: Conjugator for the first word.
        p: Positive exponent of the first word.
        v_conjugator: Conjugator for the second word.
        q: Positive exponent of the second word.
        sign: +1 or -1, applied to ``q``.
    """

    root: VertexWord
    u_conjugator: VertexWord
    p: int
    v_conjugator: VertexWord
    q: int
    sign: int


def free_reduce(vertex: str, letters: Iterable[Letter], rank: int | None = None) -> VertexWord:
    """Freely reduce a letter sequence.

    Args:
        vertex: The owning vertex.
        letters: Pairs of generator index and exponent.
        rank: When given, generators must lie in ``1..rank``.

    Returns:
        The freely reduced word.

    Raises:
        UnknownGenerator: If a generator is out of range.
    """
    stack: list[Letter] = []
    for gen, exp in letters:
        if rank is not None and (not isinstance(gen, int) or not 1 <= gen <= rank):
            err = f"free vertex {vertex!r} of rank {rank} has no generator {gen!r}"
            raise UnknownGenerator(err)
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            total = stack[-1][1] + exp
            if total:
                stack[-1] = (gen, total)
            else:
                stack.pop()
        else:
            stack.append((gen, exp))
    return VertexWord(vertex, tuple(stack))


def inverse_letters(letters: Sequence[Letter]) -> tuple[Letter, ...]:
    """Invert a letter sequence.

    Args:
        letters: The letters.

    Returns:
        The reversed sequence with negated exponents.
    """
    return tuple((gen, -exp) for gen, exp in reversed(letters))


def inverse(word: VertexWord) -> VertexWord:
    """Invert a free word.

    Args:
        word: A freely reduced word.

    Returns:
        Its inverse.
    """
    return VertexWord(word.vertex, inverse_letters(word.letters))


def multiply(*words: VertexWord) -> VertexWord:
    """Multiply free words of one vertex.

    Args:
        *words: Factors, left to right; at least one.

    Returns:
        The reduced product.
    """
    return free_reduce(words[0].vertex, (letter for word in words for letter in word.letters))


def conjugate(by: VertexWord, word: VertexWord) -> VertexWord:
    """Conjugate ``word`` by ``by``.

    Args:
        by: The conjugator.
        word: The conjugated word.

    Returns:
        ``by word by^-1``, reduced.
    """
    return multiply(by, word, inverse(by))


def power(word: VertexWord, exponent: int) -> VertexWord:
    """Raise a free word to an integer power without expanding big exponents.

    Args:
        word: A freely reduced word.
        exponent: The power.

    Returns:
        The reduced power.
    """
    if exponent == 0 or word.is_identity:
        return VertexWord(word.vertex)
    if len(word.letters) == 1:
        gen, exp = word.letters[0]
        return VertexWord(word.vertex, ((gen, exp * exponent),))
    conjugator, core = cyclic_reduce(word)
    if len(core.letters) == 1:
        gen, exp = core.letters[0]
        return conjugate(conjugator, VertexWord(word.vertex, ((gen, exp * exponent),)))
    base = core.letters if exponent > 0 else inverse_letters(core.letters)
    repeated = free_reduce(word.vertex, base * abs(exponent))
    return conjugate(conjugator, repeated)


def cyclic_reduce(word: VertexWord) -> tuple[VertexWord, VertexWord]:
    """Split a reduced word as ``conjugator core conjugator^-1``.

    Args:
        word: A freely reduced word.

    Returns:
        The conjugator and the cyclically reduced core.
    """
    letters = list(word.letters)
    prefix: list[Letter] = []
    while len(letters) >= 2:  # noqa: PLR2004
        (first_gen, first_exp), (last_gen, last_exp) = letters[0], letters[-1]
        if first_gen != last_gen or (first_exp > 0) == (last_exp > 0):
            break
        shift = first_exp if abs(first_exp) <= abs(last_exp) else -last_exp
        prefix.append((first_gen, shift))
        head = [(first_gen, first_exp - shift)] if first_exp != shift else []
        tail = [(last_gen, last_exp + shift)] if last_exp != -shift else []
        letters = head + letters[1:-1] + tail
    return (
        free_reduce(word.vertex, prefix),
        VertexWord(word.vertex, tuple(letters)),
    )


def _merge_ends(core: VertexWord) -> tuple[VertexWord, VertexWord]:
    """Rotate a cyclically reduced core so its ends use different generators.

    Args:
        core: A cyclically reduced word.

    Returns:
        ``(g, merged)`` with ``core = g merged g^-1``.
    """
    letters = core.letters
    if len(letters) >= 2 and letters[0][0] == letters[-1][0]:  # noqa: PLR2004
        gen, exp = letters[-1]
        merged = ((gen, exp + letters[0][1]), *letters[1:-1])
        return VertexWord(core.vertex, ((gen, -exp),)), VertexWord(core.vertex, merged)
    return VertexWord(core.vertex), core


def _cyclic_core(word: VertexWord) -> tuple[VertexWord, tuple[Letter, ...]]:
    conjugator, core = cyclic_reduce(word)
    extra, core = _merge_ends(core)
    return multiply(conjugator, extra), core.letters


def _letter_key(letter: Letter) -> tuple[int, int, int]:
    gen, exp = letter
    return (int(gen), 0 if exp > 0 else 1, abs(exp))


def _period(syllables: tuple[Letter, ...]) -> int:
    count = len(syllables)
    for period in range(1, count + 1):
        if count % period == 0 and syllables == syllables[:period] * (count // period):
            return period
    return count


def primitive_root(word: VertexWord) -> RootData:
    """Write a nontrivial word as a conjugate of a power of its canonical root.

    The canonical root is the least rotation, syllable by syllable, of the
    primitive cyclic core or of its inverse.

    Args:
        word: A freely reduced nontrivial word.

    Returns:
        The root data.

    Raises:
        TrivialWord: If the word is empty.
    """
    if word.is_identity:
        err = f"the identity of {word.vertex!r} has no root"
        raise TrivialWord(err)
    conjugator, syllables = _cyclic_core(word)
    if len(syllables) == 1:
        gen, exp = syllables[0]
        return RootData(VertexWord(word.vertex, ((gen, 1),)), conjugator, exp)
    period = _period(syllables)
    repeats = len(syllables) // period
    base = syllables[:period]
    candidates = [
        (sign, shift, sequence)
        for sign, sequence in ((1, base), (-1, inverse_letters(base)))
        for shift in range(len(sequence))
    ]
    sign, shift, sequence = min(
        candidates,
        key=lambda c: [_letter_key(letter) for letter in c[2][c[1] :] + c[2][: c[1]]],
    )
    # sequence = P rotation P^-1 with P its first `shift` syllables
    rotation = sequence[shift:] + sequence[:shift]
    prefix = VertexWord(word.vertex, sequence[:shift])
    return RootData(
        root=VertexWord(word.vertex, rotation),
        conjugator=multiply(conjugator, prefix),
        exponent=sign * repeats,
    )


def power_exponent(word: VertexWord, base: VertexWord) -> int | None:
    """Find ``k`` with ``word = base^k``.

    Args:
        word: A freely reduced word.
        base: A nontrivial freely reduced word of the same vertex.

    Returns:
        The exponent, or ``None`` when ``word`` is not a power of ``base``.
    """
    if word.is_identity:
        return 0
    conjugator, core = cyclic_reduce(base)
    inner = multiply(inverse(conjugator), word, conjugator)
    if len(core.letters) == 1:
        gen, exp = core.letters[0]
        if len(inner.letters) != 1 or inner.letters[0][0] != gen or inner.letters[0][1] % exp:
            return None
        return inner.letters[0][1] // exp
    if inner.length() % core.length():
        return None
    candidate = inner.length() // core.length()
    for exponent in (candidate, -candidate):
        if power(core, exponent) == inner:
            return exponent
    return None


def cyclic_conjugacy(u: VertexWord, v: VertexWord) -> VertexWord | None:
    """Find ``g`` with ``g u g^-1 = v``.

    Args:
        u: A freely reduced word.
        v: A freely reduced word of the same vertex.

    Returns:
        A conjugator, or ``None`` when the cyclic words differ.
    """
    if u.is_identity or v.is_identity:
        return VertexWord(u.vertex) if u == v else None
    u_conjugator, u_core = _cyclic_core(u)
    v_conjugator, v_core = _cyclic_core(v)
    if len(u_core) != len(v_core):
        return None
    for shift in range(len(u_core)):
        if u_core[shift:] + u_core[:shift] == v_core:
            prefix = VertexWord(u.vertex, u_core[:shift])
            return multiply(v_conjugator, inverse(prefix), inverse(u_conjugator))
    return None


def commensurability_data(u: VertexWord, v: VertexWord) -> Commensurability | None:
    """Decide whether ``<u>`` and ``<v>`` are commensurable.

    Args:
        u: A nontrivial freely reduced word.
        v: A nontrivial freely reduced word of the same vertex.

    Returns:
        Data over the common root with ``p > 0``, or ``None``.
    """
    u_root = primitive_root(u)
    v_root = primitive_root(v)
    if u_root.root != v_root.root:
        return None
    root = u_root.root
    p, q = u_root.exponent, v_root.exponent
    if p < 0:
        root = inverse(root)
        p, q = -p, -q
    return Commensurability(
        root=root,
        u_conjugator=u_root.conjugator,
        p=p,
        v_conjugator=v_root.conjugator,
        q=abs(q),
        sign=1 if q > 0 else -1,
    )
