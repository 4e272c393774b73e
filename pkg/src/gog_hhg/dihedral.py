"""Exact arithmetic in the infinite dihedral group.

Elements are written ``s^eps r^k`` with ``r`` of infinite order and ``s`` the
reflection, subject to ``s r s = r^-1`` and ``s^2 = 1``.
"""

from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from typing import TYPE_CHECKING

from gog_hhg.errors import UnknownGenerator
from gog_hhg.model import VertexWord


if TYPE_CHECKING:
    from collections.abc import Iterable

    from gog_hhg.model import Letter

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class DihedralElement:
    """The element ``s^eps r^k``.

    Attributes:
        eps: 0 for rotations, 1 for reflections.
        k: The rotation exponent.
    """

    eps: int = 0
    k: int = 0

    def __post_init__(self) -> None:
        """Reject anything but a bit for ``eps``.

        Raises:
            ValueError: If ``eps`` is not 0 or 1.
        """
        if self.eps not in {0, 1}:
            err = f"eps must be 0 or 1, got {self.eps}"
            raise ValueError(err)

    def __mul__(self, other: DihedralElement) -> DihedralElement:
        """Multiply two elements.

        Args:
            other: The right factor.

        Returns:
            The product.
        """
        return dmul(self, other)

    def __pow__(self, exponent: int) -> DihedralElement:
        """Raise to an integer power.

        Args:
            exponent: The power, possibly negative.

        Returns:
            The power.
        """
        return dpow(self, exponent)

    def inverse(self) -> DihedralElement:
        """Return the inverse element.

        Returns:
            The inverse.
        """
        if self.eps:
            return self
        return DihedralElement(0, -self.k)

    @property
    def is_infinite_order(self) -> bool:
        """Whether the element is a nontrivial rotation."""
        return self.eps == 0 and self.k != 0

    def as_pair(self) -> list[int]:
        """JSON-ready ``[eps, k]``.

        Returns:
            The pair as a list.
        """
        return [self.eps, self.k]

    def __str__(self) -> str:
        """Render as ``(eps,k)``.

        Returns:
            The rendered pair.
        """
        return f"({self.eps},{self.k})"


IDENTITY = DihedralElement()
ROTATION = DihedralElement(0, 1)
REFLECTION = DihedralElement(1, 0)


def dmul(left: DihedralElement, right: DihedralElement) -> DihedralElement:
    """Multiply ``s^e1 r^k1`` by ``s^e2 r^k2``.

    Args:
        left: The left factor.
        right: The right factor.

    Returns:
        ``s^(e1 xor e2) r^((-1)^e2 k1 + k2)``.
    """
    sign = -1 if right.eps else 1
    return DihedralElement(left.eps ^ right.eps, sign * left.k + right.k)


def dpow(element: DihedralElement, exponent: int) -> DihedralElement:
    """Raise an element to an integer power.

    Args:
        element: The base.
        exponent: The power, possibly negative.

    Returns:
        The power; reflections are involutions.
    """
    if element.eps:
        return element if exponent % 2 else IDENTITY
    return DihedralElement(0, exponent * element.k)


@dataclass(frozen=True)
class Cyclic:
    """The subgroup generated by ``r^k``.

    Attributes:
        k: Nonzero rotation exponent.
    """

    k: int


@dataclass(frozen=True)
class DihedralType:
    """The subgroup generated by ``r^k`` and ``s r^l``.

    Attributes:
        k: Nonzero rotation exponent.
        l: Offset of the reflection, taken modulo ``k``.
    """

    k: int
    l: int  # noqa: E741


DihedralSubgroup = Cyclic | DihedralType


def subgroup_index(subgroup: DihedralSubgroup) -> int:
    """Index of a finite-index subgroup.

    Args:
        subgroup: The subgroup.

    Returns:
        ``2|k|`` for cyclic subgroups, ``|k|`` for dihedral ones.

    Raises:
        ValueError: If ``k`` is zero, which gives infinite index.
    """
    if subgroup.k == 0:
        err = f"{subgroup} has infinite index"
        raise ValueError(err)
    if isinstance(subgroup, Cyclic):
        return 2 * abs(subgroup.k)
    return abs(subgroup.k)


def generated_subgroup(elements: Iterable[DihedralElement]) -> DihedralSubgroup | None:
    """The subgroup generated by some elements, if it has finite index.

    Two reflections ``s r^a`` and ``s r^b`` multiply to ``r^(b-a)``, so the
    rotation part is generated by the rotations and the reflection offsets'
    differences.

    Args:
        elements: Generators of the subgroup.

    Returns:
        The subgroup, or ``None`` when it is finite and so has infinite index.
    """
    rotation = 0
    offsets = []
    for element in elements:
        if element.eps:
            offsets.append(element.k)
        else:
            rotation = math.gcd(rotation, element.k)
    for offset in offsets[1:]:
        rotation = math.gcd(rotation, offset - offsets[0])
    if rotation == 0:
        return None
    if offsets:
        return DihedralType(rotation, offsets[0] % rotation)
    return Cyclic(rotation)


def to_element(word: VertexWord) -> DihedralElement:
    """Evaluate a dihedral vertex word.

    Args:
        word: Letters over ``r`` and ``s``.

    Returns:
        The element it represents.

    Raises:
        UnknownGenerator: If a letter is neither ``r`` nor ``s``.
    """
    product = IDENTITY
    for gen, exp in word.letters:
        if gen == "r":
            product = dmul(product, DihedralElement(0, exp))
        elif gen == "s":
            product = dmul(product, dpow(REFLECTION, exp))
        else:
            err = f"dihedral vertex {word.vertex!r} has no generator {gen!r}"
            raise UnknownGenerator(err)
    return product


def to_word(vertex: str, element: DihedralElement) -> VertexWord:
    """Write an element in normal form.

    Args:
        vertex: The owning vertex.
        element: The element.

    Returns:
        The word ``s^eps r^k`` with trivial letters omitted.
    """
    letters: list[Letter] = []
    if element.eps:
        letters.append(("s", 1))
    if element.k:
        letters.append(("r", element.k))
    return VertexWord(vertex, tuple(letters))


def normal_form(vertex: str, letters: Iterable[Letter]) -> VertexWord:
    """Reduce raw dihedral letters to normal form.

    Args:
        vertex: The owning vertex.
        letters: Raw letters over ``r`` and ``s``.

    Returns:
        The normal-form word.
    """
    return to_word(vertex, to_element(VertexWord(vertex, tuple(letters))))
