"""Unit tests for almost Baumslag-Solitar witnesses and distortion certificates."""

from __future__ import annotations

import dataclasses

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from gog_hhg.balance import BALANCED, Unbalanced, edge_balanced, group_balanced
from gog_hhg.certify import (
    REDUCTION_SYLLABLES,
    BSWitness,
    almost_bs_witness,
    conjugation_chain,
    distortion_certificate,
    verify_witness,
)
from gog_hhg.errors import CertificateError, NoWitness
from gog_hhg.textformat import parse
from gog_hhg.words import letter_length, path_power, render
from tests.conftest import bs_graph, random_two_ended_graph


if TYPE_CHECKING:
    import random

    from collections.abc import Callable

    from gog_hhg.model import GraphOfGroups


def _witness(graph: GraphOfGroups) -> BSWitness:
    verdict = group_balanced(graph)
    assert isinstance(verdict, Unbalanced)
    return almost_bs_witness(graph, verdict)


def test_witness_of_a_loop(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """``t v^2 t^-1 = v^3`` is its own witness.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("bs32")
    witness = _witness(graph)
    assert witness.as_json(graph) == {
        "a": "v.1",
        "s": "e.t",
        "i": 2,
        "j": 3,
        "transcript": "",
    }
    assert verify_witness(graph, witness)


def test_witness_through_a_conjugated_root(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """The vertex conjugator of a rank-two attachment enters ``s``.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("f2_loop")
    witness = _witness(graph)
    assert render(graph, witness.a) == "v.1"
    assert render(graph, witness.s) == "v.2^-1 e.t"
    assert (witness.i, witness.j) == (3, 2)


def test_balanced_graph_has_no_witness(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Asking for a witness of a balanced graph is an error.

    Args:
        load_graph: Fixture loader.
    """
    with pytest.raises(NoWitness):
        almost_bs_witness(load_graph("klein"), BALANCED)


def test_tampered_witnesses_fail(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """Changing an exponent or equalizing them breaks verification.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("bs32")
    witness = _witness(graph)
    assert not verify_witness(graph, dataclasses.replace(witness, j=4))
    assert not verify_witness(graph, dataclasses.replace(witness, i=3))
    assert not verify_witness(graph, dataclasses.replace(witness, s=witness.a))


@pytest.mark.parametrize("power", (2, 3, -2))
def test_witness_powers(load_graph: Callable[[str], GraphOfGroups], power: int) -> None:
    """Replacing ``a`` by a power of it keeps the relation.

    Args:
        load_graph: Fixture loader.
        power: Power of ``a``.
    """
    graph = load_graph("f2_loop")
    witness = _witness(graph)
    powered = dataclasses.replace(witness, a=path_power(graph, witness.a, power))
    assert verify_witness(graph, powered)


@pytest.mark.parametrize(("m", "n"), ((4, 6), (-3, 2), (2, -5), (6, 1)))
def test_witness_exponents_are_coprime(m: int, n: int) -> None:
    """The common factor of the exponents moves into ``a``.

    Args:
        m: Source exponent.
        n: Target exponent.
    """
    graph = bs_graph(m, n)
    witness = _witness(graph)
    assert witness.i > 0
    assert abs(witness.j) * abs(n) == witness.i * abs(m)
    assert verify_witness(graph, witness)


def test_witnesses_of_random_graphs(rng: random.Random) -> None:
    """Every unbalanced edge of a random graph yields a verified witness.

    Args:
        rng: Seeded random generator.
    """
    found = 0
    for _ in range(60):
        graph = random_two_ended_graph(rng, max_vertices=4, max_edges=6, max_exponent=5)
        for name in sorted(graph.edges):
            verdict = edge_balanced(graph, name)
            if isinstance(verdict, Unbalanced):
                found += 1
                assert verify_witness(graph, almost_bs_witness(graph, verdict))
    assert found


@pytest.mark.parametrize("depth", (3, 10))
def test_distortion_rows(load_graph: Callable[[str], GraphOfGroups], depth: int) -> None:
    """Iterates verify and their length-per-exponent ratio shrinks.

    Args:
        load_graph: Fixture loader.
        depth: Number of iterates.
    """
    graph = load_graph("bs32")
    certificate = distortion_certificate(graph, _witness(graph), depth)
    rows = certificate.rows
    assert [row.k for row in rows] == list(range(1, depth + 1))
    assert [row.exponent for row in rows] == [3**k for k in range(1, depth + 1)]
    assert [row.bound for row in rows[:3]] == [4, 8, 14]
    assert rows[0].ratio == Fraction(4, 3)
    assert all(later.ratio < earlier.ratio for earlier, later in zip(rows, rows[1:]))


def test_distortion_reorients_the_witness(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """A witness with ``|j| < |i|`` is inverted before iterating.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("f2_loop")
    certificate = distortion_certificate(graph, _witness(graph), 3)
    assert (certificate.witness.i, certificate.witness.j) == (2, 3)
    assert render(graph, certificate.witness.s) == "e.t^-1 v.2"
    assert verify_witness(graph, certificate.witness)
    assert [row.exponent for row in certificate.rows] == [3, 9, 27]


def test_distortion_recomputes_the_transcript(load_graph: Callable[[str], GraphOfGroups]) -> None:
    """The oriented witness carries its own transcript and must reduce.

    Args:
        load_graph: Fixture loader.
    """
    graph = load_graph("f2_loop")
    witness = _witness(graph)
    certificate = distortion_certificate(graph, dataclasses.replace(witness, transcript="v.1"), 2)
    assert certificate.witness.transcript == ""
    with pytest.raises(CertificateError, match="does not reduce"):
        distortion_certificate(graph, dataclasses.replace(witness, j=5), 2)


@pytest.mark.parametrize(
    ("i", "j", "k", "chain"),
    ((2, 3, 3, (8, 12, 18, 27)), (4, -6, 2, (16, -24, 36)), (3, 2, 1, (3, 2))),
)
def test_conjugation_chain(i: int, j: int, k: int, chain: tuple[int, ...]) -> None:
    """Each conjugation trades a factor ``i`` for a factor ``j``.

    Args:
        i: Left exponent.
        j: Right exponent.
        k: Number of conjugations.
        chain: Expected exponents.
    """
    assert conjugation_chain(i, j, k) == chain


def test_distortion_of_a_long_root() -> None:
    """Powers of a two-letter root are reduced while short and derived after."""
    graph = parse(
        "vertex v free 2\n"
        'edge e from=v to=v img_from="v.1 v.2 v.1 v.2 v.1 v.2" img_to="v.1 v.2 v.1 v.2"\n',
    )
    witness = _witness(graph)
    assert letter_length(graph, witness.a) == 2
    depth = 40
    certificate = distortion_certificate(graph, witness, depth)
    rows = certificate.rows
    assert [row.exponent for row in rows] == [3**k for k in range(1, depth + 1)]
    assert [row.reduced for row in rows] == [
        2 * 3**k <= REDUCTION_SYLLABLES for k in range(1, depth + 1)
    ]
    assert rows[0].reduced
    assert not rows[-1].reduced
    assert rows[-1].bound == 2 * depth * letter_length(graph, certificate.witness.s) + 2**depth * 2
    assert all(later.ratio < earlier.ratio for earlier, later in zip(rows[1:], rows[2:]))
