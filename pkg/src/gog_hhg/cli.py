"""Command line entry point: every command prints one JSON object.

Verdicts are data, so ``HHG`` and ``NotHHG`` both exit 0. Input and
validation problems print ``{"error", "code", "line", "column"}`` and exit 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from pathlib import Path
from typing import TYPE_CHECKING, Any

from gog_hhg.balance import Unbalanced, brute_force_balance_oracle, edge_balanced
from gog_hhg.certify import distortion_certificate
from gog_hhg.config import load_settings
from gog_hhg.conjugacy import build_conjugacy_graph, edge_class_of, verify_provenance
from gog_hhg.errors import CertificateError, GogError, SearchBudgetExceeded
from gog_hhg.parametrize import (
    HHG,
    LinearParametrization,
    NotHHG,
    hhg_verdict,
    parametrize,
    verify_parametrization,
)
from gog_hhg.textformat import decode, parse, parse_word, serialize
from gog_hhg.words import britton_reduce, render, to_path_form


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from gog_hhg.certify import BSWitness
    from gog_hhg.config import Settings
    from gog_hhg.model import GraphOfGroups

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
SAFE_INTEGER = 2**53

Payload = dict[str, Any]


def _json_int(value: int) -> int | str:
    """Render an integer, as a decimal string beyond 2**53.

    Args:
        value: The integer.

    Returns:
        The integer or its decimal string.
    """
    return str(value) if abs(value) > SAFE_INTEGER else value


def _load(path: str) -> GraphOfGroups:
    return parse(decode(Path(path).read_bytes()))


def _witness_json(graph: GraphOfGroups, witness: BSWitness) -> Payload:
    payload: Payload = witness.as_json(graph)
    payload["i"], payload["j"] = _json_int(witness.i), _json_int(witness.j)
    return payload


def _phi_json(phi: LinearParametrization) -> dict[str, list[int | str]]:
    return {name: [_json_int(part) for part in pair] for name, pair in phi.as_json().items()}


def _check_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    return {
        "valid": True,
        "vertices": {vertex: str(kind) for vertex, kind in graph.vertices.items()},
        "edges": sorted(graph.edges),
        "tree": sorted(graph.tree),
    }


def _reduce_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    word = to_path_form(graph, parse_word(args.word), args.base)
    reduced = britton_reduce(graph, word)
    return {"input": args.word, "reduced": render(graph, reduced), "trivial": reduced.is_empty}


def _oracle_json(graph: GraphOfGroups, name: str, settings: Settings) -> Payload:
    try:
        result = brute_force_balance_oracle(
            graph,
            name,
            settings.oracle_syllables,
            settings.oracle_exponent,
            node_cap=settings.node_cap,
        )
    except SearchBudgetExceeded:
        return {"status": "budget-exceeded"}
    if result.conjugator is None:
        return {"status": result.status}
    return {
        "status": result.status,
        "conjugator": render(graph, result.conjugator),
        "i": result.i,
        "j": result.j,
    }


def _balance_command(args: argparse.Namespace, settings: Settings) -> Payload:
    graph = _load(args.file)
    names = [args.edge] if args.edge else sorted(graph.edges)
    rows = []
    for name in names:
        verdict = edge_balanced(graph, name)
        row: Payload = {"id": name, "verdict": str(verdict)}
        if isinstance(verdict, Unbalanced):
            row["modulus"] = str(verdict.modulus)
            row["cycle"] = [step.label() for step in verdict.cycle]
        if args.oracle:
            row["oracle"] = _oracle_json(graph, name, settings)
        rows.append(row)
    return {"edges": rows}


def _conjgraph_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    cls = edge_class_of(graph, args.class_of)
    conjugacy = build_conjugacy_graph(graph, cls)
    text = serialize(conjugacy.graph)
    if args.emit:
        Path(args.emit).write_text(text, encoding="utf-8")
        logger.info("Wrote conjugacy graph %d to %s", cls.index, args.emit)
    failures = verify_provenance(graph, conjugacy)
    return {
        "class": cls.index,
        "members": [str(occurrence) for occurrence in cls.members],
        "nodes": {name: str(node) for name, node in conjugacy.nodes.items()},
        "graph": text,
        "failures": failures,
        "verified": not failures,
    }


def _parametrize_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    result = parametrize(graph)
    if isinstance(result, LinearParametrization):
        return {
            "status": "HHG",
            "certificates": [{"phi": _phi_json(result)}],
            "verified": bool(verify_parametrization(graph, result)),
        }
    verdict = hhg_verdict(graph)
    if not isinstance(verdict, NotHHG):
        err = "graph is unbalanced but no unbalanced edge was found"
        raise CertificateError(err)
    return {
        "status": "NotHHG",
        "edge": verdict.edge,
        "modulus": str(result.modulus),
        "witness": _witness_json(graph, verdict.witness),
        "verified": True,
    }


def _verdict_payload(graph: GraphOfGroups, verdict: HHG | NotHHG) -> Payload:
    if isinstance(verdict, HHG):
        return {
            "status": "HHG",
            "certificates": [
                {"class": certificate.index, "phi": _phi_json(certificate.parametrization)}
                for certificate in verdict.certificates
            ],
            "verified": all(
                verify_parametrization(certificate.conjugacy, certificate.parametrization)
                for certificate in verdict.certificates
            ),
        }
    return {
        "status": "NotHHG",
        "edge": verdict.edge,
        "witness": _witness_json(graph, verdict.witness),
        "verified": True,
    }


def _verdict_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    return _verdict_payload(graph, hhg_verdict(graph))


def _witness_command(args: argparse.Namespace, _settings: Settings) -> Payload:
    graph = _load(args.file)
    verdict = hhg_verdict(graph)
    if isinstance(verdict, HHG):
        return {"status": "HHG", "witness": None}
    return {
        "status": "NotHHG",
        "edge": verdict.edge,
        "cycle": [step.label() for step in verdict.verdict.cycle],
        "modulus": str(verdict.verdict.modulus),
        "witness": _witness_json(graph, verdict.witness),
        "verified": True,
    }


def _distortion_command(args: argparse.Namespace, settings: Settings) -> Payload:
    graph = _load(args.file)
    verdict = hhg_verdict(graph)
    if isinstance(verdict, HHG):
        return {"status": "HHG", "witness": None, "table": []}
    certificate = distortion_certificate(graph, verdict.witness, settings.depth)
    return {
        "status": "NotHHG",
        "edge": verdict.edge,
        "witness": _witness_json(graph, certificate.witness),
        "table": [
            {
                "k": row.k,
                "exponent": _json_int(row.exponent),
                "length": _json_int(row.bound),
                "ratio": str(row.ratio),
                "reduced": row.reduced,
            }
            for row in certificate.rows
        ],
        "verified": True,
    }


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser.

    Returns:
        The parser with one subcommand per operation.
    """
    parser = argparse.ArgumentParser(
        prog="gog-hhg",
        description="Decide hierarchical hyperbolicity of graphs of free and dihedral groups.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log more to standard error (repeat for debug output).",
    )
    parser.add_argument(
        "--node-cap",
        type=int,
        default=None,
        help="Most states a bounded search may expand.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(
        name: str,
        func: Callable[[argparse.Namespace, Settings], Payload],
        help_text: str,
    ) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("file", help="Graph of groups in the text format.")
        sub.set_defaults(func=func)
        return sub

    command("check", _check_command, "Parse and validate a graph.")
    reduce = command("reduce", _reduce_command, "Britton-reduce a word.")
    reduce.add_argument("--word", required=True, help="Whitespace-separated letters.")
    reduce.add_argument("--base", default=None, help="Base vertex of the word.")
    balance = command("balance", _balance_command, "Decide balance of edges.")
    balance.add_argument("--edge", default=None, help="Only this edge.")
    balance.add_argument("--oracle", action="store_true", help="Also run the brute-force oracle.")
    conjgraph = command("conjgraph", _conjgraph_command, "Build the conjugacy graph of a class.")
    conjgraph.add_argument("--class-of", required=True, help="An edge of the class.")
    conjgraph.add_argument("--emit", default=None, help="Write the derived graph to this path.")
    command("parametrize", _parametrize_command, "Parametrize a graph of two-ended groups.")
    command("verdict", _verdict_command, "Decide hierarchical hyperbolicity.")
    command("witness", _witness_command, "Produce an almost Baumslag-Solitar witness.")
    distortion = command("distortion", _distortion_command, "Iterate the witness relation.")
    distortion.add_argument("--depth", type=int, default=None, help="Number of iterates.")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _emit(payload: Payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))  # noqa: T201


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command.

    Args:
        argv: Arguments without the program name; defaults to ``sys.argv``.

    Returns:
        The exit status.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    settings = load_settings(Path.cwd()).override(
        node_cap=args.node_cap,
        depth=getattr(args, "depth", None),
    )
    try:
        payload = args.func(args, settings)
    except GogError as exc:
        err = f"{exc.code}: {exc.message}"
        logger.critical(err)
        _emit({"error": exc.message, "code": exc.code, "line": exc.line, "column": exc.column})
        return EXIT_INPUT
    except OSError as exc:
        err = f"Unable to read {args.file}: {exc.strerror}"
        logger.critical(err)
        _emit({"error": err, "code": "FileError", "line": None, "column": None})
        return EXIT_INPUT
    _emit(payload)
    return EXIT_OK
