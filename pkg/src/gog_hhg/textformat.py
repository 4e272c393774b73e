"""The line-based text format for graphs of groups.

::

    # comment
    vertex v free 2
    vertex w dihedral
    edge e from=v to=w img_from="v.1 v.2^-1" img_to="w.r^3"

The defining relation of an edge is ``e.t * img_to * e.t^-1 = img_from``.
"""

from __future__ import annotations

import logging
import re

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from gog_hhg.errors import GogError, ParseError, UnknownGenerator, UnknownVertex
from gog_hhg.model import Dihedral, EdgeRecord, Free, VertexWord, build_graph
from gog_hhg.words import STABLE, RawLetter, normalize


if TYPE_CHECKING:
    from gog_hhg.model import GraphOfGroups, VertexGroupKind

logger = logging.getLogger(__name__)

NAME = r"[A-Za-z0-9_][A-Za-z0-9_-]*"
NAME_RE = re.compile(rf"^{NAME}$")
LETTER_RE = re.compile(rf"^(?P<owner>{NAME})\.(?P<gen>[0-9]+|r|s|t)(?:\^(?P<exp>[+-]?[0-9]+))?$")
TOKEN_RE = re.compile(r'(?:[^\s"]+|"[^"]*")+')
EDGE_KEYS = ("from", "to", "img_from", "img_to")


@dataclass(frozen=True)
class Token:
    """A whitespace-separated token with its position.

    Attributes:
        text: The token text.
        column: 1-based column of its first character.
    """

    text: str
    column: int


@dataclass(frozen=True)
class Declaration:
    """One parsed declaration line.

    Attributes:
        keyword: ``vertex`` or ``edge``.
        name: The declared id.
        line: 1-based source line.
        tokens: The remaining tokens.
    """

    keyword: str
    name: str
    line: int
    tokens: tuple[Token, ...]


@dataclass
class InputDocument:
    """Declarations of a file, in source order.

    Attributes:
        declarations: The parsed lines.
    """

    declarations: list[Declaration] = field(default_factory=list)

    def of(self, keyword: str) -> list[Declaration]:
        """Declarations with one keyword.

        Args:
            keyword: ``vertex`` or ``edge``.

        Returns:
            Matching declarations in source order.
        """
        return [decl for decl in self.declarations if decl.keyword == keyword]


def _tokens(text: str) -> list[Token]:
    return [Token(match.group(), match.start() + 1) for match in TOKEN_RE.finditer(text)]


def _strip_comment(text: str) -> str:
    in_quote = False
    for index, char in enumerate(text):
        if char == '"':
            in_quote = not in_quote
        elif char == "#" and not in_quote:
            return text[:index]
    return text


def read_document(text: str) -> InputDocument:
    """Split text into declarations.

    Args:
        text: File contents.

    Returns:
        The document.

    Raises:
        ParseError: On an unknown keyword, a bad name or a duplicate id.
    """
    document = InputDocument()
    seen: dict[tuple[str, str], int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokens(_strip_comment(raw))
        if not tokens:
            continue
        keyword = tokens[0]
        if keyword.text not in {"vertex", "edge"}:
            err = f"expected 'vertex' or 'edge', found {keyword.text!r}"
            raise ParseError(err, line=number, column=keyword.column)
        if len(tokens) < 2:  # noqa: PLR2004
            err = f"{keyword.text} declaration needs a name"
            raise ParseError(err, line=number, column=keyword.column + len(keyword.text))
        name = tokens[1]
        if not NAME_RE.match(name.text):
            err = f"invalid name {name.text!r}"
            raise ParseError(err, line=number, column=name.column)
        key = (keyword.text, name.text)
        if key in seen:
            err = f"duplicate {keyword.text} {name.text!r}, first declared on line {seen[key]}"
            raise ParseError(err, line=number, column=name.column)
        seen[key] = number
        document.declarations.append(
            Declaration(keyword.text, name.text, number, tuple(tokens[2:])),
        )
    logger.debug("Read %d declarations", len(document.declarations))
    return document


def _vertex_kind(decl: Declaration) -> VertexGroupKind:
    texts = [token.text for token in decl.tokens]
    if texts == ["dihedral"]:
        return Dihedral()
    if len(texts) == 2 and texts[0] == "free" and texts[1].isdigit():  # noqa: PLR2004
        return Free(int(texts[1]))
    column = decl.tokens[0].column if decl.tokens else None
    err = f"vertex {decl.name!r}: expected 'free N' or 'dihedral'"
    raise ParseError(err, line=decl.line, column=column)


def parse_letter(token: Token, line: int = 1) -> RawLetter:
    """Parse one letter such as ``v.2^-3``, ``w.s`` or ``e.t^-1``.

    Args:
        token: The token.
        line: Source line, for errors.

    Returns:
        The raw letter.

    Raises:
        ParseError: If the token is not a letter.
    """
    match = LETTER_RE.match(token.text)
    if match is None:
        err = f"invalid letter {token.text!r}"
        raise ParseError(err, line=line, column=token.column)
    gen = match["gen"]
    exponent = int(match["exp"]) if match["exp"] is not None else 1
    return RawLetter(match["owner"], int(gen) if gen.isdigit() else gen, exponent)


def parse_word(text: str, *, line: int = 1, offset: int = 0) -> tuple[RawLetter, ...]:
    """Parse a whitespace-separated word.

    Args:
        text: The word, unquoted.
        line: Source line, for errors.
        offset: Column offset of ``text`` in its line.

    Returns:
        The raw letters.
    """
    return tuple(
        parse_letter(Token(token.text, token.column + offset), line)
        for token in _tokens(text)
    )


def _edge_fields(decl: Declaration) -> dict[str, Token]:
    values: dict[str, Token] = {}
    for token in decl.tokens:
        key, sep, value = token.text.partition("=")
        if not sep or key not in EDGE_KEYS:
            err = f"edge {decl.name!r}: expected one of {', '.join(k + '=' for k in EDGE_KEYS)}"
            raise ParseError(err, line=decl.line, column=token.column)
        if key in values:
            err = f"edge {decl.name!r}: {key}= given twice"
            raise ParseError(err, line=decl.line, column=token.column)
        values[key] = Token(value, token.column + len(key) + 1)
    missing = [key for key in EDGE_KEYS if key not in values]
    if missing:
        err = f"edge {decl.name!r}: missing {', '.join(k + '=' for k in missing)}"
        raise ParseError(err, line=decl.line)
    return values


def _attachment(
    vertices: dict[str, VertexGroupKind],
    vertex: str,
    token: Token,
    line: int,
) -> VertexWord:
    text = token.text
    if len(text) < 2 or not text.startswith('"') or not text.endswith('"'):  # noqa: PLR2004
        err = f"expected a quoted word, found {text!r}"
        raise ParseError(err, line=line, column=token.column)
    letters = parse_word(text[1:-1], line=line, offset=token.column)
    for letter in letters:
        if letter.owner != vertex or letter.generator == STABLE:
            err = f"letter {letter.owner}.{letter.generator} does not belong to vertex {vertex!r}"
            raise UnknownGenerator(err, line=line, column=token.column)
    pairs = [(letter.generator, letter.exponent) for letter in letters]
    try:
        return normalize(vertices[vertex], vertex, pairs)
    except GogError as exc:
        exc.line, exc.column = line, token.column
        raise


def decode(data: bytes) -> str:
    """Decode file contents as UTF-8.

    Args:
        data: Raw file contents.

    Returns:
        The text.

    Raises:
        ParseError: At the first byte that is not valid UTF-8.
    """
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_start = data.rfind(b"\n", 0, exc.start) + 1
        # the prefix before exc.start decodes cleanly
        column = len(data[line_start : exc.start].decode("utf-8")) + 1
        err = f"invalid UTF-8 byte 0x{data[exc.start]:02x}"
        raise ParseError(err, line=data.count(b"\n", 0, exc.start) + 1, column=column) from exc


def parse(text: str) -> GraphOfGroups:
    """Parse and validate a graph of groups.

    Args:
        text: File contents.

    Returns:
        The validated graph.

    Raises:
        UnknownVertex: If an edge names an undeclared vertex.
        GogError: Validation errors, with the line of the offending edge.
    """
    document = read_document(text)
    vertices = {decl.name: _vertex_kind(decl) for decl in document.of("vertex")}
    edges = []
    for decl in document.of("edge"):
        values = _edge_fields(decl)
        for key in ("from", "to"):
            if values[key].text not in vertices:
                err = f"edge {decl.name!r} names unknown vertex {values[key].text!r}"
                raise UnknownVertex(err, line=decl.line, column=values[key].column)
        source, target = values["from"].text, values["to"].text
        edges.append(
            EdgeRecord(
                name=decl.name,
                source=source,
                target=target,
                attachment_source=_attachment(vertices, source, values["img_from"], decl.line),
                attachment_target=_attachment(vertices, target, values["img_to"], decl.line),
            ),
        )
    lines = {decl.name: decl.line for decl in document.of("edge")}
    try:
        return build_graph(vertices, edges)
    except GogError as exc:
        if exc.line is None:
            exc.line = next(
                (line for name, line in lines.items() if f"edge {name!r}" in exc.message),
                None,
            )
        raise


def serialize(graph: GraphOfGroups) -> str:
    """Write a graph in the text format.

    Args:
        graph: The graph.

    Returns:
        Text that parses back to an equal graph.
    """
    lines = [f"vertex {vertex} {kind}" for vertex, kind in sorted(graph.vertices.items())]
    lines.extend(
        f'edge {name} from={edge.source} to={edge.target} '
        f'img_from="{edge.attachment_source}" img_to="{edge.attachment_target}"'
        for name, edge in sorted(graph.edges.items())
    )
    return "\n".join(lines) + "\n"
