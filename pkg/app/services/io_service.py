"""Service reading graph files, weight tables, vertex states and arguments"""

from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import json
import logging
import re

from pydantic import ValidationError

from app.core.exceptions import StructuralError, UsageError
from app.models.graph import BOUNDARY, OrientedGraphTerm, Target
from app.models.poly import Polynomial, PolyVectorField, polynomial_from_json
from app.models.schemas import ArgumentsDocument, GraphInput, StateDocument
from app.models.vectors import CobarVector, GraphVector, WeightFunctional, parse_rational
from app.services.graph_service import graph_service

logger = logging.getLogger(__name__)

NamedTerm = Tuple[str, OrientedGraphTerm]

_TOKEN_PATTERN = re.compile(
    r"(?P<comment>\#[^\n]*)|(?P<space>[ \t\r]+)|(?P<newline>\n)"
    r"|(?P<number>\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_.\-]*)|(?P<punct>[{};:=])"
)
_VERTEX_PATTERN = re.compile(r"([bv])(\d+)")


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    """Split graph text into tokens with 1-based line and column"""
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN_PATTERN.match(text, position)
        column = position - line_start + 1
        if match is None:
            raise UsageError(f"Unexpected character {text[position]!r}", line=line, column=column)
        kind = match.lastgroup
        if kind == "newline":
            line, line_start = line + 1, match.end()
        elif kind not in ("comment", "space"):
            yield Token(kind, match.group(), line, column)
        position = match.end()


class _GraphParser:
    """Recursive-descent reader of `graph <name> { n=..; m=..; v1: ..; }` blocks"""

    def __init__(self, text: str):
        self.tokens = list(tokenize(text))
        self.index = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def fail(self, message: str, token: Optional[Token]) -> UsageError:
        if token is None:
            last = self.tokens[-1] if self.tokens else Token("eof", "", 1, 1)
            return UsageError(f"{message}, found end of input", line=last.line, column=last.column + len(last.text))
        return UsageError(f"{message}, found {token.text!r}", line=token.line, column=token.column)

    def take(self, kind: str, text: Optional[str] = None) -> Token:
        token = self.peek()
        if token is None or token.kind != kind or (text is not None and token.text != text):
            raise self.fail(f"Expected {text or kind}", token)
        self.index += 1
        return token

    def parse(self) -> List[Tuple[str, int, int, Dict[int, List[Target]]]]:
        blocks = []
        while self.peek() is not None:
            blocks.append(self.parse_block())
        return blocks

    def parse_block(self) -> Tuple[str, int, int, Dict[int, List[Target]]]:
        self.take("word", "graph")
        name = self.take("word")
        self.take("punct", "{")
        counts = {}
        for field in ("n", "m"):
            self.take("word", field)
            self.take("punct", "=")
            counts[field] = int(self.take("number").text)
            self.take("punct", ";")
        vertices: Dict[int, List[Target]] = {}
        while True:
            token = self.peek()
            if token is not None and token.kind == "punct" and token.text == "}":
                self.index += 1
                break
            head = self.take("word")
            source = _VERTEX_PATTERN.fullmatch(head.text)
            if source is None:
                raise self.fail("Expected a vertex such as v1", head)
            if source.group(1) == BOUNDARY:
                raise StructuralError(f"Graph {name.text}: boundary vertex {head.text} cannot have outgoing edges")
            label = int(source.group(2))
            if label in vertices:
                raise StructuralError(f"Graph {name.text}: vertex {head.text} listed twice")
            self.take("punct", ":")
            targets: List[Target] = []
            while True:
                token = self.peek()
                if token is not None and token.kind == "punct" and token.text == ";":
                    self.index += 1
                    break
                word = self.take("word")
                target = _VERTEX_PATTERN.fullmatch(word.text)
                if target is None:
                    raise self.fail("Expected a target such as b1 or v2", word)
                targets.append((target.group(1), int(target.group(2))))
            vertices[label] = targets
        return name.text, counts["n"], counts["m"], vertices


class IOService:
    """Conversions between external documents and domain objects"""

    def parse_graph_file(self, text: str) -> List[NamedTerm]:
        """
        Parse every graph block of a text into named canonical terms

        Args:
            text: Blocks `graph <name> { n=<int>; m=<int>; v<i>: <targets>; }`

        Returns:
            (name, canonical term) pairs in file order

        Raises:
            UsageError: syntax error, with line and column
            StructuralError: semantic error, naming the graph
        """
        terms = []
        for name, n, m, vertices in _GraphParser(text).parse():
            extra = sorted(v for v in vertices if not 1 <= v <= n)
            if extra:
                raise StructuralError(f"Graph {name}: vertex v{extra[0]} outside 1..{n}")
            out_edges = [vertices.get(v, []) for v in range(1, n + 1)]
            try:
                term = graph_service.make_graph(n, m, out_edges)
            except StructuralError as e:
                raise StructuralError(f"Graph {name}: {e}")
            terms.append((name, term))
        logger.debug(f"Parsed {len(terms)} graphs")
        return terms

    def graph_from_input(self, data: GraphInput) -> OrientedGraphTerm:
        out_edges = []
        for targets in data.out_edges:
            parsed = []
            for token in targets:
                match = _VERTEX_PATTERN.fullmatch(token.strip())
                if match is None:
                    raise UsageError(f"Malformed target {token!r}")
                parsed.append((match.group(1), int(match.group(2))))
            out_edges.append(parsed)
        return graph_service.make_graph(data.n, data.m, out_edges)

    def terms_to_vector(self, terms: Sequence[OrientedGraphTerm]) -> GraphVector:
        vector = GraphVector()
        for term in terms:
            vector.add_term(term.graph, term.sign)
        return vector

    def per_graph(self, terms: Sequence[NamedTerm], render: Callable[[OrientedGraphTerm], Any]) -> Dict[str, Any]:
        """Render one graph bare, several graphs keyed by name"""
        if len(terms) == 1:
            return render(terms[0][1])
        return {name: render(term) for name, term in terms}

    def word_from_keys(self, keys: Sequence[str]) -> CobarVector:
        """A single cobar word; orientation signs of the letters multiply"""
        sign, letters = 1, []
        for key in keys:
            term = graph_service.graph_from_key(key)
            if term.graph.is_empty:
                raise UsageError("Cobar words cannot contain the empty graph")
            sign *= term.sign
            letters.append(term.graph)
        return CobarVector({tuple(letters): sign})

    def load_weights(self, table: Mapping[str, Any]) -> WeightFunctional:
        """Canonicalize keys; a key naming the reversed orientation flips the value"""
        weights = WeightFunctional()
        for key, value in table.items():
            term = graph_service.graph_from_key(key)
            try:
                rational = parse_rational(value)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"Malformed rational {value!r} for {key}")
            if term.sign == 0:
                logger.warning(f"Ignoring weight on {key}: its orientation class is zero")
                continue
            weights[term.graph] = weights.get(term.graph, 0) + rational * term.sign
        return weights

    def load_state(self, document: Union[StateDocument, Mapping[str, Any]]) -> List[PolyVectorField]:
        document = self._validated(StateDocument, document)
        return [
            PolyVectorField.from_json(document.dimension, [term.model_dump() for term in field])
            for field in document.fields
        ]

    def load_arguments(self, document: Union[ArgumentsDocument, Mapping[str, Any]]) -> List[Polynomial]:
        document = self._validated(ArgumentsDocument, document)
        return [polynomial_from_json(document.dimension, p) for p in document.polynomials]

    def read_json(self, path: Union[str, Path]) -> Any:
        try:
            return json.loads(Path(path).read_text())
        except OSError as e:
            raise UsageError(f"Cannot read {path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: {e.msg}", line=e.lineno, column=e.colno)

    def read_text(self, path: Union[str, Path]) -> str:
        try:
            return Path(path).read_text()
        except OSError as e:
            raise UsageError(f"Cannot read {path}: {e.strerror}")

    def _validated(self, model, document):
        if isinstance(document, model):
            return document
        try:
            return model.model_validate(document)
        except ValidationError as e:
            raise UsageError(f"Invalid {model.__name__}: {e.errors()[0]['msg']}")


io_service = IOService()
