"""Parsers for the two input formats, plus pretty-printers.

Abstract format: optional ``#abstract`` header; each nonblank, non-comment
line is either ``P<rank>: <chars>`` or bare ``<chars>`` (bare lines get
ranks 0,1,2,... in order).  Every non-whitespace character is one message
occurrence.

DSL format (``#`` starts a line comment)::

    process 0 { send tag=1 to 2; recv tag=3 from 1; }

``send tag=t to j`` in process i builds Envelope(t, i, j, comm), role SEND;
``recv tag=t from i`` in process j builds Envelope(t, i, j, comm), role RECV;
``comm=c`` is optional and defaults to 0.
"""
from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .model import Envelope, MessageOccurrence, Mode, Model, Role, Sequence
from .signatures import SignatureSpace


class ParseError(Exception):
    """Positioned parse failure; line/column are 1-based."""

    def __init__(self, line: int, column: int, message: str, category: str = "Syntax"):
        self.line = line
        self.column = column
        self.message = message
        self.category = category
        super().__init__(f"{line}:{column}: {category}: {message}")


def detect_format(text: str) -> Mode:
    """DSL iff the first nonblank token is ``process``; abstract otherwise."""
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        return Mode.STRICT if stripped.split()[0] == "process" else Mode.ABSTRACT
    return Mode.ABSTRACT


def parse_model(text: str) -> Model:
    if detect_format(text) is Mode.STRICT:
        return parse_dsl(text)
    return parse_abstract(text)


def parse_abstract(text: str) -> Model:
    space = SignatureSpace()
    sequences: List[Sequence] = []
    used_ranks: set = set()
    auto_rank = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = re.match(r"^P(\S*)\s*:\s*(.*)$", line)
        if match:
            rank_text, body = match.groups()
            try:
                rank = int(rank_text)
            except ValueError:
                raise ParseError(lineno, 2, f"bad process rank {rank_text!r}", "BadInteger")
            if rank < 0:
                raise ParseError(lineno, 2, f"negative process rank {rank}", "BadInteger")
        else:
            rank, body = auto_rank, line
            auto_rank += 1
        if rank in used_ranks:
            raise ParseError(lineno, 1, f"process {rank} defined twice", "DuplicateProcess")
        used_ranks.add(rank)
        occurrences = [
            MessageOccurrence(space.intern_character(ch), source_location=f"{lineno}")
            for ch in body
            if not ch.isspace()
        ]
        sequences.append(Sequence(rank=rank, occurrences=occurrences))
    return Model(sequences=sequences, mode=Mode.ABSTRACT, space=space)


_TOKEN_RE = re.compile(r"[A-Za-z_]\w*|\d+|[{}=;]|\S")


class _Token:
    __slots__ = ("text", "line", "column")

    def __init__(self, text: str, line: int, column: int):
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            tokens.append(_Token(m.group(), lineno, m.start() + 1))
    return tokens


class _DslParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _error(self, message: str, category: str = "Syntax") -> ParseError:
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            return ParseError(tok.line, tok.column, message, category)
        last = self.tokens[-1] if self.tokens else None
        line = last.line if last else 1
        col = last.column + len(last.text) if last else 1
        return ParseError(line, col, message + " (at end of input)", category)

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos].text if self.pos < len(self.tokens) else None

    def take(self, expected: str) -> _Token:
        if self.peek() != expected:
            raise self._error(f"expected {expected!r}, found {self.peek()!r}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def take_int(self, what: str) -> Tuple[int, _Token]:
        tok_text = self.peek()
        if tok_text is None or not tok_text.isdigit():
            raise self._error(f"expected {what} (nonnegative integer), found {tok_text!r}", "BadInteger")
        tok = self.tokens[self.pos]
        self.pos += 1
        return int(tok_text), tok

    def parse(self) -> Model:
        space = SignatureSpace()
        sequences: List[Sequence] = []
        used_ranks: set = set()
        while self.peek() is not None:
            self.take("process")
            rank, rank_tok = self.take_int("process rank")
            if rank in used_ranks:
                raise ParseError(
                    rank_tok.line, rank_tok.column, f"process {rank} defined twice", "DuplicateProcess"
                )
            used_ranks.add(rank)
            self.take("{")
            occurrences = []
            while self.peek() != "}":
                occurrences.append(self.statement(rank, space))
            self.take("}")
            sequences.append(Sequence(rank=rank, occurrences=occurrences))
        return Model(sequences=sequences, mode=Mode.STRICT, space=space)

    def statement(self, rank: int, space: SignatureSpace) -> MessageOccurrence:
        verb = self.peek()
        if verb not in ("send", "recv"):
            raise self._error(f"expected 'send' or 'recv', found {verb!r}")
        verb_tok = self.tokens[self.pos]
        self.pos += 1
        self.take("tag")
        self.take("=")
        tag, _ = self.take_int("tag")
        direction = "to" if verb == "send" else "from"
        self.take(direction)
        peer, peer_tok = self.take_int("peer rank")
        comm = 0
        if self.peek() == "comm":
            self.take("comm")
            self.take("=")
            comm, _ = self.take_int("communicator")
        self.take(";")
        if peer == rank:
            raise ParseError(
                peer_tok.line,
                peer_tok.column,
                f"process {rank} cannot {verb} {'to' if verb == 'send' else 'from'} itself",
                "SelfMessage",
            )
        if verb == "send":
            env = Envelope(tag=tag, source=rank, destination=peer, communicator=comm)
            role = Role.SEND
        else:
            env = Envelope(tag=tag, source=peer, destination=rank, communicator=comm)
            role = Role.RECV
        sig = space.signature_for(env)
        return MessageOccurrence(
            sig, role=role, envelope=env, source_location=f"{verb_tok.line}:{verb_tok.column}"
        )


def parse_dsl(text: str) -> Model:
    return _DslParser(text).parse()


_ABSTRACT_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
)


def render_abstract(model: Model) -> str:
    """Abstract form, one character per signature.

    Signatures whose label is already a single character keep it; others
    (strict-model envelopes) are relabeled from a 62-character alphabet, so
    only models with at most 62 such signatures can be rendered.
    """
    labels: dict = {}
    taken = set()
    for seq in model.sequences:
        for occ in seq.occurrences:
            if occ.signature in labels:
                continue
            label = model.space.label_of(occ.signature)
            if len(label) == 1:
                labels[occ.signature] = label
                taken.add(label)
    next_char = iter(c for c in _ABSTRACT_ALPHABET if c not in taken)
    for seq in model.sequences:
        for occ in seq.occurrences:
            if occ.signature not in labels:
                label = next(next_char, None)
                if label is None:
                    raise ValueError(
                        "too many distinct signatures to render as abstract "
                        f"(alphabet has {len(_ABSTRACT_ALPHABET)} characters)"
                    )
                labels[occ.signature] = label
    lines = [
        f"P{seq.rank}: {''.join(labels[o.signature] for o in seq.occurrences)}"
        for seq in model.sequences
    ]
    return "\n".join(lines) + "\n"


def render_dsl(model: Model) -> str:
    if model.mode is not Mode.STRICT:
        raise ValueError("only strict models render as DSL")
    lines = []
    for seq in model.sequences:
        lines.append(f"process {seq.rank} {{")
        for occ in seq.occurrences:
            env = occ.envelope
            comm = f" comm={env.communicator}" if env.communicator != 0 else ""
            if occ.role is Role.SEND:
                lines.append(f"  send tag={env.tag} to {env.destination}{comm};")
            else:
                lines.append(f"  recv tag={env.tag} from {env.source}{comm};")
        lines.append("}")
    return "\n".join(lines) + "\n"
