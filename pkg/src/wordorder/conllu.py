"""Streaming reader for CoNLL-U treebanks.

Only integer-id token lines take part in counting. Multiword ranges
("3-4") and empty nodes ("5.1") are kept on the sentence as raw field
tuples so nothing in the input is silently lost.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator

logger = logging.getLogger(__name__)

N_FIELDS = 10


class ConlluError(ValueError):
    """A token line that cannot be parsed. Fatal for the file."""

    def __init__(self, message: str, line_no: int, offset: int):
        super().__init__(f"line {line_no} (byte {offset}): {message}")
        self.line_no = line_no
        self.offset = offset


class SentenceError(ValueError):
    """A parsed sentence whose head structure is inconsistent."""


def _opt(value: str) -> str | None:
    return None if value == "_" else value


@dataclass(frozen=True, slots=True)
class Token:
    id: int
    form: str
    lemma: str
    upos: str
    xpos: str | None
    feats: str | None
    head: int
    deprel: str
    deps: str | None = None
    misc: str | None = None


@dataclass(slots=True)
class Sentence:
    tokens: list[Token]
    sent_id: str | None = None
    text: str | None = None
    comments: list[str] = field(default_factory=list)
    multiword: list[tuple[str, ...]] = field(default_factory=list)
    empty_nodes: list[tuple[str, ...]] = field(default_factory=list)
    line_no: int = 0

    def __len__(self) -> int:
        return len(self.tokens)

    def head_of(self, token: Token) -> Token | None:
        """Return the head token, or None for the root attachment."""
        if token.head == 0:
            return None
        return self.tokens[token.head - 1]

    def validate(self) -> None:
        if not self.tokens:
            raise SentenceError("sentence has no tokens")
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens, start=1):
            if tok.id != i:
                raise SentenceError(f"token id {tok.id} out of sequence (expected {i})")
            if tok.head == tok.id:
                raise SentenceError(f"token {tok.id} is its own head")
            if tok.head < 0 or tok.head > n:
                raise SentenceError(f"token {tok.id} has dangling head {tok.head}")


def base_deprel(deprel: str) -> str:
    """Strip a relation subtype: ``"nsubj:pass"`` -> ``"nsubj"``."""
    return deprel.split(":", 1)[0]


def _int_field(value: str, name: str, line_no: int, offset: int) -> int:
    if not value.isdigit():
        raise ConlluError(f"non-numeric {name} {value!r}", line_no, offset)
    return int(value)


def _parse_comment(line: str, sentence: Sentence) -> None:
    body = line[1:].strip()
    key, sep, value = body.partition("=")
    if sep:
        key = key.strip()
        if key == "sent_id":
            sentence.sent_id = value.strip()
        elif key == "text":
            sentence.text = value.strip()
    sentence.comments.append(line)


def parse_treebank(stream: BinaryIO | io.TextIOBase, name: str = "<stream>") -> Iterator[Sentence]:
    """Yield sentences from a CoNLL-U stream in file order.

    The stream is consumed line by line, so memory use is bounded by the
    longest sentence. Bytes are decoded as UTF-8; a text stream is also
    accepted. Sentences with broken head references are logged and skipped.
    """
    sentence = Sentence(tokens=[])
    offset = 0
    line_no = 0

    def finish(sent: Sentence) -> Sentence | None:
        try:
            sent.validate()
        except SentenceError as exc:
            label = sent.sent_id or f"starting at line {sent.line_no}"
            logger.warning("%s: skipping sentence %s: %s", name, label, exc)
            return None
        return sent

    for raw in stream:
        line_no += 1
        line_offset = offset
        if isinstance(raw, bytes):
            offset += len(raw)
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ConlluError(f"invalid UTF-8 ({exc.reason})", line_no, line_offset) from None
        else:
            offset += len(raw.encode("utf-8"))
            line = raw
        line = line.rstrip("\r\n")

        if not line.strip():
            if sentence.tokens or sentence.multiword or sentence.empty_nodes:
                done = finish(sentence)
                if done is not None:
                    yield done
                sentence = Sentence(tokens=[])
            # a comment-only block carries its metadata to the next sentence
            continue

        if not sentence.tokens and not sentence.comments:
            sentence.line_no = line_no

        if line.startswith("#"):
            _parse_comment(line, sentence)
            continue

        fields = line.split("\t")
        if len(fields) != N_FIELDS:
            raise ConlluError(f"expected {N_FIELDS} tab-separated fields, got {len(fields)}",
                              line_no, line_offset)
        tok_id = fields[0]
        if "-" in tok_id:
            sentence.multiword.append(tuple(fields))
            continue
        if "." in tok_id:
            sentence.empty_nodes.append(tuple(fields))
            continue

        sentence.tokens.append(Token(
            id=_int_field(tok_id, "id", line_no, line_offset),
            form=fields[1],
            lemma=fields[2],
            upos=fields[3],
            xpos=_opt(fields[4]),
            feats=_opt(fields[5]),
            head=_int_field(fields[6], "head", line_no, line_offset),
            deprel=fields[7],
            deps=_opt(fields[8]),
            misc=_opt(fields[9]),
        ))

    if sentence.tokens or sentence.multiword or sentence.empty_nodes:
        done = finish(sentence)
        if done is not None:
            yield done


def read_treebank(path: str | Path) -> Iterator[Sentence]:
    """Open ``path`` and stream its sentences."""
    path = Path(path)
    with path.open("rb") as f:
        yield from parse_treebank(f, name=str(path))


def parse_string(text: str) -> list[Sentence]:
    return list(parse_treebank(io.BytesIO(text.encode("utf-8"))))
