"""Text preprocessing for source snapshots and bug reports.

Files and reports go through the same pipeline: identifiers are split into
subtokens, tokens are lowercased, stopwords and noise dropped, and survivors
stemmed. Source files are treated as plain text, so comments and string
literals contribute tokens too.
"""

from __future__ import annotations

import json
import logging
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .stemming import stem
from .stopwords import DEFAULT_STOPWORDS

logger = logging.getLogger(__name__)

_UPPER = frozenset(string.ascii_uppercase)
_LOWER = frozenset(string.ascii_lowercase)
_DIGIT = frozenset(string.digits)
_ALNUM = _UPPER | _LOWER | _DIGIT

DEFAULT_EXTENSIONS = (".java",)


@dataclass(frozen=True)
class RawDocument:
    """A unit of text entering the pipeline, before tokenization."""

    id: str
    text: str
    kind: str = "source"  # "source" or "query"


@dataclass(frozen=True)
class TokenDocument:
    """A preprocessed document: ordered lowercase stemmed terms."""

    id: str
    tokens: tuple[str, ...]


def split_identifiers(text: str) -> list[str]:
    """Split text into subtokens on punctuation and identifier-internal seams.

    Splits happen at non-alphanumeric characters (which are dropped), at
    lower-to-upper case changes, at letter/digit changes in either direction,
    and before the last capital of an acronym run followed by a lowercase
    letter, so "HTTPServer2x" yields HTTP, Server, 2, x. The unsplit compound
    is not kept. Only ASCII letters and digits count as token characters.
    """
    tokens: list[str] = []
    start = None  # index where the current subtoken began
    prev = ""
    n = len(text)
    for i in range(n):
        ch = text[i]
        if ch not in _ALNUM:
            if start is not None:
                tokens.append(text[start:i])
                start = None
            prev = ""
            continue
        if start is None:
            start = i
        else:
            boundary = (
                (prev in _LOWER and ch in _UPPER)
                or (prev in _DIGIT and ch not in _DIGIT)
                or (prev not in _DIGIT and ch in _DIGIT)
                or (
                    prev in _UPPER
                    and ch in _UPPER
                    and i + 1 < n
                    and text[i + 1] in _LOWER
                )
            )
            if boundary:
                tokens.append(text[start:i])
                start = i
        prev = ch
    if start is not None:
        tokens.append(text[start:])
    return tokens


def _stem_fixpoint(token: str) -> str:
    # A single stemmer pass is not idempotent ("agreed" -> "agre" -> "agr"),
    # so iterate until stable; each changing pass shortens the token or turns
    # a trailing y into i, which bounds the loop.
    while True:
        stemmed = stem(token)
        if stemmed == token:
            return stemmed
        token = stemmed


def _keep(token: str, stopwords: frozenset[str]) -> bool:
    return len(token) > 1 and token not in stopwords and not token.isdigit()


def normalize_tokens(
    tokens: Iterable[str], stopwords: frozenset[str] = DEFAULT_STOPWORDS
) -> tuple[str, ...]:
    """Lowercase, drop stopwords / single characters / pure numbers, and stem.

    The noise filter runs again after stemming because a stem can land on a
    stopword or a single character ("beings" -> "be", "ies" -> "i"). Output
    tokens are fixpoints of the whole function, so normalizing an already
    normalized list is the identity.
    """
    out = []
    for token in tokens:
        token = token.lower()
        if not _keep(token, stopwords):
            continue
        token = _stem_fixpoint(token)
        if _keep(token, stopwords):
            out.append(token)
    return tuple(out)


def tokenize_text(
    text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS
) -> tuple[str, ...]:
    """Full pipeline from raw text to normalized tokens."""
    return normalize_tokens(split_identifiers(text), stopwords)


def _read_file(path: Path) -> str:
    # Snapshots in the wild mix encodings; a lone bad byte should cost one
    # replacement character, not the whole file.
    with open(path, encoding="utf-8", errors="replace") as fh:
        return fh.read()


def _process_file(args: tuple[str, str, frozenset[str]]) -> TokenDocument | None:
    path_str, doc_id, stopwords = args
    try:
        text = _read_file(Path(path_str))
    except OSError as exc:
        logger.warning("skipping unreadable file %s: %s", path_str, exc)
        return None
    return TokenDocument(id=doc_id, tokens=tokenize_text(text, stopwords))


def module_id(path: Path, root: Path) -> str:
    """Snapshot-relative identity of a source file, with forward slashes."""
    return path.relative_to(root).as_posix()


def build_corpus(
    root: str | Path,
    extensions: Sequence[str] = DEFAULT_EXTENSIONS,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    jobs: int = 1,
) -> list[TokenDocument]:
    """Tokenize every matching file under a snapshot root, in path order.

    Unreadable files are logged and skipped. With jobs > 1 files are
    processed in parallel; results are merged back into lexicographic path
    order, so the corpus is identical for any job count.
    """
    root = Path(root)
    suffixes = {ext.lower() for ext in extensions}
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in suffixes),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    work = [(str(p), module_id(p, root), stopwords) for p in paths]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_process_file, work))
    else:
        results = [_process_file(item) for item in work]
    return [doc for doc in results if doc is not None]


def build_query(bug, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> TokenDocument:
    """Turn a bug report into a query document.

    The summary and description are joined with a single space and sent
    through the same pipeline as source files. Both fields empty is legal
    and produces an empty query.
    """
    text = f"{bug.summary} {bug.description}"
    return TokenDocument(id=bug.id, tokens=tokenize_text(text, stopwords))


def dump_corpus(docs: Iterable[TokenDocument], path: str | Path) -> None:
    """Write a corpus as JSON lines: {"id": ..., "tokens": [...]}."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps({"id": doc.id, "tokens": list(doc.tokens)}, ensure_ascii=False)
            )
            fh.write("\n")


def load_corpus(path: str | Path) -> list[TokenDocument]:
    """Read a JSON-lines corpus dump written by dump_corpus."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            docs.append(TokenDocument(id=rec["id"], tokens=tuple(rec["tokens"])))
    return docs
