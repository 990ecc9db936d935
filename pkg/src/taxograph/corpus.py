"""Corpus loading and text normalization."""

import json
import logging
import string
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

# ASCII punctuation plus the typographic quotes/dashes common in scraped titles.
_EDGE_PUNCT = string.punctuation + "‘’“”–—…«»"


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    abstract: str = ""

    @property
    def text(self):
        return f"{self.title} {self.abstract}"


def normalize(text):
    """Lowercase, split on whitespace and strip leading/trailing punctuation.

    >>> normalize("large-scale IR,")
    ['large-scale', 'ir']
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(_EDGE_PUNCT)
        if tok:
            tokens.append(tok)
    return tokens


class CorpusReader:
    """Iterable over the well-formed records of a line-delimited JSON corpus.

    Each line is an object with string fields ``id``, ``title`` and optionally
    ``abstract``. Lines that do not parse, lack an id or title, or repeat an
    earlier id are skipped. After a full pass ``count`` holds the number of
    documents yielded and ``skipped`` the number dropped.
    """

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.is_file():
            raise CorpusError(f"corpus file not found: {self.path}")
        try:
            with open(self.path, encoding="utf-8") as fh:
                fh.read(1)
        except OSError as exc:
            raise CorpusError(f"cannot read corpus file {self.path}: {exc}") from exc
        self.skipped = 0
        self.count = 0

    def __iter__(self):
        self.skipped = 0
        self.count = 0
        seen = set()
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                doc = _parse_record(line)
                if doc is None or doc.doc_id in seen:
                    self.skipped += 1
                    logger.warning("%s:%d: skipping malformed or duplicate record", self.path, lineno)
                    continue
                seen.add(doc.doc_id)
                self.count += 1
                yield doc


def _parse_record(line):
    try:
        rec = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(rec, dict):
        return None
    doc_id, title = rec.get("id"), rec.get("title")
    abstract = rec.get("abstract") or ""
    if not isinstance(doc_id, str) or not isinstance(title, str) or not isinstance(abstract, str):
        return None
    if not doc_id.strip() or not title.strip():
        return None
    return Document(doc_id, title, abstract)


def load_corpus(path):
    return CorpusReader(path)


def write_corpus(path, documents):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            rec = {"id": doc.doc_id, "title": doc.title, "abstract": doc.abstract}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
