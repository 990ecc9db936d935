"""Topic candidate extraction from titles and document-level co-occurrence counts."""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import normalize

ORDERS = (2, 3, 4)


def load_wordlist(path=None, default=None):
    """Read a one-word-per-line list; ``default`` names a bundled file."""
    if path is None:
        text = resources.files("taxograph").joinpath("data", default).read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def default_stopwords():
    return load_wordlist(default="stopwords.txt")


def default_prepositions():
    return load_wordlist(default="prepositions.txt")


@dataclass
class NgramCandidate:
    tokens: tuple
    raw_count: int
    discounted_count: int
    # (title index, start offset) of every occurrence, in title order
    occurrences: list = field(default_factory=list, repr=False)

    @property
    def order(self):
        return len(self.tokens)

    @property
    def topic(self):
        return " ".join(self.tokens)


def _allowed(tokens, stopwords, prepositions):
    last = len(tokens) - 1
    for pos, tok in enumerate(tokens):
        if tok in prepositions:
            if pos == 0 or pos == last:
                return False
        elif tok in stopwords:
            return False
    return True


def extract_ngrams(titles, stopwords, prepositions, min_count=3):
    """Count contiguous 2-, 3- and 4-grams over tokenized titles.

    A non-preposition stopword disqualifies an ngram wherever it occurs; a
    preposition is only allowed strictly inside the ngram. Returns
    ``{order: {tokens: NgramCandidate}}`` holding the ngrams seen at least
    ``min_count`` times.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    stopwords = frozenset(stopwords)
    prepositions = frozenset(prepositions)
    occ = {n: {} for n in ORDERS}
    for t_idx, tokens in enumerate(titles):
        tokens = list(tokens)
        for n in ORDERS:
            table = occ[n]
            for start in range(len(tokens) - n + 1):
                gram = tuple(tokens[start:start + n])
                if not _allowed(gram, stopwords, prepositions):
                    continue
                table.setdefault(gram, []).append((t_idx, start))
    out = {}
    for n in ORDERS:
        out[n] = {
            gram: NgramCandidate(gram, len(where), len(where), where)
            for gram, where in occ[n].items()
            if len(where) >= min_count
        }
    return out


def discount_counts(candidates, min_count=3):
    """Subtract occurrences embedded in kept higher-order ngrams.

    Orders are processed top-down: fourgrams are kept as extracted, trigrams
    are discounted by kept fourgrams, bigrams by kept trigrams and fourgrams.
    An occurrence is discounted at most once however many longer ngrams cover
    it. Candidates left below ``min_count`` are dropped.
    """
    covered = {n: set() for n in ORDERS}
    result = {}
    for n in sorted(ORDERS, reverse=True):
        kept = {}
        for gram, cand in candidates.get(n, {}).items():
            embedded = sum(1 for o in cand.occurrences if o in covered[n])
            disc = max(cand.raw_count - embedded, 0)
            if disc >= min_count:
                kept[gram] = NgramCandidate(gram, cand.raw_count, disc, cand.occurrences)
        result[n] = kept
        # occurrences of kept ngrams cover every shorter span inside them
        for cand in kept.values():
            for t_idx, start in cand.occurrences:
                for m in ORDERS:
                    if m >= n:
                        continue
                    for off in range(n - m + 1):
                        covered[m].add((t_idx, start + off))
    return result


@dataclass(frozen=True)
class TopicSet:
    topics: tuple
    doc_freq: tuple = ()

    def __post_init__(self):
        if len(set(self.topics)) != len(self.topics):
            raise ValueError("duplicate topic strings")
        if not self.doc_freq:
            object.__setattr__(self, "doc_freq", (0,) * len(self.topics))
        elif len(self.doc_freq) != len(self.topics):
            raise ValueError("doc_freq length does not match topics")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.topics)})

    def __len__(self):
        return len(self.topics)

    def __contains__(self, topic):
        return topic in self._index

    def id_of(self, topic):
        return self._index[topic]

    def get(self, topic, default=None):
        return self._index.get(topic, default)

    def with_doc_freq(self, doc_freq):
        return TopicSet(self.topics, tuple(int(x) for x in doc_freq))


def merge_candidates(candidates):
    topics = sorted(c.topic for per_order in candidates.values() for c in per_order.values())
    return TopicSet(tuple(topics))


class TopicMatcher:
    """Finds which topics occur contiguously in a token sequence."""

    def __init__(self, topics):
        self.lookup = {tuple(t.split()): i for i, t in enumerate(topics.topics)}
        self.orders = sorted({len(k) for k in self.lookup}) or []

    def find(self, tokens):
        found = set()
        lookup = self.lookup
        for n in self.orders:
            for start in range(len(tokens) - n + 1):
                tid = lookup.get(tuple(tokens[start:start + n]))
                if tid is not None:
                    found.add(tid)
        return found


@dataclass(frozen=True)
class CooccurrenceCounts:
    """Sparse symmetric document co-occurrence counts stored once per pair (i < j)."""

    n_topics: int
    rows: np.ndarray
    cols: np.ndarray
    counts: np.ndarray
    doc_freq: np.ndarray

    def __post_init__(self):
        if np.any(self.rows >= self.cols):
            raise ValueError("pairs must be stored with i < j")
        if len(self.rows) and (self.rows.min() < 0 or self.cols.max() >= self.n_topics):
            raise ValueError("topic id out of range")
        object.__setattr__(
            self, "_map",
            {(int(i), int(j)): int(c) for i, j, c in zip(self.rows, self.cols, self.counts)},
        )

    @classmethod
    def from_pairs(cls, n_topics, pairs, doc_freq=None):
        """Build from ``{(i, j): count}``; keys may be in either order."""
        acc = {}
        for (i, j), c in pairs.items():
            if i == j:
                raise ValueError("self co-occurrence is not allowed")
            key = (min(i, j), max(i, j))
            acc[key] = acc.get(key, 0) + int(c)
        keys = sorted(k for k, c in acc.items() if c > 0)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        counts = np.array([acc[k] for k in keys], dtype=np.int64)
        if doc_freq is None:
            doc_freq = np.zeros(n_topics, dtype=np.int64)
        return cls(n_topics, rows, cols, counts, np.asarray(doc_freq, dtype=np.int64))

    def __len__(self):
        return len(self.counts)

    def get(self, i, j):
        if i == j:
            return 0
        return self._map.get((min(i, j), max(i, j)), 0)

    def items(self):
        return self._map.items()

    def as_dict(self):
        return dict(self._map)

    def to_dense(self):
        m = np.zeros((self.n_topics, self.n_topics), dtype=np.int64)
        m[self.rows, self.cols] = self.counts
        m[self.cols, self.rows] = self.counts
        return m

    def merge(self, other):
        """Sum of two shard counts over the same topic set."""
        if self.n_topics != other.n_topics:
            raise ValueError("cannot merge counts over different topic sets")
        keys = np.concatenate([self.rows * self.n_topics + self.cols, other.rows * other.n_topics + other.cols])
        vals = np.concatenate([self.counts, other.counts])
        return _from_keys(self.n_topics, keys, vals, self.doc_freq + other.doc_freq)

    def __eq__(self, other):
        if not isinstance(other, CooccurrenceCounts):
            return NotImplemented
        return (
            self.n_topics == other.n_topics
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.doc_freq, other.doc_freq)
        )


def _from_keys(n_topics, keys, weights, doc_freq):
    if len(keys):
        uniq, inv = np.unique(keys, return_inverse=True)
        counts = np.bincount(inv, weights=weights).astype(np.int64)
    else:
        uniq = np.empty(0, dtype=np.int64)
        counts = np.empty(0, dtype=np.int64)
    return CooccurrenceCounts(
        n_topics, uniq // max(n_topics, 1), uniq % max(n_topics, 1), counts,
        np.asarray(doc_freq, dtype=np.int64),
    )


def count_cooccurrence(documents, topics, batch_size=20000):
    """Count, per topic pair, the documents whose title+abstract contain both.

    Also counts per-topic document frequency. A pair is counted at most once
    per document; overlapping matches (e.g. a bigram inside a matched
    trigram) all count.
    """
    n = len(topics)
    if n == 0:
        raise ValueError("topic set is empty")
    matcher = TopicMatcher(topics)
    doc_freq = np.zeros(n, dtype=np.int64)
    key_chunks = []
    indptr, ids = [0], []

    def flush():
        if len(indptr) > 1:
            keys = kernels.pair_keys(np.asarray(indptr, dtype=np.int64), np.asarray(ids, dtype=np.int64), n)
            if len(keys):
                uniq, cnt = np.unique(keys, return_counts=True)
                key_chunks.append((uniq, cnt))
        indptr[:] = [0]
        ids.clear()

    for doc in documents:
        found = sorted(matcher.find(normalize(doc.text)))
        doc_freq[found] += 1
        ids.extend(found)
        indptr.append(len(ids))
        if len(indptr) > batch_size:
            flush()
    flush()
    if key_chunks:
        keys = np.concatenate([k for k, _ in key_chunks])
        vals = np.concatenate([c for _, c in key_chunks])
    else:
        keys = vals = np.empty(0, dtype=np.int64)
    return _from_keys(n, keys, vals, doc_freq)


def extract_topics(documents, stopwords=None, prepositions=None, min_count=3):
    """Run extraction end to end; ``documents`` must be re-iterable."""
    stopwords = default_stopwords() if stopwords is None else stopwords
    prepositions = default_prepositions() if prepositions is None else prepositions
    titles = (normalize(doc.title) for doc in documents)
    cands = discount_counts(extract_ngrams(titles, stopwords, prepositions, min_count), min_count)
    topics = merge_candidates(cands)
    if len(topics) == 0:
        return topics, CooccurrenceCounts.from_pairs(0, {})
    counts = count_cooccurrence(documents, topics)
    return topics.with_doc_freq(counts.doc_freq), counts


def write_topics(path, topics):
    with open(path, "w", encoding="utf-8") as fh:
        for i, (t, df) in enumerate(zip(topics.topics, topics.doc_freq)):
            fh.write(f"{i}\t{t}\t{df}\n")


def read_topics(path):
    names, dfs = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or int(parts[0]) != len(names):
                raise ValueError(f"{path}:{lineno}: malformed topic line")
            names.append(parts[1])
            dfs.append(int(parts[2]))
    return TopicSet(tuple(names), tuple(dfs))


def write_counts(path, counts):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, c in zip(counts.rows, counts.cols, counts.counts):
            fh.write(f"{i}\t{j}\t{c}\n")


def read_counts(path, topics):
    pairs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: malformed count line")
            i, j, c = (int(x) for x in parts)
            if not i < j:
                raise ValueError(f"{path}:{lineno}: expected id_i < id_j")
            pairs[(i, j)] = c
    return CooccurrenceCounts.from_pairs(len(topics), pairs, np.asarray(topics.doc_freq, dtype=np.int64))
