"""Judgment metrics, gold-standard trees, parent matching and the HAC baseline."""

import itertools
import logging
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .corpus import normalize
from .extraction import TopicMatcher
from .taxonomy import Taxonomy

logger = logging.getLogger(__name__)

# pairs whose distances differ by less than this are treated as tied
HAC_TIE_TOL = 1e-12


class EvaluationError(ValueError):
    pass


# ------------------------------------------------------------------ judgments

@dataclass(frozen=True)
class Judgment:
    relevant: bool
    semantically_relevant: bool


class JudgmentSet:
    """Per (judge, topic) relevance labels."""

    def __init__(self, records=()):
        self._data = {}
        for judge, topic, rel, sem in records:
            self.add(judge, topic, rel, sem)

    def add(self, judge, topic, relevant, semantically_relevant):
        relevant, semantically_relevant = bool(relevant), bool(semantically_relevant)
        if semantically_relevant and not relevant:
            raise EvaluationError(
                f"judge {judge!r}: {topic!r} is semantically relevant but not relevant")
        key = (judge, topic)
        if key in self._data:
            raise EvaluationError(f"judge {judge!r} labelled {topic!r} twice")
        self._data[key] = Judgment(relevant, semantically_relevant)

    def judges(self):
        return sorted({j for j, _ in self._data})

    def topics(self, judge=None):
        return {t for j, t in self._data if judge is None or j == judge}

    def get(self, judge, topic):
        return self._data.get((judge, topic))

    def __len__(self):
        return len(self._data)


def read_judgments(path):
    """Lines ``judge<TAB>topic<TAB>relevant<TAB>semantically_relevant`` (0/1)."""
    js = JudgmentSet()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4 or parts[2] not in ("0", "1") or parts[3] not in ("0", "1"):
                raise EvaluationError(f"{path}:{lineno}: malformed judgment line")
            js.add(parts[0], parts[1], parts[2] == "1", parts[3] == "1")
    return js


def _scored_topics(taxonomy):
    return [t for t in taxonomy.topics() if t != taxonomy.root]


def _per_judge(judgments, taxonomy, field_name):
    nodes = _scored_topics(taxonomy)
    judged = judgments.topics()
    missing = sorted(t for t in nodes if t not in judged)
    if missing:
        raise EvaluationError("unjudged taxonomy nodes: " + ", ".join(missing))
    scores = {}
    for judge in judgments.judges():
        labels = [judgments.get(judge, t) for t in nodes]
        labels = [lab for lab in labels if lab is not None]
        if labels:
            scores[judge] = sum(getattr(lab, field_name) for lab in labels) / len(labels)
    return scores


def precision(judgments, taxonomy):
    """Fraction of relevant non-root topics, averaged over judges."""
    scores = _per_judge(judgments, taxonomy, "relevant")
    return float(np.mean(list(scores.values()))) if scores else 1.0


def semantic_precision(judgments, taxonomy):
    """Fraction of topics that are relevant and sit under a correct parent."""
    scores = _per_judge(judgments, taxonomy, "semantically_relevant")
    return float(np.mean(list(scores.values()))) if scores else 1.0


def agreement_and_kappa(judgments, judge_a, judge_b, field_name="relevant"):
    """Micro agreement and Cohen's kappa between two judges on one label."""
    ta, tb = judgments.topics(judge_a), judgments.topics(judge_b)
    if ta != tb:
        diff = sorted(ta ^ tb)
        raise EvaluationError(f"judges {judge_a!r} and {judge_b!r} cover different topics: {diff[:5]}")
    if not ta:
        raise EvaluationError("no shared judgments")
    topics = sorted(ta)
    a = np.array([getattr(judgments.get(judge_a, t), field_name) for t in topics], dtype=bool)
    b = np.array([getattr(judgments.get(judge_b, t), field_name) for t in topics], dtype=bool)
    p_o = float(np.mean(a == b))
    pa, pb = a.mean(), b.mean()
    p_e = float(pa * pb + (1 - pa) * (1 - pb))
    if p_e >= 1.0:
        # both judges used a single identical label throughout
        kappa = 1.0 if p_o == 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return {"agreement": p_o, "kappa": kappa}


def mean_pairwise_agreement(judgments, field_name="relevant"):
    pairs = list(itertools.combinations(judgments.judges(), 2))
    if not pairs:
        return None
    stats = [agreement_and_kappa(judgments, a, b, field_name) for a, b in pairs]
    return {"agreement": float(np.mean([s["agreement"] for s in stats])),
            "kappa": float(np.mean([s["kappa"] for s in stats]))}


def judgment_report(judgments, taxonomy):
    out = {"judges": len(judgments.judges()),
           "nodes": len(_scored_topics(taxonomy)),
           "precision": precision(judgments, taxonomy),
           "semantic_precision": semantic_precision(judgments, taxonomy)}
    for name in ("relevant", "semantically_relevant"):
        stats = mean_pairwise_agreement(judgments, name)
        if stats is not None:
            out[f"agreement_{name}"] = stats["agreement"]
            out[f"kappa_{name}"] = stats["kappa"]
    return out


# -------------------------------------------------------------- gold standard

def normalize_concept(name):
    """Lowercase, underscores to spaces, collapsed whitespace."""
    return re.sub(r"\s+", " ", name.replace("_", " ")).strip().lower()


def read_category_edges(path):
    """Lines ``parent<TAB>child<TAB>kind`` with kind ``category`` or ``page``."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[2] not in ("category", "page"):
                raise EvaluationError(f"{path}:{lineno}: malformed category edge")
            edges.append((parts[0], parts[1], parts[2]))
    return edges


def build_gold_standard(edges, root, candidates, max_depth=4):
    """Prune a category graph into a reference tree under ``root``.

    Breadth-first from the root with children visited in sorted order; a node
    reached through several parents keeps the first one. Nodes deeper than
    ``max_depth`` are cut, and a node survives only if it and every ancestor
    below the root are candidate topics.
    """
    children = defaultdict(set)
    nodes = set()
    for parent, child, _kind in edges:
        p, c = normalize_concept(parent), normalize_concept(child)
        if p != c:
            children[p].add(c)
        nodes.update((p, c))
    root = normalize_concept(root)
    if root not in nodes:
        raise EvaluationError(f"root {root!r} not found in the category edges")
    cand = {normalize_concept(t) for t in getattr(candidates, "topics", candidates)}

    # tree-ify first: breadth-first, first parent to reach a node keeps it
    parent = {root: None}
    order = [root]
    queue = deque([(root, 0)])
    while queue:
        node, depth = queue.popleft()
        if depth == max_depth:
            continue
        for child in sorted(children.get(node, ())):
            if child not in parent:
                parent[child] = node
                order.append(child)
                queue.append((child, depth + 1))

    # then prune; BFS order guarantees a parent is decided before its children
    gold = Taxonomy(root)
    for node in order[1:]:
        par = parent[node]
        if node in cand and par in gold:
            gold.add_child(gold.node_id(par), node)
    return gold


# ------------------------------------------------------------------- matching

@dataclass
class NodeScore:
    topic: str
    gold_parent: str
    taxonomy_parent: str | None
    exact: int
    partial: float
    p: int | None = None
    q: int | None = None


@dataclass
class MatchReport:
    relations: int
    placed: int
    exact: float
    partial: float
    exact_placed: float
    partial_placed: float
    nodes: list = field(default_factory=list)

    def to_text(self):
        lines = [f"relations\t{self.relations}",
                 f"placed\t{self.placed}",
                 f"exact\t{self.exact!r}",
                 f"partial\t{self.partial!r}",
                 f"exact_placed\t{self.exact_placed!r}",
                 f"partial_placed\t{self.partial_placed!r}"]
        for s in self.nodes:
            lines.append("node\t" + "\t".join([
                s.topic, s.gold_parent, s.taxonomy_parent or "-", str(s.exact), repr(s.partial),
                "-" if s.p is None else str(s.p), "-" if s.q is None else str(s.q)]))
        return "\n".join(lines) + "\n"


def _normalized_tree(tax):
    out = Taxonomy(normalize_concept(tax.root))
    for node in tax.nodes[1:]:
        out.add_child(node.parent, normalize_concept(node.topic))
    return out


def _partial_score(tpath, gpath):
    """Best 1/(p*q) over shared ancestors strictly between the root and the node."""
    tpos = {t: i for i, t in enumerate(tpath)}
    best = None
    for gi in range(len(gpath) - 2, 0, -1):
        ti = tpos.get(gpath[gi])
        if ti is None or ti == 0:
            continue
        p, q = len(tpath) - 1 - ti, len(gpath) - 1 - gi
        if best is None or (p * q, p) < (best[0] * best[1], best[0]):
            best = (p, q)
    return best


def match_report(taxonomy, gold):
    """Exact and partial parent agreement of ``taxonomy`` against ``gold``.

    Every non-root gold node is one relation. Exact: same immediate parent.
    Partial: 1/(p*q) where p and q are the taxonomy and gold distances from the
    node to its nearest shared intermediate ancestor (the root does not count),
    and 1 for an exact match. Missing nodes score 0 in both.
    """
    tax, ref = _normalized_tree(taxonomy), _normalized_tree(gold)
    if tax.root != ref.root:
        raise EvaluationError(f"roots differ: {tax.root!r} vs {ref.root!r}")
    scores = []
    for node in ref.nodes[1:]:
        c = node.topic
        gparent = ref.parent_of(c)
        if c not in tax:
            scores.append(NodeScore(c, gparent, None, 0, 0.0))
            continue
        tparent = tax.parent_of(c)
        if tparent == gparent:
            scores.append(NodeScore(c, gparent, tparent, 1, 1.0, 1, 1))
            continue
        best = _partial_score(tax.path(c), ref.path(c))
        if best is None:
            scores.append(NodeScore(c, gparent, tparent, 0, 0.0))
        else:
            p, q = best
            scores.append(NodeScore(c, gparent, tparent, 0, 1.0 / (p * q), p, q))
    n = len(scores)
    placed = [s for s in scores if s.taxonomy_parent is not None]

    def mean(values, count):
        return float(sum(values) / count) if count else 0.0

    return MatchReport(
        relations=n,
        placed=len(placed),
        exact=mean([s.exact for s in scores], n),
        partial=mean([s.partial for s in scores], n),
        exact_placed=mean([s.exact for s in placed], len(placed)),
        partial_placed=mean([s.partial for s in placed], len(placed)),
        nodes=scores,
    )


def exact_match(taxonomy, gold):
    return match_report(taxonomy, gold).exact


def partial_match(taxonomy, gold):
    return match_report(taxonomy, gold).partial


# ---------------------------------------------------------------- HAC baseline

def incidence_vectors(documents, topics, names):
    """Binary topic-by-document matrix for the topics in ``names`` (row order kept)."""
    documents = list(documents)
    matcher = TopicMatcher(topics)
    rows = {topics.id_of(t): r for r, t in enumerate(names)}
    data_r, data_c = [], []
    for d, doc in enumerate(documents):
        for tid in matcher.find(normalize(doc.text)):
            r = rows.get(tid)
            if r is not None:
                data_r.append(r)
                data_c.append(d)
    return sp.csr_matrix((np.ones(len(data_r)), (data_r, data_c)),
                         shape=(len(names), len(documents)))


def pearson(x, y, n=None):
    """Correlation of two vectors, optionally padded with zeros to length ``n``.

    Returns ``(r, degenerate)``; a constant vector gives ``(0.0, True)``.
    """
    n = len(x) if n is None else n
    sx, sy = x.sum(), y.sum()
    vx = x @ x - sx * sx / n
    vy = y @ y - sy * sy / n
    if vx <= 1e-12 * max(x @ x, 1e-300) or vy <= 1e-12 * max(y @ y, 1e-300):
        return 0.0, True
    return float((x @ y - sx * sy / n) / np.sqrt(vx * vy)), False


@dataclass
class HacResult:
    taxonomy: Taxonomy
    # (cluster a, cluster b, distance, new cluster id, label)
    merges: list
    degenerate: int


def hac_baseline(topics, vectors, root, strengths=None):
    """Centroid-linkage agglomerative clustering emitted as a taxonomy.

    Distance is 1 - Pearson correlation between cluster centroids; the
    closest pair merges first, ties (within ``HAC_TIE_TOL``) go to the lowest
    cluster-id pair. Clusters 0..n-1 are the input topics in order, merged
    clusters get the next free id. When a singleton merges, its topic labels
    the result; otherwise the label of the cluster with more total strength
    wins (then the smaller topic string). The losing label becomes a child of
    the winner, and the final label hangs under ``root``.
    """
    topics = list(topics)
    n = len(topics)
    if n < 2:
        raise EvaluationError("clustering needs at least two topics")
    if len(set(topics)) != n:
        raise EvaluationError("duplicate topics")
    X = vectors.toarray() if sp.issparse(vectors) else np.asarray(vectors, dtype=np.float64)
    X = X.astype(np.float64)
    if X.shape[0] != n:
        raise EvaluationError(f"{X.shape[0]} vectors for {n} topics")
    n_docs = X.shape[1]
    # documents containing none of the topics only enter through n_docs
    X = X[:, np.flatnonzero(np.any(X != 0, axis=0))]
    if strengths is None:
        strengths = X.sum(axis=1)
    strengths = np.asarray(strengths, dtype=np.float64)

    centroid = {i: X[i] for i in range(n)}
    size = {i: 1 for i in range(n)}
    label = {i: i for i in range(n)}
    weight = {i: float(strengths[i]) for i in range(n)}
    dist = {}
    degenerate = 0

    def distance(a, b):
        nonlocal degenerate
        r, flat = pearson(centroid[a], centroid[b], n_docs)
        degenerate += flat
        return 1.0 - r

    for a, b in itertools.combinations(range(n), 2):
        dist[a, b] = distance(a, b)

    parent = {}
    merges = []
    next_id = n
    while len(centroid) > 1:
        best = None
        for key in sorted(dist):
            d = dist[key]
            if best is None or d < dist[best] - HAC_TIE_TOL:
                best = key
        a, b = best
        if size[a] == 1 and size[b] != 1:
            win, lose = a, b
        elif size[b] == 1 and size[a] != 1:
            win, lose = b, a
        else:
            ka = (-weight[a], topics[label[a]])
            kb = (-weight[b], topics[label[b]])
            win, lose = (a, b) if ka <= kb else (b, a)
        parent[label[lose]] = label[win]
        c = next_id
        next_id += 1
        size[c] = size[a] + size[b]
        centroid[c] = (size[a] * centroid[a] + size[b] * centroid[b]) / size[c]
        weight[c] = weight[a] + weight[b]
        label[c] = label[win]
        merges.append((a, b, dist[best], c, topics[label[c]]))
        for x in (a, b):
            del centroid[x]
        dist = {k: v for k, v in dist.items() if a not in k and b not in k}
        for x in centroid:
            if x != c:
                dist[x, c] = distance(x, c)

    top = label[next(iter(centroid))]
    tax = Taxonomy(root)
    kids = defaultdict(list)
    for child, par in parent.items():
        kids[par].append(child)
    stack = [(0, top)]
    while stack:
        pid, t = stack.pop()
        nid = tax.add_child(pid, topics[t])
        for ch in sorted(kids[t], key=lambda i: topics[i], reverse=True):
            stack.append((nid, ch))
    if degenerate:
        logger.warning("%d centroid pairs had zero variance; correlation taken as 0", degenerate)
    tax.meta = {"degenerate_pairs": degenerate, "label_rule": "strength"}
    return HacResult(tax, merges, degenerate)
