"""Rooted, labeled topic trees and their JSON / DOT serializations."""

import json
from dataclasses import dataclass, field


class TaxonomyError(ValueError):
    pass


@dataclass
class Node:
    topic: str
    parent: int | None
    depth: int
    children: list = field(default_factory=list)


class Taxonomy:
    """A tree of distinct topic strings; node 0 is the root (the query)."""

    def __init__(self, root):
        if not isinstance(root, str) or not root:
            raise TaxonomyError("root topic must be a nonempty string")
        self.nodes = [Node(root, None, 0)]
        self._index = {root: 0}
        self.meta = {}

    @property
    def root(self):
        return self.nodes[0].topic

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, topic):
        return topic in self._index

    def add_child(self, parent, topic):
        """Attach ``topic`` under node id ``parent``; returns the new node id."""
        if topic in self._index:
            raise TaxonomyError(f"duplicate topic {topic!r}")
        if not isinstance(topic, str) or not topic:
            raise TaxonomyError("topic must be a nonempty string")
        pnode = self.nodes[parent]
        nid = len(self.nodes)
        self.nodes.append(Node(topic, parent, pnode.depth + 1))
        pnode.children.append(nid)
        self._index[topic] = nid
        return nid

    def node_id(self, topic):
        return self._index[topic]

    def topics(self):
        return [n.topic for n in self.nodes]

    def parent_of(self, topic):
        p = self.nodes[self._index[topic]].parent
        return None if p is None else self.nodes[p].topic

    def children_of(self, topic):
        return [self.nodes[c].topic for c in self.nodes[self._index[topic]].children]

    def depth_of(self, topic):
        return self.nodes[self._index[topic]].depth

    def path(self, topic):
        """Topics from the root down to ``topic`` inclusive."""
        nid = self._index[topic]
        out = []
        while nid is not None:
            out.append(self.nodes[nid].topic)
            nid = self.nodes[nid].parent
        return out[::-1]

    def parent_map(self):
        return {n.topic: (None if n.parent is None else self.nodes[n.parent].topic) for n in self.nodes}

    def subtree_sizes(self):
        sizes = [1] * len(self.nodes)
        # children always have larger ids than their parent
        for nid in range(len(self.nodes) - 1, 0, -1):
            sizes[self.nodes[nid].parent] += sizes[nid]
        return sizes

    def depth(self):
        return max(n.depth for n in self.nodes)

    def __eq__(self, other):
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self.parent_map() == other.parent_map() and self.root == other.root

    def __repr__(self):
        return f"Taxonomy(root={self.root!r}, nodes={len(self)})"


def _ordered_children(tax, nid, sizes):
    kids = tax.nodes[nid].children
    return sorted(kids, key=lambda c: (-sizes[c], tax.nodes[c].topic))


def to_dict(tax):
    sizes = tax.subtree_sizes()

    def build(nid):
        return {"topic": tax.nodes[nid].topic,
                "children": [build(c) for c in _ordered_children(tax, nid, sizes)]}

    return build(0)


def to_json(tax, indent=2):
    """Nested ``{"topic": ..., "children": [...]}``; children by subtree size
    (largest first), then topic string."""
    return json.dumps(to_dict(tax), ensure_ascii=False, indent=indent) + "\n"


def from_dict(obj):
    def check(node):
        if not isinstance(node, dict):
            raise TaxonomyError(f"taxonomy node must be an object, got {type(node).__name__}")
        topic, children = node.get("topic"), node.get("children", [])
        if not isinstance(topic, str) or not topic:
            raise TaxonomyError("taxonomy node needs a nonempty string 'topic'")
        if not isinstance(children, list):
            raise TaxonomyError(f"'children' of {topic!r} must be a list")
        return topic, children

    root_topic, root_children = check(obj)
    tax = Taxonomy(root_topic)
    stack = [(0, root_children)]
    while stack:
        parent, children = stack.pop()
        for child in children:
            topic, grand = check(child)
            stack.append((tax.add_child(parent, topic), grand))
    return tax


def from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"malformed taxonomy JSON: {exc}") from exc
    return from_dict(obj)


def _dot_quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(tax, name="taxonomy"):
    sizes = tax.subtree_sizes()
    order, stack = [], [0]
    while stack:
        nid = stack.pop()
        order.append(nid)
        stack.extend(reversed(_ordered_children(tax, nid, sizes)))
    ident = {nid: f"n{i}" for i, nid in enumerate(order)}
    lines = [f"digraph {_dot_quote(name)} {{"]
    for nid in order:
        lines.append(f"  {ident[nid]} [label={_dot_quote(tax.nodes[nid].topic)}];")
    for nid in order:
        for c in _ordered_children(tax, nid, sizes):
            lines.append(f"  {ident[nid]} -> {ident[c]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_taxonomy(path):
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


def write_taxonomy(path, tax):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(tax))
