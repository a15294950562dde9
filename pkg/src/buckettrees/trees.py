"""Bucket trees: rooted ordered trees whose nodes hold buckets of labels.

A bucket has capacity between 1 and ``b``; only full (saturated) buckets
may have children.  A labelled tree stores the labels ``1..n`` so that
labels increase within each bucket and along every root-to-leaf path.
Shape-only trees carry capacities but no labels.

Trees are immutable; operations build new trees.  The canonical byte
encoding is deterministic JSON and doubles as the external representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .weights import WeightModel


class InvalidTreeError(ValueError):
    """The structure or labelling violates a bucket-tree invariant."""


class EncodingError(ValueError):
    """The byte string is not a canonical tree encoding."""


@dataclass(frozen=True)
class BucketNode:
    capacity: int
    labels: tuple[int, ...] = ()
    children: tuple["BucketNode", ...] = ()


def bucket(labels: tuple[int, ...] | list[int], children: tuple[BucketNode, ...] = ()) -> BucketNode:
    """Labelled node; capacity is the number of labels."""
    labels = tuple(labels)
    return BucketNode(len(labels), labels, tuple(children))


def shape_bucket(capacity: int, children: tuple[BucketNode, ...] = ()) -> BucketNode:
    """Shape-only node."""
    return BucketNode(capacity, (), tuple(children))


@dataclass(frozen=True)
class BucketTree:
    """A bucket tree together with its bucket-capacity bound ``b``."""

    root: BucketNode
    max_bucket: int

    @property
    def size(self) -> int:
        """Total number of labels (sum of capacities)."""
        return sum(node.capacity for node in self.preorder())

    def preorder(self) -> Iterator[BucketNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def node_count(self) -> int:
        return sum(1 for _ in self.preorder())

    def is_labelled(self) -> bool:
        return bool(self.root.labels)

    def shape(self) -> BucketTree:
        """Forget the labels, keep capacities and child order."""

        def strip(node: BucketNode) -> BucketNode:
            return BucketNode(node.capacity, (), tuple(strip(c) for c in node.children))

        return BucketTree(strip(self.root), self.max_bucket)

    def validate(self) -> None:
        """Raise InvalidTreeError unless all structural invariants hold."""
        b = self.max_bucket
        if b < 1:
            raise InvalidTreeError(f"bucket capacity bound must be >= 1, got {b}")
        labelled_any = False
        shape_any = False
        all_labels: list[int] = []

        def walk(node: BucketNode, parent_max: int) -> None:
            nonlocal labelled_any, shape_any
            if not 1 <= node.capacity <= b:
                raise InvalidTreeError(f"capacity {node.capacity} outside [1, {b}]")
            if node.children and node.capacity != b:
                raise InvalidTreeError("only saturated buckets may have children")
            if node.labels:
                labelled_any = True
                if len(node.labels) != node.capacity:
                    raise InvalidTreeError("capacity must equal the number of labels")
                if any(x >= y for x, y in zip(node.labels, node.labels[1:])):
                    raise InvalidTreeError(f"labels within a bucket must increase: {node.labels}")
                if node.labels[0] <= parent_max:
                    raise InvalidTreeError("child labels must exceed all parent labels")
                all_labels.extend(node.labels)
                child_floor = node.labels[-1]
            else:
                shape_any = True
                child_floor = parent_max
            for child in node.children:
                walk(child, child_floor)

        walk(self.root, 0)
        if labelled_any and shape_any:
            raise InvalidTreeError("tree mixes labelled and shape-only buckets")
        if labelled_any and sorted(all_labels) != list(range(1, len(all_labels) + 1)):
            raise InvalidTreeError(f"labels must be exactly 1..n, got {sorted(all_labels)}")


def single_bucket_tree(max_bucket: int, label: int = 1) -> BucketTree:
    """The size-1 tree: one bucket holding one label."""
    return BucketTree(BucketNode(1, (label,), ()), max_bucket)


# ── canonical encoding ────────────────────────────────────────────────────

def _node_to_obj(node: BucketNode) -> dict:
    if node.labels:
        return {"labels": list(node.labels), "children": [_node_to_obj(c) for c in node.children]}
    return {"capacity": node.capacity, "children": [_node_to_obj(c) for c in node.children]}


def _node_from_obj(obj: object) -> BucketNode:
    if not isinstance(obj, dict):
        raise EncodingError(f"expected object, got {type(obj).__name__}")
    keys = set(obj)
    if keys == {"labels", "children"}:
        labels = obj["labels"]
        if not isinstance(labels, list) or not all(isinstance(x, int) for x in labels):
            raise EncodingError("labels must be a list of integers")
        capacity = len(labels)
    elif keys == {"capacity", "children"}:
        capacity = obj["capacity"]
        if not isinstance(capacity, int):
            raise EncodingError("capacity must be an integer")
        labels = []
    else:
        raise EncodingError(f"unexpected keys {sorted(keys)}")
    children = obj["children"]
    if not isinstance(children, list):
        raise EncodingError("children must be a list")
    return BucketNode(capacity, tuple(labels), tuple(_node_from_obj(c) for c in children))


def encode_tree(tree: BucketTree) -> bytes:
    """Deterministic byte encoding; injective for fixed ``max_bucket``."""
    obj = _node_to_obj(tree.root)
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("ascii")


def decode_tree(data: bytes, max_bucket: int) -> BucketTree:
    """Inverse of encode_tree; validates the result."""
    try:
        obj = json.loads(data.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise EncodingError(f"not a canonical encoding: {exc}") from exc
    tree = BucketTree(_node_from_obj(obj), max_bucket)
    try:
        tree.validate()
    except InvalidTreeError as exc:
        raise EncodingError(f"decoded tree is invalid: {exc}") from exc
    return tree


# ── weights and labelling counts ──────────────────────────────────────────

def tree_weight(tree: BucketTree, model: "WeightModel") -> Fraction:
    """Product over nodes: saturated buckets contribute the degree weight
    for their child count, unsaturated leaves the bucket weight for their
    capacity."""
    if tree.max_bucket != model.b:
        raise InvalidTreeError(
            f"tree built for b={tree.max_bucket} but model has b={model.b}")
    w = Fraction(1)
    for node in tree.preorder():
        if node.capacity == model.b:
            w *= model.phi.coeff(len(node.children))
        else:
            w *= model.psi[node.capacity - 1]
        if w == 0:
            return Fraction(0)
    return w


def count_labellings(tree: BucketTree) -> int:
    """Number of valid label assignments for the shape of ``tree``.

    Equals n! divided by the product, over nodes, of the falling factorial
    of the subtree label count taken capacity many steps.
    """
    denominator = 1

    def walk(node: BucketNode) -> int:
        nonlocal denominator
        size = node.capacity + sum(walk(c) for c in node.children)
        denominator *= math.perm(size, node.capacity)
        return size

    n = walk(tree.root)
    count, remainder = divmod(math.factorial(n), denominator)
    if remainder:
        raise AssertionError("labelling count must be an integer")
    return count


def node_profile(tree: BucketTree) -> tuple[dict[int, int], dict[int, int]]:
    """Counts (unsaturated buckets by capacity, saturated buckets by degree)."""
    unsaturated: dict[int, int] = {}
    saturated: dict[int, int] = {}
    for node in tree.preorder():
        if node.capacity == tree.max_bucket:
            k = len(node.children)
            saturated[k] = saturated.get(k, 0) + 1
        else:
            c = node.capacity
            unsaturated[c] = unsaturated.get(c, 0) + 1
    return unsaturated, saturated


# ── label queries ─────────────────────────────────────────────────────────

def _locate(node: BucketNode, label: int) -> BucketNode | None:
    if label in node.labels:
        return node
    for child in node.children:
        found = _locate(child, label)
        if found is not None:
            return found
    return None


def subtree_of_label(tree: BucketTree, label: int) -> BucketNode:
    """The node whose bucket holds ``label`` (root of its subtree)."""
    node = _locate(tree.root, label)
    if node is None:
        raise ValueError(f"label {label} not present")
    return node


def insertion_load(tree: BucketTree, label: int) -> int:
    """Number of labels <= label in label's bucket.

    This is the size the bucket had at the moment the label arrived, and it
    is the same in every larger tree of the growth process.
    """
    node = subtree_of_label(tree, label)
    return sum(1 for x in node.labels if x <= label)


def count_descendants(tree: BucketTree, label: int) -> int:
    """Number of labels >= label in the subtree rooted at label's bucket."""
    node = subtree_of_label(tree, label)
    total = 0
    stack = [node]
    while stack:
        cur = stack.pop()
        total += sum(1 for x in cur.labels if x >= label)
        stack.extend(cur.children)
    return total
