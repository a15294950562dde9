"""Tree evolution: one label arrives per step.

Label n+1 either fills an unsaturated bucket or starts a new child bucket
under a saturated one.  The target node is chosen with probability
proportional to its attachment weight; for a saturated target the
insertion slot among the degree+1 gaps is uniform.  Sampling is exact:
the rational weights are cleared to integers and a uniform integer below
their sum is drawn.

``exact_distribution`` computes the full law of the process at a given
size by dynamic programming over canonical encodings, so sampled and
theoretical distributions can be compared without estimation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .enumeration import DEFAULT_SIZE_LIMIT, EnumerationLimitError
from .rng import SplitMix64
from .trees import (BucketNode, BucketTree, InvalidTreeError, decode_tree,
                    encode_tree, single_bucket_tree)
from .weights import FamilySpec


@dataclass(frozen=True)
class GrowthEvent:
    """Where the next label goes.

    ``node`` is a preorder index; ``slot`` is the insertion position among
    the children of a saturated target and None when the label joins the
    bucket itself; ``new_capacity`` is the size of the receiving bucket
    afterwards.
    """

    node: int
    slot: int | None
    new_capacity: int


def _scan(tree: BucketTree) -> list[tuple[int, BucketNode]]:
    return list(enumerate(tree.preorder()))


def attachment_probability(tree: BucketTree, node_index: int, spec: FamilySpec) -> Fraction:
    """Probability that the next label attaches at the given node."""
    if tree.max_bucket != spec.b:
        raise InvalidTreeError(f"tree has b={tree.max_bucket}, family has b={spec.b}")
    nodes = _scan(tree)
    if not 0 <= node_index < len(nodes):
        raise ValueError(f"node index {node_index} out of range")
    _, node = nodes[node_index]
    w = spec.attachment_weight(node.capacity, len(node.children))
    if w < 0:
        raise AssertionError(f"negative attachment weight at node {node_index}")
    return w / spec.connectivity(tree.size)


def growth_options(tree: BucketTree, spec: FamilySpec) -> list[tuple[GrowthEvent, Fraction]]:
    """All positive-probability events with their exact probabilities."""
    if tree.max_bucket != spec.b:
        raise InvalidTreeError(f"tree has b={tree.max_bucket}, family has b={spec.b}")
    normalizer = spec.connectivity(tree.size)
    options: list[tuple[GrowthEvent, Fraction]] = []
    for index, node in _scan(tree):
        weight = spec.attachment_weight(node.capacity, len(node.children))
        if weight <= 0:
            continue
        if node.capacity < spec.b:
            options.append((GrowthEvent(index, None, node.capacity + 1), weight / normalizer))
        else:
            degree = len(node.children)
            share = weight / normalizer / (degree + 1)
            for slot in range(degree + 1):
                options.append((GrowthEvent(index, slot, 1), share))
    return options


def apply_growth(tree: BucketTree, event: GrowthEvent, label: int) -> BucketTree:
    """Insert ``label`` according to ``event``; returns the grown tree."""
    counter = [0]
    hit = [False]

    def rebuild(node: BucketNode) -> BucketNode:
        index = counter[0]
        counter[0] += 1
        kids = [rebuild(child) for child in node.children]
        if index == event.node:
            hit[0] = True
            if event.slot is None:
                if node.capacity >= tree.max_bucket:
                    raise InvalidTreeError("cannot add a label to a saturated bucket")
                return BucketNode(node.capacity + 1, node.labels + (label,), tuple(kids))
            if node.capacity < tree.max_bucket:
                raise InvalidTreeError("cannot attach a child to an unsaturated bucket")
            if not 0 <= event.slot <= len(kids):
                raise ValueError(f"slot {event.slot} out of range")
            kids.insert(event.slot, BucketNode(1, (label,), ()))
        return BucketNode(node.capacity, node.labels, tuple(kids))

    root = rebuild(tree.root)
    if not hit[0]:
        raise ValueError(f"node index {event.node} out of range")
    return BucketTree(root, tree.max_bucket)


def grow_step(tree: BucketTree, spec: FamilySpec, rng: SplitMix64) -> BucketTree:
    """One exact step of the growth process."""
    if tree.max_bucket != spec.b:
        raise InvalidTreeError(f"tree has b={tree.max_bucket}, family has b={spec.b}")
    n = tree.size
    scale = spec.weight_scale()
    nodes = _scan(tree)
    weights = []
    for _, node in nodes:
        w = spec.attachment_weight(node.capacity, len(node.children)) * scale
        if w.denominator != 1 or w < 0:
            raise AssertionError(f"bad scaled weight {w}")
        weights.append(int(w))
    total = spec.connectivity(n) * scale
    assert total == sum(weights), "attachment weights must sum to the normalizer"
    pick = rng.randbelow(int(total))
    acc = 0
    for (index, node), w in zip(nodes, weights):
        acc += w
        if pick < acc:
            if node.capacity < spec.b:
                event = GrowthEvent(index, None, node.capacity + 1)
            else:
                slot = rng.randbelow(len(node.children) + 1)
                event = GrowthEvent(index, slot, 1)
            return apply_growth(tree, event, n + 1)
    raise AssertionError("unreachable: no node selected")


def sample_tree(spec: FamilySpec, n: int, rng: SplitMix64) -> BucketTree:
    """Grow a labelled tree of size n from a single label."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tree = single_bucket_tree(spec.b)
    for _ in range(n - 1):
        tree = grow_step(tree, spec, rng)
    return tree


# ── exact law of the process ──────────────────────────────────────────────

@dataclass(frozen=True)
class TreeDistribution:
    """Probability law over labelled trees of one size, keyed by encoding."""

    max_bucket: int
    size: int
    probs: Mapping[bytes, Fraction]

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def decode(self, key: bytes) -> BucketTree:
        return decode_tree(key, self.max_bucket)

    def validate(self) -> None:
        if self.total() != 1:
            raise ValueError(f"probabilities sum to {self.total()}, not 1")
        for key in self.probs:
            tree = self.decode(key)
            if tree.size != self.size or not tree.is_labelled():
                raise ValueError(f"bad support element {key!r}")


@lru_cache(maxsize=None)
def _exact_distribution(spec: FamilySpec, n: int) -> TreeDistribution:
    if n == 1:
        start = single_bucket_tree(spec.b)
        return TreeDistribution(spec.b, 1, {encode_tree(start): Fraction(1)})
    previous = _exact_distribution(spec, n - 1)
    acc: dict[bytes, Fraction] = {}
    for key, prob in previous.probs.items():
        tree = previous.decode(key)
        for event, p in growth_options(tree, spec):
            grown = encode_tree(apply_growth(tree, event, n))
            acc[grown] = acc.get(grown, Fraction(0)) + prob * p
    return TreeDistribution(spec.b, n, acc)


def exact_distribution(spec: FamilySpec, n: int, limit: int | None = None) -> TreeDistribution:
    """Law of the size-n tree under the growth process (cached)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    bound = DEFAULT_SIZE_LIMIT if limit is None else limit
    if n > bound:
        raise EnumerationLimitError(
            f"size {n} exceeds the distribution limit {bound}; "
            f"pass limit={n} to override")
    return _exact_distribution(spec, n)


# ── label removal ─────────────────────────────────────────────────────────

def strip_labels(tree: BucketTree, j: int) -> BucketTree:
    """Remove the labels above j; emptied buckets disappear.

    Growing to size n and keeping labels 1..j reproduces the size-j law:
    labels above j only ever occupy buckets that vanish entirely or sit at
    the tail of a surviving bucket, so removal never orphans a child.
    """
    if not tree.is_labelled():
        raise InvalidTreeError("strip_labels requires a labelled tree")
    if not 1 <= j <= tree.size:
        raise ValueError(f"j={j} outside 1..{tree.size}")

    def keep(node: BucketNode) -> BucketNode | None:
        labels = tuple(x for x in node.labels if x <= j)
        if not labels:
            return None
        kids = tuple(k for k in (keep(child) for child in node.children) if k is not None)
        if kids and len(labels) < len(node.labels):
            raise AssertionError("a bucket kept children while losing labels")
        return BucketNode(len(labels), labels, kids)

    root = keep(tree.root)
    assert root is not None, "j >= 1 keeps the root"
    return BucketTree(root, tree.max_bucket)


def pushforward_strip(dist: TreeDistribution, j: int) -> TreeDistribution:
    """Image of a tree law under strip_labels(., j)."""
    acc: dict[bytes, Fraction] = {}
    for key, prob in dist.probs.items():
        smaller = encode_tree(strip_labels(dist.decode(key), j))
        acc[smaller] = acc.get(smaller, Fraction(0)) + prob
    return TreeDistribution(dist.max_bucket, j, acc)
