"""Exact enumeration of bucket-tree shapes and weighted totals.

The total weight T_n sums w(T) times the number of valid labellings over
all shapes of size n.  For the three families T_n has a closed product
form, and for every model the sequence satisfies a coefficient recurrence:
writing T(z) = sum T_n z^n / n!, the b-th derivative of T equals phi(T),
i.e. T_{n+b} = n! [z^n] phi(T(z)) with T_k = psi_k for k < b.

Enumeration is exact and intended for desk-scale sizes; the guard exists
so a typo cannot ask for billions of shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .trees import BucketNode, BucketTree, count_labellings, tree_weight
from .weights import (BucketRecursive, DAryIncreasing, FamilySpec,
                      PlaneOriented, WeightModel, binom_frac)

DEFAULT_SIZE_LIMIT = 12


class EnumerationLimitError(RuntimeError):
    """The requested size exceeds the configured enumeration guard."""


def _check_limit(n: int, limit: int | None) -> None:
    bound = DEFAULT_SIZE_LIMIT if limit is None else limit
    if n > bound:
        raise EnumerationLimitError(
            f"size {n} exceeds the enumeration limit {bound}; "
            f"pass limit={n} to override")


@lru_cache(maxsize=None)
def _shape_nodes(b: int, n: int) -> tuple[BucketNode, ...]:
    if n < 1:
        return ()
    if n < b:
        return (BucketNode(n),)
    return tuple(BucketNode(b, (), forest) for forest in _forests(b, n - b))


@lru_cache(maxsize=None)
def _forests(b: int, total: int) -> tuple[tuple[BucketNode, ...], ...]:
    # Ordered forests of shapes with sizes summing to ``total``.
    if total == 0:
        return ((),)
    out: list[tuple[BucketNode, ...]] = []
    for first_size in range(1, total + 1):
        for first in _shape_nodes(b, first_size):
            for rest in _forests(b, total - first_size):
                out.append((first,) + rest)
    return tuple(out)


def enumerate_shapes(b: int, n: int, limit: int | None = None) -> list[BucketTree]:
    """All shapes of size n: capacities in [1, b], internal buckets full."""
    if b < 1 or n < 1:
        raise ValueError(f"b and n must be >= 1, got b={b}, n={n}")
    _check_limit(n, limit)
    return [BucketTree(node, b) for node in _shape_nodes(b, n)]


def shape_count(b: int, n: int, limit: int | None = None) -> int:
    return len(enumerate_shapes(b, n, limit))


def total_weight(model: WeightModel, n: int, limit: int | None = None) -> Fraction:
    """T_n: sum of tree weight times labelling count over all size-n shapes."""
    total = Fraction(0)
    for shape in enumerate_shapes(model.b, n, limit):
        w = tree_weight(shape, model)
        if w:
            total += w * count_labellings(shape)
    return total


def total_weights(model: WeightModel, n_max: int, limit: int | None = None) -> list[Fraction]:
    """[T_1, ..., T_{n_max}]."""
    return [total_weight(model, n, limit) for n in range(1, n_max + 1)]


def closed_form_total_weight(spec: FamilySpec, n: int) -> Fraction:
    """The product-form T_n of a family's canonical model."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    base = Fraction(math.factorial(n - 1))
    if isinstance(spec, BucketRecursive):
        return base
    if isinstance(spec, DAryIncreasing):
        e = spec.d - 1
        return base * e ** (n - 1) * binom_frac(n - 1 + 1 / e, n - 1)
    if isinstance(spec, PlaneOriented):
        e = spec.alpha + 1
        return base * e ** (n - 1) * binom_frac(n - 1 - 1 / e, n - 1)
    raise TypeError(f"unknown family {type(spec).__name__}")


@dataclass(frozen=True)
class OdeCheckReport:
    """Outcome of the coefficient-recurrence check.

    ``failure_kind`` is None on success, "initial" when some T_k with
    k < b differs from psi_k, or "coefficient" when the identity
    T_{n+b} = n! [z^n] phi(T) first fails (``failing_index`` is that n).
    """

    passed: bool
    checked_through: int
    failure_kind: str | None = None
    failing_index: int | None = None


def check_ode_recurrence(
    model: WeightModel,
    n_max: int,
    totals: list[Fraction] | None = None,
    limit: int | None = None,
) -> OdeCheckReport:
    """Verify the recurrence against enumerated (or supplied) totals."""
    b = model.b
    if totals is None:
        totals = total_weights(model, n_max, limit)
    if len(totals) != n_max:
        raise ValueError(f"expected {n_max} totals, got {len(totals)}")

    for k in range(1, min(b, n_max + 1)):
        if totals[k - 1] != model.psi[k - 1]:
            return OdeCheckReport(False, n_max, "initial", k)

    if n_max >= b:
        egf = [Fraction(0)] + [totals[m - 1] / math.factorial(m) for m in range(1, n_max + 1)]
        composed = model.phi.compose(egf, n_max - b)
        for m in range(n_max - b + 1):
            if totals[m + b - 1] != math.factorial(m) * composed[m]:
                return OdeCheckReport(False, n_max, "coefficient", m)

    return OdeCheckReport(True, n_max)
