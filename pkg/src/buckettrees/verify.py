"""Checkers for the structural characterization of grown weight models.

A weight model arises from a growth rule exactly when a balance condition
holds: a certain weighted sum of weight ratios over the buckets of a tree
depends only on the tree's size.  Equivalent symptoms checked here:

* ``check_balance``   - the per-tree balance sum is constant at each size;
* ``check_affine_ratio`` - consecutive totals have affine ratios
  T_{n+1}/T_n = c1*n + c2;
* ``check_scaling``   - rescaled weights leave tree probabilities alone;
* ``classify_family`` - recover which growth rule (if any) produced the
  model, up to rescaling.

Classification works on ratio sequences: with gamma_k = psi_1 (k+1)
phi_{k+1}/phi_k and beta_k = psi_{k+1}/psi_k (psi_b := phi_0), a grown
model has gamma affine in k and beta pinned to the same line.  The sign of
gamma_1 - gamma_0 separates the three families, and the line's parameters
return d or alpha exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .enumeration import enumerate_shapes, total_weights
from .trees import (BucketTree, count_labellings, encode_tree, node_profile,
                    tree_weight)
from .weights import (BucketRecursive, DAryIncreasing, FamilySpec,
                      PlaneOriented, RationalLike, WeightModel)


class UndefinedRatioError(ValueError):
    """A weight ratio in the balance sum has a zero denominator."""


class DegenerateFamilyError(ValueError):
    """Only chain trees carry weight; no branching family fits."""


def balance_value(tree: BucketTree, model: WeightModel) -> Fraction:
    """The balance sum of one tree.

    Unsaturated buckets of capacity k contribute psi_{k+1}/psi_k, saturated
    buckets of degree k contribute (k+1) psi_1 phi_{k+1}/phi_k; psi_b is
    read as phi_0.  For models produced by a growth rule this equals the
    total attachment weight, hence is the same for every tree of a size.
    """
    unsaturated, saturated = node_profile(tree)
    value = Fraction(0)
    for k, count in unsaturated.items():
        denom = model.psi_extended(k)
        if denom == 0:
            raise UndefinedRatioError(f"psi_{k} = 0 but a capacity-{k} bucket is present")
        value += count * (model.psi_extended(k + 1) / denom)
    psi1 = model.psi1
    for k, count in saturated.items():
        denom = model.phi.coeff(k)
        if denom == 0:
            raise UndefinedRatioError(f"phi_{k} = 0 but a degree-{k} bucket is present")
        value += count * (k + 1) * psi1 * (model.phi.coeff(k + 1) / denom)
    return value


@dataclass(frozen=True)
class BalanceReport:
    size: int
    values: dict[bytes, Fraction]
    constant: Fraction | None
    passed: bool


def check_balance(model: WeightModel, n: int, limit: int | None = None) -> BalanceReport:
    """Balance sums of every positive-weight shape of size n.

    Zero-weight shapes are outside the model's support and are skipped;
    their ratios may be undefined without meaning anything.
    """
    values: dict[bytes, Fraction] = {}
    for shape in enumerate_shapes(model.b, n, limit):
        if tree_weight(shape, model) == 0:
            continue
        values[encode_tree(shape)] = balance_value(shape, model)
    distinct = set(values.values())
    constant = distinct.pop() if len(distinct) == 1 else None
    return BalanceReport(n, values, constant, len(set(values.values())) <= 1)


@dataclass(frozen=True)
class AffineRatioReport:
    passed: bool
    c1: Fraction
    c2: Fraction
    first_failing_n: int | None


def check_affine_ratio(model: WeightModel, n_max: int, limit: int | None = None) -> AffineRatioReport:
    """Fit c1, c2 from the first two total ratios, then verify through n_max.

    When the check passes, c1 >= 0 and c2 > -c1 follow (ratios of positive
    totals are positive and nondecreasing steps keep the line valid).
    """
    if n_max < 3:
        raise ValueError(f"n_max must be >= 3 to fit and test, got {n_max}")
    totals = total_weights(model, n_max + 1, limit)
    for n, t in enumerate(totals, start=1):
        if t == 0:
            raise ValueError(f"T_{n} = 0: ratios are undefined for this model")
    ratios = [totals[n] / totals[n - 1] for n in range(1, n_max + 1)]  # ratios[i] = T_{i+2}/T_{i+1}
    r1, r2 = ratios[0], ratios[1]
    c1 = r2 - r1
    c2 = 2 * r1 - r2
    for n in range(1, n_max + 1):
        if totals[n] / totals[n - 1] != c1 * n + c2:
            return AffineRatioReport(False, c1, c2, n)
    return AffineRatioReport(True, c1, c2, None)


@dataclass(frozen=True)
class ScalingReport:
    passed: bool
    size: int
    first_mismatch: bytes | None


def check_scaling(
    model: WeightModel,
    a: RationalLike,
    s: RationalLike,
    n: int,
    limit: int | None = None,
) -> ScalingReport:
    """Compare normalized tree probabilities before and after rescaling.

    The joint rescaling psi_k -> a^k s^-1 psi_k, phi_k -> a^b s^{k-1} phi_k
    multiplies every size-n weight by a^n / s, so w(T)/T_n must match tree
    by tree.  Rescaling only half of the weights breaks the coupling.
    """
    scaled = model.scaled(a, s)
    shapes = enumerate_shapes(model.b, n, limit)
    base_weights = [tree_weight(t, model) for t in shapes]
    scaled_weights = [tree_weight(t, scaled) for t in shapes]
    base_total = sum(w * count_labellings(t) for w, t in zip(base_weights, shapes))
    scaled_total = sum(w * count_labellings(t) for w, t in zip(scaled_weights, shapes))
    if base_total == 0 or scaled_total == 0:
        raise ValueError(f"T_{n} = 0: probabilities are undefined")
    for shape, w0, w1 in zip(shapes, base_weights, scaled_weights):
        if w0 / base_total != w1 / scaled_total:
            return ScalingReport(False, n, encode_tree(shape))
    return ScalingReport(True, n, None)


@dataclass(frozen=True)
class NotGrown:
    """Evidence that no growth rule produces this model."""

    reason: str


def classify_family(model: WeightModel, probe: int = 8) -> FamilySpec | NotGrown:
    """Recover the growth rule behind a model, up to rescaling.

    Checks the ratio lines through degree ``probe`` (further degrees are
    either pinned by a closed-form rule or truncated by finite support).
    Returns the family with exact parameters, or NotGrown with a reason.
    Raises DegenerateFamilyError if only chains carry weight; the model
    constructor normally rejects those before this point.
    """
    if probe < 2:
        raise ValueError(f"probe must be >= 2, got {probe}")
    b = model.b
    for k in range(1, b):
        if model.psi[k - 1] == 0:
            return NotGrown(f"psi_{k} = 0: capacity-{k} buckets are unreachable")

    bound = model.phi.support_bound()
    if bound is not None and bound < 2:
        raise DegenerateFamilyError(
            "no degree weight with k >= 2 is positive; only chains carry weight")

    horizon = probe if bound is None else bound
    phi = model.phi_coefficients(horizon + 1)
    for k in range(horizon + 1):
        if phi[k] == 0:
            return NotGrown(
                f"phi_{k} = 0 while phi_{horizon} > 0: gap in the degree weights")

    psi1 = model.psi1
    gamma = [psi1 * (k + 1) * phi[k + 1] / phi[k] for k in range(horizon + 1)]
    g0, g1 = gamma[0], gamma[1]
    slope = g1 - g0
    for k in range(2, horizon + 1):
        if gamma[k] != k * slope + g0:
            return NotGrown(
                f"degree-weight ratios leave the affine line at k={k}")

    for k in range(1, b):
        beta_k = model.psi_extended(k + 1) / model.psi[k - 1]
        if beta_k != Fraction(k, b) * g1 + g0 - g1:
            return NotGrown(
                f"bucket-weight ratio at k={k} is off the line fixed by the degree weights")

    if slope == 0:
        return BucketRecursive(b)
    if slope < 0:
        # The line hits zero at the support bound: finite maximal degree.
        max_degree = g0 / (g0 - g1)
        if max_degree.denominator != 1 or bound is None or max_degree != bound:
            return NotGrown(
                f"degree weights end at {bound} but the ratio line ends at {max_degree}")
        d = 1 + Fraction(int(max_degree) - 1, b)
        return DAryIncreasing(b, d)
    alpha = (g0 + slope) / (b * slope) - 1
    if alpha <= 0:
        return NotGrown(f"recovered alpha = {alpha} is not positive")
    return PlaneOriented(b, alpha)
