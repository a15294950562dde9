"""Weight models and the three grown families.

A weight model assigns a non-negative rational to every tree: saturated
buckets contribute a degree weight phi_k (k = child count), unsaturated
leaves a bucket weight psi_c (c = capacity).  Degree weights come either
as an explicit list or as one of two closed-form rules (exponential and
power of a binomial) whose series expansions are computed exactly.

The families are parameter sets for the growth process; ``weights_of``
produces their canonical weight model with psi_1 = 1.
"""

from __future__ import annotations

import abc
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

RationalLike = Union[int, str, Fraction]


class InvalidWeightsError(ValueError):
    """The weight data violates a model invariant."""


def to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise InvalidWeightsError(f"floats are not exact: {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidWeightsError(f"not a rational: {value!r}") from exc


def binom_frac(x: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient with rational upper argument."""
    if k < 0:
        return Fraction(0)
    num = Fraction(1)
    for i in range(k):
        num *= x - i
    return num / math.factorial(k)


def _mul_trunc(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


# ── degree-weight rules ───────────────────────────────────────────────────

class DegreeWeights(abc.ABC):
    """Sequence phi_0, phi_1, ... of non-negative degree weights."""

    @abc.abstractmethod
    def coeff(self, k: int) -> Fraction:
        """phi_k."""

    @abc.abstractmethod
    def compose(self, series: Sequence[Fraction], order: int) -> list[Fraction]:
        """Coefficients of phi(S(z)) through z^order, for S with S(0) = 0."""

    @abc.abstractmethod
    def scaled(self, factor: Fraction, stretch: Fraction) -> "DegreeWeights":
        """The rule with phi_k replaced by factor * stretch^k * phi_k."""

    @abc.abstractmethod
    def support_bound(self) -> int | None:
        """Largest k with phi_k nonzero, or None when infinitely many are."""

    @abc.abstractmethod
    def describe(self) -> dict:
        """JSON-friendly description for reports."""

    def is_degenerate(self) -> bool:
        bound = self.support_bound()
        return bound is not None and bound < 2


def _check_series_start(series: Sequence[Fraction]) -> None:
    if series and series[0] != 0:
        raise ValueError("composition requires a series with zero constant term")


@dataclass(frozen=True)
class ExplicitDegreeWeights(DegreeWeights):
    """Finite list of degree weights; all higher ones are zero."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(to_fraction(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)
        if not coeffs:
            raise InvalidWeightsError("at least one degree weight is required")
        if any(c < 0 for c in coeffs):
            raise InvalidWeightsError("degree weights must be non-negative")
        if coeffs[0] <= 0:
            raise InvalidWeightsError("the degree-0 weight must be positive")

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return Fraction(0)

    def compose(self, series: Sequence[Fraction], order: int) -> list[Fraction]:
        _check_series_start(series)
        acc = [self.coefficients[-1]] + [Fraction(0)] * order
        for c in reversed(self.coefficients[:-1]):
            acc = _mul_trunc(acc, series, order)
            acc[0] += c
        return acc

    def scaled(self, factor: Fraction, stretch: Fraction) -> "ExplicitDegreeWeights":
        return ExplicitDegreeWeights(
            tuple(factor * stretch**k * c for k, c in enumerate(self.coefficients)))

    def support_bound(self) -> int | None:
        return len(self.coefficients) - 1

    def describe(self) -> dict:
        return {"kind": "list", "coefficients": [str(c) for c in self.coefficients]}


@dataclass(frozen=True)
class ExpDegreeWeights(DegreeWeights):
    """phi(t) = scale * exp(rate * t), so phi_k = scale * rate^k / k!."""

    scale: Fraction
    rate: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", to_fraction(self.scale))
        object.__setattr__(self, "rate", to_fraction(self.rate))
        if self.scale <= 0:
            raise InvalidWeightsError("scale must be positive")
        if self.rate < 0:
            raise InvalidWeightsError("a negative rate makes weights alternate in sign")

    def coeff(self, k: int) -> Fraction:
        return self.scale * self.rate**k / math.factorial(k)

    def compose(self, series: Sequence[Fraction], order: int) -> list[Fraction]:
        # g = phi(S) satisfies g' = rate * S' * g, g(0) = scale.
        _check_series_start(series)
        s = list(series[: order + 1]) + [Fraction(0)] * max(0, order + 1 - len(series))
        g = [Fraction(0)] * (order + 1)
        g[0] = self.scale
        for n in range(order):
            acc = Fraction(0)
            for i in range(n + 1):
                acc += (i + 1) * s[i + 1] * g[n - i]
            g[n + 1] = self.rate * acc / (n + 1)
        return g

    def scaled(self, factor: Fraction, stretch: Fraction) -> "ExpDegreeWeights":
        return ExpDegreeWeights(self.scale * factor, self.rate * stretch)

    def support_bound(self) -> int | None:
        return 0 if self.rate == 0 else None

    def describe(self) -> dict:
        return {"kind": "exponential", "scale": str(self.scale), "rate": str(self.rate)}


@dataclass(frozen=True)
class PowDegreeWeights(DegreeWeights):
    """phi(t) = scale * (1 + base*t)^exponent.

    Coefficients are non-negative in exactly two regimes: exponent a
    non-negative integer with base > 0 (finite support), or exponent < 0
    with base < 0 (all coefficients positive).
    """

    scale: Fraction
    base: Fraction
    exponent: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", to_fraction(self.scale))
        object.__setattr__(self, "base", to_fraction(self.base))
        object.__setattr__(self, "exponent", to_fraction(self.exponent))
        if self.scale <= 0:
            raise InvalidWeightsError("scale must be positive")
        if self.base == 0 or self.exponent == 0:
            return  # constant phi; admissible here, rejected as degenerate by the model
        integral = self.exponent.denominator == 1 and self.exponent > 0
        if integral and self.base > 0:
            return
        if self.exponent < 0 and self.base < 0:
            return
        raise InvalidWeightsError(
            f"(1 + {self.base} t)^{self.exponent} has sign-alternating coefficients")

    def coeff(self, k: int) -> Fraction:
        return self.scale * binom_frac(self.exponent, k) * self.base**k

    def compose(self, series: Sequence[Fraction], order: int) -> list[Fraction]:
        # h = (1+u*S)^E satisfies (1+u*S) h' = E*u*S'*h, h(0) = 1.
        _check_series_start(series)
        s = list(series[: order + 1]) + [Fraction(0)] * max(0, order + 1 - len(series))
        u, e = self.base, self.exponent
        h = [Fraction(0)] * (order + 1)
        h[0] = Fraction(1)
        for n in range(order):
            drive = Fraction(0)
            for i in range(n + 1):
                drive += (i + 1) * s[i + 1] * h[n - i]
            drag = Fraction(0)
            for i in range(1, n + 1):
                drag += s[i] * (n - i + 1) * h[n - i + 1]
            h[n + 1] = (e * u * drive - u * drag) / (n + 1)
        return [self.scale * x for x in h]

    def scaled(self, factor: Fraction, stretch: Fraction) -> "PowDegreeWeights":
        return PowDegreeWeights(self.scale * factor, self.base * stretch, self.exponent)

    def support_bound(self) -> int | None:
        if self.base == 0 or self.exponent == 0:
            return 0
        if self.exponent.denominator == 1 and self.exponent > 0:
            return int(self.exponent)
        return None

    def describe(self) -> dict:
        return {
            "kind": "power",
            "scale": str(self.scale),
            "base": str(self.base),
            "exponent": str(self.exponent),
        }


# ── weight model ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class WeightModel:
    """Bucket weights psi_1..psi_{b-1} plus a degree-weight rule.

    Invariants: phi_0 > 0, all weights non-negative, and some phi_k with
    k >= 2 is positive (otherwise no tree could branch and every tree would
    be a chain of buckets).
    """

    b: int
    psi: tuple[Fraction, ...]
    phi: DegreeWeights

    def __post_init__(self) -> None:
        if self.b < 1:
            raise InvalidWeightsError(f"bucket capacity must be >= 1, got {self.b}")
        psi = tuple(to_fraction(p) for p in self.psi)
        object.__setattr__(self, "psi", psi)
        if len(psi) != self.b - 1:
            raise InvalidWeightsError(
                f"expected {self.b - 1} bucket weights for b={self.b}, got {len(psi)}")
        if any(p < 0 for p in psi):
            raise InvalidWeightsError("bucket weights must be non-negative")
        if self.phi.coeff(0) <= 0:
            raise InvalidWeightsError("the degree-0 weight must be positive")
        if self.phi.is_degenerate():
            raise InvalidWeightsError(
                "degenerate model: no degree weight phi_k with k >= 2 is positive, "
                "so all trees are label chains")

    @property
    def psi1(self) -> Fraction:
        """psi_1, reading psi_b := phi_0 so that b = 1 is covered."""
        return self.psi[0] if self.b > 1 else self.phi.coeff(0)

    def psi_extended(self, k: int) -> Fraction:
        """psi_k for 1 <= k <= b, with psi_b := phi_0."""
        if not 1 <= k <= self.b:
            raise ValueError(f"k={k} outside 1..{self.b}")
        if k == self.b:
            return self.phi.coeff(0)
        return self.psi[k - 1]

    def phi_coefficients(self, through: int) -> list[Fraction]:
        return [self.phi.coeff(k) for k in range(through + 1)]

    def scaled(self, a: RationalLike, s: RationalLike) -> "WeightModel":
        """Equivalent model with psi_k -> a^k s^-1 psi_k, phi_k -> a^b s^{k-1} phi_k.

        Rescaling multiplies every size-n tree weight by a^n / s and leaves
        the normalized tree distribution unchanged.
        """
        a = to_fraction(a)
        s = to_fraction(s)
        if a <= 0 or s <= 0:
            raise InvalidWeightsError("scaling factors must be positive")
        psi = tuple(a**k / s * p for k, p in zip(range(1, self.b), self.psi))
        phi = self.phi.scaled(a**self.b / s, s)
        return WeightModel(self.b, psi, phi)

    def describe(self) -> dict:
        return {
            "b": self.b,
            "psi": [str(p) for p in self.psi],
            "phi": self.phi.describe(),
        }


# ── grown families ────────────────────────────────────────────────────────

class FamilySpec(abc.ABC):
    """A parameterized growth rule; carries its derived constants.

    The attachment weight of a node is affine in its bucket load and child
    count: c1 * capacity + c2 * (1 - degree).  Summing over all nodes of a
    size-n tree gives the normalizer c1 * n + c2, independent of the shape.
    """

    b: int

    @abc.abstractmethod
    def affine_constants(self) -> tuple[Fraction, Fraction]:
        """(c1, c2) with T_{n+1}/T_n = c1*n + c2 for the canonical model."""

    @abc.abstractmethod
    def weight_model(self) -> WeightModel:
        """Canonical weights with psi_1 = 1."""

    @abc.abstractmethod
    def describe(self) -> dict: ...

    def sigma(self) -> Fraction:
        """Ball increment of the descendants urn; equals c1."""
        return self.affine_constants()[0]

    def kappa(self) -> Fraction:
        """Shift in the limit-law parameters; equals c2 / c1."""
        c1, c2 = self.affine_constants()
        return c2 / c1

    def connectivity(self, n: int) -> Fraction:
        """Total attachment weight of any size-n tree grown by this rule."""
        c1, c2 = self.affine_constants()
        return c1 * n + c2

    def attachment_weight(self, capacity: int, degree: int) -> Fraction:
        c1, c2 = self.affine_constants()
        return c1 * capacity + c2 * (1 - degree)

    def weight_scale(self) -> int:
        """Common denominator turning attachment weights into integers."""
        c1, c2 = self.affine_constants()
        return math.lcm(c1.denominator, c2.denominator)


@dataclass(frozen=True)
class BucketRecursive(FamilySpec):
    """Uniform attachment: a node is chosen proportionally to its bucket load."""

    b: int

    def __post_init__(self) -> None:
        if self.b < 1:
            raise InvalidWeightsError(f"b must be >= 1, got {self.b}")

    def affine_constants(self) -> tuple[Fraction, Fraction]:
        return Fraction(1), Fraction(0)

    def weight_model(self) -> WeightModel:
        psi = tuple(Fraction(math.factorial(k - 1)) for k in range(1, self.b))
        phi = ExpDegreeWeights(Fraction(math.factorial(self.b - 1)), Fraction(self.b))
        return WeightModel(self.b, psi, phi)

    def describe(self) -> dict:
        return {"family": "bucket-recursive", "b": self.b}


@dataclass(frozen=True)
class DAryIncreasing(FamilySpec):
    """Bounded branching: saturated buckets accept at most b*(d-1)+1 children."""

    b: int
    d: Fraction

    def __post_init__(self) -> None:
        if self.b < 1:
            raise InvalidWeightsError(f"b must be >= 1, got {self.b}")
        object.__setattr__(self, "d", to_fraction(self.d))
        if self.d <= 1:
            raise InvalidWeightsError(f"d must exceed 1, got {self.d}")
        slots = (self.d - 1) * self.b
        if slots.denominator != 1:
            raise InvalidWeightsError(
                f"(d-1)*b must be a positive integer, got {slots}")

    def max_degree(self) -> int:
        return int((self.d - 1) * self.b) + 1

    def affine_constants(self) -> tuple[Fraction, Fraction]:
        return self.d - 1, Fraction(1)

    def weight_model(self) -> WeightModel:
        e = self.d - 1
        psi = tuple(
            math.factorial(k - 1) * e ** (k - 1) * binom_frac(k - 1 + 1 / e, k - 1)
            for k in range(1, self.b))
        scale = (math.factorial(self.b - 1) * e ** (self.b - 1)
                 * binom_frac(self.b - 1 + 1 / e, self.b - 1))
        phi = PowDegreeWeights(scale, Fraction(1), Fraction(self.max_degree()))
        return WeightModel(self.b, psi, phi)

    def describe(self) -> dict:
        return {"family": "dary", "b": self.b, "d": str(self.d)}


@dataclass(frozen=True)
class PlaneOriented(FamilySpec):
    """Preferential attachment: weight grows with the current child count."""

    b: int
    alpha: Fraction

    def __post_init__(self) -> None:
        if self.b < 1:
            raise InvalidWeightsError(f"b must be >= 1, got {self.b}")
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        if self.alpha <= 0:
            raise InvalidWeightsError(f"alpha must be positive, got {self.alpha}")

    def affine_constants(self) -> tuple[Fraction, Fraction]:
        return self.alpha + 1, Fraction(-1)

    def weight_model(self) -> WeightModel:
        e = self.alpha + 1
        psi = tuple(
            math.factorial(k - 1) * e ** (k - 1) * binom_frac(k - 1 - 1 / e, k - 1)
            for k in range(1, self.b))
        scale = (math.factorial(self.b - 1) * e ** (self.b - 1)
                 * binom_frac(self.b - 1 - 1 / e, self.b - 1))
        root_exponent = e * self.b - 1
        phi = PowDegreeWeights(scale, Fraction(-1), -root_exponent)
        return WeightModel(self.b, psi, phi)

    def describe(self) -> dict:
        return {"family": "plane-oriented", "b": self.b, "alpha": str(self.alpha)}


@functools.lru_cache(maxsize=None)
def weights_of(spec: FamilySpec) -> WeightModel:
    """Canonical weight model of a family (cached)."""
    return spec.weight_model()
