"""Shape enumeration, weighted totals, and the coefficient recurrence."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from buckettrees import (BucketRecursive, DAryIncreasing,
                         EnumerationLimitError, ExplicitDegreeWeights,
                         PlaneOriented, PowDegreeWeights, WeightModel,
                         check_ode_recurrence, closed_form_total_weight,
                         enumerate_shapes, shape_count, total_weight,
                         total_weights, weights_of)

F = Fraction


def bucket_ordered_model(b: int) -> WeightModel:
    """psi_k = 1 and phi_k = 1: ordered trees of buckets.

    For b >= 2 this model is a counterexample: its totals are not affine
    ratios and no growth rule reproduces its law.
    """
    return WeightModel(b, (F(1),) * (b - 1), PowDegreeWeights(F(1), F(-1), F(-1)))


def test_shape_counts_b1_catalan():
    # Plane trees with n nodes.
    assert [shape_count(1, n) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]


def test_shape_counts_b2():
    assert [shape_count(2, n) for n in range(1, 7)] == [1, 1, 1, 2, 4, 9]


def test_shapes_are_valid_and_distinct():
    for b in (1, 2, 3):
        for n in range(1, 7):
            shapes = enumerate_shapes(b, n)
            for s in shapes:
                s.validate()
                assert s.size == n
            assert len({id(s.root) for s in shapes}) == len(shapes)


def test_enumeration_limit_guard():
    with pytest.raises(EnumerationLimitError, match="limit 12"):
        enumerate_shapes(2, 13)
    assert shape_count(2, 13, limit=13) > 0
    with pytest.raises(EnumerationLimitError, match="limit 5"):
        total_weight(weights_of(BucketRecursive(2)), 6, limit=5)


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(ValueError, match=">= 1"):
        enumerate_shapes(0, 3)
    with pytest.raises(ValueError, match=">= 1"):
        enumerate_shapes(2, 0)


# ── known total sequences ─────────────────────────────────────────────────

def test_totals_bucket_recursive_b2():
    model = weights_of(BucketRecursive(2))
    assert total_weights(model, 6) == [math.factorial(n - 1) for n in range(1, 7)]


def test_totals_bucket_ordered_b2():
    assert total_weights(bucket_ordered_model(2), 6) == [1, 1, 1, 3, 13, 77]


def test_totals_b1_plane_oriented():
    model = weights_of(PlaneOriented(1, F(1)))
    # Double factorials 1, 1, 3, 15, 105, 945.
    expect = [math.prod(range(1, 2 * n - 2, 2)) for n in range(1, 7)]
    assert total_weights(model, 6) == expect


def test_totals_b1_binary():
    model = weights_of(DAryIncreasing(1, F(2)))
    assert total_weights(model, 6) == [math.factorial(n) for n in range(1, 7)]


def test_closed_form_spot_checks():
    for spec in (BucketRecursive(3), DAryIncreasing(2, F(3, 2)), PlaneOriented(2, F(2))):
        model = weights_of(spec)
        for n in range(1, 8):
            assert total_weight(model, n) == closed_form_total_weight(spec, n)


def test_closed_form_rejects_bad_n():
    with pytest.raises(ValueError, match=">= 1"):
        closed_form_total_weight(BucketRecursive(2), 0)


# ── coefficient recurrence ────────────────────────────────────────────────

def test_ode_recurrence_passes_for_families():
    for spec in (BucketRecursive(1), BucketRecursive(2), BucketRecursive(3),
                 DAryIncreasing(2, F(2)), PlaneOriented(2, F(1))):
        report = check_ode_recurrence(weights_of(spec), 7)
        assert report.passed, report
        assert report.checked_through == 7
        assert report.failure_kind is None


def test_ode_recurrence_passes_for_bucket_ordered():
    # Not a grown family, but the recurrence holds for every weight model.
    assert check_ode_recurrence(bucket_ordered_model(2), 7).passed


def test_ode_recurrence_detects_perturbed_total():
    model = weights_of(BucketRecursive(2))
    totals = total_weights(model, 6)
    totals[2] += 1  # corrupt T_3
    report = check_ode_recurrence(model, 6, totals=totals)
    assert not report.passed
    assert report.failure_kind == "coefficient"
    assert report.failing_index == 1  # T_3 = 1! [z^1] phi(T)


def test_ode_recurrence_detects_bad_initial_condition():
    model = weights_of(BucketRecursive(2))
    totals = total_weights(model, 6)
    totals[0] = F(7)
    report = check_ode_recurrence(model, 6, totals=totals)
    assert report.failure_kind == "initial"
    assert report.failing_index == 1


def test_ode_recurrence_rejects_wrong_length():
    model = weights_of(BucketRecursive(2))
    with pytest.raises(ValueError, match="expected 4 totals"):
        check_ode_recurrence(model, 4, totals=[F(1)])


def test_composition_spot_value():
    # For the b=2 bucket ordered model, T_5 = 3! [z^3] 1/(1 - T(z)) = 13.
    model = bucket_ordered_model(2)
    totals = total_weights(model, 5)
    egf = [F(0)] + [t / math.factorial(m) for m, t in enumerate(totals, start=1)]
    composed = model.phi.compose(egf, 3)
    assert composed[3] == F(13, 6)
    assert math.factorial(3) * composed[3] == totals[4] == 13


def test_totals_of_truncated_model_vanish_beyond_support():
    # phi = (1, 1, 1) at b=1: nodes have at most 2 children, but totals stay
    # positive since chains and binary shapes always exist.
    model = WeightModel(1, (), ExplicitDegreeWeights((F(1), F(1), F(1))))
    totals = total_weights(model, 6)
    assert all(t > 0 for t in totals)
    assert totals[:4] == [1, 1, 3, 9]
