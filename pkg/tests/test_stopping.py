import numpy as np
import pytest

from satdsurvey.estimator import Estimate
from satdsurvey.stopping import (
    CormackRule,
    NeverStop,
    RetrievalCurve,
    RosRule,
    TargetRule,
    cormack_rule,
    kneedle,
    parse_stop_spec,
    ros_rule,
    target_rule,
)


def make_estimate(total, degenerate=False):
    return Estimate(total_positives=total, iterations=1, converged=True, degenerate=degenerate)


def make_curve(labels):
    curve = RetrievalCurve()
    for v in labels:
        curve.append(bool(v))
    return curve


# ---------------------------------------------------------------------------
# target rule


def test_target_boundary_inclusive():
    assert target_rule(90, make_estimate(100), 0.90).stop is True
    assert target_rule(89, make_estimate(100), 0.90).stop is False


def test_target_degenerate_estimate_continues():
    d = target_rule(5, make_estimate(0, degenerate=True), 0.9)
    assert d.stop is False
    assert d.detail.get("degenerate")


def test_target_monotone_in_found():
    est = make_estimate(200)
    fired = False
    for found in range(0, 201, 5):
        stop = target_rule(found, est, 0.9).stop
        if fired:
            assert stop
        fired = fired or stop
    assert fired


def test_target_rejects_bad_fraction():
    with pytest.raises(ValueError):
        target_rule(1, make_estimate(10), 0.0)
    with pytest.raises(ValueError):
        TargetRule(1.5)


# ---------------------------------------------------------------------------
# consecutive-miss rule


def test_ros_examples():
    assert ros_rule([0] * 10, 10).stop is True
    assert ros_rule([0] * 9 + [1], 10).stop is False
    assert ros_rule([0] * 5, 10).stop is False  # not enough evidence yet


def test_ros_only_recent_window_counts():
    labels = [1] * 20 + [0] * 10
    assert ros_rule(labels, 10).stop is True
    assert ros_rule(labels, 11).stop is False


def test_ros_stop_reads_nondecreasing_in_x():
    rng = np.random.RandomState(0)
    labels = (rng.rand(400) < np.linspace(0.5, 0.0, 400)).astype(int).tolist()

    def stop_read(x):
        for k in range(1, len(labels) + 1):
            if ros_rule(labels[:k], x).stop:
                return k
        return len(labels) + 1

    reads = [stop_read(x) for x in (5, 10, 20, 40)]
    assert reads == sorted(reads)


# ---------------------------------------------------------------------------
# kneedle


def test_kneedle_straight_line_has_no_knee():
    x = np.arange(1, 101)
    assert kneedle(x, x) is None


def test_kneedle_bent_curve_knee_at_diff_argmax():
    x = np.linspace(0, 1, 101)
    y = np.minimum(2 * x, 1.0)
    knee = kneedle(x, y)
    # oracle: brute-force argmax of the normalized difference curve
    xn = (x - x.min()) / (x.max() - x.min())
    yn = (y - y.min()) / (y.max() - y.min())
    assert knee == int(np.argmax(yn - xn))
    assert x[knee] == pytest.approx(0.5, abs=0.02)


def test_kneedle_convex_curve_has_no_knee():
    x = np.linspace(0, 1, 60)
    assert kneedle(x, x**2) is None


def test_kneedle_needs_three_points():
    assert kneedle([1, 2], [1, 1]) is None


def test_kneedle_still_rising_curve_not_confirmed():
    # concave but still climbing: the max of d sits at the end, no drop after
    x = np.linspace(0, 1, 50)
    y = np.sqrt(x)
    knee = kneedle(x, y)
    d = (y - y.min()) / (y.max() - y.min()) - (x - x.min()) / (x.max() - x.min())
    if knee is not None:
        assert d[knee] == pytest.approx(d.max())


def test_kneedle_invariant_to_axis_rescaling():
    x = np.linspace(0, 1, 80)
    y = np.minimum(3 * x, 1.0)
    assert kneedle(x, y) == kneedle(1000 * x, 42 * y)


# ---------------------------------------------------------------------------
# slope-ratio rule


def test_cormack_flat_tail_stops():
    labels = [1] * 100 + [0] * 800
    d = cormack_rule(make_curve(labels), rho=6.0)
    assert d.stop is True
    assert d.detail["ratio"] == float("inf")


def test_cormack_uniform_discovery_continues():
    rng = np.random.RandomState(1)
    labels = (rng.rand(1000) < 0.05).astype(int).tolist()
    assert cormack_rule(make_curve(labels), rho=6.0).stop is False


def test_cormack_needs_knee():
    labels = [1, 1, 1, 1]  # pure rise, no knee
    assert cormack_rule(make_curve(labels), rho=6.0).stop is False


def test_cormack_stop_reads_nondecreasing_in_rho():
    rng = np.random.RandomState(3)
    # steep rise then sparse tail
    labels = ([1] * 60 + (rng.rand(200) < 0.35).astype(int).tolist()
              + (rng.rand(1200) < 0.01).astype(int).tolist())

    def stop_read(rho):
        curve = RetrievalCurve()
        for k, v in enumerate(labels, start=1):
            curve.append(bool(v))
            if k % 100 == 0 and cormack_rule(curve, rho).stop:
                return k
        return len(labels) + 1

    reads = [stop_read(r) for r in (3, 6, 12, 24)]
    assert reads == sorted(reads)
    assert reads[1] <= reads[2] <= len(labels)


# ---------------------------------------------------------------------------
# curve bookkeeping and rule parsing


def test_curve_invariants():
    curve = make_curve([1, 0, 1, 0, 0])
    assert curve.reads == [1, 2, 3, 4, 5]
    assert curve.found == [1, 1, 2, 2, 2]
    assert len(curve) == 5


def test_parse_stop_spec():
    assert isinstance(parse_stop_spec("target@0.9"), TargetRule)
    assert parse_stop_spec("target@0.95").target == pytest.approx(0.95)
    assert parse_stop_spec("ros:10").x == 10
    assert parse_stop_spec("cormack:12").rho == 12.0
    assert isinstance(parse_stop_spec("never"), NeverStop)
    with pytest.raises(ValueError):
        parse_stop_spec("bogus")


def test_rule_objects_evaluate():
    curve = make_curve([1] * 50 + [0] * 300)
    est = make_estimate(55)
    assert TargetRule(0.9).evaluate(50, curve, [1] * 50 + [0] * 300, est).stop
    assert RosRule(10).evaluate(50, curve, [1] * 50 + [0] * 300, est).stop
    assert CormackRule(6.0).evaluate(50, curve, [1] * 50 + [0] * 300, est).stop
    assert not NeverStop().evaluate(50, curve, [], est).stop
