"""Tests for the segment geometry model, cable kinematics and stack composition."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import STABLE_FLAT, UNIT, random_angle, random_geometry
from tenseg import (InvalidGeometry, InvalidRatio, SegmentGeometry,
                    SegmentState, StackConfig, cable_lengths,
                    cable_lengths_squared, normalize_angle, segment_points,
                    singularity_condition, stack_forward, tapered_stack,
                    validate_geometry)

# ---------------------------------------------------------------------------
# validation


def test_validate_accepts_unit_geometry():
    g = validate_geometry(UNIT)
    assert (g.h1, g.h2, g.h3, g.l1, g.l2) == (1.0, 1.0, 1.0, 1.0, 1.0)


def test_validate_accepts_flat_end_links():
    g = validate_geometry(STABLE_FLAT)
    assert g.h1 == 0.0 and g.h3 == 0.0


@pytest.mark.parametrize("kwargs, field", [
    (dict(h1=1, h2=0, h3=1, l1=1, l2=1), "h2"),
    (dict(h1=-1, h2=1, h3=1, l1=1, l2=1), "h1"),
    (dict(h1=1, h2=1, h3=-0.5, l1=1, l2=1), "h3"),
    (dict(h1=1, h2=1, h3=1, l1=0, l2=1), "l1"),
    (dict(h1=1, h2=1, h3=1, l1=1, l2=-2), "l2"),
    (dict(h1=1, h2=float("nan"), h3=1, l1=1, l2=1), "h2"),
])
def test_invalid_geometry_names_the_field(kwargs, field):
    with pytest.raises(InvalidGeometry) as excinfo:
        SegmentGeometry(**kwargs)
    assert excinfo.value.field == field


def test_taper_ratio_property():
    assert SegmentGeometry(h1=1, h2=1, h3=1, l1=2.0, l2=1.0).lam == 0.5


# ---------------------------------------------------------------------------
# angle normalization


@pytest.mark.parametrize("angle, expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (2 * math.pi, 0.0),
    (5 * math.pi / 2, math.pi / 2),
    (-math.pi / 3, -math.pi / 3),
])
def test_normalize_angle(angle, expected):
    assert normalize_angle(angle) == pytest.approx(expected, abs=1e-12)


@given(st.floats(-50.0, 50.0))
@settings(max_examples=100, deadline=None)
def test_normalize_angle_range_and_idempotence(angle):
    wrapped = normalize_angle(angle)
    assert -math.pi < wrapped <= math.pi
    assert normalize_angle(wrapped) == wrapped
    # Same point on the circle.
    assert math.cos(wrapped) == pytest.approx(math.cos(angle), abs=1e-9)
    assert math.sin(wrapped) == pytest.approx(math.sin(angle), abs=1e-9)


def test_segment_state_normalizes():
    assert SegmentState(3 * math.pi).alpha == pytest.approx(math.pi)
    assert SegmentState(-math.pi).alpha == math.pi
    assert SegmentState(0.3).alpha == 0.3


# ---------------------------------------------------------------------------
# segment points


def test_segment_points_home_configuration():
    pose = segment_points(UNIT, SegmentState(0.0))
    assert pose.a1 == pytest.approx([-1.0, 0.0])
    assert pose.a2 == pytest.approx([1.0, 0.0])
    assert pose.b0 == pytest.approx([0.0, 1.0])
    assert pose.c0 == pytest.approx([0.0, 2.0])
    assert pose.d0 == pytest.approx([0.0, 3.0])
    assert pose.d1 == pytest.approx([-1.0, 3.0])
    assert pose.d2 == pytest.approx([1.0, 3.0])


def test_segment_points_quarter_turn():
    pose = segment_points(UNIT, SegmentState(math.pi / 2))
    assert pose.c0 == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert pose.d0 == pytest.approx([-1.0, 0.0], abs=1e-12)


def test_segment_points_flat_attachments():
    pose = segment_points(STABLE_FLAT, SegmentState(0.0))
    assert pose.d0 == pytest.approx([0.0, 1.0])
    assert pose.d1 == pytest.approx([-1.0, 1.0])


def test_pose_point_ordering():
    pose = segment_points(UNIT, SegmentState(0.1))
    names = [name for name, _ in pose.points()]
    assert names == ["a1", "a2", "b0", "c0", "d0", "d1", "d2"]


def test_spine_link_distances_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        g = random_geometry(rng)
        pose = segment_points(g, SegmentState(random_angle(rng)))
        scale = max(g.h1, g.h2, g.h3, g.l1, g.l2)
        tol = 1e-12 * scale
        assert np.hypot(*pose.b0) == pytest.approx(g.h1, abs=tol)
        assert np.hypot(*(pose.c0 - pose.b0)) == pytest.approx(g.h2, abs=tol)
        assert np.hypot(*(pose.d0 - pose.c0)) == pytest.approx(g.h3, abs=tol)
        assert np.hypot(*(pose.d1 - pose.d0)) == pytest.approx(g.l2, abs=tol)
        assert np.hypot(*(pose.d2 - pose.d0)) == pytest.approx(g.l2, abs=tol)
        assert pose.a1 == pytest.approx([-g.l1, 0.0])
        assert pose.a2 == pytest.approx([g.l1, 0.0])


# ---------------------------------------------------------------------------
# cable lengths


def test_cable_lengths_home_configuration():
    rho1, rho2 = cable_lengths(UNIT, 0.0)
    assert rho1 == pytest.approx(3.0, abs=1e-14)
    assert rho2 == pytest.approx(3.0, abs=1e-14)


def test_cable_lengths_accepts_state():
    assert cable_lengths(UNIT, SegmentState(0.3)) == cable_lengths(UNIT, 0.3)


def test_cable_lengths_match_point_distances():
    rng = np.random.default_rng(11)
    for _ in range(200):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        pose = segment_points(g, SegmentState(alpha))
        rho1, rho2 = cable_lengths(g, alpha)
        assert rho1 == pytest.approx(np.hypot(*(pose.a1 - pose.d1)), rel=1e-12)
        assert rho2 == pytest.approx(np.hypot(*(pose.a2 - pose.d2)), rel=1e-12)


def test_cable_lengths_match_expanded_squares():
    # Two independent code paths: point construction vs expanded polynomials.
    rng = np.random.default_rng(13)
    for _ in range(1000):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        rho1, rho2 = cable_lengths(g, alpha)
        sq1, sq2 = cable_lengths_squared(g, alpha)
        assert rho1 * rho1 == pytest.approx(sq1, rel=1e-12)
        assert rho2 * rho2 == pytest.approx(sq2, rel=1e-12)


def test_cable_length_mirror_symmetry():
    rng = np.random.default_rng(17)
    for _ in range(100):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        rho1_pos, rho2_pos = cable_lengths(g, alpha)
        rho1_neg, rho2_neg = cable_lengths(g, -alpha)
        assert rho1_pos == pytest.approx(rho2_neg, rel=1e-12)
        assert rho2_pos == pytest.approx(rho1_neg, rel=1e-12)


def test_cable_lengths_vectorized_matches_scalar():
    alphas = np.linspace(-3.0, 3.0, 25)
    rho1, rho2 = cable_lengths(UNIT, alphas)
    for i, alpha in enumerate(alphas):
        s1, s2 = cable_lengths(UNIT, float(alpha))
        assert rho1[i] == s1 and rho2[i] == s2


@given(st.floats(-math.pi, math.pi))
@settings(max_examples=100, deadline=None)
def test_mirror_symmetry_is_exact_for_unit_geometry(alpha):
    rho1, rho2 = cable_lengths(UNIT, alpha)
    rho1m, rho2m = cable_lengths(UNIT, -alpha)
    assert rho1 == pytest.approx(rho2m, rel=1e-13)
    assert rho2 == pytest.approx(rho1m, rel=1e-13)


# ---------------------------------------------------------------------------
# singularity condition


@pytest.mark.parametrize("alpha", [-math.pi / 4, 3 * math.pi / 4])
def test_condition_vanishes_at_known_unit_angles(alpha):
    assert abs(singularity_condition(UNIT, alpha)) < 1e-9


def test_condition_matches_derivative_of_squared_length():
    rng = np.random.default_rng(19)
    step = 1e-6
    for _ in range(100):
        g = random_geometry(rng)
        alpha = random_angle(rng)
        plus, _ = cable_lengths_squared(g, alpha + step)
        minus, _ = cable_lengths_squared(g, alpha - step)
        derivative = (plus - minus) / (2.0 * step)
        value = singularity_condition(g, alpha)
        assert value == pytest.approx(derivative, rel=1e-6, abs=1e-6)


def test_condition_vectorized_matches_scalar():
    alphas = np.linspace(-3.0, 3.0, 17)
    values = singularity_condition(UNIT, alphas)
    for i, alpha in enumerate(alphas):
        assert values[i] == singularity_condition(UNIT, float(alpha))


# ---------------------------------------------------------------------------
# tapered stack


def test_tapered_stack_uniform():
    stack = tapered_stack(UNIT, 1.0, (0.0, 0.0, 0.0))
    assert len(stack.segments) == 3
    for segment in stack.segments:
        assert segment == UNIT


def test_tapered_stack_geometric_scaling():
    stack = tapered_stack(UNIT, 0.5, (0.1, 0.2, 0.3))
    a, b, c = stack.segments
    assert c.h2 == pytest.approx(0.25)
    assert c.l1 == pytest.approx(0.25)
    for upper, lower in ((b, a), (c, b)):
        for field in ("h1", "h2", "h3", "l1", "l2"):
            assert getattr(upper, field) == pytest.approx(
                0.5 * getattr(lower, field), rel=1e-15)
    assert [s.alpha for s in stack.states] == [0.1, 0.2, 0.3]


@pytest.mark.parametrize("lam", [0.0, -0.5, 1.5])
def test_tapered_stack_rejects_bad_ratio(lam):
    with pytest.raises(InvalidRatio):
        tapered_stack(UNIT, lam, (0.0, 0.0, 0.0))


def test_tapered_stack_accepts_states():
    states = (SegmentState(0.1), SegmentState(0.2), SegmentState(0.3))
    stack = tapered_stack(UNIT, 0.8, states)
    assert [s.alpha for s in stack.states] == [0.1, 0.2, 0.3]


def test_stack_requires_three_segments():
    with pytest.raises(ValueError):
        StackConfig(segments=(UNIT, UNIT), states=(SegmentState(0.0),) * 2)


# ---------------------------------------------------------------------------
# stack forward kinematics


def test_stack_forward_straight_uniform():
    frames = stack_forward(tapered_stack(UNIT, 1.0, (0.0, 0.0, 0.0)))
    origins = [tuple(f.origin) for f in frames]
    assert origins == pytest.approx([(0.0, 3.0), (0.0, 6.0), (0.0, 9.0)])
    assert [f.theta for f in frames] == [0.0, 0.0, 0.0]


def test_stack_forward_straight_tapered():
    frames = stack_forward(tapered_stack(UNIT, 0.5, (0.0, 0.0, 0.0)))
    origins = [tuple(f.origin) for f in frames]
    assert origins == pytest.approx([(0.0, 3.0), (0.0, 4.5), (0.0, 5.25)])


def test_stack_forward_orientation_composition():
    frames = stack_forward(tapered_stack(UNIT, 1.0, (0.3, 0.0, 0.0)))
    assert [f.theta for f in frames] == pytest.approx([0.6, 0.6, 0.6])

    frames = stack_forward(tapered_stack(UNIT, 0.7, (0.1, 0.2, 0.3)))
    assert [f.theta for f in frames] == pytest.approx([0.2, 0.6, 1.2])


def test_stack_forward_orientation_normalized():
    frames = stack_forward(tapered_stack(UNIT, 1.0, (2.0, 2.0, 2.0)))
    expected = [normalize_angle(4.0), normalize_angle(8.0), normalize_angle(12.0)]
    assert [f.theta for f in frames] == pytest.approx(expected)
    for frame in frames:
        assert -math.pi < frame.theta <= math.pi


def test_stack_forward_composes_rigidly():
    # Independent composition with complex rotations.
    lam, alphas = 0.6, (0.25, -0.4, 0.55)
    frames = stack_forward(tapered_stack(UNIT, lam, alphas))
    position, heading = 0.0 + 0.0j, 0.0
    for level, alpha in enumerate(alphas):
        g = SegmentGeometry(*(lam ** level * v for v in (1.0, 1.0, 1.0, 1.0, 1.0)))
        pose = segment_points(g, SegmentState(alpha))
        d0 = complex(pose.d0[0], pose.d0[1])
        position += d0 * complex(math.cos(heading), math.sin(heading))
        heading += 2.0 * alpha
        frame = frames[level]
        assert frame.origin[0] == pytest.approx(position.real, abs=1e-12)
        assert frame.origin[1] == pytest.approx(position.imag, abs=1e-12)
        assert frame.theta == pytest.approx(normalize_angle(heading))
