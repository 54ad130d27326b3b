"""Planar geometry of one tensegrity segment and of a tapered three-segment stack.

A segment is a trapezoidal mechanism: a fixed base plate of half-width ``l1``
carries a rigid three-link spine (link lengths ``h1``, ``h2``, ``h3``) that ends
in a moving plate of half-width ``l2``.  The two spine joints are mechanically
coupled so both rotate by the same angle ``alpha``; the moving plate therefore
tilts by ``2*alpha`` relative to the base.  Two lateral cables close the loops:
cable 1 runs from the left base corner ``a1`` to the left plate corner ``d1``,
cable 2 from the right base corner ``a2`` to the right plate corner ``d2``.
Their lengths ``(rho1, rho2)`` are the actuation coordinates of the segment.

With the base mid-point at the origin and ``alpha = 0`` the spine is vertical;
positive ``alpha`` leans the plate to the left.  All points live in the base
frame:

    a1 = (-l1, 0)                 a2 = (l1, 0)
    b0 = (0, h1)                                  (top of the first link)
    c0 = b0 + h2 * (-sin a,  cos a)               (top of the second link)
    d0 = c0 + h3 * (-sin 2a, cos 2a)              (mid-point of the plate)
    d1 = d0 + l2 * (-cos 2a, -sin 2a)             (left plate corner)
    d2 = d0 + l2 * ( cos 2a,  sin 2a)             (right plate corner)

Segments stack by mounting the next base plate on the previous moving plate,
each level scaled by the taper ratio ``lam = l2 / l1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi

_DIMENSION_FIELDS = ("h1", "h2", "h3", "l1", "l2")


class InvalidGeometry(ValueError):
    """A segment dimension violates the validity constraints."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.reason = message
        super().__init__(f"{field}: {message}")


class InvalidRatio(ValueError):
    """A taper ratio outside the half-open interval (0, 1]."""


def normalize_angle(angle: float) -> float:
    """Wrap ``angle`` to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(angle, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


@dataclass(frozen=True)
class SegmentGeometry:
    """Dimensions of one segment.

    ``h1``, ``h2``, ``h3`` are the spine link lengths (``h1`` and ``h3`` may be
    zero, collapsing the end links; ``h2`` may not), ``l1`` and ``l2`` the base
    and moving-plate half-widths.  Instances are validated on construction.
    """

    h1: float
    h2: float
    h3: float
    l1: float
    l2: float

    def __post_init__(self):
        validate_geometry(self)

    @property
    def lam(self) -> float:
        """Taper ratio: moving-plate half-width over base half-width."""
        return self.l2 / self.l1


@dataclass(frozen=True)
class SegmentState:
    """Joint state of one segment: the shared spine angle ``alpha``.

    ``alpha`` is wrapped to (-pi, pi] on construction.
    """

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", normalize_angle(self.alpha))


@dataclass(frozen=True)
class SegmentPose:
    """All seven segment points, as 2-vectors in the base frame."""

    a1: np.ndarray
    a2: np.ndarray
    b0: np.ndarray
    c0: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def points(self):
        """The points as an ordered (name, vector) sequence."""
        return (
            ("a1", self.a1), ("a2", self.a2), ("b0", self.b0),
            ("c0", self.c0), ("d0", self.d0), ("d1", self.d1), ("d2", self.d2),
        )


@dataclass(frozen=True)
class Frame2D:
    """A planar frame: origin and orientation of a plate."""

    origin: np.ndarray
    theta: float


@dataclass(frozen=True)
class StackConfig:
    """A three-segment stack: per-level geometries and states, base first."""

    segments: tuple[SegmentGeometry, SegmentGeometry, SegmentGeometry]
    states: tuple[SegmentState, SegmentState, SegmentState]

    def __post_init__(self):
        if len(self.segments) != 3 or len(self.states) != 3:
            raise ValueError("a stack has exactly three segments and three states")


def validate_geometry(g: SegmentGeometry) -> SegmentGeometry:
    """Check dimension constraints, returning ``g`` unchanged if valid.

    ``h1`` and ``h3`` must be non-negative, ``h2``, ``l1`` and ``l2`` strictly
    positive, and every dimension finite.  Raises :class:`InvalidGeometry`
    naming the offending field otherwise.
    """
    for name in _DIMENSION_FIELDS:
        value = getattr(g, name)
        if not math.isfinite(value):
            raise InvalidGeometry(name, f"must be finite, got {value!r}")
    if g.h1 < 0.0:
        raise InvalidGeometry("h1", f"must be >= 0, got {g.h1!r}")
    if g.h3 < 0.0:
        raise InvalidGeometry("h3", f"must be >= 0, got {g.h3!r}")
    if g.h2 <= 0.0:
        raise InvalidGeometry("h2", f"must be > 0, got {g.h2!r}")
    if g.l1 <= 0.0:
        raise InvalidGeometry("l1", f"must be > 0, got {g.l1!r}")
    if g.l2 <= 0.0:
        raise InvalidGeometry("l2", f"must be > 0, got {g.l2!r}")
    return g


def _cable_lengths_raw(h1, h2, h3, l1, l2, alpha):
    """Cable lengths from raw dimensions via the point construction.

    All arguments broadcast, so this serves both the scalar public API and the
    batched design sweeps (dimension arrays against angle arrays).
    """
    two_a = 2.0 * np.asarray(alpha)
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    sin_2a, cos_2a = np.sin(two_a), np.cos(two_a)
    d0x = -h2 * sin_a - h3 * sin_2a
    d0y = h1 + h2 * cos_a + h3 * cos_2a
    rho1 = np.hypot(d0x - l2 * cos_2a + l1, d0y - l2 * sin_2a)
    rho2 = np.hypot(d0x + l2 * cos_2a - l1, d0y + l2 * sin_2a)
    return rho1, rho2


def segment_points(g: SegmentGeometry, state: SegmentState) -> SegmentPose:
    """Forward kinematics of one segment: all seven points at ``state.alpha``."""
    a = state.alpha
    sin_a, cos_a = math.sin(a), math.cos(a)
    sin_2a, cos_2a = math.sin(2.0 * a), math.cos(2.0 * a)
    b0 = np.array([0.0, g.h1])
    c0 = b0 + g.h2 * np.array([-sin_a, cos_a])
    d0 = c0 + g.h3 * np.array([-sin_2a, cos_2a])
    plate = g.l2 * np.array([cos_2a, sin_2a])
    return SegmentPose(
        a1=np.array([-g.l1, 0.0]),
        a2=np.array([g.l1, 0.0]),
        b0=b0,
        c0=c0,
        d0=d0,
        d1=d0 - plate,
        d2=d0 + plate,
    )


def cable_lengths(g: SegmentGeometry, alpha):
    """Cable lengths ``(rho1, rho2)`` at angle ``alpha`` (inverse kinematics).

    ``rho1 = ||a1 - d1||`` and ``rho2 = ||a2 - d2||``, computed from the point
    construction.  ``alpha`` may be a ``SegmentState``, a scalar, or an
    ndarray; the mirror symmetry of the trapezoid gives
    ``rho2(alpha) = rho1(-alpha)`` identically.
    """
    if isinstance(alpha, SegmentState):
        alpha = alpha.alpha
    return _cable_lengths_raw(g.h1, g.h2, g.h3, g.l1, g.l2, alpha)


def cable_lengths_squared(g: SegmentGeometry, alpha):
    """Squared cable lengths from the expanded loop-closure polynomials.

    This is a second, structurally independent route: the corner offsets are
    written out in powers of ``sin(alpha)`` and ``cos(alpha)`` instead of going
    through the point construction.  Both routes agree to ~1e-12 relative and
    the test suite cross-checks them.  Accepts scalar or ndarray ``alpha``.
    """
    s, c = np.sin(alpha), np.cos(alpha)
    x1 = (-2.0 * g.h3 * c - g.h2) * s - 2.0 * g.l2 * c * c + g.l2 + g.l1
    y1 = 2.0 * g.h3 * c * c + (-2.0 * g.l2 * s + g.h2) * c + g.h1 - g.h3
    x2 = (-2.0 * g.h3 * c - g.h2) * s + 2.0 * g.l2 * c * c - g.l2 - g.l1
    y2 = 2.0 * g.h3 * c * c + (2.0 * g.l2 * s + g.h2) * c + g.h1 - g.h3
    return x1 * x1 + y1 * y1, x2 * x2 + y2 * y2


def singularity_condition(g: SegmentGeometry, alpha):
    """Derivative of the squared length of cable 1 with respect to ``alpha``.

    The mechanism is singular where this vanishes: the cable can no longer
    control the joint to first order.  By mirror symmetry the corresponding
    condition for cable 2 is this expression evaluated at ``-alpha``.  Accepts
    scalar or ndarray ``alpha``.
    """
    h1, h2, h3, l1, l2 = g.h1, g.h2, g.h3, g.l1, g.l2
    s, c = np.sin(alpha), np.cos(alpha)
    s2, c2, s3, c3 = s * s, c * c, s * s * s, c * c * c
    return (
        -8.0 * h3 * h3 * c3 * s + 8.0 * h3 * h3 * c * s
        - 8.0 * l2 * l2 * c3 * s + 8.0 * l2 * l2 * c * s
        - 4.0 * h3 * s * c2 * h2 - 4.0 * h3 * s3 * h2
        - 4.0 * h3 * c2 * l1 + 4.0 * h3 * s2 * l1
        - 4.0 * l2 * c2 * h1 + 4.0 * l2 * s2 * h1
        - 8.0 * h3 * h3 * s3 * c - 2.0 * h2 * c * l2 - 2.0 * h2 * c * l1
        + 8.0 * l2 * c * l1 * s - 8.0 * l2 * l2 * s3 * c
        - 8.0 * h3 * c * h1 * s - 2.0 * h2 * s * h1 + 2.0 * h2 * s * h3
    )


def tapered_stack(base: SegmentGeometry, lam: float, states) -> StackConfig:
    """Build a three-segment stack from a base segment and taper ratio ``lam``.

    Level ``i`` (0-based) is ``base`` uniformly scaled by ``lam**i``, so each
    base plate matches the moving plate below it.  ``states`` gives the three
    per-level angles.  Raises :class:`InvalidRatio` unless ``0 < lam <= 1``.
    """
    if not (math.isfinite(lam) and 0.0 < lam <= 1.0):
        raise InvalidRatio(f"taper ratio must lie in (0, 1], got {lam!r}")
    states = tuple(
        st if isinstance(st, SegmentState) else SegmentState(st) for st in states
    )
    segments = tuple(
        SegmentGeometry(
            h1=base.h1 * lam**i,
            h2=base.h2 * lam**i,
            h3=base.h3 * lam**i,
            l1=base.l1 * lam**i,
            l2=base.l2 * lam**i,
        )
        for i in range(3)
    )
    return StackConfig(segments=segments, states=states)


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def stack_forward(config: StackConfig) -> tuple[Frame2D, Frame2D, Frame2D]:
    """Forward kinematics of a stack: the moving-plate frame of each level.

    Each segment contributes a translation to its plate mid-point ``d0`` and a
    rotation by ``2*alpha``; frames compose bottom-up starting from the
    world-aligned base frame at the origin.
    """
    origin = np.zeros(2)
    theta = 0.0
    frames = []
    for g, st in zip(config.segments, config.states):
        pose = segment_points(g, st)
        origin = origin + _rotation(theta) @ pose.d0
        theta = normalize_angle(theta + 2.0 * st.alpha)
        frames.append(Frame2D(origin=origin, theta=theta))
    return tuple(frames)
