"""Singularity locus of a segment over the full joint range (-pi, pi].

A configuration is singular for a cable loop when the cable length is
stationary in ``alpha``: the cable momentarily loses first-order control
authority over the joint.  Loop 1 is the left cable; by the mirror symmetry of
the trapezoid, loop 2 is singular exactly at the negated loop-1 angles.

Angles are found through the tangent half-angle polynomial
(:func:`tenseg.polyroots.half_angle_polynomial`) with certified Sturm
isolation, so no root in the range can be missed; ``alpha = pi``, which the
half-angle substitution cannot represent, is tested separately.  The key
figure of merit is ``alpha_sing``: the singular angle nearest the home
configuration ``alpha = 0``, which bounds the usable symmetric deflection
range of the segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SegmentGeometry, normalize_angle, singularity_condition
from .polyroots import cauchy_root_bound, half_angle_polynomial, real_roots

# |leading coefficient| below this times the coefficient scale counts as a
# root of the condition at alpha = pi.
_PI_ROOT_REL = 1e-12


@dataclass(frozen=True)
class SingularitySet:
    """Singular angles of both cable loops, sorted ascending in (-pi, pi].

    ``multiplicities`` aligns with ``loop1`` (loop 2 mirrors it); an even
    entry marks a tangency, where the condition touches zero without changing
    sign.  ``alpha_sing`` is the smallest absolute singular angle, or ``None``
    when no loop is ever singular.
    """

    loop1: tuple[float, ...]
    loop2: tuple[float, ...]
    multiplicities: tuple[int, ...]
    alpha_sing: float | None


def singular_angles(g: SegmentGeometry) -> SingularitySet:
    """All singular angles of both loops of ``g`` in (-pi, pi]."""
    poly = half_angle_polynomial(g)
    coeff_scale = max(abs(c) for c in poly.coeffs)
    if coeff_scale == 0.0:
        # The condition vanishes identically only for degenerate dimensions
        # that validate_geometry rejects; guard anyway.
        raise ValueError("singularity condition is identically zero")

    bound = cauchy_root_bound(poly)
    roots = real_roots(poly, -bound, bound)
    angles = [2.0 * math.atan(t) for t in roots.roots]
    mults = list(roots.multiplicities)

    # t = tan(alpha/2) cannot reach alpha = pi; the condition there equals the
    # leading coefficient.
    if abs(poly.coeffs[-1]) <= _PI_ROOT_REL * coeff_scale:
        angles.append(math.pi)
        mults.append(1)

    order = sorted(range(len(angles)), key=angles.__getitem__)
    loop1 = tuple(angles[i] for i in order)
    mult = tuple(mults[i] for i in order)
    loop2 = tuple(sorted(normalize_angle(-a) for a in loop1))
    alpha_sing = min((abs(a) for a in loop1), default=None)
    return SingularitySet(loop1=loop1, loop2=loop2, multiplicities=mult,
                          alpha_sing=alpha_sing)


def scan_singularities(g: SegmentGeometry, n: int = 1_000_000):
    """Sign-change brackets of the loop-1 condition on a dense uniform grid.

    Samples the condition at ``n`` points covering (-pi, pi] and returns the
    list of ``(lo, hi)`` sample pairs across which it changes sign — an
    independent, derivative-free check on :func:`singular_angles` (tangencies,
    which touch zero without crossing, are invisible here by design).
    """
    if n < 1000:
        raise ValueError(f"need at least 1000 samples for a meaningful scan, got {n}")
    alphas = -math.pi + (2.0 * math.pi / n) * np.arange(1, n + 1)
    values = singularity_condition(g, alphas)
    signs = np.sign(values)
    # Zero samples adopt the sign to their left so an exact hit still yields
    # one bracket instead of none.
    for idx in np.flatnonzero(signs == 0.0):
        signs[idx] = signs[idx - 1] if idx > 0 else 1.0
    flips = np.flatnonzero(signs[:-1] * signs[1:] < 0.0)
    return [(float(alphas[i]), float(alphas[i + 1])) for i in flips]
