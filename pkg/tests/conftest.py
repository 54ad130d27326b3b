"""Shared test helpers: reference geometries and seeded random sampling."""

import numpy as np

from tenseg import SegmentGeometry

# The all-ones segment: every spine link and half-width equal to 1.  Its
# loop-1 singular angles have closed forms (see test_singularity).
UNIT = SegmentGeometry(h1=1.0, h2=1.0, h3=1.0, l1=1.0, l2=1.0)

# Contrasting pair used by the stability tests: flat end links make the home
# configuration a strict energy minimum, unit end links with a half-width
# platform make it a maximum.
STABLE_FLAT = SegmentGeometry(h1=0.0, h2=1.0, h3=0.0, l1=1.0, l2=1.0)
UNSTABLE_TALL = SegmentGeometry(h1=1.0, h2=1.0, h3=1.0, l1=1.0, l2=0.5)


def random_geometry(rng: np.random.Generator,
                    flat_probability: float = 0.25) -> SegmentGeometry:
    """Draw one random valid segment geometry.

    The end links ``h1``/``h3`` are exactly zero with ``flat_probability``
    each (the boundary case with its own closed-form singularities); the
    strictly positive dimensions stay well away from zero so random cases
    remain numerically unremarkable.
    """
    def end_link() -> float:
        if rng.random() < flat_probability:
            return 0.0
        return float(rng.uniform(0.05, 2.0))

    return SegmentGeometry(
        h1=end_link(),
        h2=float(rng.uniform(0.1, 2.5)),
        h3=end_link(),
        l1=float(rng.uniform(0.1, 3.0)),
        l2=float(rng.uniform(0.1, 3.0)),
    )


def random_angle(rng: np.random.Generator) -> float:
    """One angle in the open interval (-pi, pi)."""
    return float(rng.uniform(-np.pi + 1e-6, np.pi - 1e-6))
