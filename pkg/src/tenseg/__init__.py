"""Analysis toolkit for stacked planar tensegrity mechanisms.

Segment kinematics (:mod:`tenseg.geometry`), certified singularity analysis
(:mod:`tenseg.singularity` on top of :mod:`tenseg.polyroots`), spring-energy
stability (:mod:`tenseg.energy`), and a deterministic design grid search
(:mod:`tenseg.optimizer`), with a batch CLI in :mod:`tenseg.cli`.
"""

from .energy import (EnergyProfile, InvalidFraction, NoSingularity,
                     SpringParams, Stability, StabilityClass,
                     classify_home_stability, energy, energy_profile,
                     rest_length, total_energy)
from .geometry import (Frame2D, InvalidGeometry, InvalidRatio, SegmentGeometry,
                       SegmentPose, SegmentState, StackConfig, cable_lengths,
                       cable_lengths_squared, normalize_angle, segment_points,
                       singularity_condition, stack_forward, tapered_stack,
                       validate_geometry)
from .optimizer import (DesignBounds, DesignRecord, EmptyGrid,
                        OptimizationReport, SpringSpec, enumerate_grid,
                        evaluate_design, optimize)
from .polyroots import (DegenerateInput, Polynomial, RootSet,
                        half_angle_polynomial, real_roots, sturm_root_count)
from .singularity import SingularitySet, scan_singularities, singular_angles

__version__ = "0.1.0"

__all__ = [
    "EnergyProfile", "InvalidFraction", "NoSingularity", "SpringParams",
    "Stability", "StabilityClass", "classify_home_stability", "energy",
    "energy_profile", "rest_length", "total_energy",
    "Frame2D", "InvalidGeometry", "InvalidRatio", "SegmentGeometry",
    "SegmentPose", "SegmentState", "StackConfig", "cable_lengths",
    "cable_lengths_squared", "normalize_angle", "segment_points",
    "singularity_condition", "stack_forward", "tapered_stack",
    "validate_geometry",
    "DesignBounds", "DesignRecord", "EmptyGrid", "OptimizationReport",
    "SpringSpec", "enumerate_grid", "evaluate_design", "optimize",
    "DegenerateInput", "Polynomial", "RootSet", "half_angle_polynomial",
    "real_roots", "sturm_root_count",
    "SingularitySet", "scan_singularities", "singular_angles",
    "__version__",
]
