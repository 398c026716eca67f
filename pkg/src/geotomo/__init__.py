"""Numerical toolkit for sections, shadow boundaries and symmetry of convex bodies."""

from .bodies import (
    BodySpec,
    ConvexBody,
    PlanarSection,
    Quadric,
    boundary_contains_point,
    diametral_chord,
    disc_hull_body,
    dump_body_spec,
    ellipsoid_body,
    half_ellipse_profile,
    load_body_spec,
    make_body,
    project,
    revolution_body,
    section,
    support,
    support_values,
)
from .characterize import (
    QuadricFit,
    TheoremReport,
    VerifyConfig,
    detect_revolution,
    fit_quadric,
    projection_section_ellipsoid_checks,
    sphere_characterization,
    verify_theorem,
)
from .errors import (
    DegenerateInputError,
    EmptySectionError,
    GeotomoError,
    IterationAborted,
    NotInteriorError,
    SpecError,
)
from .geometry import AffineLine, Frame2D, Hyperplane, Segment, reflect_point, reflect_point_in_line
from .shadow import (
    ShadowBoundary,
    boundary_segment_directions,
    is_segment_free,
    planarity,
    reflection_iteration,
    shadow_boundary,
)
from .symmetry import (
    CentralSymmetry,
    SymmetryAxis,
    axis_parallel_to,
    axis_through_point,
    central_symmetry,
    symmetry_axes,
)
from .tomography import (
    ClassificationReport,
    DirectionGrid,
    classify_point,
    h_parallel_test,
    reflection_map,
    symmetry_hyperplane,
)

__version__ = "0.1.0"
