"""Desk-scale certification of projection-complex constructions.

Build Cayley balls for free and small-cancellation presentations, extract
canonical translation axes, materialize nearest-point projection families,
verify the projection axioms, assemble threshold complexes, color the
family into bounded-projection classes, and certify the two-sided orbit
bounds in the resulting product of quasi-trees.
"""

from .axes import (
    AxesConfig,
    Axis,
    AxisCollection,
    all_primitive_axes,
    build_axis,
    coverage_gaps,
    double_coset_scan,
    select_preferred_axes,
    witness_axis,
)
from .complexes import (
    ComplexConfig,
    EstimateConfig,
    QuasiTreeComplex,
    build_complex,
    complex_distance,
    verify_distance_formula,
    verify_main_estimate,
)
from .embedding import (
    BasepointTuple,
    CertifyConfig,
    ColorClasses,
    EmbeddingReport,
    ProductSpace,
    default_basepoint,
    greedy_color,
    orbit_map,
    qi_certify,
    verify_coloring,
)
from .graphs import (
    MetricGraph,
    bottleneck_check,
    estimate_hyperbolicity,
    graph_to_text,
    nearest_point_projection,
    set_diameter,
)
from .groups import (
    CayleyBall,
    Presentation,
    cayley_ball,
    conjugacy_representative,
    is_primitive,
    iter_ball_words,
)
from .projections import (
    AxiomReport,
    ProjectionFamily,
    materialize_family,
    synthetic_family,
    threshold,
    verify_axioms,
)

__version__ = "0.1.0"

__all__ = [
    "AxesConfig", "Axis", "AxisCollection", "AxiomReport", "BasepointTuple",
    "CayleyBall", "CertifyConfig", "ColorClasses", "ComplexConfig",
    "EmbeddingReport", "EstimateConfig", "MetricGraph", "Presentation",
    "ProductSpace", "ProjectionFamily", "QuasiTreeComplex",
    "all_primitive_axes", "bottleneck_check", "build_axis", "build_complex",
    "cayley_ball", "complex_distance", "conjugacy_representative",
    "coverage_gaps", "default_basepoint", "double_coset_scan",
    "estimate_hyperbolicity", "graph_to_text", "greedy_color", "is_primitive",
    "iter_ball_words", "materialize_family", "nearest_point_projection",
    "orbit_map", "qi_certify", "select_preferred_axes", "set_diameter",
    "synthetic_family", "threshold", "verify_axioms", "verify_coloring",
    "verify_distance_formula", "verify_main_estimate", "witness_axis",
]
