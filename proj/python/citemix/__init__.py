"""Monte Carlo toolkit for correlation attenuation in merged article sets.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    ArticleSet,
    CalibratedSet,
    DegenerateInputError,
    Engine,
    IntervalEstimate,
    InvalidParameterError,
    InversionEstimate,
    LevelMeans,
    LognormalSpec,
    NoConvergenceError,
    NonBracketingError,
    OutOfRangeError,
    PointResult,
    QualityDistribution,
    RelationshipShape,
    SubsetParams,
    SubsetSketch,
    UnreachableTargetError,
    __version__,
    average_ranks,
    calibrate_sigma,
    estimate_subset_correlations,
    generate_set,
    mean_and_ci,
    preset_distribution,
    resolve_level_means,
    sample_citation_counts,
    sample_quality_vector,
    spearman_rho,
)

__all__ = [
    "ArticleSet",
    "CalibratedSet",
    "DegenerateInputError",
    "Engine",
    "IntervalEstimate",
    "InvalidParameterError",
    "InversionEstimate",
    "LevelMeans",
    "LognormalSpec",
    "NoConvergenceError",
    "NonBracketingError",
    "OutOfRangeError",
    "PointResult",
    "QualityDistribution",
    "RelationshipShape",
    "SubsetParams",
    "SubsetSketch",
    "UnreachableTargetError",
    "__version__",
    "average_ranks",
    "calibrate_sigma",
    "estimate_subset_correlations",
    "generate_set",
    "mean_and_ci",
    "preset_distribution",
    "resolve_level_means",
    "sample_citation_counts",
    "sample_quality_vector",
    "spearman_rho",
]
