"""Python bindings for the gda geometric data analysis library."""

from ._core import (
    AnalysisKind,
    Dendrogram,
    FactorModel,
    GdaError,
    IndicatorMatrix,
    PointCloud,
    Projection,
    TypicalityResult,
    category_centroid,
    chi2_distance,
    cut,
    double_columns,
    fit_ca,
    fit_mca,
    fit_pca,
    load_model,
    mahalanobis_statistic,
    modified_rates,
    project_col,
    project_row,
    save_model,
    survey_indicator,
    typicality,
    typicality_external,
    ward,
)

__version__ = "0.1.0"
