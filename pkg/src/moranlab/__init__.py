"""Moran's index of spatial autocorrelation through inner and outer product equations."""

from .bounds import BoundsReport, compute_bounds, rayleigh_quotient
from .constants import TOL, Tolerances
from .eigen import EigenDecomposition, symmetric_eigenvalues
from .errors import InputError, MoranLabError, NumericalError
from .ingest import (
    AttributeTable,
    DistanceMatrix,
    StandardizedVector,
    load_attribute_table,
    load_distance_matrix,
    standardize,
)
from .models import (
    ROUTES,
    ModelFit,
    RouteComparison,
    coefficient_p_values,
    compare_routes,
    fit_with_intercept,
    fit_without_intercept,
    r_squared,
    residual_diagnostics,
)
from .moran import (
    GetisOrdResult,
    MoranResult,
    getis_ord_index,
    moran_index,
    outer_product_check,
)
from .scatterplot import ScatterplotSpec, build_scatterplot, emit_csv, emit_svg
from .weights import (
    ContiguityMatrix,
    WeightMatrix,
    inverse_distance_contiguity,
    normalize_global,
    spatial_lag,
    weights_from_distances,
)

__version__ = "0.1.0"
