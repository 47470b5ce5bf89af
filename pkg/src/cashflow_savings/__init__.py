"""Daily cash-flow forecasting accuracy measured as cash-management cost savings."""

from .errors import (CashFlowError, CollinearityError, DegenerateError, DomainError, ParseError,
                     ValidationError)
from .timeseries import (CashFlowSeries, DesignMatrix, FeatureSpec, Variant, build_features,
                         derive_variant, load_series, summarize, synthetic_series, write_series)
from .transform import LambdaTransform, Standardizer, fit_lambda, forward, inverse, standardize

__version__ = "0.1.0"

__all__ = [
    "CashFlowError", "CashFlowSeries", "CollinearityError", "DegenerateError", "DesignMatrix",
    "DomainError", "FeatureSpec", "LambdaTransform", "ParseError", "Standardizer",
    "ValidationError", "Variant", "build_features", "derive_variant", "fit_lambda", "forward",
    "inverse", "load_series", "standardize", "summarize", "synthetic_series", "write_series",
]
