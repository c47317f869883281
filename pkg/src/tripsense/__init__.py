"""tripsense: trip-level alcohol-influence detection from telematics logs."""

__version__ = "0.1.0"

from .core import (
    LabeledDataset,
    RawRecord,
    TripFeatureVector,
    TripRecord,
    canonical_feature_names,
)

__all__ = [
    "LabeledDataset",
    "RawRecord",
    "TripFeatureVector",
    "TripRecord",
    "canonical_feature_names",
    "__version__",
]
