"""Payments-data macroeconomic nowcasting toolkit."""

__version__ = "0.1.0"

from .design import FeatureFrame, FrameSpec, HorizonSpec, build_design_matrix, standardize
from .series import MonthlySeries, aggregate_streams, seasonal_adjust_lite, yoy_growth
from .vintages import VintageStore, parse_series_csv, vintage_asof, write_series_csv

__all__ = [
    "__version__",
    "FeatureFrame",
    "FrameSpec",
    "HorizonSpec",
    "MonthlySeries",
    "VintageStore",
    "aggregate_streams",
    "build_design_matrix",
    "parse_series_csv",
    "seasonal_adjust_lite",
    "standardize",
    "vintage_asof",
    "write_series_csv",
    "yoy_growth",
]
