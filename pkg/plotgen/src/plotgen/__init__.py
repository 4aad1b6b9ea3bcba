"""Offline figure generation from coea-lab results.csv files."""

from .figures import CHI_SWEEP, SCALING, FigureInfo, PlotRequest, plot
from .results import SchemaError, read_results

__version__ = "0.1.0"

__all__ = [
    "CHI_SWEEP", "SCALING", "PlotRequest", "FigureInfo", "plot",
    "read_results", "SchemaError", "__version__",
]
