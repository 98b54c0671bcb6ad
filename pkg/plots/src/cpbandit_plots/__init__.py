"""Plotting companion for cpbandit sweep and bound CSVs."""

from .figures import PlotSpec, SchemaError, plot_bounds, plot_sweep

__version__ = "0.1.0"

__all__ = ["PlotSpec", "SchemaError", "plot_bounds", "plot_sweep"]
