"""Figure pipeline over the solver's CSV outputs."""

from .figures import FIGURE_KINDS, PlotSpec, plot
from .io import Table, load_table

__all__ = ["FIGURE_KINDS", "PlotSpec", "plot", "Table", "load_table"]
__version__ = "0.1.0"
