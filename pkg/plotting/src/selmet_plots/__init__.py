"""Figure rendering for selmet engine outputs, via their file formats only."""

from .figures import (
    FIGURE_KINDS,
    FigureJob,
    plot_acf,
    plot_heatmap,
    plot_histogram,
    plot_landscape,
    plot_trajectories,
    render,
)
from .readers import ParseError

__version__ = "0.1.0"
