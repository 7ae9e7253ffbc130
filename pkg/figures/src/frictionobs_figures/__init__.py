"""Batch figure rendering for simulation run directories.

Consumes the runner's delimited outputs (timeseries.csv, snapshots.csv) and
renders three static images: parameter convergence, composite norm traces,
and a space-time surface of the leading distributed error component. The
scripts never import the simulator; the CSV schemas are the interface.
"""

__version__ = "0.1.0"

from .plots import (
    FigureSpec,
    MissingColumnError,
    plot_error_surface,
    plot_norms,
    plot_parameters,
    render_run,
)
