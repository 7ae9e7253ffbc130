"""Figure renderers over the runner's CSV schemas.

All entry points are read-only over their inputs and overwrite their output
file idempotently. A requested time window is clamped to the data actually
present, so truncated runs render without complaint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "FigureSpec",
    "MissingColumnError",
    "load_columns",
    "plot_parameters",
    "plot_norms",
    "plot_error_surface",
    "render_run",
]


class MissingColumnError(KeyError):
    """A required CSV column is absent; the message names it."""

    def __init__(self, column: str, path):
        super().__init__(column)
        self.column = column
        self.path = Path(path)

    def __str__(self):
        return f"{self.path}: missing required column '{self.column}'"


@dataclass(frozen=True)
class FigureSpec:
    """What to read, which columns it needs, and where the image goes."""

    source: Path
    output: Path
    columns: tuple
    time_window: tuple = (0.0, float("inf"))


def load_columns(path, required) -> dict:
    """Read a CSV into named float arrays, validating the required columns."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    for name in required:
        if name not in header:
            raise MissingColumnError(name, path)
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, header.index(name)] for name in required}


def _clamp(t, window):
    lo, hi = window
    mask = (t >= lo) & (t <= min(hi, t[-1] if t.size else hi))
    return mask if np.any(mask) else np.ones_like(t, dtype=bool)


def plot_parameters(timeseries_csv, out_path, time_window=(0.0, 10.0)) -> Path:
    """Estimated friction parameters against the scheduled true values."""
    spec = FigureSpec(Path(timeseries_csv), Path(out_path),
                      ("t", "theta1_hat", "theta2_hat", "theta1_true", "theta2_true"),
                      time_window)
    cols = load_columns(spec.source, spec.columns)
    keep = _clamp(cols["t"], spec.time_window)
    t = cols["t"][keep]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, cols["theta1_true"][keep], "k--", lw=1.2, label=r"$\theta_1$ (true)")
    ax.plot(t, cols["theta2_true"][keep], "k:", lw=1.2, label=r"$\theta_2$ (true)")
    ax.plot(t, cols["theta1_hat"][keep], lw=1.6, label=r"$\hat\theta_1$")
    ax.plot(t, cols["theta2_hat"][keep], lw=1.6, label=r"$\hat\theta_2$")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("friction parameter")
    ax.set_title("Parameter estimate convergence")
    ax.legend(loc="best", ncol=2)
    ax.grid(alpha=0.3)
    return _save(fig, spec.output)


def plot_norms(timeseries_csv, out_path, time_window=(0.0, 10.0)) -> Path:
    """True-state, estimate, and error composite norms over time."""
    spec = FigureSpec(Path(timeseries_csv), Path(out_path),
                      ("t", "state_norm_X", "est_norm_X", "err_norm_X"), time_window)
    cols = load_columns(spec.source, spec.columns)
    keep = _clamp(cols["t"], spec.time_window)
    t = cols["t"][keep]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, cols["state_norm_X"][keep], lw=1.8, label="true state norm")
    ax.plot(t, cols["est_norm_X"][keep], ls=":", lw=1.8, label="estimate norm")
    ax.plot(t, cols["err_norm_X"][keep], lw=1.4, label="error norm")
    ax.set_xlabel("time [s]")
    ax.set_ylabel(r"composite norm $\Vert(X, z)\Vert$")
    ax.set_title("State reconstruction")
    ax.legend(loc="best")
    ax.grid(alpha=0.3)
    return _save(fig, spec.output)


def plot_error_surface(snapshots_csv, out_path, time_window=(0.0, float("inf"))) -> Path:
    """Space-time surface of the front distributed error z1 - z1_hat.

    The initial-condition profile (earliest snapshot) and the inflow-boundary
    trace are overlaid as line plots.
    """
    spec = FigureSpec(Path(snapshots_csv), Path(out_path),
                      ("t", "xi", "z1", "z1_hat"), time_window)
    cols = load_columns(spec.source, spec.columns)
    if cols["t"].size == 0:
        raise ValueError(f"{spec.source}: no snapshot rows to plot")
    keep = _clamp(cols["t"], spec.time_window)
    t_vals = np.unique(cols["t"][keep])
    xi_vals = np.unique(cols["xi"][keep])
    err = cols["z1"][keep] - cols["z1_hat"][keep]
    surface = np.full((t_vals.size, xi_vals.size), np.nan)
    ti = np.searchsorted(t_vals, cols["t"][keep])
    xj = np.searchsorted(xi_vals, cols["xi"][keep])
    surface[ti, xj] = err

    fig = plt.figure(figsize=(8, 4.5))
    gs = fig.add_gridspec(1, 2, width_ratios=(3, 1.3), wspace=0.35)
    ax = fig.add_subplot(gs[0, 0])
    mesh = ax.pcolormesh(xi_vals, t_vals, surface, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$z_1 - \hat z_1$")
    ax.set_xlabel(r"contact patch coordinate $\xi$")
    ax.set_ylabel("time [s]")
    ax.set_title("Distributed error evolution")

    side = fig.add_subplot(gs[0, 1])
    side.plot(xi_vals, surface[0], lw=1.6, label=f"IC profile (t = {t_vals[0]:g})")
    side.plot(t_vals, surface[:, 0], lw=1.6, label=r"BC trace ($\xi = 0$)")
    side.set_xlabel(r"$\xi$  /  time [s]")
    side.set_ylabel(r"$z_1 - \hat z_1$")
    side.legend(loc="best", fontsize=8)
    side.grid(alpha=0.3)
    return _save(fig, spec.output)


def _save(fig, out_path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_run(run_dir, out_dir=None) -> list:
    """Render all three figures for a completed run directory."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    timeseries = run_dir / "timeseries.csv"
    snapshots = run_dir / "snapshots.csv"
    for path in (timeseries, snapshots):
        if not path.is_file():
            raise FileNotFoundError(f"expected run output {path}")
    return [
        plot_parameters(timeseries, out_dir / "parameters.png"),
        plot_norms(timeseries, out_dir / "norms.png"),
        plot_error_surface(snapshots, out_dir / "error_surface.png"),
    ]
