"""Figures for the CLI report path.

Each function draws one figure with the object-oriented matplotlib API (no
pyplot state) and writes it next to the CSV it illustrates. SVG output is
made byte-reproducible by fixing the hash salt and dropping the date stamp.
An optional ``note`` (the CLI passes its config hash) is stored in the file
metadata.
"""

import matplotlib
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
import numpy as np

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "gappydmap",
    "svg.fonttype": "none",
}


def _new(width=4.0, height=3.0):
    fig = Figure(figsize=(width, height))
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(1, 1, 1)


def _save(fig, path, note=None):
    path = str(path)
    meta = {"Date": None} if path.endswith(".svg") else {"Software": None}
    if note:
        meta["Description"] = note
    with matplotlib.rc_context(_STYLE):
        fig.tight_layout()
        fig.savefig(path, metadata=meta)
    return path


def residual_bars(report, path, note=None):
    """Bar chart of ``r_k`` with the selected coordinates highlighted."""
    with matplotlib.rc_context(_STYLE):
        fig, ax = _new()
        labels = np.asarray(report.labels)
        colors = ["C3" if k in report.selected else "C0" for k in labels]
        ax.bar(labels, report.r, color=colors)
        if np.isfinite(report.threshold_used):
            ax.axhline(report.threshold_used, color="0.4", lw=0.8, ls="--")
        ax.set_xlabel("eigenvector index k")
        ax.set_ylabel("local linear residual $r_k$")
        ax.set_ylim(0, max(1.05, 1.05 * float(np.max(report.r))))
        ax.set_xticks(labels)
    return _save(fig, path, note)


def predicted_vs_actual(predicted, actual, path, label="value", note=None):
    """Scatter of predictions against truth with the identity line."""
    pred = np.ravel(predicted)
    act = np.ravel(actual)
    with matplotlib.rc_context(_STYLE):
        fig, ax = _new(3.2, 3.2)
        lo, hi = min(pred.min(), act.min()), max(pred.max(), act.max())
        ax.plot([lo, hi], [lo, hi], color="0.5", lw=0.8)
        ax.scatter(act, pred, s=8, color="C0")
        ax.set_xlabel(f"actual {label}")
        ax.set_ylabel(f"predicted {label}")
    return _save(fig, path, note)


def cond_vs_error(cond, pod_error, dmap_error, path, note=None):
    """Reconstruction error of both methods against cond(A) over a mask sweep."""
    cond = np.asarray(cond, dtype=np.float64)
    finite = np.isfinite(cond)
    with matplotlib.rc_context(_STYLE):
        fig, ax = _new()
        ax.loglog(cond[finite], np.asarray(pod_error)[finite], "o", ms=4, label="gappy POD")
        ax.loglog(cond[finite], np.asarray(dmap_error)[finite], "s", ms=4, label="gappy DMAP")
        ax.set_xlabel("cond(A)")
        ax.set_ylabel("mean relative error (%)")
        ax.legend(frameon=False)
    return _save(fig, path, note)


def energy_curve(singular_values, path, squared=False, note=None):
    """Cumulative energy ``E_i %`` against the number of modes."""
    from .gappy_pod import cumulative_energy

    E = cumulative_energy(singular_values, squared)
    with matplotlib.rc_context(_STYLE):
        fig, ax = _new()
        ax.plot(np.arange(1, E.size + 1), E, "o-", ms=3)
        ax.set_xscale("log")
        ax.set_xlabel("number of modes i")
        ax.set_ylabel("E_i (%)")
    return _save(fig, path, note)
